// Builders mirroring the pipeline's manifest.json shape.

export interface ManifestTileJson {
  tile_id: number;
  image_path: string;
  bbox: { x0: number; y0: number; x1: number; y1: number };
  hidden_class: number;
  order: number;
}

export function makeManifest(nClasses = 7, perClass = 10): {
  scheme: unknown;
  tiles: ManifestTileJson[];
} {
  const total = nClasses * perClass;
  // a fixed, non-trivial presentation permutation independent of tile_id
  const orders: number[] = [];
  for (let i = 0; i < total; i++) orders.push((i * 37 + 11) % total);
  const tiles: ManifestTileJson[] = [];
  for (let tileId = 0; tileId < total; tileId++) {
    tiles.push({
      tile_id: tileId,
      image_path: `tiles/tile_${String(tileId).padStart(4, "0")}.png`,
      bbox: { x0: tileId, y0: 0, x1: tileId + 300, y1: 300 },
      hidden_class: tileId % nClasses,
      order: orders[tileId]!,
    });
  }
  return {
    scheme: {
      strength: { none: 0, low: 1, moderate: 2, strong: 3 },
      pattern: { none: 0, sparse: 1, dense: 2 },
    },
    tiles,
  };
}

export function scriptedScore(tileId: number): { strength: number; pattern: number } {
  return { strength: tileId % 4, pattern: tileId % 3 };
}
