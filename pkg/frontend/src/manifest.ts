import { SessionTile } from "./types.js";

export class ManifestError extends Error {}

function isRecord(value: unknown): value is Record<string, unknown> {
  return typeof value === "object" && value !== null && !Array.isArray(value);
}

function requireInt(value: unknown, what: string): number {
  if (typeof value !== "number" || !Number.isInteger(value)) {
    throw new ManifestError(`${what} must be an integer, got ${JSON.stringify(value)}`);
  }
  return value;
}

/**
 * Validate a sampling manifest and return its tiles in presentation order.
 *
 * Blindness is enforced here, at the boundary: only tile_id, image_path and
 * order are copied out, so the hidden class label can never leak into the
 * session, the DOM or the export.
 */
export function parseManifest(data: unknown): SessionTile[] {
  if (!isRecord(data)) {
    throw new ManifestError("manifest root must be an object");
  }
  const rawTiles = data["tiles"];
  if (!Array.isArray(rawTiles) || rawTiles.length === 0) {
    throw new ManifestError("manifest has no tiles");
  }
  const tiles: SessionTile[] = rawTiles.map((entry, i) => {
    if (!isRecord(entry)) {
      throw new ManifestError(`tile entry ${i} is not an object`);
    }
    const imagePath = entry["image_path"];
    if (typeof imagePath !== "string" || imagePath.length === 0) {
      throw new ManifestError(`tile entry ${i} lacks image_path`);
    }
    return {
      tileId: requireInt(entry["tile_id"], `tile entry ${i} tile_id`),
      imagePath,
      order: requireInt(entry["order"], `tile entry ${i} order`),
    };
  });

  const orders = new Set(tiles.map((t) => t.order));
  if (orders.size !== tiles.length) {
    throw new ManifestError("presentation order values are not unique");
  }
  const ids = new Set(tiles.map((t) => t.tileId));
  if (ids.size !== tiles.length) {
    throw new ManifestError("tile ids are not unique");
  }
  return [...tiles].sort((a, b) => a.order - b.order);
}
