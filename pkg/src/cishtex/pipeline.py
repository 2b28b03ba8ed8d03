"""Stage runners and the CSV/JSON/PNG artifacts they exchange.

Every stage reads its predecessor's files from the run directory and writes
its own atomically (temp file + rename), so stages can be re-run or swapped
for external tools at any seam.
"""

from __future__ import annotations

import csv
import hashlib
import io
import json
import os
import tempfile
import warnings
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

from . import __version__
from .clustering import FcmConfig, SweepEntry, canonicalize, fcm, hard_assign, sweep_clusters
from .config import RunConfig, stage_seed
from .errors import StageInputMissing
from .evaluation import (AnnotationRecord, EvaluationReport, SamplingManifest,
                         aggregate, confusion, grade_classes, sample_tiles)
from .imaging import load_image, load_mask
from .reduction import FeatureMatrix, ReducedMatrix, ReductionMethod, reduce_features
from .rendering import encode_png, render_class_map, render_fpc_curve, render_legend
from .texture import (ExtractResult, default_directions, extract_features,
                      feature_columns)
from .tiling import Tile, TileSpec, build_grid

FEATURES_CSV = "features.csv"
REDUCED_CSV = "reduced.csv"
REDUCED_META = "reduced_meta.json"
CLUSTERS_CSV = "clusters.csv"
FPC_CSV = "fpc.csv"
FPC_CURVE_CSV = "fpc_curve.csv"
CLASS_MAP_PNG = "class_map.png"
LEGEND_PNG = "class_map_legend.png"
MANIFEST_JSON = "manifest.json"
REPORT_JSON = "report.json"
RUN_MANIFEST_JSON = "run_manifest.json"
TILE_DIR = "tiles"


def _fmt(x: float) -> str:
    return format(float(x), ".17g")


def atomic_write_bytes(path: Path, data: bytes) -> None:
    """Write via a sibling temp file and rename, so readers never see a torn file."""
    path.parent.mkdir(parents=True, exist_ok=True)
    fd, tmp = tempfile.mkstemp(dir=path.parent, prefix=f".{path.name}.")
    try:
        with os.fdopen(fd, "wb") as fh:
            fh.write(data)
        os.replace(tmp, path)
    except BaseException:
        if os.path.exists(tmp):
            os.unlink(tmp)
        raise


def atomic_write_text(path: Path, text: str) -> None:
    atomic_write_bytes(path, text.encode("utf-8"))


def _json_dumps(obj) -> str:
    return json.dumps(obj, indent=2, sort_keys=False) + "\n"


@dataclass
class StageResult:
    """What a stage produced, for logging and the run manifest."""

    stage: str
    artifacts: list[Path] = field(default_factory=list)
    counts: dict = field(default_factory=dict)
    warnings: list[str] = field(default_factory=list)


# ---------------------------------------------------------------------------
# artifact serialization

def write_features_csv(path: Path, result: ExtractResult) -> None:
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(["tile_id", "cx_px", "cy_px", *feature_columns()])
    for vec, tile in zip(result.vectors, result.tiles):
        writer.writerow([vec.tile_id, tile.cx_px, tile.cy_px,
                         *(_fmt(v) for v in vec.values)])
    atomic_write_text(path, buf.getvalue())


def read_features_csv(path: Path) -> tuple[FeatureMatrix, dict[int, tuple[int, int]]]:
    """Feature matrix plus tile centers keyed by tile_id."""
    if not path.exists():
        raise StageInputMissing(f"missing stage input: {path}")
    tile_ids: list[int] = []
    centers: dict[int, tuple[int, int]] = {}
    rows: list[list[float]] = []
    with open(path, newline="") as fh:
        reader = csv.reader(fh)
        header = next(reader)
        expected = ["tile_id", "cx_px", "cy_px", *feature_columns()]
        if header != expected:
            raise StageInputMissing(f"{path} has an unexpected header")
        for row in reader:
            tid = int(row[0])
            tile_ids.append(tid)
            centers[tid] = (int(row[1]), int(row[2]))
            rows.append([float(v) for v in row[3:]])
    return FeatureMatrix(tile_ids=np.asarray(tile_ids, dtype=np.int64),
                         X=np.asarray(rows, dtype=np.float64)), centers


def write_reduced(path: Path, meta_path: Path, reduced: ReducedMatrix) -> None:
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(["tile_id", "c1", "c2"])
    for tid, row in zip(reduced.tile_ids, reduced.Y):
        writer.writerow([int(tid), _fmt(row[0]), _fmt(row[1])])
    atomic_write_text(path, buf.getvalue())
    meta = {"method": reduced.method.value, **reduced.metadata}
    atomic_write_text(meta_path, _json_dumps(meta))


def read_reduced_csv(path: Path) -> tuple[np.ndarray, np.ndarray]:
    if not path.exists():
        raise StageInputMissing(f"missing stage input: {path}")
    tile_ids: list[int] = []
    rows: list[list[float]] = []
    with open(path, newline="") as fh:
        reader = csv.reader(fh)
        next(reader)
        for row in reader:
            tile_ids.append(int(row[0]))
            rows.append([float(row[1]), float(row[2])])
    return (np.asarray(tile_ids, dtype=np.int64),
            np.asarray(rows, dtype=np.float64))


def write_clusters_csv(path: Path, tile_ids: np.ndarray, labels: np.ndarray,
                       membership: np.ndarray) -> None:
    c = membership.shape[1]
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(["tile_id", "label", *(f"u_{k}" for k in range(c))])
    for tid, label, row in zip(tile_ids, labels, membership):
        writer.writerow([int(tid), int(label), *(_fmt(u) for u in row)])
    atomic_write_text(path, buf.getvalue())


def read_clusters_csv(path: Path) -> tuple[np.ndarray, np.ndarray, np.ndarray]:
    if not path.exists():
        raise StageInputMissing(f"missing stage input: {path}")
    tile_ids: list[int] = []
    labels: list[int] = []
    rows: list[list[float]] = []
    with open(path, newline="") as fh:
        reader = csv.reader(fh)
        next(reader)
        for row in reader:
            tile_ids.append(int(row[0]))
            labels.append(int(row[1]))
            rows.append([float(v) for v in row[2:]])
    return (np.asarray(tile_ids, dtype=np.int64),
            np.asarray(labels, dtype=np.int64),
            np.asarray(rows, dtype=np.float64))


def write_fpc_csv(path: Path, entries: list[SweepEntry]) -> None:
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(["c", "fpc", "objective", "iterations", "converged"])
    for e in sorted(entries, key=lambda e: e.c):
        writer.writerow([e.c, _fmt(e.fpc), _fmt(e.objective), e.iterations,
                         int(e.converged)])
    atomic_write_text(path, buf.getvalue())


def read_annotations_csv(paths: list[Path]) -> list[AnnotationRecord]:
    """Parse one or more annotation CSVs; class rows carry tile_id = -1."""
    records: list[AnnotationRecord] = []
    for path in paths:
        if not path.exists():
            raise StageInputMissing(f"missing annotations file: {path}")
        with open(path, newline="") as fh:
            reader = csv.DictReader(fh)
            required = {"evaluator_id", "weight", "tile_id", "strength", "pattern"}
            missing = required - set(reader.fieldnames or ())
            if missing:
                raise StageInputMissing(
                    f"{path} lacks columns: {sorted(missing)}")
            for row in reader:
                tile_id = int(row["tile_id"])
                class_id = row.get("class_id")
                records.append(AnnotationRecord(
                    evaluator_id=row["evaluator_id"],
                    weight=float(row["weight"]),
                    tile_id=tile_id,
                    strength=int(row["strength"]),
                    pattern=int(row["pattern"]),
                    class_id=int(class_id) if class_id not in (None, "") else None,
                ))
    return records


# ---------------------------------------------------------------------------
# stage runners

def _tile_spec(cfg: RunConfig) -> TileSpec:
    return TileSpec(diameter_um=cfg.tile_diameter_um, step_um=cfg.tile_step_um,
                    min_mask_fraction=cfg.min_mask_fraction)


def _directions(cfg: RunConfig):
    if cfg.directions == "single":
        return ((cfg.distance, 0),)
    return default_directions(cfg.distance)


def _load_inputs(cfg: RunConfig):
    image = load_image(cfg.image, cfg.pixel_size_um)
    mask = load_mask(cfg.mask, image)
    return image, mask


def _grid_for_labels(cfg: RunConfig, tile_ids: np.ndarray) -> list[Tile]:
    """Rebuild the deterministic grid and keep the tiles present downstream."""
    image, mask = _load_inputs(cfg)
    tiles = build_grid(image, mask, _tile_spec(cfg))
    wanted = set(int(t) for t in tile_ids)
    kept = [t for t in tiles if t.tile_id in wanted]
    if len(kept) != len(wanted):
        raise StageInputMissing("clusters.csv references tiles absent from the grid")
    return kept


def run_extract(cfg: RunConfig) -> StageResult:
    out = Path(cfg.out_dir)
    image, mask = _load_inputs(cfg)
    result = extract_features(image, mask, _tile_spec(cfg), cfg.bins,
                              cfg.distance, _directions(cfg))
    path = out / FEATURES_CSV
    write_features_csv(path, result)
    notes = [f"tile {tid} skipped: no valid pixel pairs"
             for tid in result.skipped_tile_ids]
    return StageResult(stage="extract", artifacts=[path],
                       counts={"tiles_measured": len(result.vectors),
                               "tiles_skipped": len(result.skipped_tile_ids)},
                       warnings=notes)


def run_reduce(cfg: RunConfig) -> StageResult:
    out = Path(cfg.out_dir)
    features, _ = read_features_csv(out / FEATURES_CSV)
    method = ReductionMethod(cfg.method)
    with warnings.catch_warnings(record=True) as caught:
        warnings.simplefilter("always")
        reduced = reduce_features(features, method, k=2,
                                  standardize=cfg.standardize)
    write_reduced(out / REDUCED_CSV, out / REDUCED_META, reduced)
    return StageResult(stage="reduce",
                       artifacts=[out / REDUCED_CSV, out / REDUCED_META],
                       counts={"rows": int(reduced.Y.shape[0])},
                       warnings=[str(w.message) for w in caught])


def run_cluster(cfg: RunConfig) -> StageResult:
    out = Path(cfg.out_dir)
    tile_ids, points = read_reduced_csv(out / REDUCED_CSV)
    fcm_cfg = FcmConfig(c=cfg.clusters, m=cfg.fuzziness, tol=cfg.tol,
                        max_iter=cfg.max_iter, n_init=cfg.n_init,
                        seed=stage_seed(cfg.seed, "cluster"))
    partition = canonicalize(fcm(points, fcm_cfg))
    labels = hard_assign(partition)
    write_clusters_csv(out / CLUSTERS_CSV, tile_ids, labels, partition.U)
    entry = SweepEntry(c=cfg.clusters, fpc=partition.fpc,
                       objective=partition.objective,
                       iterations=partition.iterations,
                       converged=partition.converged)
    write_fpc_csv(out / FPC_CSV, [entry])
    notes = [] if partition.converged else \
        [f"fcm hit max_iter={cfg.max_iter} before tol={cfg.tol}"]
    return StageResult(stage="cluster",
                       artifacts=[out / CLUSTERS_CSV, out / FPC_CSV],
                       counts={"clusters": cfg.clusters,
                               "points": int(points.shape[0])},
                       warnings=notes)


def run_sweep(cfg: RunConfig) -> StageResult:
    out = Path(cfg.out_dir)
    _, points = read_reduced_csv(out / REDUCED_CSV)
    fcm_cfg = FcmConfig(c=max(2, cfg.sweep_min), m=cfg.fuzziness, tol=cfg.tol,
                        max_iter=cfg.max_iter, n_init=cfg.n_init,
                        seed=stage_seed(cfg.seed, "sweep"))
    entries = sweep_clusters(points, fcm_cfg, (cfg.sweep_min, cfg.sweep_max))
    write_fpc_csv(out / FPC_CSV, entries)
    atomic_write_text(out / FPC_CURVE_CSV, render_fpc_curve(entries))
    return StageResult(stage="sweep",
                       artifacts=[out / FPC_CSV, out / FPC_CURVE_CSV],
                       counts={"sweep_points": len(entries)})


def run_render(cfg: RunConfig) -> StageResult:
    out = Path(cfg.out_dir)
    tile_ids, labels, _ = read_clusters_csv(out / CLUSTERS_CSV)
    tiles = _grid_for_labels(cfg, tile_ids)
    by_id = {int(t): lb for t, lb in zip(tile_ids, labels)}
    aligned = np.asarray([by_id[t.tile_id] for t in tiles], dtype=np.int64)
    image, _ = _load_inputs(cfg)
    class_map = render_class_map(image, tiles, aligned)
    n_classes = int(labels.max()) + 1 if len(labels) else 1
    atomic_write_bytes(out / CLASS_MAP_PNG, encode_png(class_map))
    atomic_write_bytes(out / LEGEND_PNG, encode_png(render_legend(n_classes)))
    return StageResult(stage="render",
                       artifacts=[out / CLASS_MAP_PNG, out / LEGEND_PNG],
                       counts={"classes": n_classes})


def run_sample(cfg: RunConfig) -> StageResult:
    out = Path(cfg.out_dir)
    tile_ids, labels, _ = read_clusters_csv(out / CLUSTERS_CSV)
    tiles = _grid_for_labels(cfg, tile_ids)
    by_id = {int(t): lb for t, lb in zip(tile_ids, labels)}
    aligned = np.asarray([by_id[t.tile_id] for t in tiles], dtype=np.int64)
    with warnings.catch_warnings(record=True) as caught:
        warnings.simplefilter("always")
        manifest = sample_tiles(tiles, aligned,
                                seed=stage_seed(cfg.seed, "sample"),
                                n_per_class=cfg.n_per_class)
    image, _ = _load_inputs(cfg)
    artifacts = []
    tiles_by_id = {t.tile_id: t for t in tiles}
    for entry in manifest.tiles:
        x0, y0, x1, y1 = entry.bbox
        crop = image.pixels[y0:y1, x0:x1]
        crop_path = out / entry.image_path
        atomic_write_bytes(crop_path, encode_png(np.ascontiguousarray(crop)))
        artifacts.append(crop_path)
        assert entry.tile_id in tiles_by_id
    manifest_path = out / MANIFEST_JSON
    atomic_write_text(manifest_path, _json_dumps(manifest.to_dict()))
    artifacts.append(manifest_path)
    return StageResult(stage="sample", artifacts=artifacts,
                       counts={"sampled_tiles": len(manifest.tiles)},
                       warnings=[str(w.message) for w in caught])


def load_manifest(path: Path) -> dict:
    if not path.exists():
        raise StageInputMissing(f"missing manifest: {path}")
    return json.loads(path.read_text())


def run_aggregate(out_dir: str | Path, annotation_paths: list[Path],
                  manifest_path: Path | None = None) -> StageResult:
    """Aggregate annotation CSVs into report.json.

    Confusion matrices are included when both a manifest (for hidden class
    labels) and class-level annotation rows are present.
    """
    out = Path(out_dir)
    records = read_annotations_csv(annotation_paths)
    notes: list[str] = []

    valid_tiles = None
    labels: dict[int, int] = {}
    if manifest_path is not None:
        manifest = load_manifest(manifest_path)
        labels = {t["tile_id"]: t["hidden_class"] for t in manifest["tiles"]}
        valid_tiles = set(labels)

    tile_grades = aggregate(records, valid_tiles=valid_tiles)
    class_grades = grade_classes(records)

    report_dict: dict
    if labels and class_grades:
        report: EvaluationReport = confusion(tile_grades, class_grades, labels)
        report_dict = report.to_dict()
    else:
        report_dict = {
            "n_tiles": len(tile_grades),
            "per_tile": [
                {
                    "tile_id": g.tile_id,
                    "strength_mean": g.strength_mean,
                    "pattern_mean": g.pattern_mean,
                    "strength": g.strength,
                    "pattern": g.pattern,
                    "n_evaluators": g.n_evaluators,
                    "total_weight": g.total_weight,
                }
                for g in sorted(tile_grades.values(), key=lambda g: g.tile_id)
            ],
            "class_grades": [],
        }
    report_dict["warnings"] = notes
    path = out / REPORT_JSON
    atomic_write_text(path, _json_dumps(report_dict))
    return StageResult(stage="aggregate", artifacts=[path],
                       counts={"tiles_graded": len(tile_grades),
                               "classes_graded": len(class_grades)},
                       warnings=notes)


def _sha256(path: Path) -> str:
    h = hashlib.sha256()
    with open(path, "rb") as fh:
        for chunk in iter(lambda: fh.read(65536), b""):
            h.update(chunk)
    return h.hexdigest()


def write_run_manifest(cfg: RunConfig, results: list[StageResult]) -> Path:
    """Tie every emitted artifact to the config and its content digest."""
    out = Path(cfg.out_dir)
    artifacts = {}
    counts: dict = {}
    notes: list[str] = []
    for res in results:
        for path in res.artifacts:
            artifacts[str(path.relative_to(out))] = {
                "sha256": _sha256(path),
                "bytes": path.stat().st_size,
            }
        counts.update({f"{res.stage}.{k}": v for k, v in res.counts.items()})
        notes.extend(res.warnings)
    manifest = {
        "tool_version": __version__,
        "config": cfg.to_dict(),
        "artifacts": artifacts,
        "counts": counts,
        "warnings": notes,
    }
    path = out / RUN_MANIFEST_JSON
    atomic_write_text(path, _json_dumps(manifest))
    return path


PIPELINE_STAGES = (run_extract, run_reduce, run_cluster, run_render, run_sample)


def run_pipeline(cfg: RunConfig) -> list[StageResult]:
    """extract -> reduce -> cluster -> render -> sample, plus the run manifest."""
    results = [stage(cfg) for stage in PIPELINE_STAGES]
    write_run_manifest(cfg, results)
    return results
