"""Fuzzy c-means over the reduced points, with FPC model selection.

The optimizer is the standard alternating scheme: centroids are the
membership-weighted means, memberships the inverse-distance-ratio update.
Runs are seeded and multi-restarted so a fixed configuration always yields
the same partition, and clusters are canonically ordered by centroid so
class indices are stable across runs.
"""

from __future__ import annotations

from dataclasses import dataclass, field, replace

import numpy as np

from .errors import TooFewPoints

DEFAULT_CLUSTERS = 7
DEFAULT_FUZZINESS = 2.0
DEFAULT_TOL = 1e-6
DEFAULT_MAX_ITER = 1000
DEFAULT_N_INIT = 10
DEFAULT_SWEEP_RANGE = (2, 10)

# Squared distances at or below this count as coincident with a centroid;
# smallest positive normal float, so the inverse-power update cannot overflow.
_COINCIDENT_D2 = np.finfo(np.float64).tiny


@dataclass(frozen=True)
class FcmConfig:
    """Fuzzy c-means parameters."""

    c: int = DEFAULT_CLUSTERS
    m: float = DEFAULT_FUZZINESS
    tol: float = DEFAULT_TOL
    max_iter: int = DEFAULT_MAX_ITER
    n_init: int = DEFAULT_N_INIT
    seed: int = 0

    def __post_init__(self):
        if self.c < 2:
            raise ValueError("c must be >= 2")
        if not self.m > 1:
            raise ValueError("fuzziness exponent m must be > 1")
        if not self.tol > 0:
            raise ValueError("tol must be positive")
        if self.max_iter < 1 or self.n_init < 1:
            raise ValueError("max_iter and n_init must be >= 1")


@dataclass(frozen=True)
class FuzzyPartition:
    """Converged membership matrix with its centroids and diagnostics."""

    U: np.ndarray          # (N, c), rows sum to 1
    centroids: np.ndarray  # (c, dim)
    objective: float
    fpc: float
    iterations: int
    converged: bool
    objective_history: np.ndarray = field(repr=False, default_factory=lambda: np.empty(0))

    @property
    def n_clusters(self) -> int:
        return self.centroids.shape[0]


def fpc(membership: np.ndarray) -> float:
    """Fuzzy partition coefficient: mean squared membership, in [1/c, 1]."""
    u = np.asarray(membership, dtype=np.float64)
    return float((u * u).sum() / u.shape[0])


def _squared_distances(points: np.ndarray, centroids: np.ndarray) -> np.ndarray:
    diff = points[:, None, :] - centroids[None, :, :]
    return (diff * diff).sum(axis=2)


def _membership_update(d2: np.ndarray, m: float) -> np.ndarray:
    """Inverse-distance membership update with the coincidence rule.

    A point sitting on one or more centroids gets its membership split
    equally over the coincident centroids and 0 elsewhere, removing the
    division-by-zero singularity.
    """
    u = np.empty_like(d2)
    coincident = d2 <= _COINCIDENT_D2
    hit_rows = coincident.any(axis=1)
    if hit_rows.any():
        rows = coincident[hit_rows]
        u[hit_rows] = rows / rows.sum(axis=1, keepdims=True)
    free = ~hit_rows
    if free.any():
        t = d2[free] ** (-1.0 / (m - 1.0))
        u[free] = t / t.sum(axis=1, keepdims=True)
    return u


def _fcm_single(points: np.ndarray, cfg: FcmConfig, rng: np.random.Generator,
                on_iteration=None) -> FuzzyPartition:
    """One optimization run from a random membership initialization."""
    n = points.shape[0]
    u = rng.random((n, cfg.c))
    u /= u.sum(axis=1, keepdims=True)

    centroids = np.zeros((cfg.c, points.shape[1]))
    history: list[float] = []
    converged = False
    iterations = 0
    for iterations in range(1, cfg.max_iter + 1):
        w = u ** cfg.m
        weight_sums = w.sum(axis=0)
        new_centroids = centroids.copy()
        alive = weight_sums > 0
        new_centroids[alive] = (w.T[alive] @ points) / weight_sums[alive, None]
        centroids = new_centroids

        d2 = _squared_distances(points, centroids)
        u_next = _membership_update(d2, cfg.m)
        delta = float(np.abs(u_next - u).max())
        u = u_next
        history.append(float(((u ** cfg.m) * d2).sum()))
        if on_iteration is not None:
            on_iteration(u, centroids, history[-1])
        if delta < cfg.tol:
            converged = True
            break

    return FuzzyPartition(U=u, centroids=centroids, objective=history[-1],
                          fpc=fpc(u), iterations=iterations, converged=converged,
                          objective_history=np.asarray(history))


def fcm(points: np.ndarray, cfg: FcmConfig,
        on_iteration=None) -> FuzzyPartition:
    """Best-of-n_init fuzzy c-means partition of the points.

    Restart sub-seeds derive deterministically from cfg.seed; the run with
    the lowest objective wins, ties going to the lowest restart index.
    ``on_iteration(U, centroids, objective)`` is invoked after every update,
    mainly so tests can watch the optimization.
    """
    points = np.asarray(points, dtype=np.float64)
    if points.ndim != 2:
        raise ValueError("points must be a 2-D array")
    if points.shape[0] < cfg.c:
        raise TooFewPoints(f"{points.shape[0]} points for c={cfg.c}")

    best: FuzzyPartition | None = None
    for child in np.random.SeedSequence(cfg.seed).spawn(cfg.n_init):
        run = _fcm_single(points, cfg, np.random.default_rng(child), on_iteration)
        if best is None or run.objective < best.objective:
            best = run
    assert best is not None
    return best


@dataclass(frozen=True)
class SweepEntry:
    """Validity-sweep record for one cluster count."""

    c: int
    fpc: float
    objective: float
    iterations: int
    converged: bool


def sweep_clusters(points: np.ndarray, cfg: FcmConfig,
                   c_range: tuple[int, int] = DEFAULT_SWEEP_RANGE) -> list[SweepEntry]:
    """Run fcm for every cluster count in [c_range[0], c_range[1]].

    Each count reuses cfg.seed, so a one-element range reproduces the plain
    fcm call exactly.
    """
    lo, hi = c_range
    if lo < 2 or hi < lo:
        raise ValueError(f"invalid sweep range [{lo}, {hi}]")
    entries = []
    for c in range(lo, hi + 1):
        part = fcm(points, replace(cfg, c=c))
        entries.append(SweepEntry(c=c, fpc=part.fpc, objective=part.objective,
                                  iterations=part.iterations,
                                  converged=part.converged))
    return entries


def canonicalize(partition: FuzzyPartition) -> FuzzyPartition:
    """Reorder clusters by centroid: ascending first component, then second.

    Membership columns follow the same permutation; objective and FPC are
    carried over unchanged.  Idempotent.
    """
    v = partition.centroids
    order = np.lexsort((v[:, 1], v[:, 0])) if v.shape[1] >= 2 \
        else np.argsort(v[:, 0], kind="stable")
    return FuzzyPartition(U=partition.U[:, order], centroids=v[order],
                          objective=partition.objective, fpc=partition.fpc,
                          iterations=partition.iterations,
                          converged=partition.converged,
                          objective_history=partition.objective_history)


def hard_assign(partition: FuzzyPartition) -> np.ndarray:
    """Crisp label per point: argmax membership, ties to the lowest index."""
    return np.argmax(partition.U, axis=1)
