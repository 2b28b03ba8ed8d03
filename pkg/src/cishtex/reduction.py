"""Reduce the N x 26 feature matrix to N x 2 scores by SVD or PCA.

The SVD path factors the raw matrix; the PCA path centers (and by default
standardizes) columns first.  Both share a deterministic sign convention so
repeated runs never mirror-flip the embedding.
"""

from __future__ import annotations

import enum
import warnings
from dataclasses import dataclass, field

import numpy as np


class ReductionMethod(enum.Enum):
    SVD = "svd"
    PCA = "pca"


@dataclass(frozen=True)
class FeatureMatrix:
    """Feature rows keyed by tile id, in features.csv column order."""

    tile_ids: np.ndarray  # (N,) int64
    X: np.ndarray         # (N, n_features) float64

    def __post_init__(self):
        if self.X.ndim != 2 or self.X.shape[0] != self.tile_ids.shape[0]:
            raise ValueError("tile_ids and X row counts differ")
        if self.X.shape[0] < 2:
            raise ValueError("at least 2 rows are required for reduction")
        if not np.isfinite(self.X).all():
            raise ValueError("feature matrix contains non-finite entries")


@dataclass(frozen=True)
class ReducedMatrix:
    """2-D scores aligned row-for-row with the input feature matrix."""

    tile_ids: np.ndarray
    Y: np.ndarray  # (N, k) float64
    method: ReductionMethod
    metadata: dict = field(default_factory=dict)


def _apply_sign_convention(scores: np.ndarray, loadings: np.ndarray) -> None:
    """Flip each component so its largest-magnitude loading is positive.

    Ties resolve to the lowest index.  Modifies both arrays in place,
    keeping scores @ loadings unchanged.
    """
    for j in range(loadings.shape[0]):
        pivot = int(np.argmax(np.abs(loadings[j])))
        if loadings[j, pivot] < 0:
            loadings[j] *= -1.0
            scores[:, j] *= -1.0


def svd_reduce(features: FeatureMatrix, k: int = 2) -> ReducedMatrix:
    """Truncated SVD of the raw (uncentered) feature matrix.

    Scores are U_k * S_k; a rank-deficient matrix simply yields zero
    trailing columns rather than an error.
    """
    x = features.X
    u, s, vt = np.linalg.svd(x, full_matrices=False)
    k = min(k, s.shape[0])
    scores = u[:, :k] * s[:k]
    loadings = vt[:k].copy()
    _apply_sign_convention(scores, loadings)
    meta = {
        "singular_values": s[:k].tolist(),
        "all_singular_values": s.tolist(),
        "loadings": loadings.tolist(),
    }
    return ReducedMatrix(tile_ids=features.tile_ids, Y=scores,
                         method=ReductionMethod.SVD, metadata=meta)


def pca_reduce(features: FeatureMatrix, k: int = 2,
               standardize: bool = True) -> ReducedMatrix:
    """Principal-component scores of the centered feature matrix.

    With standardize (the default) each column is divided by its sample
    standard deviation; zero-variance columns are left centered (all zero)
    and reported in the metadata with a warning.
    """
    x = features.X - features.X.mean(axis=0)
    zero_var: list[int] = []
    if standardize:
        sd = x.std(axis=0, ddof=1)
        zero_var = np.flatnonzero(sd == 0).tolist()
        if zero_var:
            warnings.warn(
                f"{len(zero_var)} zero-variance feature column(s) left at zero",
                stacklevel=2,
            )
        safe = np.where(sd > 0, sd, 1.0)
        x = x / safe
    u, s, vt = np.linalg.svd(x, full_matrices=False)
    k = min(k, s.shape[0])
    scores = u[:, :k] * s[:k]
    loadings = vt[:k].copy()
    _apply_sign_convention(scores, loadings)

    total = float((s ** 2).sum())
    if total > 0:
        fractions = (s[:k] ** 2 / total).tolist()
    else:
        warnings.warn("total variance is zero; explained variance undefined",
                      stacklevel=2)
        fractions = [0.0] * k
    meta = {
        "explained_variance_fractions": fractions,
        "loadings": loadings.tolist(),
        "standardized": standardize,
        "zero_variance_columns": zero_var,
    }
    return ReducedMatrix(tile_ids=features.tile_ids, Y=scores,
                         method=ReductionMethod.PCA, metadata=meta)


def reduce_features(features: FeatureMatrix, method: ReductionMethod,
                    k: int = 2, standardize: bool = True) -> ReducedMatrix:
    """Dispatch to the configured reduction path."""
    if method is ReductionMethod.SVD:
        return svd_reduce(features, k=k)
    return pca_reduce(features, k=k, standardize=standardize)
