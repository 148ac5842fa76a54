"""Dynamic time warping distance between frame-vector sequences."""

from __future__ import annotations

from dataclasses import dataclass
from typing import Callable, Optional

import numpy as np
from scipy.spatial.distance import cdist

from .errors import DimensionMismatch, EmptySequence


@dataclass(frozen=True)
class DtwConfig:
    """Configuration of the warping distance.

    The defaults match what the rest of the pipeline expects: Euclidean
    local distance over per-frame vectors (rotations in degrees), the
    symmetric step pattern (match, insert, delete) and no warping-window
    constraint.  The cost is a plain path sum with no path-length
    normalization, so thresholds are meaningful at the exemplar's scale.
    """

    local_distance: Optional[Callable] = None
    step_pattern: str = "symmetric"
    window: Optional[int] = None


def _as_frames(seq) -> np.ndarray:
    arr = np.asarray(seq, dtype=float)
    if arr.ndim == 1:
        arr = arr[:, None]
    if arr.ndim != 2:
        raise DimensionMismatch("sequences must be 1-D or (T, d) arrays")
    return arr


def dtw_distance(a, b, cfg: DtwConfig | None = None) -> float:
    """Minimal cumulative local distance over monotone warping paths.

    Both sequences must be non-empty and share their per-frame
    dimensionality.  The result is symmetric, non-negative and zero for
    identical sequences.
    """
    a = _as_frames(a)
    b = _as_frames(b)
    if a.shape[0] == 0 or b.shape[0] == 0:
        raise EmptySequence("dtw_distance requires non-empty sequences")
    if a.shape[1] != b.shape[1]:
        raise DimensionMismatch(
            f"frame dimensionality differs: {a.shape[1]} vs {b.shape[1]}"
        )
    if cfg is not None and cfg.local_distance is not None:
        cost = np.array(
            [[cfg.local_distance(x, y) for y in b] for x in a], dtype=float
        )
    else:
        cost = cdist(a, b)
    return _dtw_from_cost(cost)


def _dtw_from_cost(cost: np.ndarray) -> float:
    """Classic O(n*m) dynamic program over a precomputed cost matrix."""
    n, m = cost.shape
    prev = np.cumsum(cost[0]).tolist()
    for i in range(1, n):
        row = cost[i].tolist()
        cur = [prev[0] + row[0]]
        for j in range(1, m):
            best = prev[j]
            left = prev[j - 1]
            if left < best:
                best = left
            diag = cur[j - 1]
            if diag < best:
                best = diag
            cur.append(best + row[j])
        prev = cur
    return float(prev[m - 1])
