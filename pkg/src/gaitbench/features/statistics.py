"""Signal statistics shared by the geometric feature extractors."""

from __future__ import annotations

import numpy as np

from ..errors import DegenerateSample


def skewness(signal: np.ndarray) -> float:
    """Sample standardized third moment m3 / m2^(3/2); 0 for zero variance."""
    x = np.asarray(signal, dtype=float)
    m = x.mean()
    m2 = np.mean((x - m) ** 2)
    if m2 == 0.0:
        return 0.0
    m3 = np.mean((x - m) ** 3)
    return float(m3 / m2**1.5)


def signal_stats(signal: np.ndarray):
    """(mean, std, skew, min, max) of a signal.

    Constant signals yield (c, 0, 0, c, c).
    """
    x = np.asarray(signal, dtype=float)
    return (
        float(x.mean()),
        float(x.std()),
        skewness(x),
        float(x.min()),
        float(x.max()),
    )


def moving_average(signal: np.ndarray, width: int = 3) -> np.ndarray:
    """Centered moving average with edge shrinkage at the boundaries."""
    x = np.asarray(signal, dtype=float)
    if x.shape[0] < width:
        return x.copy()
    kernel = np.ones(width) / width
    smoothed = np.convolve(x, kernel, mode="same")
    # fix up the edges where the kernel hangs over
    half = width // 2
    for i in range(half):
        smoothed[i] = x[: i + half + 1].mean()
        smoothed[-(i + 1)] = x[-(i + half + 1) :].mean()
    return smoothed


def local_extremes(signal: np.ndarray, smooth_width: int = 3):
    """Strict local maxima and minima after light smoothing.

    Returns (maxima values, minima values) of the smoothed signal.  A
    signal needs at least 3 frames to have an interior extremum; flat
    signals yield empty arrays.
    """
    x = np.asarray(signal, dtype=float)
    if x.shape[0] < 3:
        raise DegenerateSample("local extremes need at least 3 frames")
    s = moving_average(x, smooth_width)
    interior = s[1:-1]
    maxima = interior[(interior > s[:-2]) & (interior > s[2:])]
    minima = interior[(interior < s[:-2]) & (interior < s[2:])]
    return maxima, minima


def extreme_stats(signal: np.ndarray):
    """(mean, std) of local maxima and of local minima, zeros when none."""
    maxima, minima = local_extremes(signal)
    out = []
    for values in (maxima, minima):
        if values.size:
            out.extend([float(values.mean()), float(values.std())])
        else:
            out.extend([0.0, 0.0])
    return out


def angle_between(u: np.ndarray, v: np.ndarray) -> np.ndarray:
    """Frame-wise angle between two (T, 3) vector signals, in degrees."""
    u = np.atleast_2d(u)
    v = np.atleast_2d(v)
    nu = np.linalg.norm(u, axis=-1)
    nv = np.linalg.norm(v, axis=-1)
    denom = nu * nv
    cos = np.zeros(denom.shape)
    ok = denom > 1e-12
    cos[ok] = np.einsum("...i,...i", u, v)[ok] / denom[ok]
    return np.degrees(np.arccos(np.clip(cos, -1.0, 1.0)))


def angle_to_axis(vectors: np.ndarray, axis: np.ndarray) -> np.ndarray:
    """Frame-wise angle between a (T, 3) bone signal and a fixed axis."""
    axis = np.broadcast_to(axis, vectors.shape)
    return angle_between(vectors, axis)


def joint_angle(p_prox: np.ndarray, p_joint: np.ndarray, p_dist: np.ndarray) -> np.ndarray:
    """Interior angle at a joint between its two incident bone vectors."""
    return angle_between(p_prox - p_joint, p_dist - p_joint)


def triangle_area(a: np.ndarray, b: np.ndarray, c: np.ndarray) -> np.ndarray:
    """Frame-wise 3D triangle area via half cross-product norm."""
    return 0.5 * np.linalg.norm(np.cross(b - a, c - a), axis=-1)


def polygon_area(points) -> np.ndarray:
    """Frame-wise area of a polygon given as a list of (T, 3) vertices.

    The polygon is fanned into triangles from its first vertex.
    """
    area = np.zeros(points[0].shape[0])
    for i in range(1, len(points) - 1):
        area = area + triangle_area(points[0], points[i], points[i + 1])
    return area


def polygon_centroid(points) -> np.ndarray:
    """Frame-wise centroid as the mean of the polygon vertices."""
    return np.mean(np.stack(points, axis=0), axis=0)


def successive_difference_mean(signal: np.ndarray) -> float:
    """Mean absolute difference of subsequent frames."""
    x = np.asarray(signal, dtype=float)
    if x.shape[0] < 2:
        raise DegenerateSample("successive differences need at least 2 frames")
    return float(np.mean(np.abs(np.diff(x))))
