"""Gait samples: one extracted gait cycle in both raw representations.

A sample carries the bone-rotation channels of its source window and the
3D joint coordinates obtained by forward kinematics under the
prototypical skeleton.  Extractors pick whichever representation they
need; samples missing one representation raise RepresentationMismatch
when it is requested.
"""

from __future__ import annotations

from dataclasses import dataclass, replace
from typing import Optional

import numpy as np

from .asfamc import MotionSequence, Skeleton
from .errors import RepresentationMismatch
from .kinematics import forward_kinematics


@dataclass(frozen=True)
class GaitSample:
    """One gait cycle with a subject label.

    rotations: (T, R) rotational channels in degrees, or None.
    positions: (T, J, 3) root-relative joint coordinates, or None.
    duration_s: real duration of the cycle; preserved by resampling so
        time-based features stay meaningful after length normalization.
    """

    label: str
    rotations: Optional[np.ndarray]
    positions: Optional[np.ndarray]
    joint_names: tuple[str, ...] = ()
    parents: tuple[int, ...] = ()
    channel_names: tuple = ()
    frame_rate: float = 120.0
    duration_s: float = 0.0
    source: str = ""
    frame_range: Optional[tuple[int, int]] = None
    extraction_distance: Optional[float] = None

    @property
    def num_frames(self) -> int:
        if self.rotations is not None:
            return self.rotations.shape[0]
        return self.positions.shape[0]

    @property
    def num_joints(self) -> int:
        return len(self.joint_names)

    def require_positions(self) -> np.ndarray:
        if self.positions is None:
            raise RepresentationMismatch(
                "this extractor needs joint coordinates (JC) but the sample "
                "only carries bone rotations"
            )
        return self.positions

    def require_rotations(self) -> np.ndarray:
        if self.rotations is None:
            raise RepresentationMismatch(
                "this extractor needs bone rotations (BR) but the sample "
                "only carries joint coordinates"
            )
        return self.rotations


def sample_from_motion(
    motion: MotionSequence,
    skeleton: Skeleton | None = None,
    label: str | None = None,
    source: str = "",
    frame_range=None,
    extraction_distance=None,
) -> GaitSample:
    """Build a GaitSample from a (normalized) motion window.

    Joint coordinates are computed with the given skeleton, typically the
    prototypical one so that skeleton parameters cannot leak identity.
    """
    skeleton = skeleton or motion.skeleton
    jc = forward_kinematics(motion, skeleton)
    return GaitSample(
        label=label if label is not None else motion.subject_id,
        rotations=motion.rotation_matrix(),
        positions=jc.positions,
        joint_names=skeleton.joint_names,
        parents=skeleton.parents,
        channel_names=skeleton.rotation_channels,
        frame_rate=motion.frame_rate,
        duration_s=motion.num_frames / motion.frame_rate,
        source=source or motion.source_file,
        frame_range=frame_range,
        extraction_distance=extraction_distance,
    )


def resample_series(values: np.ndarray, target_length: int) -> np.ndarray:
    """Linearly resample along axis 0 to target_length frames.

    Endpoints are preserved exactly; interior frames are interpolated on
    the original time grid.
    """
    if target_length < 2:
        raise ValueError("target_length must be at least 2")
    T = values.shape[0]
    if T == target_length:
        return values.copy()
    if T == 1:
        return np.repeat(values, target_length, axis=0)
    grid = np.linspace(0.0, T - 1.0, target_length)
    lo = np.floor(grid).astype(int)
    hi = np.minimum(lo + 1, T - 1)
    w = (grid - lo).reshape((-1,) + (1,) * (values.ndim - 1))
    return values[lo] * (1.0 - w) + values[hi] * w


def resample_linear(sample: GaitSample, target_length: int) -> GaitSample:
    """Linearly normalize a sample to a fixed number of frames.

    Both representations are resampled; the cycle's real duration is kept
    unchanged.
    """
    return replace(
        sample,
        rotations=None
        if sample.rotations is None
        else resample_series(sample.rotations, target_length),
        positions=None
        if sample.positions is None
        else resample_series(sample.positions, target_length),
    )
