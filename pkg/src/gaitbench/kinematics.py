"""Forward kinematics and root normalization for parsed motions.

Joint positions follow the ASF convention: each bone's motion rotation is
expressed in the bone's local axis frame, so the global rotation of a
joint is the parent's global rotation composed with C @ R @ C^T, where C
is the rotation built from the bone's ``axis`` angles and R from its
animated dof values.  Positions come out in walker-relative axes once the
root channels have been zeroed (X right to left, Y down to up, Z back to
front).
"""

from __future__ import annotations

from dataclasses import dataclass, replace

import numpy as np

from .asfamc import MotionSequence, ROTATION_DOF, Skeleton
from .errors import UnboundMotion


@dataclass(frozen=True)
class JointCoordinateSequence:
    """Per-frame 3D joint positions, (T, J, 3), in skeleton length units."""

    positions: np.ndarray
    joint_names: tuple[str, ...]
    frame_rate: float = 120.0

    @property
    def num_frames(self) -> int:
        return self.positions.shape[0]

    @property
    def num_joints(self) -> int:
        return self.positions.shape[1]


def _axis_rotation(axis: str, angles: np.ndarray) -> np.ndarray:
    """Batch of rotation matrices (T, 3, 3) about a coordinate axis."""
    c, s = np.cos(angles), np.sin(angles)
    T = angles.shape[0]
    R = np.zeros((T, 3, 3))
    if axis == "x":
        R[:, 0, 0] = 1
        R[:, 1, 1], R[:, 1, 2] = c, -s
        R[:, 2, 1], R[:, 2, 2] = s, c
    elif axis == "y":
        R[:, 1, 1] = 1
        R[:, 0, 0], R[:, 0, 2] = c, s
        R[:, 2, 0], R[:, 2, 2] = -s, c
    elif axis == "z":
        R[:, 2, 2] = 1
        R[:, 0, 0], R[:, 0, 1] = c, -s
        R[:, 1, 0], R[:, 1, 1] = s, c
    else:
        raise ValueError(f"unknown rotation axis {axis!r}")
    return R


def euler_matrix(angles_deg, order: str = "XYZ") -> np.ndarray:
    """Rotation matrix from Euler angles in degrees.

    order[0] is applied first about fixed axes, i.e. "XYZ" yields
    Rz @ Ry @ Rx.
    """
    angles = np.radians(np.atleast_2d(angles_deg).astype(float))
    R = np.broadcast_to(np.eye(3), (angles.shape[0], 3, 3)).copy()
    for k, axis in enumerate(order.lower()):
        R = _axis_rotation(axis, angles[:, k]) @ R
    return R[0] if np.ndim(angles_deg) == 1 else R


def _dof_rotation(dof: tuple, values_deg: np.ndarray) -> np.ndarray:
    """Batch rotation (T, 3, 3) from the rotational dof of one joint.

    The first listed dof is applied first; translation channels are
    ignored here.
    """
    T = values_deg.shape[0]
    R = np.broadcast_to(np.eye(3), (T, 3, 3)).copy()
    for k, d in enumerate(dof):
        if d in ROTATION_DOF:
            R = _axis_rotation(d[1], np.radians(values_deg[:, k])) @ R
    return R


def _check_bound(motion: MotionSequence, skeleton: Skeleton):
    animated = {j.name: len(j.dof) for j in skeleton.joints if j.dof}
    if set(motion.values) != set(animated):
        raise UnboundMotion(
            "motion channels do not cover the skeleton's animated joints"
        )
    for name, arr in motion.values.items():
        if arr.shape[1] != animated[name]:
            raise UnboundMotion(
                f"joint '{name}' carries {arr.shape[1]} channels, "
                f"skeleton declares {animated[name]}"
            )


def forward_kinematics(
    motion: MotionSequence, skeleton: Skeleton | None = None
) -> JointCoordinateSequence:
    """Joint coordinates of a motion under a skeleton.

    The skeleton defaults to the one the motion is bound to; passing a
    different (e.g. prototypical) skeleton is allowed as long as the
    channel layout matches, otherwise UnboundMotion is raised.
    """
    skeleton = skeleton or motion.skeleton
    _check_bound(motion, skeleton)

    T = motion.num_frames
    J = skeleton.num_joints
    positions = np.zeros((T, J, 3))
    globals_ = [None] * J

    for i, joint in enumerate(skeleton.joints):
        C = euler_matrix(joint.axis, joint.axis_order)
        vals = motion.values.get(joint.name)
        if vals is not None and T:
            local = C @ _dof_rotation(joint.dof, vals) @ C.T
        else:
            local = np.broadcast_to(C @ C.T, (T, 3, 3))
        if joint.parent < 0:
            globals_[i] = local
            translation = np.zeros((T, 3))
            if vals is not None:
                for k, d in enumerate(joint.dof):
                    if d == "tx":
                        translation[:, 0] = vals[:, k]
                    elif d == "ty":
                        translation[:, 1] = vals[:, k]
                    elif d == "tz":
                        translation[:, 2] = vals[:, k]
            positions[:, i] = skeleton.root_position + translation
        else:
            globals_[i] = globals_[joint.parent] @ local
            offset = joint.direction * joint.length
            positions[:, i] = positions[:, joint.parent] + globals_[i] @ offset

    return JointCoordinateSequence(
        positions=positions,
        joint_names=skeleton.joint_names,
        frame_rate=motion.frame_rate,
    )


def normalize_root(motion: MotionSequence) -> MotionSequence:
    """Zero all six root channels in every frame; other channels untouched.

    This recenters the coordinate system on the root joint and aligns the
    axes with the walker, making downstream features invariant to where
    and in which direction the subject walked.  Idempotent.
    """
    root = motion.skeleton.joints[0]
    if len(root.dof) != 6:
        raise UnboundMotion(f"root has {len(root.dof)} dof, expected 6")
    values = dict(motion.values)
    values[root.name] = np.zeros_like(values[root.name])
    return replace(motion, values=values)
