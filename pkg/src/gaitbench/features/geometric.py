"""The thirteen published geometric gait-feature extractors.

Each extractor consumes one gait cycle and returns (values, names) where
values is either a flat feature vector or a (T, S) matrix of named time
signals.  Signal methods are compared with DTW, Kumar with a covariance
distance, everything else with the Euclidean distance.

Where a source method's published description leaves the exact feature
list open, the selection used here is fixed, named explicitly below and
kept stable so template dimensionalities are reproducible.
"""

from __future__ import annotations

import numpy as np

from ..errors import DegenerateSample
from ..sample import GaitSample, resample_linear
from .base import MethodDescriptor, register
from .body import BodyMap, Y_AXIS, Z_AXIS
from .statistics import (
    angle_between,
    angle_to_axis,
    extreme_stats,
    joint_angle,
    polygon_area,
    polygon_centroid,
    signal_stats,
    successive_difference_mean,
    triangle_area,
)

KWOLEK_CYCLE_FRAMES = 30


def _cycle_time(sample: GaitSample) -> float:
    if sample.duration_s > 0:
        return sample.duration_s
    return sample.num_frames / sample.frame_rate


def _require_frames(sample: GaitSample, n: int):
    if sample.num_frames < n:
        raise DegenerateSample(
            f"extractor needs at least {n} frames, sample has {sample.num_frames}"
        )


# ---------------------------------------------------------------------------
# fixed-length methods


def ahmed(sample: GaitSample):
    """Statistics of bilateral distance signals plus a support triangle.

    Horizontal (Z-projected) distances between feet, knees, wrists and
    shoulders carry mean, standard deviation and skew; vertical (Y)
    positions of head, wrists, shoulders, knees and feet carry mean and
    standard deviation; the root-to-feet triangle area carries mean and
    standard deviation.
    """
    body = BodyMap(sample)
    values, names = [], []
    for left, right, tag in (
        ("foot_l", "foot_r", "feet"),
        ("knee_l", "knee_r", "knees"),
        ("wrist_l", "wrist_r", "wrists"),
        ("shoulder_l", "shoulder_r", "shoulders"),
    ):
        sig = np.abs(body.pos(left)[:, 2] - body.pos(right)[:, 2])
        m, s, sk, _, _ = signal_stats(sig)
        values += [m, s, sk]
        names += [f"hdist_{tag}_{x}" for x in ("mean", "std", "skew")]
    for tag, joints in (
        ("head", ("head",)),
        ("wrists", ("wrist_l", "wrist_r")),
        ("shoulders", ("shoulder_l", "shoulder_r")),
        ("knees", ("knee_l", "knee_r")),
        ("feet", ("foot_l", "foot_r")),
    ):
        sig = np.mean([body.pos(j)[:, 1] for j in joints], axis=0)
        values += [float(sig.mean()), float(sig.std())]
        names += [f"vpos_{tag}_mean", f"vpos_{tag}_std"]
    area = triangle_area(body.pos("pelvis"), body.pos("foot_l"), body.pos("foot_r"))
    values += [float(area.mean()), float(area.std())]
    names += ["feet_triangle_mean", "feet_triangle_std"]
    return np.array(values), names


def ali(sample: GaitSample):
    """Mean areas of the two lower-limb (hip, knee, ankle) triangles."""
    body = BodyMap(sample)
    values, names = [], []
    for side in ("l", "r"):
        area = triangle_area(
            body.pos(f"hip_{side}"), body.pos(f"knee_{side}"), body.pos(f"ankle_{side}")
        )
        values.append(float(area.mean()))
        names.append(f"lower_limb_triangle_{side}")
    return np.array(values), names


def _lower_body_angles(body: BodyMap):
    """Eight lower-body angle signals (per side: thigh-Y, knee, ankle, foot-Z)."""
    signals = []
    for side in ("l", "r"):
        signals.append((f"thigh_y_{side}", angle_to_axis(body.bone(f"thigh_{side}"), Y_AXIS)))
        signals.append(
            (
                f"knee_{side}",
                joint_angle(
                    body.pos(f"hip_{side}"), body.pos(f"knee_{side}"), body.pos(f"ankle_{side}")
                ),
            )
        )
        signals.append(
            (
                f"ankle_{side}",
                joint_angle(
                    body.pos(f"knee_{side}"), body.pos(f"ankle_{side}"), body.pos(f"foot_{side}")
                ),
            )
        )
        signals.append((f"foot_z_{side}", angle_to_axis(body.bone(f"foot_{side}"), Z_AXIS)))
    return signals


def andersson(sample: GaitSample):
    """Extreme statistics of lower-body angles plus gait and body scalars.

    Each of eight lower-body angle signals contributes mean and standard
    deviation of its local maxima and minima.  Step length is the maximum
    feet distance, stride length the length of two steps, velocity the
    stride over the cycle time.  Per-bone mean lengths (30 bones) plus
    the mean leg length and the body height complete the vector.
    """
    _require_frames(sample, 3)
    body = BodyMap(sample)
    values, names = [], []
    for name, sig in _lower_body_angles(body):
        values += extreme_stats(sig)
        names += [f"{name}_{x}" for x in ("max_mean", "max_std", "min_mean", "min_std")]
    step = body.step_length()
    stride = 2.0 * step
    cycle_time = _cycle_time(sample)
    values += [step, stride, cycle_time, stride / cycle_time]
    names += ["step_length", "stride_length", "cycle_time", "velocity"]
    values.append(body.height())
    names.append("height")
    for bone_name, sig in body.bone_length_signals():
        values.append(float(sig.mean()))
        names.append(f"bone_{bone_name}")
    values.append(body.leg_length())
    names.append("leg_length")
    return np.array(values), names


def ball(sample: GaitSample):
    """Mean, standard deviation and maximum of lower-limb angle pairs:
    upper leg against the Y axis, lower leg against the upper leg and the
    foot against the Z axis, for both legs."""
    body = BodyMap(sample)
    values, names = [], []
    for side in ("l", "r"):
        signals = (
            (f"upper_leg_y_{side}", angle_to_axis(body.bone(f"thigh_{side}"), Y_AXIS)),
            (
                f"lower_upper_leg_{side}",
                angle_between(body.bone(f"calf_{side}"), body.bone(f"thigh_{side}")),
            ),
            (f"foot_z_{side}", angle_to_axis(body.bone(f"foot_{side}"), Z_AXIS)),
        )
        for name, sig in signals:
            m, s, _, _, mx = signal_stats(sig)
            values += [m, s, mx]
            names += [f"{name}_{x}" for x in ("mean", "std", "max")]
    return np.array(values), names


_DIKOVSKI_ANGLES = (
    ("shoulder_l", ("chest", "shoulder_l", "elbow_l")),
    ("shoulder_r", ("chest", "shoulder_r", "elbow_r")),
    ("elbow_l", ("shoulder_l", "elbow_l", "wrist_l")),
    ("elbow_r", ("shoulder_r", "elbow_r", "wrist_r")),
    ("hip_l", ("pelvis", "hip_l", "knee_l")),
    ("hip_r", ("pelvis", "hip_r", "knee_r")),
    ("knee_l", ("hip_l", "knee_l", "ankle_l")),
    ("knee_r", ("hip_r", "knee_r", "ankle_r")),
)


def dikovski(sample: GaitSample):
    """Step length, height, bone lengths, major-joint angle statistics and
    the angle between the shoulder and hip lines.

    The 28 real bones (hip-joint connectors excluded) contribute their
    mean length; the eight major joint angles (shoulders, elbows, hips,
    knees) contribute mean, standard deviation, minimum, maximum and mean
    difference of subsequent frames.
    """
    _require_frames(sample, 2)
    body = BodyMap(sample)
    values = [body.step_length(), body.height()]
    names = ["step_length", "height"]
    for bone_name, sig in body.bone_length_signals(exclude=("lhipjoint", "rhipjoint")):
        values.append(float(sig.mean()))
        names.append(f"bone_{bone_name}")
    for name, (a, b, c) in _DIKOVSKI_ANGLES:
        sig = joint_angle(body.pos(a), body.pos(b), body.pos(c))
        stats = signal_stats(sig)
        values += [stats[0], stats[1], stats[3], stats[4], successive_difference_mean(sig)]
        names += [f"angle_{name}_{x}" for x in ("mean", "std", "min", "max", "diff")]
    shoulder_line = body.pos("shoulder_l") - body.pos("shoulder_r")
    hip_line = body.pos("hip_l") - body.pos("hip_r")
    values.append(float(angle_between(shoulder_line, hip_line).mean()))
    names.append("shoulder_hip_line_angle")
    return np.array(values), names


def preis(sample: GaitSample):
    """Static body lengths plus step length and speed."""
    body = BodyMap(sample)
    values = [body.height(), body.leg_length(), body.torso_length()]
    names = ["height", "leg_length", "torso_length"]
    for bone in ("calf_l", "calf_r", "thigh_l", "thigh_r",
                 "upper_arm_l", "upper_arm_r", "forearm_l", "forearm_r"):
        values.append(float(np.mean(np.linalg.norm(body.bone(bone), axis=1))))
        names.append(f"{bone}_length")
    step = body.step_length()
    cycle_time = _cycle_time(sample)
    values += [step, 2.0 * step / cycle_time]
    names += ["step_length", "speed"]
    return np.array(values), names


_SINHA_UPPER = ("shoulder_l", "shoulder_r", "hip_r", "hip_l")
_SINHA_LOWER = ("hip_l", "hip_r", "ankle_r", "ankle_l")
_SINHA_LIMBS = (
    ("arm_l", ("shoulder_l", "elbow_l", "wrist_l", "hand_l")),
    ("arm_r", ("shoulder_r", "elbow_r", "wrist_r", "hand_r")),
    ("leg_l", ("hip_l", "knee_l", "ankle_l", "foot_l")),
    ("leg_r", ("hip_r", "knee_r", "ankle_r", "foot_r")),
)


def sinha(sample: GaitSample):
    """All Ball and Preis features plus body-polygon areas and statistics
    of distances between the upper-body centroid and the limb centroids."""
    ball_values, ball_names = ball(sample)
    preis_values, preis_names = preis(sample)
    body = BodyMap(sample)
    values = list(ball_values) + list(preis_values)
    names = list(ball_names) + list(preis_names)
    upper = [body.pos(j) for j in _SINHA_UPPER]
    lower = [body.pos(j) for j in _SINHA_LOWER]
    values += [float(polygon_area(upper).mean()), float(polygon_area(lower).mean())]
    names += ["upper_body_area", "lower_body_area"]
    upper_centroid = polygon_centroid(upper)
    for limb_name, joints in _SINHA_LIMBS:
        centroid = polygon_centroid([body.pos(j) for j in joints])
        sig = np.linalg.norm(centroid - upper_centroid, axis=1)
        m, s, _, _, mx = signal_stats(sig)
        values += [m, s, mx]
        names += [f"centroid_{limb_name}_{x}" for x in ("mean", "std", "max")]
    return np.array(values), names


# ---------------------------------------------------------------------------
# signal-bundle methods (compared with DTW unless noted)

_GAVRILOVA_DISTANCE_JOINTS = (
    "head", "neck", "chest", "waist",
    "shoulder_l", "shoulder_r", "elbow_l", "elbow_r",
    "wrist_l", "wrist_r", "hand_l", "hand_r",
    "knee_l", "knee_r", "ankle_l", "ankle_r",
    "foot_l", "foot_r", "toes_l", "toes_r",
)

_GAVRILOVA_ANGLES = (
    ("shoulder_l", ("chest", "shoulder_l", "elbow_l")),
    ("shoulder_r", ("chest", "shoulder_r", "elbow_r")),
    ("elbow_l", ("shoulder_l", "elbow_l", "wrist_l")),
    ("elbow_r", ("shoulder_r", "elbow_r", "wrist_r")),
    ("wrist_l", ("elbow_l", "wrist_l", "hand_l")),
    ("wrist_r", ("elbow_r", "wrist_r", "hand_r")),
    ("hip_l", ("pelvis", "hip_l", "knee_l")),
    ("hip_r", ("pelvis", "hip_r", "knee_r")),
    ("knee_l", ("hip_l", "knee_l", "ankle_l")),
    ("knee_r", ("hip_r", "knee_r", "ankle_r")),
    ("ankle_l", ("knee_l", "ankle_l", "foot_l")),
    ("ankle_r", ("knee_r", "ankle_r", "foot_r")),
    ("chest", ("spine", "chest", "neck")),
    ("waist", ("pelvis", "waist", "spine")),
)


def gavrilova(sample: GaitSample):
    """20 joint-to-root distance signals and 16 joint angle signals.

    The published selection is not enumerated; this fixed list covers the
    whole body with root-relative distances of 20 joints, interior angles
    of 14 joints and the two foot-to-Z angles.
    """
    body = BodyMap(sample)
    cols, names = [], []
    root = body.pos("pelvis")
    for joint in _GAVRILOVA_DISTANCE_JOINTS:
        cols.append(np.linalg.norm(body.pos(joint) - root, axis=1))
        names.append(f"dist_{joint}")
    for name, (a, b, c) in _GAVRILOVA_ANGLES:
        cols.append(joint_angle(body.pos(a), body.pos(b), body.pos(c)))
        names.append(f"angle_{name}")
    for side in ("l", "r"):
        cols.append(angle_to_axis(body.bone(f"foot_{side}"), Z_AXIS))
        names.append(f"angle_foot_z_{side}")
    return np.stack(cols, axis=1), names


def jiang(sample: GaitSample):
    """Angle signals between the Y axis and the four major lower-body
    (thigh and calf) bones."""
    body = BodyMap(sample)
    cols, names = [], []
    for bone in ("thigh_l", "thigh_r", "calf_l", "calf_r"):
        cols.append(angle_to_axis(body.bone(bone), Y_AXIS))
        names.append(f"{bone}_y")
    return np.stack(cols, axis=1), names


_KRZESZOWSKI_BONES = (
    "lhumerus", "rhumerus", "lradius", "rradius",
    "lfemur", "rfemur", "ltibia", "rtibia",
)


def krzeszowski(sample: GaitSample):
    """Raw rotation signals of eight major bones about all three axes,
    plus constant height and step-length signals.

    Bones lacking a rotational dof contribute an all-zero signal for that
    axis, keeping the bundle layout fixed.
    """
    rot = sample.require_rotations()
    body = BodyMap(sample)
    T = sample.num_frames
    channel_index = {pair: k for k, pair in enumerate(sample.channel_names)}
    cols, names = [], []
    for bone in _KRZESZOWSKI_BONES:
        for dof in ("rx", "ry", "rz"):
            k = channel_index.get((bone, dof))
            cols.append(rot[:, k] if k is not None else np.zeros(T))
            names.append(f"{bone}_{dof}")
    cols.append(np.full(T, body.height()))
    names.append("height")
    cols.append(np.full(T, body.step_length()))
    names.append("step_length")
    return np.stack(cols, axis=1), names


def kumar(sample: GaitSample):
    """All joint trajectories about all three axes, length-normalized.

    Templates are compared through the covariance matrices of their
    trajectory channels.
    """
    from .raw import RAW_TARGET_FRAMES

    resampled = resample_linear(sample, RAW_TARGET_FRAMES)
    pos = resampled.require_positions()
    T, J, _ = pos.shape
    names = [f"{j}_{ax}" for j in sample.joint_names for ax in "xyz"]
    return pos.reshape(T, 3 * J), names


_KWOLEK_BONES = (
    "thigh_l", "thigh_r", "calf_l", "calf_r", "foot_l", "foot_r",
    "upper_arm_l", "upper_arm_r", "forearm_l", "forearm_r",
)


def kwolek(sample: GaitSample):
    """Bone-axis angle signals with height and step length, on gait
    cycles normalized to 30 frames.

    Ten limb bones each contribute their angle to the Y and Z axes; the
    fixed 30-frame normalization makes the flattened template length 660.
    """
    body_full = BodyMap(sample)
    height = body_full.height()
    step = body_full.step_length()
    resampled = resample_linear(sample, KWOLEK_CYCLE_FRAMES)
    body = BodyMap(resampled)
    cols, names = [], []
    for bone in _KWOLEK_BONES:
        cols.append(angle_to_axis(body.bone(bone), Y_AXIS))
        names.append(f"{bone}_y")
        cols.append(angle_to_axis(body.bone(bone), Z_AXIS))
        names.append(f"{bone}_z")
    cols.append(np.full(KWOLEK_CYCLE_FRAMES, height))
    names.append("height")
    cols.append(np.full(KWOLEK_CYCLE_FRAMES, step))
    names.append("step_length")
    return np.stack(cols, axis=1).ravel(), names


def sedmidubsky(sample: GaitSample):
    """The two shoulder-hand distance signals."""
    body = BodyMap(sample)
    cols, names = [], []
    for side in ("l", "r"):
        sig = np.linalg.norm(body.pos(f"hand_{side}") - body.pos(f"shoulder_{side}"), axis=1)
        cols.append(sig)
        names.append(f"shoulder_hand_{side}")
    return np.stack(cols, axis=1), names


register(MethodDescriptor("ahmed", "jc", "euclidean", "geometric",
                          "statistics of bilateral distance signals", 24, ahmed))
register(MethodDescriptor("ali", "jc", "euclidean", "geometric",
                          "mean lower-limb triangle areas", 2, ali))
register(MethodDescriptor("andersson", "jc", "euclidean", "geometric",
                          "angle extremes, gait scalars and bone lengths", 68, andersson))
register(MethodDescriptor("ball", "jc", "euclidean", "geometric",
                          "lower-limb angle statistics", 18, ball))
register(MethodDescriptor("dikovski", "jc", "euclidean", "geometric",
                          "body lengths and major joint angle statistics", 71, dikovski))
register(MethodDescriptor("gavrilova", "jc", "dtw", "bundle",
                          "joint relative distance and angle signals", None, gavrilova))
register(MethodDescriptor("jiang", "jc", "dtw", "bundle",
                          "lower-body bone angle signals", None, jiang))
register(MethodDescriptor("krzeszowski", "br", "dtw", "bundle",
                          "major-bone rotation signals with body scalars", None, krzeszowski))
register(MethodDescriptor("kumar", "jc", "covariance", "bundle",
                          "joint trajectories compared via covariance", None, kumar))
register(MethodDescriptor("kwolek", "jc", "euclidean", "geometric",
                          "bone angle signals on 30-frame cycles", 660, kwolek))
register(MethodDescriptor("preis", "jc", "euclidean", "geometric",
                          "static body lengths, step length and speed", 13, preis))
register(MethodDescriptor("sedmidubsky", "jc", "dtw", "bundle",
                          "shoulder-hand distance signals", None, sedmidubsky))
register(MethodDescriptor("sinha", "jc", "euclidean", "geometric",
                          "Ball and Preis features with polygon centroids", 45, sinha))
