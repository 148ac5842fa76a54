"""Synthetic CMU-style skeletons and walking motions for the test suite.

The skeleton mirrors the 31-joint CMU layout (joint names, hierarchy and
dof channels), so every extractor and the full pipeline can run without
the real archive.  Walks are built from per-subject gait parameters plus
per-sample noise, giving labeled databases with a real class signal.
"""

from __future__ import annotations

from dataclasses import dataclass, replace

import numpy as np

from gaitbench.asfamc import Joint, MotionSequence, Skeleton
from gaitbench.kinematics import normalize_root
from gaitbench.sample import sample_from_motion
from gaitbench.segmentation import GaitDatabase

# name, parent, direction, length, axis angles, dof
_BONES = [
    ("lhipjoint", "root", (0.60, -0.75, 0.28), 2.4, (0, 0, 0), ()),
    ("rhipjoint", "root", (-0.60, -0.75, 0.28), 2.4, (0, 0, 0), ()),
    ("lowerback", "root", (0.01, 1.00, -0.08), 2.1, (0, 0, 0), ("rx", "ry", "rz")),
    ("lfemur", "lhipjoint", (0.34, -0.94, 0.00), 7.2, (0, 0, 20), ("rx", "ry", "rz")),
    ("ltibia", "lfemur", (0.34, -0.94, 0.00), 7.5, (0, 0, 20), ("rx",)),
    ("lfoot", "ltibia", (0.07, -0.22, 0.97), 2.2, (-90, 0, 20), ("rx", "rz")),
    ("ltoes", "lfoot", (0.00, -0.16, 0.99), 1.1, (-90, 0, 20), ("rx",)),
    ("rfemur", "rhipjoint", (-0.34, -0.94, 0.00), 7.2, (0, 0, -20), ("rx", "ry", "rz")),
    ("rtibia", "rfemur", (-0.34, -0.94, 0.00), 7.5, (0, 0, -20), ("rx",)),
    ("rfoot", "rtibia", (-0.07, -0.22, 0.97), 2.2, (-90, 0, -20), ("rx", "rz")),
    ("rtoes", "rfoot", (0.00, -0.16, 0.99), 1.1, (-90, 0, -20), ("rx",)),
    ("upperback", "lowerback", (0.01, 1.00, 0.02), 2.1, (0, 0, 0), ("rx", "ry", "rz")),
    ("thorax", "upperback", (0.00, 1.00, 0.03), 2.2, (0, 0, 0), ("rx", "ry", "rz")),
    ("lowerneck", "thorax", (-0.02, 0.99, -0.10), 1.5, (0, 0, 0), ("rx", "ry", "rz")),
    ("lclavicle", "thorax", (0.92, 0.37, 0.05), 3.4, (0, 0, 0), ("ry", "rz")),
    ("rclavicle", "thorax", (-0.92, 0.37, 0.05), 3.4, (0, 0, 0), ("ry", "rz")),
    ("upperneck", "lowerneck", (0.03, 0.99, 0.11), 1.5, (0, 0, 0), ("rx", "ry", "rz")),
    ("head", "upperneck", (0.01, 0.99, 0.06), 1.6, (0, 0, 0), ("rx", "ry", "rz")),
    ("lhumerus", "lclavicle", (1.00, 0.00, 0.00), 5.6, (180, 30, 90), ("rx", "ry", "rz")),
    ("lradius", "lhumerus", (1.00, 0.00, 0.00), 3.8, (180, 30, 90), ("rx",)),
    ("lwrist", "lradius", (1.00, 0.00, 0.00), 1.9, (0, 30, -90), ("ry",)),
    ("lhand", "lwrist", (1.00, 0.00, 0.00), 0.85, (0, 30, -90), ("rx", "rz")),
    ("lthumb", "lwrist", (0.70, 0.00, 0.70), 1.0, (0, 30, -45), ("rx", "rz")),
    ("lfingers", "lhand", (1.00, 0.00, 0.00), 0.7, (0, 30, -90), ("rx",)),
    ("rhumerus", "rclavicle", (-1.00, 0.00, 0.00), 5.6, (180, -30, -90), ("rx", "ry", "rz")),
    ("rradius", "rhumerus", (-1.00, 0.00, 0.00), 3.8, (180, -30, -90), ("rx",)),
    ("rwrist", "rradius", (-1.00, 0.00, 0.00), 1.9, (0, -30, 90), ("ry",)),
    ("rhand", "rwrist", (-1.00, 0.00, 0.00), 0.85, (0, -30, 90), ("rx", "rz")),
    ("rthumb", "rwrist", (-0.70, 0.00, 0.70), 1.0, (0, -30, 45), ("rx", "rz")),
    ("rfingers", "rhand", (-1.00, 0.00, 0.00), 0.7, (0, -30, 90), ("rx",)),
]

# parent -> children lines in CMU hierarchy order
_HIERARCHY = [
    ("root", ("lhipjoint", "rhipjoint", "lowerback")),
    ("lhipjoint", ("lfemur",)),
    ("lfemur", ("ltibia",)),
    ("ltibia", ("lfoot",)),
    ("lfoot", ("ltoes",)),
    ("rhipjoint", ("rfemur",)),
    ("rfemur", ("rtibia",)),
    ("rtibia", ("rfoot",)),
    ("rfoot", ("rtoes",)),
    ("lowerback", ("upperback",)),
    ("upperback", ("thorax",)),
    ("thorax", ("lowerneck", "lclavicle", "rclavicle")),
    ("lowerneck", ("upperneck",)),
    ("upperneck", ("head",)),
    ("lclavicle", ("lhumerus",)),
    ("lhumerus", ("lradius",)),
    ("lradius", ("lwrist",)),
    ("lwrist", ("lhand", "lthumb")),
    ("lhand", ("lfingers",)),
    ("rclavicle", ("rhumerus",)),
    ("rhumerus", ("rradius",)),
    ("rradius", ("rwrist",)),
    ("rwrist", ("rhand", "rthumb")),
    ("rhand", ("rfingers",)),
]


def make_skeleton(name: str = "synthetic", length_scale: float = 1.0,
                  length_jitter: float = 0.0, rng=None) -> Skeleton:
    """A 31-joint CMU-style skeleton; lengths optionally jittered."""
    rng = rng or np.random.default_rng(0)
    bones = {b[0]: b for b in _BONES}
    root = Joint(
        name="root", parent=-1, direction=np.zeros(3), length=0.0,
        axis=np.zeros(3), axis_order="XYZ",
        dof=("tx", "ty", "tz", "rx", "ry", "rz"),
    )
    joints = [root]
    index = {"root": 0}
    for parent, children in _HIERARCHY:
        for child in children:
            _, _, direction, length, axis, dof = bones[child]
            d = np.asarray(direction, dtype=float)
            d = d / np.linalg.norm(d)
            if length_jitter:
                length = length * (1.0 + length_jitter * rng.uniform(-1, 1))
            index[child] = len(joints)
            joints.append(
                Joint(
                    name=child, parent=index[parent], direction=d,
                    length=float(length), axis=np.asarray(axis, dtype=float),
                    axis_order="XYZ", dof=tuple(dof),
                )
            )
    return Skeleton(joints=tuple(joints), name=name, length_scale=length_scale)


@dataclass(frozen=True)
class WalkStyle:
    """Per-subject gait parameters; these carry the identity signal."""

    frames_per_cycle: int = 40
    femur_amp: float = 28.0
    femur_offset: float = -12.0
    tibia_amp: float = 24.0
    tibia_phase: float = 0.9
    foot_amp: float = 9.0
    humerus_amp: float = 22.0
    humerus_offset: float = 55.0
    spine_amp: float = 3.5
    bounce: float = 0.35
    speed: float = 0.10
    phase: float = 0.0

    def varied(self, rng) -> "WalkStyle":
        """A randomly individualized style, as one synthetic subject."""
        return replace(
            self,
            frames_per_cycle=int(self.frames_per_cycle + rng.integers(-4, 5)),
            femur_amp=self.femur_amp + rng.uniform(-7, 7),
            femur_offset=self.femur_offset + rng.uniform(-4, 4),
            tibia_amp=self.tibia_amp + rng.uniform(-7, 7),
            tibia_phase=self.tibia_phase + rng.uniform(-0.3, 0.3),
            foot_amp=self.foot_amp + rng.uniform(-3, 3),
            humerus_amp=self.humerus_amp + rng.uniform(-6, 6),
            humerus_offset=self.humerus_offset + rng.uniform(-8, 8),
            spine_amp=self.spine_amp + rng.uniform(-1.5, 1.5),
            phase=rng.uniform(0, 2 * np.pi),
        )


def make_walk_motion(
    skeleton: Skeleton,
    style: WalkStyle | None = None,
    n_frames: int | None = None,
    noise: float = 0.0,
    rng=None,
    subject_id: str = "s",
    source_file: str = "",
    with_root_motion: bool = False,
) -> MotionSequence:
    """A walking motion driven by sinusoidal joint excursions."""
    style = style or WalkStyle()
    rng = rng or np.random.default_rng(0)
    T = n_frames if n_frames is not None else style.frames_per_cycle
    t = np.arange(T)
    ph = 2 * np.pi * t / style.frames_per_cycle + style.phase

    channels: dict[tuple, np.ndarray] = {}

    def set_chan(joint, dof, values):
        channels[(joint, dof)] = np.asarray(values, dtype=float)

    set_chan("lfemur", "rx", style.femur_offset + style.femur_amp * np.sin(ph))
    set_chan("rfemur", "rx", style.femur_offset + style.femur_amp * np.sin(ph + np.pi))
    set_chan("lfemur", "rz", np.full(T, 2.0))
    set_chan("rfemur", "rz", np.full(T, -2.0))
    set_chan("lfemur", "ry", 1.5 * np.sin(ph))
    set_chan("rfemur", "ry", -1.5 * np.sin(ph + np.pi))
    set_chan("ltibia", "rx", style.tibia_amp * 0.5 * (1 - np.cos(ph + style.tibia_phase)))
    set_chan("rtibia", "rx", style.tibia_amp * 0.5 * (1 - np.cos(ph + np.pi + style.tibia_phase)))
    set_chan("lfoot", "rx", style.foot_amp * np.sin(ph + 0.6))
    set_chan("rfoot", "rx", style.foot_amp * np.sin(ph + np.pi + 0.6))
    set_chan("ltoes", "rx", 0.3 * style.foot_amp * np.sin(ph + 1.1))
    set_chan("rtoes", "rx", 0.3 * style.foot_amp * np.sin(ph + np.pi + 1.1))
    set_chan("lhumerus", "rx", style.humerus_offset + style.humerus_amp * np.sin(ph + np.pi))
    set_chan("rhumerus", "rx", style.humerus_offset + style.humerus_amp * np.sin(ph))
    set_chan("lradius", "rx", 18.0 + 5.0 * np.sin(ph + np.pi))
    set_chan("rradius", "rx", 18.0 + 5.0 * np.sin(ph))
    for joint in ("lowerback", "upperback", "thorax"):
        set_chan(joint, "ry", style.spine_amp * np.sin(ph))
        set_chan(joint, "rz", 0.4 * style.spine_amp * np.sin(ph + 0.3))

    values: dict[str, np.ndarray] = {}
    for joint in skeleton.joints:
        if not joint.dof:
            continue
        arr = np.zeros((T, len(joint.dof)))
        for k, dof in enumerate(joint.dof):
            if (joint.name, dof) in channels:
                arr[:, k] = channels[(joint.name, dof)]
        if joint.parent >= 0 and noise:
            arr += rng.normal(0.0, noise, size=arr.shape)
        values[joint.name] = arr

    if with_root_motion:
        root = values["root"]
        dof = skeleton.joints[0].dof
        root[:, dof.index("tz")] = style.speed * t
        root[:, dof.index("ty")] = 16.5 + style.bounce * np.sin(2 * ph)
        root[:, dof.index("tx")] = 0.15 * np.sin(ph)
        root[:, dof.index("ry")] = 2.0 * np.sin(ph * 0.5)
        root[:, dof.index("rz")] = 1.0 * np.sin(ph)

    return MotionSequence(
        skeleton=skeleton,
        values=values,
        subject_id=subject_id,
        source_file=source_file,
    )


def make_exemplar(skeleton: Skeleton, style: WalkStyle | None = None) -> MotionSequence:
    """One clean, normalized reference gait cycle."""
    style = style or WalkStyle()
    motion = make_walk_motion(skeleton, style, n_frames=style.frames_per_cycle,
                              subject_id="exemplar", source_file="exemplar.amc")
    return normalize_root(motion)


def make_database(
    skeleton: Skeleton,
    n_subjects: int,
    samples_per_subject: int,
    rng=None,
    noise: float = 2.0,
    threshold: float = float("nan"),
) -> GaitDatabase:
    """A labeled gait database of per-subject walk cycles plus noise."""
    rng = rng or np.random.default_rng(0)
    base = WalkStyle()
    samples = []
    for s in range(n_subjects):
        style = base.varied(rng)
        label = f"subj{s:02d}"
        for k in range(samples_per_subject):
            n_frames = style.frames_per_cycle + int(rng.integers(-2, 3))
            motion = make_walk_motion(
                skeleton,
                replace(style, phase=style.phase + rng.uniform(-0.15, 0.15)),
                n_frames=max(8, n_frames),
                noise=noise,
                rng=rng,
                subject_id=label,
                source_file=f"{label}_{k}.amc",
            )
            samples.append(sample_from_motion(normalize_root(motion), skeleton=skeleton))
    return GaitDatabase(samples=samples, threshold=threshold, skeleton=skeleton)
