"""Semantic access to joints of a CMU-style 31-joint skeleton.

Extractors talk about knees and shoulders, not about bone names; this map
resolves the semantics against the sample's joint list.  The defaults
cover the CMU naming convention.
"""

from __future__ import annotations

import numpy as np

from ..errors import RepresentationMismatch
from ..sample import GaitSample

# semantic name -> skeleton joint whose position realises it
CMU_SEMANTIC_JOINTS = {
    "pelvis": "root",
    "hip_l": "lhipjoint",
    "hip_r": "rhipjoint",
    "knee_l": "lfemur",
    "knee_r": "rfemur",
    "ankle_l": "ltibia",
    "ankle_r": "rtibia",
    "foot_l": "lfoot",
    "foot_r": "rfoot",
    "toes_l": "ltoes",
    "toes_r": "rtoes",
    "waist": "lowerback",
    "spine": "upperback",
    "chest": "thorax",
    "neck": "lowerneck",
    "head_base": "upperneck",
    "head": "head",
    "shoulder_l": "lclavicle",
    "shoulder_r": "rclavicle",
    "elbow_l": "lhumerus",
    "elbow_r": "rhumerus",
    "wrist_l": "lradius",
    "wrist_r": "rradius",
    "hand_l": "lhand",
    "hand_r": "rhand",
}

# semantic bone name -> (proximal joint, distal joint)
BONES = {
    "thigh_l": ("hip_l", "knee_l"),
    "thigh_r": ("hip_r", "knee_r"),
    "calf_l": ("knee_l", "ankle_l"),
    "calf_r": ("knee_r", "ankle_r"),
    "foot_l": ("ankle_l", "foot_l"),
    "foot_r": ("ankle_r", "foot_r"),
    "upper_arm_l": ("shoulder_l", "elbow_l"),
    "upper_arm_r": ("shoulder_r", "elbow_r"),
    "forearm_l": ("elbow_l", "wrist_l"),
    "forearm_r": ("elbow_r", "wrist_r"),
}

# joint chains used for body-height and length features
HEAD_CHAIN = ("pelvis", "waist", "spine", "chest", "neck", "head_base", "head")
LEG_CHAIN_L = ("pelvis", "hip_l", "knee_l", "ankle_l", "foot_l")
LEG_CHAIN_R = ("pelvis", "hip_r", "knee_r", "ankle_r", "foot_r")
TORSO_CHAIN = ("pelvis", "waist", "spine", "chest")

Y_AXIS = np.array([0.0, 1.0, 0.0])
Z_AXIS = np.array([0.0, 0.0, 1.0])


class BodyMap:
    """Resolves semantic joint names to position columns of one sample."""

    def __init__(self, sample: GaitSample, semantics: dict | None = None):
        self.sample = sample
        self.positions = sample.require_positions()
        names = {n: i for i, n in enumerate(sample.joint_names)}
        semantics = semantics or CMU_SEMANTIC_JOINTS
        self.index: dict[str, int] = {}
        missing = []
        for semantic, joint in semantics.items():
            if joint in names:
                self.index[semantic] = names[joint]
            else:
                missing.append(joint)
        if missing:
            raise RepresentationMismatch(
                f"sample skeleton lacks joints needed by the extractors: {missing}"
            )

    def pos(self, semantic: str) -> np.ndarray:
        """(T, 3) trajectory of one semantic joint."""
        return self.positions[:, self.index[semantic]]

    def bone(self, name: str) -> np.ndarray:
        """(T, 3) bone vector, proximal to distal."""
        prox, dist = BONES[name]
        return self.pos(dist) - self.pos(prox)

    def chain_length(self, chain) -> float:
        """Mean summed segment length along a joint chain."""
        total = 0.0
        for a, b in zip(chain[:-1], chain[1:]):
            total += float(np.mean(np.linalg.norm(self.pos(b) - self.pos(a), axis=1)))
        return total

    def height(self) -> float:
        """Body height: head chain plus the averaged root-to-foot chains."""
        legs = 0.5 * (self.chain_length(LEG_CHAIN_L) + self.chain_length(LEG_CHAIN_R))
        return self.chain_length(HEAD_CHAIN) + legs

    def leg_length(self) -> float:
        return 0.5 * (self.chain_length(LEG_CHAIN_L) + self.chain_length(LEG_CHAIN_R))

    def torso_length(self) -> float:
        return self.chain_length(TORSO_CHAIN)

    def feet_distance(self) -> np.ndarray:
        """(T,) Euclidean distance between the feet."""
        return np.linalg.norm(self.pos("foot_l") - self.pos("foot_r"), axis=1)

    def step_length(self) -> float:
        """Step length as the maximum frame-wise feet distance."""
        return float(np.max(self.feet_distance()))

    def bone_length_signals(self, exclude=()) -> list:
        """Per-frame parent distance of every non-root joint.

        Returns (joint name, (T,) signal) pairs in skeleton order.
        """
        out = []
        for i, name in enumerate(self.sample.joint_names):
            parent = self.sample.parents[i]
            if parent < 0 or name in exclude:
                continue
            sig = np.linalg.norm(self.positions[:, i] - self.positions[:, parent], axis=1)
            out.append((name, sig))
        return out
