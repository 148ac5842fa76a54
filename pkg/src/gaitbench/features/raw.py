"""Raw-data baseline templates.

Raw templates flatten a length-normalized sample without any feature
engineering.  With CMU's 31 joints and the fixed 150-frame normalization
the joint-coordinate variant is 3 * 31 * 150 = 13,950 dimensional; the
bone-rotation variant flattens all rotational channels over the same 150
frames.  These serve as brute-force baselines, not practical methods.
"""

from __future__ import annotations

from ..sample import GaitSample, resample_linear
from .base import MethodDescriptor, register

RAW_TARGET_FRAMES = 150


def raw_jc(sample: GaitSample):
    pos = sample.require_positions()
    resampled = resample_linear(sample, RAW_TARGET_FRAMES)
    flat = resampled.positions.reshape(RAW_TARGET_FRAMES, -1)
    names = [f"{j}_{ax}" for j in sample.joint_names for ax in "xyz"]
    return flat.ravel(), names


def raw_br(sample: GaitSample):
    sample.require_rotations()
    resampled = resample_linear(sample, RAW_TARGET_FRAMES)
    names = [f"{joint}_{dof}" for joint, dof in sample.channel_names]
    return resampled.rotations.ravel(), names


register(MethodDescriptor("raw_jc", "jc", "euclidean", "raw",
                          "all joint coordinates over 150 frames", 13950, raw_jc))
register(MethodDescriptor("raw_br", "br", "euclidean", "raw",
                          "all bone rotations over 150 frames", None, raw_br))
register(MethodDescriptor("mmc_br", "br", "mahalanobis", "learned",
                          "maximum-margin subspace on bone rotations", None, None))
register(MethodDescriptor("mmc_jc", "jc", "mahalanobis", "learned",
                          "maximum-margin subspace on joint coordinates", None, None))
register(MethodDescriptor("pcalda_br", "br", "mahalanobis", "learned",
                          "PCA+LDA subspace on bone rotations", None, None))
register(MethodDescriptor("pcalda_jc", "jc", "mahalanobis", "learned",
                          "PCA+LDA subspace on joint coordinates", None, None))
register(MethodDescriptor("random", "none", "none", "random",
                          "uniformly random gallery identity", 0, None))
