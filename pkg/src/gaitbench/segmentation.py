"""Gait-cycle extraction from continuous motions.

Clean gait cycles are sub-motions whose DTW distance (on bone rotations)
to an exemplary gait cycle falls below a threshold.  The search slides
windows of 0.5x to 2x the exemplar length over each motion with a stride
of a quarter exemplar length; overlapping hits are resolved by keeping
local DTW minima.  Subjects contributing fewer than 10 surviving cycles
are dropped from the database.
"""

from __future__ import annotations

import csv
import json
import math
from dataclasses import dataclass
from pathlib import Path

import numpy as np

from .asfamc import MotionSequence, Skeleton, parse_amc, parse_asf, write_amc, write_asf
from .dtw import DtwConfig, dtw_distance
from .errors import MalformedAmc, MalformedAsf
from .sample import GaitSample, sample_from_motion

MIN_SAMPLES_PER_SUBJECT = 10


@dataclass(frozen=True)
class WindowSearch:
    """Parameters of the sliding-window candidate search."""

    min_length_factor: float = 0.5
    max_length_factor: float = 2.0
    stride_factor: float = 0.25
    max_overlap: float = 0.5


@dataclass(frozen=True)
class CycleCandidate:
    subject_id: str
    source_file: str
    start: int
    stop: int
    distance: float

    @property
    def length(self) -> int:
        return self.stop - self.start


@dataclass
class GaitDatabase:
    """The experimental database of extracted gait cycles."""

    samples: list
    threshold: float = float("nan")
    skeleton: Skeleton | None = None

    @property
    def subjects(self) -> dict:
        counts: dict[str, int] = {}
        for s in self.samples:
            counts[s.label] = counts.get(s.label, 0) + 1
        return counts

    @property
    def class_labels(self) -> list:
        return sorted(self.subjects)

    @property
    def labels(self) -> np.ndarray:
        return np.array([s.label for s in self.samples])

    def mean_length(self) -> float:
        if not self.samples:
            return 0.0
        return float(np.mean([s.num_frames for s in self.samples]))


def candidate_windows(
    motion: MotionSequence,
    exemplar: MotionSequence,
    threshold: float,
    search: WindowSearch | None = None,
    cfg: DtwConfig | None = None,
) -> list:
    """All sliding windows of one motion within the DTW threshold.

    Returned before overlap suppression, so raising the threshold can
    only grow the candidate set.
    """
    search = search or WindowSearch()
    ex = exemplar.rotation_matrix()
    br = motion.rotation_matrix()
    L = ex.shape[0]
    T = br.shape[0]
    if L == 0 or T == 0:
        return []
    lo = max(2, int(math.ceil(search.min_length_factor * L)))
    hi = min(T, int(math.floor(search.max_length_factor * L)))
    step = max(1, int(round(search.stride_factor * L)))
    out = []
    for length in range(lo, hi + 1, step):
        for start in range(0, T - length + 1, step):
            d = dtw_distance(br[start : start + length], ex, cfg)
            if d <= threshold:
                out.append(
                    CycleCandidate(
                        subject_id=motion.subject_id,
                        source_file=motion.source_file,
                        start=start,
                        stop=start + length,
                        distance=d,
                    )
                )
    return out


def _overlap_fraction(a: CycleCandidate, b: CycleCandidate) -> float:
    inter = min(a.stop, b.stop) - max(a.start, b.start)
    if inter <= 0:
        return 0.0
    return inter / min(a.length, b.length)


def suppress_overlaps(candidates, max_overlap: float = 0.5) -> list:
    """Keep local DTW minima: greedily accept candidates by ascending
    distance, discarding any that overlaps an accepted one by more than
    max_overlap of the shorter window."""
    accepted: list[CycleCandidate] = []
    for cand in sorted(candidates, key=lambda c: (c.distance, c.start, c.stop)):
        if all(_overlap_fraction(cand, a) <= max_overlap for a in accepted):
            accepted.append(cand)
    accepted.sort(key=lambda c: (c.start, c.stop))
    return accepted


def extract_gait_cycles(
    motions,
    exemplar: MotionSequence,
    threshold: float,
    search: WindowSearch | None = None,
    skeleton: Skeleton | None = None,
    min_samples: int = MIN_SAMPLES_PER_SUBJECT,
) -> GaitDatabase:
    """Extract the experimental database from normalized motions.

    Every returned sample is a contiguous frame window of exactly one
    source motion with DTW distance to the exemplar at most ``threshold``.
    Subjects with fewer than ``min_samples`` surviving cycles are removed.
    An empty database is valid output.
    """
    search = search or WindowSearch()
    skeleton = skeleton or exemplar.skeleton
    per_subject: dict[str, list] = {}
    for motion in motions:
        cands = suppress_overlaps(
            candidate_windows(motion, exemplar, threshold, search),
            search.max_overlap,
        )
        for cand in cands:
            window = motion.window(cand.start, cand.stop)
            sample = sample_from_motion(
                window,
                skeleton=skeleton,
                label=motion.subject_id,
                source=motion.source_file,
                frame_range=(cand.start, cand.stop),
                extraction_distance=cand.distance,
            )
            per_subject.setdefault(motion.subject_id, []).append(sample)

    samples = []
    for subject in sorted(per_subject):
        if len(per_subject[subject]) >= min_samples:
            samples.extend(per_subject[subject])
    return GaitDatabase(samples=samples, threshold=threshold, skeleton=skeleton)


MANIFEST_FIELDS = ("sample", "subject_id", "source_file", "start", "stop", "distance")


def save_database(db: GaitDatabase, outdir) -> Path:
    """Write an extracted database to disk.

    Layout: cycles/<subject>_<index>.amc, manifest.csv, skeleton.asf and
    a database.json with the extraction threshold and counts.
    """
    outdir = Path(outdir)
    cycles = outdir / "cycles"
    cycles.mkdir(parents=True, exist_ok=True)
    if db.skeleton is not None:
        (outdir / "skeleton.asf").write_text(write_asf(db.skeleton))

    rows = []
    index: dict[str, int] = {}
    for sample in db.samples:
        index[sample.label] = index.get(sample.label, 0) + 1
        name = f"{sample.label}_{index[sample.label]}.amc"
        motion = _sample_to_motion(sample, db.skeleton)
        (cycles / name).write_text(write_amc(motion))
        fr = sample.frame_range or (0, sample.num_frames)
        rows.append(
            {
                "sample": name,
                "subject_id": sample.label,
                "source_file": sample.source,
                "start": fr[0],
                "stop": fr[1],
                "distance": ""
                if sample.extraction_distance is None
                else f"{sample.extraction_distance:.6f}",
            }
        )

    with open(outdir / "manifest.csv", "w", newline="") as fh:
        writer = csv.DictWriter(fh, fieldnames=MANIFEST_FIELDS)
        writer.writeheader()
        writer.writerows(rows)

    meta = {
        "format": "gaitbench-database/1",
        "threshold": db.threshold,
        "subjects": len(db.subjects),
        "samples": len(db.samples),
    }
    (outdir / "database.json").write_text(json.dumps(meta, indent=2) + "\n")
    return outdir


def _sample_to_motion(sample: GaitSample, skeleton: Skeleton) -> MotionSequence:
    """Rebuild an AMC-writable motion from a sample's rotation channels."""
    rot = sample.require_rotations()
    values: dict[str, np.ndarray] = {}
    col = {}
    for k, (joint, dof) in enumerate(sample.channel_names):
        col.setdefault(joint, {})[dof] = rot[:, k]
    T = rot.shape[0]
    for joint in skeleton.joints:
        if not joint.dof:
            continue
        arr = np.zeros((T, len(joint.dof)))
        for k, d in enumerate(joint.dof):
            if joint.name in col and d in col[joint.name]:
                arr[:, k] = col[joint.name][d]
        values[joint.name] = arr
    return MotionSequence(
        skeleton=skeleton,
        values=values,
        frame_rate=sample.frame_rate,
        subject_id=sample.label,
        source_file=sample.source,
    )


def load_database(path) -> GaitDatabase:
    """Load a previously saved database directory."""
    path = Path(path)
    skel_path = path / "skeleton.asf"
    if not skel_path.exists():
        raise MalformedAsf(f"missing skeleton file: {skel_path}")
    skeleton = parse_asf(skel_path.read_text())

    threshold = float("nan")
    meta_path = path / "database.json"
    if meta_path.exists():
        threshold = json.loads(meta_path.read_text()).get("threshold", threshold)

    manifest = path / "manifest.csv"
    rows = []
    if manifest.exists():
        with open(manifest, newline="") as fh:
            rows = list(csv.DictReader(fh))

    samples = []
    for row in rows:
        amc_path = path / "cycles" / row["sample"]
        try:
            motion = parse_amc(amc_path.read_text(), skeleton)
        except MalformedAmc as exc:
            raise MalformedAmc(f"{amc_path}: {exc}") from None
        samples.append(
            sample_from_motion(
                motion,
                skeleton=skeleton,
                label=row["subject_id"],
                source=row.get("source_file", ""),
                frame_range=(int(row["start"]), int(row["stop"])),
                extraction_distance=float(row["distance"]) if row.get("distance") else None,
            )
        )
    return GaitDatabase(samples=samples, threshold=threshold, skeleton=skeleton)
