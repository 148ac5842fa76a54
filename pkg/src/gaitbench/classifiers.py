"""Building, persisting and querying per-method classifiers.

A classifier container is a self-describing .npz file holding the
learned feature matrix (when the method has one), the feature-space
covariance pseudo-inverse, the labeled gallery templates, the skeleton
used for probe kinematics and the vectorization parameters.  The format
is tagged and versioned.
"""

from __future__ import annotations

import json
from dataclasses import dataclass
from pathlib import Path
from typing import Optional

import numpy as np

from .asfamc import MotionSequence, Skeleton, parse_asf, write_asf
from .errors import GaitBenchError, LayoutMismatch
from .features import Template, extract_template, get_method, template_distance
from .kinematics import normalize_root
from .learning import (
    LabeledDataset,
    LinearTransform,
    MahalanobisClassifier,
    apply_transform,
    fit_mahalanobis,
    learn_mmc,
    learn_pcalda,
)
from .sample import sample_from_motion
from .segmentation import GaitDatabase
from .evaluation import vectorize_samples

FORMAT_TAG = "gaitbench-classifier/1"


@dataclass
class PersistedClassifier:
    """Everything needed to classify a probe motion for one method."""

    method_id: str
    skeleton: Skeleton
    threshold: float
    target_length: int
    transform: Optional[LinearTransform]
    cov_pinv: Optional[np.ndarray]
    gallery: list                      # list[Template]

    @property
    def mahalanobis(self) -> Optional[MahalanobisClassifier]:
        if self.cov_pinv is None:
            return None
        return MahalanobisClassifier(cov_pinv=self.cov_pinv, transform=self.transform)


def build_classifier(db: GaitDatabase, method_id: str) -> PersistedClassifier:
    """Fit one method on a whole extracted database.

    Learned methods train their transform on all labeled samples; every
    method's gallery contains the templates of the full database.
    """
    desc = get_method(method_id)
    target_length = max(2, int(round(db.mean_length())))
    transform = None
    cov_pinv = None
    gallery: list[Template] = []

    if desc.kind == "learned":
        x = vectorize_samples(db.samples, desc.representation, target_length)
        labels = db.labels
        dataset = LabeledDataset(x, labels)
        transform = learn_mmc(dataset) if method_id.startswith("mmc") else learn_pcalda(dataset)
        feats = apply_transform(transform, x)
        cov_pinv = fit_mahalanobis(feats).cov_pinv
        gallery = [
            Template(method_id, feats[i], label=str(labels[i]))
            for i in range(feats.shape[0])
        ]
    elif desc.kind in ("geometric", "bundle", "raw"):
        gallery = [extract_template(method_id, s) for s in db.samples]

    return PersistedClassifier(
        method_id=method_id,
        skeleton=db.skeleton,
        threshold=db.threshold,
        target_length=target_length,
        transform=transform,
        cov_pinv=cov_pinv,
        gallery=gallery,
    )


def save_classifier(classifier: PersistedClassifier, path) -> Path:
    path = Path(path)
    bundle = bool(classifier.gallery and classifier.gallery[0].is_bundle)
    if classifier.gallery:
        stacks = [t.values if bundle else t.values.ravel()[None, :] for t in classifier.gallery]
        gallery_stack = np.concatenate(stacks, axis=0)
        gallery_lengths = np.array([s.shape[0] for s in stacks])
        gallery_labels = np.array([t.label for t in classifier.gallery])
    else:
        gallery_stack = np.zeros((0, 0))
        gallery_lengths = np.zeros(0, dtype=int)
        gallery_labels = np.array([], dtype=str)

    meta = {
        "format": FORMAT_TAG,
        "method_id": classifier.method_id,
        "threshold": classifier.threshold,
        "target_length": classifier.target_length,
        "bundle": bundle,
        "has_transform": classifier.transform is not None,
    }
    np.savez(
        path,
        meta=json.dumps(meta),
        skeleton_asf=write_asf(classifier.skeleton),
        transform_matrix=(
            classifier.transform.matrix if classifier.transform is not None else np.zeros((0, 0))
        ),
        transform_eigenvalues=(
            classifier.transform.eigenvalues if classifier.transform is not None else np.zeros(0)
        ),
        transform_source=(
            classifier.transform.source if classifier.transform is not None else ""
        ),
        cov_pinv=classifier.cov_pinv if classifier.cov_pinv is not None else np.zeros((0, 0)),
        gallery_stack=gallery_stack,
        gallery_lengths=gallery_lengths,
        gallery_labels=gallery_labels,
    )
    return path if path.suffix == ".npz" else path.with_suffix(path.suffix + ".npz")


def load_classifier(path) -> PersistedClassifier:
    path = Path(path)
    try:
        data = np.load(path, allow_pickle=False)
        meta = json.loads(str(data["meta"]))
    except Exception as exc:
        raise GaitBenchError(f"unreadable classifier file {path}: {exc}") from None
    if meta.get("format") != FORMAT_TAG:
        raise GaitBenchError(
            f"{path}: unknown classifier format {meta.get('format')!r}"
        )
    skeleton = parse_asf(str(data["skeleton_asf"]))
    transform = None
    if meta["has_transform"]:
        transform = LinearTransform(
            matrix=data["transform_matrix"],
            source=str(data["transform_source"]),
            eigenvalues=data["transform_eigenvalues"],
        )
    cov = data["cov_pinv"]
    gallery = []
    offsets = np.concatenate([[0], np.cumsum(data["gallery_lengths"])]).astype(int)
    for i, label in enumerate(data["gallery_labels"]):
        chunk = data["gallery_stack"][offsets[i] : offsets[i + 1]]
        values = chunk if meta["bundle"] else chunk[0]
        gallery.append(Template(meta["method_id"], values, label=str(label)))
    return PersistedClassifier(
        method_id=meta["method_id"],
        skeleton=skeleton,
        threshold=meta["threshold"],
        target_length=meta["target_length"],
        transform=transform,
        cov_pinv=cov if cov.size else None,
        gallery=gallery,
    )


def probe_template(classifier: PersistedClassifier, motion: MotionSequence) -> Template:
    """Turn a probe motion into a template under a loaded classifier."""
    desc = get_method(classifier.method_id)
    sample = sample_from_motion(normalize_root(motion), skeleton=classifier.skeleton)
    if desc.kind == "learned":
        vec = vectorize_samples([sample], desc.representation, classifier.target_length)
        feats = apply_transform(classifier.transform, vec)
        return Template(classifier.method_id, feats[0], label=sample.label)
    if desc.kind == "random":
        return Template(classifier.method_id, np.zeros(0), label=sample.label)
    return extract_template(classifier.method_id, sample)


def rank_gallery(classifier: PersistedClassifier, probe: Template, rng=None) -> list:
    """Ranked (identity, distance) list for a probe.

    The distance of an identity is the minimum distance over its gallery
    templates.  The featureless baseline ranks identities uniformly at
    random with undefined distances.
    """
    desc = get_method(classifier.method_id)
    identities = sorted({t.label for t in classifier.gallery})
    if desc.kind == "random":
        rng = rng or np.random.default_rng(0)
        order = [identities[i] for i in rng.permutation(len(identities))]
        return [(label, float("nan")) for label in order]
    if not classifier.gallery:
        raise LayoutMismatch("classifier has an empty gallery")
    best: dict[str, float] = {}
    for t in classifier.gallery:
        d = template_distance(desc, probe, t, classifier.mahalanobis)
        if t.label not in best or d < best[t.label]:
            best[t.label] = d
    return sorted(best.items(), key=lambda kv: (kv[1], kv[0]))
