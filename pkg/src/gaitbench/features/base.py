"""Template type, method registry and template distance functions."""

from __future__ import annotations

import csv
import io
from dataclasses import dataclass
from typing import Callable, Optional

import numpy as np

from ..dtw import dtw_distance
from ..errors import LayoutMismatch
from ..sample import GaitSample, resample_series


@dataclass
class Template:
    """A gait template: a feature vector or a bundle of time signals.

    Fixed-length methods store a 1-D value vector.  Signal methods store
    a (T, S) matrix whose columns are named time signals; their flattened
    size is the template dimensionality.
    """

    method_id: str
    values: np.ndarray
    label: Optional[str] = None
    signal_names: tuple = ()

    @property
    def dimension(self) -> int:
        return int(self.values.size)

    @property
    def is_bundle(self) -> bool:
        return self.values.ndim == 2


@dataclass(frozen=True)
class MethodDescriptor:
    """Registry entry describing one gait-recognition method.

    distance is one of 'euclidean', 'dtw', 'covariance', 'mahalanobis'
    or 'none'; kind is 'geometric', 'bundle', 'raw', 'learned' or
    'random'.  nominal_td is the fixed template dimensionality where the
    method has one.
    """

    method_id: str
    representation: str
    distance: str
    kind: str
    description: str
    nominal_td: Optional[int] = None
    extractor: Optional[Callable] = None


REGISTRY: dict[str, MethodDescriptor] = {}


def register(descriptor: MethodDescriptor) -> MethodDescriptor:
    REGISTRY[descriptor.method_id] = descriptor
    return descriptor


def method_ids() -> list:
    return sorted(REGISTRY)


def get_method(method_id: str) -> MethodDescriptor:
    try:
        return REGISTRY[method_id]
    except KeyError:
        raise ValueError(
            f"unknown method '{method_id}'; available: {', '.join(method_ids())}"
        ) from None


def extract_template(method_id: str, sample: GaitSample) -> Template:
    """Extract a template with a registered non-learned method."""
    method = get_method(method_id)
    if method.extractor is None:
        raise ValueError(f"method '{method_id}' has no direct extractor")
    values, names = method.extractor(sample)
    return Template(
        method_id=method_id,
        values=np.asarray(values, dtype=float),
        label=sample.label,
        signal_names=tuple(names),
    )


def extract_geometric_features(method_id: str, sample: GaitSample) -> Template:
    """Extract with one of the published geometric methods."""
    method = get_method(method_id)
    if method.kind not in ("geometric", "bundle"):
        raise ValueError(f"'{method_id}' is not a geometric method")
    return extract_template(method_id, sample)


def raw_template(sample: GaitSample, representation: str = "jc") -> Template:
    """Length-normalized raw-data template (see features.raw)."""
    return extract_template(f"raw_{representation}", sample)


def _check_layout(a: Template, b: Template):
    if a.method_id != b.method_id:
        raise LayoutMismatch(f"method mismatch: {a.method_id} vs {b.method_id}")
    if a.is_bundle != b.is_bundle:
        raise LayoutMismatch("cannot compare a bundle with a flat vector")
    if a.is_bundle:
        if a.values.shape[1] != b.values.shape[1]:
            raise LayoutMismatch(
                f"signal count differs: {a.values.shape[1]} vs {b.values.shape[1]}"
            )
    elif a.values.shape != b.values.shape:
        raise LayoutMismatch(f"shape mismatch: {a.values.shape} vs {b.values.shape}")


def euclidean_distance(a: Template, b: Template) -> float:
    return float(np.linalg.norm(a.values.ravel() - b.values.ravel()))


def dtw_bundle_distance(a: Template, b: Template) -> float:
    """Sum of per-signal DTW distances over the bundle columns."""
    total = 0.0
    for s in range(a.values.shape[1]):
        total += dtw_distance(a.values[:, s], b.values[:, s])
    return total


def trajectory_covariance(t: Template) -> np.ndarray:
    """Channel covariance of a trajectory bundle over time."""
    x = t.values - t.values.mean(axis=0)
    return (x.T @ x) / x.shape[0]


def covariance_distance(a: Template, b: Template) -> float:
    """Frobenius norm of the difference of trajectory covariance matrices."""
    return float(np.linalg.norm(trajectory_covariance(a) - trajectory_covariance(b)))


def template_distance(
    method: MethodDescriptor, a: Template, b: Template, classifier=None
) -> float:
    """Distance between two templates under a method's comparison rule.

    Learned methods compare templates with the Mahalanobis distance and
    therefore need the fitted classifier passed in.
    """
    _check_layout(a, b)
    if method.distance == "euclidean":
        return euclidean_distance(a, b)
    if method.distance == "dtw":
        return dtw_bundle_distance(a, b)
    if method.distance == "covariance":
        return covariance_distance(a, b)
    if method.distance == "mahalanobis":
        if classifier is None:
            raise ValueError("mahalanobis comparison requires a fitted classifier")
        from ..learning import mahalanobis_distance

        return mahalanobis_distance(classifier, a.values, b.values)
    raise ValueError(f"method '{method.method_id}' defines no distance")


def method_centroid(templates) -> Template:
    """Centroid of a set of templates of one method.

    Flat vectors and fixed-shape bundles average pointwise.  Variable
    length bundles are linearly resampled to the rounded mean length
    before averaging, which keeps the centroid comparable under DTW.
    """
    first = templates[0]
    if not first.is_bundle:
        stack = np.stack([t.values for t in templates])
        return Template(first.method_id, stack.mean(axis=0), None, first.signal_names)
    lengths = [t.values.shape[0] for t in templates]
    target = max(2, int(round(float(np.mean(lengths)))))
    stack = np.stack([resample_series(t.values, target) for t in templates])
    return Template(first.method_id, stack.mean(axis=0), None, first.signal_names)


def templates_to_csv(templates, stream=None) -> str:
    """Serialize templates as flat CSV rows: method_id, label, values...

    Bundles are flattened row-major; the export is one-way (shape is not
    retained).
    """
    out = stream or io.StringIO()
    writer = csv.writer(out)
    for t in templates:
        writer.writerow([t.method_id, t.label] + [f"{v:.9g}" for v in t.values.ravel()])
    return out.getvalue() if stream is None else ""


def templates_from_csv(text: str) -> list:
    """Read back flat template rows written by templates_to_csv."""
    out = []
    for row in csv.reader(io.StringIO(text)):
        if not row:
            continue
        out.append(
            Template(
                method_id=row[0],
                values=np.array([float(v) for v in row[2:]]),
                label=row[1],
            )
        )
    return out
