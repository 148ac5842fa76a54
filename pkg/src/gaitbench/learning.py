"""Supervised linear feature learning and the Mahalanobis comparison.

Two learners are provided.  The maximum-margin learner whitens the total
covariance through an SVD of the centered sample matrix (never forming a
D x D matrix, which matters since D is typically far larger than the
number of learning samples) and keeps the whitened between-class
directions whose eigenvalues reach 1/2.  The PCA+LDA learner projects
onto the leading eigenvectors of the summed scatter, one per learning
class, then solves the regularized discriminant problem inside that
subspace.

Class means in the between-class scatter are unweighted and the
within-class scatter averages each class by its own size; the summed
scatter used by PCA+LDA is exactly the sum of those two matrices.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Optional

import numpy as np
import scipy.linalg

from .errors import (
    DegenerateScatter,
    DimensionMismatch,
    SingularWithinScatter,
    TooFewClasses,
)

SPECTRUM_CUTOFF = 1e-8          # relative singular-value cutoff for whitening
WITHIN_SCATTER_RIDGE = 1e-6     # relative ridge for the within-scatter inverse
MARGIN_EIGENVALUE_MIN = 0.5     # minimum retained between-class eigenvalue


@dataclass
class LabeledDataset:
    """Length-normalized sample vectors with identity labels.

    vectors: (N, D) array, one sample per row.
    labels: length-N array of hashable identity labels.
    """

    vectors: np.ndarray
    labels: np.ndarray

    def __post_init__(self):
        self.vectors = np.asarray(self.vectors, dtype=float)
        self.labels = np.asarray(self.labels)
        if self.vectors.ndim != 2:
            raise DimensionMismatch("vectors must be a (N, D) array")
        if self.labels.shape[0] != self.vectors.shape[0]:
            raise DimensionMismatch("one label per sample required")

    @property
    def num_samples(self) -> int:
        return self.vectors.shape[0]

    @property
    def dimension(self) -> int:
        return self.vectors.shape[1]

    @property
    def classes(self) -> list:
        return sorted(set(self.labels.tolist()))

    def class_indices(self) -> dict:
        return {c: np.flatnonzero(self.labels == c) for c in self.classes}


@dataclass
class ScatterSet:
    """Mean vectors and scatter matrices of a labeled dataset."""

    mean: np.ndarray
    class_means: np.ndarray       # (C, D), ordered like class_labels
    class_labels: list
    between: np.ndarray           # sum_c (mu_c - mu)(mu_c - mu)^T
    within: np.ndarray            # sum_c (1/N_c) sum_n (g - mu_c)(g - mu_c)^T
    total: np.ndarray             # between + within


def compute_scatter(data: LabeledDataset) -> ScatterSet:
    """Explicit scatter matrices; needs at least two non-empty classes.

    Materializes D x D matrices, so this is meant for moderate D; the
    learners below use factored equivalents internally.
    """
    indices = data.class_indices()
    if len(indices) < 2:
        raise TooFewClasses("scatter computation needs at least 2 classes")
    mu = data.vectors.mean(axis=0)
    class_means = np.stack([data.vectors[idx].mean(axis=0) for idx in indices.values()])
    between = np.zeros((data.dimension, data.dimension))
    within = np.zeros_like(between)
    for mu_c, idx in zip(class_means, indices.values()):
        d = mu_c - mu
        between += np.outer(d, d)
        centered = data.vectors[idx] - mu_c
        within += centered.T @ centered / idx.size
    return ScatterSet(
        mean=mu,
        class_means=class_means,
        class_labels=list(indices),
        between=between,
        within=within,
        total=between + within,
    )


@dataclass
class MmcDecomposition:
    """Intermediate quantities of the maximum-margin learner, kept for
    verification against dense eigensolvers."""

    omega: np.ndarray        # eigenvectors of the total covariance
    theta: np.ndarray        # its positive eigenvalues
    xi: np.ndarray           # eigenvectors of the whitened between-scatter
    psi: np.ndarray          # all candidate discriminant directions
    delta: np.ndarray        # between-class eigenvalues of every candidate


@dataclass
class LinearTransform:
    """A learned feature matrix mapping samples to templates."""

    matrix: np.ndarray            # (D, D~)
    source: str                   # 'mmc' or 'pcalda'
    eigenvalues: np.ndarray
    decomposition: Optional[MmcDecomposition] = None
    pca_components: Optional[np.ndarray] = None
    pca_eigenvalues: Optional[np.ndarray] = None

    @property
    def input_dim(self) -> int:
        return self.matrix.shape[0]

    @property
    def output_dim(self) -> int:
        return self.matrix.shape[1]

    def apply(self, x: np.ndarray) -> np.ndarray:
        return apply_transform(self, x)


def _sign_normalize(matrix: np.ndarray) -> np.ndarray:
    """Flip column signs so the largest-magnitude component is positive."""
    if matrix.size == 0:
        return matrix
    idx = np.argmax(np.abs(matrix), axis=0)
    signs = np.sign(matrix[idx, np.arange(matrix.shape[1])])
    signs[signs == 0] = 1.0
    return matrix * signs


def _class_mean_offsets(data: LabeledDataset, mu: np.ndarray) -> np.ndarray:
    """Columns (mu_c - mu), one per class."""
    return np.stack(
        [data.vectors[idx].mean(axis=0) - mu for idx in data.class_indices().values()],
        axis=1,
    )


def learn_mmc(data: LabeledDataset, cutoff: float = SPECTRUM_CUTOFF) -> LinearTransform:
    """Learn a maximum-margin feature matrix.

    Steps: center the samples, take the SVD of the scaled sample matrix
    to diagonalize the total covariance on its positive spectrum, whiten,
    diagonalize the whitened between-class scatter through the SVD of the
    whitened class-mean offsets, and keep the directions whose
    between-class eigenvalue is at least 1/2 (ties retained).

    Raises DegenerateScatter when all samples coincide.
    """
    mu = data.vectors.mean(axis=0)
    X = (data.vectors - mu).T / np.sqrt(data.num_samples)   # (D, N)
    omega, sing, _ = np.linalg.svd(X, full_matrices=False)
    if sing.size == 0 or sing[0] <= 0.0:
        raise DegenerateScatter("total covariance has no positive spectrum")
    keep = sing > cutoff * sing[0]
    omega = omega[:, keep]
    theta = sing[keep] ** 2

    upsilon = _class_mean_offsets(data, mu)                 # (D, C)
    whitened = (omega.T @ upsilon) / np.sqrt(theta)[:, None]
    xi, sv, _ = np.linalg.svd(whitened, full_matrices=False)
    psi = omega @ (xi / np.sqrt(theta)[:, None])

    # between-class eigenvalues of every candidate direction
    proj = psi.T @ upsilon
    delta = np.einsum("ij,ij->i", proj, proj)

    retained = delta >= MARGIN_EIGENVALUE_MIN
    matrix = _sign_normalize(psi[:, retained])
    return LinearTransform(
        matrix=matrix,
        source="mmc",
        eigenvalues=delta[retained],
        decomposition=MmcDecomposition(
            omega=omega, theta=theta, xi=xi, psi=psi, delta=delta
        ),
    )


def learn_pcalda(
    data: LabeledDataset, ridge: float = WITHIN_SCATTER_RIDGE
) -> LinearTransform:
    """Learn a PCA+LDA feature matrix.

    The PCA stage keeps exactly one component per learning class (the
    leading eigenvectors of the summed scatter); the LDA stage solves the
    generalized eigenproblem of the projected scatters with a relative
    ridge on the within-class part.

    Raises TooFewClasses below two classes and SingularWithinScatter when
    the regularized within-scatter still cannot be inverted.
    """
    indices = data.class_indices()
    num_classes = len(indices)
    if num_classes < 2:
        raise TooFewClasses("PCA+LDA needs at least 2 classes")
    if num_classes > data.dimension:
        raise DegenerateScatter(
            f"sample dimension {data.dimension} cannot hold one principal "
            f"component per class ({num_classes} classes)"
        )

    mu = data.vectors.mean(axis=0)
    hb = _class_mean_offsets(data, mu)                       # (D, C)
    hw_cols = []
    for idx in indices.values():
        centered = data.vectors[idx] - data.vectors[idx].mean(axis=0)
        hw_cols.append(centered.T / np.sqrt(idx.size))
    hw = np.concatenate(hw_cols, axis=1)                     # (D, N)

    # summed scatter factors: total = hb hb^T + hw hw^T
    z = np.concatenate([hb, hw], axis=1)
    u, sing, _ = np.linalg.svd(z, full_matrices=False)
    phi_pca = u[:, :num_classes]
    pca_eigenvalues = np.zeros(num_classes)
    k = min(num_classes, sing.size)
    pca_eigenvalues[:k] = sing[:k] ** 2

    b = phi_pca.T @ hb
    w = phi_pca.T @ hw
    sb = b @ b.T
    sw = w @ w.T
    eps = ridge * np.trace(sw) / sw.shape[0]
    try:
        lda_vals, lda_vecs = scipy.linalg.eigh(sb, sw + eps * np.eye(sw.shape[0]))
    except (np.linalg.LinAlgError, scipy.linalg.LinAlgError) as exc:
        raise SingularWithinScatter(str(exc)) from None
    order = np.argsort(lda_vals)[::-1]
    matrix = _sign_normalize(phi_pca @ lda_vecs[:, order])
    return LinearTransform(
        matrix=matrix,
        source="pcalda",
        eigenvalues=lda_vals[order],
        pca_components=phi_pca,
        pca_eigenvalues=pca_eigenvalues,
    )


def apply_transform(transform: LinearTransform, x: np.ndarray) -> np.ndarray:
    """Project one sample vector (or a stack of them) into feature space."""
    x = np.asarray(x, dtype=float)
    if x.shape[-1] != transform.input_dim:
        raise DimensionMismatch(
            f"sample dimension {x.shape[-1]} != transform input {transform.input_dim}"
        )
    return x @ transform.matrix


@dataclass
class MahalanobisClassifier:
    """Gallery templates with a feature-space covariance for comparison.

    The covariance is estimated on the learning templates and
    pseudo-inverted, so rank-deficient feature spaces degrade gracefully.
    """

    cov_pinv: np.ndarray
    transform: Optional[LinearTransform] = None
    gallery: Optional[np.ndarray] = None
    gallery_labels: Optional[np.ndarray] = None


def fit_mahalanobis(
    templates: np.ndarray,
    transform: Optional[LinearTransform] = None,
    gallery: Optional[np.ndarray] = None,
    gallery_labels=None,
) -> MahalanobisClassifier:
    """Estimate the comparison covariance from learning templates."""
    templates = np.asarray(templates, dtype=float)
    if templates.ndim != 2:
        raise DimensionMismatch("templates must be a (N, d) array")
    if templates.shape[0] > 1:
        cov = np.cov(templates, rowvar=False)
        cov = np.atleast_2d(cov)
    else:
        cov = np.eye(templates.shape[1])
    return MahalanobisClassifier(
        cov_pinv=np.linalg.pinv(cov, hermitian=True),
        transform=transform,
        gallery=gallery,
        gallery_labels=None if gallery_labels is None else np.asarray(gallery_labels),
    )


def mahalanobis_distance(classifier: MahalanobisClassifier, a, b) -> float:
    """sqrt((a-b)^T S+ (a-b)) with S the learning-template covariance."""
    a = np.asarray(getattr(a, "values", a), dtype=float).ravel()
    b = np.asarray(getattr(b, "values", b), dtype=float).ravel()
    if a.shape != b.shape:
        raise DimensionMismatch(f"template shapes differ: {a.shape} vs {b.shape}")
    if a.shape[0] != classifier.cov_pinv.shape[0]:
        raise DimensionMismatch(
            f"template dimension {a.shape[0]} != covariance "
            f"dimension {classifier.cov_pinv.shape[0]}"
        )
    d = a - b
    return float(np.sqrt(max(0.0, d @ classifier.cov_pinv @ d)))
