import numpy as np
import pytest

from gaitbench import (
    LabeledDataset,
    apply_transform,
    compute_scatter,
    fit_mahalanobis,
    learn_mmc,
    learn_pcalda,
    mahalanobis_distance,
)
from gaitbench.errors import DegenerateScatter, DimensionMismatch, TooFewClasses
from gaitbench.learning import LinearTransform, MahalanobisClassifier


def random_dataset(rng, dim=None, classes=None, per_class=None, spread=3.0):
    dim = dim or int(rng.integers(4, 21))
    classes = classes or int(rng.integers(2, 6))
    per_class = per_class or int(rng.integers(3, 11))
    vectors, labels = [], []
    for c in range(classes):
        center = rng.normal(0, spread, dim)
        vectors.append(center + rng.normal(0, 1.0, (per_class, dim)))
        labels += [f"c{c}"] * per_class
    return LabeledDataset(np.concatenate(vectors), np.array(labels))


def scatter_brute_force(X, labels):
    """Literal double-loop evaluation of the three scatter matrices."""
    classes = sorted(set(labels))
    N, D = X.shape
    mu = sum(X[i] for i in range(N)) / N
    between = np.zeros((D, D))
    within = np.zeros((D, D))
    for c in classes:
        idx = [i for i in range(N) if labels[i] == c]
        mu_c = sum(X[i] for i in idx) / len(idx)
        d = (mu_c - mu).reshape(-1, 1)
        between += d @ d.T
        for i in idx:
            e = (X[i] - mu_c).reshape(-1, 1)
            within += (e @ e.T) / len(idx)
    return between, within


class TestComputeScatter:
    def test_identical_samples_zero_scatter(self):
        X = np.tile([1.0, 2.0, 3.0], (6, 1))
        scatter = compute_scatter(LabeledDataset(X, np.array(list("aabbcc"))))
        assert np.allclose(scatter.between, 0.0)
        assert np.allclose(scatter.within, 0.0)

    def test_two_singleton_classes(self):
        data = LabeledDataset(np.array([[-1.0], [1.0]]), np.array(["a", "b"]))
        scatter = compute_scatter(data)
        assert scatter.mean == pytest.approx(0.0)
        assert scatter.between[0, 0] == pytest.approx(2.0)

    def test_matches_brute_force(self):
        rng = np.random.default_rng(0)
        for _ in range(5):
            data = random_dataset(rng, dim=int(rng.integers(2, 8)))
            scatter = compute_scatter(data)
            between, within = scatter_brute_force(data.vectors, data.labels.tolist())
            assert np.allclose(scatter.between, between, atol=1e-10)
            assert np.allclose(scatter.within, within, atol=1e-10)
            assert np.allclose(scatter.total, between + within, atol=1e-10)

    def test_total_is_between_plus_within(self):
        rng = np.random.default_rng(1)
        scatter = compute_scatter(random_dataset(rng))
        gap = np.linalg.norm(scatter.total - scatter.between - scatter.within)
        assert gap <= 1e-8 * max(1.0, np.linalg.norm(scatter.total))

    def test_too_few_classes(self):
        with pytest.raises(TooFewClasses):
            compute_scatter(LabeledDataset(np.zeros((3, 2)), np.array(["a"] * 3)))


def total_covariance(X):
    mu = X.mean(axis=0)
    Xc = X - mu
    return Xc.T @ Xc / X.shape[0]


class TestLearnMmc:
    def test_two_tight_classes_embedded_on_a_line(self):
        # both classes live on a single direction of the 5-D space, so the
        # positive spectrum is rank 1 and the retained column must match
        # the class-mean difference exactly (up to sign)
        rng = np.random.default_rng(3)
        axis = np.array([2.0, -1.0, 0.5, 0.0, 1.0])
        axis /= np.linalg.norm(axis)
        coords = np.concatenate([5.0 + rng.normal(0, 0.05, 20),
                                 -5.0 + rng.normal(0, 0.05, 20)])
        X = np.outer(coords, axis)
        labels = np.array(["a"] * 20 + ["b"] * 20)
        transform = learn_mmc(LabeledDataset(X, labels))
        assert transform.output_dim == 1
        direction = transform.matrix[:, 0]
        cos = abs(direction @ axis) / np.linalg.norm(direction)
        assert cos == pytest.approx(1.0, abs=1e-9)

    def test_coincident_class_means_retain_nothing(self):
        rng = np.random.default_rng(4)
        noise = rng.normal(0, 1, (12, 6))
        X = np.concatenate([noise, noise])  # identical per-class clouds
        labels = np.array(["a"] * 12 + ["b"] * 12)
        transform = learn_mmc(LabeledDataset(X, labels))
        assert transform.output_dim == 0
        assert np.allclose(transform.decomposition.delta, 0.0, atol=1e-12)

    def test_whitening_identity(self):
        rng = np.random.default_rng(5)
        for _ in range(5):
            data = random_dataset(rng)
            transform = learn_mmc(data)
            psi = transform.decomposition.psi
            st = total_covariance(data.vectors)
            gram = psi.T @ st @ psi
            assert np.allclose(gram, np.eye(gram.shape[0]), atol=1e-6)

    def test_retained_eigenvalues_at_least_half_sorted(self):
        rng = np.random.default_rng(6)
        for _ in range(5):
            transform = learn_mmc(random_dataset(rng))
            assert np.all(transform.eigenvalues >= 0.5)
            assert np.all(np.diff(transform.eigenvalues) <= 1e-9)

    def test_eigenpairs_match_dense_solver(self):
        rng = np.random.default_rng(7)
        data = random_dataset(rng, dim=10, classes=3, per_class=8)
        transform = learn_mmc(data)
        dec = transform.decomposition

        st = total_covariance(data.vectors)
        vals, vecs = np.linalg.eigh(st)
        vals, vecs = vals[::-1], vecs[:, ::-1]
        k = dec.theta.size
        assert np.allclose(dec.theta, vals[:k], atol=1e-6)
        for i in range(k):
            if i + 1 < k and vals[i] - vals[i + 1] < 1e-5:
                continue  # eigenvector comparison is ill-posed at near-ties
            assert abs(dec.omega[:, i] @ vecs[:, i]) == pytest.approx(1.0, abs=1e-6)

        scatter = compute_scatter(data)
        whitened = (
            np.diag(dec.theta**-0.5) @ dec.omega.T @ scatter.between
            @ dec.omega @ np.diag(dec.theta**-0.5)
        )
        bvals = np.linalg.eigh(whitened)[0][::-1]
        m = dec.delta.size
        assert np.allclose(dec.delta, bvals[:m], atol=1e-6)

    def test_degenerate_scatter(self):
        X = np.tile([1.0, 2.0], (8, 1))
        with pytest.raises(DegenerateScatter):
            learn_mmc(LabeledDataset(X, np.array(["a", "b"] * 4)))

    def test_sample_order_invariance(self):
        rng = np.random.default_rng(8)
        data = random_dataset(rng, dim=8, classes=3, per_class=6)
        perm = rng.permutation(data.num_samples)
        shuffled = LabeledDataset(data.vectors[perm], data.labels[perm])
        a = learn_mmc(data)
        b = learn_mmc(shuffled)
        assert a.output_dim == b.output_dim
        assert np.allclose(a.eigenvalues, b.eigenvalues, atol=1e-8)
        assert np.allclose(np.abs(a.matrix.T @ b.matrix),
                           np.abs(a.matrix.T @ a.matrix), atol=1e-6)


class TestLearnPcalda:
    def test_pca_stage_has_one_component_per_class(self):
        rng = np.random.default_rng(9)
        for classes in (2, 3, 5):
            data = random_dataset(rng, dim=12, classes=classes, per_class=6)
            transform = learn_pcalda(data)
            assert transform.pca_components.shape == (12, classes)
            assert transform.output_dim == classes

    def test_isotropic_two_class_alignment(self):
        # exactly isotropic within-class scatter: four symmetric points per class
        delta = 0.3
        pattern = np.array([[delta, 0], [-delta, 0], [0, delta], [0, -delta]])
        X = np.concatenate([pattern + [1.0, 0.0], pattern - [1.0, 0.0]])
        labels = np.array(["a"] * 4 + ["b"] * 4)
        transform = learn_pcalda(LabeledDataset(X, labels))
        lead = transform.matrix[:, 0]
        angle = np.arctan2(abs(lead[1]), abs(lead[0]))
        assert angle < 1e-6

    def test_rank_deficient_total_scatter(self):
        # all samples on one line: PCA eigenvalues beyond the rank are zero
        # and the ridge makes the within-scatter invertible
        t = np.linspace(-1, 1, 8)
        X = np.stack([t, np.zeros(8), np.zeros(8)], axis=1)
        labels = np.array(["a"] * 4 + ["b"] * 4)
        transform = learn_pcalda(LabeledDataset(X, labels))
        assert transform.pca_eigenvalues[0] > 0
        assert transform.pca_eigenvalues[1] == pytest.approx(0.0, abs=1e-12)

    def test_too_few_classes(self):
        with pytest.raises(TooFewClasses):
            learn_pcalda(LabeledDataset(np.zeros((4, 3)), np.array(["a"] * 4)))

    def test_sample_order_invariance(self):
        rng = np.random.default_rng(10)
        data = random_dataset(rng, dim=9, classes=3, per_class=5)
        perm = rng.permutation(data.num_samples)
        shuffled = LabeledDataset(data.vectors[perm], data.labels[perm])
        a = learn_pcalda(data)
        b = learn_pcalda(shuffled)
        assert np.allclose(a.eigenvalues, b.eigenvalues, atol=1e-8)
        assert np.allclose(np.abs(a.matrix), np.abs(b.matrix), atol=1e-6)


class TestApplyTransform:
    def setup_method(self):
        self.identity = LinearTransform(np.eye(4), "mmc", np.ones(4))

    def test_zero_sample_zero_template(self):
        assert np.allclose(apply_transform(self.identity, np.zeros(4)), 0.0)

    def test_identity_transform(self):
        x = np.arange(4.0)
        assert np.allclose(apply_transform(self.identity, x), x)

    def test_linearity(self):
        rng = np.random.default_rng(11)
        t = LinearTransform(rng.normal(size=(6, 3)), "mmc", np.ones(3))
        for _ in range(10):
            x, y = rng.normal(size=6), rng.normal(size=6)
            a, b = rng.normal(), rng.normal()
            lhs = apply_transform(t, a * x + b * y)
            rhs = a * apply_transform(t, x) + b * apply_transform(t, y)
            assert np.allclose(lhs, rhs, atol=1e-10)

    def test_dimension_mismatch(self):
        with pytest.raises(DimensionMismatch):
            apply_transform(self.identity, np.zeros(5))


class TestMahalanobis:
    def test_identity_covariance_is_euclidean(self):
        clf = MahalanobisClassifier(cov_pinv=np.eye(2))
        d = mahalanobis_distance(clf, np.array([0.0, 0.0]), np.array([3.0, 4.0]))
        assert d == pytest.approx(5.0)

    def test_zero_for_equal_templates(self):
        clf = MahalanobisClassifier(cov_pinv=np.eye(3))
        x = np.array([1.0, 2.0, 3.0])
        assert mahalanobis_distance(clf, x, x) == 0.0

    def test_diagonal_covariance(self):
        clf = MahalanobisClassifier(cov_pinv=np.linalg.inv(np.diag([4.0, 1.0])))
        d = mahalanobis_distance(clf, np.array([2.0, 1.0]), np.array([0.0, 0.0]))
        assert d == pytest.approx(np.sqrt(2.0))

    def test_dimension_mismatch(self):
        clf = MahalanobisClassifier(cov_pinv=np.eye(2))
        with pytest.raises(DimensionMismatch):
            mahalanobis_distance(clf, np.zeros(3), np.zeros(3))

    def test_ranking_invariant_under_reparameterization(self):
        rng = np.random.default_rng(12)
        templates = rng.normal(size=(30, 4))
        A = rng.normal(size=(4, 4)) + 4 * np.eye(4)
        clf = fit_mahalanobis(templates)
        clf2 = fit_mahalanobis(templates @ A.T)
        probe = rng.normal(size=4)
        d1 = [mahalanobis_distance(clf, probe, g) for g in templates]
        d2 = [mahalanobis_distance(clf2, A @ probe, A @ g) for g in templates]
        assert np.array_equal(np.argsort(d1), np.argsort(d2))
        assert np.allclose(d1, d2, atol=1e-8)
