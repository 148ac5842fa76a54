from dataclasses import replace

import numpy as np
import pytest

from gaitbench import (
    extract_geometric_features,
    extract_template,
    get_method,
    normalize_root,
    raw_template,
    resample_linear,
    sample_from_motion,
    template_distance,
)
from gaitbench.errors import DegenerateSample, LayoutMismatch, RepresentationMismatch
from gaitbench.features import RAW_TARGET_FRAMES, Template, method_ids
from gaitbench.features.base import templates_from_csv, templates_to_csv
from gaitbench.features.statistics import local_extremes, signal_stats, skewness
from gaitbench.sample import resample_series
from synthetic import make_walk_motion
from test_dtw import dtw_brute_force

FIXED_TD = {
    "ahmed": 24,
    "ali": 2,
    "andersson": 68,
    "ball": 18,
    "dikovski": 71,
    "preis": 13,
    "sinha": 45,
}


class TestTemplateDimensionality:
    @pytest.mark.parametrize("method_id,expected", sorted(FIXED_TD.items()))
    def test_fixed_length_methods(self, walk_sample, method_id, expected):
        t = extract_geometric_features(method_id, walk_sample)
        assert t.dimension == expected
        assert np.all(np.isfinite(t.values))
        assert len(t.signal_names) == expected

    def test_kwolek_is_660(self, walk_sample):
        assert extract_template("kwolek", walk_sample).dimension == 660

    def test_raw_jc_is_13950(self, walk_sample):
        assert raw_template(walk_sample, "jc").dimension == 13950

    def test_raw_br_flattens_all_rotations(self, walk_sample):
        t = raw_template(walk_sample, "br")
        assert t.dimension == walk_sample.rotations.shape[1] * RAW_TARGET_FRAMES

    def test_bundle_dimensions(self, walk_sample):
        T = walk_sample.num_frames
        assert extract_template("gavrilova", walk_sample).values.shape == (T, 36)
        assert extract_template("jiang", walk_sample).values.shape == (T, 4)
        assert extract_template("krzeszowski", walk_sample).values.shape == (T, 26)
        assert extract_template("sedmidubsky", walk_sample).values.shape == (T, 2)
        assert extract_template("kumar", walk_sample).values.shape == (150, 93)


class TestStatisticsHelpers:
    def test_constant_signal_stats(self):
        m, s, sk, mn, mx = signal_stats(np.full(10, 3.25))
        assert (m, s, sk, mn, mx) == (3.25, 0.0, 0.0, 3.25, 3.25)

    def test_skewness_of_symmetric_data(self):
        x = np.array([-2.0, -1.0, 0.0, 1.0, 2.0])
        assert skewness(x) == pytest.approx(0.0, abs=1e-12)

    def test_local_extremes_of_sine(self):
        t = np.linspace(0, 4 * np.pi, 200)
        maxima, minima = local_extremes(np.sin(t))
        assert maxima.size == 2 and minima.size == 2
        assert np.all(maxima > 0.9) and np.all(minima < -0.9)

    def test_local_extremes_need_three_frames(self):
        with pytest.raises(DegenerateSample):
            local_extremes(np.array([1.0, 2.0]))


class TestResampleLinear:
    def test_identity_when_lengths_match(self, walk_sample):
        again = resample_linear(walk_sample, walk_sample.num_frames)
        assert np.array_equal(again.positions, walk_sample.positions)

    def test_linear_midpoint(self):
        out = resample_series(np.array([[0.0], [10.0]]), 3)
        assert np.allclose(out.ravel(), [0.0, 5.0, 10.0])

    def test_matches_independent_interpolator(self):
        # oracle: numpy's piecewise-linear interpolation on the same grid
        rng = np.random.default_rng(2)
        for _ in range(10):
            T, target = int(rng.integers(2, 40)), int(rng.integers(2, 90))
            sig = rng.normal(size=T)
            ours = resample_series(sig[:, None], target).ravel()
            theirs = np.interp(np.linspace(0, T - 1, target), np.arange(T), sig)
            assert np.allclose(ours, theirs, atol=1e-12)

    def test_duration_preserved(self, walk_sample):
        assert resample_linear(walk_sample, 30).duration_s == walk_sample.duration_s


class TestExtractorBehaviour:
    def test_ahmed_mirror_symmetry(self, walk_sample):
        # left/right mirror (negated X) leaves distance magnitudes alone
        mirrored = replace(
            walk_sample, positions=walk_sample.positions * np.array([-1.0, 1.0, 1.0])
        )
        a = extract_geometric_features("ahmed", walk_sample)
        b = extract_geometric_features("ahmed", mirrored)
        horizontal_means = [i for i, n in enumerate(a.signal_names) if n.endswith("_mean")]
        assert np.allclose(a.values[horizontal_means], b.values[horizontal_means], atol=1e-9)

    def test_features_invariant_to_root_pose(self, skeleton):
        rng = np.random.default_rng(4)
        motion = make_walk_motion(skeleton, n_frames=24, noise=2.0, rng=rng,
                                  with_root_motion=True)
        moved_values = {k: v.copy() for k, v in motion.values.items()}
        moved_values["root"] = moved_values["root"] + rng.normal(0, 10, moved_values["root"].shape)
        moved = replace(motion, values=moved_values)
        for method_id in ("ball", "preis", "sinha"):
            a = extract_geometric_features(
                method_id, sample_from_motion(normalize_root(motion)))
            b = extract_geometric_features(
                method_id, sample_from_motion(normalize_root(moved)))
            assert np.allclose(a.values, b.values, atol=1e-9)

    def test_representation_mismatch(self, walk_sample):
        no_positions = replace(walk_sample, positions=None)
        with pytest.raises(RepresentationMismatch):
            extract_geometric_features("ball", no_positions)
        no_rotations = replace(walk_sample, rotations=None)
        with pytest.raises(RepresentationMismatch):
            extract_template("krzeszowski", no_rotations)

    def test_degenerate_sample(self, walk_sample):
        tiny = resample_linear(walk_sample, 2)
        with pytest.raises(DegenerateSample):
            extract_geometric_features("andersson", tiny)


class TestRawTemplates:
    def test_constant_pose_gives_identical_blocks(self, skeleton):
        motion = make_walk_motion(skeleton, n_frames=7)
        values = {k: np.repeat(v[:1], 7, axis=0) for k, v in motion.values.items()}
        sample = sample_from_motion(replace(motion, values=values))
        t = raw_template(sample, "jc")
        blocks = t.values.reshape(RAW_TARGET_FRAMES, -1)
        assert np.allclose(blocks, blocks[0], atol=1e-9)

    def test_flatten_unflatten_round_trip(self, walk_sample):
        t = raw_template(walk_sample, "jc")
        resampled = resample_linear(walk_sample, RAW_TARGET_FRAMES)
        restored = t.values.reshape(RAW_TARGET_FRAMES, walk_sample.num_joints, 3)
        assert np.array_equal(restored, resampled.positions)


class TestTemplateDistance:
    def test_zero_on_identical_templates(self, walk_sample):
        for method_id in method_ids():
            method = get_method(method_id)
            if method.extractor is None:
                continue
            t = extract_template(method_id, walk_sample)
            assert template_distance(method, t, t) == pytest.approx(0.0, abs=1e-9)

    def test_euclidean_3_4_5(self):
        method = get_method("ball")
        a = Template("ball", np.array([0.0, 0.0]))
        b = Template("ball", np.array([3.0, 4.0]))
        assert template_distance(method, a, b) == pytest.approx(5.0)

    def test_dtw_bundle_matches_per_signal_brute_force(self):
        rng = np.random.default_rng(6)
        method = get_method("jiang")
        a = Template("jiang", rng.normal(size=(5, 4)))
        b = Template("jiang", rng.normal(size=(7, 4)))
        expected = sum(
            dtw_brute_force(a.values[:, s], b.values[:, s]) for s in range(4)
        )
        assert template_distance(method, a, b) == pytest.approx(expected, abs=1e-9)

    def test_symmetry_across_methods(self, small_db):
        x, y = small_db.samples[0], small_db.samples[13]
        for method_id in ("ahmed", "jiang", "kumar", "kwolek"):
            method = get_method(method_id)
            a = extract_template(method_id, x)
            b = extract_template(method_id, y)
            d = template_distance(method, a, b)
            assert d >= 0.0
            assert d == pytest.approx(template_distance(method, b, a), abs=1e-9)

    def test_layout_mismatch(self):
        method = get_method("ball")
        a = Template("ball", np.zeros(3))
        b = Template("ball", np.zeros(4))
        with pytest.raises(LayoutMismatch):
            template_distance(method, a, b)
        with pytest.raises(LayoutMismatch):
            template_distance(method, a, Template("ali", np.zeros(3)))


class TestTemplateCsv:
    def test_round_trip(self, walk_sample):
        templates = [extract_template("ball", walk_sample),
                     extract_template("preis", walk_sample)]
        text = templates_to_csv(templates)
        back = templates_from_csv(text)
        assert [t.method_id for t in back] == ["ball", "preis"]
        assert back[0].label == walk_sample.label
        assert np.allclose(back[0].values, templates[0].values, atol=1e-8)
