import numpy as np
import pytest

from gmmgrid.mixtures import (
    MatchResult,
    SampleMatrix,
    SignedMixture,
    SphericalMixture,
    hausdorff,
    match_components,
    sample,
)

from oracles import brute_force_match, normal_pdf


def two_component(sigma=0.5):
    return SphericalMixture(
        means=np.array([[-1.0, 0.0], [1.0, 0.5]]),
        weights=np.array([0.4, 0.6]),
        sigma=sigma,
    )


class TestSphericalMixture:
    def test_shapes_and_properties(self):
        mix = two_component()
        assert mix.k == 2
        assert mix.dim == 2
        assert mix.min_pairwise_distance() == pytest.approx(np.hypot(2.0, 0.5))

    def test_weights_must_sum_to_one(self):
        with pytest.raises(ValueError, match="weights sum"):
            SphericalMixture(np.zeros((2, 1)), np.array([0.5, 0.6]), 1.0)

    def test_nonpositive_sigma_rejected(self):
        with pytest.raises(ValueError):
            SphericalMixture(np.zeros((1, 1)), np.array([1.0]), 0.0)

    def test_weight_shape_mismatch(self):
        with pytest.raises(ValueError):
            SphericalMixture(np.zeros((3, 2)), np.array([0.5, 0.5]), 1.0)

    def test_pdf_matches_direct_sum(self):
        mix = two_component()
        rng = np.random.default_rng(42)
        x = rng.normal(size=(50, 2))
        d1 = np.linalg.norm(x - mix.means[0], axis=1)
        d2 = np.linalg.norm(x - mix.means[1], axis=1)
        s2 = mix.sigma**2
        expected = (
            0.4 * np.exp(-d1**2 / (2 * s2)) + 0.6 * np.exp(-d2**2 / (2 * s2))
        ) / (2 * np.pi * s2)
        np.testing.assert_allclose(mix.pdf(x), expected, rtol=1e-12)

    def test_pdf_1d_matches_scalar_formula(self):
        mix = SphericalMixture(np.array([[0.3]]), np.array([1.0]), 0.7)
        xs = np.linspace(-3, 3, 11).reshape(-1, 1)
        np.testing.assert_allclose(mix.pdf(xs), normal_pdf(xs[:, 0], 0.3, 0.7), rtol=1e-12)

    def test_dict_round_trip(self):
        mix = two_component()
        again = SphericalMixture.from_dict(mix.to_dict())
        np.testing.assert_array_equal(again.means, mix.means)
        np.testing.assert_array_equal(again.weights, mix.weights)
        assert again.sigma == mix.sigma

    def test_save_load_round_trip(self, tmp_path):
        mix = two_component()
        mix.save(tmp_path / "mix.json")
        again = SphericalMixture.load(tmp_path / "mix.json")
        np.testing.assert_array_equal(again.means, mix.means)

    def test_frozen(self):
        mix = two_component()
        with pytest.raises(Exception):
            mix.sigma = 1.0
        assert not mix.means.flags.writeable

    def test_as_signed_preserves_density(self):
        mix = two_component()
        signed = mix.as_signed()
        x = np.array([[0.2, -0.4], [1.0, 1.0]])
        np.testing.assert_allclose(signed.pdf(x), mix.pdf(x), rtol=1e-12)
        np.testing.assert_array_equal(signed.sigmas, [0.5, 0.5])


class TestSignedMixture:
    def test_subtraction_concatenates_with_negated_weights(self):
        f = two_component().as_signed()
        g = SphericalMixture(np.array([[0.0, 0.0]]), np.array([1.0]), 1.0).as_signed()
        diff = f - g
        assert diff.means.shape == (3, 2)
        np.testing.assert_allclose(diff.weights, [0.4, 0.6, -1.0])
        x = np.array([[0.1, 0.2]])
        np.testing.assert_allclose(diff.pdf(x), f.pdf(x) - g.pdf(x), rtol=1e-12)

    def test_dict_round_trip(self):
        f = SignedMixture(np.array([[1.0], [2.0]]), np.array([0.5, -0.5]), np.array([1.0, 2.0]))
        again = SignedMixture.from_dict(f.to_dict())
        np.testing.assert_array_equal(again.sigmas, f.sigmas)
        np.testing.assert_array_equal(again.weights, f.weights)

    def test_zero_weight_allowed_but_zero_sigma_rejected(self):
        SignedMixture(np.array([[0.0]]), np.array([0.0]), np.array([1.0]))
        with pytest.raises(ValueError):
            SignedMixture(np.array([[0.0]]), np.array([1.0]), np.array([0.0]))


class TestSampling:
    def test_sample_shape_and_determinism(self):
        mix = two_component()
        s1 = sample(mix, 100, seed=7)
        s2 = sample(mix, 100, seed=7)
        assert s1.data.shape == (100, 2)
        np.testing.assert_array_equal(s1.data, s2.data)
        s3 = sample(mix, 100, seed=8)
        assert not np.array_equal(s1.data, s3.data)

    def test_sample_statistics(self):
        # law of large numbers at N=200k: sample mean near the mixture mean
        mix = two_component(sigma=0.3)
        s = sample(mix, 200_000, seed=42)
        expected_mean = mix.weights @ mix.means
        np.testing.assert_allclose(s.data.mean(axis=0), expected_mean, atol=0.01)
        # per-coordinate variance = sigma^2 + weighted mean spread
        spread = mix.weights @ (mix.means - expected_mean) ** 2
        np.testing.assert_allclose(s.data.var(axis=0), 0.09 + spread, atol=0.02)

    def test_component_frequencies(self):
        mix = two_component()
        s = sample(mix, 50_000, seed=1)
        # assign each draw to the nearest mean; sigma is small vs separation
        d1 = np.linalg.norm(s.data - mix.means[0], axis=1)
        d2 = np.linalg.norm(s.data - mix.means[1], axis=1)
        frac = np.mean(d1 < d2)
        assert abs(frac - 0.4) < 0.02


class TestSampleMatrix:
    def test_csv_round_trip(self, tmp_path):
        rng = np.random.default_rng(3)
        m = SampleMatrix(rng.normal(size=(20, 3)), seed=3)
        path = tmp_path / "s.csv"
        m.to_csv(path)
        header = path.read_text().splitlines()[0]
        assert header == "x0,x1,x2"
        again = SampleMatrix.from_csv(path)
        np.testing.assert_allclose(again.data, m.data, rtol=1e-15)

    def test_ndjson_round_trip(self, tmp_path):
        rng = np.random.default_rng(4)
        m = SampleMatrix(rng.normal(size=(5, 2)), seed=4)
        path = tmp_path / "s.ndjson"
        m.to_ndjson(path)
        again = SampleMatrix.from_ndjson(path)
        np.testing.assert_allclose(again.data, m.data, rtol=1e-15)

    def test_single_row_csv(self, tmp_path):
        m = SampleMatrix(np.array([[1.5, -2.5]]))
        m.to_csv(tmp_path / "one.csv")
        again = SampleMatrix.from_csv(tmp_path / "one.csv")
        assert again.data.shape == (1, 2)


class TestHausdorff:
    def test_identical_sets(self):
        pts = np.array([[0.0, 0.0], [1.0, 1.0]])
        assert hausdorff(pts, pts) == 0.0

    def test_known_value(self):
        # {0, 1} vs {0, 3} on the line: farthest mismatch is |1-3| = 2... but
        # 1's nearest in {0,3} is 0 at distance 1, 3's nearest in {0,1} is 1
        # at distance 2, so the max of directed distances is 2.
        a = np.array([[0.0], [1.0]])
        b = np.array([[0.0], [3.0]])
        assert hausdorff(a, b) == pytest.approx(2.0)

    def test_symmetry(self):
        rng = np.random.default_rng(42)
        a, b = rng.normal(size=(4, 3)), rng.normal(size=(6, 3))
        assert hausdorff(a, b) == pytest.approx(hausdorff(b, a))


class TestMatching:
    def test_identity_match(self):
        mix = two_component()
        res = match_components(mix, mix)
        assert res.permutation == (0, 1)
        np.testing.assert_allclose(res.mean_errors, 0.0, atol=1e-15)
        assert res.max_weight_error == 0.0

    def test_swapped_components(self):
        mix = two_component()
        swapped = SphericalMixture(mix.means[::-1], mix.weights[::-1], mix.sigma)
        res = match_components(mix, swapped)
        assert res.permutation == (1, 0)
        np.testing.assert_allclose(res.mean_errors, 0.0, atol=1e-15)

    def test_against_brute_force(self):
        rng = np.random.default_rng(42)
        for k in (2, 3, 4, 5):
            means = rng.normal(size=(k, 3))
            perturbed = means + rng.normal(scale=0.05, size=(k, 3))
            order = rng.permutation(k)
            w = rng.dirichlet(np.ones(k))
            truth = SphericalMixture(means, w, 1.0)
            est = SphericalMixture(perturbed[order], w[order], 1.0)
            res = match_components(truth, est)
            perm, _ = brute_force_match(means, perturbed[order])
            assert res.permutation == perm

    def test_large_k_uses_assignment_solver(self):
        rng = np.random.default_rng(0)
        k = 12
        means = rng.normal(size=(k, 2)) * 5
        order = rng.permutation(k)
        w = np.full(k, 1.0 / k)
        truth = SphericalMixture(means, w, 1.0)
        est = SphericalMixture(means[order], w[order], 1.0)
        res = match_components(truth, est)
        np.testing.assert_allclose(res.mean_errors, 0.0, atol=1e-12)
        assert res.max_mean_error <= 1e-12

    def test_error_reporting(self):
        truth = SphericalMixture(np.array([[0.0], [1.0]]), np.array([0.5, 0.5]), 1.0)
        est = SphericalMixture(np.array([[0.1], [0.8]]), np.array([0.4, 0.6]), 1.0)
        res = match_components(truth, est)
        assert isinstance(res, MatchResult)
        np.testing.assert_allclose(sorted(res.mean_errors), [0.1, 0.2])
        np.testing.assert_allclose(res.weight_errors, [0.1, 0.1])
        assert res.max_mean_error == pytest.approx(0.2)
