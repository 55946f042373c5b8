import json

import numpy as np
import pytest

from gmmgrid.experiment import ExperimentConfig, ExperimentRecord, generate_instance, run_experiment


def base_config(**overrides):
    kw = dict(
        n=3,
        k=2,
        sigma=0.25,
        d_min=0.8,
        weights=(0.5, 0.5),
        n_samples=4000,
        eps=0.4,
        grid_step=0.25,
        alpha_min=0.3,
        mode="refine",
        rounds=2,
        seed=7,
    )
    kw.update(overrides)
    return ExperimentConfig(**kw)


@pytest.fixture(scope="module")
def record():
    return run_experiment(base_config())


class TestConfig:
    def test_digest_is_stable_16_hex(self):
        a, b = base_config(), base_config()
        assert a.digest() == b.digest()
        assert len(a.digest()) == 16
        int(a.digest(), 16)

    def test_digest_tracks_every_field(self):
        assert base_config().digest() != base_config(seed=8).digest()
        assert base_config().digest() != base_config(grid_step=0.2).digest()

    def test_to_dict_weights(self):
        assert base_config().to_dict()["weights"] == [0.5, 0.5]
        assert base_config(weights=None).to_dict()["weights"] is None

    def test_epsilon_bounds(self):
        with pytest.raises(ValueError, match="d_min / 2"):
            base_config(eps=0.41)
        with pytest.raises(ValueError, match="d_min / 2"):
            base_config(eps=0.0)

    def test_alpha_min_bounds(self):
        with pytest.raises(ValueError, match="alpha_min"):
            base_config(alpha_min=0.6)

    def test_weight_validation(self):
        with pytest.raises(ValueError, match="length"):
            base_config(weights=(1.0,))
        with pytest.raises(ValueError, match="sum"):
            base_config(weights=(0.5, 0.6))
        with pytest.raises(ValueError, match="alpha_min"):
            base_config(weights=(0.29, 0.71))

    def test_mode_and_sigma_mode(self):
        with pytest.raises(ValueError, match="sigma_mode"):
            base_config(sigma_mode="guess")
        with pytest.raises(ValueError, match="mode"):
            base_config(mode="fast")

    def test_positivity(self):
        with pytest.raises(ValueError):
            base_config(sigma=0.0)
        with pytest.raises(ValueError):
            base_config(n=0)
        with pytest.raises(ValueError):
            base_config(kde_components=0)


class TestGenerateInstance:
    def test_separation_and_box(self):
        cfg = base_config(k=3, weights=None, alpha_min=0.2, d_min=0.5, eps=0.25)
        for seed in range(5):
            mix = generate_instance(cfg, np.random.SeedSequence(seed))
            diffs = mix.means[:, None, :] - mix.means[None, :, :]
            dists = np.sqrt((diffs**2).sum(axis=2))
            np.fill_diagonal(dists, np.inf)
            assert dists.min() >= 0.5
            assert np.all(np.abs(mix.means) <= 1.0)

    def test_pinned_weights_pass_through(self):
        mix = generate_instance(base_config(weights=(0.4, 0.6), alpha_min=0.3))
        np.testing.assert_array_equal(mix.weights, [0.4, 0.6])

    def test_drawn_weights_respect_floor(self):
        cfg = base_config(weights=None, alpha_min=0.35)
        for seed in range(5):
            mix = generate_instance(cfg, np.random.SeedSequence(seed))
            assert mix.weights.min() >= 0.35
            assert mix.weights.sum() == pytest.approx(1.0, abs=1e-12)

    def test_k1_trivial(self):
        mix = generate_instance(base_config(k=1, weights=None, alpha_min=1.0))
        assert mix.means.shape == (1, 3)
        np.testing.assert_array_equal(mix.weights, [1.0])

    def test_deterministic(self):
        a = generate_instance(base_config(weights=None))
        b = generate_instance(base_config(weights=None))
        np.testing.assert_array_equal(a.means, b.means)
        np.testing.assert_array_equal(a.weights, b.weights)

    def test_infeasible_separation_fails_loudly(self):
        cfg = base_config(n=1, k=2, d_min=2.5, eps=1.0)
        with pytest.raises(RuntimeError, match="too large"):
            generate_instance(cfg)

    def test_infeasible_weight_floor_fails_loudly(self):
        cfg = base_config(weights=None, alpha_min=0.5)
        with pytest.raises(RuntimeError, match="alpha_min"):
            generate_instance(cfg)


class TestRunExperiment:
    def test_recovers_within_eps(self, record):
        assert record.success
        assert record.match.max_mean_error <= 0.4
        assert record.match.max_weight_error <= 0.4

    def test_estimate_lives_in_ambient_space(self, record):
        assert record.estimate.means.shape == (2, 3)
        assert record.truth.means.shape == (2, 3)

    def test_known_sigma_passes_through(self, record):
        assert record.sigma_star == 0.25

    def test_timings_cover_stages(self, record):
        assert set(record.timings) == {"generate", "sample", "project", "sigma", "kde", "search"}
        assert all(v >= 0 for v in record.timings.values())

    def test_result_dict_contents(self, record):
        d = record.result_dict()
        assert d["config_digest"] == record.config.digest()
        assert d["success"] is True
        assert sorted(d["match"]["permutation"]) == [0, 1]
        assert d["hausdorff"] >= 0
        assert "timings_sec" not in d
        assert "sigma_error" not in d

    def test_report_adds_schema_and_timings(self, record):
        r = record.report_dict()
        assert r["schema"] == "gmmgrid/1"
        assert set(r["timings_sec"]) == set(record.timings)
        assert "kde_note" not in r


class TestArtifacts:
    def test_write_produces_all_files(self, record, tmp_path):
        record.write(tmp_path / "run")
        names = sorted(p.name for p in (tmp_path / "run").iterdir())
        assert names == ["basis.json", "mixture.json", "report.json", "result.json", "samples.csv"]
        result = json.loads((tmp_path / "run" / "result.json").read_text())
        assert result["config"]["seed"] == 7
        header = (tmp_path / "run" / "samples.csv").read_text().splitlines()[0]
        assert header == "x0,x1,x2"

    def test_rerun_result_is_byte_identical(self, record, tmp_path):
        again = run_experiment(base_config())
        record.write(tmp_path / "a")
        again.write(tmp_path / "b")
        assert (tmp_path / "a" / "result.json").read_bytes() == (tmp_path / "b" / "result.json").read_bytes()
        ra = json.loads((tmp_path / "a" / "report.json").read_text())
        rb = json.loads((tmp_path / "b" / "report.json").read_text())
        ra.pop("timings_sec"), rb.pop("timings_sec")
        assert ra == rb


class TestVariants:
    def test_subsampled_kde_notes_the_approximation(self):
        rec = run_experiment(base_config(kde_components=1000))
        report = rec.report_dict()
        assert "subsample" in report["kde_note"]
        assert rec.success

    def test_estimated_sigma_reports_its_error(self):
        rec = run_experiment(
            base_config(k=1, weights=None, alpha_min=1.0, sigma=0.3, n_samples=6000, grid_step=0.2)
        )
        d = rec.result_dict()
        assert rec.config.sigma_mode == "known"
        rec2 = run_experiment(
            base_config(
                k=1, weights=None, alpha_min=1.0, sigma=0.3, n_samples=6000,
                grid_step=0.2, sigma_mode="estimate",
            )
        )
        d2 = rec2.result_dict()
        assert "sigma_error" in d2
        assert d2["sigma_error"] == pytest.approx(abs(rec2.sigma_star - 0.3), abs=1e-15)
        assert "sigma_error" not in d

    def test_tight_eps_flips_success_only(self):
        rec = run_experiment(base_config(eps=0.001, d_min=0.8))
        assert rec.success is False
        assert rec.result_dict()["success"] is False
