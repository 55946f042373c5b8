"""End-to-end recovery experiment.

One run: draw a planted mixture, sample it, estimate the component sigma
if asked, project the sample to the top-k singular subspace, build a KDE
in the projection, grid-search the mixture parameters closest to the KDE
in L2, lift the found means back, and score them against the plant.
"""

from __future__ import annotations

import hashlib
import json
import time
from dataclasses import asdict, dataclass
from pathlib import Path

import numpy as np

from . import gridsearch, kde, l2, projection, variance
from .mixtures import (
    MatchResult,
    SampleMatrix,
    SphericalMixture,
    hausdorff,
    match_components,
    sample,
)

__all__ = [
    "ExperimentConfig",
    "ExperimentRecord",
    "generate_instance",
    "run_experiment",
]

REPORT_SCHEMA = "gmmgrid/1"
_REJECTION_BUDGET = 10**5


@dataclass(frozen=True)
class ExperimentConfig:
    """Everything a run depends on, hashable for reproducibility checks.

    sigma_mode is "known" (use the planted sigma) or "estimate" (Hankel
    determinant root on a projected coordinate). weights pins the mixing
    weights; None draws them uniformly on the simplex, redrawing until the
    smallest is at least alpha_min. kde_components, when set, evaluates the
    search against a uniformly subsampled KDE of that many components; the
    objective is then an approximation and the report says so.
    """

    n: int
    k: int
    sigma: float
    d_min: float
    weights: tuple | None
    n_samples: int
    eps: float
    grid_step: float
    alpha_min: float
    mode: str = "refine"
    rounds: int = 3
    budget: int = gridsearch.DEFAULT_BUDGET
    sigma_mode: str = "known"
    kde_components: int | None = None
    seed: int = 0

    def __post_init__(self):
        if self.n < 1 or self.k < 1 or self.n_samples < 1:
            raise ValueError("n, k, n_samples must be positive")
        if not self.sigma > 0:
            raise ValueError("sigma must be positive")
        if not 0 < self.eps <= self.d_min / 2.0:
            raise ValueError("epsilon must be positive and at most d_min / 2")
        if not 0 < self.alpha_min * self.k <= 1.0:
            raise ValueError("alpha_min * k must lie in (0, 1]")
        if self.weights is not None:
            if len(self.weights) != self.k:
                raise ValueError(f"weights must have length {self.k}")
            if abs(sum(self.weights) - 1.0) > 1e-9 or min(self.weights) <= 0:
                raise ValueError("weights must be positive and sum to 1")
            if min(self.weights) < self.alpha_min:
                raise ValueError("every weight must be at least alpha_min")
        if self.sigma_mode not in ("known", "estimate"):
            raise ValueError("sigma_mode must be 'known' or 'estimate'")
        if self.mode not in ("faithful", "refine"):
            raise ValueError("mode must be 'faithful' or 'refine'")
        if self.kde_components is not None and self.kde_components < 1:
            raise ValueError("kde_components must be positive")

    def to_dict(self) -> dict:
        d = asdict(self)
        d["weights"] = None if self.weights is None else list(self.weights)
        return d

    def digest(self) -> str:
        return hashlib.sha256(
            json.dumps(self.to_dict(), sort_keys=True).encode()
        ).hexdigest()[:16]


def generate_instance(config: ExperimentConfig, seed_seq: np.random.SeedSequence | None = None) -> SphericalMixture:
    """Planted mixture: means drawn uniformly from [-1, 1]^n, redrawn until
    every pair is at least d_min apart; weights taken from the config or
    drawn uniformly on the simplex, redrawn until min >= alpha_min.
    Rejection is budgeted; an infeasible d_min fails loudly instead of
    spinning."""
    if seed_seq is None:
        seed_seq = np.random.SeedSequence(config.seed)
    rng = np.random.default_rng(seed_seq)
    for _ in range(_REJECTION_BUDGET):
        means = rng.uniform(-1.0, 1.0, size=(config.k, config.n))
        if config.k == 1:
            break
        diffs = means[:, None, :] - means[None, :, :]
        dists = np.sqrt((diffs**2).sum(axis=2))
        np.fill_diagonal(dists, np.inf)
        if dists.min() >= config.d_min:
            break
    else:
        raise RuntimeError(
            f"no mean placement with pairwise distance >= {config.d_min} "
            f"found in {_REJECTION_BUDGET} draws; d_min is too large for the box"
        )
    if config.weights is not None:
        weights = np.asarray(config.weights, dtype=float)
    elif config.k == 1:
        weights = np.array([1.0])
    else:
        for _ in range(_REJECTION_BUDGET):
            weights = rng.dirichlet(np.ones(config.k))
            if weights.min() >= config.alpha_min:
                break
        else:
            raise RuntimeError(
                f"no simplex draw with min weight >= {config.alpha_min} "
                f"found in {_REJECTION_BUDGET} draws; alpha_min is too large for k={config.k}"
            )
    return SphericalMixture(
        means=means,
        weights=weights,
        sigma=config.sigma,
        alpha_min=config.alpha_min,
        d_min=config.d_min,
    )


@dataclass(frozen=True)
class ExperimentRecord:
    """Everything a finished run produced, plus wall-clock timings.

    result_dict is the deterministic payload (identical bytes for identical
    config); timings live only in the report.
    """

    config: ExperimentConfig
    truth: SphericalMixture
    estimate: SphericalMixture
    match: MatchResult
    search: gridsearch.SearchResult
    sigma_star: float
    basis: projection.ProjectionBasis
    samples: SampleMatrix
    timings: dict

    @property
    def success(self) -> bool:
        return (
            self.match.max_mean_error <= self.config.eps
            and self.match.max_weight_error <= self.config.eps
        )

    def result_dict(self) -> dict:
        d = {
            "config": self.config.to_dict(),
            "config_digest": self.config.digest(),
            "sigma_star": float(self.sigma_star),
            "search": self.search.to_dict(),
            "estimate": self.estimate.to_dict(),
            "truth": self.truth.to_dict(),
            "match": {
                "permutation": list(self.match.permutation),
                "mean_errors": [float(e) for e in self.match.mean_errors],
                "weight_errors": [float(e) for e in self.match.weight_errors],
                "max_mean_error": float(self.match.max_mean_error),
                "max_weight_error": float(self.match.max_weight_error),
            },
            "hausdorff": float(hausdorff(self.truth.means, self.estimate.means)),
            "success": self.success,
        }
        if self.config.sigma_mode == "estimate":
            d["sigma_error"] = float(abs(self.sigma_star - self.config.sigma))
        return d

    def report_dict(self) -> dict:
        d = {
            "schema": REPORT_SCHEMA,
            **self.result_dict(),
            "timings_sec": {k: float(v) for k, v in self.timings.items()},
        }
        if self.config.kde_components is not None:
            d["kde_note"] = (
                f"objective evaluated against a {self.config.kde_components}-component "
                "uniform subsample of the KDE; values are approximations"
            )
        return d

    def write(self, out_dir: str | Path) -> None:
        out = Path(out_dir)
        out.mkdir(parents=True, exist_ok=True)
        self.samples.to_csv(out / "samples.csv")
        self.truth.save(out / "mixture.json")
        self.basis.save(out / "basis.json")
        (out / "result.json").write_text(
            json.dumps(self.result_dict(), indent=2, sort_keys=True) + "\n"
        )
        (out / "report.json").write_text(
            json.dumps(self.report_dict(), indent=2, sort_keys=True) + "\n"
        )


def run_experiment(config: ExperimentConfig, threads: int | None = None, full_trace: bool = False) -> ExperimentRecord:
    root = np.random.SeedSequence(config.seed)
    seq_instance, seq_sample, seq_subsample = root.spawn(3)
    timings: dict[str, float] = {}

    t0 = time.perf_counter()
    truth = generate_instance(config, seq_instance)
    timings["generate"] = time.perf_counter() - t0

    t0 = time.perf_counter()
    samples = sample(truth, config.n_samples, seq_sample)
    timings["sample"] = time.perf_counter() - t0

    t0 = time.perf_counter()
    basis = projection.fit_basis(samples.data, config.k)
    projected = projection.project(samples.data, basis)
    timings["project"] = time.perf_counter() - t0

    t0 = time.perf_counter()
    if config.sigma_mode == "estimate":
        sigma_star, _ = variance.estimate_variance(projected, config.k)
    else:
        sigma_star = config.sigma
    timings["sigma"] = time.perf_counter() - t0

    t0 = time.perf_counter()
    p_kde = kde.build_kde(projected)
    if config.kde_components is not None and config.kde_components < config.n_samples:
        p_kde = p_kde.subsample(config.kde_components, seq_subsample)
    timings["kde"] = time.perf_counter() - t0

    t0 = time.perf_counter()
    grid = gridsearch.ParameterGrid.for_problem(
        config.n, config.k, config.grid_step, config.alpha_min, config.mode
    )
    result = gridsearch.search(
        p_kde,
        grid,
        sigma_star,
        rounds=config.rounds,
        budget=config.budget,
        threads=threads,
        full_trace=full_trace,
    )
    timings["search"] = time.perf_counter() - t0

    lifted = projection.lift(result.means, basis)
    estimate = SphericalMixture(means=lifted, weights=result.weights, sigma=sigma_star)
    match = match_components(truth, estimate)
    return ExperimentRecord(
        config=config,
        truth=truth,
        estimate=estimate,
        match=match,
        search=result,
        sigma_star=sigma_star,
        basis=basis,
        samples=samples,
        timings=timings,
    )
