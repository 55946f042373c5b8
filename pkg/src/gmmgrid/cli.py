"""Command line driver.

Each pipeline stage is a subcommand reading and writing plain files, so a
run can be reproduced or resumed piecewise: generate, sample, project,
kde, estimate-variance, search, run (the full pipeline), verify-lemmas.
"""

from __future__ import annotations

import argparse
import json
import logging
import sys
from pathlib import Path

import numpy as np

from . import experiment, gridsearch, identities, kde, projection, variance
from .mixtures import SampleMatrix, SphericalMixture, sample as draw_samples

__all__ = ["main", "build_parser"]

logger = logging.getLogger(__name__)


def _parse_weights(text: str | None):
    if text is None:
        return None
    return tuple(float(v) for v in text.split(","))


def _parse_sigma(text: str):
    """--sigma known:<value> or --sigma estimate."""
    if text == "estimate":
        return "estimate", None
    if text.startswith("known:"):
        return "known", float(text.split(":", 1)[1])
    raise argparse.ArgumentTypeError("--sigma must be 'known:<value>' or 'estimate'")


def _write_json(path: str | None, payload: dict) -> None:
    text = json.dumps(payload, indent=2, sort_keys=True) + "\n"
    if path:
        Path(path).write_text(text)
    else:
        sys.stdout.write(text)


def _load_samples(path: str) -> SampleMatrix:
    if path.endswith(".ndjson"):
        return SampleMatrix.from_ndjson(path)
    return SampleMatrix.from_csv(path)


def _cmd_generate(args) -> int:
    config = experiment.ExperimentConfig(
        n=args.n,
        k=args.k,
        sigma=args.sigma,
        d_min=args.d_min,
        weights=_parse_weights(args.weights),
        n_samples=1,
        eps=args.d_min / 2.0,
        grid_step=0.1,
        alpha_min=args.alpha_min,
        seed=args.seed,
    )
    mix = experiment.generate_instance(config)
    mix.save(args.out)
    logger.info("wrote %s (k=%d, dim=%d, d_min=%.3g)", args.out, mix.k, mix.dim, mix.min_pairwise_distance())
    return 0


def _cmd_sample(args) -> int:
    mix = SphericalMixture.load(args.mixture)
    samples = draw_samples(mix, args.n_samples, args.seed)
    if args.out.endswith(".ndjson"):
        samples.to_ndjson(args.out)
    else:
        samples.to_csv(args.out)
    logger.info("wrote %s (%d points in dim %d)", args.out, args.n_samples, mix.dim)
    return 0


def _cmd_project(args) -> int:
    samples = _load_samples(args.input)
    basis = projection.fit_basis(samples.data, args.k)
    if args.basis_out:
        basis.save(args.basis_out)
    coords = projection.project(samples.data, basis)
    SampleMatrix(coords).to_csv(args.out)
    logger.info(
        "wrote %s (%d points projected to dim %d, singular values %s)",
        args.out, coords.shape[0], args.k, np.array2string(basis.singular_values, precision=4),
    )
    return 0


def _cmd_kde(args) -> int:
    samples = _load_samples(args.input)
    estimate = kde.build_kde(samples.data, args.bandwidth)
    if args.subsample and args.subsample < estimate.source_n:
        estimate = estimate.subsample(args.subsample, args.seed)
    estimate.save(args.out)
    logger.info("wrote %s (%d components, bandwidth %.5g)", args.out, estimate.mixture.means.shape[0], estimate.bandwidth)
    return 0


def _cmd_estimate_variance(args) -> int:
    samples = _load_samples(args.input)
    data = samples.data
    rng = np.random.default_rng(args.seed)
    if args.direction == "e1":
        directions = [None]
    else:
        raw = rng.standard_normal((args.directions, data.shape[1]))
        directions = [v / np.linalg.norm(v) for v in raw]
    sigmas, last_diag = [], {}
    for v in directions:
        sigma_star, diag = variance.estimate_variance(data, args.k, direction=v, tau_max=args.tau_max)
        sigmas.append(sigma_star)
        last_diag = diag
    payload = {
        "sigma_star": float(np.mean(sigmas)),
        "bracket": [float(last_diag["bracket"][0]), float(last_diag["bracket"][1])],
        "dhat_degree": int(last_diag["dhat_degree"]),
        "n_used": int(last_diag["n_used"]),
    }
    if len(sigmas) > 1:
        payload["per_direction"] = [float(s) for s in sigmas]
    _write_json(args.out, payload)
    return 0


def _cmd_search(args) -> int:
    sigma_mode, sigma_value = args.sigma
    if args.kde:
        p_kde = kde.KdeEstimate.load(args.kde)
    elif args.input:
        p_kde = kde.build_kde(_load_samples(args.input).data)
    else:
        raise SystemExit("search needs --kde or --input")
    if sigma_mode == "estimate":
        if not args.input:
            raise SystemExit("--sigma estimate needs --input samples")
        sigma_value, _ = variance.estimate_variance(_load_samples(args.input).data, args.k)
    grid = gridsearch.ParameterGrid.for_problem(
        args.n, args.k, args.grid_step, args.alpha_min, args.mode
    )
    result = gridsearch.search(
        p_kde, grid, sigma_value,
        rounds=args.rounds, budget=args.budget,
        threads=args.threads, full_trace=args.trace,
    )
    payload = result.to_dict()
    payload["sigma"] = float(sigma_value)
    _write_json(args.out, payload)
    return 0


def _cmd_run(args) -> int:
    raw = json.loads(Path(args.config).read_text())
    weights = raw.get("weights")
    config = experiment.ExperimentConfig(
        n=raw["n"],
        k=raw["k"],
        sigma=raw["sigma"],
        d_min=raw["d_min"],
        weights=None if weights is None else tuple(weights),
        n_samples=raw["n_samples"],
        eps=raw["eps"],
        grid_step=raw["grid_step"],
        alpha_min=raw["alpha_min"],
        mode=raw.get("mode", "refine"),
        rounds=raw.get("rounds", 3),
        budget=raw.get("budget", gridsearch.DEFAULT_BUDGET),
        sigma_mode=raw.get("sigma_mode", "known"),
        kde_components=raw.get("kde_components"),
        seed=raw.get("seed", 0),
    )
    record = experiment.run_experiment(config, threads=args.threads, full_trace=args.trace)
    out_dir = Path(args.out or f"run-{config.digest()}")
    record.write(out_dir)
    if args.plots:
        _emit_plots(record, out_dir)
    logger.info(
        "max mean error %.4g, max weight error %.4g (eps %.4g) -> %s",
        record.match.max_mean_error,
        record.match.max_weight_error,
        config.eps,
        "success" if record.success else "accuracy miss",
    )
    logger.info("artifacts in %s", out_dir)
    return 0 if record.success else 2


def _cmd_verify_lemmas(args) -> int:
    report = identities.run_lemma_suite(sweep_size=args.sweep_size, seed=args.seed)
    _write_json(args.out, report)
    return 0 if report["all_pass"] else 2


def _emit_plots(record, out_dir: Path) -> None:
    try:
        import matplotlib
    except ImportError:
        logger.warning("matplotlib is not installed; skipping plots (pip install gmmgrid[plots])")
        return
    matplotlib.use("svg")
    import matplotlib.pyplot as plt

    coords = projection.project(record.samples.data, record.basis)
    est_proj = projection.project(record.estimate.means, record.basis)
    true_proj = projection.project(record.truth.means, record.basis)
    fig, ax = plt.subplots(figsize=(6, 4.5))
    if coords.shape[1] == 1:
        xs = np.linspace(coords.min() - 1, coords.max() + 1, 400).reshape(-1, 1)
        h = kde.bandwidth_rule(coords.shape[0], 1)
        ax.plot(xs[:, 0], kde.build_kde(coords, h).pdf(xs), label="kde")
        proj_mix = SphericalMixture(est_proj, record.estimate.weights, record.sigma_star)
        ax.plot(xs[:, 0], proj_mix.pdf(xs), label="estimate")
        ax.set_xlabel("projected coordinate")
    else:
        sub = coords[:: max(1, coords.shape[0] // 2000)]
        ax.scatter(sub[:, 0], sub[:, 1], s=3, alpha=0.3, label="samples")
        ax.scatter(true_proj[:, 0], true_proj[:, 1], marker="x", s=80, label="true means")
        ax.scatter(est_proj[:, 0], est_proj[:, 1], marker="+", s=80, label="estimated means")
        ax.set_xlabel("component 1")
        ax.set_ylabel("component 2")
    ax.legend()
    fig.tight_layout()
    fig.savefig(out_dir / "density.svg")
    plt.close(fig)

    rounds = record.search.rounds
    if len(rounds) > 1:
        fig, ax = plt.subplots(figsize=(6, 4.5))
        ax.plot([r["round"] for r in rounds], [r["objective"] for r in rounds], marker="o")
        ax.set_xlabel("refine round")
        ax.set_ylabel("objective")
        ax.set_yscale("log")
        fig.tight_layout()
        fig.savefig(out_dir / "objective.svg")
        plt.close(fig)


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="gmmgrid",
        description="Learn spherical Gaussian mixture parameters by projected KDE grid search.",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("generate", help="draw a planted mixture instance")
    p.add_argument("--n", type=int, required=True, help="ambient dimension")
    p.add_argument("--k", type=int, required=True, help="number of components")
    p.add_argument("--sigma", type=float, required=True)
    p.add_argument("--d-min", type=float, required=True, help="minimum pairwise mean distance")
    p.add_argument("--alpha-min", type=float, required=True, help="lower bound on mixing weights")
    p.add_argument("--weights", help="comma separated, e.g. 0.4,0.6; omitted draws from the simplex")
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--out", required=True)
    p.set_defaults(func=_cmd_generate)

    p = sub.add_parser("sample", help="draw samples from a mixture file")
    p.add_argument("--mixture", required=True)
    p.add_argument("--n-samples", type=int, required=True)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--out", required=True, help=".csv or .ndjson")
    p.set_defaults(func=_cmd_sample)

    p = sub.add_parser("project", help="fit the top-k singular basis and project samples")
    p.add_argument("--input", required=True)
    p.add_argument("--k", type=int, required=True)
    p.add_argument("--basis-out")
    p.add_argument("--out", required=True)
    p.set_defaults(func=_cmd_project)

    p = sub.add_parser("kde", help="build a kernel density estimate from samples")
    p.add_argument("--input", required=True)
    p.add_argument("--bandwidth", type=float, help="override the N^(-(d-1)/(2d^2)) rule")
    p.add_argument("--subsample", type=int, help="keep M uniformly chosen components (approximation)")
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--out", required=True)
    p.set_defaults(func=_cmd_kde)

    p = sub.add_parser("estimate-variance", help="estimate the shared sigma from 1-d moments")
    p.add_argument("--k", type=int, required=True)
    p.add_argument("--input", required=True)
    p.add_argument("--direction", choices=["random", "e1"], default="e1")
    p.add_argument("--directions", type=int, default=1, help="random directions to average over")
    p.add_argument("--tau-max", type=float)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--out")
    p.set_defaults(func=_cmd_estimate_variance)

    p = sub.add_parser("search", help="grid-search mixture parameters against a KDE")
    p.add_argument("--kde", help="KDE file from the kde subcommand")
    p.add_argument("--input", help="samples file; used to build the KDE or estimate sigma")
    p.add_argument("--n", type=int, required=True, help="ambient dimension (sets the mean box)")
    p.add_argument("--k", type=int, required=True)
    p.add_argument("--sigma", required=True, type=_parse_sigma, help="known:<value> or estimate")
    p.add_argument("--grid-step", type=float, default=0.1)
    p.add_argument("--mode", choices=["faithful", "refine"], default="refine")
    p.add_argument("--rounds", type=int, default=3)
    p.add_argument("--budget", type=int, default=gridsearch.DEFAULT_BUDGET)
    p.add_argument("--alpha-min", type=float, default=0.1)
    p.add_argument("--threads", type=int)
    p.add_argument("--trace", action="store_true", help="include per-point objectives when small enough")
    p.add_argument("--out")
    p.set_defaults(func=_cmd_search)

    p = sub.add_parser("run", help="full pipeline from a config file")
    p.add_argument("--config", required=True)
    p.add_argument("--out", help="artifact directory; defaults to run-<config digest>")
    p.add_argument("--trace", action="store_true")
    p.add_argument("--plots", action="store_true", help="emit SVG overlays (needs matplotlib)")
    p.add_argument("--threads", type=int)
    p.set_defaults(func=_cmd_run)

    p = sub.add_parser("verify-lemmas", help="run the numerical lemma checks")
    p.add_argument("--sweep-size", type=int, default=100)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--out")
    p.set_defaults(func=_cmd_verify_lemmas)

    return parser


def main(argv=None) -> int:
    logging.basicConfig(level=logging.INFO, format="%(message)s", stream=sys.stderr)
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except (ValueError, RuntimeError, OSError, KeyError) as exc:
        logger.error("error: %s", exc)
        return 1


if __name__ == "__main__":
    sys.exit(main())
