"""
The whole pipeline in one call
==============================

run_experiment plants a mixture, samples it, projects to k dimensions,
builds the KDE, grid-searches the parameters, lifts the means back, and
matches them to the truth. Everything is seeded: the same config always
produces byte-identical result.json.
"""
import json
import tempfile
from pathlib import Path

from gmmgrid import ExperimentConfig, run_experiment

config = ExperimentConfig(
    n=6,
    k=2,
    sigma=0.25,
    d_min=0.7,
    weights=(0.4, 0.6),
    n_samples=20_000,
    eps=0.15,
    grid_step=0.15,
    alpha_min=0.3,
    mode="refine",
    rounds=3,
    seed=5,
)
print("config digest:", config.digest())

record = run_experiment(config)
print("sigma used:", record.sigma_star)
print("max mean error:", round(record.match.max_mean_error, 4), " (eps", config.eps, ")")
print("max weight error:", round(record.match.max_weight_error, 4))
print("success:", record.success)
print("stage timings:", {k: round(v, 2) for k, v in record.timings.items()})

out = Path(tempfile.mkdtemp()) / "demo-run"
record.write(out)
print("\nartifacts:", sorted(p.name for p in out.iterdir()))
report = json.loads((out / "report.json").read_text())
print("report schema:", report["schema"], " hausdorff:", round(report["hausdorff"], 4))
