"""
Numerical checks behind the identifiability argument
====================================================

Four standalone facts make the L2 objective trustworthy: Vandermonde
minor determinants have an exact product form, Vandermonde systems are
bounded away from zero, random directions preserve pairwise gaps up to
1/k^2, and the 1-d norm can be read off in the Fourier domain. The
lemma suite sweeps all of them; the probe at the end watches the norm
of a two-component difference stay above its floor as the means close.
"""
import numpy as np

from gmmgrid import (
    SignedMixture,
    find_separating_direction,
    fourier_norm_check,
    lower_bound_probe,
    run_lemma_suite,
    vandermonde_minor_det,
)

direct, predicted = vandermonde_minor_det([0.3, -0.5, 1.1], removed_row=2)
print(f"minor determinant: direct {direct:.10f}, closed form {predicted:.10f}")

pts = np.random.default_rng(0).uniform(-1, 1, size=(4, 6))
v, ratio = find_separating_direction(pts)
print(f"direction for 4 points in 6-d: worst pairwise ratio {ratio:.4f} (needs > {1/16:.4f})")

q = SignedMixture(np.array([[-0.3], [0.4]]), np.array([0.7, -0.7]), np.array([0.5, 0.5]))
spatial, fourier = fourier_norm_check(q)
print(f"Parseval: spatial {spatial:.10f} vs Fourier {fourier:.10f}")

report = run_lemma_suite(sweep_size=50, seed=0)
counts = {name: body["instances"] for name, body in report.items()
          if isinstance(body, dict) and "instances" in body}
print("\nlemma suite:", "all pass" if report["all_pass"] else "FAILURES", "-", counts)

probe = lower_bound_probe(k=2, t_values=[0.4, 0.2, 0.1, 0.05], alpha_min=0.3, sigma=0.3)
print("\nseparation t vs ||difference||^2 (stays positive, polynomial decay):")
for t, norm in zip(probe.t_values, probe.norms_sq):
    print(f"  t={t:.2f}: {norm:.3e}")
print("fitted log-log slope:", round(probe.fitted_slope, 2))
