"""
Estimating the shared component width from 1-d moments
======================================================

Project samples to a line and form the Hankel matrix of Hermite-style
polynomial moments E[g_i(X, tau)]; its determinant, as a function of
tau, first crosses zero exactly at the true sigma. With exact moments
the root is recovered to bisection precision; with sampled moments the
error shrinks with N.
"""
import numpy as np

from gmmgrid import (
    HermiteMomentTable,
    SphericalMixture,
    estimate_variance,
    estimate_variance_from_moments,
    hermite_polynomial,
    sample,
)

print("recurrence table (coefficients of x^i down to x^0):")
for i in range(5):
    print(f"  g_{i}:", hermite_polynomial(i).tolist())

truth = SphericalMixture(np.array([[-1.0], [1.0]]), np.array([0.5, 0.5]), sigma=0.8)

table = HermiteMomentTable.from_mixture(truth, max_order=6)
sigma_exact, diag = estimate_variance_from_moments(table, k=2, tau_max=2.0)
print(f"\nexact moments: sigma* = {sigma_exact:.12f} (true 0.8), bracket width {diag['bracket'][1] - diag['bracket'][0]:.1e}")

for n in (10_000, 100_000, 1_000_000):
    pts = sample(truth, n, seed=n)
    sigma_star, d = estimate_variance(pts, k=2)
    print(f"N={n:>8}: sigma* = {sigma_star:.4f}  (|error| {abs(sigma_star - 0.8):.4f}, degree-{d['dhat_degree']} determinant)")
