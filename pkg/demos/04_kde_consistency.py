"""
Kernel density estimates that the search can score exactly
==========================================================

build_kde places one Gaussian bump per sample, so the estimate is itself
a mixture and the closed-form L2 machinery applies to it directly. The
bandwidth follows h = N^(-(d-1)/(2 d^2)) for d >= 2 (N^(-1/5) in 1-d),
and the estimate converges: distance to the true density drops as N grows.
"""
import numpy as np

from gmmgrid import SphericalMixture, bandwidth_rule, build_kde, l2_distance_sq, sample

for n in (1_000, 10_000, 100_000):
    print(f"N={n:>7}: 1-d bandwidth {bandwidth_rule(n, 1):.4f}   2-d bandwidth {bandwidth_rule(n, 2):.4f}")

truth = SphericalMixture(np.array([[-0.6, 0.0], [0.6, 0.2]]), np.array([0.5, 0.5]), sigma=0.35)
p = truth.as_signed()

print("\ndistance of the KDE to the true density:")
for n in (500, 2_000, 8_000):
    pts = sample(truth, n, seed=n)
    estimate = build_kde(pts.data)
    print(f"  N={n:>5}  h={estimate.bandwidth:.4f}  ||p_kde - p||^2 = {l2_distance_sq(estimate.mixture, p):.6f}")

# a subsampled KDE trades a little accuracy for much cheaper scoring
full = build_kde(sample(truth, 8_000, seed=9).data)
small = full.subsample(1_000, seed=0)
print("\nsubsample 8000 -> 1000 components: ||full - small||^2 =",
      f"{l2_distance_sq(full.mixture, small.mixture):.2e}")
