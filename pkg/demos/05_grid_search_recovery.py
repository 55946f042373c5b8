"""
Coarse-to-fine grid search against a KDE
========================================

The estimator is an argmin: score every lattice point (means on a box
grid, weights on a simplex lattice) by its closed-form L2 distance to
the KDE, then shrink the box around the incumbent and halve the step.
Three rounds take the step from 0.2 to 0.05 here.
"""
import numpy as np

from gmmgrid import (
    ParameterGrid,
    SphericalMixture,
    build_kde,
    match_components,
    sample,
    search,
    theoretical_grid_size,
)

truth = SphericalMixture(np.array([[-0.6, 0.1], [0.5, -0.3]]), np.array([0.4, 0.6]), sigma=0.3)
points = sample(truth, 20_000, seed=4)
p_kde = build_kde(points.data)

grid = ParameterGrid.for_problem(n=2, k=2, step=0.2, alpha_min=0.2, mode="refine")
print("round-1 lattice size:", grid.point_count(), "points")

result = search(p_kde, grid, sigma=0.3, rounds=3)
for r in result.rounds:
    print(f"  round {r['round']}: step {r['step']:.3g}, {r['evaluations']} evaluations, objective {r['objective']:.6f}")

estimate = SphericalMixture(result.means, result.weights, 0.3)
match = match_components(truth, estimate)
print("estimated means (in matched order):\n", np.round(result.means[list(match.permutation)], 3))
print("true means:\n", truth.means)
print("max mean error:", round(match.max_mean_error, 4), " max weight error:", round(match.max_weight_error, 4))

# the formula-level grid size shows why a literal epsilon-net is hopeless
print("\nformula-level grid size for n=2, k=2, eps=0.1:",
      theoretical_grid_size(n=2, k=2, eps=0.1, alpha_min=0.3, sigma=0.3))
