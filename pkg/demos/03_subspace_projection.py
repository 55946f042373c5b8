"""
Dimension reduction with the sample SVD
=======================================

Component means of a k-component mixture span (at most) a k-dimensional
subspace. The top-k right-singular basis of the raw sample matrix finds
it: projecting to that basis shrinks a 20-dimensional problem to a
2-dimensional one while keeping the means separated.
"""
import numpy as np

from gmmgrid import SphericalMixture, fit_basis, lift, project, sample

rng = np.random.default_rng(1)
mu1 = rng.normal(size=20)
mu1 /= np.linalg.norm(mu1)
mu2 = -mu1 + 0.1 * rng.normal(size=20)

truth = SphericalMixture(np.stack([mu1, mu2]), np.array([0.5, 0.5]), sigma=0.3)
print("ambient dim:", truth.dim, " true separation:", round(truth.min_pairwise_distance(), 3))

points = sample(truth, 20_000, seed=2)
basis = fit_basis(points.data, k=2)
print("top singular values:", np.round(basis.singular_values[:2], 1))

low = project(points.data, basis)
proj_means = project(truth.means, basis)
print("projected sample shape:", low.shape)
print("separation after projection:", round(float(np.linalg.norm(proj_means[0] - proj_means[1])), 3))

# lifting the projected means back to ambient space lands near the truth
back = lift(proj_means, basis)
print("lift round-trip error per mean:", np.round(np.linalg.norm(back - truth.means, axis=1), 4))
