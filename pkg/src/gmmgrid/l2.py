"""Exact L2 geometry for signed Gaussian mixtures.

The inner product of two spherical Gaussian densities has a closed form, so
norms and distances of mixtures reduce to small quadratic forms over Gram
matrices. That closed form is the production path everywhere; trapezoidal
quadrature survives only as a slow oracle for dim <= 3.
"""

from __future__ import annotations

import numpy as np
from scipy.spatial.distance import cdist

from .mixtures import SignedMixture

__all__ = [
    "gaussian_inner",
    "gram_matrix",
    "l2_distance_sq",
    "l2_norm_sq",
    "quadrature_l2_distance_sq",
    "project_to_direction",
    "pair_sum_uniform",
    "self_pair_sum_uniform",
    "cross_inner_uniform",
]

# Gram matrices of near-duplicate means are numerically rank-deficient; a
# quadratic form may come out a hair negative. Anything above this is a bug.
_NEGATIVE_TOL = 1e-10

# Component counts above this skip the dense Gram matrix and accumulate the
# quadratic form in blocks (a KDE target has one component per sample).
_DENSE_LIMIT = 4000

_BLOCK_ENTRIES = 25_000_000

_trapezoid = getattr(np, "trapezoid", None) or np.trapz


def gaussian_inner(mean_a, sigma_a: float, mean_b, sigma_b: float) -> float:
    """Integral of the product of two spherical Gaussian densities.

    Equals ``(2 pi (sa^2 + sb^2))^(-dim/2) * exp(-||a-b||^2 / (2 (sa^2 + sb^2)))``,
    which is the density of N(0, (sa^2+sb^2) I) evaluated at a - b.
    """
    a = np.atleast_1d(np.asarray(mean_a, dtype=float))
    b = np.atleast_1d(np.asarray(mean_b, dtype=float))
    if a.shape != b.shape:
        raise ValueError(f"dimension mismatch: {a.shape} vs {b.shape}")
    if not (sigma_a > 0 and sigma_b > 0):
        raise ValueError("sigmas must be positive")
    var = sigma_a**2 + sigma_b**2
    d2 = float(((a - b) ** 2).sum())
    return (2.0 * np.pi * var) ** (-a.size / 2.0) * np.exp(-d2 / (2.0 * var))


def gram_matrix(means, sigmas) -> np.ndarray:
    """Pairwise gaussian_inner matrix for a list of components.

    Symmetric and positive semidefinite up to roundoff (eigenvalues above
    -1e-10 relative); the diagonal holds each component's self inner
    product (4 pi sigma^2)^(-dim/2).
    """
    means = np.atleast_2d(np.asarray(means, dtype=float))
    sigmas = np.atleast_1d(np.asarray(sigmas, dtype=float))
    var = sigmas[:, None] ** 2 + sigmas[None, :] ** 2
    d2 = cdist(means, means, "sqeuclidean")
    dim = means.shape[1]
    return (2.0 * np.pi * var) ** (-dim / 2.0) * np.exp(-d2 / (2.0 * var))


def _combined(f: SignedMixture, g: SignedMixture | None):
    if g is None:
        return f.means, f.weights, f.sigmas
    if f.dim != g.dim:
        raise ValueError("dimension mismatch")
    diff = f - g
    return diff.means, diff.weights, diff.sigmas


def pair_sum_uniform(means_a, weights_a, means_b, weights_b, var: float) -> float:
    """w_a^T G w_b for a Gram block with one shared variance sum.

    G[i, j] = (2 pi var)^(-dim/2) exp(-||a_i - b_j||^2 / (2 var)), evaluated
    in blocks so the full matrix never materializes.
    """
    a = np.atleast_2d(np.asarray(means_a, dtype=float))
    b = np.atleast_2d(np.asarray(means_b, dtype=float))
    dim = a.shape[1]
    scale = (2.0 * np.pi * var) ** (-dim / 2.0)
    inv = -0.5 / var
    bn = (b * b).sum(axis=1)
    block = max(1, _BLOCK_ENTRIES // max(1, b.shape[0]))
    total = 0.0
    for i in range(0, a.shape[0], block):
        chunk = a[i : i + block]
        d2 = (chunk * chunk).sum(axis=1)[:, None] + bn[None, :] - 2.0 * (chunk @ b.T)
        np.multiply(d2, inv, out=d2)
        np.exp(d2, out=d2)
        total += float(weights_a[i : i + block] @ d2 @ weights_b)
    return scale * total


def cross_inner_uniform(points_a, means_b, weights_b, var: float) -> np.ndarray:
    """Vector of <N(.; a_i, var_a), g> against a fixed weighted component
    list b, for the uniform-variance-sum case; blocked like pair_sum."""
    a = np.atleast_2d(np.asarray(points_a, dtype=float))
    b = np.atleast_2d(np.asarray(means_b, dtype=float))
    dim = a.shape[1]
    scale = (2.0 * np.pi * var) ** (-dim / 2.0)
    inv = -0.5 / var
    an = (a * a).sum(axis=1)
    out = np.zeros(a.shape[0])
    block = max(1, _BLOCK_ENTRIES // max(1, a.shape[0]))
    for j in range(0, b.shape[0], block):
        chunk = b[j : j + block]
        d2 = an[:, None] + (chunk * chunk).sum(axis=1)[None, :] - 2.0 * (a @ chunk.T)
        np.multiply(d2, inv, out=d2)
        np.exp(d2, out=d2)
        out += d2 @ weights_b[j : j + block]
    return scale * out


def self_pair_sum_uniform(means, weights, var: float) -> float:
    """w^T G w for one component family against itself; symmetry halves
    the off-diagonal block work."""
    a = np.atleast_2d(np.asarray(means, dtype=float))
    w = np.asarray(weights, dtype=float)
    dim = a.shape[1]
    scale = (2.0 * np.pi * var) ** (-dim / 2.0)
    inv = -0.5 / var
    nrm = (a * a).sum(axis=1)
    s = max(256, int(np.sqrt(_BLOCK_ENTRIES)))
    starts = range(0, a.shape[0], s)
    total = 0.0
    for i in starts:
        ai, wi, ni = a[i : i + s], w[i : i + s], nrm[i : i + s]
        for j in range(i, a.shape[0], s):
            d2 = ni[:, None] + nrm[j : j + s][None, :] - 2.0 * (ai @ a[j : j + s].T)
            np.multiply(d2, inv, out=d2)
            np.exp(d2, out=d2)
            part = float(wi @ d2 @ w[j : j + s])
            total += part if j == i else 2.0 * part
    return scale * total


def _quadratic_form(means, w, sigmas) -> float:
    m = w.size
    if m <= _DENSE_LIMIT:
        return float(w @ gram_matrix(means, sigmas) @ w)
    # Group components by sigma so each block has a single variance sum;
    # off-diagonal group pairs are counted twice by symmetry.
    values, inverse = np.unique(sigmas, return_inverse=True)
    groups = [np.flatnonzero(inverse == g) for g in range(values.size)]
    total = 0.0
    for gi in range(values.size):
        total += self_pair_sum_uniform(
            means[groups[gi]], w[groups[gi]], float(2.0 * values[gi] ** 2)
        )
        for gj in range(gi + 1, values.size):
            var = float(values[gi] ** 2 + values[gj] ** 2)
            total += 2.0 * pair_sum_uniform(
                means[groups[gi]], w[groups[gi]], means[groups[gj]], w[groups[gj]], var
            )
    return total


def l2_norm_sq(f: SignedMixture) -> float:
    """||f||_2^2 by the closed form, clamped at 0 against roundoff."""
    means, w, s = _combined(f, None)
    return max(_quadratic_form(means, w, s), 0.0)


def l2_distance_sq(f: SignedMixture, g: SignedMixture) -> float:
    """||f - g||_2^2 over the combined signed component list."""
    means, w, s = _combined(f, g)
    return max(_quadratic_form(means, w, s), 0.0)


def quadrature_l2_distance_sq(f: SignedMixture, g: SignedMixture | None, n_nodes: int = 401) -> float:
    """Trapezoidal-rule approximation of ||f - g||_2^2 (test oracle).

    Tensor grid with n_nodes per axis on a symmetric box reaching
    max |mean coordinate| + 6 max sigma, so the integrand's mass outside is
    negligible. Restricted to dim <= 3; use the closed form beyond that.
    """
    means, w, s = _combined(f, g)
    dim = means.shape[1]
    if dim > 3:
        raise ValueError("quadrature oracle supports dim <= 3; use l2_distance_sq")
    extent = float(np.abs(means).max()) + 6.0 * float(s.max())
    axes = [np.linspace(-extent, extent, n_nodes)] * dim
    mesh = np.meshgrid(*axes, indexing="ij")
    pts = np.stack([m.ravel() for m in mesh], axis=1)
    diff = SignedMixture(means, w, s)
    vals = (diff.pdf(pts) ** 2).reshape([n_nodes] * dim)
    for ax in reversed(axes):
        vals = _trapezoid(vals, ax, axis=-1)
    return float(vals)


def project_to_direction(f: SignedMixture, v) -> SignedMixture:
    """Marginal of a signed mixture along a unit vector.

    Means become <v, mu_i>; weights and sigmas carry over unchanged, since
    a spherical Gaussian marginalizes to a 1-d Gaussian of the same width.
    """
    v = np.asarray(v, dtype=float)
    if abs(np.linalg.norm(v) - 1.0) > 1e-12:
        raise ValueError("v must be a unit vector")
    if v.shape != (f.dim,):
        raise ValueError("dimension mismatch")
    return SignedMixture(
        means=(f.means @ v)[:, None],
        weights=f.weights,
        sigmas=f.sigmas,
    )
