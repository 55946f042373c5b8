"""Independent numerical oracles for the test suite.

Everything here is built from scipy/sympy/stdlib only, with the formulas
restated from scratch, so agreement with the package is evidence rather
than tautology. Oracles take plain floats and arrays, never package types.
"""

import itertools
import math

import numpy as np
import sympy
from scipy import integrate


def normal_pdf(x, mean, sigma):
    return np.exp(-((x - mean) ** 2) / (2.0 * sigma**2)) / (sigma * math.sqrt(2.0 * math.pi))


def quad_inner_1d(mean_a, sigma_a, mean_b, sigma_b):
    """Adaptive quadrature of the product of two 1-d normal densities."""
    lo = min(mean_a - 12 * sigma_a, mean_b - 12 * sigma_b)
    hi = max(mean_a + 12 * sigma_a, mean_b + 12 * sigma_b)
    val, _ = integrate.quad(
        lambda x: normal_pdf(x, mean_a, sigma_a) * normal_pdf(x, mean_b, sigma_b),
        lo, hi, epsabs=1e-13, limit=200,
    )
    return val


def signed_pdf_on_grid(components, axes):
    """Sum of weighted spherical normal densities on a tensor grid.

    components: list of (weight, mean array, sigma). axes: one 1-d node
    array per dimension.
    """
    mesh = np.meshgrid(*axes, indexing="ij")
    total = np.zeros(mesh[0].shape)
    dim = len(axes)
    for w, mean, sigma in components:
        d2 = np.zeros(mesh[0].shape)
        for d in range(dim):
            d2 += (mesh[d] - mean[d]) ** 2
        total += w * np.exp(-d2 / (2.0 * sigma**2)) / (2.0 * math.pi * sigma**2) ** (dim / 2.0)
    return total


def simpson_l2_sq(components_f, components_g, n_nodes=1201, pad=8.0):
    """Simpson tensor quadrature of integral (f-g)^2 for dim <= 2."""
    comps = [(w, np.atleast_1d(np.asarray(m, dtype=float)), s) for w, m, s in components_f]
    comps += [(-w, np.atleast_1d(np.asarray(m, dtype=float)), s) for w, m, s in components_g]
    dim = comps[0][1].size
    sig_max = max(s for _, _, s in comps)
    axes = []
    for d in range(dim):
        lo = min(m[d] for _, m, _ in comps) - pad * sig_max
        hi = max(m[d] for _, m, _ in comps) + pad * sig_max
        axes.append(np.linspace(lo, hi, n_nodes))
    diff = signed_pdf_on_grid(comps, axes)
    sq = diff**2
    for d in reversed(range(dim)):
        sq = integrate.simpson(sq, x=axes[d], axis=d)
    return float(sq)


def sympy_hermite(order):
    """The gamma recurrence expanded symbolically; returns a sympy Poly in (x, tau)."""
    x, tau = sympy.symbols("x tau")
    polys = [sympy.Integer(1), x]
    for i in range(2, order + 1):
        polys.append(sympy.expand(x * polys[i - 1] - (i - 1) * tau**2 * polys[i - 2]))
    return sympy.Poly(polys[order], x, tau)


def double_factorial_moment(mu, sigma, order):
    """E[X^order] for X ~ N(mu, sigma^2) via the binomial/double-factorial sum,
    a different route than the package's recurrence."""
    total = 0.0
    for j in range(0, order + 1, 2):
        dfact = 1
        for v in range(j - 1, 0, -2):
            dfact *= v
        total += math.comb(order, j) * mu ** (order - j) * sigma**j * dfact
    return total


def brute_force_match(true_means, est_means):
    """Permutation of the estimates minimizing the summed distances, by
    exhaustive enumeration."""
    true_means = np.asarray(true_means, dtype=float)
    est_means = np.asarray(est_means, dtype=float)
    k = true_means.shape[0]
    best, best_perm = math.inf, None
    for perm in itertools.permutations(range(k)):
        cost = sum(
            float(np.linalg.norm(true_means[i] - est_means[perm[i]])) for i in range(k)
        )
        if cost < best - 1e-15:
            best, best_perm = cost, perm
    return best_perm, best


def fourier_norm_1d(weights, means, sigma, n_nodes=100_000, span=40.0):
    """(1/2pi) integral |sum_j w_j exp(i mu_j u)|^2 exp(-sigma^2 u^2) du."""
    u = np.linspace(-span / sigma, span / sigma, n_nodes)
    phases = np.exp(1j * np.outer(u, np.asarray(means))) @ np.asarray(weights)
    integrand = np.abs(phases) ** 2 * np.exp(-(sigma**2) * u**2)
    return float(integrate.trapezoid(integrand, u) / (2.0 * math.pi))
