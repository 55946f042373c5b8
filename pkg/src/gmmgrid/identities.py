"""Numerical harness for the structural identities behind the method.

Four families of checks: a Vandermonde-minor determinant identity, a lower
bound on ||A alpha|| for Vandermonde matrices with separated nodes, the
existence of a direction that keeps all pairwise separations after
projection, and the Parseval route to L2 norms of one-dimensional signed
mixtures, plus an adversarial probe of how the norm decays as two opposing
components merge.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .l2 import l2_norm_sq
from .mixtures import SignedMixture, _frozen_array

__all__ = [
    "VandermondeInstance",
    "vandermonde_minor_det",
    "vandermonde_norm_bound",
    "find_separating_direction",
    "fourier_norm_check",
    "lower_bound_probe",
    "LowerBoundProbe",
    "run_lemma_suite",
]

_DIRECTION_BUDGET = 100_000
_FOURIER_NODES = 100_000


def _vandermonde_product(nodes: np.ndarray) -> float:
    n = len(nodes)
    prod = 1.0
    for s in range(n):
        for t in range(s):
            prod *= nodes[s] - nodes[t]
    return prod


def _elementary_symmetric(nodes: np.ndarray, m: int) -> float:
    # np.poly gives the monic polynomial with these roots; its coefficient
    # of x^(n-m) is (-1)^m e_m(nodes).
    coeffs = np.poly(nodes)
    return float((-1.0) ** m * coeffs[m])


def vandermonde_minor_det(nodes, removed_row: int):
    """Determinant of the power matrix with one row removed, against its
    closed form.

    B is the (n+1) x n matrix with B[r, c] = nodes[c]^r for r = 0..n.
    Removing row ``removed_row`` (1-based) leaves an n x n minor whose
    determinant equals e_{n-i+1}(nodes) times the Vandermonde product
    prod_{s>t}(x_s - x_t), where e_m is the elementary symmetric
    polynomial. Returns (direct determinant, predicted value).
    """
    nodes = np.asarray(nodes, dtype=float)
    n = nodes.size
    if np.unique(nodes).size != n:
        raise ValueError("nodes must be distinct")
    if not 1 <= removed_row <= n + 1:
        raise ValueError(f"removed_row must be in 1..{n + 1}")
    b = np.vander(nodes, n + 1, increasing=True).T  # rows are powers 0..n
    minor = np.delete(b, removed_row - 1, axis=0)
    direct = float(np.linalg.det(minor))
    predicted = _elementary_symmetric(nodes, n - removed_row + 1) * _vandermonde_product(nodes)
    return direct, predicted


@dataclass(frozen=True)
class VandermondeInstance:
    """Nodes in [-a, a], a designated node's separation t, and weights.

    t must equal min_{j != designated} |x_designated - x_j|; weights all
    satisfy |alpha_i| >= alpha_min for the instance's declared floor.
    """

    nodes: np.ndarray
    a: float
    t: float
    weights: np.ndarray
    designated: int
    alpha_min: float

    def __post_init__(self):
        nodes = _frozen_array(self, "nodes", self.nodes)
        weights = _frozen_array(self, "weights", self.weights)
        if np.unique(nodes).size != nodes.size:
            raise ValueError("nodes must be distinct")
        if np.abs(nodes).max() > self.a + 1e-12:
            raise ValueError("nodes must lie in [-a, a]")
        if not 0 <= self.designated < nodes.size:
            raise ValueError("designated node index out of range")
        if nodes.size > 1:
            gaps = np.abs(nodes - nodes[self.designated])
            gaps[self.designated] = np.inf
            if abs(gaps.min() - self.t) > 1e-12:
                raise ValueError("t must be the designated node's separation")
        elif not self.t > 0:
            raise ValueError("t must be positive")
        if np.abs(weights).min() < self.alpha_min - 1e-12:
            raise ValueError("every |weight| must be >= alpha_min")

    @classmethod
    def random(cls, k: int, alpha_min: float, a: float, rng) -> "VandermondeInstance":
        while True:
            nodes = rng.uniform(-a, a, size=k)
            if k == 1 or np.abs(np.subtract.outer(nodes, nodes))[
                np.triu_indices(k, 1)
            ].min() > 1e-3:
                break
        signs = rng.choice([-1.0, 1.0], size=k)
        weights = signs * rng.uniform(alpha_min, 1.0, size=k)
        if k == 1:
            designated, t = 0, a  # solitary node: use the box scale
        else:
            gaps = np.abs(np.subtract.outer(nodes, nodes))
            np.fill_diagonal(gaps, np.inf)
            isolation = gaps.min(axis=1)
            designated = int(np.argmax(isolation))
            t = float(isolation[designated])
        return cls(nodes, a, t, weights, designated, alpha_min)


def vandermonde_norm_bound(instance: VandermondeInstance):
    """||A alpha|| against its lower bound alpha_min (t / (1 + a))^(k-1).

    A is the k x k Vandermonde matrix A[i, j] = nodes[j]^i, i = 0..k-1.
    Returns (actual, bound); actual >= bound always holds.
    """
    k = instance.nodes.size
    a_mat = np.vander(instance.nodes, k, increasing=True).T
    actual = float(np.linalg.norm(a_mat @ instance.weights))
    bound = instance.alpha_min * (instance.t / (1.0 + instance.a)) ** (k - 1)
    return actual, bound


class DirectionSearchError(RuntimeError):
    """Budget exhausted without a separating direction.

    The direction is guaranteed to exist with positive probability per
    draw, so hitting this signals an implementation bug (or degenerate,
    duplicated points)."""


def find_separating_direction(points, budget: int = _DIRECTION_BUDGET, seed=0):
    """Random unit vector v with |<v, x_i - x_j>| > ||x_i - x_j|| / k^2
    for every pair, found by rejection sampling.

    Returns (v, achieved minimum ratio).
    """
    pts = np.atleast_2d(np.asarray(points, dtype=float))
    k, n = pts.shape
    if k < 2:
        raise ValueError("need at least two points")
    ii, jj = np.triu_indices(k, 1)
    diffs = pts[ii] - pts[jj]
    norms = np.linalg.norm(diffs, axis=1)
    if norms.min() == 0.0:
        raise ValueError("points must be distinct")
    unit_diffs = diffs / norms[:, None]
    threshold = 1.0 / (k * k)
    rng = np.random.default_rng(seed)
    for _ in range(budget):
        v = rng.standard_normal(n)
        v /= np.linalg.norm(v)
        ratio = float(np.abs(unit_diffs @ v).min())
        if ratio > threshold:
            return v, ratio
    raise DirectionSearchError(
        f"no direction with pairwise ratio > 1/k^2 = {threshold:.4g} "
        f"in {budget} draws; this should be impossible for distinct points"
    )


def fourier_norm_check(q: SignedMixture):
    """||q||^2 two ways for a 1-d common-sigma signed mixture.

    spatial: the closed form. fourier: (1/2pi) integral of
    |sum_j a_j exp(i mu_j u)|^2 exp(-sigma^2 u^2) du, trapezoid rule on
    u in [-40/sigma, 40/sigma] with 1e5 nodes. The two agree by Parseval.
    Returns (spatial, fourier).
    """
    if q.dim != 1:
        raise ValueError("Fourier check is one-dimensional")
    sigma = float(q.sigmas[0])
    if not np.allclose(q.sigmas, sigma, rtol=0, atol=1e-14):
        raise ValueError("all components must share one sigma")
    spatial = l2_norm_sq(q)
    u = np.linspace(-40.0 / sigma, 40.0 / sigma, _FOURIER_NODES)
    phases = np.exp(1j * np.outer(u, q.means[:, 0])) @ q.weights
    integrand = np.abs(phases) ** 2 * np.exp(-(sigma**2) * u**2)
    trapezoid = getattr(np, "trapezoid", None) or np.trapz
    fourier = float(trapezoid(integrand, u) / (2.0 * np.pi))
    return spatial, fourier


@dataclass(frozen=True)
class LowerBoundProbe:
    """Norm decay of adversarial signed mixtures as two components merge."""

    t_values: np.ndarray
    norms_sq: np.ndarray
    reference_shape: np.ndarray
    fitted_slope: float

    def rows(self):
        return list(zip(self.t_values, self.norms_sq, self.reference_shape))


def lower_bound_probe(k: int, t_values, alpha_min: float, sigma: float) -> LowerBoundProbe:
    """Adversarial 2k-component signed mixtures at each separation t.

    Construction: k well-separated anchor positions; at each anchor a
    +alpha_min component, and a -alpha_min partner displaced by t. Pairing
    nearby means with opposite signs is the greedy norm minimizer, and
    every mean is separated from the rest by at least t. Records the
    exact ||q||^2, a reference shape alpha_min^(2k) (t/L^2)^((2k)^2) with
    unit constants (diagnostic only), and the fitted log-log slope.
    """
    t_values = np.asarray(sorted(t_values, reverse=True), dtype=float)
    if np.any(t_values <= 0):
        raise ValueError("t values must be positive")
    spread = 4.0 * max(float(t_values.max()), sigma)
    anchors = (np.arange(k) - (k - 1) / 2.0) * spread
    norms = []
    for t in t_values:
        means = np.concatenate([anchors, anchors + t])[:, None]
        weights = np.concatenate([np.full(k, alpha_min), np.full(k, -alpha_min)])
        q = SignedMixture(means, weights, np.full(2 * k, sigma))
        norms.append(l2_norm_sq(q))
    norms = np.asarray(norms)
    if np.any(norms <= 0):
        raise ValueError("norm of a distinct-means signed mixture must be positive")
    scale = max(1.0, float(np.abs(anchors).max() + t_values.max()) ** 2)
    reference = alpha_min ** (2 * k) * (t_values / scale) ** ((2 * k) ** 2)
    slope = float(np.polyfit(np.log(t_values), np.log(norms), 1)[0])
    return LowerBoundProbe(t_values, norms, reference, slope)


def run_lemma_suite(sweep_size: int = 100, seed: int = 0) -> dict:
    """Run every check family; returns a JSON-friendly report per family."""
    rng = np.random.default_rng(seed)
    report = {}

    worst = 0.0
    for _ in range(max(sweep_size, 500)):
        n = int(rng.integers(2, 7))
        while True:
            nodes = rng.uniform(-2, 2, size=n)
            if np.abs(np.subtract.outer(nodes, nodes))[np.triu_indices(n, 1)].min() > 1e-2:
                break
        row = int(rng.integers(1, n)) if n > 1 else 1
        direct, predicted = vandermonde_minor_det(nodes, row)
        denom = max(abs(direct), abs(predicted), 1e-30)
        worst = max(worst, abs(direct - predicted) / denom)
    report["vandermonde_minor_det"] = {
        "instances": max(sweep_size, 500),
        "worst_relative_error": worst,
        "pass": bool(worst <= 1e-9),
    }

    margin = np.inf
    violations = 0
    n_norm = max(sweep_size, 200)
    for _ in range(n_norm):
        k = int(rng.integers(1, 6))
        inst = VandermondeInstance.random(k, float(rng.uniform(0.05, 0.3)), float(rng.uniform(0.5, 2.0)), rng)
        actual, bound = vandermonde_norm_bound(inst)
        margin = min(margin, actual - bound)
        violations += actual < bound
    report["vandermonde_norm_bound"] = {
        "instances": n_norm,
        "violations": int(violations),
        "worst_margin": float(margin),
        "pass": bool(violations == 0),
    }

    failures = 0
    worst_ratio = np.inf
    for i in range(sweep_size):
        k = int(rng.integers(2, 6))
        n = int(rng.integers(k, 11))
        pts = rng.uniform(-1, 1, size=(k, n))
        try:
            _, ratio = find_separating_direction(pts, seed=rng.integers(2**32))
            worst_ratio = min(worst_ratio, ratio * k * k)
        except DirectionSearchError:
            failures += 1
    report["separating_direction"] = {
        "instances": sweep_size,
        "failures": int(failures),
        "worst_ratio_times_k_sq": float(worst_ratio),
        "pass": bool(failures == 0),
    }

    worst = 0.0
    for _ in range(sweep_size):
        m = int(rng.integers(1, 5))
        q = SignedMixture(
            means=rng.uniform(-3, 3, size=(m, 1)),
            weights=rng.uniform(-1, 1, size=m),
            sigmas=np.full(m, float(rng.uniform(0.3, 1.5))),
        )
        spatial, fourier = fourier_norm_check(q)
        worst = max(worst, abs(spatial - fourier) / max(spatial, fourier, 1e-30))
    report["fourier_norm_check"] = {
        "instances": sweep_size,
        "worst_relative_error": worst,
        "pass": bool(worst <= 1e-6),
    }

    probe = lower_bound_probe(2, [0.5, 0.25, 0.125, 0.0625], 0.2, 1.0)
    max_slope = 2.0 * (2 * 2) ** 2 + 8 * 2
    report["lower_bound_probe"] = {
        "t_values": [float(t) for t in probe.t_values],
        "norms_sq": [float(v) for v in probe.norms_sq],
        "fitted_slope": probe.fitted_slope,
        "all_positive": bool(np.all(probe.norms_sq > 1e-300)),
        "pass": bool(np.all(probe.norms_sq > 1e-300) and probe.fitted_slope <= max_slope),
    }

    report["all_pass"] = bool(all(v["pass"] for v in report.values() if isinstance(v, dict)))
    return report
