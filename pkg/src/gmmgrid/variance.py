"""Shared-variance estimation from one-dimensional Hermite moments.

Project the sample onto a line, build the (k+1) x (k+1) Hankel matrix whose
entries are empirical expectations of the Hermite-style polynomials
gamma_i(x, tau), and take the smallest positive root of its determinant in
tau. For exact moments that root is exactly the component sigma; for
empirical moments it concentrates around it.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .mixtures import SampleMatrix, _frozen_array

__all__ = [
    "hermite_polynomial",
    "HermiteMomentTable",
    "HankelPolynomialMatrix",
    "build_hankel",
    "DeterminantFunction",
    "determinant_function",
    "estimate_variance",
    "estimate_variance_from_moments",
    "gaussian_raw_moments",
    "mixture_raw_moments",
]

_SCAN_POINTS = 1000
_BISECT_TOL = 1e-10
_FLAT_TOL = 1e-14


def hermite_polynomial(i: int) -> np.ndarray:
    """Coefficients of gamma_i(x, tau) from the recurrence
    ``gamma_i = x gamma_{i-1} - (i-1) tau^2 gamma_{i-2}``, gamma_0 = 1,
    gamma_1 = x.

    Returns integer coefficients c such that
    ``gamma_i = sum_j c[j] * x^(i-2j) * tau^(2j)``. gamma_i is homogeneous
    of degree i in (x, tau) with only even powers of tau.
    """
    if i < 0:
        raise ValueError("order must be nonnegative")
    prev2 = np.array([1], dtype=object)  # gamma_0
    if i == 0:
        return prev2
    prev1 = np.array([1], dtype=object)  # gamma_1 = x
    if i == 1:
        return prev1
    for order in range(2, i + 1):
        out = np.zeros(order // 2 + 1, dtype=object)
        out[: prev1.size] += prev1
        out[1 : prev2.size + 1] -= (order - 1) * prev2
        prev2, prev1 = prev1, out
    return prev1


@dataclass(frozen=True)
class HermiteMomentTable:
    """Raw moments m_r = E[X^r] for r = 0..max_order, with provenance.

    n_points is the sample count behind empirical tables and 0 for exact
    (population) tables.
    """

    moments: np.ndarray
    n_points: int

    def __post_init__(self):
        m = _frozen_array(self, "moments", np.atleast_1d(self.moments))
        if m[0] != 1.0:
            raise ValueError("zeroth moment must be 1")
        if np.any(m[2::2] < 0):
            raise ValueError("even raw moments cannot be negative")

    @property
    def max_order(self) -> int:
        return self.moments.size - 1

    @classmethod
    def from_samples(cls, x: np.ndarray, max_order: int) -> "HermiteMomentTable":
        """Single pass over the data; chunk partial sums are combined with
        math.fsum, which is exact compensated summation."""
        x = np.asarray(x, dtype=float).ravel()
        n = x.size
        moments = np.empty(max_order + 1)
        moments[0] = 1.0
        chunk = 1 << 18
        power = np.ones_like(x)
        for r in range(1, max_order + 1):
            power = power * x
            moments[r] = math.fsum(
                float(power[i : i + chunk].sum()) for i in range(0, n, chunk)
            ) / n
        return cls(moments, n)

    @classmethod
    def from_mixture(cls, mixture, max_order: int) -> "HermiteMomentTable":
        """Population moments of a 1-d mixture, for the exact-moment mode."""
        return cls(mixture_raw_moments(mixture, max_order), 0)


def gaussian_raw_moments(mu: float, sigma: float, max_order: int) -> np.ndarray:
    """Exact raw moments of N(mu, sigma^2) up to max_order via
    ``E X^i = mu E X^(i-1) + (i-1) sigma^2 E X^(i-2)``."""
    if max_order < 0:
        raise ValueError("max_order must be >= 0")
    if not sigma > 0:
        raise ValueError("sigma must be positive")
    out = np.empty(max_order + 1)
    out[0] = 1.0
    if max_order >= 1:
        out[1] = mu
    for i in range(2, max_order + 1):
        out[i] = mu * out[i - 1] + (i - 1) * sigma**2 * out[i - 2]
    return out


def mixture_raw_moments(mixture, max_order: int) -> np.ndarray:
    """Raw moments of a 1-d mixture: weight-average of component moments."""
    if mixture.dim != 1:
        raise ValueError("moments are defined for 1-d mixtures; project first")
    means = mixture.means.ravel()
    cols = [gaussian_raw_moments(m, mixture.sigma, max_order) for m in means]
    return np.stack(cols, axis=1) @ mixture.weights


@dataclass(frozen=True)
class HankelPolynomialMatrix:
    """(k+1) x (k+1) matrix of polynomials in tau^2.

    coeffs[i, j, d] is the coefficient of (tau^2)^d in entry (i, j), which
    is the moment-substituted expectation of gamma_{i+j}(X, tau). Entries
    are symmetric in (i, j), entry (0, 0) is the constant 1, and entry
    (i, j) has degree at most floor((i+j)/2) in tau^2.
    """

    coeffs: np.ndarray
    k: int

    def __post_init__(self):
        _frozen_array(self, "coeffs", self.coeffs)

    def evaluate(self, tau: float) -> np.ndarray:
        powers = (tau * tau) ** np.arange(self.coeffs.shape[2])
        return self.coeffs @ powers


def build_hankel(moments: HermiteMomentTable, k: int) -> HankelPolynomialMatrix:
    """Substitute m_r for x^r in gamma_{i+j}(x, tau), all 0 <= i+j <= 2k."""
    if k < 1:
        raise ValueError("k must be >= 1")
    if moments.max_order < 2 * k:
        raise ValueError(f"need moments up to order {2 * k}, have {moments.max_order}")
    size = k + 1
    coeffs = np.zeros((size, size, k + 1))
    for i in range(size):
        for j in range(size):
            order = i + j
            c = hermite_polynomial(order)
            for d in range(c.size):
                coeffs[i, j, d] = float(c[d]) * moments.moments[order - 2 * d]
    return HankelPolynomialMatrix(coeffs, k)


@dataclass(frozen=True)
class DeterminantFunction:
    """Callable det(M(tau)) plus degree metadata.

    degree is the theoretical polynomial degree k(k+1) in tau;
    leading_coefficient is the coefficient of tau^(k(k+1)), which does not
    depend on the underlying distribution (see leading_hankel_coefficient).
    """

    hankel: HankelPolynomialMatrix
    degree: int
    leading_coefficient: float

    def __call__(self, tau):
        taus = np.atleast_1d(np.asarray(tau, dtype=float))
        out = np.array([np.linalg.det(self.hankel.evaluate(t)) for t in taus])
        return out if np.ndim(tau) else float(out[0])

    def polynomial_coefficients(self) -> np.ndarray:
        """Coefficients in s = tau^2, ascending, recovered by interpolation.

        det(M(tau)) is a polynomial of degree k(k+1)/2 in s, so values at
        that many + 1 distinct nodes determine it exactly.
        """
        deg_s = self.degree // 2
        nodes = np.linspace(0.25, 2.25, deg_s + 1)
        vals = self(np.sqrt(nodes))
        return np.polynomial.polynomial.polyfit(nodes, vals, deg_s)


def leading_hankel_coefficient(k: int) -> float:
    """Coefficient of tau^(k(k+1)) in det(M(tau)), from the all-means-zero
    case (it is the same for every distribution)."""
    table = HermiteMomentTable(gaussian_raw_moments(0.0, 1.0, 2 * k), 0)
    d = DeterminantFunction(build_hankel(table, k), k * (k + 1), float("nan"))
    return float(d.polynomial_coefficients()[-1])


def determinant_function(h: HankelPolynomialMatrix) -> DeterminantFunction:
    """Numeric determinant evaluator with degree and leading coefficient."""
    return DeterminantFunction(h, h.k * (h.k + 1), leading_hankel_coefficient(h.k))


def _bracket_first_root(dhat, tau_max: float):
    # Scan a uniform grid for the first sign change, then bisect. Grid
    # search plus bisection is deliberate: the determinant is smooth and
    # cheap, and symbolic expansion of det(M) would be exponential
    # bookkeeping for no benefit.
    taus = np.linspace(tau_max / _SCAN_POINTS, tau_max, _SCAN_POINTS)
    vals = dhat(taus)
    lo = hi = None
    for i in range(len(taus) - 1):
        if vals[i] == 0.0:
            return taus[i], taus[i], vals
        if vals[i] * vals[i + 1] < 0.0:
            lo, hi = taus[i], taus[i + 1]
            break
    else:
        if vals[-1] == 0.0:
            return taus[-1], taus[-1], vals
        raise ValueError(
            "no root bracketed in (0, {:.6g}]: dhat ranges over [{:.6g}, {:.6g}]; "
            "insufficient N, wrong k, or tau_max too small".format(
                tau_max, float(vals.min()), float(vals.max())
            )
        )
    flo = dhat(lo)
    while hi - lo > _BISECT_TOL:
        mid = 0.5 * (lo + hi)
        fmid = dhat(mid)
        if fmid == 0.0:
            return mid, mid, vals
        if flo * fmid < 0.0:
            hi = mid
        else:
            lo, flo = mid, fmid
    return lo, hi, vals


def estimate_variance_from_moments(table: HermiteMomentTable, k: int, tau_max: float):
    """Smallest positive root of det(M(tau)) built from a moment table.

    Returns (sigma_star, diagnostics). Diagnostics carry the scanned
    determinant extrema, the final bracket, the polynomial degree, and a
    flat-bracket warning when |dhat| < 1e-14 across the bracket (a nearly
    multiple root; the estimate is then poorly conditioned).
    """
    if not tau_max > 0:
        raise ValueError("tau_max must be positive")
    dhat = determinant_function(build_hankel(table, k))
    lo, hi, scan = _bracket_first_root(dhat, tau_max)
    sigma_star = 0.5 * (lo + hi)
    flat = bool(max(abs(dhat(lo)), abs(dhat(hi))) < _FLAT_TOL and lo != hi)
    diagnostics = {
        "bracket": [float(lo), float(hi)],
        "dhat_start": float(scan[0]),
        "dhat_end": float(scan[-1]),
        "dhat_min": float(scan.min()),
        "dhat_max": float(scan.max()),
        "dhat_degree": dhat.degree,
        "leading_coefficient": dhat.leading_coefficient,
        "tau_max": float(tau_max),
        "flat_bracket": flat,
        "n_used": int(table.n_points),
    }
    return float(sigma_star), diagnostics


def estimate_variance(
    samples: SampleMatrix,
    k: int,
    direction: np.ndarray | None = None,
    tau_max: float | None = None,
):
    """Estimate the shared component sigma from samples.

    The data is projected onto ``direction`` (default: the first
    coordinate axis), raw moments up to order 2k are accumulated, and the
    smallest positive determinant root is located by a 1000-point scan
    plus bisection to 1e-10. tau_max defaults to 1.5x the sample standard
    deviation along the projection: the mixture variance upper-bounds the
    component variance, so the root lies below it.
    """
    data = samples.data if isinstance(samples, SampleMatrix) else np.atleast_2d(np.asarray(samples, dtype=float))
    if direction is None:
        x = data[:, 0]
    else:
        v = np.asarray(direction, dtype=float)
        if abs(np.linalg.norm(v) - 1.0) > 1e-9:
            raise ValueError("direction must be a unit vector")
        x = data @ v
    if tau_max is None:
        tau_max = 1.5 * float(np.std(x))
    table = HermiteMomentTable.from_samples(x, 2 * k)
    return estimate_variance_from_moments(table, k, tau_max)
