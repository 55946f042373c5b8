"""Core mixture types, a reproducible sampler, and parameter-comparison metrics.

The estimation target is a mixture of k identical spherical Gaussians:
``p(x) = sum_i w_i * N(x; mu_i, sigma^2 I)``. Signed mixtures (arbitrary real
weights, per-component widths) cover everything else the pipeline touches:
kernel density estimates, differences of densities, and one-dimensional
reductions of either.
"""

from __future__ import annotations

import itertools
import json
from dataclasses import dataclass, field

import numpy as np
from scipy.optimize import linear_sum_assignment
from scipy.spatial.distance import cdist

__all__ = [
    "SphericalMixture",
    "SignedMixture",
    "SampleMatrix",
    "MatchResult",
    "sample",
    "hausdorff",
    "match_components",
]

_WEIGHT_SUM_TOL = 1e-12


def _frozen_array(obj, name, value, dtype=float):
    arr = np.array(value, dtype=dtype)
    arr.setflags(write=False)
    object.__setattr__(obj, name, arr)
    return arr


@dataclass(frozen=True)
class SphericalMixture:
    """Mixture of k identical spherical Gaussians.

    Parameters
    ----------
    means : (k, dim) array_like
        Component means, one row per component.
    weights : (k,) array_like
        Mixing weights, each in (0, 1], summing to 1 within 1e-12.
    sigma : float
        Shared component standard deviation.
    alpha_min : float, optional
        Declared weight floor. When given, construction fails if any
        weight is below it. Stored as configuration, never inferred.
    d_min : float, optional
        Declared minimum pairwise mean distance; validated the same way.
    """

    means: np.ndarray
    weights: np.ndarray
    sigma: float
    alpha_min: float | None = None
    d_min: float | None = None

    def __post_init__(self):
        means = _frozen_array(self, "means", np.atleast_2d(self.means))
        weights = _frozen_array(self, "weights", np.atleast_1d(self.weights))
        if means.ndim != 2:
            raise ValueError("means must be a (k, dim) array")
        if weights.shape != (means.shape[0],):
            raise ValueError("weights must have one entry per mean")
        if not np.all(weights > 0) or np.any(weights > 1):
            raise ValueError("weights must lie in (0, 1]")
        if abs(weights.sum() - 1.0) > _WEIGHT_SUM_TOL:
            raise ValueError(f"weights sum to {weights.sum()!r}, expected 1 within {_WEIGHT_SUM_TOL}")
        if not self.sigma > 0:
            raise ValueError("sigma must be positive")
        if self.alpha_min is not None and weights.min() < self.alpha_min - 1e-12:
            raise ValueError(
                f"weight {weights.min()} below declared alpha_min={self.alpha_min}"
            )
        if self.d_min is not None and self.k > 1:
            actual = self.min_pairwise_distance()
            if actual < self.d_min - 1e-12:
                raise ValueError(
                    f"mean separation {actual} below declared d_min={self.d_min}"
                )

    @property
    def k(self) -> int:
        return self.means.shape[0]

    @property
    def dim(self) -> int:
        return self.means.shape[1]

    def min_pairwise_distance(self) -> float:
        """Smallest distance between two component means (inf for k=1)."""
        if self.k < 2:
            return float("inf")
        d = cdist(self.means, self.means)
        return float(d[np.triu_indices(self.k, k=1)].min())

    def pdf(self, x) -> np.ndarray:
        """Density at points ``x`` of shape (m, dim) or (dim,)."""
        x = np.atleast_2d(np.asarray(x, dtype=float))
        d2 = cdist(x, self.means, "sqeuclidean")
        norm = (2.0 * np.pi * self.sigma**2) ** (-self.dim / 2.0)
        return norm * np.exp(-d2 / (2.0 * self.sigma**2)) @ self.weights

    def as_signed(self) -> "SignedMixture":
        return SignedMixture(
            means=self.means,
            weights=self.weights,
            sigmas=np.full(self.k, float(self.sigma)),
        )

    def to_dict(self) -> dict:
        return {
            "dim": self.dim,
            "sigma": float(self.sigma),
            "components": [
                {"weight": float(w), "mean": [float(v) for v in m]}
                for w, m in zip(self.weights, self.means)
            ],
        }

    @classmethod
    def from_dict(cls, d: dict, alpha_min=None, d_min=None) -> "SphericalMixture":
        means = np.array([c["mean"] for c in d["components"]], dtype=float)
        weights = np.array([c["weight"] for c in d["components"]], dtype=float)
        if means.shape[1] != d["dim"]:
            raise ValueError("mean length disagrees with declared dim")
        return cls(means, weights, float(d["sigma"]), alpha_min=alpha_min, d_min=d_min)

    def save(self, path) -> None:
        with open(path, "w") as fh:
            json.dump(self.to_dict(), fh, indent=2, sort_keys=True)
            fh.write("\n")

    @classmethod
    def load(cls, path) -> "SphericalMixture":
        with open(path) as fh:
            return cls.from_dict(json.load(fh))


@dataclass(frozen=True)
class SignedMixture:
    """Gaussian mixture with real (possibly negative) weights and
    per-component standard deviations.

    Closed under subtraction of two :class:`SphericalMixture` densities and
    under marginal projection onto a direction; no constraint on the weight
    sum.
    """

    means: np.ndarray
    weights: np.ndarray
    sigmas: np.ndarray

    def __post_init__(self):
        means = _frozen_array(self, "means", np.atleast_2d(self.means))
        weights = _frozen_array(self, "weights", np.atleast_1d(self.weights))
        sigmas = _frozen_array(self, "sigmas", np.atleast_1d(self.sigmas))
        m = means.shape[0]
        if weights.shape != (m,) or sigmas.shape != (m,):
            raise ValueError("weights and sigmas must have one entry per mean")
        if not np.all(sigmas > 0):
            raise ValueError("all component sigmas must be positive")

    @property
    def m(self) -> int:
        return self.means.shape[0]

    @property
    def dim(self) -> int:
        return self.means.shape[1]

    def pdf(self, x) -> np.ndarray:
        x = np.atleast_2d(np.asarray(x, dtype=float))
        d2 = cdist(x, self.means, "sqeuclidean")
        var = self.sigmas**2
        norm = (2.0 * np.pi * var) ** (-self.dim / 2.0)
        return np.exp(-d2 / (2.0 * var)) @ (self.weights * norm)

    def __sub__(self, other: "SignedMixture") -> "SignedMixture":
        if self.dim != other.dim:
            raise ValueError("dimension mismatch")
        return SignedMixture(
            means=np.vstack([self.means, other.means]),
            weights=np.concatenate([self.weights, -other.weights]),
            sigmas=np.concatenate([self.sigmas, other.sigmas]),
        )

    def to_dict(self) -> dict:
        return {
            "dim": self.dim,
            "components": [
                {"weight": float(w), "mean": [float(v) for v in m], "sigma": float(s)}
                for w, m, s in zip(self.weights, self.means, self.sigmas)
            ],
        }

    @classmethod
    def from_dict(cls, d: dict) -> "SignedMixture":
        means = np.array([c["mean"] for c in d["components"]], dtype=float)
        weights = np.array([c["weight"] for c in d["components"]], dtype=float)
        sigmas = np.array([c["sigma"] for c in d["components"]], dtype=float)
        return cls(means, weights, sigmas)


@dataclass(frozen=True)
class SampleMatrix:
    """N x dim matrix of i.i.d. draws plus the seed that produced it.

    seed is None for matrices loaded from files or built from coordinates.
    """

    data: np.ndarray
    seed: int | None = None

    def __post_init__(self):
        data = _frozen_array(self, "data", np.atleast_2d(self.data))
        if data.shape[0] < 1:
            raise ValueError("need at least one sample")

    @property
    def n(self) -> int:
        return self.data.shape[0]

    @property
    def dim(self) -> int:
        return self.data.shape[1]

    def to_csv(self, path) -> None:
        header = ",".join(f"x{i}" for i in range(self.dim))
        np.savetxt(path, self.data, delimiter=",", header=header, comments="")

    @classmethod
    def from_csv(cls, path, seed: int = -1) -> "SampleMatrix":
        data = np.loadtxt(path, delimiter=",", skiprows=1, ndmin=2)
        return cls(data, seed)

    def to_ndjson(self, path) -> None:
        cols = [f"x{i}" for i in range(self.dim)]
        with open(path, "w") as fh:
            for row in self.data:
                fh.write(json.dumps(dict(zip(cols, map(float, row)))) + "\n")

    @classmethod
    def from_ndjson(cls, path, seed: int = -1) -> "SampleMatrix":
        rows = []
        with open(path) as fh:
            for line in fh:
                if line.strip():
                    obj = json.loads(line)
                    rows.append([obj[f"x{i}"] for i in range(len(obj))])
        return cls(np.array(rows, dtype=float), seed)


def sample(mix: SphericalMixture, n_points: int, seed) -> SampleMatrix:
    """Draw ``n_points`` i.i.d. samples from ``mix``.

    Component indices are chosen by the mixing weights, then a spherical
    Gaussian of width sigma is added. The generator is numpy's seeded
    default (PCG64), so output is bitwise-reproducible for a given seed
    within one numpy major version.
    """
    if n_points < 1:
        raise ValueError("n_points must be >= 1")
    rng = np.random.default_rng(seed)
    idx = rng.choice(mix.k, size=n_points, p=mix.weights)
    noise = rng.standard_normal((n_points, mix.dim))
    data = mix.means[idx] + mix.sigma * noise
    seed_repr = seed if isinstance(seed, (int, np.integer)) else -1
    return SampleMatrix(data, int(seed_repr))


def hausdorff(a, b) -> float:
    """Hausdorff distance between two finite point sets.

    ``max(max_x min_y ||x-y||, max_y min_x ||x-y||)`` over rows of a and b.
    """
    a = np.atleast_2d(np.asarray(a, dtype=float))
    b = np.atleast_2d(np.asarray(b, dtype=float))
    if a.shape[0] == 0 or b.shape[0] == 0:
        raise ValueError("point sets must be nonempty")
    if a.shape[1] != b.shape[1]:
        raise ValueError("dimension mismatch")
    d = cdist(a, b)
    return float(max(d.min(axis=1).max(), d.min(axis=0).max()))


@dataclass(frozen=True)
class MatchResult:
    """Optimal component matching between a reference and an estimate."""

    permutation: tuple
    mean_errors: np.ndarray
    weight_errors: np.ndarray

    def __post_init__(self):
        object.__setattr__(self, "permutation", tuple(int(i) for i in self.permutation))
        _frozen_array(self, "mean_errors", self.mean_errors)
        _frozen_array(self, "weight_errors", self.weight_errors)

    @property
    def max_mean_error(self) -> float:
        return float(self.mean_errors.max())

    @property
    def max_weight_error(self) -> float:
        return float(self.weight_errors.max())


def match_components(true_mix: SphericalMixture, est_mix: SphericalMixture) -> MatchResult:
    """Match estimated components to true ones.

    Finds the permutation pi minimizing ``sum_i ||mu_i - mu~_{pi(i)}||``,
    exhaustively for k <= 8 and by optimal assignment on the distance
    matrix above that. Reports per-component mean and weight errors
    under pi.
    """
    if true_mix.k != est_mix.k:
        raise ValueError(f"component counts differ: {true_mix.k} vs {est_mix.k}")
    if true_mix.dim != est_mix.dim:
        raise ValueError("dimension mismatch")
    k = true_mix.k
    cost = cdist(true_mix.means, est_mix.means)
    if k <= 8:
        best_perm, best_cost = None, np.inf
        for perm in itertools.permutations(range(k)):
            c = cost[np.arange(k), perm].sum()
            if c < best_cost:
                best_perm, best_cost = perm, c
    else:
        rows, cols = linear_sum_assignment(cost)
        best_perm = tuple(int(c) for c in cols[np.argsort(rows)])
    perm = np.asarray(best_perm)
    mean_errors = cost[np.arange(k), perm]
    weight_errors = np.abs(true_mix.weights - est_mix.weights[perm])
    return MatchResult(best_perm, mean_errors, weight_errors)
