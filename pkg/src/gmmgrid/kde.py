"""Gaussian kernel density estimation targeted by the grid search.

The estimate is itself a Gaussian mixture (N components, uniform weights,
width h), so every distance the search needs stays in closed form.
"""

from __future__ import annotations

import json
from dataclasses import dataclass

import numpy as np

from .mixtures import SampleMatrix, SignedMixture

__all__ = ["KdeEstimate", "bandwidth_rule", "build_kde"]


def bandwidth_rule(n_points: int, dim: int) -> float:
    """Bandwidth h = N^(-(d-1)/(2 d^2)) for dim >= 2, N^(-1/5) for dim = 1.

    The exponent comes from balancing bias against concentration width for
    d >= 2; it vanishes at d = 1 (h would be stuck at 1), so the classical
    one-dimensional N^(-1/5) rate is substituted there.
    """
    if n_points < 2:
        raise ValueError("need n_points >= 2")
    if dim < 1:
        raise ValueError("dim must be >= 1")
    if dim == 1:
        return float(n_points) ** (-1.0 / 5.0)
    return float(n_points) ** (-(dim - 1) / (2.0 * dim * dim))


@dataclass(frozen=True)
class KdeEstimate:
    """Kernel density estimate as an explicit signed mixture.

    All component weights are 1/N and all component widths equal the
    bandwidth, so the density integrates to 1 and is nonnegative.
    """

    mixture: SignedMixture
    bandwidth: float
    source_n: int

    def __post_init__(self):
        m = self.mixture
        if m.m != self.source_n:
            raise ValueError("source_n must equal the component count")
        if not np.allclose(m.weights, 1.0 / self.source_n, rtol=0, atol=1e-15):
            raise ValueError("KDE weights must all equal 1/N")
        if not np.allclose(m.sigmas, self.bandwidth, rtol=0, atol=0):
            raise ValueError("KDE component widths must all equal the bandwidth")

    @property
    def dim(self) -> int:
        return self.mixture.dim

    def pdf(self, x) -> np.ndarray:
        return self.mixture.pdf(x)

    def subsample(self, m: int, seed) -> "KdeEstimate":
        """Uniformly subsampled estimate with m <= N components.

        An approximation to the full estimate that bounds the cost of
        Gram-matrix work downstream; the bandwidth is kept.
        """
        if not 1 <= m <= self.source_n:
            raise ValueError(f"m must be in 1..{self.source_n}")
        if m == self.source_n:
            return self
        rng = np.random.default_rng(seed)
        idx = rng.choice(self.source_n, size=m, replace=False)
        idx.sort()
        return KdeEstimate(
            mixture=SignedMixture(
                means=self.mixture.means[idx],
                weights=np.full(m, 1.0 / m),
                sigmas=np.full(m, self.bandwidth),
            ),
            bandwidth=self.bandwidth,
            source_n=m,
        )

    def to_dict(self) -> dict:
        d = self.mixture.to_dict()
        d["bandwidth"] = float(self.bandwidth)
        d["source_n"] = int(self.source_n)
        return d

    @classmethod
    def from_dict(cls, d: dict) -> "KdeEstimate":
        return cls(SignedMixture.from_dict(d), float(d["bandwidth"]), int(d["source_n"]))

    def save(self, path) -> None:
        with open(path, "w") as fh:
            json.dump(self.to_dict(), fh, sort_keys=True)
            fh.write("\n")

    @classmethod
    def load(cls, path) -> "KdeEstimate":
        with open(path) as fh:
            return cls.from_dict(json.load(fh))


def build_kde(samples, bandwidth: float | None = None) -> KdeEstimate:
    """Place a Gaussian of width h at every sample point, weight 1/N.

    Accepts a SampleMatrix or a plain (N, dim) array.
    """
    data = samples.data if isinstance(samples, SampleMatrix) else np.atleast_2d(np.asarray(samples, dtype=float))
    n, dim = data.shape
    if n < 2:
        raise ValueError("need at least 2 samples for a density estimate")
    h = float(bandwidth) if bandwidth is not None else bandwidth_rule(n, dim)
    if h <= 0:
        raise ValueError("bandwidth must be positive")
    mixture = SignedMixture(
        means=data,
        weights=np.full(n, 1.0 / n),
        sigmas=np.full(n, h),
    )
    return KdeEstimate(mixture, h, n)
