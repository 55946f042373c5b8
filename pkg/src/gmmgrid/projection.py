"""Reduce the n-dimensional problem to k dimensions by SVD.

The top-k right singular vectors of the raw (uncentered) sample matrix span
a subspace close to the span of the component means, so estimation can run
in R^k and the recovered means can be lifted back to R^n at the end.
"""

from __future__ import annotations

import json
from dataclasses import dataclass

import numpy as np

from .mixtures import SampleMatrix, _frozen_array

__all__ = ["ProjectionBasis", "fit_basis", "project", "lift"]

# Above this many matrix entries, skip the dense SVD and get the top right
# singular vectors from the dim x dim Gram matrix accumulated in one pass.
_GRAM_PATH_ENTRIES = 10**8

_ORTHO_TOL = 1e-10


@dataclass(frozen=True)
class ProjectionBasis:
    """k orthonormal rows in R^n plus the associated singular values."""

    vectors: np.ndarray
    singular_values: np.ndarray

    def __post_init__(self):
        vecs = _frozen_array(self, "vectors", np.atleast_2d(self.vectors))
        svals = _frozen_array(self, "singular_values", np.atleast_1d(self.singular_values))
        if svals.shape != (vecs.shape[0],):
            raise ValueError("one singular value per basis vector expected")
        if np.any(np.diff(svals) > 0):
            raise ValueError("singular values must be sorted descending")
        gram = vecs @ vecs.T
        if not np.allclose(gram, np.eye(vecs.shape[0]), atol=_ORTHO_TOL):
            raise ValueError("basis vectors are not orthonormal")

    @property
    def k(self) -> int:
        return self.vectors.shape[0]

    @property
    def dim(self) -> int:
        return self.vectors.shape[1]

    def to_dict(self) -> dict:
        return {
            "vectors": [[float(v) for v in row] for row in self.vectors],
            "singular_values": [float(s) for s in self.singular_values],
        }

    @classmethod
    def from_dict(cls, d: dict) -> "ProjectionBasis":
        return cls(np.array(d["vectors"], dtype=float), np.array(d["singular_values"], dtype=float))

    def save(self, path) -> None:
        with open(path, "w") as fh:
            json.dump(self.to_dict(), fh, indent=2, sort_keys=True)
            fh.write("\n")

    @classmethod
    def load(cls, path) -> "ProjectionBasis":
        with open(path) as fh:
            return cls.from_dict(json.load(fh))


def _fix_signs(vectors: np.ndarray) -> np.ndarray:
    # Reproducibility convention: the entry of largest magnitude in each
    # basis vector is made positive (first such entry on ties).
    out = vectors.copy()
    for row in out:
        j = int(np.argmax(np.abs(row)))
        if row[j] < 0:
            row *= -1.0
    return out


def fit_basis(samples: SampleMatrix, k: int) -> ProjectionBasis:
    """Top-k right singular vectors of the uncentered data matrix.

    Deliberately not PCA: the data is not centered, because the guarantee
    of interest concerns the span containing the means, and centering
    would remove exactly the rank-one piece carrying the weighted mean.
    Accepts a SampleMatrix or a plain (N, dim) array.
    """
    data = samples.data if isinstance(samples, SampleMatrix) else np.atleast_2d(np.asarray(samples, dtype=float))
    n_pts, dim = data.shape
    if k < 1 or k > dim:
        raise ValueError(f"k={k} out of range for dim={dim}")
    if n_pts < k:
        raise ValueError(f"need at least k={k} samples, got {n_pts}")
    if n_pts * dim > _GRAM_PATH_ENTRIES:
        gram = np.zeros((dim, dim))
        block = max(1, _GRAM_PATH_ENTRIES // (8 * dim))
        for i in range(0, n_pts, block):
            chunk = data[i : i + block]
            gram += chunk.T @ chunk
        evals, evecs = np.linalg.eigh(gram)
        order = np.argsort(evals)[::-1][:k]
        svals = np.sqrt(np.maximum(evals[order], 0.0))
        vecs = evecs[:, order].T
    else:
        _, svals_all, vt = np.linalg.svd(data, full_matrices=False)
        svals = svals_all[:k]
        vecs = vt[:k]
    if svals[k - 1] <= svals[0] * 1e-12:
        raise ValueError(
            f"sample matrix is rank deficient: singular value {k} is "
            f"{svals[k - 1]:.3e} against top {svals[0]:.3e}"
        )
    return ProjectionBasis(_fix_signs(vecs), svals)


def project(x, basis: ProjectionBasis) -> np.ndarray:
    """Coordinates of points along the basis: rows of ``x @ V^T``."""
    x = np.asarray(x, dtype=float)
    if x.shape[-1] != basis.dim:
        raise ValueError(f"dimension mismatch: {x.shape[-1]} vs basis dim {basis.dim}")
    return x @ basis.vectors.T


def lift(coords, basis: ProjectionBasis) -> np.ndarray:
    """Map k-dimensional coordinates back to R^n; an isometry on R^k."""
    coords = np.asarray(coords, dtype=float)
    if coords.shape[-1] != basis.k:
        raise ValueError(f"dimension mismatch: {coords.shape[-1]} vs basis k {basis.k}")
    return coords @ basis.vectors
