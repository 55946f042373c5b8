"""Grid search for the mixture parameters closest to the KDE target in L2.

The search space is (means in a box)^k x (weight simplex), discretized with
step G. The objective ||p(theta) - p_kde||^2 decomposes into a constant KDE
self term, k cross terms that depend on one candidate mean each, and
k(k+1)/2 mean-pair terms, so a round precomputes small tables (cross
vectors per candidate mean position, Gram blocks between candidate sets)
and scans all combinations from them instead of touching the N KDE
components per grid point.
"""

from __future__ import annotations

import itertools
import logging
import math
import os
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field

import numpy as np

from .kde import KdeEstimate
from .l2 import cross_inner_uniform, pair_sum_uniform, self_pair_sum_uniform
from .mixtures import _frozen_array

__all__ = [
    "ParameterGrid",
    "SearchResult",
    "theoretical_grid_size",
    "enumerate_grid",
    "search",
]

logger = logging.getLogger(__name__)

DEFAULT_BUDGET = 10**8
_CHUNK = 500_000
_TRACE_LIMIT = 100_000
_SIMPLEX_TOL = 1e-12


def resolve_threads(requested: int | None = None) -> int:
    """Worker count: the request (or cpu count), capped by GMMGRID_THREADS."""
    workers = requested if requested else (os.cpu_count() or 1)
    cap = os.environ.get("GMMGRID_THREADS")
    if cap:
        workers = min(workers, max(1, int(cap)))
    return max(1, workers)


def _axis_lattice(lo: float, hi: float, step: float) -> np.ndarray:
    if hi < lo:
        raise ValueError("empty interval")
    if hi == lo:
        return np.array([lo])
    count = int(math.ceil((hi - lo) / step - 1e-9)) + 1
    return np.linspace(lo, hi, count)


def _weight_lattice(k: int, step: float, alpha_min: float) -> np.ndarray:
    """Simplex points whose k-1 free weights are positive multiples of
    step, last weight 1 - sum, dropping any point with a weight below
    alpha_min. Rows in lexicographic order of the free weights."""
    if k == 1:
        return np.array([[1.0]])
    values = np.arange(1, int(math.ceil(1.0 / step)) + 1) * step
    values = values[values < 1.0 - _SIMPLEX_TOL]
    rows = []
    for free in itertools.product(values, repeat=k - 1):
        last = 1.0 - sum(free)
        w = np.array(free + (last,))
        if w.min() >= alpha_min - _SIMPLEX_TOL:
            rows.append(w)
    return np.array(rows) if rows else np.empty((0, k))


@dataclass(frozen=True)
class ParameterGrid:
    """Discretization of (means in a box)^k x (weight simplex).

    mean_box holds one [lo, hi] interval per mean coordinate (k*dim rows);
    weight candidates are derived from step and alpha_min. mode selects
    a single full-resolution scan ("faithful") or coarse-to-fine rounds
    ("refine").
    """

    mean_box: np.ndarray
    k: int
    dim: int
    step: float
    alpha_min: float
    mode: str = "refine"

    def __post_init__(self):
        box = _frozen_array(self, "mean_box", np.atleast_2d(self.mean_box))
        if box.shape != (self.k * self.dim, 2):
            raise ValueError(f"mean_box must be ({self.k * self.dim}, 2)")
        if np.any(box[:, 1] < box[:, 0]):
            raise ValueError("mean_box intervals must satisfy lo <= hi")
        if not self.step > 0:
            raise ValueError("step must be positive")
        if self.mode not in ("faithful", "refine"):
            raise ValueError("mode must be 'faithful' or 'refine'")
        if not 0 < self.alpha_min <= 1.0 / self.k:
            raise ValueError("alpha_min must lie in (0, 1/k]")

    @classmethod
    def for_problem(cls, n: int, k: int, step: float, alpha_min: float, mode: str = "refine") -> "ParameterGrid":
        """Box [-sqrt(n/k), sqrt(n/k)] per coordinate, the range projected
        means can occupy when the originals lie in [-1, 1]^n."""
        half = math.sqrt(n / k)
        box = np.tile([-half, half], (k * k, 1))
        return cls(box, k, k, step, alpha_min, mode)

    def mean_axes(self) -> list[np.ndarray]:
        return [_axis_lattice(lo, hi, self.step) for lo, hi in self.mean_box]

    def weight_grid(self) -> np.ndarray:
        return _weight_lattice(self.k, self.step, self.alpha_min)

    def point_count(self) -> int:
        axes = self.mean_axes()
        count = len(self.weight_grid())
        for ax in axes:
            count *= len(ax)
        return count


def theoretical_grid_size(n: int, k: int, eps: float, alpha_min: float, sigma: float, c1: float = 1.0) -> float:
    """The formula-level grid size (alpha_min^4)^k / k^(3/2) *
    (eps / (8 n k^2))^(c1 k^2).

    Astronomically small even for k = 2, so it is computed and logged for
    the record, never used to set the actual step. sigma is accepted for
    signature stability; the formula does not involve it. c1 is the
    unspecified exponent constant, exposed as a parameter.
    """
    if n < 1 or k < 1:
        raise ValueError("n and k must be positive")
    if eps <= 0 or alpha_min <= 0 or sigma <= 0:
        raise ValueError("eps, alpha_min, sigma must be positive")
    log10_val = (
        4.0 * k * math.log10(alpha_min)
        - 1.5 * math.log10(k)
        + c1 * k * k * math.log10(eps / (8.0 * n * k * k))
    )
    value = 10.0**log10_val
    if value == 0.0 or value < 2.2250738585072014e-308:
        logger.warning(
            "theoretical grid size underflows double precision (10^%.1f)", log10_val
        )
    return value


def enumerate_grid(grid: ParameterGrid, budget: int = DEFAULT_BUDGET):
    """Stream of (means, weights) grid points in lexicographic order:
    mean coordinates vary slowest, weight rows fastest."""
    axes = grid.mean_axes()
    weights = grid.weight_grid()
    if len(weights) == 0:
        raise ValueError("empty grid: no simplex point satisfies alpha_min with this step")
    total = grid.point_count()
    if total > budget:
        raise ValueError(
            f"grid has {total} points, over the budget of {budget}; "
            "use refine mode or a coarser step"
        )
    k, dim = grid.k, grid.dim
    for coords in itertools.product(*axes):
        means = np.array(coords).reshape(k, dim)
        for w in weights:
            yield means.copy(), w.copy()


@dataclass(frozen=True)
class SearchResult:
    """Argmin of the objective over the enumerated grid."""

    means: np.ndarray
    weights: np.ndarray
    objective: float
    evaluations: int
    rounds: tuple
    trace: tuple | None = None

    def __post_init__(self):
        _frozen_array(self, "means", self.means)
        _frozen_array(self, "weights", self.weights)

    def to_dict(self) -> dict:
        d = {
            "means": [[float(v) for v in row] for row in self.means],
            "weights": [float(w) for w in self.weights],
            "objective": float(self.objective),
            "evaluations": int(self.evaluations),
            "rounds": list(self.rounds),
        }
        if self.trace is not None:
            d["trace"] = [
                {
                    "means": [[float(v) for v in row] for row in m],
                    "weights": [float(x) for x in w],
                    "objective": float(o),
                }
                for m, w, o in self.trace
            ]
        return d


class _KdeCache:
    """Immutable per-search tables for the KDE block of the objective."""

    def __init__(self, kde: KdeEstimate):
        self.points = kde.mixture.means
        self.weights = kde.mixture.weights
        self.h = float(kde.bandwidth)
        self.dim = kde.dim
        self._self_norm: float | None = None

    @property
    def self_norm_sq(self) -> float:
        if self._self_norm is None:
            self._self_norm = self_pair_sum_uniform(
                self.points, self.weights, 2.0 * self.h * self.h
            )
        return self._self_norm

    def cross(self, candidates: np.ndarray, sigma: float) -> np.ndarray:
        var = sigma * sigma + self.h * self.h
        return cross_inner_uniform(candidates, self.points, self.weights, var)


def _candidate_matrix(axes: list[np.ndarray]) -> np.ndarray:
    mesh = np.meshgrid(*axes, indexing="ij")
    return np.stack([m.ravel() for m in mesh], axis=1)


def _scan_tables(cache: _KdeCache, per_mean_axes: list[list[np.ndarray]], weights: np.ndarray, sigma: float):
    """Cross vectors and Gram blocks for one round's candidate sets.

    Candidate sets shared between means (round one uses the same box for
    every mean) are computed once.
    """
    k = len(per_mean_axes)
    keys = []
    unique: dict[tuple, int] = {}
    cand_sets: list[np.ndarray] = []
    for axes in per_mean_axes:
        key = tuple(ax.tobytes() for ax in axes)
        if key not in unique:
            unique[key] = len(cand_sets)
            cand_sets.append(_candidate_matrix(axes))
        keys.append(unique[key])
    cross = [cache.cross(c, sigma) for c in cand_sets]
    pair_var = 2.0 * sigma * sigma
    scale = (2.0 * np.pi * pair_var) ** (-cache.dim / 2.0)
    grams: dict[tuple, np.ndarray] = {}
    for si in range(len(cand_sets)):
        for sj in range(si, len(cand_sets)):
            a, b = cand_sets[si], cand_sets[sj]
            d2 = (
                (a * a).sum(axis=1)[:, None]
                + (b * b).sum(axis=1)[None, :]
                - 2.0 * (a @ b.T)
            )
            grams[(si, sj)] = scale * np.exp(-d2 / (2.0 * pair_var))
    self_const = (4.0 * np.pi * sigma * sigma) ** (-cache.dim / 2.0)
    return {
        "keys": keys,
        "cands": cand_sets,
        "cross": cross,
        "grams": grams,
        "sizes": [cand_sets[keys[i]].shape[0] for i in range(k)],
        "w_rows": weights,
        "w_self": self_const * (weights**2).sum(axis=1),
    }


def _gram_block(tables, i: int, j: int) -> np.ndarray:
    si, sj = tables["keys"][i], tables["keys"][j]
    if (si, sj) in tables["grams"]:
        return tables["grams"][(si, sj)]
    return tables["grams"][(sj, si)].T


def _scan_chunk(tables, start: int, stop: int, collect: bool):
    k = len(tables["sizes"])
    sizes = tables["sizes"]
    w_rows = tables["w_rows"]
    wcount = w_rows.shape[0]
    midx = np.arange(start, stop, dtype=np.int64)
    a = [None] * k
    rem = midx
    for i in reversed(range(k)):
        a[i] = rem % sizes[i]
        rem = rem // sizes[i]
    cvals = [tables["cross"][tables["keys"][i]][a[i]] for i in range(k)]
    gvals = {}
    for i in range(k):
        for j in range(i + 1, k):
            gvals[(i, j)] = _gram_block(tables, i, j)[a[i], a[j]]
    obj = np.empty((stop - start, wcount))
    for widx in range(wcount):
        w = w_rows[widx]
        col = np.full(stop - start, tables["w_self"][widx])
        for i in range(k):
            col -= (2.0 * w[i]) * cvals[i]
        for i in range(k):
            for j in range(i + 1, k):
                col += (2.0 * w[i] * w[j]) * gvals[(i, j)]
        obj[:, widx] = col
    flat_local = int(np.argmin(obj.ravel()))
    best = (float(obj.ravel()[flat_local]), start * wcount + flat_local)
    if collect:
        return best, obj.ravel()
    return best, None


def _decode(tables, flat: int):
    k = len(tables["sizes"])
    wcount = tables["w_rows"].shape[0]
    widx = flat % wcount
    midx = flat // wcount
    idx = [0] * k
    for i in reversed(range(k)):
        idx[i] = int(midx % tables["sizes"][i])
        midx //= tables["sizes"][i]
    means = np.stack([tables["cands"][tables["keys"][i]][idx[i]] for i in range(k)])
    return means, tables["w_rows"][widx].copy()


def _scan_round(cache, per_mean_axes, weights, sigma, threads, collect_trace):
    tables = _scan_tables(cache, per_mean_axes, weights, sigma)
    total_means = 1
    for s in tables["sizes"]:
        total_means *= s
    wcount = weights.shape[0]
    if wcount == 0:
        raise ValueError("empty grid: no simplex point satisfies alpha_min with this step")
    chunks = [(s, min(s + _CHUNK, total_means)) for s in range(0, total_means, _CHUNK)]
    collect = collect_trace and total_means * wcount <= _TRACE_LIMIT
    if threads > 1 and len(chunks) > 1 and not collect:
        with ThreadPoolExecutor(max_workers=threads) as pool:
            results = list(pool.map(lambda c: _scan_chunk(tables, *c, False), chunks))
    else:
        results = [_scan_chunk(tables, *c, collect) for c in chunks]
    # Per-chunk minima merge by (objective, flat index): ties resolve to the
    # lexicographically smallest grid index independent of worker count.
    best_obj, best_flat = math.inf, -1
    objs = []
    for (obj, flat), chunk_objs in results:
        if obj < best_obj or (obj == best_obj and flat < best_flat):
            best_obj, best_flat = obj, flat
        if chunk_objs is not None:
            objs.append(chunk_objs)
    means, w = _decode(tables, best_flat)
    trace = None
    if collect:
        allobj = np.concatenate(objs) + cache.self_norm_sq
        trace = [(*_decode(tables, f), float(allobj[f])) for f in range(allobj.size)]
    return means, w, best_obj, total_means * wcount, trace


def _refined_axes(center: float, lo: float, hi: float, step: float, half_width: float) -> np.ndarray:
    j = int(math.floor(half_width / step + 1e-9))
    vals = center + np.arange(-j, j + 1) * step
    vals = vals[(vals >= lo - 1e-12) & (vals <= hi + 1e-12)]
    return np.clip(vals, lo, hi)


def _refined_weights(k: int, centers: np.ndarray, step: float, half_width: float, alpha_min: float) -> np.ndarray:
    if k == 1:
        return np.array([[1.0]])
    j = int(math.floor(half_width / step + 1e-9))
    per_axis = []
    for c in centers[:-1]:
        vals = c + np.arange(-j, j + 1) * step
        per_axis.append(vals[(vals > _SIMPLEX_TOL) & (vals < 1.0 - _SIMPLEX_TOL)])
    rows = []
    for free in itertools.product(*per_axis):
        last = 1.0 - sum(free)
        w = np.array(free + (last,))
        if w.min() >= alpha_min - _SIMPLEX_TOL:
            rows.append(w)
    return np.array(rows) if rows else np.empty((0, k))


def search(
    p_kde: KdeEstimate,
    grid: ParameterGrid,
    sigma: float,
    rounds: int = 3,
    budget: int = DEFAULT_BUDGET,
    threads: int | None = None,
    full_trace: bool = False,
) -> SearchResult:
    """Minimize ||p(theta) - p_kde||^2 over the grid.

    Faithful mode scans the grid once at full resolution. Refine mode runs
    ``rounds`` scans, each shrinking every box to a quarter width around
    the incumbent and halving the step, and returns the final incumbent.
    Same inputs give the identical result, including the evaluation count;
    objective ties go to the lexicographically smallest grid index.
    """
    if not sigma > 0:
        raise ValueError("sigma must be positive")
    cache = _KdeCache(p_kde)
    if cache.dim != grid.dim:
        raise ValueError("KDE dimension disagrees with the grid")
    workers = resolve_threads(threads)
    k, dim = grid.k, grid.dim
    n_rounds = rounds if grid.mode == "refine" else 1
    box = grid.mean_box
    widths = box[:, 1] - box[:, 0]
    step = grid.step
    per_mean_axes = [
        [_axis_lattice(*box[i * dim + d], step) for d in range(dim)] for i in range(k)
    ]
    weights = grid.weight_grid()
    evaluations = 0
    round_log = []
    trace: list | None = [] if full_trace else None
    best = None
    for rnd in range(1, n_rounds + 1):
        count = weights.shape[0]
        for axes in per_mean_axes:
            for ax in axes:
                count *= ax.size
        if count > budget:
            raise ValueError(
                f"round {rnd} grid has {count} points, over the budget of {budget}; "
                "use refine mode or a coarser step"
            )
        means, w, raw_obj, n_evals, round_trace = _scan_round(
            cache, per_mean_axes, weights, sigma, workers, full_trace
        )
        evaluations += n_evals
        best = (means, w, raw_obj)
        if trace is not None and round_trace is not None:
            trace.extend(round_trace)
        round_log.append(
            {
                "round": rnd,
                "step": step,
                "evaluations": n_evals,
                "objective": max(raw_obj + cache.self_norm_sq, 0.0),
                "means": [[float(v) for v in row] for row in means],
                "weights": [float(x) for x in w],
            }
        )
        if rnd == n_rounds:
            break
        step /= 2.0
        half = widths / 4.0**rnd / 2.0
        per_mean_axes = [
            [
                _refined_axes(means[i, d], *box[i * dim + d], step, half[i * dim + d])
                for d in range(dim)
            ]
            for i in range(k)
        ]
        weights = _refined_weights(k, w, step, 1.0 / 4.0**rnd / 2.0, grid.alpha_min)
    means, w, raw_obj = best
    return SearchResult(
        means=means,
        weights=w,
        objective=max(raw_obj + cache.self_norm_sq, 0.0),
        evaluations=evaluations,
        rounds=tuple(round_log),
        trace=tuple(trace) if trace else None,
    )
