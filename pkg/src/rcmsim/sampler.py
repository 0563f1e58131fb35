"""Sampling Poisson networks on the unit cell.

A trial is: draw N ~ Poisson(rho), drop N uniform points on the unit
square, then connect each unordered pair (i, j) independently with
probability g(d_ij / r) where d_ij is the metric distance and
r = connection_radius(C, rho, b).  All randomness is counter-based
(see streams), so a trial is fully determined by
(master_seed, trial_index) and is independent of evaluation order.

Pair enumeration uses a bucket grid with cell size >= r * cutoff and a
3x3 neighborhood scan (wrapping on the torus), which is exhaustive
because the truncated kernel vanishes beyond r * cutoff.  A brute-force
O(n^2) path covers degenerate grids and serves as the oracle in tests.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from . import models as _models
from . import streams
from .errors import ModelError, ParameterError
from .geometry import LO, Metric, Point2, distance_arrays

# half of the 3x3 neighborhood: together with the same-cell triangle this
# visits every unordered cell pair exactly once
_HALF_OFFSETS = ((1, 0), (0, 1), (1, 1), (1, -1))

_EMPTY_EDGES = np.empty((0, 2), dtype=np.int64)


@dataclass(frozen=True)
class SampleParams:
    """Everything that pins down one simulated trial."""

    rho: float
    b: float
    model: _models.ConnectionModel
    metric: Metric
    master_seed: int
    trial_index: int
    r: float = field(init=False)

    def __post_init__(self):
        if not isinstance(self.metric, Metric):
            raise ParameterError(f"metric must be a Metric, got {self.metric!r}")
        if self.trial_index < 0:
            raise ParameterError("trial_index must be >= 0")
        if not self.model.validation.ok:
            raise ModelError(
                f"model failed validation: {self.model.validation}"
            )
        r = _models.connection_radius(self.model.C, self.rho, self.b)
        if self.metric is Metric.TORUS and r > 0.5:
            raise ParameterError(
                f"connection range {r:.4g} exceeds half the torus period"
            )
        object.__setattr__(self, "r", r)


@dataclass(frozen=True)
class NetworkSample:
    """One realized graph.

    points is an (n, 2) float array of unit-cell coordinates (row i is
    point i); edges is an (m, 2) int array with i < j, sorted
    lexicographically, so equal graphs compare equal.
    """

    params: SampleParams
    points: np.ndarray
    edges: np.ndarray

    @property
    def n_points(self) -> int:
        return int(self.points.shape[0])

    @property
    def n_edges(self) -> int:
        return int(self.edges.shape[0])

    @property
    def r_rho(self) -> float:
        return self.params.r

    def point(self, i: int) -> Point2:
        return Point2(float(self.points[i, 0]), float(self.points[i, 1]))

    def degrees(self) -> np.ndarray:
        return np.bincount(self.edges.ravel(), minlength=self.n_points)


@dataclass(frozen=True)
class CoupledSample:
    """Torus graph and its thinned square companion on the same points.

    square_edges is a subset of torus_edges; removed_edges is the exact
    difference.  Isolation counts therefore satisfy
    isolated(square) = isolated(torus) + newly isolated near the boundary.
    """

    params: SampleParams
    points: np.ndarray
    torus_edges: np.ndarray
    square_edges: np.ndarray
    removed_edges: np.ndarray

    @property
    def n_points(self) -> int:
        return int(self.points.shape[0])

    def torus_sample(self) -> NetworkSample:
        return NetworkSample(self.params, self.points, self.torus_edges)

    def square_sample(self) -> NetworkSample:
        return NetworkSample(self.params, self.points, self.square_edges)


def sample_points(params: SampleParams) -> np.ndarray:
    """Poisson(rho) many uniform points on the unit cell, shape (n, 2)."""
    key_n = streams.stream_key(params.master_seed, params.trial_index,
                               streams.TAG_POINT_COUNT)
    n = streams.poisson_sample(params.rho, key_n)
    key_xy = streams.stream_key(params.master_seed, params.trial_index,
                                streams.TAG_POINT_COORDS)
    u = streams.uniform_array(key_xy, np.arange(2 * n, dtype=np.uint64))
    return u.reshape(n, 2) + LO


def build_graph(params: SampleParams, points: np.ndarray,
                exact: bool = False) -> NetworkSample:
    """Realize the connection graph on the given points.

    `exact` forces the O(n^2) pair scan.  The grid path requires
    r * cutoff <= 1/2; on the square metric `exact=True` lifts that
    restriction, on the torus larger ranges are rejected outright.
    The two paths produce identical edge sets because each pair's uniform
    depends only on (master_seed, trial_index, tag, i, j).
    """
    points = np.ascontiguousarray(np.asarray(points, dtype=np.float64))
    if points.ndim != 2 or points.shape[1] != 2:
        raise ParameterError(f"points must have shape (n, 2), got {points.shape}")
    if points.size and (points.min() < LO or points.max() >= -LO):
        raise ParameterError("points outside the unit cell")
    reach = params.r * params.model.cutoff
    if reach > 0.5:
        if params.metric is Metric.TORUS:
            raise ParameterError(
                f"r * cutoff = {reach:.4g} exceeds half the torus period; "
                "reduce the range or use the square metric with exact=True"
            )
        if not exact:
            raise ParameterError(
                f"r * cutoff = {reach:.4g} too large for the bucket grid; "
                "pass exact=True for the O(n^2) scan"
            )
    n = points.shape[0]
    key = streams.stream_key(params.master_seed, params.trial_index,
                             streams.TAG_EDGES)
    if n < 2:
        return NetworkSample(params, points, _EMPTY_EDGES.copy())

    m = 0 if exact else _grid_side(reach, n)
    if m < 3:
        cand_i, cand_j = _all_pairs(n)
        edges = _realize_edges(params, points, key, cand_i, cand_j)
    else:
        edges = _grid_edges(params, points, key, m, reach)
    return NetworkSample(params, points, edges)


def thin_edges(sample: NetworkSample, keep_ratio, stream_tag: int) -> NetworkSample:
    """Independently keep each edge with probability keep_ratio(a, b).

    keep_ratio receives the two (m, 2) endpoint coordinate blocks and
    returns per-edge probabilities in [0, 1]; values outside the range
    (beyond float slack) are a model error.  keep_ratio identically 1
    returns the identical edge set.  Thinning randomness is the stream
    (master_seed, trial_index, stream_tag, i, j), independent of the
    stream that realized the edges.
    """
    if stream_tag in (streams.TAG_POINT_COUNT, streams.TAG_POINT_COORDS,
                      streams.TAG_EDGES):
        raise ParameterError(f"stream tag {stream_tag} is reserved by the sampler")
    edges = sample.edges
    if edges.shape[0] == 0:
        return NetworkSample(sample.params, sample.points, edges.copy())
    pa = sample.points[edges[:, 0]]
    pb = sample.points[edges[:, 1]]
    ratio = np.asarray(keep_ratio(pa, pb), dtype=np.float64)
    if ratio.shape != (edges.shape[0],):
        raise ModelError(
            f"keep_ratio returned shape {ratio.shape}, expected ({edges.shape[0]},)"
        )
    if np.any(ratio < -1e-12) or np.any(ratio > 1.0 + 1e-12):
        raise ModelError("keep probability outside [0, 1]")
    ratio = np.clip(ratio, 0.0, 1.0)
    key = streams.stream_key(sample.params.master_seed,
                             sample.params.trial_index, stream_tag)
    u = streams.pair_uniform_array(key, edges[:, 0], edges[:, 1])
    return NetworkSample(sample.params, sample.points, edges[u < ratio])


def couple_torus_to_square(params: SampleParams) -> CoupledSample:
    """One trial under the shared-randomness boundary coupling.

    Build the torus graph, then keep each edge with probability
    g(d_euclid / r) / g(d_torus / r).  The surviving graph is distributed
    exactly as a direct square-metric trial on the same points, and it is
    a subgraph of the torus graph, so newly isolated nodes are a
    nonnegative per-trial boundary effect.  For the unit-disk kernel the
    square graph is exactly the pairs with Euclidean distance <= r.
    """
    if params.metric is not Metric.TORUS:
        raise ParameterError("coupling starts from a torus-metric SampleParams")
    points = sample_points(params)
    torus = build_graph(params, points)
    model, r = params.model, params.r

    def ratio(pa: np.ndarray, pb: np.ndarray) -> np.ndarray:
        d_t = distance_arrays(Metric.TORUS, pa[:, 0], pa[:, 1], pb[:, 0], pb[:, 1])
        d_e = distance_arrays(Metric.SQUARE, pa[:, 0], pa[:, 1], pb[:, 0], pb[:, 1])
        g_t = model.g(d_t / r)
        g_e = model.g(d_e / r)
        # realized torus edges always have g_t > 0
        return np.divide(g_e, g_t, out=np.zeros_like(g_e), where=g_t > 0.0)

    square = thin_edges(torus, ratio, streams.TAG_COUPLING)
    removed = _edge_difference(torus.edges, square.edges, torus.n_points)
    return CoupledSample(params, points, torus.edges, square.edges, removed)


def truncation_bias(model: _models.ConnectionModel, rho: float, b: float) -> float:
    """Expected number of edges per trial lost to the kernel cutoff.

    (rho^2 r^2 / 2) * int_cutoff^inf 2 pi x g_raw(x) dx; zero for kernels
    whose truncation is definitional (unit disk, tables).
    """
    r = _models.connection_radius(model.C, rho, b)
    return 0.5 * rho * rho * r * r * _models.tail_integral(model)


def write_edge_list(sample: NetworkSample, fileobj) -> None:
    """Dump `i j d` lines after a `n_points rho b model metric seed trial`
    header; distances follow the sample's metric, floats at 17 digits."""
    if hasattr(fileobj, "write"):
        _write_edge_list(sample, fileobj)
    else:
        with open(fileobj, "w", encoding="utf-8", newline="\n") as fh:
            _write_edge_list(sample, fh)


def _write_edge_list(sample: NetworkSample, fh) -> None:
    p = sample.params
    fh.write(
        f"{sample.n_points} {p.rho:.17g} {p.b:.17g} {p.model.kind} "
        f"{p.metric.value} {p.master_seed} {p.trial_index}\n"
    )
    if sample.n_edges:
        pa = sample.points[sample.edges[:, 0]]
        pb = sample.points[sample.edges[:, 1]]
        d = distance_arrays(p.metric, pa[:, 0], pa[:, 1], pb[:, 0], pb[:, 1])
        for (i, j), dist in zip(sample.edges, d):
            fh.write(f"{i} {j} {dist:.17g}\n")


# ---------------------------------------------------------------------------
# internals


def _grid_side(reach: float, n: int) -> int:
    if reach <= 0.0:
        return 0
    m = int(1.0 / reach)
    # more cells than points buys nothing
    return max(1, min(m, 2 * int(math.isqrt(max(n, 1))) + 1, 4096))


def _all_pairs(n: int):
    if n > 4096:
        # chunk the triangle to bound memory
        blocks_i = []
        blocks_j = []
        for lo in range(0, n - 1, 2048):
            hi = min(lo + 2048, n - 1)
            ii, jj = np.meshgrid(np.arange(lo, hi), np.arange(n), indexing="ij")
            keep = jj > ii
            blocks_i.append(ii[keep])
            blocks_j.append(jj[keep])
        return np.concatenate(blocks_i), np.concatenate(blocks_j)
    ii, jj = np.triu_indices(n, k=1)
    return ii.astype(np.int64), jj.astype(np.int64)


def _realize_edges(params: SampleParams, points: np.ndarray, key: int,
                   cand_i: np.ndarray, cand_j: np.ndarray) -> np.ndarray:
    """Distance-filter candidate pairs and flip their connection coins."""
    if cand_i.size == 0:
        return _EMPTY_EDGES.copy()
    lo = np.minimum(cand_i, cand_j).astype(np.int64)
    hi = np.maximum(cand_i, cand_j).astype(np.int64)
    d = distance_arrays(params.metric,
                        points[lo, 0], points[lo, 1],
                        points[hi, 0], points[hi, 1])
    reach = params.r * params.model.cutoff
    near = d <= reach
    if not np.any(near):
        return _EMPTY_EDGES.copy()
    lo, hi, d = lo[near], hi[near], d[near]
    p = params.model.g(d / params.r)
    u = streams.pair_uniform_array(key, lo, hi)
    connected = u < p
    edges = np.column_stack((lo[connected], hi[connected]))
    if edges.shape[0] == 0:
        return _EMPTY_EDGES.copy()
    order = np.lexsort((edges[:, 1], edges[:, 0]))
    return np.ascontiguousarray(edges[order])


def _grid_edges(params: SampleParams, points: np.ndarray, key: int,
                m: int, reach: float) -> np.ndarray:
    n = points.shape[0]
    wrap = params.metric is Metric.TORUS
    cx = np.clip(((points[:, 0] - LO) * m).astype(np.int64), 0, m - 1)
    cy = np.clip(((points[:, 1] - LO) * m).astype(np.int64), 0, m - 1)
    cell = cx * m + cy
    order = np.argsort(cell, kind="stable")
    sorted_cell = cell[order]
    starts = np.searchsorted(sorted_cell, np.arange(m * m + 1))

    cand_i = []
    cand_j = []

    # same-cell pairs: each sorted position pairs with the tail of its cell
    pos = np.arange(n)
    cnt0 = starts[sorted_cell + 1] - pos - 1
    total0 = int(cnt0.sum())
    if total0:
        rep_i = np.repeat(order, cnt0)
        csum = np.concatenate(([0], np.cumsum(cnt0)))
        within = np.arange(total0) - np.repeat(csum[:-1], cnt0)
        rep_j = order[np.repeat(pos + 1, cnt0) + within]
        cand_i.append(rep_i)
        cand_j.append(rep_j)

    # cross-cell pairs over the half neighborhood
    for ox, oy in _HALF_OFFSETS:
        tx = cx + ox
        ty = cy + oy
        if wrap:
            tx %= m
            ty %= m
            src = np.arange(n)
        else:
            valid = (tx >= 0) & (tx < m) & (ty >= 0) & (ty < m)
            if not np.any(valid):
                continue
            src = np.flatnonzero(valid)
            tx, ty = tx[valid], ty[valid]
        target = tx * m + ty
        cnt = starts[target + 1] - starts[target]
        have = cnt > 0
        if not np.any(have):
            continue
        src, target, cnt = src[have], target[have], cnt[have]
        total = int(cnt.sum())
        rep_i = np.repeat(src, cnt)
        csum = np.concatenate(([0], np.cumsum(cnt)))
        within = np.arange(total) - np.repeat(csum[:-1], cnt)
        rep_j = order[np.repeat(starts[target], cnt) + within]
        cand_i.append(rep_i)
        cand_j.append(rep_j)

    if not cand_i:
        return _EMPTY_EDGES.copy()
    return _realize_edges(params, points, key,
                          np.concatenate(cand_i), np.concatenate(cand_j))


def _edge_difference(superset: np.ndarray, subset: np.ndarray, n: int) -> np.ndarray:
    if superset.shape[0] == 0:
        return _EMPTY_EDGES.copy()
    span = max(n, 1)
    keys_sup = superset[:, 0].astype(np.int64) * span + superset[:, 1]
    keys_sub = subset[:, 0].astype(np.int64) * span + subset[:, 1]
    keep = ~np.isin(keys_sup, keys_sub)
    return np.ascontiguousarray(superset[keep])
