"""Midpoint-convex hulls of clouds and midpoint operators on set space.

``m_convex_hull`` closes a cloud under a midpoint map by repeated rounds
of pairwise midpoints, thinning each round to a net. Only pairs with at
least one point added in the previous round are formed: midpoints of
older pairs are already present up to the thinning radius.
"""

from __future__ import annotations

import logging
from dataclasses import dataclass, field

import numpy as np

from .midpoint import CANONICAL, MidpointMap
from .sets import Cloud, NeighborIndex, _check_space, hausdorff_distance, min_distances
from .spaces import GeometryError, Hyperbolic, Space

log = logging.getLogger(__name__)

_PAIR_BLOCK = 1 << 18


class HullNonConvergenceError(RuntimeError):
    """The hull iteration hit ``max_iterations`` with the gap still above ``tol``."""

    def __init__(self, message: str, last_iterate: Cloud, last_gap: float, gaps: list[float]):
        super().__init__(message)
        self.last_iterate = last_iterate
        self.last_gap = last_gap
        self.gaps = gaps


class EmptyIntersectionError(RuntimeError):
    """No candidate survived the neighbourhood filter; the candidate cloud is too coarse."""


@dataclass(frozen=True)
class HullParams:
    tol: float = 1e-3
    max_iterations: int = 50
    decimation_radius: float | None = None  # defaults to tol / 4

    def __post_init__(self):
        if not self.tol > 0:
            raise GeometryError("tol must be positive")
        if self.max_iterations < 1:
            raise GeometryError("max_iterations must be positive")
        if self.decimation_radius is None:
            object.__setattr__(self, "decimation_radius", self.tol / 4.0)
        if not 0 <= self.decimation_radius <= self.tol / 4.0:
            raise GeometryError("decimation_radius must lie in [0, tol/4]")


@dataclass
class HullTrace:
    gaps: list[float] = field(default_factory=list)
    sizes: list[int] = field(default_factory=list)

    @property
    def iterations(self) -> int:
        return len(self.gaps)

    @property
    def gaps_nonincreasing(self) -> bool:
        return all(b <= a for a, b in zip(self.gaps, self.gaps[1:]))


def _chart_base(space: Space, pts: np.ndarray):
    return pts[0] if isinstance(space, Hyperbolic) else None


def grid_thin(space: Space, pts: np.ndarray, radius: float, base=None) -> np.ndarray:
    """Indices of a subset such that every point is within ``radius`` of it.

    Points are bucketed into chart cubes small enough that a cube has
    diameter <= radius in the space's metric; the first point of every
    occupied cube is kept, so the result is deterministic.
    """
    if len(pts) == 0 or radius <= 0:
        return np.arange(len(pts))
    coords = space.chart(pts, base=base)
    _, up = space.chart_bounds(coords)
    side = radius / (up * coords.shape[1] ** (1.0 / space.chart_p)) * (1.0 - 1e-9)
    keys = np.floor(coords / side).astype(np.int64)
    _, first = np.unique(keys, axis=0, return_index=True)
    return np.sort(first)


def _new_pairs(start: int, stop: int):
    # all (i, j) with start <= i < stop and j < i
    step = max(1, _PAIR_BLOCK // max(1, stop))
    for i0 in range(start, stop, step):
        i1 = min(stop, i0 + step)
        ii, jj = np.meshgrid(np.arange(i0, i1), np.arange(i1), indexing="ij")
        keep = jj < ii
        yield ii[keep], jj[keep]


class _CellGrid:
    """Chart cubes of metric diameter <= radius, with integer codes.

    The grid is fixed from the hull's input: the hull stays inside the
    input's chart bounding box (Euclidean, l^p) or chart ball (hyperbolic),
    so the metric bound on a cube holds for every later point. Points
    outside the coded box get code -1 and are treated as unseen.
    """

    def __init__(self, space: Space, pts: np.ndarray, radius: float, base):
        self.space, self.base = space, base
        coords = space.chart(pts, base=base)
        _, up = space.chart_bounds(coords)
        if isinstance(space, Hyperbolic):
            rho = float(np.sqrt(np.max(np.sum(coords**2, axis=1))))
            lo, hi = np.full(coords.shape[1], -rho), np.full(coords.shape[1], rho)
        else:
            lo, hi = coords.min(axis=0), coords.max(axis=0)
        self.side = radius / (up * coords.shape[1] ** (1.0 / space.chart_p)) * (1.0 - 1e-9)
        self.lo = lo - self.side
        self.shape = np.floor((hi + self.side - self.lo) / self.side).astype(np.int64) + 2
        if np.prod(self.shape.astype(float)) >= 2.0**62:
            raise GeometryError("hull extent too large for the requested decimation radius")
        self.occupied = np.empty(0, dtype=np.int64)

    def codes(self, pts: np.ndarray) -> np.ndarray:
        keys = np.floor((self.space.chart(pts, base=self.base) - self.lo) / self.side).astype(np.int64)
        valid = np.all((keys >= 0) & (keys < self.shape), axis=1)
        code = np.zeros(len(pts), dtype=np.int64)
        for k in range(keys.shape[1]):
            code = code * self.shape[k] + keys[:, k]
        return np.where(valid, code, -1)

    def is_occupied(self, code: np.ndarray) -> np.ndarray:
        pos = np.searchsorted(self.occupied, code)
        pos = np.minimum(pos, max(len(self.occupied) - 1, 0))
        hit = self.occupied[pos] == code if len(self.occupied) else np.zeros(len(code), bool)
        return hit & (code >= 0)

    def add(self, code: np.ndarray):
        self.occupied = np.union1d(self.occupied, code[code >= 0])


def _first_per_cell(code: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
    """Index of the first member of each cell, and each element's representative."""
    out_of_box = code < 0
    # out-of-box points each form their own cell
    code = np.where(out_of_box, -1 - np.arange(len(code)), code)
    _, first, inverse = np.unique(code, return_index=True, return_inverse=True)
    return first, first[inverse]


def m_convex_hull_traced(
    space: Space, mmap: MidpointMap, A: Cloud, params: HullParams = HullParams()
) -> tuple[Cloud, HullTrace]:
    """Like :func:`m_convex_hull`, also returning per-round gaps and sizes.

    The recorded gap of a round is an upper bound on the Hausdorff distance
    between consecutive iterates: midpoints falling in an occupied grid
    cube are bounded by the thinning radius, the rest are measured exactly
    through a representative per cube.
    """
    _check_space(space, A)
    r = params.decimation_radius
    P = np.array(A.points)
    base = _chart_base(space, P)
    grid = _CellGrid(space, P, r, base) if r > 0 else None
    if grid is not None:
        grid.add(grid.codes(P))
    trace = HullTrace()
    start = 0
    gap = np.inf
    for _ in range(params.max_iterations):
        index = NeighborIndex(space, P, base=base)
        stop = len(P)
        gap = 0.0
        fresh = []
        for ii, jj in _new_pairs(start, stop):
            mids = mmap(space, P[ii], P[jj])
            if grid is None:
                d = index.distance(mids)
                gap = max(gap, float(d.max()))
                fresh.append(mids[d > r])
                continue
            code = grid.codes(mids)
            seen = grid.is_occupied(code)
            if seen.any():
                gap = max(gap, r)
            mids, code = mids[~seen], code[~seen]
            if len(mids) == 0:
                continue
            first, rep = _first_per_cell(code)
            d_rep = np.empty(len(mids))
            d_rep[first] = index.distance(mids[first])
            bound = d_rep[rep] + space._distance(mids, mids[rep])
            gap = max(gap, float(bound.max()))
            keep = first[d_rep[first] > r]
            fresh.append(mids[keep])
        if fresh and sum(len(f) for f in fresh):
            fresh = np.concatenate(fresh)
            if grid is not None:
                code = grid.codes(fresh)
                first, _ = _first_per_cell(code)
                first = np.sort(first)
                fresh, code = fresh[first], code[first]
                grid.add(code)
            P = np.concatenate([P, fresh])
        start = stop
        trace.gaps.append(gap)
        trace.sizes.append(len(P))
        log.debug("hull round %d: gap %.3g, %d points", trace.iterations, gap, len(P))
        if gap <= params.tol:
            return Cloud(space, P, A.resolution + 2.0 * params.tol), trace
    last = Cloud(space, P, A.resolution + 2.0 * params.tol)
    raise HullNonConvergenceError(
        f"hull did not converge in {params.max_iterations} rounds (last gap {gap:.3g})",
        last,
        gap,
        trace.gaps,
    )


def m_convex_hull(
    space: Space, mmap: MidpointMap, A: Cloud, params: HullParams = HullParams()
) -> Cloud:
    """Net of the closed m-convex hull of A.

    The output contains A and has resolution A.resolution + 2*tol.
    """
    return m_convex_hull_traced(space, mmap, A, params)[0]


def pairwise_midpoints(space: Space, mmap: MidpointMap, A: Cloud, B: Cloud) -> np.ndarray:
    """All m(a, b) for a in A, b in B, as an (|A|*|B|, D) array."""
    _check_space(space, A, B)
    a = np.repeat(A.points, len(B), axis=0)
    b = np.tile(B.points, (len(A), 1))
    return mmap(space, a, b)


def midpoint_set_M(
    space: Space,
    mmap: MidpointMap,
    A: Cloud,
    B: Cloud,
    params: HullParams = HullParams(),
) -> Cloud:
    """Hull of all pairwise midpoints of A and B.

    The midpoint cloud is thinned to ``params.decimation_radius`` before
    the hull iteration.
    """
    mids = pairwise_midpoints(space, mmap, A, B)
    base = _chart_base(space, mids)
    mids = mids[grid_thin(space, mids, params.decimation_radius, base)]
    res = 0.5 * (A.resolution + B.resolution) + params.decimation_radius
    return m_convex_hull(space, mmap, Cloud(space, mids, res), params)


def midpoint_set_filtered(space: Space, A: Cloud, B: Cloud, candidates: Cloud, slack: float) -> Cloud:
    """Candidates lying in both closed d_H(A, B)/2 neighbourhoods of A and of B."""
    if slack < 0:
        raise GeometryError("slack must be nonnegative")
    _check_space(space, A, B, candidates)
    r = 0.5 * hausdorff_distance(space, A, B)
    X = candidates.points
    keep = (min_distances(space, X, A.points) <= r + slack) & (
        min_distances(space, X, B.points) <= r + slack
    )
    if not keep.any():
        raise EmptyIntersectionError(
            f"no candidate within {r:.6g} + {slack:.3g} of both sets; refine the candidate cloud"
        )
    return Cloud(space, X[keep], candidates.resolution)


def default_candidates(
    space: Space,
    mmap: MidpointMap,
    A: Cloud,
    B: Cloud,
    params: HullParams = HullParams(),
    include_hull: bool = True,
) -> Cloud:
    """Candidate points for the neighbourhood-intersection midpoint set.

    The union of midpoint_set_M(A, B) (when ``include_hull``), all raw
    pairwise midpoints, and the points at t = 0.25, 0.5, 0.75 on the
    geodesics between cross pairs, thinned to the decimation radius.
    """
    parts = []
    if include_hull:
        parts.append(midpoint_set_M(space, mmap, A, B, params).points)
    parts.append(pairwise_midpoints(space, mmap, A, B))
    a = np.repeat(A.points, len(B), axis=0)
    b = np.tile(B.points, (len(A), 1))
    moving = space._distance(a, b) > 0
    for t in (0.25, 0.5, 0.75):
        parts.append(space.geodesic_point(a[moving], b[moving], t))
    pts = np.concatenate(parts)
    # hull points first so that thinning keeps them
    pts = pts[grid_thin(space, pts, params.decimation_radius, _chart_base(space, pts))]
    return Cloud(space, pts, 0.0)


def midpoint_set_frak(
    space: Space,
    mmap: MidpointMap,
    A: Cloud,
    B: Cloud,
    params: HullParams = HullParams(),
    slack: float | None = None,
    convex: bool = True,
) -> Cloud:
    """Neighbourhood-intersection midpoint set with the default candidates.

    ``convex=False`` skips the hull part of the candidate generator, for
    arbitrary compact sets.
    """
    if slack is None:
        slack = A.resolution + B.resolution + 2.0 * params.tol
    cand = default_candidates(space, mmap, A, B, params, include_hull=convex)
    return midpoint_set_filtered(space, A, B, cand, slack)


__all__ = [
    "EmptyIntersectionError",
    "HullNonConvergenceError",
    "HullParams",
    "HullTrace",
    "default_candidates",
    "grid_thin",
    "m_convex_hull",
    "m_convex_hull_traced",
    "midpoint_set_M",
    "midpoint_set_filtered",
    "midpoint_set_frak",
    "pairwise_midpoints",
]
