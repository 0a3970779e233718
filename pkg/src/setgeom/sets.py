"""Finite point clouds as stand-ins for compact sets, and Hausdorff-metric tools."""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np
from scipy.spatial import cKDTree

from .spaces import GeometryError, Hyperbolic, Space

DEDUP_TOL = 1e-12
# pairs evaluated per block by the brute-force kernels
_BLOCK = 1 << 20
# below this many pairs the KD-tree costs more than it saves
_TREE_MIN_PAIRS = 1 << 14


@dataclass(frozen=True, eq=False)
class Cloud:
    """Nonempty finite point set in one space.

    ``resolution`` is the declared Hausdorff distance to the compact set the
    cloud stands for (0 when the finite set is itself the object of
    interest). Points closer than 1e-12 are merged on construction.
    """

    space: Space
    points: np.ndarray
    resolution: float = 0.0

    def __post_init__(self):
        pts = self.space.as_points(self.points)
        if pts.ndim == 1:
            pts = pts[None, :]
        if pts.ndim != 2 or len(pts) == 0:
            raise GeometryError("a cloud needs a nonempty (n, D) array of points")
        if self.resolution < 0:
            raise GeometryError("resolution must be nonnegative")
        pts = _dedupe(self.space, pts)
        pts.setflags(write=False)
        object.__setattr__(self, "points", pts)
        object.__setattr__(self, "resolution", float(self.resolution))

    def __len__(self):
        return len(self.points)

    def with_resolution(self, resolution: float) -> "Cloud":
        return Cloud(self.space, self.points, resolution)

    def to_dict(self) -> dict:
        return {
            "space": self.space.to_dict(),
            "resolution": self.resolution,
            "points": self.points.tolist(),
        }


def _dedupe(space: Space, pts: np.ndarray) -> np.ndarray:
    if len(pts) < 2:
        return np.array(pts, dtype=float)
    coords = space.chart(pts, base=pts[0] if isinstance(space, Hyperbolic) else None)
    lo, _ = space.chart_bounds(coords)
    pairs = cKDTree(coords).query_pairs(
        DEDUP_TOL / lo * (1 + 1e-9) + 1e-300, p=space.chart_p, output_type="ndarray"
    )
    if len(pairs) == 0:
        return np.array(pts, dtype=float)
    close = space.distance(pts[pairs[:, 0]], pts[pairs[:, 1]]) <= DEDUP_TOL
    pairs = pairs[close]
    drop = np.zeros(len(pts), dtype=bool)
    # pairs come back with i < j; keep the earliest point of every cluster
    for i, j in sorted(map(tuple, pairs)):
        if not drop[i]:
            drop[j] = True
    return np.array(pts[~drop], dtype=float)


def _check_space(space: Space, *clouds: Cloud):
    for c in clouds:
        if c.space != space:
            raise GeometryError(f"cloud lives in {c.space}, expected {space}")


class NeighborIndex:
    """Exact nearest-point queries against a fixed point array.

    Candidates come from a KD-tree over Euclidean chart coordinates of the
    space; the returned distances are always recomputed with the space's
    own distance kernel, so results agree bit for bit with brute force.
    """

    def __init__(self, space: Space, points: np.ndarray, base=None):
        self.space = space
        self.points = space.as_points(points)
        if base is None and isinstance(space, Hyperbolic):
            base = self.points[0]
        self.base = base
        self.coords = space.chart(self.points, base=base)
        self.tree = cKDTree(self.coords)
        self._lo = space.chart_bounds(self.coords)[0]

    def nearest(self, queries: np.ndarray, k: int = 4) -> tuple[np.ndarray, np.ndarray]:
        """Distances to and indices of the nearest indexed point for each query."""
        queries = self.space.as_points(queries).reshape(-1, self.points.shape[1])
        n = len(self.points)
        k = min(k, n)
        qc = self.space.chart(queries, base=self.base)
        chart_d, idx = self.tree.query(qc, k=k, p=self.space.chart_p)
        if k == 1:
            chart_d, idx = chart_d[:, None], idx[:, None]
        exact = self.space.distance(queries[:, None, :], self.points[idx])
        j = np.argmin(exact, axis=1)
        best = exact[np.arange(len(queries)), j]
        best_idx = idx[np.arange(len(queries)), j]
        if k < n:
            # unseen points have chart distance >= the k-th one; certify or fall back
            bound = best * (1.0 + 1e-9) / self._lo
            unsure = np.flatnonzero(chart_d[:, -1] <= bound)
            for q in unsure:
                cand = self.tree.query_ball_point(
                    qc[q], bound[q] * (1 + 1e-9) + 1e-300, p=self.space.chart_p
                )
                cand = np.asarray(cand, dtype=int)
                dq = self.space.distance(queries[q], self.points[cand])
                c = int(np.argmin(dq))
                best[q], best_idx[q] = dq[c], cand[c]
        return best, best_idx

    def distance(self, queries: np.ndarray) -> np.ndarray:
        return self.nearest(queries)[0]


def _brute_min_dist(space: Space, Q: np.ndarray, P: np.ndarray) -> np.ndarray:
    out = np.empty(len(Q))
    step = max(1, _BLOCK // max(1, len(P)))
    for s in range(0, len(Q), step):
        out[s : s + step] = np.min(space._distance(Q[s : s + step, None, :], P[None, :, :]), axis=1)
    return out


def min_distances(space: Space, queries, P, method: str = "auto") -> np.ndarray:
    """min_{p in P} d(q, p) for every query q.

    ``method`` is "brute", "tree" or "auto". Both routes return identical
    floats; "auto" uses the tree for large inputs.
    """
    Q = space.as_points(queries).reshape(-1, space.ambient_dim)
    P = space.as_points(P).reshape(-1, space.ambient_dim)
    if method == "auto":
        method = "tree" if len(Q) * len(P) > _TREE_MIN_PAIRS and len(P) > 8 else "brute"
    if method == "brute":
        return _brute_min_dist(space, Q, P)
    if method == "tree":
        return NeighborIndex(space, P).distance(Q)
    raise ValueError(f"unknown method {method!r}")


def directed_hausdorff(space: Space, A: Cloud, B: Cloud, method: str = "auto") -> float:
    """max_{a in A} min_{b in B} d(a, b)."""
    _check_space(space, A, B)
    return float(np.max(min_distances(space, A.points, B.points, method)))


def hausdorff_distance(space: Space, A: Cloud, B: Cloud, method: str = "auto") -> float:
    return max(directed_hausdorff(space, A, B, method), directed_hausdorff(space, B, A, method))


def tubular_contains(space: Space, A: Cloud, r: float, x, slack: float = 0.0) -> bool:
    """Whether ``x`` lies in the closed r-neighbourhood of A, widened by ``slack``."""
    if r < 0 or slack < 0:
        raise GeometryError("r and slack must be nonnegative")
    _check_space(space, A)
    return bool(dist_to_set(space, x, A) <= r + slack)


def dist_to_set(space: Space, x, C: Cloud):
    """Distance from a point (or each row of a point array) to the cloud."""
    _check_space(space, C)
    x = space.as_points(x)
    d = min_distances(space, x.reshape(-1, space.ambient_dim), C.points)
    return float(d[0]) if x.ndim == 1 else d.reshape(x.shape[:-1])


def diameter(space: Space, A: Cloud) -> float:
    _check_space(space, A)
    P = A.points
    best = 0.0
    step = max(1, _BLOCK // len(P))
    for s in range(0, len(P), step):
        best = max(best, float(np.max(space._distance(P[s : s + step, None, :], P[None, :, :]))))
    return best


def _directions(rng: np.random.Generator, count: int, dim: int) -> np.ndarray:
    g = rng.standard_normal((count, dim))
    norms = np.linalg.norm(g, axis=1)
    g[norms == 0] = 1.0
    return g


def sphere_net(
    space: Space, p, r: float, count: int, seed: int = 0, antipodal: bool = False
) -> Cloud:
    """``count`` seeded points at distance exactly ``r`` from ``p``.

    With ``antipodal`` every sample q is paired with geodesic_point(q, p, 2),
    the opposite point of the sphere through p.
    """
    if r <= 0 or count < 1:
        raise GeometryError("sphere_net needs r > 0 and count >= 1")
    p = space.as_points(p)
    rng = np.random.default_rng(seed)
    pts = space.sphere_point(p, r, _directions(rng, count, space.dim))
    if antipodal:
        pts = np.concatenate([pts, space.geodesic_point(pts, p, 2.0)])
    return Cloud(space, pts)


def ball_net(space: Space, p, r: float, count: int, seed: int = 0) -> Cloud:
    """Seeded cloud inside the closed ball B_r(p), centre first.

    Radii are drawn with density proportional to rho^(dim-1). The declared
    resolution is an empirical covering radius: the largest distance from
    4*count independent probe points of the ball to the net.
    """
    if r <= 0 or count < 1:
        raise GeometryError("ball_net needs r > 0 and count >= 1")
    p = space.as_points(p)
    rng = np.random.default_rng(seed)

    def draw(n):
        radii = r * rng.uniform(0.0, 1.0, n) ** (1.0 / space.dim)
        return space.sphere_point(p, radii, _directions(rng, n, space.dim))

    pts = np.concatenate([p[None, :], draw(count - 1)]) if count > 1 else p[None, :]
    probes = draw(4 * count)
    resolution = float(np.max(min_distances(space, probes, pts)))
    return Cloud(space, pts, resolution)


def random_cloud(
    space: Space, rng: np.random.Generator, size: int, radius: float, center=None
) -> Cloud:
    """``size`` points in the ball of the given radius about ``center``.

    The centre defaults to a sample from the space's sampler.
    """
    if center is None:
        center = space.sample(rng, 1)[0]
    radii = radius * rng.uniform(0.0, 1.0, size) ** (1.0 / space.dim)
    pts = space.sphere_point(center, radii, _directions(rng, size, space.dim))
    return Cloud(space, pts)
