"""Midpoint maps on the model spaces and numerical checks of their axioms."""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .report import CheckReport
from .spaces import EPS_EXACT, InternalConsistencyError, Space, GeometryError


class MidpointMap:
    """A symmetric map m(x, y) with d(m, x) = d(m, y) = d(x, y)/2.

    Instances are immutable descriptions; calling one evaluates it on
    (broadcastable) point arrays of a given space.
    """

    def __call__(self, space: Space, x, y) -> np.ndarray:
        raise NotImplementedError


@dataclass(frozen=True)
class Canonical(MidpointMap):
    """(x+y)/2 in normed spaces, the geodesic midpoint on the hyperboloid."""

    def __call__(self, space, x, y):
        return space.midpoint(x, y)

    def __str__(self):
        return "Canonical"


@dataclass(frozen=True)
class Combined(MidpointMap):
    """m(x, y) = left(left(x, y), right(x, y))."""

    left: MidpointMap
    right: MidpointMap

    def __call__(self, space, x, y):
        return self.left(space, self.left(space, x, y), self.right(space, x, y))

    def __str__(self):
        return f"Combined({self.left}, {self.right})"


@dataclass(frozen=True)
class Conjugated(MidpointMap):
    """``base`` transported by a point isometry: i^-1(base(i(x), i(y))).

    ``isometry`` is an :class:`setgeom.isometry.IsometryDesc`. In the
    provided models this reproduces the canonical map through a different
    computational route, which makes it a useful second input for
    :func:`combine_midpoint_maps`.
    """

    base: MidpointMap
    isometry: object

    def __call__(self, space, x, y):
        iso = self.isometry
        inv = iso.inverse()
        return inv.apply(space, self.base(space, iso.apply(space, x), iso.apply(space, y)))

    def __str__(self):
        return f"Conjugated({self.base}, {self.isometry.kind})"


CANONICAL = Canonical()


def combine_midpoint_maps(m1: MidpointMap, m2: MidpointMap) -> Combined:
    return Combined(m1, m2)


def midpoint(space: Space, mmap: MidpointMap, x, y) -> np.ndarray:
    return mmap(space, space.as_points(x), space.as_points(y))


def _axiom(violations: np.ndarray, tuples: dict[str, np.ndarray], tol: float) -> dict:
    k = int(np.argmax(violations))
    return {
        "worst_violation": float(violations[k]),
        "pass": bool(violations[k] <= tol),
        "witness": {name: arr[k].tolist() for name, arr in tuples.items()},
    }


def check_midpoint_axioms(
    space: Space,
    mmap: MidpointMap = CANONICAL,
    sample_count: int = 1000,
    seed: int = 0,
    tol: float = EPS_EXACT,
) -> CheckReport:
    """Evaluate the midpoint, convexity, distance-convexity and NPBC inequalities.

    Each sample draws five points x1, y1, x2, y2, z from the space's seeded
    sampler. The midpoint axiom also covers symmetry m(x, y) = m(y, x).
    """
    if sample_count < 1:
        raise GeometryError("sample_count must be >= 1")
    rng = np.random.default_rng(seed)
    pts = space.sample(rng, 5 * sample_count).reshape(5, sample_count, -1)
    x1, y1, x2, y2, z = pts
    d = space.distance
    m = lambda a, b: mmap(space, a, b)  # noqa: E731

    m11 = m(x1, y1)
    half = d(x1, y1) / 2.0
    mid_err = np.maximum.reduce(
        [np.abs(d(m11, x1) - half), np.abs(d(m11, y1) - half), d(m11, m(y1, x1))]
    )
    convex = d(m11, m(x2, y2)) - 0.5 * (d(x1, x2) + d(y1, y2))
    dist_convex = d(m11, z) - 0.5 * (d(x1, z) + d(y1, z))
    npbc = d(m(z, x1), m(z, y1)) - 0.5 * d(x1, y1)

    details = {
        "midpoint": _axiom(mid_err, {"x": x1, "y": y1}, tol),
        "convexity": _axiom(convex, {"x1": x1, "y1": y1, "x2": x2, "y2": y2}, tol),
        "distance_convexity": _axiom(dist_convex, {"x": x1, "y": y1, "z": z}, tol),
        "npbc": _axiom(npbc, {"x": x1, "y": y1, "z": z}, tol),
    }
    worst_name = max(details, key=lambda k: details[k]["worst_violation"])
    return CheckReport(
        name=f"midpoint_axioms[{space}, {mmap}]",
        passed=all(v["pass"] for v in details.values()),
        worst_violation=details[worst_name]["worst_violation"],
        tolerance=tol,
        witness={"axiom": worst_name, **details[worst_name]["witness"]},
        details={"samples": sample_count, "seed": seed, **details},
    )


def comparison_gap(space: Space, x, y, z, s, t) -> np.ndarray:
    """d(a, b) - |a_bar - b_bar| for a on [x, y] at s and b on [x, z] at t.

    Broadcasts over leading axes of the points and over ``s``, ``t``.
    """
    x, y, z = space.as_points(x), space.as_points(y), space.as_points(z)
    s = np.asarray(s, dtype=float)
    t = np.asarray(t, dtype=float)
    dxy, dxz, dyz = space.distance(x, y), space.distance(x, z), space.distance(y, z)
    # angle at the comparison vertex from the law of cosines
    cos_theta = (dxy**2 + dxz**2 - dyz**2) / (2.0 * dxy * dxz)
    slack = 1e-9 * np.maximum(1.0, np.maximum(dxy, dxz) / np.minimum(dxy, dxz))
    if np.any(np.abs(cos_theta) > 1.0 + slack):
        raise InternalConsistencyError("side lengths violate the triangle inequality")
    cos_theta = np.clip(cos_theta, -1.0, 1.0)
    a = space.geodesic_point(x, y, s)
    b = space.geodesic_point(x, z, t)
    sa, tb = s * dxy, t * dxz
    planar = np.sqrt(np.maximum(sa**2 + tb**2 - 2.0 * sa * tb * cos_theta, 0.0))
    return space.distance(a, b) - planar


def check_cat0_comparison(
    space: Space, x, y, z, s: float, t: float, tol: float = EPS_EXACT
) -> CheckReport:
    """Compare two points on a geodesic triangle with their Euclidean comparison points."""
    x, y, z = space.as_points(x), space.as_points(y), space.as_points(z)
    if min(space.distance(x, y), space.distance(x, z), space.distance(y, z)) == 0.0:
        raise GeometryError("triangle vertices must be pairwise distinct")
    if not (0.0 <= s <= 1.0 and 0.0 <= t <= 1.0):
        raise GeometryError("s and t must lie in [0, 1]")
    gap = float(comparison_gap(space, x, y, z, s, t))
    return CheckReport(
        name=f"cat0_comparison[{space}]",
        passed=gap <= tol,
        worst_violation=gap,
        tolerance=tol,
        witness={"x": x.tolist(), "y": y.tolist(), "z": z.tolist(), "s": s, "t": t},
        details={"difference": gap, "cat0_space": bool(space.cat0)},
    )


def sample_cat0_comparisons(
    space: Space, count: int, seed: int = 0, tol: float = EPS_EXACT
) -> CheckReport:
    """Run the comparison test on ``count`` seeded random triangles and parameters."""
    rng = np.random.default_rng(seed)
    x, y, z = space.sample(rng, 3 * count).reshape(3, count, -1)
    s = rng.uniform(0.0, 1.0, count)
    t = rng.uniform(0.0, 1.0, count)
    gaps = comparison_gap(space, x, y, z, s, t)
    k = int(np.argmax(gaps))
    return CheckReport(
        name=f"cat0_comparison_sampled[{space}]",
        passed=bool(gaps[k] <= tol),
        worst_violation=float(gaps[k]),
        tolerance=tol,
        witness={"x": x[k].tolist(), "y": y[k].tolist(), "z": z[k].tolist(), "s": s[k], "t": t[k]},
        details={
            "samples": count,
            "seed": seed,
            "fraction_negative": float(np.mean(gaps < 0.0)),
            "max_abs_difference": float(np.max(np.abs(gaps))),
        },
    )
