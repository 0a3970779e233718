"""Model geodesic metric spaces.

Three exact models are provided: Euclidean space, finite dimensional
l^p spaces with 1 < p < inf, and real hyperbolic space in the hyperboloid
(Minkowski) model. Points are plain float arrays whose last axis holds the
ambient coordinates; every method broadcasts over leading axes.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

EPS_EXACT = 1e-9
EPS_SET = 1e-6
SHEET_TOL = 1e-9


class GeometryError(ValueError):
    """Invalid input for a geometric operation."""


class DegenerateGeodesicError(GeometryError):
    """Geodesic through two coincident points is not determined."""


class InternalConsistencyError(RuntimeError):
    """A metric identity failed in a way no metric space allows."""


@dataclass(frozen=True)
class Space:
    """Base class; use :class:`Euclidean`, :class:`NormedLp` or :class:`Hyperbolic`."""

    dim: int

    kind = "abstract"
    uniquely_geodesic = True
    geodesically_complete = True
    geodesics_do_not_split = True
    cat0 = False

    def __post_init__(self):
        if int(self.dim) != self.dim or self.dim < 1:
            raise GeometryError(f"dimension must be a positive integer, got {self.dim!r}")

    @property
    def ambient_dim(self) -> int:
        return self.dim

    def as_points(self, x) -> np.ndarray:
        """Coerce ``x`` to a float array of points and validate it."""
        x = np.asarray(x, dtype=float)
        if x.ndim == 0 or x.shape[-1] != self.ambient_dim:
            raise GeometryError(
                f"{self} expects {self.ambient_dim} coordinates per point, got shape {x.shape}"
            )
        if not np.all(np.isfinite(x)):
            raise GeometryError("point coordinates must be finite")
        return x

    # metric structure -------------------------------------------------

    def distance(self, x, y) -> np.ndarray | float:
        x, y = self.as_points(x), self.as_points(y)
        return self._distance(x, y)

    def pairwise(self, X, Y) -> np.ndarray:
        """Distance matrix between point arrays of shape (n, D) and (k, D)."""
        X, Y = self.as_points(X), self.as_points(Y)
        return self._distance(X[:, None, :], Y[None, :, :])

    def midpoint(self, x, y) -> np.ndarray:
        x, y = self.as_points(x), self.as_points(y)
        return self._midpoint(x, y)

    def geodesic_point(self, x, y, t) -> np.ndarray:
        """Point at parameter ``t`` on the biinfinite geodesic through x (t=0) and y (t=1)."""
        x, y = self.as_points(x), self.as_points(y)
        t = np.asarray(t, dtype=float)
        d = self._distance(x, y)
        degenerate = np.asarray(d) == 0.0
        if np.any(degenerate & ~np.isin(t, (0.0, 1.0))):
            raise DegenerateGeodesicError("geodesic through coincident points has no direction")
        return self._geodesic(x, y, t)

    # sampling ---------------------------------------------------------

    def origin(self) -> np.ndarray:
        return np.zeros(self.ambient_dim)

    def sample(self, rng: np.random.Generator, n: int) -> np.ndarray:
        """``n`` seeded random points, coordinates uniform in [-5, 5]."""
        return rng.uniform(-5.0, 5.0, size=(n, self.ambient_dim))

    def sphere_point(self, p, r, directions) -> np.ndarray:
        """Points at distance ``r`` from ``p`` in the given direction(s).

        ``directions`` has shape (..., dim) and need not be normalized.
        """
        raise NotImplementedError

    # neighbour-search chart -------------------------------------------

    def chart(self, X, base=None) -> np.ndarray:
        """Euclidean coordinates used for KD-tree pruning."""
        return self.as_points(X)

    def chart_bounds(self, coords) -> tuple[float, float]:
        """Constants (lo, up) with lo*|u-v| <= d(x,y) <= up*|u-v| for chart images u, v.

        |.| is the Minkowski ``chart_p``-norm used by the KD-tree.
        """
        return 1.0, 1.0

    @property
    def chart_p(self) -> float:
        return 2.0

    # hooks --------------------------------------------------------------

    def _distance(self, x, y):
        raise NotImplementedError

    def _midpoint(self, x, y):
        raise NotImplementedError

    def _geodesic(self, x, y, t):
        raise NotImplementedError

    def to_dict(self) -> dict:
        return {"kind": self.kind, "dim": self.dim}


def _sq_norm(v: np.ndarray) -> np.ndarray:
    # explicit coordinate loop: per-pair results must not depend on array shape
    acc = v[..., 0] * v[..., 0]
    for k in range(1, v.shape[-1]):
        acc = acc + v[..., k] * v[..., k]
    return acc


@dataclass(frozen=True)
class Euclidean(Space):
    kind = "euclidean"
    cat0 = True

    def __str__(self):
        return f"Euclidean({self.dim})"

    def _distance(self, x, y):
        return np.sqrt(_sq_norm(x - y))

    def _midpoint(self, x, y):
        return (x + y) / 2.0

    def _geodesic(self, x, y, t):
        return x + t[..., None] * (y - x) if t.ndim else x + float(t) * (y - x)

    def sphere_point(self, p, r, directions):
        u = np.asarray(directions, dtype=float)
        u = u / np.sqrt(_sq_norm(u))[..., None]
        return self.as_points(p) + np.asarray(r, dtype=float)[..., None] * u


@dataclass(frozen=True)
class NormedLp(Space):
    p: float = 2.0

    kind = "lp"

    def __post_init__(self):
        super().__post_init__()
        if not (1.0 < self.p < math.inf):
            raise GeometryError(f"l^p requires 1 < p < inf (strictly convex norm), got p={self.p}")

    def __str__(self):
        return f"NormedLp({self.dim}, p={self.p:g})"

    @property
    def cat0(self):  # noqa: D401 - property overriding a class flag
        return self.p == 2.0

    def _norm(self, v):
        p = self.p
        acc = np.abs(v[..., 0]) ** p
        for k in range(1, v.shape[-1]):
            acc = acc + np.abs(v[..., k]) ** p
        return acc ** (1.0 / p)

    def _distance(self, x, y):
        return self._norm(x - y)

    def _midpoint(self, x, y):
        return (x + y) / 2.0

    def _geodesic(self, x, y, t):
        return x + t[..., None] * (y - x) if t.ndim else x + float(t) * (y - x)

    def sphere_point(self, p, r, directions):
        u = np.asarray(directions, dtype=float)
        u = u / self._norm(u)[..., None]
        return self.as_points(p) + np.asarray(r, dtype=float)[..., None] * u

    @property
    def chart_p(self):
        return self.p

    def to_dict(self):
        return {"kind": self.kind, "dim": self.dim, "p": self.p}


def lorentz_dot(x, y) -> np.ndarray:
    """Minkowski form <x, y>_L = -x0*y0 + sum_i xi*yi."""
    acc = -x[..., 0] * y[..., 0]
    for k in range(1, x.shape[-1]):
        acc = acc + x[..., k] * y[..., k]
    return acc


def lorentz_inverse(L) -> np.ndarray:
    """Inverse of a Lorentz matrix, J L^T J."""
    J = np.ones(L.shape[0])
    J[0] = -1.0
    return (J[:, None] * L.T) * J[None, :]


def lorentz_boost(p) -> np.ndarray:
    """Orthochronous Lorentz matrix mapping the hyperboloid origin to ``p``.

    A stack of points gives a stack of matrices.
    """
    p = np.asarray(p, dtype=float)
    s = p[..., 1:]
    n = s.shape[-1]
    L = np.empty(p.shape[:-1] + (n + 1, n + 1))
    L[..., 0, 0] = p[..., 0]
    L[..., 0, 1:] = s
    L[..., 1:, 0] = s
    L[..., 1:, 1:] = np.eye(n) + s[..., :, None] * s[..., None, :] / (1.0 + p[..., 0, None, None])
    return L


@dataclass(frozen=True)
class Hyperbolic(Space):
    """Hyperbolic n-space on the upper sheet of <x, x>_L = -1."""

    kind = "hyperbolic"
    cat0 = True

    def __str__(self):
        return f"Hyperbolic({self.dim})"

    @property
    def ambient_dim(self):
        return self.dim + 1

    def as_points(self, x):
        x = super().as_points(x)
        q = lorentz_dot(x, x)
        # relative test: coordinates grow like cosh of the distance to the origin
        scale = np.maximum(1.0, x[..., 0] ** 2)
        if np.any(np.abs(q + 1.0) > SHEET_TOL * scale) or np.any(x[..., 0] <= 0):
            raise GeometryError("point is not on the upper hyperboloid sheet <x,x>_L = -1, x0 > 0")
        return x

    @staticmethod
    def normalize(x) -> np.ndarray:
        """Rescale a timelike vector onto the sheet.

        The scaled spatial part is lifted again, so x0 is recomputed from it;
        this keeps the point on the sheet to relative precision at any size.
        """
        return Hyperbolic.lift(x[..., 1:] / np.sqrt(-lorentz_dot(x, x))[..., None])

    @staticmethod
    def lift(spatial) -> np.ndarray:
        """Hyperboloid point with the given spatial coordinates."""
        s = np.asarray(spatial, dtype=float)
        x0 = np.sqrt(1.0 + _sq_norm(s))
        return np.concatenate([x0[..., None], s], axis=-1)

    def origin(self):
        o = np.zeros(self.ambient_dim)
        o[0] = 1.0
        return o

    def _distance(self, x, y):
        # Poincare-ball distance written in hyperboloid coordinates; unlike
        # arcosh(-<x,y>) it does not cancel for nearby points far from the origin
        ax, ay = 1.0 + x[..., 0], 1.0 + y[..., 0]
        w = x[..., 1:] * ay[..., None] - y[..., 1:] * ax[..., None]
        return 2.0 * np.arcsinh(np.sqrt(_sq_norm(w)) / (2.0 * np.sqrt(ax * ay)))

    def _midpoint(self, x, y):
        return self.normalize(x + y)

    def _tangent(self, x, y):
        # unit tangent at x towards y, and the distance
        w = y + lorentz_dot(x, y)[..., None] * x
        nw = np.sqrt(np.maximum(lorentz_dot(w, w), 0.0))
        d = self._distance(x, y)
        safe = np.where(nw > 0, nw, 1.0)
        return w / safe[..., None], d

    def _geodesic(self, x, y, t):
        u, d = self._tangent(x, y)
        s = np.asarray(t * d)
        out = np.cosh(s)[..., None] * x + np.sinh(s)[..., None] * u
        out = self.lift(out[..., 1:])
        # exact endpoints
        t_b = np.broadcast_to(t, s.shape)
        out = np.where((t_b == 0.0)[..., None], x, out)
        return np.where((t_b == 1.0)[..., None], y, out)

    def exp(self, p, v) -> np.ndarray:
        """Exponential map at ``p`` applied to a tangent vector ``v`` (<p, v>_L = 0)."""
        v = np.asarray(v, dtype=float)
        nv = np.sqrt(np.maximum(lorentz_dot(v, v), 0.0))
        safe = np.where(nv > 0, nv, 1.0)
        out = np.cosh(nv)[..., None] * p + (np.sinh(nv) / safe)[..., None] * v
        return self.lift(out[..., 1:])

    def sample(self, rng, n):
        """Exp-map images at the origin of tangent vectors with norm uniform in [0, 5]."""
        g = rng.standard_normal((n, self.dim))
        g /= np.sqrt(_sq_norm(g))[:, None]
        r = rng.uniform(0.0, 5.0, size=n)
        return self.sphere_point(self.origin(), r, g)

    def sphere_point(self, p, r, directions):
        p = self.as_points(p)
        u = np.asarray(directions, dtype=float)
        u = u / np.sqrt(_sq_norm(u))[..., None]
        r = np.asarray(r, dtype=float)
        at_origin = np.concatenate(
            [np.cosh(r)[..., None] * np.ones(u.shape[:-1] + (1,)), np.sinh(r)[..., None] * u], axis=-1
        )
        return self.lift(np.einsum("...ij,...j->...i", lorentz_boost(p), at_origin)[..., 1:])

    def chart(self, X, base=None):
        """Poincare-ball coordinates after moving ``base`` to the origin."""
        X = self.as_points(X)
        if base is not None:
            X = X @ lorentz_inverse(lorentz_boost(self.as_points(base))).T
        return X[..., 1:] / (1.0 + X[..., :1])

    def chart_bounds(self, coords):
        # conformal factor 2/(1-|u|^2) is >= 2 everywhere and <= its value at the outermost point
        rho2 = float(np.max(_sq_norm(coords))) if np.size(coords) else 0.0
        rho2 = min(rho2, 1.0 - 1e-300)
        return 2.0, 2.0 / (1.0 - rho2)


def make_space(kind: str, dim: int, p: float | None = None) -> Space:
    """Construct a model space from its JSON-style description."""
    kind = kind.lower()
    if kind == "euclidean":
        return Euclidean(dim)
    if kind == "hyperbolic":
        return Hyperbolic(dim)
    if kind == "lp":
        if p is None:
            raise GeometryError("lp space requires an exponent p")
        return NormedLp(dim, float(p))
    raise GeometryError(f"unknown space kind {kind!r}")
