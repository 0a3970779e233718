"""Point isometries of the model spaces and the set maps they induce.

An isometry i of X acts on clouds pointwise, I(C) = i(C), and preserves
the Hausdorff distance. The helpers here check that, recover i from a set
map by looking at images of singletons, and test that J = i^-1 o I fixes
balls, sphere subsets and arbitrary clouds.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Callable

import numpy as np

from .report import CheckReport
from .sets import Cloud, ball_net, diameter, hausdorff_distance, sphere_net
from .spaces import EPS_EXACT, Euclidean, Hyperbolic, NormedLp, Space, lorentz_dot

KINDS = ("euclidean_rigid", "lorentz", "lp_symmetry")

SetMap = Callable[[Cloud], Cloud]


class IsometryError(ValueError):
    """The description does not define an isometry of the space."""


class NotPointImageError(RuntimeError):
    """A set map sent a singleton to a set with more than one point."""


class RecoveryFailedError(RuntimeError):
    """No point isometry reproduces the set map on fresh probes."""


def _minkowski(n: int) -> np.ndarray:
    J = np.eye(n)
    J[0, 0] = -1.0
    return J


@dataclass(frozen=True, eq=False)
class IsometryDesc:
    """x -> matrix @ x + translation (Lorentz maps have no translation)."""

    kind: str
    matrix: np.ndarray
    translation: np.ndarray | None = None

    def __post_init__(self):
        if self.kind not in KINDS:
            raise IsometryError(f"unknown isometry kind {self.kind!r}")
        M = np.atleast_2d(np.asarray(self.matrix, dtype=float))
        object.__setattr__(self, "matrix", M)
        if self.kind == "lorentz":
            if self.translation is not None and np.any(np.asarray(self.translation) != 0):
                raise IsometryError("Lorentz isometries are linear; translation must be absent")
            object.__setattr__(self, "translation", None)
        else:
            v = np.zeros(M.shape[0]) if self.translation is None else np.asarray(self.translation, float)
            object.__setattr__(self, "translation", v)

    # validation -------------------------------------------------------

    def validate(self, space: Space, tol: float = EPS_EXACT) -> "IsometryDesc":
        M = self.matrix
        D = space.ambient_dim
        if M.shape != (D, D):
            raise IsometryError(f"matrix shape {M.shape} does not act on {space}")
        if self.translation is not None and self.translation.shape != (D,):
            raise IsometryError(f"translation must have {D} entries")
        if self.kind == "euclidean_rigid":
            if not isinstance(space, Euclidean) and not (isinstance(space, NormedLp) and space.p == 2):
                raise IsometryError(f"rigid motions are not isometries of {space}")
            err = np.max(np.abs(M.T @ M - np.eye(D)))
            if err > tol:
                raise IsometryError(f"matrix is not orthogonal (|Q^T Q - I| = {err:.3g})")
        elif self.kind == "lorentz":
            if not isinstance(space, Hyperbolic):
                raise IsometryError(f"Lorentz maps act on hyperbolic space, not {space}")
            J = _minkowski(D)
            err = np.max(np.abs(M.T @ J @ M - J))
            if err > tol * max(1.0, M[0, 0] ** 2):
                raise IsometryError(f"matrix does not preserve the Lorentz form (error {err:.3g})")
            if M[0, 0] < 1.0 - tol:
                raise IsometryError("Lorentz matrix is not orthochronous (L00 < 1)")
        else:
            if not isinstance(space, (NormedLp, Euclidean)):
                raise IsometryError(f"signed permutations do not act on {space}")
            if not _is_signed_permutation(M):
                raise IsometryError("matrix is not a signed permutation")
        return self

    # action -----------------------------------------------------------

    def apply(self, space: Space, X) -> np.ndarray:
        X = space.as_points(X)
        Y = X @ self.matrix.T
        if self.translation is not None:
            Y = Y + self.translation
        if self.kind == "lorentz":
            Y = Hyperbolic.lift(Y[..., 1:])
        return Y

    def inverse(self) -> "IsometryDesc":
        M = self.matrix
        if self.kind == "lorentz":
            J = _minkowski(M.shape[0])
            return IsometryDesc("lorentz", J @ M.T @ J)
        Minv = M.T  # orthogonal and signed-permutation matrices
        return IsometryDesc(self.kind, Minv, -Minv @ self.translation)

    def compose(self, other: "IsometryDesc") -> "IsometryDesc":
        """self o other."""
        if self.kind != other.kind:
            raise IsometryError("cannot compose isometries of different kinds")
        M = self.matrix @ other.matrix
        if self.kind == "lorentz":
            return IsometryDesc("lorentz", M)
        return IsometryDesc(self.kind, M, self.matrix @ other.translation + self.translation)

    def to_dict(self) -> dict:
        d = {"kind": self.kind, "matrix": self.matrix.tolist()}
        if self.translation is not None:
            d["translation"] = self.translation.tolist()
        return d


def _is_signed_permutation(M: np.ndarray) -> bool:
    if M.shape[0] != M.shape[1]:
        return False
    nz = M != 0
    return (
        bool(np.all(np.isin(M, (-1.0, 0.0, 1.0))))
        and bool(np.all(nz.sum(axis=0) == 1))
        and bool(np.all(nz.sum(axis=1) == 1))
    )


def identity(space: Space) -> IsometryDesc:
    D = space.ambient_dim
    if isinstance(space, Hyperbolic):
        return IsometryDesc("lorentz", np.eye(D))
    if isinstance(space, Euclidean):
        return IsometryDesc("euclidean_rigid", np.eye(D))
    return IsometryDesc("lp_symmetry", np.eye(D))


def rotation2d(angle: float) -> np.ndarray:
    c, s = np.cos(angle), np.sin(angle)
    return np.array([[c, -s], [s, c]])


def lorentz_boost_along(dim: int, axis: int, rapidity: float) -> np.ndarray:
    """Boost of H^dim moving the origin a distance ``rapidity`` along spatial ``axis``."""
    L = np.eye(dim + 1)
    c, s = np.cosh(rapidity), np.sinh(rapidity)
    L[0, 0] = L[axis, axis] = c
    L[0, axis] = L[axis, 0] = s
    return L


def random_isometry(space: Space, rng: np.random.Generator, reach: float = 2.0) -> IsometryDesc:
    """Seeded random isometry moving the origin by at most about ``reach``."""
    n = space.dim
    if isinstance(space, Hyperbolic):
        Q, R = np.linalg.qr(rng.standard_normal((n, n)))
        Q = Q * np.sign(np.diag(R))
        rot = np.eye(n + 1)
        rot[1:, 1:] = Q
        axis = int(rng.integers(1, n + 1))
        boost = lorentz_boost_along(n, axis, rng.uniform(-reach, reach))
        return IsometryDesc("lorentz", rot @ boost)
    v = rng.uniform(-reach, reach, n)
    if isinstance(space, Euclidean):
        Q, R = np.linalg.qr(rng.standard_normal((n, n)))
        return IsometryDesc("euclidean_rigid", Q * np.sign(np.diag(R)), v)
    P = np.eye(n)[rng.permutation(n)] * rng.choice((-1.0, 1.0), size=n)[:, None]
    return IsometryDesc("lp_symmetry", P, v)


def apply_isometry(space: Space, i: IsometryDesc, A: Cloud) -> Cloud:
    i.validate(space)
    return Cloud(space, i.apply(space, A.points), A.resolution)


def induced_map(space: Space, i: IsometryDesc) -> SetMap:
    """The set map C -> i(C)."""
    i.validate(space)
    return lambda C: Cloud(space, i.apply(space, C.points), C.resolution)


def verify_induced_isometry(
    space: Space, i: IsometryDesc, pairs, tol: float = EPS_EXACT
) -> CheckReport:
    """Compare d_H(i(A), i(B)) with d_H(A, B) on every pair."""
    i.validate(space)
    pairs = list(pairs)
    if not pairs:
        raise ValueError("need at least one cloud pair")
    errors = []
    for A, B in pairs:
        before = hausdorff_distance(space, A, B)
        after = hausdorff_distance(space, apply_isometry(space, i, A), apply_isometry(space, i, B))
        errors.append(abs(after - before))
    k = int(np.argmax(errors))
    return CheckReport(
        name=f"induced_isometry[{space}, {i.kind}]",
        passed=bool(errors[k] <= tol),
        worst_violation=float(errors[k]),
        tolerance=tol,
        witness={"pair_index": k, "A": pairs[k][0].points, "B": pairs[k][1].points},
        details={"pairs": len(pairs)},
    )


def default_probes(space: Space) -> np.ndarray:
    """n+1 points in general position: the origin and unit steps along the axes."""
    n = space.dim
    if isinstance(space, Hyperbolic):
        steps = np.eye(n)
        return np.vstack([space.origin()[None, :], space.sphere_point(space.origin(), 1.0, steps)])
    return np.vstack([np.zeros((1, n)), np.eye(n)])


def _point_images(space: Space, oracle: SetMap, probes: np.ndarray) -> np.ndarray:
    images = []
    for p in probes:
        img = oracle(Cloud(space, p[None, :]))
        if len(img) > 1 and diameter(space, img) > 1e-6:
            raise NotPointImageError(f"image of the singleton {p.tolist()} has {len(img)} points")
        images.append(img.points[0])
    return np.array(images)


def _fit_rigid(P: np.ndarray, Q: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
    # orthogonal Procrustes; reflections are isometries too, so no det correction
    cp, cq = P.mean(axis=0), Q.mean(axis=0)
    U, _, Vt = np.linalg.svd((P - cp).T @ (Q - cq))
    R = Vt.T @ U.T
    return R, cq - R @ cp


def _fit_lorentz(P: np.ndarray, Q: np.ndarray) -> np.ndarray:
    gp = lorentz_dot(P[:, None, :], P[None, :, :])
    gq = lorentz_dot(Q[:, None, :], Q[None, :, :])
    if np.max(np.abs(gp - gq)) > 1e-6 * max(1.0, np.max(np.abs(gp))):
        raise RecoveryFailedError("probe images do not have the Minkowski Gram matrix of the probes")
    Lt, *_ = np.linalg.lstsq(P, Q, rcond=None)
    L = Lt.T
    J = _minkowski(L.shape[0])
    for _ in range(4):
        # Newton step towards L^T J L = J
        G = J @ L.T @ J @ L
        L = L @ (3.0 * np.eye(len(L)) - G) / 2.0
    return L


def _fit_signed_permutation(P: np.ndarray, Q: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
    dP, dQ = P[1:] - P[0], Q[1:] - Q[0]
    St, *_ = np.linalg.lstsq(dP, dQ, rcond=None)
    S = St.T
    rounded = np.zeros_like(S)
    cols = np.argmax(np.abs(S), axis=1)
    rounded[np.arange(len(S)), cols] = np.sign(S[np.arange(len(S)), cols])
    if not _is_signed_permutation(rounded) or np.max(np.abs(S - rounded)) > 1e-6:
        raise RecoveryFailedError("linear part is not a signed permutation")
    return rounded, Q[0] - rounded @ P[0]


def recover_point_map(
    space: Space,
    oracle: SetMap,
    probes=None,
    seed: int = 0,
    validation_probes: int = 100,
    residual_tol: float = 1e-6,
) -> IsometryDesc:
    """Fit the point isometry i with oracle(C) = i(C), using singleton images.

    The fit is checked against the oracle on ``validation_probes`` fresh
    seeded points; the largest pointwise distance must stay within
    ``residual_tol``.
    """
    P = default_probes(space) if probes is None else space.as_points(probes)
    if len(P) < space.dim + 1:
        raise ValueError(f"need at least {space.dim + 1} probes in general position")
    Q = _point_images(space, oracle, P)
    if isinstance(space, Hyperbolic):
        iso = IsometryDesc("lorentz", _fit_lorentz(P, Q))
    elif isinstance(space, Euclidean):
        iso = IsometryDesc("euclidean_rigid", *_fit_rigid(P, Q))
    else:
        iso = IsometryDesc("lp_symmetry", *_fit_signed_permutation(P, Q))
    try:
        iso.validate(space)
    except IsometryError as exc:
        raise RecoveryFailedError(f"fitted map is not an isometry: {exc}") from exc
    fresh = space.sample(np.random.default_rng(seed), validation_probes)
    residual = float(np.max(space.distance(_point_images(space, oracle, fresh), iso.apply(space, fresh))))
    if residual > residual_tol:
        raise RecoveryFailedError(f"fresh-probe residual {residual:.3g} exceeds {residual_tol:g}")
    return iso


def recovery_residual(space: Space, oracle: SetMap, i: IsometryDesc, count: int = 100, seed: int = 1) -> float:
    """Largest distance between oracle and i on fresh seeded singletons."""
    fresh = space.sample(np.random.default_rng(seed), count)
    return float(np.max(space.distance(_point_images(space, oracle, fresh), i.apply(space, fresh))))


def verify_cloud_fixing(
    space: Space, i: IsometryDesc, oracle: SetMap, clouds, tol: float | None = None, name: str = "J_fixing"
) -> CheckReport:
    """d_H(J(A), A) for J = i^-1 o oracle on each cloud.

    With ``tol=None`` each cloud gets 2*resolution + 1e-6.
    """
    inv = i.inverse()
    worst, witness, excess = -np.inf, {}, []
    for k, A in enumerate(clouds):
        JA = apply_isometry(space, inv, oracle(A))
        d = hausdorff_distance(space, JA, A)
        allowed = 2.0 * A.resolution + 1e-6 if tol is None else tol
        excess.append(d - allowed)
        if d - allowed > worst:
            worst, witness = d - allowed, {"cloud_index": k, "d_H": d, "allowed": allowed}
    return CheckReport(
        name=f"{name}[{space}]",
        passed=bool(worst <= 0.0),
        worst_violation=float(witness["d_H"]),
        tolerance=float(witness["allowed"]),
        witness=witness,
        details={"clouds": len(excess), "max_excess": float(worst)},
    )


def verify_ball_fixing(
    space: Space, i: IsometryDesc, oracle: SetMap, p, r: float, net_count: int = 200, seed: int = 0
) -> CheckReport:
    """J maps a net of the ball B_r(p) onto itself up to twice its resolution."""
    A = ball_net(space, p, r, net_count, seed)
    return verify_cloud_fixing(space, i, oracle, [A], name="ball_fixing")


def verify_sphere_subset_fixing(
    space: Space, i: IsometryDesc, oracle: SetMap, p, r: float, k: int, seed: int = 0
) -> CheckReport:
    """J fixes a finite subset of the sphere S_r(p) to within 1e-6."""
    S = sphere_net(space, p, r, k, seed)
    return verify_cloud_fixing(space, i, oracle, [S], tol=1e-6, name="sphere_subset_fixing")
