import math

import numpy as np
import pytest

from setgeom.isometry import (
    IsometryDesc,
    IsometryError,
    NotPointImageError,
    RecoveryFailedError,
    apply_isometry,
    identity,
    induced_map,
    lorentz_boost_along,
    random_isometry,
    recover_point_map,
    recovery_residual,
    rotation2d,
    verify_ball_fixing,
    verify_cloud_fixing,
    verify_induced_isometry,
    verify_sphere_subset_fixing,
)
from setgeom.sets import Cloud, hausdorff_distance, random_cloud
from setgeom.spaces import Euclidean, Hyperbolic, NormedLp

E2, E3, H2 = Euclidean(2), Euclidean(3), Hyperbolic(2)


def test_identity_leaves_cloud_unchanged(space, rng):
    A = random_cloud(space, rng, 10, 1.0)
    assert np.array_equal(apply_isometry(space, identity(space), A).points, A.points)


def test_quarter_turn():
    i = IsometryDesc("euclidean_rigid", rotation2d(math.pi / 2))
    out = apply_isometry(E2, i, Cloud(E2, [[1, 0]]))
    assert np.allclose(out.points, [[0, 1]], atol=1e-15)


def test_boost_moves_origin_along_axis():
    t = 0.8
    i = IsometryDesc("lorentz", lorentz_boost_along(2, 1, t))
    out = apply_isometry(H2, i, Cloud(H2, [[1, 0, 0]])).points[0]
    assert np.allclose(out, [math.cosh(t), math.sinh(t), 0])
    assert math.acosh(out[0]) == pytest.approx(t, abs=1e-12)


def test_identity_pairs_have_zero_error(space, rng):
    pairs = [(random_cloud(space, rng, 5, 1.0), random_cloud(space, rng, 5, 1.0)) for _ in range(5)]
    rep = verify_induced_isometry(space, identity(space), pairs)
    assert rep.passed and rep.worst_violation == 0.0


def test_rigid_motion_preserves_hausdorff():
    rng = np.random.default_rng(3)
    i = random_isometry(E3, rng)
    pairs = [(random_cloud(E3, rng, 12, 1.0), random_cloud(E3, rng, 12, 1.0)) for _ in range(50)]
    rep = verify_induced_isometry(E3, i, pairs, tol=1e-9)
    assert rep.passed, rep.to_dict()


def test_random_isometries_preserve_hausdorff(space, rng):
    i = random_isometry(space, rng)
    pairs = [(random_cloud(space, rng, 8, 1.0), random_cloud(space, rng, 8, 1.0)) for _ in range(10)]
    assert verify_induced_isometry(space, i, pairs, tol=1e-9).passed


def test_corrupted_matrix_rejected_before_evaluation():
    Q = rotation2d(0.3) * 1.01
    bad = IsometryDesc("euclidean_rigid", Q)

    class Exploding:
        def __iter__(self):
            raise AssertionError("pairs were evaluated")

    with pytest.raises(IsometryError):
        verify_induced_isometry(E2, bad, Exploding())


def test_invalid_descriptions():
    with pytest.raises(IsometryError):
        IsometryDesc("lorentz", np.eye(3), [1, 0, 0])
    with pytest.raises(IsometryError):
        IsometryDesc("lorentz", np.diag([-1.0, 1, 1])).validate(H2)
    with pytest.raises(IsometryError):
        IsometryDesc("lp_symmetry", rotation2d(0.2)).validate(NormedLp(2, 3.0))
    with pytest.raises(IsometryError):
        IsometryDesc("euclidean_rigid", rotation2d(0.2)).validate(NormedLp(2, 3.0))
    with pytest.raises(IsometryError):
        IsometryDesc("shear", np.eye(2))


def test_inverse_and_compose(space, rng):
    i = random_isometry(space, rng)
    x = space.sample(rng, 20)
    back = i.inverse().apply(space, i.apply(space, x))
    assert np.max(space.distance(back, x)) <= 1e-9
    both = i.compose(i.inverse())
    assert np.max(space.distance(both.apply(space, x), x)) <= 1e-9


def test_recover_identity(space):
    i = recover_point_map(space, induced_map(space, identity(space)))
    assert np.allclose(i.matrix, np.eye(space.ambient_dim), atol=1e-9)
    if i.translation is not None:
        assert np.allclose(i.translation, 0, atol=1e-9)


def test_recover_rotation_with_translation():
    truth = IsometryDesc("euclidean_rigid", rotation2d(math.pi / 2), [1, 0])
    probes = np.array([[0, 0], [1, 0], [0, 1]], dtype=float)
    i = recover_point_map(E2, induced_map(E2, truth), probes=probes)
    assert np.allclose(i.matrix, [[0, -1], [1, 0]], atol=1e-12)
    assert np.allclose(i.translation, [1, 0], atol=1e-12)


def test_recover_random_isometries(space, rng):
    truth = random_isometry(space, rng)
    oracle = induced_map(space, truth)
    i = recover_point_map(space, oracle, seed=5)
    assert recovery_residual(space, oracle, i) <= 1e-6
    x = space.sample(rng, 50)
    assert np.max(space.distance(i.apply(space, x), truth.apply(space, x))) <= 1e-6


def test_two_point_image_detected():
    def oracle(C):
        return Cloud(E2, np.vstack([C.points, C.points + 1.0]))

    with pytest.raises(NotPointImageError):
        recover_point_map(E2, oracle)


def test_non_isometric_oracle_fails_recovery():
    def oracle(C):
        return Cloud(E2, C.points * 2.0)

    with pytest.raises(RecoveryFailedError):
        recover_point_map(E2, oracle)


def test_nonlinear_oracle_fails_validation():
    def oracle(C):
        p = C.points
        return Cloud(E2, p + 0.01 * np.sin(3 * p[:, ::-1]))

    with pytest.raises(RecoveryFailedError):
        recover_point_map(E2, oracle)


def test_ball_fixing_identity():
    i = identity(E2)
    rep = verify_ball_fixing(E2, i, induced_map(E2, i), [0, 0], 1.0)
    assert rep.passed and rep.witness["d_H"] == 0.0


def test_ball_fixing_rotation_about_other_point():
    q = np.array([2.0, -1.0])
    R = rotation2d(0.7)
    truth = IsometryDesc("euclidean_rigid", R, q - R @ q)
    oracle = induced_map(E2, truth)
    i = recover_point_map(E2, oracle)
    assert verify_ball_fixing(E2, i, oracle, [0.5, 0.5], 1.0).passed
    assert verify_sphere_subset_fixing(E2, i, oracle, [0.5, 0.5], 1.0, 5).worst_violation <= 1e-9


def test_ball_fixing_boost():
    truth = IsometryDesc("lorentz", lorentz_boost_along(2, 2, 0.9))
    oracle = induced_map(H2, truth)
    i = recover_point_map(H2, oracle)
    assert verify_ball_fixing(H2, i, oracle, H2.origin(), 0.5, net_count=200).passed
    assert verify_sphere_subset_fixing(H2, i, oracle, H2.origin(), 0.5, 3).worst_violation <= 1e-9


def test_sphere_subset_identity_single_point():
    i = identity(H2)
    rep = verify_sphere_subset_fixing(H2, i, induced_map(H2, i), H2.origin(), 1.0, 1)
    assert rep.worst_violation == 0.0


def test_cloud_fixing_detects_wrong_isometry(rng):
    truth = random_isometry(E2, rng)
    wrong = IsometryDesc("euclidean_rigid", np.eye(2), [0.5, 0])
    clouds = [random_cloud(E2, rng, 10, 1.0) for _ in range(3)]
    assert not verify_cloud_fixing(E2, wrong, induced_map(E2, truth), clouds).passed
    assert verify_cloud_fixing(E2, truth, induced_map(E2, truth), clouds).passed


def test_apply_preserves_distances_far_out():
    i = IsometryDesc("lorentz", lorentz_boost_along(2, 1, 6.0))
    rng = np.random.default_rng(1)
    A, B = random_cloud(H2, rng, 10, 1.0), random_cloud(H2, rng, 10, 1.0)
    before = hausdorff_distance(H2, A, B)
    after = hausdorff_distance(H2, apply_isometry(H2, i, A), apply_isometry(H2, i, B))
    assert after == pytest.approx(before, abs=1e-9)
