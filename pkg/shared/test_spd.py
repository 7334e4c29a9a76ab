import math

import numpy as np
import pytest
from scipy.linalg import expm

from shared.errors import SpdDomainError
from shared.manifold_core import ManifoldId, geometry_for
from shared.spd import (
    LoewnerRelation,
    is_spd,
    loewner_leq,
    spd_distance,
    spd_exp,
    spd_inner,
    spd_log,
    spd_sqrt,
    symmetric_eigh,
    validate_spd,
)


def random_spd(rng, n=2, lo=0.5, hi=5.0):
    q, _ = np.linalg.qr(rng.standard_normal((n, n)))
    return (q * rng.uniform(lo, hi, size=n)) @ q.T


def random_congruence(rng, n=2, max_cond=10.0):
    q1, _ = np.linalg.qr(rng.standard_normal((n, n)))
    q2, _ = np.linalg.qr(rng.standard_normal((n, n)))
    s = np.exp(rng.uniform(0.0, math.log(max_cond), size=n))
    return (q1 * s) @ q2


def test_distance_examples():
    assert spd_distance(np.eye(2), np.diag([math.e, 1.0])) == pytest.approx(1.0)
    assert spd_distance(np.eye(2), np.diag([math.e ** 4, math.e ** 4])) == pytest.approx(math.sqrt(32.0))
    assert spd_distance(np.diag([2.0, 3.0]), np.diag([2.0, 3.0])) == pytest.approx(0.0, abs=1e-14)


def test_affine_invariance():
    rng = np.random.default_rng(7)
    for _ in range(1000):
        s1, s2 = random_spd(rng), random_spd(rng)
        a = random_congruence(rng)
        moved = spd_distance(a.T @ s1 @ a, a.T @ s2 @ a)
        assert abs(moved - spd_distance(s1, s2)) < 1e-8


def test_inversion_is_an_isometry():
    rng = np.random.default_rng(8)
    for _ in range(100):
        s1, s2 = random_spd(rng), random_spd(rng)
        assert spd_distance(np.linalg.inv(s1), np.linalg.inv(s2)) == pytest.approx(spd_distance(s1, s2), abs=1e-10)


def test_exp_log_and_metric_consistency():
    rng = np.random.default_rng(9)
    for _ in range(200):
        s1, s2 = random_spd(rng, 3), random_spd(rng, 3)
        w = spd_log(s1, s2)
        assert np.allclose(spd_exp(s1, w), s2, atol=1e-10)
        assert math.sqrt(spd_inner(s1, w, w)) == pytest.approx(spd_distance(s1, s2), abs=1e-9)


def test_closed_form_2x2_eigh_matches_numpy():
    rng = np.random.default_rng(10)
    for _ in range(200):
        s = random_spd(rng)
        w, u = symmetric_eigh(s)
        assert np.allclose(w, np.linalg.eigvalsh(s), rtol=1e-12, atol=1e-14)
        assert np.allclose((u * w) @ u.T, s, atol=1e-12)


def test_square_root():
    s = np.array([[4.0, 1.0], [1.0, 3.0]])
    root = spd_sqrt(s)
    assert np.allclose(root @ root, s, atol=1e-12)


def test_validation():
    assert is_spd(np.eye(3))
    assert not is_spd(np.diag([1.0, -1.0]))
    with pytest.raises(SpdDomainError):
        validate_spd(np.array([[1.0, 0.2], [0.0, 1.0]]))
    # drift below the symmetry tolerance is absorbed
    s = validate_spd(np.array([[1.0, 0.2 + 1e-12], [0.2, 1.0]]))
    assert s[0, 1] == s[1, 0]


def test_loewner_relations():
    assert loewner_leq(2.0 * np.eye(2), np.eye(2)) is LoewnerRelation.GREATER_EQUAL
    assert loewner_leq(np.eye(2), 2.0 * np.eye(2)) is LoewnerRelation.LESS_EQUAL
    assert loewner_leq(np.eye(2), np.eye(2)) is LoewnerRelation.EQUAL
    assert loewner_leq(np.diag([2.0, 1.0]), np.diag([1.0, 2.0])) is LoewnerRelation.INCOMPARABLE


def rotation(theta):
    c, s = math.cos(theta), math.sin(theta)
    return np.array([[c, -s], [s, c]])


def test_2x2_eigh_with_negative_dominant_eigenvalue():
    w, u = symmetric_eigh(np.diag([-1.0, 1e-12]))
    assert w[0] == pytest.approx(-1.0, rel=1e-15)
    assert w[1] == pytest.approx(1e-12, rel=1e-12)
    rng = np.random.default_rng(11)
    for _ in range(200):
        a = rng.standard_normal((2, 2))
        t = a + a.T
        w, u = symmetric_eigh(t)
        assert np.allclose(w, np.linalg.eigvalsh(t), rtol=1e-12, atol=1e-13)
        assert np.allclose((u * w) @ u.T, t, atol=1e-12)


def test_exp_of_indefinite_tangents_matches_expm():
    assert np.allclose(spd_exp(np.eye(2), np.diag([-1.0, 1e-12])), expm(np.diag([-1.0, 1e-12])), atol=1e-14)
    rng = np.random.default_rng(12)
    for _ in range(100):
        a = rng.standard_normal((2, 2))
        w = a + a.T
        assert np.allclose(spd_exp(np.eye(2), w), expm(w), rtol=1e-10, atol=1e-12)


def test_distance_is_symmetric_for_near_singular_pairs():
    eps = 1e-8
    r = rotation(0.3)
    x = r @ np.diag([1.0, eps]) @ r.T
    y = r @ np.diag([eps, 1.0]) @ r.T
    expected = math.sqrt(2.0) * math.log(1.0 / eps)
    assert spd_distance(x, y) == pytest.approx(expected, rel=1e-7)
    assert spd_distance(y, x) == pytest.approx(expected, rel=1e-7)

    geometry = geometry_for(ManifoldId.spd(2))
    rng = np.random.default_rng(13)
    for _ in range(200):
        a, b = rng.standard_normal(2), rng.standard_normal(2)
        x = np.outer(a, a) + 1e-8 * np.eye(2)
        y = np.outer(b, b) + 1e-8 * np.eye(2)
        forward, backward = spd_distance(x, y), spd_distance(y, x)
        assert forward == pytest.approx(backward, abs=1e-6)
        assert geometry.distances(x.ravel()[None], y.ravel())[0] == pytest.approx(forward, abs=1e-6)


def test_log_map_of_near_singular_pair_has_the_distance_as_norm():
    r = rotation(1.1)
    x = r @ np.diag([2.0, 1e-8]) @ r.T
    y = r @ np.diag([1e-6, 0.5]) @ r.T
    w = spd_log(x, y)
    assert math.sqrt(spd_inner(x, w, w)) == pytest.approx(spd_distance(x, y), rel=1e-7)
    assert spd_distance(spd_exp(x, w), y) == pytest.approx(0.0, abs=1e-5)
