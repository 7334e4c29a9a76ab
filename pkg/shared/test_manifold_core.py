import logging
import math

import numpy as np
import pytest

from shared.constant_curvature import (
    MoebiusTransform,
    circle_distance,
    circle_log,
    h2_distance,
    moebius_apply,
    sphere_distance,
)
from shared.errors import (
    CutLocusError,
    InvalidPointError,
    InvalidTangentError,
    ManifoldMismatchError,
    SpdDomainError,
    UsageError,
)
from shared.manifold_core import (
    ManifoldId,
    ManifoldPoint,
    PointSet,
    TangentVector,
    distance,
    exp_map,
    geometry_for,
    inner,
    log_map,
    make_point,
    make_tangent,
    point_from_json,
    point_to_json,
)

MANIFOLDS = [
    ManifoldId.circle(),
    ManifoldId.sphere2(),
    ManifoldId.hyperbolic2(),
    ManifoldId.spd(2),
    ManifoldId.euclidean(3),
]


def random_point(manifold, rng):
    if manifold.tag == "circle":
        return np.array([rng.uniform(0.0, 2.0 * math.pi)])
    if manifold.tag == "sphere2":
        g = rng.standard_normal(3)
        return g / np.linalg.norm(g)
    if manifold.tag == "hyperbolic2":
        return np.array([rng.uniform(-1.0, 1.0), rng.uniform(0.5, 2.0)])
    if manifold.tag == "spd(2)":
        b = rng.standard_normal((2, 2))
        return (b @ b.T + 0.5 * np.eye(2)).ravel()
    return rng.standard_normal(manifold.dim)


def random_pairs(manifold, count, seed, max_distance=None):
    rng = np.random.default_rng(seed)
    geometry = geometry_for(manifold)
    pairs = []
    while len(pairs) < count:
        x, y = random_point(manifold, rng), random_point(manifold, rng)
        d = geometry.distance(x, y)
        if d < 0.05 or (max_distance is not None and d > max_distance):
            continue
        pairs.append((x, y))
    return pairs


@pytest.mark.parametrize("manifold", MANIFOLDS, ids=lambda m: m.tag)
def test_exp_log_roundtrip(manifold):
    geometry = geometry_for(manifold)
    limit = math.pi - 0.1 if manifold.tag in ("circle", "sphere2") else None
    for x, y in random_pairs(manifold, 1000, seed=11, max_distance=limit):
        v = geometry.log(x, y)
        back = geometry.normalize_output(geometry.exp(x, v))
        assert geometry.distance(back, y) < 1e-9
        assert abs(geometry.norm(x, v) - geometry.distance(x, y)) < 1e-9


@pytest.mark.parametrize("manifold", MANIFOLDS, ids=lambda m: m.tag)
def test_squared_distance_gradient_matches_finite_differences(manifold):
    geometry = geometry_for(manifold)
    limit = math.pi - 0.2 if manifold.tag in ("circle", "sphere2") else None
    h = 1e-5
    for x, a in random_pairs(manifold, 100, seed=23, max_distance=limit):
        grad = -2.0 * geometry.log(a, x)
        analytic, numeric = [], []
        for e in geometry.tangent_basis(a):
            plus = geometry.distance(x, geometry.exp(a, h * e)) ** 2
            minus = geometry.distance(x, geometry.exp(a, -h * e)) ** 2
            numeric.append((plus - minus) / (2.0 * h))
            analytic.append(geometry.inner(a, grad, e))
        analytic, numeric = np.array(analytic), np.array(numeric)
        assert np.linalg.norm(analytic - numeric) <= 1e-4 * np.linalg.norm(analytic)


def test_manifold_tags_parse():
    assert ManifoldId.parse("circle") == ManifoldId.circle()
    assert ManifoldId.parse("euclidean(3)") == ManifoldId.euclidean(3)
    assert ManifoldId.parse("spd") == ManifoldId.spd(2)
    assert ManifoldId.parse("spd(3)").coord_size == 9
    with pytest.raises(UsageError):
        ManifoldId.parse("torus")
    with pytest.raises(UsageError):
        ManifoldId.parse("euclidean")


def test_circle_examples():
    assert circle_distance(0.1, 2.0 * math.pi - 0.1) == pytest.approx(0.2, abs=1e-12)
    assert circle_log(0.0, math.pi) == pytest.approx(math.pi)
    p = make_point("circle", [-math.pi / 2])
    assert p.coords[0] == pytest.approx(1.5 * math.pi)


def test_sphere_examples():
    assert sphere_distance([0, 0, 1], [1, 0, 0]) == pytest.approx(math.pi / 2)
    north = make_point("sphere2", [0.0, 0.0, 1.0])
    south = make_point("sphere2", [0.0, 0.0, -1.0])
    with pytest.raises(CutLocusError):
        log_map(north, south)
    v = make_tangent(north, [math.pi / 2, 0.0, 0.0])
    assert np.allclose(exp_map(v).coords, [1.0, 0.0, 0.0], atol=1e-12)


def test_membership_validation():
    drift = make_point("sphere2", [0.0, 0.0, 1.0 + 1e-12])
    assert np.linalg.norm(drift.coords) == pytest.approx(1.0, abs=1e-15)
    with pytest.raises(InvalidPointError):
        make_point("sphere2", [0.0, 0.0, 1.001])
    with pytest.raises(InvalidPointError):
        make_point("hyperbolic2", [0.0, -1.0])
    with pytest.raises(SpdDomainError):
        make_point("spd(2)", [1.0, 0.5, 0.0, 1.0])
    with pytest.raises(SpdDomainError):
        make_point("spd(2)", [1.0, 0.0, 0.0, 0.0])


def test_mixed_manifolds_rejected():
    with pytest.raises(ManifoldMismatchError):
        distance(make_point("circle", [0.0]), make_point("euclidean(1)", [0.0]))


def test_half_plane_distance_and_isometries():
    assert h2_distance((0.0, 1.0), (0.0, 2.0)) == pytest.approx(math.log(2.0))
    rng = np.random.default_rng(5)
    h2 = geometry_for(ManifoldId.hyperbolic2())
    for _ in range(50):
        g = MoebiusTransform.random(rng, scale=0.5)
        z = np.array([random_point(ManifoldId.hyperbolic2(), rng) for _ in range(2)])
        gz = moebius_apply(g, z)
        assert h2.distance(gz[0], gz[1]) == pytest.approx(h2.distance(z[0], z[1]), rel=1e-9, abs=1e-12)


def test_point_json_round_trip():
    for tag, coords in [("circle", [1.0]), ("spd(2)", [2.0, 0.5, 0.5, 1.0]), ("euclidean(2)", [1.0, -3.0])]:
        p = make_point(tag, coords)
        q = point_from_json(point_to_json(p))
        assert q.manifold == p.manifold
        assert np.array_equal(q.coords, p.coords)


def test_point_set_subset_and_geometry():
    ps = PointSet(ManifoldId.circle(), [[0.0], [1.0], [2.0]])
    assert len(ps) == 3
    assert ps.subset([2, 0]).coords[:, 0].tolist() == [2.0, 0.0]
    assert ps.geometry is geometry_for(ManifoldId.circle())


def test_public_operations_validate_their_inputs():
    north = make_point("sphere2", [0.0, 0.0, 1.0])
    off_sphere = ManifoldPoint(ManifoldId.sphere2(), [0.0, 0.0, 2.0])
    with pytest.raises(InvalidPointError):
        distance(off_sphere, north)
    with pytest.raises(InvalidPointError):
        log_map(north, off_sphere)
    below_axis = ManifoldPoint(ManifoldId.hyperbolic2(), [0.0, -1.0])
    with pytest.raises(InvalidPointError):
        exp_map(TangentVector(below_axis, [0.0, 1.0]))
    lopsided = ManifoldPoint(ManifoldId.spd(2), [1.0, 0.5, 0.0, 1.0])
    with pytest.raises(SpdDomainError):
        distance(lopsided, make_point("spd(2)", [1.0, 0.0, 0.0, 1.0]))
    radial = TangentVector(north, [0.0, 0.0, 1.0])
    with pytest.raises(InvalidTangentError):
        exp_map(radial)
    with pytest.raises(InvalidTangentError):
        inner(radial, radial)


def test_sphere_exp_past_the_injectivity_radius_is_flagged(caplog):
    north = make_point("sphere2", [0.0, 0.0, 1.0])
    with caplog.at_level(logging.WARNING, logger="shared.manifold_core"):
        exp_map(make_tangent(north, [math.pi / 2, 0.0, 0.0]))
        assert not caplog.records
        out = exp_map(make_tangent(north, [3.5, 0.0, 0.0]))
    assert np.allclose(out.coords, [math.sin(3.5), 0.0, math.cos(3.5)], atol=1e-12)
    assert any("injectivity radius" in r.getMessage() for r in caplog.records)
