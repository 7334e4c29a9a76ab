import math

import numpy as np
import pytest
from scipy.optimize import linprog

from shared.errors import ManifoldMismatchError, UsageError
from shared.manifold_core import ManifoldId
from shared.quantization import Codebook, QuantizedMeasure
from shared.sampling import sample_uniform
from shared.transport import (
    MAX_ATOMS,
    circle_w1,
    cost_matrix,
    discrete_wasserstein,
    distance_matrix,
    pad_to_support,
    pairwise_transport,
    padded_union_compare,
    union_support,
)

CIRCLE = ManifoldId.circle()
SPD2 = ManifoldId.spd(2)


def random_spd_rows(rng, count):
    rows = []
    for _ in range(count):
        q, _ = np.linalg.qr(rng.standard_normal((2, 2)))
        rows.append(((q * rng.uniform(0.3, 4.0, size=2)) @ q.T).ravel())
    return np.array(rows)


def random_measure(rng, manifold, count, uniform_weights=False):
    if manifold == SPD2:
        centers = random_spd_rows(rng, count)
    else:
        centers = sample_uniform(manifold, count, seed=int(rng.integers(1 << 30))).coords
    weights = np.full(count, 1.0 / count) if uniform_weights else rng.dirichlet(np.ones(count))
    return QuantizedMeasure(Codebook(manifold, centers), weights)


def lp_wasserstein(mu, nu, p):
    cost = cost_matrix(mu, nu) ** p
    m, n = cost.shape
    rows = np.zeros((m, m * n))
    cols = np.zeros((n, m * n))
    for i in range(m):
        rows[i, i * n:(i + 1) * n] = 1.0
    for j in range(n):
        cols[j, j::n] = 1.0
    res = linprog(
        cost.ravel(),
        A_eq=np.vstack([rows, cols]),
        b_eq=np.concatenate([mu.weights, nu.weights]),
        bounds=(0, None),
        method="highs",
    )
    assert res.success
    return max(res.fun, 0.0) ** (1.0 / p)


def test_dirac_measures():
    a = QuantizedMeasure(Codebook(CIRCLE, [[0.5]]), [1.0])
    b = QuantizedMeasure(Codebook(CIRCLE, [[2.0]]), [1.0])
    value, plan = discrete_wasserstein(a, b)
    assert value == pytest.approx(1.5)
    assert plan.matrix.tolist() == [[1.0]]
    assert circle_w1(a, b) == pytest.approx(1.5)


def test_identical_measures_are_at_distance_zero():
    rng = np.random.default_rng(1)
    mu = random_measure(rng, SPD2, 5)
    value, plan = discrete_wasserstein(mu, mu, p=2)
    assert value == pytest.approx(0.0, abs=1e-9)
    assert np.allclose(plan.matrix, np.diag(mu.weights), atol=1e-12)


@pytest.mark.parametrize("p", [1.0, 2.0])
@pytest.mark.parametrize("manifold", [SPD2, ManifoldId.sphere2()], ids=lambda m: m.tag)
def test_simplex_matches_linear_programming(manifold, p):
    rng = np.random.default_rng(2)
    for trial in range(40):
        m, n = rng.integers(1, 7, size=2)
        even = trial % 4 == 0
        mu = random_measure(rng, manifold, int(m), uniform_weights=even)
        nu = random_measure(rng, manifold, int(n), uniform_weights=even)
        value, plan = discrete_wasserstein(mu, nu, p)
        assert value == pytest.approx(lp_wasserstein(mu, nu, p), rel=1e-7, abs=1e-9)
        assert np.all(plan.matrix >= 0.0)
        assert np.allclose(plan.matrix.sum(axis=1), mu.weights, atol=1e-9)
        assert np.allclose(plan.matrix.sum(axis=0), nu.weights, atol=1e-9)


def test_metric_axioms():
    rng = np.random.default_rng(3)
    for _ in range(30):
        a, b, c = (random_measure(rng, SPD2, int(rng.integers(1, 6))) for _ in range(3))
        ab = discrete_wasserstein(a, b)[0]
        assert ab == pytest.approx(discrete_wasserstein(b, a)[0], abs=1e-9)
        assert discrete_wasserstein(a, c)[0] <= ab + discrete_wasserstein(b, c)[0] + 1e-9


def test_circle_closed_form_matches_simplex():
    rng = np.random.default_rng(4)
    for _ in range(50):
        mu = random_measure(rng, CIRCLE, int(rng.integers(1, 8)))
        nu = random_measure(rng, CIRCLE, int(rng.integers(1, 8)))
        assert circle_w1(mu, nu) == pytest.approx(discrete_wasserstein(mu, nu)[0], abs=1e-9)


def test_circle_w1_wraps_around():
    a = QuantizedMeasure(Codebook(CIRCLE, [[0.1]]), [1.0])
    b = QuantizedMeasure(Codebook(CIRCLE, [[2.0 * math.pi - 0.1]]), [1.0])
    assert circle_w1(a, b) == pytest.approx(0.2, abs=1e-12)


def test_padding_to_the_union_of_supports():
    rng = np.random.default_rng(5)
    mu = random_measure(rng, SPD2, 3)
    shared_row = mu.codebook.centers[1]
    nu = QuantizedMeasure(Codebook(SPD2, np.vstack([shared_row, random_spd_rows(rng, 2)])), [0.2, 0.3, 0.5])

    support = union_support(mu, nu)
    assert support.n == 5
    padded = pad_to_support(nu, support)
    assert padded.weights.tolist() == pytest.approx([0.0, 0.2, 0.0, 0.3, 0.5])

    value, plan = padded_union_compare(mu, nu)
    assert plan.matrix.shape == (5, 5)
    assert value == pytest.approx(discrete_wasserstein(mu, nu)[0], abs=1e-9)


def test_distance_matrix_layout():
    rng = np.random.default_rng(6)
    measures = [random_measure(rng, SPD2, 3) for _ in range(4)]
    out = distance_matrix(measures)
    assert out.shape == (4, 4)
    assert np.all(np.diag(out) == 0.0)
    assert np.array_equal(out, out.T)

    again, pairs = pairwise_transport(measures, p=2.0)
    assert [(i, j) for i, j, _ in pairs] == [(0, 1), (0, 2), (0, 3), (1, 2), (1, 3), (2, 3)]
    for i, j, plan in pairs:
        assert again[i, j] == again[j, i] == pytest.approx(discrete_wasserstein(measures[i], measures[j], p=2.0)[0])
        assert plan.matrix.sum() == pytest.approx(1.0)


def test_invalid_comparisons():
    rng = np.random.default_rng(7)
    mu = random_measure(rng, SPD2, 2)
    with pytest.raises(UsageError):
        discrete_wasserstein(mu, mu, p=0.5)
    with pytest.raises(ManifoldMismatchError):
        discrete_wasserstein(mu, random_measure(rng, CIRCLE, 2))
    with pytest.raises(UsageError):
        circle_w1(mu, mu)
    big = random_measure(rng, CIRCLE, MAX_ATOMS + 1, uniform_weights=True)
    with pytest.raises(UsageError):
        discrete_wasserstein(big, big)


def test_circle_w1_handles_empirical_measures_above_the_simplex_cap():
    count = 4 * MAX_ATOMS
    grid = QuantizedMeasure(
        Codebook(CIRCLE, (2.0 * math.pi * np.arange(count) / count)[:, None]),
        np.full(count, 1.0 / count),
    )
    dirac = QuantizedMeasure(Codebook(CIRCLE, [[0.0]]), [1.0])
    assert circle_w1(dirac, grid) == pytest.approx(math.pi / 2.0, rel=1e-12)
    with pytest.raises(UsageError):
        discrete_wasserstein(dirac, grid)


def ridge_measure(rng, count, ridge=1e-8):
    rows = []
    for _ in range(count):
        a = rng.standard_normal(2)
        rows.append((np.outer(a, a) + ridge * np.eye(2)).ravel())
    return QuantizedMeasure(Codebook(SPD2, np.array(rows)), rng.dirichlet(np.ones(count)))


def test_near_singular_measures_compare_symmetrically():
    rng = np.random.default_rng(8)
    for _ in range(10):
        mu, nu = ridge_measure(rng, 3), ridge_measure(rng, 4)
        forward = discrete_wasserstein(mu, nu)[0]
        backward = discrete_wasserstein(nu, mu)[0]
        assert forward == pytest.approx(backward, abs=1e-6)
        assert forward == pytest.approx(lp_wasserstein(nu, mu, 1.0), abs=1e-6)
        assert np.allclose(cost_matrix(mu, nu), cost_matrix(nu, mu).T, atol=1e-6)
