import math

import numpy as np
import pytest
from scipy.integrate import quad
from scipy.special import i0, i1

from shared.errors import UsageError
from shared.manifold_core import ManifoldId, geometry_for
from shared.sampling import (
    AcceptanceStats,
    RngSeed,
    sample_distribution,
    sample_gaussian_h2,
    sample_uniform,
    sample_vmf_sphere,
    sample_von_mises,
)

N = 20000


def test_von_mises_mean_resultant_length():
    kappa, center = 5.0, 1.0
    stats = AcceptanceStats()
    theta = sample_von_mises(center, kappa, N, seed=3, stats=stats).coords[:, 0]
    resultant = np.mean(np.exp(1j * theta))
    assert abs(resultant) == pytest.approx(i1(kappa) / i0(kappa), abs=0.01)
    assert abs(np.angle(resultant) - center) < 0.02
    assert stats.rate > 0.5
    assert theta.min() >= 0.0 and theta.max() < 2.0 * math.pi


def test_vmf_sphere_polar_moment():
    kappa = 10.0
    points = sample_vmf_sphere([0.0, 0.0, 1.0], kappa, N, seed=4).coords
    expected = 1.0 / math.tanh(kappa) - 1.0 / kappa
    assert np.mean(points[:, 2]) == pytest.approx(expected, abs=0.01)
    assert np.allclose(np.linalg.norm(points, axis=1), 1.0, atol=1e-12)


def test_uniform_sphere_moments():
    points = sample_uniform(ManifoldId.sphere2(), N, seed=5).coords
    assert np.all(np.abs(points.mean(axis=0)) < 0.03)
    assert np.mean(points[:, 2] ** 2) == pytest.approx(1.0 / 3.0, abs=0.02)


@pytest.mark.parametrize("sigma", [0.5, 1.5])
def test_half_plane_gaussian_radius(sigma):
    def density(r):
        # exp(-r^2 / 2 sigma^2) sinh(r), kept in range for large r
        return math.exp(r - r * r / (2.0 * sigma * sigma) - math.log(2.0)) * -math.expm1(-2.0 * r)

    upper = sigma * sigma + 10.0 * sigma + 10.0
    norm_const = quad(density, 0.0, upper)[0]
    mean_r = quad(lambda r: r * density(r), 0.0, upper)[0] / norm_const
    mean_r2 = quad(lambda r: r * r * density(r), 0.0, upper)[0] / norm_const

    center = np.array([0.5, 2.0])
    stats = AcceptanceStats()
    points = sample_gaussian_h2(center, sigma, N, seed=6, stats=stats)
    r = geometry_for(ManifoldId.hyperbolic2()).distances(points.coords, center)
    tolerance = 5.0 * r.std() / math.sqrt(N)
    assert abs(r.mean() - mean_r) < tolerance
    assert np.mean(r ** 2) == pytest.approx(mean_r2, rel=0.02)
    assert stats.rate >= 0.1
    assert np.all(points.coords[:, 1] > 0.0)


def test_same_seed_same_sample():
    a = sample_distribution(ManifoldId.circle(), "von-mises", 500, 7, kappa=2.0)
    b = sample_distribution(ManifoldId.circle(), "von-mises", 500, 7, kappa=2.0)
    c = sample_distribution(ManifoldId.circle(), "von-mises", 500, 8, kappa=2.0)
    assert np.array_equal(a.coords, b.coords)
    assert not np.array_equal(a.coords, c.coords)


def test_named_streams_are_independent():
    seed = RngSeed(1)
    x = seed.generator("init").random(5)
    y = seed.generator("order").random(5)
    assert not np.array_equal(x, y)
    assert np.array_equal(x, RngSeed(1).generator("init").random(5))


def test_invalid_parameters():
    with pytest.raises(UsageError):
        sample_von_mises(0.0, -1.0, 10, seed=0)
    with pytest.raises(UsageError):
        sample_gaussian_h2([0.0, 1.0], 0.0, 10, seed=0)
    with pytest.raises(UsageError):
        sample_distribution(ManifoldId.hyperbolic2(), "uniform", 10, 0)
    with pytest.raises(UsageError):
        sample_distribution(ManifoldId.circle(), "von-mises", 10, 0)
    with pytest.raises(UsageError):
        sample_uniform(ManifoldId.circle(), 0, 0)
    with pytest.raises(UsageError):
        RngSeed(-1)
