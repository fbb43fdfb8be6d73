"""This module tests the prox geometries and the mirror step"""

import itertools

import numpy as np
import pytest

from smdsim.core.prox import ProxGeometry, ENTROPIC_SIMPLEX, \
    EUCLIDEAN_FREE, EUCLIDEAN_SIMPLEX, project_simplex, prox_value, \
    bregman, mirror_step
from smdsim.errors import DomainError, InputError


@pytest.fixture
def entropic():
    return ProxGeometry(ENTROPIC_SIMPLEX, 2)


@pytest.fixture
def euclidean():
    return ProxGeometry(EUCLIDEAN_FREE, 2)


@pytest.fixture
def rng():
    return np.random.default_rng(7)


def brute_force_projection(y):
    """Enumerate supports of the simplex projection."""

    best, best_distance = None, np.inf
    for size in range(1, y.size + 1):
        for support in itertools.combinations(range(y.size), size):
            support = list(support)
            theta = (y[support].sum() - 1.0) / size
            z = np.zeros_like(y)
            z[support] = y[support] - theta
            if np.all(z >= 0):
                distance = np.sum((z - y) ** 2)
                if distance < best_distance:
                    best, best_distance = z, distance
    return best


def test_prox_value_entropic(entropic):
    assert prox_value(entropic, [0.5, 0.5]) == pytest.approx(0.0, abs=1e-15)
    assert prox_value(entropic, [1.0, 0.0]) == pytest.approx(np.log(2))


def test_prox_value_euclidean(euclidean):
    assert prox_value(euclidean, [3.0, 4.0]) == 12.5


def test_prox_value_zero_at_custom_start():
    geometry = ProxGeometry(EUCLIDEAN_FREE, 2, start=[1.0, -1.0])

    assert prox_value(geometry, [1.0, -1.0]) == 0.0


def test_prox_value_rejects_infeasible(entropic):
    with pytest.raises(DomainError) as error:
        prox_value(entropic, [0.7, 0.7])
    assert "sum" in str(error.value)

    with pytest.raises(DomainError) as error:
        prox_value(entropic, [1.5, -0.5])
    assert "Coordinate 1" in str(error.value)


def test_bregman_examples(entropic, euclidean):
    x = np.array([0.5, 0.5])

    assert bregman(entropic, x, x) == 0.0
    assert bregman(euclidean, [1.0, 0.0], [0.0, 0.0]) == 0.5
    assert bregman(entropic, x, [0.25, 0.75]) == \
        pytest.approx(0.5 * np.log(2) + 0.5 * np.log(2.0 / 3.0))
    assert bregman(entropic, x, [0.25, 0.75]) == pytest.approx(0.14384, 1e-4)


def test_bregman_rejects_zero_coordinate(entropic):
    with pytest.raises(DomainError):
        bregman(entropic, [0.5, 0.5], [1.0, 0.0])


def test_bregman_strong_convexity(rng):
    geometry = ProxGeometry(ENTROPIC_SIMPLEX, 5)

    for _ in range(1000):
        x, y = rng.dirichlet(np.ones(5), size=2)
        lower = 0.5 * np.abs(x - y).sum() ** 2
        assert geometry.bregman(x, y) >= lower - 1e-9


def test_mirror_step_examples(entropic, euclidean):
    x = np.array([0.5, 0.5])

    np.testing.assert_allclose(mirror_step(entropic, x, [0.0, 0.0], 1.0), x)
    np.testing.assert_allclose(mirror_step(entropic, x, [1.0, -1.0],
                                           np.log(2)), [0.2, 0.8])
    np.testing.assert_allclose(mirror_step(euclidean, [1.0, 1.0],
                                           [1.0, 0.0], 0.5), [0.5, 1.0])


def test_mirror_step_shift_invariant(rng):
    geometry = ProxGeometry(ENTROPIC_SIMPLEX, 6)
    x = rng.dirichlet(np.ones(6))
    v = rng.normal(size=6)

    np.testing.assert_allclose(geometry.mirror_step(x, v, 0.3),
                               geometry.mirror_step(x, v + 17.0, 0.3),
                               rtol=0, atol=1e-12)


def test_mirror_step_large_gradients_stay_feasible(rng):
    geometry = ProxGeometry(ENTROPIC_SIMPLEX, 4)

    for _ in range(2000):
        x = rng.dirichlet(np.ones(4))
        v = rng.normal(scale=1e3, size=4)
        z = geometry.mirror_step(x, v, rng.uniform(0.01, 10))
        assert geometry.contains(z)


def test_mirror_step_overflowing_scores():
    geometry = ProxGeometry(ENTROPIC_SIMPLEX, 3)
    x = np.ones(3) / 3

    z = geometry.mirror_step(x, [1e300, 2e300, 3e300], 1e10)
    np.testing.assert_allclose(z, [1.0, 0.0, 0.0])

    z = geometry.mirror_step(x, [-1e308, 1e308, 0.0], 1e10)
    np.testing.assert_allclose(z, [1.0, 0.0, 0.0])

    z = geometry.mirror_step(x, np.full(3, 1e300), 1e10)
    np.testing.assert_allclose(z, x)

    z = geometry.mirror_step([0.0, 0.5, 0.5], [-1e308, 1e308, 0.0], 1e10)
    np.testing.assert_allclose(z, [0.0, 0.0, 1.0])


def test_mirror_step_rejects_nan(entropic):
    with pytest.raises(InputError):
        mirror_step(entropic, [0.5, 0.5], [np.nan, 0.0], 1.0)


@pytest.mark.parametrize("n", [2, 3, 5])
def test_projection_matches_brute_force(rng, n):
    for _ in range(200):
        y = rng.normal(scale=2.0, size=n)
        np.testing.assert_allclose(project_simplex(y),
                                   brute_force_projection(y), atol=1e-9)


def test_euclidean_simplex_step_is_projection():
    geometry = ProxGeometry(EUCLIDEAN_SIMPLEX, 3)
    z = geometry.mirror_step(geometry.start_point(), [1.0, 0.0, -1.0], 1.0)

    assert geometry.contains(z)
    np.testing.assert_allclose(z, project_simplex(np.array([-2, 1, 4]) / 3))


def test_diameter_and_radius():
    assert ProxGeometry(ENTROPIC_SIMPLEX, 3).diameter() == 2.0
    assert ProxGeometry(EUCLIDEAN_SIMPLEX, 3).diameter() == \
        pytest.approx(np.sqrt(2))
    assert ProxGeometry(EUCLIDEAN_FREE, 3).diameter() == np.inf

    geometry = ProxGeometry(ENTROPIC_SIMPLEX, 4)
    assert geometry.radius([1.0, 0.0, 0.0, 0.0]) == \
        pytest.approx(np.sqrt(np.log(4)))


def test_dual_norms():
    entropic = ProxGeometry(ENTROPIC_SIMPLEX, 3)

    assert entropic.norm([1.0, -2.0, 0.5]) == 3.5
    assert entropic.dual_norm([1.0, -2.0, 0.5]) == 2.0


def test_invalid_kind():
    with pytest.raises(InputError):
        ProxGeometry("spectrahedron", 3)
