"""This module tests the oracles, noise models and synthetic problems"""

import numpy as np
import pytest

from smdsim.core.oracle import NoiseModel, StochasticOracle, ValueOracle, \
    BOUNDED, SUBGAUSSIAN, HEAVY_TAIL, NONE, simplex_linear_problem, \
    quadratic_problem, value_quadratic_problem, value_norm_problem, \
    value_linear_problem, constant_bias, pull_away_bias
from smdsim.errors import InputError
from smdsim.functions.random import stream


@pytest.fixture
def c():
    return np.linspace(0.0, 0.5, 10)


def second_moment(oracle, x, draws=10000, seed=0):
    rng = stream(seed)
    norms = [np.linalg.norm(oracle.gradient(x, rng), oracle.q) ** 2
             for _ in range(draws)]
    return np.mean(norms)


@pytest.mark.parametrize("noise", [BOUNDED, SUBGAUSSIAN, HEAVY_TAIL])
def test_simplex_linear_second_moment(c, noise):
    oracle = simplex_linear_problem(c, noise=noise)
    x = np.full(10, 0.1)

    assert second_moment(oracle, x) <= 1.05 * oracle.M ** 2


def test_quadratic_second_moment():
    center = np.ones(5) / np.sqrt(5)
    oracle = quadratic_problem(center)

    assert second_moment(oracle, np.zeros(5)) <= 1.05 * oracle.M ** 2
    assert oracle.mu == 1.0
    assert oracle.gap(center) == 0.0


def test_bounded_noise_is_bounded():
    noise = NoiseModel(BOUNDED, 0.5, q=np.inf)
    draws = noise.draw((1000, 4), stream(1))

    assert np.abs(draws).max() <= 0.5


def test_heavy_tail_probability():
    noise = NoiseModel(HEAVY_TAIL, 1.0, q=np.inf, alpha=3.0)
    draws = noise.draw((200000, 3), stream(2))
    squared = np.abs(draws).max(axis=1) ** 2

    assert np.mean(squared >= 1.0) == pytest.approx(0.125, abs=0.005)


def test_noise_is_zero_mean():
    noise = NoiseModel(SUBGAUSSIAN, 1.0)
    draws = noise.draw((100000, 2), stream(3))

    np.testing.assert_allclose(draws.mean(axis=0), 0.0, atol=0.01)


def test_noise_model_validation():
    with pytest.raises(InputError):
        NoiseModel("cauchy", 1.0)
    with pytest.raises(InputError):
        NoiseModel(HEAVY_TAIL, 1.0, alpha=2.0)
    with pytest.raises(InputError):
        NoiseModel(BOUNDED, -1.0)


def test_scalar_noise_draw():
    assert np.shape(NoiseModel(BOUNDED, 1.0).draw((), stream(0))) == ()
    assert NoiseModel(NONE).draw((3,), stream(0)).tolist() == [0.0] * 3


def test_simplex_linear_budget(c):
    with pytest.raises(InputError):
        simplex_linear_problem(c, delta=0.1)

    oracle = simplex_linear_problem(c * 0.8, delta=0.1)
    assert oracle.gap(oracle.minimizer) == 0.0
    np.testing.assert_allclose(oracle._vector_bias(None)[0], 0.1)


def test_bias_above_delta_rejected():
    oracle = StochasticOracle(lambda x: np.zeros(2), M=1.0, delta=0.1,
                              bias=np.array([0.2, 0.0]))

    with pytest.raises(InputError):
        oracle.gradient(np.zeros(2), stream(0))


def test_constant_bias_norm():
    bias = constant_bias([3.0, 4.0], 0.5)

    assert np.linalg.norm(bias) == pytest.approx(0.5)
    with pytest.raises(InputError):
        constant_bias([0.0, 0.0], 0.5)


def test_pull_away_bias():
    bias = pull_away_bias([0.0], 0.2, 2.0)

    assert bias(np.array([0.0])) == 0.0
    assert bias(np.array([1.0])) == pytest.approx(-0.1)
    assert bias(np.array([10.0])) == pytest.approx(-0.2)


def test_value_oracles():
    center = np.array([1.0, 0.0])
    quadratic = value_quadratic_problem(center)
    norm = value_norm_problem(center)
    linear = value_linear_problem([1.0, 2.0], minimum=1.0)
    rng = stream(0)

    assert quadratic.value(np.zeros(2), rng) == 0.5
    assert quadratic.M2 == pytest.approx(1.0)
    assert norm.value(np.array([1.0, 3.0]), rng) == 3.0
    assert norm.L2 is None
    assert linear.gap(np.array([1.0, 0.0])) == 0.0


def test_value_bias_above_delta_rejected():
    oracle = ValueOracle(lambda x: 0.0, M2=1.0, delta=0.1, bias=0.3)

    with pytest.raises(InputError):
        oracle.value(np.zeros(1), stream(0))


def test_oracle_without_gradient():
    oracle = ValueOracle(lambda x: 0.0, M2=1.0)

    assert not oracle.has_gradient
    with pytest.raises(InputError):
        oracle.gradient(np.zeros(1), stream(0))
