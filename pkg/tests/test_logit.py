"""This module tests the Gumbel sampler and the logit route dynamics"""

import math

import numpy as np
import pytest

from smdsim.errors import ConfigurationError, InputError
from smdsim.functions.random import stream
from smdsim.transport.equilibrium import DUAL, solve_dual
from smdsim.transport.logit import AGENT, MEAN_FIELD, gumbel_quantile, \
    gumbel_sample, logit_choice, run_logit_dynamics, batch_means_se
from smdsim.transport.network import RoadNetwork


@pytest.fixture
def pigou():
    return RoadNetwork.instance("pigou")


@pytest.fixture
def pigou_target(pigou):
    """Logit equilibrium of pigou at gamma = 0.1."""

    return solve_dual(pigou, 0.1, tol=1e-6, method=DUAL).x


def test_gumbel_quantile_examples():
    zero = math.exp(-math.exp(-np.euler_gamma))

    assert gumbel_quantile(zero, 2.0) == pytest.approx(0.0, abs=1e-12)
    assert gumbel_quantile(0.5, 1.0) == \
        pytest.approx(-(math.log(math.log(2.0)) + np.euler_gamma))
    assert np.all(np.isfinite(gumbel_quantile([0.0, 1.0], 1.0)))


def test_gumbel_sample_shapes():
    rng = stream(0)

    assert isinstance(gumbel_sample(0.5, rng), float)
    assert gumbel_sample(0.5, rng, (3, 4)).shape == (3, 4)

    with pytest.raises(InputError):
        gumbel_sample(0.0, rng)
    with pytest.raises(InputError):
        gumbel_quantile(0.5, -1.0)


@pytest.mark.slow
def test_gumbel_moments():
    gamma = 0.5
    draws = gumbel_sample(gamma, stream(1), 10 ** 6)

    assert abs(draws.mean()) <= 3 * draws.std() / 1000
    assert draws.var() == pytest.approx(gamma ** 2 * math.pi ** 2 / 6,
                                        rel=0.02)


def test_gumbel_argmax_is_logit():
    costs = np.array([1.0, 1.2, 1.5])
    gamma = 0.3
    scores = -costs + gumbel_sample(gamma, stream(2), (100000, 3))
    frequencies = np.bincount(scores.argmax(axis=1), minlength=3) / 1e5

    np.testing.assert_allclose(frequencies, logit_choice(costs, gamma),
                               atol=0.01)


def test_logit_choice():
    np.testing.assert_allclose(logit_choice([2.0, 2.0], 0.1), [0.5, 0.5])
    np.testing.assert_allclose(logit_choice([1.0, 2.0], 1e-3), [1.0, 0.0])
    assert logit_choice([0.3, 0.1, 0.7], 1.0).sum() == pytest.approx(1.0)

    with pytest.raises(InputError):
        logit_choice([1.0], 0.0)


def test_mean_field_reaches_logit_equilibrium(pigou, pigou_target):
    record = run_logit_dynamics(pigou, 0.1, 10.0, 2000, agents=100)

    assert record.mode == MEAN_FIELD
    np.testing.assert_allclose(record.final_flow, pigou_target, atol=1e-4)


def test_agent_mode_fluctuates_around_equilibrium(pigou, pigou_target):
    record = run_logit_dynamics(pigou, 0.1, 50.0, 3000, mode=AGENT,
                                agents=1000, seed=4)
    after = record.flows[record.steps > 500]
    mean, se = batch_means_se(after)

    np.testing.assert_allclose(mean, pigou_target, atol=0.02)
    assert np.all(se < 0.01)
    np.testing.assert_allclose(record.flows.sum(axis=1), 1.0)


def test_agent_mode_is_reproducible(pigou):
    first = run_logit_dynamics(pigou, 0.1, 50.0, 100, mode=AGENT, seed=7)
    second = run_logit_dynamics(pigou, 0.1, 50.0, 100, mode=AGENT, seed=7)

    assert np.array_equal(first.flows, second.flows)


def test_recorded_ticks(pigou):
    record = run_logit_dynamics(pigou, 0.1, 1.0, 10, stride=3)

    assert record.steps.tolist() == [0, 3, 6, 9, 10]
    np.testing.assert_allclose(record.flows[0], [0.5, 0.5])
    assert list(record.trace().columns) == ["step", "x_0", "x_1"]


def test_revision_probability_above_one(pigou):
    with pytest.raises(ConfigurationError):
        run_logit_dynamics(pigou, 0.1, 5.0, 10, agents=2)


def test_agent_count_must_be_integer(pigou):
    data = pigou.to_dict()
    data["od_pairs"][0]["demand"] = 0.5
    network = RoadNetwork.from_dict(data)

    with pytest.raises(ConfigurationError) as error:
        run_logit_dynamics(network, 0.1, 1.0, 10, mode=AGENT, agents=3)
    assert "integer" in str(error.value)


def test_invalid_mode(pigou):
    with pytest.raises(InputError):
        run_logit_dynamics(pigou, 0.1, 1.0, 10, mode="best-response")


def test_batch_means_se():
    mean, se = batch_means_se(np.full(100, 2.0))
    assert mean == 2.0
    assert se == 0.0

    series = stream(3).normal(size=20000)
    mean, se = batch_means_se(series)
    assert se == pytest.approx(1.0 / math.sqrt(20000), rel=0.5)

    with pytest.raises(InputError):
        batch_means_se(np.ones(10))
