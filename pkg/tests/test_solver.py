"""This module tests the stochastic mirror descent runners"""

import numpy as np
import pytest

from smdsim.core.oracle import StochasticOracle, simplex_linear_problem, \
    quadratic_problem
from smdsim.core.prox import ProxGeometry, ENTROPIC_SIMPLEX, EUCLIDEAN_FREE
from smdsim.core.solver import SolverConfig, INVERSE_K, \
    required_iterations, step_size, convex_bound, strongly_convex_bound, \
    trajectory_count, deviation_bound, run_smd, run_smd_strongly_convex, \
    run_parallel_aggregate
from smdsim.errors import ConfigurationError, InputError, RunAborted


@pytest.fixture
def simplex_problem():
    c = np.linspace(0.0, 0.5, 10)
    geometry = ProxGeometry(ENTROPIC_SIMPLEX, 10)
    return simplex_linear_problem(c), geometry, np.sqrt(np.log(10))


@pytest.fixture
def quadratic():
    center = np.ones(10) / np.sqrt(10)
    geometry = ProxGeometry(EUCLIDEAN_FREE, 10)
    return center, geometry, geometry.radius(center)


@pytest.mark.parametrize("M, R, eps, expected", [
    (1.0, 1.0, 0.1, 200),
    (1.0, 1.0, np.sqrt(2.0), 1),
    (2.0, 3.0, 0.3, 800),
])
def test_required_iterations(M, R, eps, expected):
    assert required_iterations(M, R, eps) == expected


def test_required_iterations_rejects_nonpositive():
    with pytest.raises(InputError):
        required_iterations(0.0, 1.0, 0.1)


def test_step_and_bound():
    assert step_size(2.0, 1.0, 8) == pytest.approx(0.25)
    assert convex_bound(2.0, 1.0, 8, delta=0.1) == pytest.approx(1.1)
    assert strongly_convex_bound(1.0, 0.5, 1, delta=0.05) == \
        pytest.approx(1.05)


@pytest.mark.parametrize("sigma, K", [(0.25, 4), (0.1, 7), (0.5, 2)])
def test_trajectory_count(sigma, K):
    assert trajectory_count(sigma) == K


def test_deviation_bound():
    assert deviation_bound(1.0, 1.0, 2.0, 100, np.exp(-1.0)) == \
        pytest.approx(0.3 * 7.0)

    with pytest.raises(ConfigurationError):
        deviation_bound(1.0, 1.0, 2.0, 100, 0.1, noise="heavy-tail")


def test_config_validation():
    with pytest.raises(ConfigurationError):
        SolverConfig(0, 1.0)
    with pytest.raises(ConfigurationError):
        SolverConfig(10, 0.0)
    with pytest.raises(ConfigurationError):
        SolverConfig(10, 1.0, step_rule="adaptive")


def test_zero_gradient_keeps_start():
    geometry = ProxGeometry(ENTROPIC_SIMPLEX, 3)
    oracle = StochasticOracle(lambda x: np.zeros(3), M=1.0)
    record = run_smd(oracle, geometry, SolverConfig(50, 1.0))

    np.testing.assert_allclose(record.averaged_point, geometry.start_point())
    assert record.oracle_calls == 50
    assert record.final_gap is None


def test_linear_loss_moves_to_vertex():
    geometry = ProxGeometry(ENTROPIC_SIMPLEX, 2)
    c = np.array([1.0, 0.0])
    oracle = StochasticOracle(lambda x: c, M=1.0, q=np.inf)
    record = run_smd(oracle, geometry, SolverConfig(1000, np.sqrt(np.log(2))))

    assert record.averaged_point[1] >= 0.95
    assert geometry.contains(record.averaged_point)


def test_gap_within_bound_for_most_seeds(simplex_problem):
    oracle, geometry, R = simplex_problem
    records = [run_smd(oracle, geometry, SolverConfig(1000, R, seed=seed))
               for seed in range(50)]
    hits = [record.final_gap <= record.bound for record in records]

    assert np.mean(hits) >= 0.9


def test_run_is_deterministic(simplex_problem):
    oracle, geometry, R = simplex_problem
    first = run_smd(oracle, geometry, SolverConfig(200, R, seed=3, stride=10))
    second = run_smd(oracle, geometry, SolverConfig(200, R, seed=3,
                                                    stride=10))

    assert np.array_equal(first.gaps, second.gaps)
    assert np.array_equal(first.averaged_point, second.averaged_point)
    assert first.trace()["step"].tolist() == list(range(10, 201, 10))


def test_nan_oracle_aborts_with_step():
    geometry = ProxGeometry(EUCLIDEAN_FREE, 2)
    calls = []

    def grad(x):
        calls.append(x)
        return np.full(2, np.nan) if len(calls) == 4 else np.ones(2)

    with pytest.raises(RunAborted) as error:
        run_smd(StochasticOracle(grad, M=1.0), geometry, SolverConfig(10, 1.0))
    assert error.value.step == 4


def test_strongly_convex_improves():
    geometry = ProxGeometry(EUCLIDEAN_FREE, 2, start=[1.0, 0.0])
    oracle = StochasticOracle(lambda x: x, M=1.0, mu=0.5,
                              true_value=lambda x: 0.5 * np.sum(x ** 2),
                              minimum=0.0)

    gaps = [run_smd_strongly_convex(
        oracle, geometry, SolverConfig(N, 1.0, INVERSE_K)).final_gap
        for N in (10, 100)]

    assert gaps[1] < gaps[0]


@pytest.mark.parametrize("delta", [0.0, 0.05])
def test_strongly_convex_median_gap(quadratic, delta):
    center, geometry, R = quadratic
    oracle = quadratic_problem(center, delta=delta)

    for N in (100, 1000):
        records = [run_smd_strongly_convex(
            oracle, geometry, SolverConfig(N, R, INVERSE_K, seed=seed))
            for seed in range(50)]
        median = np.median([record.final_gap for record in records])
        assert median <= records[0].bound


def test_strongly_convex_needs_modulus(simplex_problem):
    oracle, geometry, R = simplex_problem

    with pytest.raises(ConfigurationError) as error:
        run_smd_strongly_convex(oracle, geometry,
                                SolverConfig(10, R, INVERSE_K))
    assert "run_smd" in str(error.value)


def test_step_rules_are_checked(quadratic, simplex_problem):
    center, geometry, R = quadratic

    with pytest.raises(ConfigurationError):
        run_smd(quadratic_problem(center), geometry,
                SolverConfig(10, R, INVERSE_K))

    oracle, simplex, R = simplex_problem
    with pytest.raises(ConfigurationError):
        run_smd_strongly_convex(quadratic_problem(np.full(10, 0.1)), simplex,
                                SolverConfig(10, R, INVERSE_K))


def test_parallel_deterministic_equals_single_run():
    geometry = ProxGeometry(ENTROPIC_SIMPLEX, 3)
    c = np.array([0.3, 0.0, 0.1])
    oracle = StochasticOracle(lambda x: c, M=1.0, q=np.inf,
                              true_value=lambda x: float(c @ x), minimum=0.0)
    config = SolverConfig(100, 1.0)

    single = run_smd(oracle, geometry, config)
    parallel = run_parallel_aggregate(lambda i: oracle, geometry, config,
                                      0.25)

    assert len(parallel.trajectories) == 4
    assert parallel.oracle_calls == 400
    np.testing.assert_allclose(parallel.averaged_point, single.averaged_point)


def test_parallel_workers_match_sequential(simplex_problem):
    oracle, geometry, R = simplex_problem
    config = SolverConfig(200, R, seed=5)

    sequential = run_parallel_aggregate(lambda i: oracle, geometry, config,
                                        0.1)
    threaded = run_parallel_aggregate(lambda i: oracle, geometry, config, 0.1,
                                      workers=3)

    assert np.array_equal(sequential.averaged_point, threaded.averaged_point)
    assert sequential.trajectory_points.shape == (7, 10)


def test_parallel_abort_names_trajectory():
    geometry = ProxGeometry(EUCLIDEAN_FREE, 2)

    def factory(i):
        value = np.nan if i == 2 else 1.0
        return StochasticOracle(lambda x: np.full(2, value), M=1.0)

    with pytest.raises(RunAborted) as error:
        run_parallel_aggregate(factory, geometry, SolverConfig(5, 1.0), 0.25)
    assert error.value.trajectory == 2
    assert error.value.step == 1
