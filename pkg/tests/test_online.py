"""This module tests exp-weights, action sampling and the casino game"""

import math

import numpy as np
import pytest

from smdsim.core.online import EXPECTED, SAMPLED, FIXED, MAJORITY, COIN, \
    POLICIES, HEADS, TAILS, exp_weights_step, sample_action, regret_bound, \
    ConstantStream, SequenceStream, CasinoAdversary, casino_adversary, \
    run_exp_weights
from smdsim.core.prox import ProxGeometry, ENTROPIC_SIMPLEX
from smdsim.core.record import RegretRecord
from smdsim.errors import DomainError, InputError, ProtocolError
from smdsim.functions.random import stream


def test_exp_weights_step_examples():
    x = np.array([0.5, 0.5])

    np.testing.assert_allclose(exp_weights_step(x, [0.0, 0.0], 1.0), x)
    np.testing.assert_allclose(exp_weights_step(x, [1.0, -1.0], np.log(2)),
                               [0.2, 0.8])
    np.testing.assert_allclose(exp_weights_step([0.2, 0.3, 0.5],
                                                [4.0, 4.0, 4.0], 0.7),
                               [0.2, 0.3, 0.5])


def test_exp_weights_step_rejects_non_simplex():
    with pytest.raises(DomainError):
        exp_weights_step([0.5, 0.7], [0.0, 0.0], 1.0)


def test_sample_action_degenerate():
    rng = stream(0)

    assert {sample_action([1.0, 0.0, 0.0], rng) for _ in range(100)} == {0}


@pytest.mark.parametrize("x", [[0.25] * 4, [0.1, 0.9]])
def test_sample_action_frequencies(x):
    rng = stream(1)
    draws = [sample_action(x, rng) for _ in range(10000)]
    frequencies = np.bincount(draws, minlength=len(x)) / len(draws)

    np.testing.assert_allclose(frequencies, x, atol=0.02)


def test_regret_bound_value():
    assert regret_bound(1.0, 2, 10000) == pytest.approx(0.011774, rel=1e-4)


def test_constant_stream_regret_vanishes():
    regrets = []
    for N in (10, 100, 1000):
        record = run_exp_weights(ConstantStream([0.0, 1.0]), 2, N, 1.0)
        assert record.regret <= record.bound
        regrets.append(record.regret)

    assert regrets[0] > regrets[1] > regrets[2] > 0


def test_single_round():
    record = run_exp_weights(ConstantStream([1.0, -1.0]), 2, 1, 1.0)

    assert record.rounds == 1
    assert record.regret <= np.sqrt(2 * np.log(2))


def test_zero_rounds_give_empty_record():
    record = run_exp_weights(ConstantStream([1.0, 0.0]), 2, 0, 1.0)

    assert record.is_empty
    assert record.regret is None
    assert record.win_frequency() is None


def test_protocol_violation():
    with pytest.raises(ProtocolError) as error:
        run_exp_weights(ConstantStream([2.0, 0.0]), 2, 5, 1.0)
    assert "step 1" in str(error.value)


def test_invalid_mode_and_policy():
    with pytest.raises(InputError):
        run_exp_weights(ConstantStream([1.0, 0.0]), 2, 5, 1.0, mode="greedy")
    with pytest.raises(InputError):
        CasinoAdversary("cheat")
    with pytest.raises(InputError):
        casino_adversary([], COIN)


def test_weights_match_mirror_steps():
    losses = stream(2).uniform(-1, 1, size=(50, 3))
    record = run_exp_weights(SequenceStream(losses, M=1.0), 3, 50, 1.0,
                             keep_weights=True)

    geometry = ProxGeometry(ENTROPIC_SIMPLEX, 3)
    h = math.sqrt(math.log(3)) * math.sqrt(2.0 / 50)
    x = geometry.start_point()
    for k in range(50):
        assert np.array_equal(record.weights[k], x)
        x = geometry.mirror_step(x, losses[k], h)

    assert np.all(record.weights > 0)


def test_sequence_stream_cycles():
    stream_ = SequenceStream([[1.0, 0.0], [0.0, 1.0]])

    assert stream_.next([None] * 3).tolist() == [0.0, 1.0]
    assert stream_.M == 1.0


def test_casino_policies():
    assert np.array_equal(casino_adversary([], FIXED), HEADS)
    assert np.array_equal(casino_adversary([0, 1], FIXED, sequence=[1, -1, 1]),
                          HEADS)
    assert np.array_equal(casino_adversary([0], FIXED, sequence=[1, -1]),
                          TAILS)

    # the learner mostly bet on heads, so the casino announces tails
    assert np.array_equal(casino_adversary([0, 0, 1], MAJORITY), TAILS)
    assert np.array_equal(casino_adversary([[0.4, 0.6]], MAJORITY), HEADS)
    assert np.array_equal(casino_adversary([], MAJORITY), HEADS)


@pytest.mark.parametrize("policy", POLICIES)
@pytest.mark.parametrize("N", [100, 1000, 10000])
def test_casino_regret_expected(policy, N):
    record = run_exp_weights(CasinoAdversary(policy), 2, N, 1.0)

    assert record.regret <= regret_bound(1.0, 2, N)


def test_all_heads_learner_wins():
    record = run_exp_weights(CasinoAdversary(FIXED), 2, 100, 1.0,
                             mode=SAMPLED, seed=3)

    assert record.win_frequency() >= 0.7


@pytest.mark.slow
@pytest.mark.parametrize("policy", POLICIES)
def test_casino_regret_sampled(policy):
    N = 1000
    regrets = [run_exp_weights(CasinoAdversary(policy, seed=seed), 2, N, 1.0,
                               mode=SAMPLED, seed=seed).regret
               for seed in range(50)]
    se = np.std(regrets, ddof=1) / np.sqrt(len(regrets))

    assert np.median(regrets) <= regret_bound(1.0, 2, N) + 3 * se


def test_regret_may_be_negative():
    record = RegretRecord([[1.0, 0.0], [0.0, 1.0]], [1, 0], [0.0, 0.0],
                          bound=1.0, mode=SAMPLED)

    assert record.regret == pytest.approx(-0.5)


def test_trace_columns():
    record = run_exp_weights(CasinoAdversary(MAJORITY), 2, 20, 1.0)
    frame = record.trace()

    assert list(frame.columns) == ["step", "loss_0", "loss_1", "play",
                                   "learner_loss", "regret", "bound"]
    assert frame["step"].tolist() == list(range(1, 21))
    assert record.mode == EXPECTED
