"""This module contains online linear optimization on the simplex:
exp-weights, action sampling, loss streams and the casino adversary.

"""

import logging
import math

import numpy as np

from ..errors import InputError, ProtocolError, check_positive
from ..functions.random import stream
from .prox import ENTROPIC_SIMPLEX, ProxGeometry
from .record import RegretRecord
from .solver import step_size

logger = logging.getLogger(__name__)

EXPECTED = "expected"
SAMPLED = "sampled"

FIXED = "fixed"
MAJORITY = "majority"
COIN = "coin"

POLICIES = (FIXED, MAJORITY, COIN)

HEADS = np.array([-1.0, 1.0])
TAILS = np.array([1.0, -1.0])

ERR_BOUND = "Loss vector at step {} has sup-norm {!r} above the declared " \
            "bound M={!r}."
ERR_POLICY = "Casino policy must be one of {}, got '{}'."


def exp_weights_step(x, l, h):
    """Multiplicative update x_i exp(-h l_i) / sum_j x_j exp(-h l_j).

    Identical to the entropic mirror step.

    """

    x = np.asarray(x, dtype=float)
    return ProxGeometry(ENTROPIC_SIMPLEX, x.size).mirror_step(x, l, h)


def sample_action(x, rng):
    """Sample a vertex index (0-based) with probability x_i by inverting the
    cumulative distribution in coordinate order.

    """

    cumulative = np.cumsum(np.asarray(x, dtype=float))
    index = int(np.searchsorted(cumulative, rng.random() * cumulative[-1],
                                side="right"))
    return min(index, cumulative.size - 1)


def regret_bound(M, n, N):
    """Return M R sqrt(2/N) with R^2 = ln n."""

    return M * math.sqrt(math.log(n)) * math.sqrt(2.0 / N)


class LossStream:
    """Base class of loss sequences with sup-norm bound `M`.

    `next(history)` returns l^k given the plays of rounds 1..k-1; a play is a
    vertex index in sampled mode and a distribution in expected mode.

    """

    def __init__(self, M=1.0):
        self.M = check_positive("M", M)

    def __repr__(self):
        return "{}(M={})".format(type(self).__name__, self.M)

    def next(self, history):
        raise NotImplementedError


class ConstantStream(LossStream):
    """Emits the same loss vector every round."""

    def __init__(self, loss, M=None):
        self.loss = np.asarray(loss, dtype=float)
        super(ConstantStream, self).__init__(
            M if M is not None else max(np.abs(self.loss).max(), 1e-12))

    def next(self, history):
        return self.loss


class SequenceStream(LossStream):
    """Replays a fixed sequence of loss vectors, cycling when exhausted."""

    def __init__(self, losses, M=None):
        self.losses = np.atleast_2d(np.asarray(losses, dtype=float))
        super(SequenceStream, self).__init__(
            M if M is not None else max(np.abs(self.losses).max(), 1e-12))

    def next(self, history):
        return self.losses[len(history) % len(self.losses)]


def _bet_mass(history):
    """Accumulated bet mass per outcome over past plays."""

    mass = np.zeros(2)
    for play in history:
        if np.ndim(play) == 0:
            mass[int(play)] += 1.0
        else:
            mass += np.asarray(play, dtype=float)
    return mass


def casino_adversary(history, policy=MAJORITY, sequence=None, rng=None):
    """Return the loss vector of the announced coin outcome.

    Index 0 bets on heads, index 1 on tails; the announced outcome costs
    -1 to the winning bet and +1 to the losing one. `fixed` replays
    `sequence` (1 for heads, -1 for tails; all heads by default),
    `majority` announces the outcome opposite to the learner's most
    frequent bet so far (heads on ties), `coin` tosses a fair coin from
    `rng`.

    """

    if policy == FIXED:
        if sequence is None:
            return HEADS
        outcome = sequence[len(history) % len(sequence)]
        return HEADS if outcome > 0 else TAILS

    if policy == MAJORITY:
        mass = _bet_mass(history)
        if mass[0] > mass[1]:
            return TAILS
        return HEADS

    if policy == COIN:
        if rng is None:
            raise InputError("The coin policy needs a random generator.")
        return HEADS if rng.random() < 0.5 else TAILS

    raise InputError(ERR_POLICY.format(POLICIES, policy))


class CasinoAdversary(LossStream):
    """Two-outcome betting game against a casino that knows all past bets
    but not the current one.

    """

    def __init__(self, policy=MAJORITY, sequence=None, seed=0):
        super(CasinoAdversary, self).__init__(1.0)

        if policy not in POLICIES:
            raise InputError(ERR_POLICY.format(POLICIES, policy))

        self.policy = policy
        self.sequence = sequence
        self.rng = stream(seed, 1)

    def __repr__(self):
        return "CasinoAdversary(policy='{}')".format(self.policy)

    def next(self, history):
        return casino_adversary(history, self.policy, self.sequence, self.rng)


def run_exp_weights(stream_, n, N, M, mode=EXPECTED, seed=0,
                    keep_weights=False):
    """Play N rounds of exp-weights with h = (R/M) sqrt(2/N), R^2 = ln n.

    In expected mode the learner suffers <l^k, x^k>; in sampled mode it
    plays a vertex drawn from x^k and suffers its loss. The stream sees the
    plays of earlier rounds only.

    """

    if mode not in (EXPECTED, SAMPLED):
        raise InputError("Mode must be '{}' or '{}', got '{}'."
                         .format(EXPECTED, SAMPLED, mode))

    if isinstance(N, bool) or int(N) != N or N < 0:
        raise InputError("N must be a nonnegative integer, got {}."
                         .format(N))

    if N == 0:
        return RegretRecord.empty(n, mode)

    M = check_positive("M", M)
    geometry = ProxGeometry(ENTROPIC_SIMPLEX, n)
    R = math.sqrt(math.log(n))
    h = step_size(M, R, N) if n > 1 else 1.0

    rng = stream(seed)
    x = geometry.start_point()
    history, losses, learner, weights = [], [], [], []

    for k in range(1, int(N) + 1):
        loss = np.asarray(stream_.next(history), dtype=float)

        size = np.abs(loss).max()
        if size > M * (1 + 1e-12):
            raise ProtocolError(ERR_BOUND.format(k, size, M))

        if keep_weights:
            weights.append(x.copy())

        if mode == SAMPLED:
            play = sample_action(x, rng)
            learner.append(loss[play])
        else:
            play = x.copy()
            learner.append(float(np.dot(loss, x)))

        history.append(play)
        losses.append(loss)
        x = geometry.mirror_step(x, loss, h)

    plays = [p if mode == SAMPLED else int(np.argmax(p)) for p in history]
    record = RegretRecord(losses, plays, learner, regret_bound(M, n, N),
                          weights=np.array(weights) if keep_weights else None,
                          mode=mode)

    logger.debug("run_exp_weights: n=%d N=%d mode=%s regret=%.6g bound=%.6g",
                 n, N, mode, record.regret, record.bound)
    return record
