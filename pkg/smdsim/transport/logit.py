"""This module contains logit route choice: the Gumbel sampler, the softmin
choice probabilities and the logit revision dynamics on a RoadNetwork.

"""

import logging

import numpy as np
import pandas as pd
from scipy.special import softmax

from ..errors import ConfigurationError, InputError, check_positive
from ..functions import random
from ..functions.random import stream
from .network import path_costs

logger = logging.getLogger(__name__)

MEAN_FIELD = "mean-field"
AGENT = "agent"

MODES = (MEAN_FIELD, AGENT)

BATCHES = 20

# open interval guard for the inverse CDF
U_LOW = np.finfo(float).tiny
U_HIGH = 1.0 - np.finfo(float).epsneg

ERR_GAMMA = "Temperature gamma must be positive, got {}."
ERR_AGENTS = "OD pair {} has demand {!r}, which gives {!r} agents for " \
             "agents={}; agent mode needs an integer count."


def gumbel_quantile(u, gamma):
    """Inverse CDF -gamma (ln(-ln u) + E) of the zero-mean Gumbel law with
    CDF exp(-exp(-z/gamma - E)).

    """

    if not gamma > 0:
        raise InputError(ERR_GAMMA.format(gamma))

    u = np.clip(np.asarray(u, dtype=float), U_LOW, U_HIGH)
    return -gamma * (np.log(-np.log(u)) + np.euler_gamma)


def gumbel_sample(gamma, rng, size=None):
    """Draw zero-mean Gumbel(gamma) perturbations, variance
    gamma^2 pi^2 / 6.

    """

    if not gamma > 0:
        raise InputError(ERR_GAMMA.format(gamma))

    shape = (1,) if size is None else size
    draws = gumbel_quantile(random.random(shape, rng), gamma)
    return float(draws[0]) if size is None else draws


def logit_choice(costs, gamma):
    """Softmin exp(-G_p/gamma) / sum_q exp(-G_q/gamma)."""

    if not gamma > 0:
        raise InputError(ERR_GAMMA.format(gamma))
    return softmax(-np.asarray(costs, dtype=float) / gamma)


class LogitRecord:
    """Contains a logit dynamics trajectory: recorded ticks and the path
    flows at those ticks.

    """

    def __init__(self, steps, flows, mode, gamma, lam):
        self.steps = np.asarray(steps, dtype=int)
        self.flows = np.asarray(flows, dtype=float)
        self.mode = mode
        self.gamma = gamma
        self.lam = lam

    def __repr__(self):
        return "LogitRecord(mode='{}', gamma={}, points={})".format(
            self.mode, self.gamma, len(self.steps))

    @property
    def final_flow(self):
        return self.flows[-1]

    def time_average(self, burn_in=0):
        """Average of the recorded flows after tick `burn_in`."""

        return self.flows[self.steps > burn_in].mean(axis=0)

    def trace(self):
        frame = pd.DataFrame({"step": self.steps})
        for p in range(self.flows.shape[1]):
            frame["x_{}".format(p)] = self.flows[:, p]
        return frame


def _mean_field_tick(network, x, gamma, eta):
    costs = path_costs(network, x)
    target = np.empty_like(x)
    for od, paths in zip(network.od_pairs, network.od_slices):
        target[paths] = od.demand * logit_choice(costs[paths], gamma)
    return (1.0 - eta) * x + eta * target


def _agent_counts(network, x, agents):
    """Integer agent counts per path for flow `x` with `agents` agents per
    unit of demand.

    """

    for w, od in enumerate(network.od_pairs):
        count = od.demand * agents
        if abs(count - round(count)) > 1e-9 * max(1.0, count):
            raise ConfigurationError(ERR_AGENTS.format(w, od.demand, count,
                                                       agents))

    counts = np.floor(x * agents + 0.5).astype(int)
    for od, paths in zip(network.od_pairs, network.od_slices):
        missing = int(round(od.demand * agents)) - counts[paths].sum()
        counts[paths.start + int(np.argmax(x[paths]))] += missing
    return counts


def _agent_tick(network, counts, agents, gamma, eta, rng):
    """Each agent revises with probability eta. A reviser picks
    argmax_q(-G_q + zeta_q) with fresh Gumbel draws, ties broken uniformly.

    """

    costs = path_costs(network, counts / agents)
    revisers = rng.binomial(counts, eta)
    updated = counts - revisers

    for od, paths in zip(network.od_pairs, network.od_slices):
        total = int(revisers[paths].sum())
        if total == 0:
            continue

        width = paths.stop - paths.start
        scores = -costs[paths] + gumbel_sample(gamma, rng, (total, width))
        ties = scores == scores.max(axis=1, keepdims=True)
        keys = np.where(ties, random.random((total, width), rng), -1.0)
        picks = np.argmax(keys, axis=1)
        updated[paths] += np.bincount(picks, minlength=width)

    return updated


def run_logit_dynamics(network, gamma, lam, horizon, mode=MEAN_FIELD,
                       agents=1000, seed=0, stride=1, x0=None):
    """Simulate logit route revisions for `horizon` ticks.

    With population scale `agents`, every agent revises with probability
    eta = lam / agents per tick. `agent` mode simulates d_w * agents
    individual agents, `mean-field` iterates
    x <- (1 - eta) x + eta d_w logit_choice(G(x), gamma) per OD pair.
    Flows are recorded every `stride` ticks, tick 0 included.

    """

    gamma = check_positive("gamma", gamma)
    lam = check_positive("lam", lam)

    if mode not in MODES:
        raise InputError("Mode must be one of {}, got '{}'."
                         .format(MODES, mode))

    if isinstance(agents, bool) or int(agents) != agents or agents < 1:
        raise ConfigurationError("agents must be a positive integer, got {}."
                                 .format(agents))

    eta = lam / agents
    if eta > 1:
        raise ConfigurationError("Revision probability lam/agents = {} "
                                 "exceeds 1.".format(eta))

    x = network.check_flow(network.uniform_flow() if x0 is None else x0)
    rng = stream(seed)

    if mode == AGENT:
        counts = _agent_counts(network, x, agents)
        x = counts / agents

    steps, flows = [0], [x.copy()]

    for k in range(1, int(horizon) + 1):
        if mode == AGENT:
            counts = _agent_tick(network, counts, agents, gamma, eta, rng)
            x = counts / agents
        else:
            x = _mean_field_tick(network, x, gamma, eta)

        if k % stride == 0 or k == horizon:
            steps.append(k)
            flows.append(x.copy())

    logger.debug("run_logit_dynamics %s (%s): gamma=%s eta=%.3g ticks=%d",
                 network.name, mode, gamma, eta, horizon)
    return LogitRecord(steps, flows, mode, gamma, lam)


def batch_means_se(series, batches=BATCHES):
    """Return the mean of a correlated series and its batch-means standard
    error. Rows are time; trailing rows that do not fill a batch are
    dropped.

    """

    series = np.asarray(series, dtype=float)
    size = series.shape[0] // batches
    if size < 1:
        raise InputError("Series of length {} is too short for {} batches."
                         .format(series.shape[0], batches))

    means = series[:size * batches].reshape((batches, size) +
                                            series.shape[1:]).mean(axis=1)
    return means.mean(axis=0), means.std(axis=0, ddof=1) / np.sqrt(batches)
