"""This module contains the stochastic mirror descent runners: the
fixed-step convex method, the decaying-step strongly convex method and the
parallel aggregation of independent trajectories.

"""

import logging
import math
import time
from concurrent.futures import ThreadPoolExecutor

import numpy as np

from ..errors import ConfigurationError, InputError, RunAborted, \
    check_positive
from ..functions.random import stream
from .oracle import HEAVY_TAIL
from .record import RunRecord

logger = logging.getLogger(__name__)

FIXED = "fixed"
INVERSE_K = "inverse-k"

STEP_RULES = (FIXED, INVERSE_K)

# trace points kept per run when no stride is given
TRACE_POINTS = 1000

# deviation bound constants for bounded and sub-Gaussian noise
C1 = C2 = 3.0

ERR_NOT_FINITE = "Oracle returned a non-finite subgradient at step {}."
ERR_TRAJECTORY = "Trajectory {} aborted: {}"
ERR_STEP_RULE = "Step rule '{}' cannot be used here, expected '{}'."
ERR_NO_MODULUS = "Oracle has no strong convexity modulus (mu={}); use " \
                 "run_smd with the fixed step rule instead."


class SolverConfig:
    """Iteration budget N, Bregman radius estimate R (R^2 >= V(x_*, x0)),
    step rule and seed of a run. `stride` decimates the traces.

    """

    def __init__(self, N, R, step_rule=FIXED, seed=0, stride=None,
                 keep_iterates=False):

        if isinstance(N, bool) or int(N) != N or N < 1:
            raise ConfigurationError("N must be an integer >= 1, got {}."
                                     .format(N))

        if not R > 0:
            raise ConfigurationError("R must be positive, got {}.".format(R))

        if step_rule not in STEP_RULES:
            raise ConfigurationError("Step rule must be one of {}, got '{}'."
                                     .format(STEP_RULES, step_rule))

        self.N = int(N)
        self.R = float(R)
        self.step_rule = step_rule
        self.seed = int(seed)
        self.stride = int(stride) if stride else max(1, self.N // TRACE_POINTS)
        self.keep_iterates = keep_iterates

    def __repr__(self):
        return "SolverConfig(N={}, R={}, step_rule='{}', seed={})".format(
            self.N, self.R, self.step_rule, self.seed)


def required_iterations(M, R, eps):
    """Return N = ceil(2 M^2 R^2 / eps^2)."""

    M = check_positive("M", M)
    R = check_positive("R", R)
    eps = check_positive("eps", eps)

    return ceil_count(2.0 * M ** 2 * R ** 2 / eps ** 2)


def ceil_count(value):
    """Ceiling that ignores rounding noise, so that a formula evaluating to
    800.0000000000001 gives 800.

    """

    nearest = round(value)
    if abs(value - nearest) <= 1e-9 * max(1.0, value):
        return max(1, int(nearest))
    return max(1, int(math.ceil(value)))


def step_size(M, R, N):
    return R / M * math.sqrt(2.0 / N)


def convex_bound(M, R, N, delta=0.0):
    return M * R * math.sqrt(2.0 / N) + delta


def strongly_convex_bound(M2, mu, N, delta=0.0):
    return M2 ** 2 * (1.0 + math.log(N)) / (2.0 * mu * N) + delta


def trajectory_count(sigma):
    """Return K = ceil(2 log2(1/sigma)) trajectories for confidence
    1 - sigma.

    """

    if not 0 < sigma < 1:
        raise InputError("Confidence level sigma must lie in (0, 1), got {}."
                         .format(sigma))
    return ceil_count(2.0 * math.log2(1.0 / sigma))


def deviation_bound(M, R, diameter, N, sigma, noise="bounded"):
    """Return C1 M / sqrt(N) * (R + C2 Rbar sqrt(ln(1/sigma))), the level
    that a single run stays below with probability 1 - sigma.

    """

    if noise == HEAVY_TAIL:
        raise ConfigurationError("The deviation bound has no known constant "
                                 "for heavy-tailed noise.")

    return C1 * M / math.sqrt(N) * (
        R + C2 * diameter * math.sqrt(math.log(1.0 / sigma)))


def descend(gradient, geometry, N, step, rng, gap=None, stride=1,
            keep_iterates=False, calls_per_step=1, skip_start=False):
    """Run N mirror steps x^{k+1} = Mirr_{x^k}(h_k g^k) from the start of
    `geometry` and return the average of x^0..x^{N-1}, or of x^1..x^N when
    `skip_start` is set.

    `gradient(x, rng)` supplies g^k and `step(k)` the step size h_k for
    k = 1..N. `gap`, when given, is evaluated on the running average every
    `stride` steps.

    """

    x = geometry.start_point()
    total = np.zeros(geometry.n)
    steps, gaps, iterates = [], [], []
    started = time.perf_counter()

    for k in range(1, N + 1):
        if not skip_start:
            total += x

        direction = gradient(x, rng)
        if not np.all(np.isfinite(direction)):
            raise RunAborted(ERR_NOT_FINITE.format(k), step=k)

        x = geometry.mirror_step(x, direction, step(k))
        if skip_start:
            total += x

        record = k % stride == 0 or k == N
        if keep_iterates and record:
            iterates.append(x.copy())
        if gap is not None and record:
            steps.append(k)
            gaps.append(gap(total / k))

    return RunRecord(total / N, steps=steps, gaps=gaps,
                     oracle_calls=calls_per_step * N,
                     wall_clock=time.perf_counter() - started,
                     iterates=np.array(iterates) if keep_iterates else None)


def _gap_of(oracle):
    if oracle.true_value is None or oracle.minimum is None:
        return None
    return oracle.gap


def _schedule(oracle, geometry, config):
    """Return the step function and the bound of the configured rule."""

    if config.step_rule == FIXED:
        h = step_size(oracle.M, config.R, config.N)
        bound = convex_bound(oracle.M, config.R, config.N, oracle.delta)
        return (lambda k: h), h, bound

    if not oracle.mu > 0:
        raise ConfigurationError(ERR_NO_MODULUS.format(oracle.mu))

    if not geometry.is_euclidean:
        raise ConfigurationError("The decaying step rule needs a Euclidean "
                                 "geometry, got '{}'.".format(geometry.kind))

    mu = oracle.mu
    bound = strongly_convex_bound(oracle.M, mu, config.N, oracle.delta)
    return (lambda k: 1.0 / (mu * k)), 1.0 / mu, bound


def _run(oracle, geometry, config, rng, label):
    step, h, bound = _schedule(oracle, geometry, config)

    record = descend(oracle.gradient, geometry, config.N, step, rng,
                     gap=_gap_of(oracle), stride=config.stride,
                     keep_iterates=config.keep_iterates,
                     skip_start=config.step_rule == INVERSE_K)

    record.step_size = h
    record.bound = bound
    record.label = label
    return record


def run_smd(oracle, geometry, config):
    """Stochastic mirror descent with the fixed step h = (R/M) sqrt(2/N).

    Returns the RunRecord of the average over x^0..x^{N-1}; its bound is
    MR sqrt(2/N) + delta.

    """

    if config.step_rule != FIXED:
        raise ConfigurationError(ERR_STEP_RULE.format(config.step_rule, FIXED))

    record = _run(oracle, geometry, config, stream(config.seed), oracle.name)

    logger.debug("run_smd %s: N=%d h=%.6g gap=%s", oracle.name, config.N,
                 record.step_size, record.final_gap)
    return record


def run_smd_strongly_convex(oracle, geometry, config):
    """Mirror descent with h_k = 1 / (mu k) on a Euclidean geometry.

    Returns the RunRecord of the average over x^1..x^N; its bound is
    M2^2 (1 + ln N) / (2 mu N) + delta.

    """

    if not oracle.mu > 0:
        raise ConfigurationError(ERR_NO_MODULUS.format(oracle.mu))

    if config.step_rule != INVERSE_K:
        raise ConfigurationError(ERR_STEP_RULE.format(config.step_rule,
                                                      INVERSE_K))

    record = _run(oracle, geometry, config, stream(config.seed), oracle.name)

    logger.debug("run_smd_strongly_convex %s: N=%d gap=%s", oracle.name,
                 config.N, record.final_gap)
    return record


def _warn_heavy_tail(oracle, sigma, N):
    noise = getattr(oracle, "noise", None)
    if noise is None or noise.kind != HEAVY_TAIL:
        return

    scale = sigma ** (-1.0 / (noise.alpha - 1.0))
    if N < 10 * scale:
        logger.warning("Heavy-tailed noise with alpha=%s needs N >> "
                       "sigma^(-1/(alpha-1)) = %.3g, got N=%d.",
                       noise.alpha, scale, N)


def run_parallel_aggregate(oracle_factory, geometry, config, sigma,
                           workers=1):
    """Run K = ceil(2 log2(1/sigma)) independent trajectories and return
    the equal-weight average of their averaged points.

    `oracle_factory(i)` returns the oracle of trajectory i, which draws
    from `stream(config.seed, i)`. Trajectories may run on `workers`
    threads; the average is always formed in trajectory order.

    """

    K = trajectory_count(sigma)
    oracles = [oracle_factory(i) for i in range(K)]

    _warn_heavy_tail(oracles[0], sigma, config.N)

    def run_one(i):
        try:
            return _run(oracles[i], geometry, config, stream(config.seed, i),
                        "{}[{}]".format(oracles[i].name, i))
        except RunAborted as error:
            raise RunAborted(ERR_TRAJECTORY.format(i, error),
                             step=error.step, trajectory=i)

    started = time.perf_counter()

    if workers > 1:
        with ThreadPoolExecutor(max_workers=workers) as pool:
            records = list(pool.map(run_one, range(K)))
    else:
        records = [run_one(i) for i in range(K)]

    averaged = np.zeros(geometry.n)
    for record in records:
        averaged += record.averaged_point
    averaged /= K

    gap = _gap_of(oracles[0])
    steps, gaps = ([config.N], [gap(averaged)]) if gap else ([], [])

    logger.info("run_parallel_aggregate: K=%d N=%d gap=%s", K, config.N,
                gaps[-1] if gaps else None)

    return RunRecord(averaged, steps=steps, gaps=gaps,
                     oracle_calls=sum(r.oracle_calls for r in records),
                     wall_clock=time.perf_counter() - started,
                     step_size=records[0].step_size, bound=records[0].bound,
                     trajectories=records, label="parallel")
