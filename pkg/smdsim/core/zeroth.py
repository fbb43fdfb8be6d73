"""This module contains the gradient-free surrogates, their smoothing
schedules and the zeroth-order mirror descent runner.

"""

import logging
import math

import numpy as np

from ..errors import ConfigurationError, InputError, check_positive
from ..functions.random import sample_ball, sample_coordinate, \
    sample_sphere, stream, twin_streams
from .prox import as_vector
from .solver import SolverConfig, descend, step_size, convex_bound, \
    ceil_count

logger = logging.getLogger(__name__)

ONE_POINT = "one-point"
TWO_POINT = "two-point"
DIRECTIONAL = "directional"
DOUBLE_SMOOTHED = "double-smoothed"
MULTI_POINT = "multi-point"

FEEDBACK_KINDS = (ONE_POINT, TWO_POINT, DIRECTIONAL, DOUBLE_SMOOTHED,
                  MULTI_POINT)

SPHERE = "sphere"
COORDINATE = "coordinate"

UNIT_TOL = 1e-9

ERR_KIND = "Feedback kind must be one of {}, got '{}'."
ERR_UNIT = "Direction '{}' must have unit Euclidean norm, got {!r}."
ERR_TAUS = "Double smoothing needs tau1 >= tau2 > 0, got ({}, {})."
ERR_NEEDS_L2 = "The two-point schedule needs the gradient Lipschitz " \
               "constant L2; for nonsmooth objectives use double-smoothed " \
               "feedback instead."
ERR_NEEDS_GRAD = "Directional feedback needs an oracle with gradient access."


class SmoothingParams:
    """Smoothing radii and the admissible noise level of one feedback kind.

    `tau` serves the one-point, two-point and multi-point surrogates,
    `(tau1, tau2)` the double-smoothed one. `inner_tau2` places the
    second double-smoothing probe at x + tau2 e1 instead of x + tau1 e1.
    `directions` selects sphere or coordinate randomization and `pairs` the
    number of averaged two-point estimates of the multi-point surrogate.

    """

    def __init__(self, feedback_kind, tau=None, tau1=None, tau2=None,
                 delta_max=None, inner_tau2=False, directions=SPHERE,
                 pairs=1):

        if feedback_kind not in FEEDBACK_KINDS:
            raise InputError(ERR_KIND.format(FEEDBACK_KINDS, feedback_kind))

        if directions not in (SPHERE, COORDINATE):
            raise InputError("Directions must be '{}' or '{}', got '{}'."
                             .format(SPHERE, COORDINATE, directions))

        if feedback_kind in (ONE_POINT, TWO_POINT, MULTI_POINT):
            tau = check_positive("tau", tau)

        if feedback_kind == DOUBLE_SMOOTHED:
            if tau1 is None or tau2 is None or not tau1 >= tau2 > 0:
                raise InputError(ERR_TAUS.format(tau1, tau2))

        if isinstance(pairs, bool) or int(pairs) != pairs or pairs < 1:
            raise InputError("pairs must be a positive integer, got {}."
                             .format(pairs))

        self.feedback_kind = feedback_kind
        self.tau = tau
        self.tau1 = tau1
        self.tau2 = tau2
        self.delta_max = delta_max
        self.inner_tau2 = inner_tau2
        self.directions = directions
        self.pairs = int(pairs)

    def __repr__(self):
        return ("SmoothingParams(feedback_kind='{}', tau={}, tau1={}, "
                "tau2={}, delta_max={})").format(
            self.feedback_kind, self.tau, self.tau1, self.tau2,
            self.delta_max)

    @property
    def calls_per_step(self):
        if self.feedback_kind in (ONE_POINT, DIRECTIONAL):
            return 1
        if self.feedback_kind == MULTI_POINT:
            return 2 * self.pairs
        return 2

    def sample(self, n, rng):
        if self.directions == COORDINATE:
            return sample_coordinate(n, rng)
        return sample_sphere(n, rng)


def _direction(e, n, name="e"):
    e = as_vector(e, n, name)
    norm = np.linalg.norm(e)
    if abs(norm - 1.0) > UNIT_TOL:
        raise InputError(ERR_UNIT.format(name, norm))
    return e


def directional_estimates(g, directions):
    """Return n <g, e> e for one direction or a batch of row directions."""

    directions = np.asarray(directions, dtype=float)
    n = directions.shape[-1]
    return n * (directions @ np.asarray(g, dtype=float))[..., np.newaxis] \
        * directions


def one_point_gradient(oracle, x, tau, e, rng):
    """(n / tau) f(x + tau e, xi) e, one value call."""

    x = np.asarray(x, dtype=float)
    e = _direction(e, x.size)
    tau = check_positive("tau", tau)

    return x.size / tau * oracle.value(x + tau * e, rng) * e


def two_point_gradient(oracle, x, tau, e, rng):
    """(n / tau) (f(x + tau e, xi) - f(x, xi)) e, two value calls sharing
    one noise realization.

    """

    x = np.asarray(x, dtype=float)
    e = _direction(e, x.size)
    tau = check_positive("tau", tau)

    shifted, base = twin_streams(rng)
    difference = oracle.value(x + tau * e, shifted) - oracle.value(x, base)

    return x.size / tau * difference * e


def directional_gradient(oracle, x, e, rng):
    """n <g(x, xi), e> e for one stochastic gradient realization g."""

    if not oracle.has_gradient:
        raise InputError(ERR_NEEDS_GRAD)

    x = np.asarray(x, dtype=float)
    e = _direction(e, x.size)

    return directional_estimates(oracle.gradient(x, rng), e)


def double_smoothed_gradient(oracle, x, tau1, tau2, e1, e2, rng,
                             inner_tau2=False):
    """(n / tau2) (f(x + tau1 e1 + tau2 e2, xi) - f(x + tau1 e1, xi)) e2
    with e1 in the unit ball and e2 on the unit sphere.

    With `inner_tau2` the second probe is x + tau2 e1.

    """

    x = np.asarray(x, dtype=float)
    e1 = as_vector(e1, x.size, "e1")
    e2 = _direction(e2, x.size, "e2")
    tau1 = check_positive("tau1", tau1)
    tau2 = check_positive("tau2", tau2)

    if np.linalg.norm(e1) > 1.0 + UNIT_TOL:
        raise InputError("Direction 'e1' must lie in the unit ball.")

    inner = x + (tau2 if inner_tau2 else tau1) * e1
    outer = x + tau1 * e1 + tau2 * e2

    first, second = twin_streams(rng)
    difference = oracle.value(outer, first) - oracle.value(inner, second)

    return x.size / tau2 * difference * e2


def multi_point_gradient(oracle, x, tau, directions, rng):
    """Average of two-point estimates along the rows of `directions`, 2k
    value calls for k rows.

    """

    directions = np.atleast_2d(np.asarray(directions, dtype=float))
    estimates = [two_point_gradient(oracle, x, tau, e, rng)
                 for e in directions]
    return np.mean(estimates, axis=0)


def choose_smoothing_params(eps, M2, R, n, feedback_kind, L2=None,
                            inner_tau2=False, directions=SPHERE, pairs=1):
    """Return the smoothing radii and admissible noise level for accuracy
    `eps`.

    Two-point: tau = min{max{eps/2M2, sqrt(eps/L2)}, (M2/L2) sqrt(1/6n)},
    delta_max = eps^1.5 / (16 R sqrt(L2 n)). Double smoothing:
    tau1 = eps/4M2, tau2 = eps/4M2n, delta_max = eps^2 / (56 M2 R n^1.5).
    One-point uses the heuristic tau = eps/2M2 and declares no delta_max.

    """

    eps = check_positive("eps", eps)
    M2 = check_positive("M2", M2)
    R = check_positive("R", R)
    n = int(check_positive("n", n))

    options = dict(inner_tau2=inner_tau2, directions=directions,
                   pairs=pairs)

    if feedback_kind in (TWO_POINT, MULTI_POINT):
        if L2 is None:
            raise ConfigurationError(ERR_NEEDS_L2)
        L2 = check_positive("L2", L2)

        tau = min(max(eps / (2 * M2), math.sqrt(eps / L2)),
                  M2 / L2 * math.sqrt(1.0 / (6 * n)))
        delta_max = eps ** 1.5 / (16 * R * math.sqrt(L2 * n))
        return SmoothingParams(feedback_kind, tau=tau, delta_max=delta_max,
                               **options)

    if feedback_kind == DOUBLE_SMOOTHED:
        return SmoothingParams(
            feedback_kind, tau1=eps / (4 * M2), tau2=eps / (4 * M2 * n),
            delta_max=eps ** 2 / (56 * M2 * R * n ** 1.5), **options)

    if feedback_kind == ONE_POINT:
        return SmoothingParams(feedback_kind, tau=eps / (2 * M2), **options)

    if feedback_kind == DIRECTIONAL:
        return SmoothingParams(feedback_kind, **options)

    raise InputError(ERR_KIND.format(FEEDBACK_KINDS, feedback_kind))


def sphere_norm_moment(n, q):
    """Printed bound min{q - 1, 16 ln n - 8} n^(2/q - 1) on E||e||_q^2."""

    return min(q - 1.0, 16 * math.log(n) - 8) * n ** (2.0 / q - 1.0)


def sphere_cross_moment(n, q):
    """Printed bound sqrt(3) min{2q - 1, 32 ln n - 8} n^(2/q - 2) on
    E[<c, e>^2 ||e||_q^2] / ||c||_2^2.

    """

    return math.sqrt(3.0) * min(2 * q - 1.0, 32 * math.log(n) - 8) * \
        n ** (2.0 / q - 2.0)


def _norm_moment(n, q):
    # ||e||_q <= ||e||_2 = 1 for q >= 2
    printed = sphere_norm_moment(n, q)
    return min(printed, 1.0) if printed > 0 else 1.0


def _cross_moment(n, q):
    # E<c, e>^2 = ||c||^2 / n and ||e||_q <= 1
    printed = sphere_cross_moment(n, q)
    return min(printed, 1.0 / n) if printed > 0 else 1.0 / n


def surrogate_second_moment(oracle, smoothing, n, q=2.0):
    """Bound on E||g||_q^2 of the surrogate, used as M^2 for the step size.

    Two-point: 3/4 n^2 tau^2 L2^2 E||e||^2 + 3 n^2 E[<g,e>^2 ||e||^2]
    + 12 delta^2 n^2 / tau^2 E||e||^2. One-point: n^2 B^2 / tau^2 E||e||^2.
    Directional: n^2 E[<g,e>^2 ||e||^2]. Double smoothing uses the
    two-point form with tau2 and no smoothness term. Averaging k pairs
    divides the two-point variance by k.

    """

    if smoothing.directions == COORDINATE:
        norm, cross = 1.0, 1.0 / n
    else:
        norm, cross = _norm_moment(n, q), _cross_moment(n, q)

    M2 = oracle.M
    delta = oracle.delta
    kind = smoothing.feedback_kind

    if kind == DIRECTIONAL:
        return n ** 2 * cross * M2 ** 2

    if kind == ONE_POINT:
        B = oracle.B if oracle.B is not None else M2
        return n ** 2 * B ** 2 / smoothing.tau ** 2 * norm

    if kind == DOUBLE_SMOOTHED:
        tau = smoothing.tau2
        return 3 * n ** 2 * cross * M2 ** 2 + \
            12 * delta ** 2 * n ** 2 / tau ** 2 * norm

    tau = smoothing.tau
    L2 = oracle.L2 if oracle.L2 is not None else 0.0
    moment = 0.75 * n ** 2 * tau ** 2 * L2 ** 2 * norm + \
        3 * n ** 2 * cross * M2 ** 2 + \
        12 * delta ** 2 * n ** 2 / tau ** 2 * norm

    if kind == MULTI_POINT:
        return moment / smoothing.pairs + M2 ** 2
    return moment


def iteration_budget(feedback_kind, eps, M2, n, R=None, B=None, L2=None,
                     mu=None, q=2.0, smooth=False):
    """Iteration count with constant 1 for accuracy `eps`.

    One-point feedback, convex: B^2 M2^2 R^2 n^(1+2/q) / eps^4 (Lipschitz)
    or B^2 L2 R^2 n^(1+2/q) / eps^3 (smooth); strongly convex:
    B^2 M2^2 n^2 / (mu eps^3) or B^2 L2 n^2 / (mu eps^2). Two-point,
    directional and double-smoothed feedback: M2^2 R^2 n^(2/q) / eps^2 for
    convex and M2^2 n / (mu eps) for strongly convex objectives.

    """

    eps = check_positive("eps", eps)
    strongly = mu is not None

    if feedback_kind == ONE_POINT:
        if B is None:
            raise ConfigurationError("One-point budgets need the value "
                                     "bound B.")
        if smooth:
            if L2 is None:
                raise ConfigurationError(ERR_NEEDS_L2)
            if strongly:
                value = B ** 2 * L2 * n ** 2 / (mu * eps ** 2)
            else:
                value = B ** 2 * L2 * R ** 2 * n ** (1 + 2.0 / q) / eps ** 3
        elif strongly:
            value = B ** 2 * M2 ** 2 * n ** 2 / (mu * eps ** 3)
        else:
            value = B ** 2 * M2 ** 2 * R ** 2 * n ** (1 + 2.0 / q) / eps ** 4
    elif strongly:
        value = M2 ** 2 * n / (mu * eps)
    else:
        value = M2 ** 2 * R ** 2 * n ** (2.0 / q) / eps ** 2

    return ceil_count(value)


def _estimator(oracle, smoothing, n):
    kind = smoothing.feedback_kind

    if kind == DIRECTIONAL:
        if not oracle.has_gradient:
            raise ConfigurationError(ERR_NEEDS_GRAD)
        return lambda x, rng: directional_gradient(
            oracle, x, smoothing.sample(n, rng), rng)

    if kind == ONE_POINT:
        return lambda x, rng: one_point_gradient(
            oracle, x, smoothing.tau, smoothing.sample(n, rng), rng)

    if kind == TWO_POINT:
        return lambda x, rng: two_point_gradient(
            oracle, x, smoothing.tau, smoothing.sample(n, rng), rng)

    if kind == MULTI_POINT:
        return lambda x, rng: multi_point_gradient(
            oracle, x, smoothing.tau,
            [smoothing.sample(n, rng) for _ in range(smoothing.pairs)], rng)

    def double(x, rng):
        return double_smoothed_gradient(
            oracle, x, smoothing.tau1, smoothing.tau2, sample_ball(n, rng),
            sample_sphere(n, rng), rng, smoothing.inner_tau2)

    return double


def run_zeroth_order(oracle, geometry, config, smoothing, M=None):
    """Mirror descent driven by a gradient-free surrogate.

    The fixed step uses M = sqrt(surrogate_second_moment) unless `M` is
    given. Oracle calls are N per step for one-point and directional
    feedback, 2N for two-point and double-smoothed feedback.

    """

    n = geometry.n

    if M is None:
        M = math.sqrt(surrogate_second_moment(oracle, smoothing, n,
                                              geometry.q))
    M = check_positive("M", M)

    h = step_size(M, config.R, config.N)
    gap = oracle.gap if oracle.minimum is not None else None

    record = descend(_estimator(oracle, smoothing, n), geometry, config.N,
                     lambda k: h, stream(config.seed), gap=gap,
                     stride=config.stride, keep_iterates=config.keep_iterates,
                     calls_per_step=smoothing.calls_per_step)

    record.step_size = h
    record.bound = convex_bound(M, config.R, config.N)
    record.label = "{}:{}".format(smoothing.feedback_kind, oracle.name)

    logger.debug("run_zeroth_order %s: N=%d M=%.4g h=%.4g gap=%s",
                 record.label, config.N, M, h, record.final_gap)
    return record


def calls_to_accuracy(oracle, geometry, smoothing, eps, R, seeds=5,
                      start=16, growth=1.5, max_calls=10 ** 6):
    """Return the oracle calls after which the median gap over `seeds` runs
    falls to `eps`, searching N over a geometric grid. Returns math.inf
    when `max_calls` is reached first.

    """

    N = int(start)
    while N * smoothing.calls_per_step <= max_calls:
        gaps = [run_zeroth_order(oracle, geometry,
                                 SolverConfig(N, R, seed=seed, stride=N),
                                 smoothing).final_gap
                for seed in range(seeds)]

        if np.median(gaps) <= eps:
            return N * smoothing.calls_per_step

        N = max(N + 1, int(math.ceil(N * growth)))

    return math.inf
