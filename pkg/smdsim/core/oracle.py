"""This module contains the stochastic oracles, their noise models and the
synthetic problems used to exercise the solvers.

"""

import numpy as np

from ..errors import InputError, DomainError, check_positive
from ..functions import random

NONE = "none"
BOUNDED = "bounded"
SUBGAUSSIAN = "subgaussian"
HEAVY_TAIL = "heavy-tail"

NOISE_KINDS = (NONE, BOUNDED, SUBGAUSSIAN, HEAVY_TAIL)

ERR_NOISE_KIND = "Noise kind must be one of {}, got '{}'."
ERR_ALPHA = "Heavy-tail index must satisfy alpha > 2, got {}."
ERR_BIAS = "Bias of norm {!r} exceeds the declared level delta={!r}."
ERR_PROBE = "Probe point {} lies outside the oracle domain; shrink the " \
            "smoothing radius."
ERR_BUDGET = "Signal norm {!r} plus bias {!r} exceeds half of M={!r}."


class NoiseModel:
    """Zero-mean additive noise with E||xi||_q^2 <= level^2.

    `bounded` draws uniform coordinates with ||xi||_q <= level surely.
    `subgaussian` draws Gaussian coordinates. `heavy-tail` multiplies random
    signs by sqrt(W), W ~ Lomax(alpha), so that P(||xi||_q^2 >= t level^2)
    = (1 + t)^-alpha. Scalars (shape ()) are treated as one coordinate.

    """

    def __init__(self, kind=NONE, level=0.0, q=2.0, alpha=None):
        if kind not in NOISE_KINDS:
            raise InputError(ERR_NOISE_KIND.format(NOISE_KINDS, kind))

        if kind == HEAVY_TAIL and (alpha is None or not alpha > 2):
            raise InputError(ERR_ALPHA.format(alpha))

        if level < 0:
            raise InputError("Noise level must be nonnegative, got {}."
                             .format(level))

        self.kind = kind
        self.level = float(level)
        self.q = q
        self.alpha = alpha

    def __repr__(self):
        return "NoiseModel(kind='{}', level={}, q={}, alpha={})".format(
            self.kind, self.level, self.q, self.alpha)

    def _scale(self, shape):
        """Per-coordinate scale that turns a unit draw into one with q-norm
        level `level`.

        """

        width = shape[-1] if len(shape) else 1
        if self.q == np.inf:
            return self.level
        return self.level / width ** (1.0 / self.q)

    def draw(self, shape, rng):
        shape = tuple(shape)

        if self.kind == NONE or self.level == 0:
            return np.zeros(shape)

        scale = self._scale(shape)

        if self.kind == BOUNDED:
            return random.uniform(-scale, scale)(shape, rng)

        if self.kind == SUBGAUSSIAN:
            width = shape[-1] if len(shape) else 1
            if self.q == np.inf:
                scale = self.level / np.sqrt(2 * np.log(2 * width) + 2)
            return random.normal(0.0, scale)(shape, rng)

        tail = random.pareto(self.alpha)(shape[:-1] if len(shape) else (), rng)
        tail = np.sqrt(tail)[..., np.newaxis] if len(shape) else np.sqrt(tail)
        return random.signs(shape, rng) * scale * tail


def constant_bias(direction, delta, q=2.0):
    """Return the constant vector along `direction` with q-norm `delta`."""

    direction = np.asarray(direction, dtype=float)
    norm = np.linalg.norm(direction, q)
    if norm == 0:
        raise InputError("Bias direction must be nonzero.")
    return direction * (delta / norm)


def pull_away_bias(center, delta, radius):
    """Value bias b(x) = -delta * min(||x - center|| / radius, 1).

    It never exceeds delta in absolute value, yet its slope delta / radius
    pushes value-based methods away from `center`.

    """

    center = np.asarray(center, dtype=float)
    radius = check_positive("radius", radius)

    def bias(x):
        return -delta * min(np.linalg.norm(x - center) / radius, 1.0)

    return bias


class StochasticOracle:
    """Source of stochastic subgradients g(x, xi) = grad(x) + xi + b(x).

    `M` bounds E||g||_q^2 <= M^2, `delta` bounds the systematic bias b,
    `mu` is the strong convexity modulus (0 when unknown). `true_value` and
    `minimum` enable gap measurement on synthetic problems.

    """

    def __init__(self, grad, M, noise=None, delta=0.0, bias=None, mu=0.0,
                 true_value=None, minimum=None, minimizer=None, q=2.0,
                 name="oracle"):

        self.grad = grad
        self.M = check_positive("M", M)
        self.noise = noise if noise is not None else NoiseModel()
        self.delta = float(delta)
        self.bias = bias
        self.mu = float(mu)
        self.true_value = true_value
        self.minimum = minimum
        self.minimizer = minimizer
        self.q = q
        self.name = name

        if self.delta < 0:
            raise InputError("Bias level delta must be nonnegative.")

    def __repr__(self):
        return "{}(name='{}', M={}, delta={}, mu={})".format(
            type(self).__name__, self.name, self.M, self.delta, self.mu)

    @property
    def has_gradient(self):
        return self.grad is not None

    def _vector_bias(self, x):
        if self.bias is None:
            return 0.0

        bias = self.bias(x) if callable(self.bias) else self.bias
        bias = np.asarray(bias, dtype=float)
        size = np.linalg.norm(bias, self.q)

        if size > self.delta * (1 + 1e-12) + 1e-15:
            raise InputError(ERR_BIAS.format(size, self.delta))
        return bias

    def gradient(self, x, rng):
        """Return one stochastic subgradient realization at `x`."""

        if self.grad is None:
            raise InputError("Oracle '{}' has no gradient access."
                             .format(self.name))

        x = np.asarray(x, dtype=float)
        exact = np.asarray(self.grad(x), dtype=float)

        return exact + self.noise.draw(exact.shape, rng) + self._vector_bias(x)

    def gap(self, x):
        """Return f(x) - f_* or None when the optimum is unknown."""

        if self.true_value is None or self.minimum is None:
            return None
        return float(self.true_value(x)) - self.minimum


class ValueOracle(StochasticOracle):
    """Source of noisy function values f(x, xi) = f(x) + xi + b(x) with
    |b(x)| <= delta.

    `B` bounds E f(x, xi)^2 <= B^2, `M2` is the Lipschitz constant in the
    Euclidean norm and `L2` the gradient Lipschitz constant (None when f is
    nonsmooth). When `grad` is given the oracle also serves directional
    feedback. `domain` is the membership test of the enlarged set where
    probes may be placed.

    """

    def __init__(self, func, M2, noise=None, delta=0.0, bias=None, B=None,
                 L2=None, grad=None, grad_noise=None, minimum=None,
                 minimizer=None, domain=None, name="value-oracle"):

        super(ValueOracle, self).__init__(
            grad=grad, M=M2, noise=grad_noise, true_value=func,
            minimum=minimum, minimizer=minimizer, name=name)

        self.func = func
        self.delta = float(delta)
        self.value_noise = noise if noise is not None else NoiseModel()
        self.value_bias = bias
        self.B = B
        self.L2 = L2
        self.domain = domain

        if self.delta < 0:
            raise InputError("Bias level delta must be nonnegative.")

    @property
    def M2(self):
        return self.M

    def check_probe(self, x):
        if self.domain is not None and not self.domain(x):
            raise DomainError(ERR_PROBE.format(np.array2string(
                np.asarray(x), precision=6)))

    def _value_bias(self, x):
        if self.value_bias is None:
            return 0.0

        bias = float(self.value_bias(x) if callable(self.value_bias)
                     else self.value_bias)
        if abs(bias) > self.delta * (1 + 1e-12) + 1e-15:
            raise InputError(ERR_BIAS.format(abs(bias), self.delta))
        return bias

    def value(self, x, rng):
        """Return one noisy value realization at `x`."""

        x = np.asarray(x, dtype=float)
        self.check_probe(x)

        return (float(self.func(x)) + float(self.value_noise.draw((), rng))
                + self._value_bias(x))


def simplex_linear_problem(c, M=1.0, noise=BOUNDED, alpha=3.0, delta=0.0):
    """Linear loss <c, x> on the simplex with subgradient noise measured in
    the infinity norm.

    Half of `M` is reserved for the noise, so ||c||_inf + delta <= M / 2
    is required. The bias is the constant vector delta * e_i on the best
    coordinate i.

    """

    c = np.asarray(c, dtype=float)
    signal = np.abs(c).max()

    if signal + delta > M / 2.0 * (1 + 1e-12):
        raise InputError(ERR_BUDGET.format(signal, delta, M))

    best = int(np.argmin(c))
    minimizer = np.zeros(c.size)
    minimizer[best] = 1.0

    bias = None
    if delta > 0:
        bias = constant_bias(minimizer, delta, np.inf)

    return StochasticOracle(
        grad=lambda x: c,
        M=M,
        noise=NoiseModel(noise, M / 2.0, q=np.inf,
                         alpha=alpha if noise == HEAVY_TAIL else None),
        delta=delta,
        bias=bias,
        true_value=lambda x: float(np.dot(c, x)),
        minimum=float(c[best]),
        minimizer=minimizer,
        q=np.inf,
        name="simplex-linear")


def quadratic_problem(center, mu=1.0, noise=BOUNDED, noise_level=0.5,
                      delta=0.0, start=None, alpha=3.0):
    """Strongly convex f(x) = mu/2 ||x - center||^2 on R^n with Euclidean
    gradient noise and a constant bias of norm `delta`.

    M2 is declared on the ball around `center` that holds both the start
    and every iterate of the decaying-step method.

    """

    center = np.asarray(center, dtype=float)
    mu = check_positive("mu", mu)
    start = np.zeros(center.size) if start is None else np.asarray(start)

    distance = np.linalg.norm(start - center)
    reach = max(distance, (noise_level + delta) / mu)
    M2 = np.sqrt((mu * reach + delta) ** 2 + noise_level ** 2)

    bias = None
    if delta > 0:
        bias = constant_bias(np.ones(center.size), delta)

    return StochasticOracle(
        grad=lambda x: mu * (x - center),
        M=max(M2, 1e-12),
        noise=NoiseModel(noise, noise_level,
                         alpha=alpha if noise == HEAVY_TAIL else None),
        delta=delta,
        bias=bias,
        mu=mu,
        true_value=lambda x: 0.5 * mu * float(np.sum((x - center) ** 2)),
        minimum=0.0,
        minimizer=center,
        name="quadratic")


def value_quadratic_problem(center, L=1.0, start=None, noise=NONE,
                            noise_level=0.0, delta=0.0, bias=None):
    """Smooth f(x) = L/2 ||x - center||^2 with value access.

    M2 is the Lipschitz constant on the ball around `center` through the
    start point. B covers that ball enlarged by one unit of probing.

    """

    center = np.asarray(center, dtype=float)
    L = check_positive("L", L)
    start = np.zeros(center.size) if start is None else np.asarray(start)
    distance = max(np.linalg.norm(start - center), 1e-12)

    return ValueOracle(
        func=lambda x: 0.5 * L * float(np.sum((x - center) ** 2)),
        M2=L * distance,
        noise=NoiseModel(noise, noise_level),
        delta=delta,
        bias=bias,
        B=0.5 * L * (distance + 1.0) ** 2 + noise_level + delta,
        L2=L,
        grad=lambda x: L * (x - center),
        minimum=0.0,
        minimizer=center,
        name="value-quadratic")


def value_norm_problem(center, start=None, noise=NONE, noise_level=0.0,
                       delta=0.0, bias=None):
    """Nonsmooth f(x) = ||x - center||_2, 1-Lipschitz, with value access."""

    center = np.asarray(center, dtype=float)
    start = np.zeros(center.size) if start is None else np.asarray(start)
    distance = np.linalg.norm(start - center)

    def grad(x):
        offset = x - center
        norm = np.linalg.norm(offset)
        return offset / norm if norm > 0 else np.zeros_like(offset)

    return ValueOracle(
        func=lambda x: float(np.linalg.norm(x - center)),
        M2=1.0,
        noise=NoiseModel(noise, noise_level),
        delta=delta,
        bias=bias,
        B=distance + 1.0 + noise_level + delta,
        grad=grad,
        minimum=0.0,
        minimizer=center,
        name="value-norm")


def value_linear_problem(c, noise=NONE, noise_level=0.0, minimum=None):
    """Linear f(x) = <c, x> with value and gradient access. Pass `minimum`
    when the feasible set is bounded, e.g. min(c) on the simplex.

    """

    c = np.asarray(c, dtype=float)

    return ValueOracle(
        func=lambda x: float(np.dot(c, x)),
        M2=max(np.linalg.norm(c), 1e-12),
        noise=NoiseModel(noise, noise_level),
        B=np.abs(c).sum() + noise_level,
        L2=None,
        grad=lambda x: c,
        minimum=minimum,
        name="value-linear")
