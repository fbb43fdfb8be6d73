"""This module contains the prox geometries: prox-functions, Bregman
divergences and the mirror step shared by all solvers.

"""

import numpy as np
from scipy.special import logsumexp, rel_entr, xlogy

from ..errors import (DomainError, InputError, ERR_DIMENSION, ERR_NOT_FINITE,
                      check_positive)

ENTROPIC_SIMPLEX = "entropic-simplex"
EUCLIDEAN_FREE = "euclidean-free"
EUCLIDEAN_SIMPLEX = "euclidean-simplex"

KINDS = (ENTROPIC_SIMPLEX, EUCLIDEAN_FREE, EUCLIDEAN_SIMPLEX)

FEASIBILITY_TOL = 1e-12

ERR_KIND = "Geometry kind must be one of {}, got '{}'."
ERR_NEGATIVE = "Coordinate {} is negative ({!r}), simplex requires x_i >= 0."
ERR_SUM = "Coordinates sum to {!r}, simplex requires a sum of 1."
ERR_ZERO = "Coordinate {} of '{}' is zero, entropic geometry requires " \
           "strictly positive points."


class ProxGeometry:
    """A prox setup on R^n: the feasible set Q, the norm exponent p with its
    dual exponent q, the prox-function d and its Bregman divergence V.

    Entropic-simplex uses p=1, q=inf and d(x) = ln n + sum x_i ln x_i. Both
    Euclidean kinds use p=q=2 and d(x) = 1/2 ||x - x0||^2, where x0 is the
    start point (origin for the free space, simplex center otherwise).

    """

    def __init__(self, kind, n, start=None):
        if kind not in KINDS:
            raise InputError(ERR_KIND.format(KINDS, kind))

        if isinstance(n, bool) or int(n) != n or n < 1:
            raise InputError("Dimension must be a positive integer, got {}."
                             .format(n))

        self.kind = kind
        self.n = int(n)

        if kind == ENTROPIC_SIMPLEX:
            self.p, self.q = 1.0, np.inf
        else:
            self.p, self.q = 2.0, 2.0

        if start is not None:
            if kind == ENTROPIC_SIMPLEX:
                raise InputError("Entropic geometry starts at the uniform "
                                 "point; a custom start is not supported.")
            self.start = self.check(start, "start")
        elif kind == EUCLIDEAN_FREE:
            self.start = np.zeros(self.n)
        else:
            self.start = np.full(self.n, 1.0 / self.n)

    def __repr__(self):
        return "ProxGeometry(kind='{}', n={})".format(self.kind, self.n)

    @property
    def is_simplex(self):
        return self.kind != EUCLIDEAN_FREE

    @property
    def is_euclidean(self):
        return self.kind != ENTROPIC_SIMPLEX

    def start_point(self):
        return self.start.copy()

    def check(self, x, name="x"):
        """Return `x` as a float vector, raising DomainError naming the
        violated constraint when it is not in Q.

        """

        x = as_vector(x, self.n, name)

        if self.is_simplex:
            negative = np.flatnonzero(x < -FEASIBILITY_TOL)
            if negative.size:
                raise DomainError(ERR_NEGATIVE.format(negative[0],
                                                      x[negative[0]]))

            total = x.sum()
            if abs(total - 1.0) > FEASIBILITY_TOL * max(1.0, self.n ** 0.5):
                raise DomainError(ERR_SUM.format(total))

        return x

    def contains(self, x):
        """Membership predicate of Q."""

        try:
            self.check(x)
        except (DomainError, InputError):
            return False
        return True

    def norm(self, x):
        return np.linalg.norm(np.asarray(x, dtype=float), self.p)

    def dual_norm(self, v):
        return np.linalg.norm(np.asarray(v, dtype=float), self.q)

    def diameter(self):
        """Return max ||x - y||_p over Q."""

        if self.kind == ENTROPIC_SIMPLEX:
            return 2.0
        if self.kind == EUCLIDEAN_SIMPLEX:
            return np.sqrt(2.0)
        return np.inf

    def prox_value(self, x):
        x = self.check(x)

        if self.kind == ENTROPIC_SIMPLEX:
            x = np.clip(x, 0.0, None)
            return max(np.log(self.n) + xlogy(x, x).sum(), 0.0)

        return 0.5 * np.sum((x - self.start) ** 2)

    def bregman(self, x, y):
        x = self.check(x)
        y = self.check(y, "y")

        if self.kind == ENTROPIC_SIMPLEX:
            zero = np.flatnonzero(y <= 0)
            if zero.size:
                raise DomainError(ERR_ZERO.format(zero[0], "y"))
            return max(rel_entr(np.clip(x, 0.0, None), y).sum(), 0.0)

        return 0.5 * np.sum((x - y) ** 2)

    def radius(self, x_star):
        """Return R = sqrt(V(x_star, x0)) for the start point x0."""

        if self.kind == ENTROPIC_SIMPLEX:
            return np.sqrt(self.bregman(x_star, self.start))
        return np.sqrt(self.prox_value(x_star))

    def mirror_step(self, x, v, h):
        """Return argmin_z { <h v, z - x> + V(z, x) } over Q."""

        x = self.check(x)
        v = as_vector(v, self.n, "v")
        h = check_positive("h", h)

        if self.kind == ENTROPIC_SIMPLEX:
            # scores relative to the best supported one, overflow only
            # drives coordinates to zero weight
            support = x > 0
            logits = np.full(self.n, -np.inf)
            with np.errstate(over="ignore"):
                shifted = v[support] - v[support].min()
                logits[support] = np.log(x[support]) - h * shifted
            z = np.exp(logits - logsumexp(logits))
            return z / z.sum()

        z = x - h * v
        if self.kind == EUCLIDEAN_SIMPLEX:
            return project_simplex(z)
        return z


def as_vector(x, n, name="x"):
    """Convert `x` to a finite float vector of length `n` or raise
    InputError.

    """

    x = np.array(x, dtype=float)

    if x.shape != (n,):
        raise InputError(ERR_DIMENSION.format(name, x.shape, n))

    if not np.all(np.isfinite(x)):
        raise InputError(ERR_NOT_FINITE.format(name))

    return x


def project_simplex(z):
    """Euclidean projection onto the probability simplex by sorting and
    thresholding.

    """

    z = np.asarray(z, dtype=float)
    u = np.sort(z)[::-1]
    cumulative = np.cumsum(u) - 1.0
    ranks = np.arange(1, z.size + 1)

    support = np.flatnonzero(u - cumulative / ranks > 0)[-1]
    theta = cumulative[support] / (support + 1.0)

    return np.maximum(z - theta, 0.0)


def prox_value(geometry, x):
    return geometry.prox_value(x)


def bregman(geometry, x, y):
    return geometry.bregman(x, y)


def mirror_step(geometry, x, v, h):
    return geometry.mirror_step(x, v, h)
