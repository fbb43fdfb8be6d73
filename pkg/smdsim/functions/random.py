"""This module contains the random primitives: seeded streams, sphere, ball
and coordinate direction sampling, and the raw draws used by the noise
models.

"""

import numpy as np

from ..errors import InputError
from .wrapper import GeneratorWrapper

# Raw draws, see
# https://numpy.org/doc/stable/reference/random/generator.html#distributions
random = GeneratorWrapper("random", "arg")()
standard_normal = GeneratorWrapper("standard_normal", "arg")()
uniform = GeneratorWrapper("uniform")
normal = GeneratorWrapper("normal")
pareto = GeneratorWrapper("pareto")
signs = GeneratorWrapper("choice")(np.array([-1.0, 1.0]))

ERR_DIMENSION = "Dimension must be a positive integer, got {}."

# exclusive upper end for child seeds drawn from a parent stream
SEED_SPAN = 2 ** 63


def stream(seed, *keys):
    """Return the generator for `seed` and an optional tuple of integer
    keys, e.g. `stream(seed, trajectory)`. Equal arguments give equal
    streams, distinct keys give independent ones.

    """

    spawn_key = tuple(int(k) for k in keys)
    return np.random.default_rng(
        np.random.SeedSequence(int(seed), spawn_key=spawn_key))


def twin_streams(rng, count=2):
    """Derive `count` generators that produce identical draws. Used by
    the multi-probe estimators so that all value calls of one estimate share
    the same noise realization.

    """

    seed = int(rng.integers(SEED_SPAN))
    return [np.random.default_rng(seed) for _ in range(count)]


def _check_dimension(n):
    if isinstance(n, bool) or int(n) != n or n < 1:
        raise InputError(ERR_DIMENSION.format(n))
    return int(n)


def sample_sphere(n, rng, size=None):
    """Draw directions uniformly from the unit Euclidean sphere in R^n by
    normalizing standard Gaussian vectors. Returns shape (n,) or
    (size, n).

    """

    n = _check_dimension(n)
    shape = (n,) if size is None else (int(size), n)

    draws = standard_normal(shape, rng)
    norms = np.linalg.norm(draws, axis=-1, keepdims=True)

    # a zero Gaussian vector has probability zero; redraw rather than divide
    while np.any(norms == 0):
        zero = (norms == 0)[..., 0]
        draws[zero] = standard_normal(draws[zero].shape, rng)
        norms = np.linalg.norm(draws, axis=-1, keepdims=True)

    return draws / norms


def sample_ball(n, rng, size=None):
    """Draw points uniformly from the unit Euclidean ball: a sphere
    direction scaled by U^{1/n}.

    """

    n = _check_dimension(n)
    directions = sample_sphere(n, rng, size)
    radii = random(directions.shape[:-1] + (1,), rng) ** (1.0 / n)

    return directions * radii


def sample_coordinate(n, rng, size=None):
    """Draw signed coordinate vectors ±e_i with i uniform. Satisfies
    E[n e e^T] = I like the sphere, which makes it a drop-in replacement
    for it.

    """

    n = _check_dimension(n)
    count = 1 if size is None else int(size)

    index = rng.integers(n, size=count)
    directions = np.zeros((count, n))
    directions[np.arange(count), index] = signs((count,), rng)

    return directions[0] if size is None else directions
