"""This module contains the generator wrapper classes."""


class BaseWrapper(object):
    """Define base template for generator method wrappers. """

    def __init__(self, method):
        self.method = method

    def __call__(self, *args, **kwargs):
        raise NotImplementedError


class GeneratorWrapper(BaseWrapper):
    """Wrapper for methods of `numpy.random.Generator`. Binds the
    distribution parameters once and returns a draw function of the form
    `draw(shape, rng)`, so noise models never repeat the size plumbing.

    For instance, instead of writing
    'lambda shape, rng: rng.uniform(-s, s, size=shape)'

    you may simply write
    'GeneratorWrapper("uniform")(-s, s)'.

    """

    def __init__(self, method, size="kwarg"):
        super(GeneratorWrapper, self).__init__(method)
        self.size = size

    def __call__(self, *args, **kwargs):

        if self.size == "arg":
            def wrapped(shape, rng):
                return getattr(rng, self.method)(shape, *args, **kwargs)

        elif self.size == "kwarg":
            def wrapped(shape, rng):
                return getattr(rng, self.method)(*args, size=shape, **kwargs)

        else:
            raise ValueError("Size argument must be 'arg' or 'kwarg'.")

        wrapped.__name__ = self.method
        return wrapped
