"""This module contains the experiment configuration of the command line
tool: per-command defaults, JSON config files, flag overrides and the
validation that runs before any experiment starts.

"""

import json
import os

from .core.oracle import NOISE_KINDS
from .core.online import EXPECTED, SAMPLED, POLICIES
from .core.zeroth import FEEDBACK_KINDS, SPHERE, COORDINATE
from .errors import ConfigurationError
from .transport.equilibrium import METHODS, MSA, DUAL
from .transport.logit import MODES, MEAN_FIELD
from .transport.network import INSTANCES, RoadNetwork

OUTPUT_ENV = "SMDSIM_OUTPUT_DIR"
OUTPUT_FALLBACK = "smdsim-output"

COMMANDS = ("smd", "zo", "online", "traffic", "bench")

SMD_PROBLEMS = ("simplex-linear", "quadratic")
ZO_PROBLEMS = ("quadratic", "norm")
GAMES = ("casino",)
TRAFFIC_ACTIONS = ("equilibrium", "logit", "dual", "check")

COMMON = {
    "seed": 0,
    "seeds": 1,
    "stride": None,
    "output_dir": None,
    "workers": 1,
}

DEFAULTS = {
    "smd": {
        "problem": "simplex-linear",
        "n": 10,
        "N": [100, 1000, 10000],
        "noise": "bounded",
        "alpha": 3.0,
        "delta": 0.0,
        "mu": 1.0,
        "parallel": False,
        "sigma": 0.1,
        "eps": None,
        "replications": 1,
    },
    "zo": {
        "feedback": "two-point",
        "problem": "quadratic",
        "dims": [4, 16, 64],
        "eps": 0.02,
        "delta": 0.0,
        "noise_level": 0.0,
        "inner_tau2": False,
        "pairs": 2,
        "max_calls": 10 ** 6,
        "directions": SPHERE,
        "seeds": 5,
    },
    "online": {
        "game": "casino",
        "policy": "majority",
        "N": 10000,
        "mode": EXPECTED,
    },
    "traffic": {
        "action": "dual",
        "network": "pigou",
        "gamma": 0.1,
        "N": [100, 1000, 10000],
        "tol": 1e-8,
        "max_iters": 100000,
        "method": MSA,
        "lam": 1.0,
        "horizon": 5000,
        "agents": 1000,
        "mode": MEAN_FIELD,
    },
    "bench": {
        "quick": False,
    },
}

# defaults of one action that replace the command defaults unless the
# config file or a flag sets the field
ACTION_DEFAULTS = {
    ("traffic", "check"): {"method": DUAL, "tol": 1e-6},
    ("traffic", "logit"): {"tol": 1e-6},
}

ERR_FIELD = "invalid-config: {}: {}"


def _integer(value, low):
    return not isinstance(value, bool) and isinstance(value, int) and \
        value >= low


def _number(value):
    return not isinstance(value, bool) and isinstance(value, (int, float))


def _positive(value):
    return _number(value) and value > 0


def _choice(options):
    def check(value):
        if value in options:
            return None
        return "must be one of {}, got {!r}".format(", ".join(options), value)
    return check


def _check_integer(low):
    def check(value):
        if _integer(value, low):
            return None
        return "must be an integer >= {}, got {!r}".format(low, value)
    return check


def _check_integers(low):
    def check(value):
        if isinstance(value, list) and value and \
                all(_integer(v, low) for v in value):
            return None
        return "must be a nonempty list of integers >= {}, got {!r}" \
            .format(low, value)
    return check


def _check_positive(value):
    if _positive(value):
        return None
    return "must be a positive number, got {!r}".format(value)


def _check_optional_positive(value):
    if value is None:
        return None
    return _check_positive(value)


def _check_nonnegative(value):
    if _number(value) and value >= 0:
        return None
    return "must be a nonnegative number, got {!r}".format(value)


def _check_flag(value):
    if isinstance(value, bool):
        return None
    return "must be true or false, got {!r}".format(value)


def _check_sigma(value):
    if _number(value) and 0 < value < 1:
        return None
    return "must lie in (0, 1), got {!r}".format(value)


def _check_alpha(value):
    if _number(value) and value > 2:
        return None
    return "must exceed 2, got {!r}".format(value)


def _check_stride(value):
    if value is None or _integer(value, 1):
        return None
    return "must be an integer >= 1, got {!r}".format(value)


def _check_network(value):
    if RoadNetwork.instance_name(value) is not None or \
            (isinstance(value, str) and os.path.isfile(value)):
        return None
    return "must be one of {} or an existing file, got {!r}".format(
        ", ".join(INSTANCES), value)


def _check_output(value):
    if value is None or isinstance(value, str):
        return None
    return "must be a path, got {!r}".format(value)


VALIDATORS = {
    "seed": _check_integer(0),
    "seeds": _check_integer(1),
    "stride": _check_stride,
    "output_dir": _check_output,
    "workers": _check_integer(1),
    "problem": None,
    "n": _check_integer(2),
    "N": _check_integers(1),
    "noise": _choice(NOISE_KINDS),
    "alpha": _check_alpha,
    "delta": _check_nonnegative,
    "mu": _check_positive,
    "parallel": _check_flag,
    "sigma": _check_sigma,
    "eps": _check_optional_positive,
    "replications": _check_integer(1),
    "feedback": _choice(FEEDBACK_KINDS),
    "dims": _check_integers(1),
    "noise_level": _check_nonnegative,
    "inner_tau2": _check_flag,
    "pairs": _check_integer(1),
    "max_calls": _check_integer(1),
    "directions": _choice((SPHERE, COORDINATE)),
    "game": _choice(GAMES),
    "policy": _choice(POLICIES),
    "mode": None,
    "action": _choice(TRAFFIC_ACTIONS),
    "network": _check_network,
    "gamma": _check_positive,
    "tol": _check_positive,
    "max_iters": _check_integer(1),
    "method": _choice(METHODS),
    "lam": _check_positive,
    "horizon": _check_integer(1),
    "agents": _check_integer(1),
    "quick": _check_flag,
}

# fields whose admissible values depend on the command
PER_COMMAND = {
    ("smd", "problem"): _choice(SMD_PROBLEMS),
    ("zo", "problem"): _choice(ZO_PROBLEMS),
    ("zo", "eps"): _check_positive,
    ("online", "mode"): _choice((EXPECTED, SAMPLED)),
    ("online", "N"): _check_integer(1),
    ("traffic", "mode"): _choice(MODES),
}


class ExperimentConfig:
    """Parameter set of one command. Values are layered as command
    defaults, then the JSON config file, then explicit flags, and are
    available as attributes.

    """

    def __init__(self, command, values):
        if command not in COMMANDS:
            raise ConfigurationError("Unknown command '{}'.".format(command),
                                     field="command")

        self.command = command
        self.values = dict(values)

    def __repr__(self):
        return "ExperimentConfig(command='{}', {})".format(
            self.command, ", ".join("{}={!r}".format(k, v) for k, v in
                                    sorted(self.values.items())))

    def __getattr__(self, name):
        try:
            return self.__dict__["values"][name]
        except KeyError:
            raise AttributeError(name)

    @classmethod
    def from_sources(cls, command, path=None, flags=None):
        """Layer defaults, the config file at `path` and `flags`, then
        validate. Unknown fields are rejected.

        """

        values = dict(COMMON)
        values.update(DEFAULTS.get(command, {}))

        given = {}
        if path is not None:
            given.update(_known(command, read_config_file(path, command)))
        given.update(_known(command, flags or {}))
        values.update(given)

        action = values.get("action")
        overrides = ACTION_DEFAULTS.get((command, action), {}) \
            if isinstance(action, str) else {}
        for field, value in overrides.items():
            if field not in given:
                values[field] = value

        if values["output_dir"] is None:
            values["output_dir"] = os.environ.get(OUTPUT_ENV) or \
                os.path.join(os.curdir, OUTPUT_FALLBACK)

        config = cls(command, values)
        config.validate()
        return config

    def validate(self):
        """Raise ConfigurationError naming the first invalid field."""

        for field in sorted(self.values):
            check = PER_COMMAND.get((self.command, field)) or \
                VALIDATORS.get(field)
            if check is None:
                continue

            reason = check(self.values[field])
            if reason is not None:
                raise ConfigurationError(ERR_FIELD.format(field, reason),
                                         field=field)

    @property
    def seed_list(self):
        return list(range(self.seed, self.seed + self.seeds))

    def to_dict(self):
        return dict(self.values, command=self.command)


def _known(command, values):
    allowed = set(COMMON) | set(DEFAULTS.get(command, {}))
    for field in values:
        if field not in allowed:
            raise ConfigurationError(
                ERR_FIELD.format(field, "unknown field for command '{}'"
                                 .format(command)), field=field)
    return values


def read_config_file(path, command):
    """Read a JSON config file. A section named after the command overrides
    the top-level entries; sections of other commands are ignored.

    """

    try:
        with open(path) as handle:
            data = json.load(handle)
    except (OSError, ValueError) as error:
        raise ConfigurationError(ERR_FIELD.format("config", error),
                                 field="config")

    if not isinstance(data, dict):
        raise ConfigurationError(ERR_FIELD.format(
            "config", "top level must be an object"), field="config")

    values = {key: value for key, value in data.items()
              if key not in COMMANDS}
    section = data.get(command) or {}
    values.update(section)
    return values
