"""This module contains the road network model: edges with BPR costs, OD
pairs with explicit path sets, the path-edge incidence and the JSON
ingestion of network files.

"""

import json
import logging
import os

import numpy as np

from ..errors import DomainError, InputError

logger = logging.getLogger(__name__)

INSTANCE_DIR = os.path.join(os.path.dirname(__file__), "instances")
INSTANCES = ("pigou", "braess", "two-route", "grid3x3")

FLOW_TOL = 1e-9

ERR_EDGE_PARAM = "Edge '{}': {} must be {}, got {!r}."
ERR_NEGATIVE_FLOW = "Edge '{}' carries negative flow {!r}."
ERR_BELOW_FREE_FLOW = "Edge '{}' has time t={!r} below its free-flow time " \
                      "t0={!r}; dom sigma* requires t >= t0."
ERR_FROZEN_EDGE = "Edge '{}' has rho=0, dom sigma* is the single point " \
                  "t=t0={!r}, got t={!r}."
ERR_PATH_FLOW = "Path {} carries negative flow {!r}."
ERR_OD_SUM = "Paths of OD pair {} ({} -> {}) carry {!r}, demand is {!r}."
ERR_LINE = "{} (line {})"


class Edge:
    """Directed edge `tail -> head` with BPR parameters: free-flow time `t0`,
    congestion factor `rho`, capacity `fbar` and exponent parameter `mu`.
    The cost is t0 (1 + rho (f / fbar)^(1/mu)).

    """

    def __init__(self, id, tail, head, t0, rho=0.15, mu=0.25, fbar=1.0):
        self.id = str(id)
        self.tail = tail
        self.head = head
        self.t0 = _edge_param(self.id, "t0", t0, "positive")
        self.rho = _edge_param(self.id, "rho", rho, "nonnegative")
        self.mu = _edge_param(self.id, "mu", mu, "positive")
        self.fbar = _edge_param(self.id, "fbar", fbar, "positive")

    def __repr__(self):
        return "Edge('{}', {} -> {}, t0={}, rho={}, mu={}, fbar={})".format(
            self.id, self.tail, self.head, self.t0, self.rho, self.mu,
            self.fbar)

    def to_dict(self):
        return {"id": self.id, "tail": self.tail, "head": self.head,
                "t0": self.t0, "rho": self.rho, "mu": self.mu,
                "fbar": self.fbar}


def _edge_param(edge_id, name, value, kind):
    try:
        value = float(value)
    except (TypeError, ValueError):
        raise InputError(ERR_EDGE_PARAM.format(edge_id, name, kind, value))

    valid = value >= 0 if kind == "nonnegative" else value > 0
    if not valid or not np.isfinite(value):
        raise InputError(ERR_EDGE_PARAM.format(edge_id, name, kind, value))

    return value


class ODPair:
    """Origin-destination pair with demand `demand` and explicit paths, each
    a sequence of edge ids.

    """

    def __init__(self, origin, dest, demand, paths):
        self.origin = origin
        self.dest = dest
        self.demand = float(demand)
        self.paths = [[str(e) for e in path] for path in paths]

    def __repr__(self):
        return "ODPair({} -> {}, demand={}, paths={})".format(
            self.origin, self.dest, self.demand, len(self.paths))

    def to_dict(self):
        return {"origin": self.origin, "dest": self.dest,
                "demand": self.demand, "paths": self.paths}


class RoadNetwork:
    """Directed graph with BPR edges and OD pairs. Paths of all OD pairs are
    numbered consecutively in OD order; `theta` is the edge-by-path incidence
    so that edge flows are f = theta x.

    `lines` optionally maps entries to source lines of a network file and
    is only used to annotate validation errors.

    """

    def __init__(self, nodes, edges, od_pairs, name=None, lines=None):
        self.nodes = list(nodes)
        self.edges = list(edges)
        self.od_pairs = list(od_pairs)
        self.name = name

        self._validate(lines or {})

        self.edge_index = {edge.id: i for i, edge in enumerate(self.edges)}
        self.t0 = np.array([edge.t0 for edge in self.edges])
        self.rho = np.array([edge.rho for edge in self.edges])
        self.mu = np.array([edge.mu for edge in self.edges])
        self.fbar = np.array([edge.fbar for edge in self.edges])

        self.paths = []
        self.path_od = []
        self.od_slices = []
        for w, od in enumerate(self.od_pairs):
            start = len(self.paths)
            for path in od.paths:
                self.paths.append(np.array([self.edge_index[e] for e in path]))
                self.path_od.append(w)
            self.od_slices.append(slice(start, len(self.paths)))
        self.path_od = np.array(self.path_od)

        self.theta = np.zeros((len(self.edges), len(self.paths)))
        for p, path in enumerate(self.paths):
            self.theta[path, p] = 1.0

        self.demands = np.array([od.demand for od in self.od_pairs])
        self.path_demands = self.demands[self.path_od]

    def __repr__(self):
        return "RoadNetwork(name={!r}, edges={}, od_pairs={}, paths={})" \
            .format(self.name, self.n_edges, len(self.od_pairs), self.n_paths)

    def _validate(self, lines):
        def fail(message, key):
            if key in lines:
                message = ERR_LINE.format(message, lines[key])
            raise InputError(message)

        nodes = set(self.nodes)
        ids = set()
        for edge in self.edges:
            if edge.id in ids:
                fail("Edge id '{}' is declared twice.".format(edge.id),
                     ("edge", edge.id))
            ids.add(edge.id)
            for end in (edge.tail, edge.head):
                if end not in nodes:
                    fail("Edge '{}' references unknown node {!r}."
                         .format(edge.id, end), ("edge", edge.id))

        tails = {edge.id: edge.tail for edge in self.edges}
        heads = {edge.id: edge.head for edge in self.edges}

        if not self.od_pairs:
            raise InputError("Network has no OD pairs.")

        for w, od in enumerate(self.od_pairs):
            if not od.demand > 0:
                fail("OD pair {} has non-positive demand {!r}."
                     .format(w, od.demand), ("od", w))
            if not od.paths:
                fail("OD pair {} has an empty path set.".format(w), ("od", w))

            for j, path in enumerate(od.paths):
                key = ("path", w, j)
                if not path:
                    fail("Path {} of OD pair {} is empty.".format(j, w), key)

                for e in path:
                    if e not in ids:
                        fail("Path {} of OD pair {} references unknown edge "
                             "'{}'.".format(j, w, e), key)

                node = od.origin
                for e in path:
                    if tails[e] != node:
                        fail("Path {} of OD pair {} is disconnected at edge "
                             "'{}': expected tail {!r}, got {!r}."
                             .format(j, w, e, node, tails[e]), key)
                    node = heads[e]

                if node != od.dest:
                    fail("Path {} of OD pair {} ends at {!r}, destination is "
                         "{!r}.".format(j, w, node, od.dest), key)

    @classmethod
    def from_dict(cls, data, name=None, lines=None):
        """Build a network from the mapping layout of network files:
        `nodes`, `edges` with `id, tail, head, t0, rho, mu, fbar` and
        `od_pairs` with `origin, dest, demand, paths`.

        """

        try:
            edges = [Edge(e["id"], e["tail"], e["head"], e["t0"],
                          e.get("rho", 0.15), e.get("mu", 0.25),
                          e.get("fbar", 1.0)) for e in data["edges"]]
            od_pairs = [ODPair(od["origin"], od["dest"], od["demand"],
                               od["paths"]) for od in data["od_pairs"]]
            nodes = data["nodes"]
        except KeyError as error:
            raise InputError("Network description lacks field {}."
                             .format(error))

        return cls(nodes, edges, od_pairs, name=name or data.get("name"),
                   lines=lines)

    @classmethod
    def from_json(cls, path):
        """Read a network file. Errors name the offending line."""

        with open(path) as handle:
            text = handle.read()

        try:
            data = json.loads(text)
        except json.JSONDecodeError as error:
            raise InputError("Network file '{}' is not valid JSON: {} "
                             "(line {})".format(path, error.msg, error.lineno))

        name = data.get("name") or os.path.splitext(os.path.basename(path))[0]
        network = cls.from_dict(data, name=name, lines=_locate(text, data))
        logger.debug("Loaded %r from %s", network, path)
        return network

    @classmethod
    def instance(cls, name):
        """Load one of the shipped instances by name."""

        if name not in INSTANCES:
            raise InputError("Unknown instance '{}', expected one of {}."
                             .format(name, INSTANCES))
        return cls.from_json(os.path.join(INSTANCE_DIR, name + ".json"))

    @staticmethod
    def instance_name(value):
        """Shipped instance named by `value`, given bare or as `<name>.json`,
        unless `value` is an existing file. None otherwise.

        """

        if not isinstance(value, str) or os.path.isfile(value):
            return None
        name = value[:-5] if value.endswith(".json") else value
        return name if name in INSTANCES else None

    def to_dict(self):
        return {"name": self.name, "nodes": self.nodes,
                "edges": [edge.to_dict() for edge in self.edges],
                "od_pairs": [od.to_dict() for od in self.od_pairs]}

    @property
    def n_edges(self):
        return len(self.edges)

    @property
    def n_paths(self):
        return len(self.paths)

    @property
    def path_counts(self):
        """Number of paths n_w per OD pair."""

        return np.array([len(od.paths) for od in self.od_pairs])

    @property
    def H(self):
        """Maximal number of edges on a path."""

        return max(len(path) for path in self.paths)

    def cost_ceiling(self):
        """M~ = max_e tau_e(sum_w d_w), the largest edge cost on X."""

        return float(self.edge_costs(np.full(self.n_edges,
                                             self.demands.sum())).max())

    def path_cost_ceiling(self):
        """M = M~ H, a bound on every path cost."""

        return self.cost_ceiling() * self.H

    def uniform_flow(self):
        """Split every demand evenly over its paths."""

        return self.path_demands / self.path_counts[self.path_od]

    def check_flow(self, x, name="x"):
        """Return `x` as a float vector or raise DomainError when it leaves
        X = {x >= 0, per-OD sums equal to demands}.

        """

        x = np.array(x, dtype=float)
        if x.shape != (self.n_paths,):
            raise InputError("Argument '{}' has shape {}, expected a vector "
                             "of length {}.".format(name, x.shape,
                                                    self.n_paths))

        if not np.all(np.isfinite(x)):
            raise InputError("Argument '{}' contains non-finite entries."
                             .format(name))

        negative = np.flatnonzero(x < -FLOW_TOL)
        if negative.size:
            p = negative[0]
            raise DomainError(ERR_PATH_FLOW.format(p, x[p]))

        for w, od in enumerate(self.od_pairs):
            total = x[self.od_slices[w]].sum()
            if abs(total - od.demand) > FLOW_TOL * max(1.0, od.demand):
                raise DomainError(ERR_OD_SUM.format(w, od.origin, od.dest,
                                                    total, od.demand))

        return np.maximum(x, 0.0)

    def _check_edge_flows(self, f):
        f = np.asarray(f, dtype=float)
        negative = np.flatnonzero(f < 0)
        if negative.size:
            e = negative[0]
            raise DomainError(ERR_NEGATIVE_FLOW.format(self.edges[e].id, f[e]))
        return f

    def _check_times(self, t):
        """Raise DomainError naming the first edge whose time lies outside
        dom sigma*.

        """

        t = np.asarray(t, dtype=float)
        slack = FLOW_TOL * np.maximum(1.0, self.t0)

        below = np.flatnonzero(t < self.t0 - slack)
        if below.size:
            e = below[0]
            raise DomainError(ERR_BELOW_FREE_FLOW.format(self.edges[e].id,
                                                         t[e], self.t0[e]))

        frozen = np.flatnonzero((self.rho == 0) & (t > self.t0 + slack))
        if frozen.size:
            e = frozen[0]
            raise DomainError(ERR_FROZEN_EDGE.format(self.edges[e].id,
                                                     self.t0[e], t[e]))

        return np.maximum(t, self.t0)

    def edge_costs(self, f):
        """tau_e(f_e) for all edges."""

        f = self._check_edge_flows(f)
        return self.t0 * (1.0 + self.rho * (f / self.fbar) ** (1.0 / self.mu))

    def edge_integrals(self, f):
        """sigma_e(f_e), the integral of tau_e from 0 to f_e."""

        f = self._check_edge_flows(f)
        power = 1.0 + 1.0 / self.mu
        return self.t0 * f + self.t0 * self.rho * self.mu / (1.0 + self.mu) \
            * f ** power / self.fbar ** (1.0 / self.mu)

    def conjugates(self, t):
        """sigma_e*(t_e) on dom sigma*; zero for rho = 0 edges at t = t0."""

        t = self._check_times(t)
        excess = np.maximum(t - self.t0, 0.0)
        active = self.rho > 0
        value = np.zeros(self.n_edges)
        value[active] = self.fbar[active] * (
            excess[active] / (self.t0[active] * self.rho[active])
        ) ** self.mu[active] * excess[active] / (1.0 + self.mu[active])
        return value

    def inverse_costs(self, t):
        """Flows f_e solving tau_e(f_e) = t_e, i.e. d sigma_e*/dt_e; rho = 0
        edges give 0.

        """

        t = self._check_times(t)
        excess = np.maximum(t - self.t0, 0.0)
        active = self.rho > 0
        flows = np.zeros(self.n_edges)
        flows[active] = self.fbar[active] * (
            excess[active] / (self.t0[active] * self.rho[active])
        ) ** self.mu[active]
        return flows

    def path_times(self, t):
        """Path costs sum_e delta_ep t_e under fixed edge times."""

        return self.theta.T @ np.asarray(t, dtype=float)


def _locate(text, data):
    """Map edges, OD pairs and paths of a network file to the line their
    entry starts on. Entries are found by scanning for their tokens in file
    order, which is exact for the layout the files are written in.

    """

    lines = {}

    def line_at(position):
        return text.count("\n", 0, position) + 1

    position = 0
    for edge in data.get("edges", []):
        token = json.dumps(edge.get("id", ""))
        found = text.find(token, position)
        if found < 0:
            continue
        lines[("edge", str(edge.get("id")))] = line_at(found)
        position = found + len(token)

    od_start = text.find('"od_pairs"')
    position = max(od_start, 0)
    for w, od in enumerate(data.get("od_pairs", [])):
        found = text.find('"paths"', position)
        if found < 0:
            break
        lines[("od", w)] = line_at(found)
        position = text.find("[", found) + 1
        for j, _ in enumerate(od.get("paths", [])):
            found = text.find("[", position)
            if found < 0:
                break
            lines[("path", w, j)] = line_at(found)
            position = text.find("]", found) + 1

    return lines


def bpr_cost(edge, f):
    """BPR travel time of a single edge at flow `f`."""

    if f < 0:
        raise DomainError(ERR_NEGATIVE_FLOW.format(edge.id, f))
    return edge.t0 * (1.0 + edge.rho * (f / edge.fbar) ** (1.0 / edge.mu))


def edge_integral(edge, f):
    if f < 0:
        raise DomainError(ERR_NEGATIVE_FLOW.format(edge.id, f))
    return edge.t0 * f + edge.t0 * edge.rho * edge.mu / (1.0 + edge.mu) \
        * f ** (1.0 + 1.0 / edge.mu) / edge.fbar ** (1.0 / edge.mu)


def _check_time(edge, t):
    slack = FLOW_TOL * max(1.0, edge.t0)
    if t < edge.t0 - slack:
        raise DomainError(ERR_BELOW_FREE_FLOW.format(edge.id, t, edge.t0))
    if edge.rho == 0 and t > edge.t0 + slack:
        raise DomainError(ERR_FROZEN_EDGE.format(edge.id, edge.t0, t))
    return max(t - edge.t0, 0.0)


def conjugate_sigma(edge, t):
    """sigma_e*(t) = fbar ((t - t0)/(t0 rho))^mu (t - t0)/(1 + mu) for
    t >= t0. A rho = 0 edge is finite only at t = t0, where it is 0.

    """

    excess = _check_time(edge, t)
    if edge.rho == 0:
        return 0.0
    return edge.fbar * (excess / (edge.t0 * edge.rho)) ** edge.mu \
        * excess / (1.0 + edge.mu)


def conjugate_derivative(edge, t):
    """d sigma_e*/dt, the flow at which the edge costs t."""

    excess = _check_time(edge, t)
    if edge.rho == 0:
        return 0.0
    return edge.fbar * (excess / (edge.t0 * edge.rho)) ** edge.mu


def edge_flows(network, x):
    """f = theta x for a path flow x in X."""

    return network.theta @ network.check_flow(x)


def path_costs(network, x):
    """G_p(x) = sum_e delta_ep tau_e(f_e(x))."""

    return network.theta.T @ network.edge_costs(edge_flows(network, x))


def random_network(rng, routes=3):
    """Small two-OD network with overlapping paths and mild BPR parameters.

    OD pair o -> t uses the shared edge `in` followed by one of `routes`
    two-edge routes through s; OD pair s -> t uses the routes alone.

    """

    nodes = ["o", "s", "t"] + ["m{}".format(i) for i in range(routes)]

    def draw_edge(id, tail, head):
        return Edge(id, tail, head, t0=rng.uniform(0.5, 1.5),
                    rho=rng.uniform(0.1, 0.5), mu=rng.choice([1.0, 0.5]),
                    fbar=rng.uniform(1.0, 2.0))

    edges = [draw_edge("in", "o", "s")]
    for i in range(routes):
        edges.append(draw_edge("a{}".format(i), "s", "m{}".format(i)))
        edges.append(draw_edge("b{}".format(i), "m{}".format(i), "t"))

    legs = [["a{}".format(i), "b{}".format(i)] for i in range(routes)]
    od_pairs = [ODPair("o", "t", rng.uniform(0.5, 1.0),
                       [["in"] + leg for leg in legs]),
                ODPair("s", "t", rng.uniform(0.5, 1.0), legs)]

    return RoadNetwork(nodes, edges, od_pairs, name="random")
