"""This module contains the equilibrium computations on a RoadNetwork: the
Beckmann and entropy-regularized potentials, exp-weights path dynamics, the
Gibbs recovery of path flows from edge times, the smoothed dual and its
solvers, and the reference oracles used to check them.

"""

import itertools
import logging
import math

import numpy as np
import pandas as pd
from scipy import optimize
from scipy.special import logsumexp, xlogy

from ..core.prox import ENTROPIC_SIMPLEX, ProxGeometry
from ..core.solver import step_size
from ..errors import InputError, check_positive
from .network import edge_flows, path_costs

logger = logging.getLogger(__name__)

MSA = "msa"
DUAL = "dual"

METHODS = (MSA, DUAL)

RELATIVE = "relative"
ABSOLUTE = "absolute"

# a path counts as used when it carries more than this share of its demand
USED_SHARE = 1e-2

ERR_GAMMA = "Temperature gamma must be nonnegative, got {}."
ERR_METHOD = "Method must be one of {}, got '{}'."


def beckmann_potential(network, x):
    """Psi(x) = sum_e sigma_e(f_e(x)). Its gradient over x is G(x)."""

    return float(network.edge_integrals(edge_flows(network, x)).sum())


def entropy_potential(network, x, gamma, convention=RELATIVE):
    """Psi_gamma(x) = Psi(x) + gamma sum_p x_p ln(x_p / d_w), with 0 ln 0 = 0.

    The `absolute` convention uses x_p ln x_p instead and differs by
    `entropy_shift(network, gamma)`.

    """

    if gamma < 0:
        raise InputError(ERR_GAMMA.format(gamma))

    x = network.check_flow(x)
    value = beckmann_potential(network, x)
    if gamma == 0:
        return value

    if convention == RELATIVE:
        return value + gamma * float(xlogy(x, x / network.path_demands).sum())
    if convention == ABSOLUTE:
        return value + gamma * float(xlogy(x, x).sum())

    raise InputError("Entropy convention must be '{}' or '{}', got '{}'."
                     .format(RELATIVE, ABSOLUTE, convention))


def entropy_shift(network, gamma):
    """gamma sum_w d_w ln d_w, the absolute minus the relative entropy
    potential.

    """

    return gamma * float(xlogy(network.demands, network.demands).sum())


def traffic_gap_bound(network, N):
    """(M / sqrt(N)) max_w ln n_w / sqrt(2 min_w ln n_w) (sum_w d_w^2 + 1)
    with M = M~ H. OD pairs with a single path carry no choice and are left
    out of the max and the min.

    """

    counts = network.path_counts
    logs = np.log(counts[counts > 1])
    if logs.size == 0:
        return 0.0

    M = network.path_cost_ceiling()
    spread = logs.max() / math.sqrt(2.0 * logs.min())
    return M / math.sqrt(N) * spread * float((network.demands ** 2).sum() + 1)


class TrafficRecord:
    """Contains the result of exp-weights traffic dynamics: the averaged
    path flow, the decimated potential trace of the running average and the
    gap bound at the horizon N.

    """

    def __init__(self, averaged_flow, steps, potentials, psi_star, bound):
        self.averaged_flow = np.asarray(averaged_flow, dtype=float)
        self.steps = np.asarray(steps, dtype=int)
        self.potentials = np.asarray(potentials, dtype=float)
        self.psi_star = psi_star
        self.bound = bound

    def __repr__(self):
        return "TrafficRecord(final_gap={}, bound={})".format(self.final_gap,
                                                              self.bound)

    @property
    def gaps(self):
        return self.potentials - self.psi_star

    @property
    def final_gap(self):
        return float(self.gaps[-1])

    def trace(self):
        return pd.DataFrame({"step": self.steps, "potential": self.potentials,
                             "gap": self.gaps, "bound": self.bound})


def run_exp_weights_traffic(network, N, psi_star=None, stride=None):
    """Run exp-weights on every OD simplex with exact path costs.

    OD pair w plays p_w = x_w / d_w and updates it with the loss G_w(x^k)
    and step h_w = (sqrt(ln n_w) / M) sqrt(2/N), M = M~ H. The result holds
    the average of x^1..x^N. Psi_* defaults to the reference minimiser of
    `solve_beckmann`.

    """

    if isinstance(N, bool) or int(N) != N or N < 1:
        raise InputError("N must be an integer >= 1, got {}.".format(N))

    N = int(N)
    stride = int(stride) if stride else max(1, N // 1000)

    if psi_star is None:
        psi_star = beckmann_potential(network, solve_beckmann(network))

    M = network.path_cost_ceiling()
    choices = []
    for w, count in enumerate(network.path_counts):
        if count > 1:
            h = step_size(M, math.sqrt(math.log(count)), N)
            choices.append((network.od_slices[w], network.demands[w],
                            ProxGeometry(ENTROPIC_SIMPLEX, count), h))

    x = network.uniform_flow()
    total = np.zeros(network.n_paths)
    steps, potentials = [], []

    for k in range(1, N + 1):
        total += x

        if k % stride == 0 or k == N:
            steps.append(k)
            potentials.append(beckmann_potential(network, total / k))

        costs = path_costs(network, x)
        x = x.copy()
        for paths, demand, geometry, h in choices:
            share = geometry.mirror_step(x[paths] / demand, costs[paths], h)
            x[paths] = demand * share

    record = TrafficRecord(total / N, steps, potentials, psi_star,
                           traffic_gap_bound(network, N))

    logger.info("run_exp_weights_traffic %s: N=%d gap=%.6g bound=%.6g",
                network.name, N, record.final_gap, record.bound)
    return record


def _od_starts(network):
    return np.array([paths.start for paths in network.od_slices])


def recover_path_flows(network, t, gamma):
    """Gibbs recovery x_p = d_w exp(-c_p/gamma) / sum_q exp(-c_q/gamma) with
    path costs c = theta^T t, stabilized per OD pair. The result lies in X.

    """

    gamma = check_positive("gamma", gamma)
    starts = _od_starts(network)

    z = -network.path_times(t) / gamma
    top = np.maximum.reduceat(z, starts)[network.path_od]
    weights = np.exp(z - top)
    totals = np.add.reduceat(weights, starts)[network.path_od]

    return network.path_demands * weights / totals


def smoothed_dual_objective(network, t, gamma):
    """Return the value gamma psi(t/gamma) + sum_e sigma_e*(t_e) and its
    gradient -f(x(t)) + d sigma*/dt, with
    psi(t) = sum_w d_w ln sum_{p in P_w} exp(-sum_e delta_ep t_e).

    Raises DomainError naming the edge when t leaves dom sigma*.

    """

    gamma = check_positive("gamma", gamma)
    t = np.asarray(t, dtype=float)
    conjugates = network.conjugates(t)

    z = -network.path_times(t) / gamma
    smoothed = sum(od.demand * logsumexp(z[paths]) for od, paths in
                   zip(network.od_pairs, network.od_slices))

    value = gamma * smoothed + float(conjugates.sum())
    flows = network.theta @ recover_path_flows(network, t, gamma)
    gradient = -flows + network.inverse_costs(t)

    return value, gradient


def fixed_point_residual(network, t, gamma):
    """||f_in - f_out||_inf over edges with rho > 0, where f_in inverts
    t_e = tau_e(f_e) and f_out = theta x(t). Edges with rho = 0 accept any
    flow at t = t0 and contribute 0.

    """

    f_out = network.theta @ recover_path_flows(network, t, gamma)
    return _chain_residual(network, t, f_out)


def _chain_residual(network, t, f_out):
    active = network.rho > 0

    if not active.any():
        return 0.0
    return float(np.abs(network.inverse_costs(t) - f_out)[active].max())


class DualState:
    """Contains edge times t, the recovered path flow x, edge flows
    f = theta x, the temperature gamma and the convergence report of a dual
    solve.

    Non-convergence is reported through `converged` and `residual`.

    """

    def __init__(self, network, t, gamma, iterations, method, tol):
        self.network = network
        self.t = np.asarray(t, dtype=float)
        self.gamma = gamma
        self.x = recover_path_flows(network, self.t, gamma)
        self.f = network.theta @ self.x
        self.residual = fixed_point_residual(network, self.t, gamma)
        self.iterations = iterations
        self.method = method
        self.tol = tol
        self.converged = self.residual <= tol

    def __repr__(self):
        return "DualState(method='{}', residual={:.3g}, converged={})".format(
            self.method, self.residual, self.converged)

    @property
    def primal_value(self):
        return entropy_potential(self.network, self.x, self.gamma)

    @property
    def dual_value(self):
        return smoothed_dual_objective(self.network, self.t, self.gamma)[0]

    def to_dict(self):
        return {"method": self.method, "gamma": self.gamma,
                "iterations": self.iterations, "residual": self.residual,
                "converged": bool(self.converged),
                "t": self.t.tolist(), "x": self.x.tolist(),
                "f": self.f.tolist(),
                "primal_value": self.primal_value,
                "dual_value": self.dual_value,
                "duality_gap": duality_gap(self.network, self),
                "entropy_shift": entropy_shift(self.network, self.gamma)}


def _solve_msa(network, gamma, tol, max_iters):
    f = network.theta @ recover_path_flows(network, network.t0, gamma)

    for m in range(1, max_iters + 1):
        t = network.edge_costs(f)
        target = network.theta @ recover_path_flows(network, t, gamma)

        if _chain_residual(network, t, target) <= tol:
            return t, m

        beta = 1.0 / (m + 1)
        f = (1.0 - beta) * f + beta * target

    return network.edge_costs(f), max_iters


def _solve_bounded(network, gamma, tol, max_iters):
    frozen = network.rho == 0
    bounds = [(t0, t0 if rigid else None) for t0, rigid in
              zip(network.t0, frozen)]

    f = network.theta @ recover_path_flows(network, network.t0, gamma)
    start = network.edge_costs(f)
    start[frozen] = network.t0[frozen]

    def objective(t):
        return smoothed_dual_objective(network, np.maximum(t, network.t0),
                                       gamma)

    result = optimize.minimize(objective, start, jac=True,
                               method="L-BFGS-B", bounds=bounds,
                               options={"maxiter": max_iters,
                                        "gtol": 0.1 * tol, "ftol": 1e-16})
    return np.maximum(result.x, network.t0), int(result.nit)


def solve_dual(network, gamma, tol=1e-8, max_iters=100000, method=MSA):
    """Find edge times t closing the chain f -> t -> x -> f.

    `msa` iterates f^{m+1} = (1 - beta_m) f^m + beta_m theta x(tau(f^m)) with
    beta_m = 1/(m+1) from the free-flow recovery and stops once
    `fixed_point_residual` at t = tau(f^m) is at most `tol`. `dual`
    minimises the smoothed dual over dom sigma* with L-BFGS-B, pinning
    rho = 0 edges at t0.

    """

    gamma = check_positive("gamma", gamma)
    tol = check_positive("tol", tol)

    if method == MSA:
        t, iterations = _solve_msa(network, gamma, tol, int(max_iters))
    elif method == DUAL:
        t, iterations = _solve_bounded(network, gamma, tol, int(max_iters))
    else:
        raise InputError(ERR_METHOD.format(METHODS, method))

    state = DualState(network, t, gamma, iterations, method, tol)

    if not state.converged:
        logger.warning("solve_dual %s (%s): no convergence after %d "
                       "iterations, residual %.3g > tol %.3g", network.name,
                       method, iterations, state.residual, tol)
    else:
        logger.debug("solve_dual %s (%s): %d iterations, residual %.3g",
                     network.name, method, iterations, state.residual)

    return state


def duality_gap(network, state):
    """Primal Psi_gamma(x(t)) plus dual value at t. Equals the summed
    Fenchel-Young gaps sigma(f) + sigma*(t) - t f over edges and is zero
    exactly at the solution.

    """

    primal = entropy_potential(network, state.x, state.gamma)
    dual = smoothed_dual_objective(network, state.t, state.gamma)[0]
    return primal + dual


def solve_beckmann(network, gamma=0.0):
    """Reference minimiser of Psi_gamma over X by SLSQP, returned as a
    point of X.

    """

    if gamma < 0:
        raise InputError(ERR_GAMMA.format(gamma))

    constraints = []
    for w, paths in enumerate(network.od_slices):
        row = np.zeros(network.n_paths)
        row[paths] = 1.0
        constraints.append({"type": "eq", "jac": lambda x, row=row: row,
                            "fun": lambda x, row=row, d=network.demands[w]:
                            row @ x - d})

    bounds = [(0.0, d) for d in network.path_demands]

    def objective(x):
        x = _repair(network, x)
        value = entropy_potential(network, x, gamma)
        gradient = path_costs(network, x)
        if gamma > 0:
            gradient = gradient + gamma * (
                np.log(np.maximum(x, 1e-300) / network.path_demands) + 1.0)
        return value, gradient

    result = optimize.minimize(objective, network.uniform_flow(), jac=True,
                               method="SLSQP", bounds=bounds,
                               constraints=constraints,
                               options={"ftol": 1e-14, "maxiter": 1000})

    x = _repair(network, result.x)
    logger.debug("solve_beckmann %s: Psi=%.8g (%s)", network.name,
                 entropy_potential(network, x, gamma), result.message)
    return x


def _repair(network, x):
    """Clip a near-feasible point onto X by zeroing negative entries and
    rescaling each OD slice to its demand.

    """

    x = np.maximum(np.asarray(x, dtype=float), 0.0)
    starts = _od_starts(network)
    totals = np.add.reduceat(x, starts)[network.path_od]
    uniform = network.uniform_flow()
    return np.where(totals > 0, x * network.path_demands /
                    np.where(totals > 0, totals, 1.0), uniform)


def _compositions(count, steps):
    """All vectors of `count` nonnegative integers summing to `steps`."""

    rows = []
    for bars in itertools.combinations(range(steps + count - 1), count - 1):
        edges = (-1,) + bars + (steps + count - 1,)
        rows.append([edges[i + 1] - edges[i] - 1 for i in range(count)])
    return np.array(rows, dtype=float)


def grid_search(network, objective, steps=100):
    """Brute-force minimiser of `objective(x)` over the grid of X whose
    per-OD shares are multiples of 1/steps. Returns (x, value).

    """

    grids = [_compositions(count, steps) * demand / steps for count, demand
             in zip(network.path_counts, network.demands)]

    best, best_value = None, np.inf
    for parts in itertools.product(*grids):
        x = np.concatenate(parts)
        value = objective(x)
        if value < best_value:
            best, best_value = x, value

    return best, best_value


def wardrop_violation(network, x, used_share=USED_SHARE):
    """Largest excess of a used path's cost over the cheapest path of its
    OD pair. A path is used when it carries more than `used_share` of its
    demand. Zero at a Wardrop equilibrium.

    """

    x = network.check_flow(x)
    costs = path_costs(network, x)
    violation = 0.0

    for od, paths in zip(network.od_pairs, network.od_slices):
        used = x[paths] > used_share * od.demand
        excess = costs[paths][used].max() - costs[paths].min()
        violation = max(violation, float(excess))

    return violation
