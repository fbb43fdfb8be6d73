"""This module contains the experiment runners behind the command line
tool. Every runner takes an ExperimentConfig, writes CSV traces and a JSON
summary to the output directory and returns an Outcome whose `passed` flag
drives the exit status.

"""

import collections
import json
import logging
import math
import os

import numpy as np
import pandas as pd

from .core.online import CasinoAdversary, EXPECTED, SAMPLED, POLICIES, \
    run_exp_weights, regret_bound
from .core.oracle import BOUNDED, NONE, SUBGAUSSIAN, HEAVY_TAIL, \
    simplex_linear_problem, quadratic_problem, value_quadratic_problem, \
    value_norm_problem, pull_away_bias
from .core.prox import ENTROPIC_SIMPLEX, EUCLIDEAN_FREE, ProxGeometry
from .core.solver import SolverConfig, FIXED, INVERSE_K, run_smd, \
    run_smd_strongly_convex, run_parallel_aggregate, trajectory_count
from .core.zeroth import ONE_POINT, TWO_POINT, DOUBLE_SMOOTHED, \
    choose_smoothing_params, calls_to_accuracy, iteration_budget, \
    run_zeroth_order, directional_estimates, sphere_norm_moment, \
    sphere_cross_moment
from .errors import ConfigurationError
from .functions.random import stream, sample_sphere
from .transport import equilibrium, logit
from .transport.network import RoadNetwork, INSTANCES, random_network

logger = logging.getLogger(__name__)

TraceRow = collections.namedtuple(
    "TraceRow", ["experiment", "seed", "step", "metric", "value", "bound"])

BOUND_CONVEX = "M R sqrt(2/N) + delta, fixed step (R/M) sqrt(2/N)"
BOUND_STRONG = "M2^2 (1 + ln N) / (2 mu N) + delta, step 1/(mu k)"
BOUND_PARALLEL = "eps (default M R sqrt(2/N) + delta) for the average " \
                 "of K = ceil(2 log2(1/sigma)) trajectories"
BOUND_ZO = "iteration budget with constant 1 times oracle calls per step"
BOUND_REGRET = "M sqrt(ln n) sqrt(2/N), exp-weights with R^2 = ln n"
BOUND_TRAFFIC = "(M / sqrt(N)) max ln n_w / sqrt(2 min ln n_w) " \
                "(sum d_w^2 + 1), M = M~ H"
BOUND_NONE = "none"

CHUNK = 10000


class Outcome:
    """Contains the summary of one experiment and whether its checks
    passed.

    """

    def __init__(self, name, passed, summary):
        self.name = name
        self.passed = bool(passed)
        self.summary = summary

    def __repr__(self):
        return "Outcome(name='{}', passed={})".format(self.name, self.passed)


def _plain(value):
    if isinstance(value, np.generic):
        return value.item()
    if isinstance(value, np.ndarray):
        return value.tolist()
    raise TypeError("Cannot serialize {!r}".format(value))


def trace_rows(experiment, seed, frame, metric):
    """Convert a trace DataFrame with columns step, `metric` and optionally
    bound into TraceRows.

    """

    bounds = frame["bound"] if "bound" in frame else [None] * len(frame)
    return [TraceRow(experiment, seed, int(step), metric, float(value), bound)
            for step, value, bound in zip(frame["step"], frame[metric],
                                          bounds)]


def write_trace(output_dir, rows, formula):
    """Write the rows of one (experiment, seed) pair to
    `<experiment>-seed<seed>.csv`, preceded by a comment line naming the
    bound formula.

    """

    steps = [row.step for row in rows]
    if any(b <= a for a, b in zip(steps, steps[1:])):
        raise ValueError("Trace steps of '{}' are not strictly increasing."
                         .format(rows[0].experiment))

    os.makedirs(output_dir, exist_ok=True)
    path = os.path.join(output_dir, "{}-seed{}.csv".format(rows[0].experiment,
                                                           rows[0].seed))

    with open(path, "w", newline="") as handle:
        handle.write("# bound: {}\n".format(formula))
        pd.DataFrame(rows, columns=TraceRow._fields).to_csv(
            handle, index=False, float_format="%.12g")

    return path


def write_summary(output_dir, name, summary):
    os.makedirs(output_dir, exist_ok=True)
    path = os.path.join(output_dir, "{}-summary.json".format(name))

    with open(path, "w") as handle:
        json.dump(summary, handle, indent=2, sort_keys=True, default=_plain)
        handle.write("\n")

    return path


def fitted_slope(x, y):
    """Slope of the least-squares line through (ln x, ln y)."""

    return float(np.polyfit(np.log(x), np.log(y), 1)[0])


def smd_problem(problem, n, noise=BOUNDED, alpha=3.0, delta=0.0, mu=1.0):
    """Return oracle, geometry, R and step rule of a synthetic problem.

    `simplex-linear` minimises <c, x> with c = linspace(0, 1/2 - delta, n)
    on the entropic simplex, `quadratic` minimises mu/2 ||x - c||^2 with
    ||c|| = 1 on R^n from the origin.

    """

    if problem == "simplex-linear":
        if not delta < 0.5:
            raise ConfigurationError("invalid-config: delta: must be below "
                                     "1/2 on simplex-linear, got {!r}"
                                     .format(delta), field="delta")

        c = np.linspace(0.0, 0.5 - delta, n)
        oracle = simplex_linear_problem(c, M=1.0, noise=noise, alpha=alpha,
                                        delta=delta)
        return oracle, ProxGeometry(ENTROPIC_SIMPLEX, n), \
            math.sqrt(math.log(n)), FIXED

    center = np.ones(n) / math.sqrt(n)
    oracle = quadratic_problem(center, mu=mu, noise=noise, noise_level=0.5,
                               delta=delta, alpha=alpha)
    geometry = ProxGeometry(EUCLIDEAN_FREE, n)
    return oracle, geometry, geometry.radius(center), INVERSE_K


def run_smd_experiment(config):
    oracle, geometry, R, rule = smd_problem(config.problem, config.n,
                                            config.noise, config.alpha,
                                            config.delta, config.mu)
    if config.parallel:
        return _run_smd_parallel(config, oracle, geometry, R, rule)

    run = run_smd if rule == FIXED else run_smd_strongly_convex
    formula = BOUND_CONVEX if rule == FIXED else BOUND_STRONG

    runs, medians = [], []
    for N in config.N:
        experiment = "smd-{}-N{}".format(config.problem, N)
        gaps = []

        for seed in config.seed_list:
            solver = SolverConfig(N, R, rule, seed=seed, stride=config.stride)
            record = run(oracle, geometry, solver)
            gaps.append(record.final_gap)
            write_trace(config.output_dir,
                        trace_rows(experiment, seed, record.trace(), "gap"),
                        formula)

        median = float(np.median(gaps))
        medians.append(median)
        runs.append({"N": N, "median_gap": median, "bound": record.bound,
                     "passed": median <= record.bound})

    summary = {"problem": config.problem, "n": config.n,
               "noise": config.noise, "delta": config.delta,
               "seeds": config.seeds, "runs": runs,
               "slope": fitted_slope(config.N, medians)
               if len(config.N) > 1 and min(medians) > 0 else None}

    passed = all(run["passed"] for run in runs)
    write_summary(config.output_dir, "smd-{}".format(config.problem), summary)
    return Outcome("smd", passed, summary)


def _run_smd_parallel(config, oracle, geometry, R, rule):
    K = trajectory_count(config.sigma)
    runs = []

    for N in config.N:
        experiment = "smd-parallel-{}-N{}".format(config.problem, N)
        hits = 0

        for r in range(config.replications):
            seed = config.seed + r
            solver = SolverConfig(N, R, rule, seed=seed, stride=N)
            record = run_parallel_aggregate(lambda i: oracle, geometry, solver,
                                            config.sigma,
                                            workers=config.workers)

            eps = config.eps if config.eps is not None else record.bound
            hits += record.final_gap <= eps
            write_trace(config.output_dir,
                        [TraceRow(experiment, seed, N, "gap",
                                  record.final_gap, eps)], BOUND_PARALLEL)

        frequency = hits / config.replications
        runs.append({"N": N, "K": K, "eps": eps, "frequency": frequency,
                     "passed": frequency >= 1.0 - config.sigma})

    summary = {"problem": config.problem, "noise": config.noise,
               "sigma": config.sigma, "K": K,
               "replications": config.replications, "runs": runs}

    write_summary(config.output_dir,
                  "smd-parallel-{}".format(config.problem), summary)
    return Outcome("smd", all(run["passed"] for run in runs), summary)


def zo_problem(problem, n, delta=0.0, noise_level=0.0):
    """Return value oracle, geometry and R of f = 1/2 ||x - c||^2 or
    f = ||x - c|| with ||c|| = 1, started at the origin. A positive
    `delta` adds the pull-away bias around c.

    """

    center = np.ones(n) / math.sqrt(n)
    noise = BOUNDED if noise_level > 0 else NONE
    bias = pull_away_bias(center, delta, 1.0) if delta > 0 else None
    build = value_quadratic_problem if problem == "quadratic" else \
        value_norm_problem

    oracle = build(center, noise=noise, noise_level=noise_level, delta=delta,
                   bias=bias)
    geometry = ProxGeometry(EUCLIDEAN_FREE, n)
    return oracle, geometry, geometry.radius(center)


def run_zo_experiment(config):
    experiment = "zo-{}-{}".format(config.feedback, config.problem)
    rows, table = [], []

    for n in sorted(config.dims):
        oracle, geometry, R = zo_problem(config.problem, n, config.delta,
                                         config.noise_level)
        smoothing = choose_smoothing_params(
            config.eps, oracle.M2, R, n, config.feedback, L2=oracle.L2,
            inner_tau2=config.inner_tau2, directions=config.directions,
            pairs=config.pairs)

        calls = calls_to_accuracy(oracle, geometry, smoothing, config.eps, R,
                                  seeds=config.seeds,
                                  max_calls=config.max_calls)
        budget = math.ceil(iteration_budget(
            config.feedback, config.eps, oracle.M2, n, R=R, B=oracle.B,
            L2=oracle.L2, smooth=oracle.L2 is not None)) * \
            smoothing.calls_per_step

        table.append({"n": n, "calls": calls, "budget": budget,
                      "tau": smoothing.tau, "tau1": smoothing.tau1,
                      "tau2": smoothing.tau2,
                      "delta_max": smoothing.delta_max})
        rows.append(TraceRow(experiment, config.seed, n, "calls", calls,
                             budget))
        logger.info("%s n=%d: %s calls (budget %d)", experiment, n, calls,
                    budget)

    write_trace(config.output_dir, rows, BOUND_ZO)

    finite = [(row["n"], row["calls"]) for row in table
              if math.isfinite(row["calls"])]
    exponent = fitted_slope(*zip(*finite)) if len(finite) > 1 else None

    summary = {"feedback": config.feedback, "problem": config.problem,
               "eps": config.eps, "inner_tau2": config.inner_tau2,
               "table": table, "exponent": exponent}
    write_summary(config.output_dir, experiment, summary)
    return Outcome("zo", len(finite) == len(table), summary)


def run_online_experiment(config):
    experiment = "online-{}-{}-{}".format(config.game, config.policy,
                                          config.mode)
    regrets, wins = [], []
    bound = regret_bound(1.0, 2, config.N)
    stride = config.stride or max(1, config.N // 1000)

    for seed in config.seed_list:
        record = run_exp_weights(CasinoAdversary(config.policy, seed=seed),
                                 2, config.N, 1.0, mode=config.mode,
                                 seed=seed)
        regrets.append(record.regret)
        wins.append(record.win_frequency())

        frame = record.trace()
        frame = frame[(frame["step"] % stride == 0) |
                      (frame["step"] == config.N)]
        write_trace(config.output_dir,
                    trace_rows(experiment, seed, frame, "regret"),
                    BOUND_REGRET)

    mean = float(np.mean(regrets))
    se = float(np.std(regrets, ddof=1) / math.sqrt(len(regrets))) \
        if len(regrets) > 1 else 0.0

    if config.mode == EXPECTED:
        passed = max(regrets) <= bound
    else:
        passed = mean <= bound + 3 * se

    summary = {"policy": config.policy, "mode": config.mode, "N": config.N,
               "bound": bound, "regrets": regrets, "mean_regret": mean,
               "standard_error": se, "win_frequency": float(np.mean(wins))}
    write_summary(config.output_dir, experiment, summary)
    return Outcome("online", passed, summary)


def load_network(value):
    name = RoadNetwork.instance_name(value)
    if name is not None:
        return RoadNetwork.instance(name)
    return RoadNetwork.from_json(value)


def run_traffic_experiment(config):
    network = load_network(config.network)
    action = config.action
    name = "traffic-{}-{}".format(action, network.name)

    if action == "dual":
        state = equilibrium.solve_dual(network, config.gamma, config.tol,
                                       config.max_iters, config.method)
        summary = state.to_dict()
        passed = state.converged

    elif action == "equilibrium":
        x_star = equilibrium.solve_beckmann(network)
        psi_star = equilibrium.beckmann_potential(network, x_star)
        runs = []

        for N in config.N:
            record = equilibrium.run_exp_weights_traffic(
                network, N, psi_star=psi_star, stride=config.stride)
            write_trace(config.output_dir,
                        trace_rows("{}-N{}".format(name, N), config.seed,
                                   record.trace(), "gap"), BOUND_TRAFFIC)
            runs.append({"N": N, "gap": record.final_gap,
                         "bound": record.bound,
                         "averaged_flow": record.averaged_flow,
                         "passed": record.final_gap <= record.bound})

        summary = {"psi_star": psi_star, "equilibrium_flow": x_star,
                   "runs": runs}
        passed = all(run["passed"] for run in runs)

    elif action == "logit":
        reference = equilibrium.solve_dual(
            network, config.gamma, config.tol, config.max_iters,
            method=equilibrium.DUAL).x
        distances = []

        for seed in config.seed_list:
            record = logit.run_logit_dynamics(
                network, config.gamma, config.lam, config.horizon,
                mode=config.mode, agents=config.agents, seed=seed,
                stride=config.stride or 1)
            frame = pd.DataFrame({
                "step": record.steps,
                "distance": np.abs(record.flows - reference).max(axis=1)})
            write_trace(config.output_dir,
                        trace_rows(name, seed, frame, "distance"), BOUND_NONE)
            distances.append(float(frame["distance"].iloc[-1]))

        summary = {"mode": config.mode, "gamma": config.gamma,
                   "lam": config.lam, "agents": config.agents,
                   "reference_flow": reference,
                   "final_distances": distances}
        passed = True

    else:
        summary = check_network(network, config.gamma, config.tol,
                                config.max_iters, config.method)
        passed = summary["passed"]

    write_summary(config.output_dir, name, summary)
    return Outcome("traffic", passed, summary)


def check_network(network, gamma, tol, max_iters, method):
    """Residual, duality gap and Wardrop checks of one network."""

    state = equilibrium.solve_dual(network, gamma, tol, max_iters, method)
    gap = equilibrium.duality_gap(network, state)
    primal = state.primal_value

    x_star = equilibrium.solve_beckmann(network)
    violation = equilibrium.wardrop_violation(network, x_star)

    checks = {"residual": state.residual <= tol,
              "duality_gap": gap <= tol * (1.0 + abs(primal)),
              "wardrop": violation <= 1e-3}

    return {"gamma": gamma, "residual": state.residual,
            "duality_gap": gap, "primal_value": primal,
            "entropy_shift": equilibrium.entropy_shift(network, gamma),
            "wardrop_violation": violation, "checks": checks,
            "passed": all(checks.values())}


STALL_SETUPS = {
    DOUBLE_SMOOTHED: {"eps": 1.25, "radius": 1.395},
    TWO_POINT: {"eps": 0.5, "radius": 1.705},
}


def stall_problem(feedback_kind, factor):
    """One-dimensional demo of the admissible value-noise level.

    Double smoothing minimises |x - sqrt(2)|, two-point feedback
    (x - sqrt(2))^2 / 2, both from 0 with R = 1. The value bias pulls away
    from the minimiser with level `factor` times delta_max. Returns oracle,
    geometry, smoothing, R and eps.

    """

    setup = STALL_SETUPS[feedback_kind]
    center = np.array([math.sqrt(2.0)])
    geometry = ProxGeometry(EUCLIDEAN_FREE, 1)
    R = 1.0

    if feedback_kind == DOUBLE_SMOOTHED:
        build = value_norm_problem
        smoothing = choose_smoothing_params(setup["eps"], 1.0, R, 1,
                                            DOUBLE_SMOOTHED)
    else:
        build = value_quadratic_problem
        smoothing = choose_smoothing_params(setup["eps"], math.sqrt(2.0), R,
                                            1, TWO_POINT, L2=1.0)

    delta = factor * smoothing.delta_max
    oracle = build(center, delta=delta,
                   bias=pull_away_bias(center, delta, setup["radius"]))
    return oracle, geometry, smoothing, R, setup["eps"]


def median_final_gap(oracle, geometry, smoothing, R, N, seeds):
    return float(np.median([
        run_zeroth_order(oracle, geometry, SolverConfig(N, R, seed=seed,
                                                        stride=N),
                         smoothing).final_gap for seed in seeds]))


def estimator_scores(n, draws, rng):
    """z-scores of the Monte-Carlo mean of n <g, e> e against g for a
    random unit g.

    """

    g = sample_sphere(n, rng)
    total = np.zeros(n)
    squares = np.zeros(n)

    for start in range(0, draws, CHUNK):
        size = min(CHUNK, draws - start)
        estimates = directional_estimates(g, sample_sphere(n, rng, size))
        total += estimates.sum(axis=0)
        squares += (estimates ** 2).sum(axis=0)

    mean = total / draws
    se = np.sqrt((squares / draws - mean ** 2) / draws)
    return (mean - g) / se


def sphere_moments(n, q, draws, rng):
    """Empirical E||e||_q^2 and E[<c, e>^2 ||e||_q^2] for a random unit c."""

    c = sample_sphere(n, rng)
    norm_total = cross_total = 0.0

    for start in range(0, draws, CHUNK):
        size = min(CHUNK, draws - start)
        e = sample_sphere(n, rng, size)
        norms = np.linalg.norm(e, q, axis=1) ** 2
        norm_total += norms.sum()
        cross_total += ((e @ c) ** 2 * norms).sum()

    return norm_total / draws, cross_total / draws


def _bench_smd_rate(quick):
    Ns = [100, 1000] if quick else [100, 1000, 10000]
    seeds = range(5 if quick else 20)
    oracle, geometry, R, _ = smd_problem("simplex-linear", 10)

    medians, ok = [], True
    for N in Ns:
        gaps = [run_smd(oracle, geometry, SolverConfig(N, R, seed=s,
                                                       stride=N)).final_gap
                for s in seeds]
        medians.append(float(np.median(gaps)))
        ok &= medians[-1] <= oracle.M * R * math.sqrt(2.0 / N)

    slope = fitted_slope(Ns, medians)
    return ok and -0.65 <= slope <= -0.35, "slope {:.3f}".format(slope)


def _bench_strongly_convex(quick):
    seeds = range(5 if quick else 20)
    ok, ratios = True, []

    for delta in (0.0, 0.05):
        oracle, geometry, R, rule = smd_problem("quadratic", 10, delta=delta)
        for N in (100, 1000):
            records = [run_smd_strongly_convex(
                oracle, geometry, SolverConfig(N, R, rule, seed=s, stride=N))
                for s in seeds]
            median = float(np.median([r.final_gap for r in records]))
            ratios.append(median / records[0].bound)
            ok &= median <= records[0].bound

    return ok, "max gap/bound {:.3f}".format(max(ratios))


def _bench_parallel(quick):
    replications = 20 if quick else 200
    frequencies = {}

    for noise in (BOUNDED, SUBGAUSSIAN, HEAVY_TAIL):
        oracle, geometry, R, rule = smd_problem("simplex-linear", 10,
                                                noise=noise)
        hits = 0
        for r in range(replications):
            record = run_parallel_aggregate(
                lambda i: oracle, geometry,
                SolverConfig(1000, R, rule, seed=r, stride=1000), 0.1)
            hits += record.final_gap <= record.bound
        frequencies[noise] = hits / replications

    ok = trajectory_count(0.1) == 7 and min(frequencies.values()) >= 0.9
    return ok, ", ".join("{} {:.2f}".format(k, v)
                         for k, v in frequencies.items())


def _bench_unbiased(quick):
    draws = 10 ** 4 if quick else 10 ** 5
    scores = np.concatenate([estimator_scores(n, draws, stream(4, n))
                             for n in (2, 10, 100)])
    share = float(np.mean(np.abs(scores) <= 3.0))
    return share >= 0.95, "share within 3 SE {:.3f}".format(share)


def _bench_sphere_moments(quick):
    draws = 10 ** 4 if quick else 10 ** 5
    worst = 0.0

    for n in (10, 100, 1000):
        for q in (2.0, np.inf):
            norm, cross = sphere_moments(n, q, draws, stream(5, n))
            norm_bound = max(sphere_norm_moment(n, q), 0.0)
            cross_bound = max(sphere_cross_moment(n, q), 0.0)
            worst = max(worst, norm / norm_bound / (1 + 1e-9),
                        cross / cross_bound)

    return worst <= 1.0, "max ratio {:.3f}".format(worst)


def _bench_zo_scaling(quick):
    dims = (4, 16, 64)
    calls = []
    for n in dims:
        oracle, geometry, R = zo_problem("quadratic", n)
        smoothing = choose_smoothing_params(0.02, oracle.M2, R, n, TWO_POINT,
                                            L2=oracle.L2)
        calls.append(calls_to_accuracy(oracle, geometry, smoothing, 0.02, R,
                                       seeds=3 if quick else 5))

    # both feedback kinds reach this looser target below the call cap
    oracle, geometry, R = zo_problem("quadratic", 2)
    two = calls_to_accuracy(
        oracle, geometry, choose_smoothing_params(0.2, oracle.M2, R, 2,
                                                  TWO_POINT, L2=oracle.L2),
        0.2, R, seeds=3)
    one = calls_to_accuracy(
        oracle, geometry, choose_smoothing_params(0.2, oracle.M2, R, 2,
                                                  ONE_POINT),
        0.2, R, seeds=3)

    if not all(math.isfinite(c) for c in calls):
        return False, "two-point did not reach eps"

    exponent = fitted_slope(dims, calls)
    ok = 0.7 <= exponent <= 1.3 and math.isfinite(one) and one > two
    return ok, "exponent {:.3f}, one-point {} vs two-point {}".format(
        exponent, one, two)


def _bench_stall(quick):
    seeds = range(3 if quick else 5)
    details, ok = [], True

    for kind, (N_ok, N_stall) in ((DOUBLE_SMOOTHED, (400, 2000)),
                                  (TWO_POINT, (200, 2000))):
        good = median_final_gap(*stall_problem(kind, 0.5)[:4], N_ok, seeds)
        oracle, geometry, smoothing, R, eps = stall_problem(kind, 100.0)
        bad = median_final_gap(oracle, geometry, smoothing, R, N_stall, seeds)
        ok &= good <= eps < bad
        details.append("{} {:.3f}/{:.3f}".format(kind, good, bad))

    return ok, ", ".join(details)


def _bench_regret(quick):
    N = 10 ** 4
    bound = regret_bound(1.0, 2, N)
    seeds = range(10 if quick else 50)
    ok, worst = True, -np.inf

    for policy in POLICIES:
        expected = run_exp_weights(CasinoAdversary(policy), 2, N, 1.0).regret
        sampled = [run_exp_weights(CasinoAdversary(policy, seed=s), 2, N, 1.0,
                                   mode=SAMPLED, seed=s).regret for s in seeds]
        se = np.std(sampled, ddof=1) / math.sqrt(len(sampled))
        ok &= expected <= bound and np.mean(sampled) <= bound + 3 * se
        worst = max(worst, expected)

    return ok, "max expected regret {:.4f} vs {:.4f}".format(worst, bound)


def _bench_traffic(quick):
    Ns = (100, 1000) if quick else (100, 1000, 10000)
    ok = True

    two_route = RoadNetwork.instance("two-route")
    state = equilibrium.solve_dual(two_route, 1e-3)
    ok &= np.abs(state.x - 0.5).max() <= 1e-3

    pigou = RoadNetwork.instance("pigou")
    state = equilibrium.solve_dual(pigou, 1e-3)
    ok &= np.abs(state.x - [0.0, 1.0]).max() <= 1e-2
    _, grid_value = equilibrium.grid_search(
        pigou, lambda x: equilibrium.beckmann_potential(pigou, x), 1000)
    ok &= abs(grid_value - 0.75) <= 1e-3

    worst = 0.0
    for name in INSTANCES:
        network = RoadNetwork.instance(name)
        x_star = equilibrium.solve_beckmann(network)
        psi_star = equilibrium.beckmann_potential(network, x_star)
        ok &= equilibrium.wardrop_violation(network, x_star) <= 1e-3

        for N in Ns:
            record = equilibrium.run_exp_weights_traffic(network, N, psi_star)
            worst = max(worst, record.final_gap / record.bound)

    return ok and worst <= 1.0, "max gap/bound {:.3f}".format(worst)


def _bench_duality(quick):
    count = 3 if quick else 10
    ok = True

    for s in range(count):
        network = random_network(stream(10, s))
        state = equilibrium.solve_dual(network, 0.1, tol=1e-7,
                                       method=equilibrium.DUAL)
        gap = equilibrium.duality_gap(network, state)
        ok &= state.residual <= 1e-6
        ok &= gap <= 1e-6 * (1.0 + abs(state.primal_value))

        msa = equilibrium.solve_dual(network, 0.1, tol=1e-5)
        ok &= np.abs(msa.t - state.t).max() <= 1e-4

        t = state.t * 1.05
        _, gradient = equilibrium.smoothed_dual_objective(network, t, 0.1)
        ok &= _gradient_error(network, t, 0.1, gradient) <= 1e-5

    pigou = RoadNetwork.instance("pigou")
    target = equilibrium.solve_dual(pigou, 0.1, tol=1e-6,
                                    method=equilibrium.DUAL).x
    record = logit.run_logit_dynamics(pigou, 0.1, 10.0, 2000, agents=100)
    ok &= np.abs(record.final_flow - target).max() <= 1e-4

    return ok, "{} random networks".format(count)


def _gradient_error(network, t, gamma, gradient, h=1e-6):
    """Relative sup-distance between `gradient` and central differences of
    the smoothed dual.

    """

    numeric = np.zeros_like(t)
    for e in range(t.size):
        step = np.zeros_like(t)
        step[e] = h
        upper = equilibrium.smoothed_dual_objective(network, t + step,
                                                    gamma)[0]
        lower = equilibrium.smoothed_dual_objective(network, t - step,
                                                    gamma)[0]
        numeric[e] = (upper - lower) / (2 * h)

    scale = max(np.abs(gradient).max(), 1e-3)
    return float(np.abs(numeric - gradient).max() / scale)


def _bench_gumbel(quick):
    draws = 10 ** 5 if quick else 10 ** 6
    gamma = 0.5
    sample = logit.gumbel_sample(gamma, stream(11), draws)
    variance = gamma ** 2 * math.pi ** 2 / 6

    ok = abs(sample.mean()) <= 3 * sample.std() / math.sqrt(draws) and \
        abs(sample.var() / variance - 1) <= 0.02
    return ok, "mean {:.2e}, variance ratio {:.4f}".format(
        sample.mean(), sample.var() / variance)


BENCH = collections.OrderedDict([
    ("smd-rate", _bench_smd_rate),
    ("strongly-convex", _bench_strongly_convex),
    ("parallel", _bench_parallel),
    ("unbiased-estimator", _bench_unbiased),
    ("sphere-moments", _bench_sphere_moments),
    ("zo-scaling", _bench_zo_scaling),
    ("noise-threshold", _bench_stall),
    ("regret", _bench_regret),
    ("traffic", _bench_traffic),
    ("duality", _bench_duality),
    ("gumbel", _bench_gumbel),
])


def run_bench(config):
    """Run the acceptance suite and return the pass/fail table in the
    summary.

    """

    rows = []
    for name, check in BENCH.items():
        logger.info("bench: %s", name)
        passed, detail = check(config.quick)
        rows.append({"check": name, "passed": bool(passed), "detail": detail})

    table = pd.DataFrame(rows, columns=["check", "passed", "detail"])
    summary = {"quick": config.quick, "checks": rows}
    write_summary(config.output_dir, "bench", summary)

    print(table.to_string(index=False))
    return Outcome("bench", table["passed"].all(), summary)


RUNNERS = {
    "smd": run_smd_experiment,
    "zo": run_zo_experiment,
    "online": run_online_experiment,
    "traffic": run_traffic_experiment,
    "bench": run_bench,
}
