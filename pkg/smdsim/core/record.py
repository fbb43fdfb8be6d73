"""This module contains the result containers of solver and game runs."""

import numpy as np
import pandas as pd


class RunRecord:
    """Contains the result of a mirror descent run: the averaged point, the
    decimated gap trace of the running average, the oracle-call count and,
    for aggregated runs, the per-trajectory records.

    """

    def __init__(self, averaged_point, steps=(), gaps=(), oracle_calls=0,
                 wall_clock=0.0, step_size=None, bound=None, iterates=None,
                 trajectories=None, label=None):

        self.averaged_point = np.asarray(averaged_point, dtype=float)
        self.steps = np.asarray(steps, dtype=int)
        self.gaps = np.asarray(gaps, dtype=float)
        self.oracle_calls = int(oracle_calls)
        self.wall_clock = wall_clock
        self.step_size = step_size
        self.bound = bound
        self.iterates = iterates
        self.trajectories = trajectories or []
        self.label = label

    def __repr__(self):
        return "RunRecord(label={!r}, oracle_calls={}, final_gap={})".format(
            self.label, self.oracle_calls, self.final_gap)

    @property
    def final_gap(self):
        if self.gaps.size == 0:
            return None
        return float(self.gaps[-1])

    @property
    def trajectory_points(self):
        """Per-trajectory averages in trajectory order."""

        return np.array([record.averaged_point for record in
                         self.trajectories])

    def trace(self):
        """Return the gap trace as a DataFrame with columns step, gap and,
        when known, bound.

        """

        frame = pd.DataFrame({"step": self.steps, "gap": self.gaps})
        if self.bound is not None:
            frame["bound"] = self.bound
        return frame


class RegretRecord:
    """Contains the result of an online game: per-step loss vectors, plays,
    learner losses and the running regret of the averaged losses.

    Regret may be negative. A game of zero rounds yields the empty record
    whose regret is None.

    """

    def __init__(self, losses, plays, learner_losses, bound, weights=None,
                 mode="expected"):

        self.losses = np.asarray(losses, dtype=float)
        self.plays = np.asarray(plays)
        self.learner_losses = np.asarray(learner_losses, dtype=float)
        self.bound = bound
        self.weights = weights
        self.mode = mode

        rounds = np.arange(1, self.learner_losses.size + 1)
        if rounds.size:
            best = np.cumsum(self.losses, axis=0).min(axis=1)
            self.regret_trace = \
                (np.cumsum(self.learner_losses) - best) / rounds
        else:
            self.regret_trace = np.zeros(0)

    def __repr__(self):
        return "RegretRecord(mode='{}', rounds={}, regret={})".format(
            self.mode, self.rounds, self.regret)

    @classmethod
    def empty(cls, n, mode="expected"):
        return cls(np.zeros((0, n)), [], [], None, mode=mode)

    @property
    def is_empty(self):
        return self.rounds == 0

    @property
    def rounds(self):
        return self.learner_losses.size

    @property
    def regret(self):
        if self.is_empty:
            return None
        return float(self.regret_trace[-1])

    def win_frequency(self):
        """Share of rounds with a negative learner loss."""

        if self.is_empty:
            return None
        return float(np.mean(self.learner_losses < 0))

    def trace(self):
        """Return the game trace with columns step, loss_i, play,
        learner_loss, regret and bound.

        """

        frame = pd.DataFrame({"step": np.arange(1, self.rounds + 1)})
        for i in range(self.losses.shape[1]):
            frame["loss_{}".format(i)] = self.losses[:, i]
        frame["play"] = self.plays
        frame["learner_loss"] = self.learner_losses
        frame["regret"] = self.regret_trace
        frame["bound"] = self.bound
        return frame
