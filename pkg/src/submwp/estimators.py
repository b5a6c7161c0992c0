"""Estimator-style wrappers around the solvers and roundings.

These follow scikit-learn's parameter conventions (``get_params``,
``set_params``, trailing-underscore fitted attributes, ``check_is_fitted``)
but take instances rather than feature matrices, so they are not drop-in
pipeline steps. The algorithms themselves stay plain functions.
"""

from __future__ import annotations

from sklearn.base import BaseEstimator
from sklearn.utils.validation import check_is_fitted

from .core import Instance, objective
from .errors import DomainError
from .exact import brute_force_opt, greedy_baseline
from .gcov import WeightedGraph, estimate_expected_cost, exp_clock_round
from .relax import FractionalAssignment, SolverConfig, solve_relaxation
from .rounding import RoundingConfig, expected_cost, round_random


def _check_instance(instance):
    if not isinstance(instance, Instance):
        raise DomainError(f"expected an Instance, got {type(instance).__name__}")
    return instance


def _check_assignment(instance, x):
    if not isinstance(x, FractionalAssignment):
        raise DomainError(f"expected a FractionalAssignment, got {type(x).__name__}")
    if x.n != instance.n or x.k != instance.k or tuple(x.terminals) != instance.terminals:
        raise DomainError("assignment does not match the instance")
    return x


class RelaxationSolver(BaseEstimator):
    """Projected subgradient solver for the convex relaxation.

    Fitted attributes: ``x_``, ``objective_``, ``n_iter_``, ``converged_``.
    """

    def __init__(self, max_iters=20_000, step_scale=None, tol=1e-9, window=200, seed=0, init="uniform"):
        self.max_iters = max_iters
        self.step_scale = step_scale
        self.tol = tol
        self.window = window
        self.seed = seed
        self.init = init

    def fit(self, instance, y=None):
        _check_instance(instance)
        cfg = SolverConfig(**self.get_params())
        rep = solve_relaxation(instance, cfg)
        self.x_ = rep.best_x
        self.objective_ = rep.objective
        self.n_iter_ = rep.iterations
        self.converged_ = rep.converged
        return self

    def transform(self, instance=None):
        check_is_fitted(self)
        return self.x_


class ThresholdRounder(BaseEstimator):
    """Threshold rounding with theta uniform on the chosen interval.

    ``fit`` computes the exact expectation; ``predict`` draws one rounding.
    """

    def __init__(self, interval="quarter", unassigned_sink=None, seed=0):
        self.interval = interval
        self.unassigned_sink = unassigned_sink
        self.seed = seed

    def _config(self):
        return RoundingConfig(interval=self.interval, unassigned_sink=self.unassigned_sink)

    def fit(self, instance, x):
        _check_instance(instance)
        _check_assignment(instance, x)
        self.instance_ = instance
        self.x_ = x
        self.expected_cost_ = expected_cost(instance, x, self._config())
        return self

    def predict(self, seed=None):
        check_is_fitted(self)
        out = round_random(self.instance_, self.x_, self._config(), seed=self.seed if seed is None else seed)
        return out.partition


class ExponentialClockRounder(BaseEstimator):
    """Exponential-clock rounding for graph coverage; ``fit`` estimates the expected cost."""

    def __init__(self, trials=10_000, seed=0):
        self.trials = trials
        self.seed = seed

    def fit(self, graph, terminals, x):
        if not isinstance(graph, WeightedGraph):
            raise DomainError("expected a WeightedGraph")
        self.graph_ = graph
        self.terminals_ = tuple(terminals)
        self.x_ = _check_assignment(graph.instance(terminals), x)
        self.estimate_ = estimate_expected_cost(graph, terminals, x, trials=self.trials, seed=self.seed)
        return self

    def predict(self, seed=None):
        check_is_fitted(self)
        return exp_clock_round(self.graph_, self.terminals_, self.x_, seed=self.seed if seed is None else seed)


class GreedyPartitioner(BaseEstimator):
    def fit(self, instance, y=None):
        self.partition_, self.value_ = greedy_baseline(_check_instance(instance))
        return self

    def predict(self, instance=None):
        check_is_fitted(self)
        return self.partition_


class BruteForcePartitioner(BaseEstimator):
    def __init__(self, budget=None, jobs=None):
        self.budget = budget
        self.jobs = jobs

    def fit(self, instance, y=None):
        self.partition_, self.value_ = brute_force_opt(_check_instance(instance), budget=self.budget, jobs=self.jobs)
        return self

    def predict(self, instance=None):
        check_is_fitted(self)
        return self.partition_

    def score(self, instance, partition):
        """OPT / value of ``partition`` (1 for an optimal one)."""
        check_is_fitted(self)
        return self.value_ / objective(instance, partition)
