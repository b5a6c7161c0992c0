import warnings
from fractions import Fraction

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from submwp.core import CoverageOracle, GroundSet, Instance, Partition, lovasz_ext
from submwp.errors import DomainError
from submwp.families import (random_assignment, random_monotone, tight43, tight43_half_point, tight_example,
                             tight_example_point)
from submwp.gcov import ckr_half_point, ckr_instance
from submwp.relax import (FractionalAssignment, SolverConfig, assigned_vs_unassigned, integral_assigned,
                          integral_unassigned, integral_unassigned_telescoped, project_simplex_rows,
                          relaxation_objective, solve_relaxation, telescope_terms, threshold_profile)

H = Fraction(1, 2)
seeds = st.integers(0, 2**32 - 1)


def random_case(rng, n_max=8, k_max=4):
    k = int(rng.integers(1, k_max))
    inst = random_monotone(rng, int(rng.integers(max(k, 2), n_max)), k)
    return inst, random_assignment(rng, inst)


class TestAssignment:
    def test_feasibility_checks(self):
        with pytest.raises(DomainError):
            FractionalAssignment([[1, 0], [H, H + 1]], (0,))
        with pytest.raises(DomainError):
            FractionalAssignment([[0, 1], [H, H]], (0, 1))
        x = FractionalAssignment([[1, 0], [0, 1], [H, H]], (0, 1))
        assert x.exact and x.alphas() == [1, 1, H]

    def test_rationalize_keeps_rows_on_simplex(self):
        rng = np.random.default_rng(0)
        rows = project_simplex_rows(rng.random((5, 3)))
        rows[0], rows[1], rows[2] = [1, 0, 0], [0, 1, 0], [0, 0, 1]
        xr = FractionalAssignment(rows, (0, 1, 2)).rationalize(1000)
        assert xr.exact
        for row in xr.x:
            assert sum(row) == 1 and all(v >= 0 for v in row)
        assert np.abs(xr.as_float() - rows).max() < 1e-2

    def test_from_partition_and_uniform(self):
        inst = tight_example()
        x = FractionalAssignment.from_partition(Partition((0, 1, 0), 2), inst.terminals)
        assert x.tolist()[2] == [1, 0]
        u = FractionalAssignment.uniform(inst)
        assert u.tolist()[2] == [H, H]


class TestProjection:
    @given(seeds)
    def test_projection_is_on_simplex_and_nearest(self, seed):
        rng = np.random.default_rng(seed)
        Y = rng.normal(size=(20, 4)) * 3
        P = project_simplex_rows(Y)
        assert np.allclose(P.sum(axis=1), 1) and (P >= 0).all()
        for _ in range(5):
            Z = project_simplex_rows(rng.random((20, 4)))
            assert (np.linalg.norm(Y - P, axis=1) <= np.linalg.norm(Y - Z, axis=1) + 1e-12).all()

    def test_simplex_points_fixed(self):
        Y = np.array([[0.2, 0.3, 0.5], [1.0, 0.0, 0.0]])
        assert np.allclose(project_simplex_rows(Y), Y)


class TestSolver:
    def test_single_edge_reaches_one(self):
        g = GroundSet(["t1", "t2", "u"])
        inst = Instance(CoverageOracle(g, [({0, 2}, 1)]), (0, 1))
        rep = solve_relaxation(inst)
        assert abs(rep.objective - 1) < 1e-6

    def test_tight_family(self):
        rep = solve_relaxation(tight43(3))
        assert abs(rep.objective - 6) < 1e-3

    def test_ckr(self):
        g, t = ckr_instance(3)
        rep = solve_relaxation(g.instance(t))
        assert abs(rep.objective - 22.5) < 1e-2

    @pytest.mark.filterwarnings("ignore::UserWarning")
    def test_report_consistency(self):
        rng = np.random.default_rng(3)
        inst = random_monotone(rng, 7, 3)
        rep = solve_relaxation(inst, SolverConfig(max_iters=3000, init="random", seed=4))
        rep.best_x.validate()
        assert abs(rep.objective - relaxation_objective(inst.oracle, rep.best_x)) < 1e-9
        assert all(a >= b for a, b in zip(rep.history, rep.history[1:]))

    def test_max_iters_warns(self):
        g, t = ckr_instance(3)
        with warnings.catch_warnings(record=True) as caught:
            warnings.simplefilter("always")
            rep = solve_relaxation(g.instance(t), max_iters=5)
        assert not rep.converged and caught

    @pytest.mark.filterwarnings("ignore::UserWarning")
    def test_deterministic(self):
        rng = np.random.default_rng(8)
        inst = random_monotone(rng, 6, 2)
        a = solve_relaxation(inst, max_iters=500, init="random", seed=1)
        b = solve_relaxation(inst, max_iters=500, init="random", seed=1)
        assert a.objective == b.objective and np.array_equal(a.best_x.as_float(), b.best_x.as_float())


class TestProfile:
    def test_integral_point(self):
        inst = tight_example()
        x = FractionalAssignment.from_partition(Partition((0, 1, 1), 2), inst.terminals)
        prof = threshold_profile(x)
        assert len(prof.intervals) == 1
        iv = prof.intervals[0]
        assert iv.parts == (0b001, 0b110) and iv.unassigned == 0

    def test_tight_example_intervals(self):
        inst = tight_example()
        prof = threshold_profile(tight_example_point(inst))
        assert prof.breakpoints == (0, H, 1)
        first, second = prof.intervals
        assert first.parts == (0b101, 0b110) and first.unassigned == 0
        assert second.parts == (0b001, 0b010) and second.unassigned == 0b100

    @given(seeds)
    @settings(max_examples=20)
    def test_interval_count(self, seed):
        rng = np.random.default_rng(seed)
        inst, x = random_case(rng, 8, 4)
        assert len(threshold_profile(x).intervals) <= inst.n * inst.k + 2


class TestIntegrals:
    def test_tight_example_values(self):
        inst = tight_example()
        x = tight_example_point(inst)
        assert integral_assigned(inst.oracle, x, Fraction(1, 4)) == H
        assert integral_assigned(inst.oracle, x, 0) == 0
        assert integral_unassigned(inst.oracle, x, 1) == H
        assert integral_unassigned(inst.oracle, x, 0) == 0

    def test_integral_point_values(self):
        inst = tight43(2)
        P = Partition((0, 1, 2, 3, 0, 2), 4)
        x = FractionalAssignment.from_partition(P, inst.terminals)
        parts = sum(inst.oracle.value(m) for m in P.parts())
        assert integral_assigned(inst.oracle, x, 1) == parts
        assert integral_unassigned(inst.oracle, x, Fraction(2, 3)) == 0

    @given(seeds, st.sampled_from([Fraction(0), Fraction(1, 3), Fraction(1, 2), Fraction(1)]))
    @settings(max_examples=30)
    def test_unassigned_routes_agree(self, seed, r):
        rng = np.random.default_rng(seed)
        inst, x = random_case(rng, 8, 4)
        assert integral_unassigned(inst.oracle, x, r) == integral_unassigned_telescoped(inst.oracle, x, r)

    def test_float_routes_agree(self):
        g, t = ckr_instance(3)
        inst = g.instance(t)
        x = solve_relaxation(inst, max_iters=2000).best_x
        a = integral_unassigned(inst.oracle, x, 1.0)
        assert abs(a - integral_unassigned_telescoped(inst.oracle, x, 1.0)) < 1e-12

    @given(seeds)
    @settings(max_examples=30)
    def test_telescoping_bound(self, seed):
        rng = np.random.default_rng(seed)
        inst, x = random_case(rng, 8, 4)
        for d in (Fraction(1, 4), Fraction(1, 3), Fraction(1, 2), Fraction(1)):
            for j in range(1, inst.n + 1):
                lhs, rhs = telescope_terms(inst.oracle, x, j, d)
                assert lhs >= rhs

    @given(seeds)
    @settings(max_examples=30)
    def test_assigned_bounds_unassigned(self, seed):
        rng = np.random.default_rng(seed)
        inst, x = random_case(rng, 9, 5)
        for d in (Fraction(1, 4), Fraction(1, 2), Fraction(1)):
            lhs, rhs = assigned_vs_unassigned(inst.oracle, x, d)
            assert lhs >= rhs

    def test_tight_example_equality_and_failure(self):
        inst = tight_example()
        x = tight_example_point(inst)
        lhs, rhs = assigned_vs_unassigned(inst.oracle, x, Fraction(1, 4))
        assert lhs == rhs == H
        lhs, rhs = assigned_vs_unassigned(inst.oracle, x, Fraction(1, 5))
        assert lhs < rhs

    def test_relaxation_objective_on_known_points(self):
        g, t = ckr_instance(3)
        assert relaxation_objective(g.coverage(), ckr_half_point(g, t)) == Fraction(45, 2)
        inst = tight43(3)
        assert relaxation_objective(inst.oracle, tight43_half_point(inst)) == 6

    def test_relaxation_is_sum_of_column_extensions(self):
        rng = np.random.default_rng(7)
        inst = random_monotone(rng, 6, 3)
        x = random_assignment(rng, inst)
        cols = sum(lovasz_ext(inst.oracle, x.column(i)) for i in range(inst.k))
        assert relaxation_objective(inst.oracle, x) == cols

    def test_domain(self):
        inst = tight_example()
        x = tight_example_point(inst)
        with pytest.raises(DomainError):
            integral_assigned(inst.oracle, x, 2)
        with pytest.raises(DomainError):
            integral_unassigned(inst.oracle, x, -1)
