from fractions import Fraction

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from oracles import naive_opt, naive_sym_opt
from submwp.core import CoverageOracle, GroundSet, Instance, objective
from submwp.errors import CapacityError, DomainError
from submwp import exact
from submwp.exact import SearchBudget, brute_force_opt, brute_force_sym_opt, greedy_baseline
from submwp.families import matroid_tight, random_coverage, random_monotone, tight43
from submwp.gcov import ckr_instance
from submwp.symgap import SymInstance, sym_objective

seeds = st.integers(0, 2**32 - 1)


def random_case(rng, n_max=8, k_max=4):
    k = int(rng.integers(1, k_max))
    return random_monotone(rng, int(rng.integers(max(k, 2), n_max)), k)


class TestBruteForce:
    @given(seeds)
    @settings(max_examples=30)
    def test_matches_reference(self, seed):
        rng = np.random.default_rng(seed)
        inst = random_case(rng)
        P, val = brute_force_opt(inst)
        labels, ref = naive_opt(inst)
        assert val == ref == objective(inst, P)

    def test_reports_lexicographically_smallest(self):
        inst = tight43(2)
        P, val = brute_force_opt(inst)
        assert val == 4
        assert P.labels == (0, 1, 2, 3, 0, 2)

    def test_known_values(self):
        g, t = ckr_instance(3)
        assert brute_force_opt(g.instance(t))[1] == 23
        assert brute_force_opt(tight43(3))[1] == 6

    def test_relabel_invariance(self):
        rng = np.random.default_rng(9)
        inst = random_coverage(rng, 7, 3)
        perm = rng.permutation(inst.n)
        inv = np.argsort(perm)
        f = inst.oracle
        edges = [({int(inv[v]) for v in range(inst.n) if m >> v & 1}, w) for m, w in zip(f.edge_masks, f.weights)]
        moved = Instance(CoverageOracle(GroundSet([f"w{i}" for i in range(inst.n)]), edges), tuple(int(inv[t]) for t in inst.terminals))
        assert brute_force_opt(moved)[1] == brute_force_opt(inst)[1]

    def test_parallel_matches_serial(self, monkeypatch):
        rng = np.random.default_rng(2)
        inst = random_coverage(rng, 12, 3)
        serial = brute_force_opt(inst, jobs=1)
        monkeypatch.setattr(exact, "PARALLEL_MIN_STATES", 1)
        assert brute_force_opt(inst, jobs=2) == serial

    def test_capacity(self):
        inst = tight43(3)
        with pytest.raises(CapacityError) as err:
            brute_force_opt(inst, budget=100)
        assert err.value.required == 6 ** 3
        with pytest.raises(DomainError):
            SearchBudget(0)
        assert brute_force_opt(inst, budget=SearchBudget(216))[1] == 6


class TestSymBruteForce:
    @pytest.mark.parametrize("k,expected", [(3, Fraction(71, 4)), (4, Fraction(34))])
    def test_values(self, k, expected):
        sym = SymInstance(k)
        P, val = brute_force_sym_opt(sym)
        assert val == expected == naive_sym_opt(k) == sym_objective(sym, P)
        P.validate()

    def test_capacity(self):
        with pytest.raises(CapacityError):
            brute_force_sym_opt(SymInstance(5), budget=1000)


class TestGreedy:
    @pytest.mark.parametrize("k", range(2, 7))
    def test_matroid_tight_ratio(self, k):
        inst = matroid_tight(k)
        P, val = greedy_baseline(inst)
        assert val == 2 * k - 1
        assert brute_force_opt(inst)[1] == k

    @given(seeds)
    @settings(max_examples=30)
    def test_ratio_bound(self, seed):
        rng = np.random.default_rng(seed)
        inst = random_case(rng)
        _, g = greedy_baseline(inst)
        _, opt = brute_force_opt(inst)
        assert opt <= g <= (2 - Fraction(1, inst.k)) * opt

    def test_structure(self):
        inst = tight43(2)
        P, val = greedy_baseline(inst)
        assert val == objective(inst, P)
        sizes = sorted(bin(m).count("1") for m in P.parts())
        assert sizes == [1, 1, 1, 3]
