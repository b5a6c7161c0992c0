from fractions import Fraction

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from oracles import naive_lovasz, naive_multilinear
from submwp.core import (CoverageOracle, CutOracle, ExplicitOracle, GraphCoverageOracle, GroundSet, Instance,
                         Partition, PartitionMatroidOracle, check_monotone, check_nonnegative,
                         check_row_column_type, check_submodular, check_transpose_invariant, lovasz_ext,
                         lovasz_subgradient, multilinear_ext, objective, truncated_mass)
from submwp.errors import CapacityError, DomainError
from submwp.families import random_coverage, random_monotone
from submwp.symgap import SymInstance

seeds = st.integers(0, 2**32 - 1)


def rational_point(rng, n, den=6):
    return [Fraction(int(v), den) for v in rng.integers(0, den + 1, size=n)]


class TestGroundSet:
    def test_index_and_masks(self):
        g = GroundSet(["a", "b", "c"])
        assert g.index("b") == 1
        assert g.mask({0, 2}) == 0b101
        assert g.mask(0b11) == 3
        assert g.mask_of_names(["c"]) == 4
        assert g.names(0b110) == ["b", "c"]
        assert g.full_mask == 7

    def test_rejects_duplicates_and_bad_masks(self):
        with pytest.raises(DomainError):
            GroundSet(["a", "a"])
        g = GroundSet(["a"])
        with pytest.raises(DomainError):
            g.mask(0b10)
        with pytest.raises(DomainError):
            g.index("z")

    def test_too_large(self):
        with pytest.raises(CapacityError):
            GroundSet(range(63))


class TestOracles:
    def test_coverage_values(self):
        g = GroundSet("abcd")
        f = CoverageOracle(g, [({0, 1}, 2), ({2}, Fraction(1, 2)), ({1, 3}, 1)])
        assert f.value(set()) == 0
        assert f.value({1}) == 3
        assert f.value({0, 2}) == Fraction(5, 2)
        assert f.value(g.full_mask) == Fraction(7, 2)
        assert f.value({1}, exact=False) == 3.0

    def test_graph_coverage_and_cut(self):
        g = GroundSet("abc")
        edges = [(0, 1, 1), (1, 2, 3)]
        b = GraphCoverageOracle(g, edges)
        d = CutOracle(g, edges)
        assert b.value({1}) == 4
        assert d.value({1}) == 4
        assert d.value({0, 1}) == 3
        assert d.value(g.full_mask) == 0
        assert not check_monotone(d)

    def test_partition_matroid(self):
        g = GroundSet("abcd")
        f = PartitionMatroidOracle(g, [{0, 1}, {2}])
        assert f.value({0, 1}) == 1
        assert f.value({0, 2, 3}) == 2
        with pytest.raises(DomainError):
            PartitionMatroidOracle(g, [{0, 1}, {1, 2}])

    def test_explicit_table_validation(self):
        g = GroundSet("ab")
        vals = {frozenset(): 0, frozenset({0}): 1, frozenset({1}): 1, frozenset({0, 1}): "3/2"}
        f = ExplicitOracle(g, vals)
        assert f.value({0, 1}) == Fraction(3, 2)
        with pytest.raises(DomainError):
            ExplicitOracle(g, {frozenset(): 0})
        with pytest.raises(DomainError):
            ExplicitOracle(g, {**vals, frozenset(): 1})

    def test_table_matches_pointwise(self):
        rng = np.random.default_rng(5)
        inst = random_coverage(rng, 7, 2)
        nums, den = inst.oracle.exact_table()
        for m in range(1 << 7):
            assert Fraction(int(nums[m]), den) == inst.oracle.value(m)


class TestInstance:
    def test_terminal_rules(self):
        g = GroundSet("abc")
        f = CoverageOracle(g, [({0, 1, 2}, 1)])
        with pytest.raises(DomainError):
            Instance(f, (0, 0))
        with pytest.raises(DomainError):
            Instance(f, ())
        inst = Instance(f, (0, 2))
        assert inst.free == (1,)

    def test_partition_check(self):
        g = GroundSet("abc")
        inst = Instance(CoverageOracle(g, [({0, 1, 2}, 1)]), (0, 1))
        assert objective(inst, Partition((0, 1, 1), 2)) == 2
        with pytest.raises(DomainError):
            Partition((1, 0, 0), 2).check(inst)
        assert Partition.from_parts([0b001, 0b110], 3).labels == (0, 1, 1)
        with pytest.raises(DomainError):
            Partition.from_parts([0b011, 0b110], 3)


class TestExtensions:
    @given(seeds)
    @settings(max_examples=40)
    def test_lovasz_matches_reference(self, seed):
        rng = np.random.default_rng(seed)
        inst = random_monotone(rng, int(rng.integers(1, 8)), 1)
        x = rational_point(rng, inst.n)
        assert lovasz_ext(inst.oracle, x) == naive_lovasz(inst.oracle, x)

    @given(seeds)
    @settings(max_examples=40)
    def test_subgradient_value_and_support(self, seed):
        rng = np.random.default_rng(seed)
        inst = random_coverage(rng, int(rng.integers(2, 8)), 1)
        f = inst.oracle
        x = rational_point(rng, f.n)
        val, g = lovasz_subgradient(f, x)
        assert val == lovasz_ext(f, x)
        for _ in range(100):
            y = rng.random(f.n)
            assert lovasz_ext(f, y, exact=False) >= float(val) + float(np.dot(g, y - np.array(x, float))) - 1e-9

    @given(seeds)
    @settings(max_examples=25)
    def test_multilinear_matches_reference(self, seed):
        rng = np.random.default_rng(seed)
        inst = random_monotone(rng, int(rng.integers(1, 7)), 1)
        x = rational_point(rng, inst.n, den=4)
        assert multilinear_ext(inst.oracle, x) == naive_multilinear(inst.oracle, x)

    def test_extensions_agree_with_f_on_integral_points(self):
        rng = np.random.default_rng(1)
        inst = random_coverage(rng, 9, 1)
        f = inst.oracle
        for m in range(1 << f.n):
            x = [(m >> v) & 1 for v in range(f.n)]
            assert lovasz_ext(f, x) == f.value(m) == multilinear_ext(f, x)

    def test_riemann_integral(self):
        rng = np.random.default_rng(2)
        inst = random_coverage(rng, 8, 1)
        f = inst.oracle
        x = rng.random(f.n)
        thetas = (np.arange(10_000) + 0.5) / 10_000
        table = f.float_table()
        pow2 = 1 << np.arange(f.n)
        est = table[((x[None, :] >= thetas[:, None]).astype(np.int64) @ pow2)].mean()
        assert abs(est - lovasz_ext(f, x, exact=False)) <= 2 * float(f.value(f.ground.full_mask)) / 10_000

    def test_sampled_multilinear_within_four_sigma(self):
        for s in range(5):
            rng = np.random.default_rng(100 + s)
            inst = random_coverage(rng, int(rng.integers(3, 11)), 1)
            x = rng.random(inst.n)
            exact = multilinear_ext(inst.oracle, x)
            est = multilinear_ext(inst.oracle, x, mode="sampled", trials=20_000, seed=s)
            assert abs(est.mean - exact) <= 4 * est.stderr + 1e-12

    def test_domain_and_capacity(self):
        f = CoverageOracle(GroundSet("ab"), [({0}, 1)])
        with pytest.raises(DomainError):
            lovasz_ext(f, [0.5])
        with pytest.raises(DomainError):
            lovasz_ext(f, [2, 0])
        with pytest.raises(DomainError):
            multilinear_ext(f, [0, 0], mode="what")
        big = CoverageOracle(GroundSet(range(21)), [({0}, 1)])
        with pytest.raises(CapacityError):
            multilinear_ext(big, [0] * 21)


class TestCheckers:
    def test_coverage_is_monotone_submodular(self):
        rng = np.random.default_rng(3)
        f = random_coverage(rng, 8, 1).oracle
        assert check_nonnegative(f) and check_monotone(f) and check_submodular(f)

    def test_supermodular_witness(self):
        g = GroundSet("abc")
        f = ExplicitOracle(g, {frozenset(S): len(S) ** 2 for S in
                               [(), (0,), (1,), (2,), (0, 1), (0, 2), (1, 2), (0, 1, 2)]})
        res = check_submodular(f)
        assert not res
        w = res.witness
        assert w["gain_X"] < w["gain_Y"]
        assert set(w["X"]) <= set(w["Y"])

    def test_non_monotone_witness(self):
        g = GroundSet("ab")
        f = ExplicitOracle(g, {frozenset(): 0, frozenset({0}): 2, frozenset({1}): 1, frozenset({0, 1}): 1},
                           monotone=False)
        res = check_monotone(f)
        assert not res and res.witness["fA"] > res.witness["fB"]

    def test_capacity(self):
        f = CoverageOracle(GroundSet(range(17)), [({0}, 1)])
        with pytest.raises(CapacityError):
            check_submodular(f)

    def test_row_column_type(self):
        for k in (3, 4):
            f = SymInstance(k).oracle()
            assert check_row_column_type(f, k)
            assert check_transpose_invariant(f, k)
        g = GroundSet(["11", "12", "21", "22"])
        diag = CoverageOracle(g, [({0, 3}, 1)])
        assert not check_row_column_type(diag, 2)
        rows = CoverageOracle(g, [({0, 1}, 1), ({2, 3}, 1)])
        assert check_row_column_type(rows, 2)
        assert not check_transpose_invariant(rows, 2)


class TestTruncatedMass:
    @given(st.lists(st.integers(0, 20), min_size=2, max_size=8).filter(lambda w: sum(w) > 0),
           st.sampled_from([Fraction(1, 4), Fraction(3, 10), Fraction(1, 2), Fraction(1)]))
    def test_bound_for_quarter_and_above(self, w, delta):
        p = [Fraction(v, sum(w)) for v in w]
        assert truncated_mass(p, delta) >= 1 - max(p)

    def test_fails_below_quarter(self):
        p = [Fraction(1, 2), Fraction(1, 2)]
        assert truncated_mass(p, Fraction(1, 4)) == Fraction(1, 2)
        assert truncated_mass(p, Fraction(1, 5)) < Fraction(1, 2)

    def test_validation(self):
        with pytest.raises(DomainError):
            truncated_mass([Fraction(1, 2)], Fraction(1, 4))
        with pytest.raises(DomainError):
            truncated_mass([1], 2)
