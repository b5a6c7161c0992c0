from fractions import Fraction

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from oracles import naive_maxcut, naive_multiway_cut
from submwp.core import Partition, objective
from submwp.errors import DomainError
from submwp.gcov import cut_objective, exp_clock_round, mwc_to_gcov
from submwp.hardness import (SimpleGraph, approx_transfer, canonical_partition, extract_cut, extraction_bound,
                             gadget_edges, gadget_table, maxcut_brute, mwc_decomposed, normalize, reduce,
                             verify_reduction)
from submwp.relax import solve_relaxation

seeds = st.integers(0, 2**32 - 1)

EDGE = SimpleGraph(["a", "b"], [(0, 1)])
P3 = SimpleGraph(["a", "b", "c"], [(0, 1), (1, 2)])
K3 = SimpleGraph(["a", "b", "c"], [(0, 1), (1, 2), (0, 2)])

PINNED = [
    ((1, 1), (1, 2), 4), ((1, 2), (1, 3), 1), ((1, 1), (1, 3), 4),
    ((2, 1), (2, 2), 4), ((2, 2), (2, 3), 4), ((2, 1), (2, 3), 1),
    ((3, 1), (3, 2), 1), ((3, 2), (3, 3), 4), ((3, 1), (3, 3), 4),
    ((1, 1), (2, 1), 4), ((2, 1), (3, 1), 1), ((1, 1), (3, 1), 4),
    ((1, 2), (2, 2), 4), ((2, 2), (3, 2), 4), ((1, 2), (3, 2), 1),
    ((1, 3), (2, 3), 1), ((2, 3), (3, 3), 4), ((1, 3), (3, 3), 4),
]


def random_graph(rng, n, p=0.5):
    edges = [(u, v) for u in range(n) for v in range(u + 1, n) if rng.random() < p]
    return SimpleGraph([f"v{i}" for i in range(n)], edges)


def random_h_partition(R, rng):
    labels = [int(v) for v in rng.integers(0, 3, size=R.graph.n)]
    labels[:3] = [0, 1, 2]
    return Partition(tuple(labels), 3)


class TestGadget:
    def test_pinned_edges(self):
        assert gadget_edges() == PINNED

    def test_census(self):
        edges = gadget_edges()
        heavy = [e for e in edges if e[2] == 4]
        assert len(edges) == 18 and len(heavy) == 12
        assert sum(w for *_, w in edges) == 54
        for t in [(1, 1), (2, 2), (3, 3)]:
            assert sum(1 for a, b, _ in edges if t in (a, b)) == 4

    def test_local_table(self):
        cost = {key: v[0] for key, v in gadget_table().items()}
        assert cost[(0, 0)] == cost[(1, 1)] == 28
        assert cost[(0, 1)] == cost[(1, 0)] == 27
        assert min(v for key, v in cost.items() if 2 in key) == 30
        assert cost[(2, 2)] == 32


class TestReduce:
    def test_counts(self):
        for G, n, w in [(EDGE, 9, 54), (K3, 18, 162)]:
            R = reduce(G)
            assert R.graph.n == n and R.graph.total_weight() == w
            assert R.graph.vertices.elements[:3] == ("s1", "s2", "s3")

    def test_simple_graph_rules(self):
        with pytest.raises(DomainError):
            SimpleGraph(["a"], [(0, 0)])
        with pytest.raises(DomainError):
            SimpleGraph(["a", "b"], [(0, 1), (1, 0)])
        with pytest.raises(DomainError):
            SimpleGraph(["a", "a"], [])

    def test_decomposed_matches_reference(self):
        R = reduce(EDGE)
        _, v = mwc_decomposed(EDGE, R)
        assert v == naive_multiway_cut(R.graph.n, R.graph.edges, R.terminals) == 27


class TestVerify:
    @pytest.mark.parametrize("G,maxcut,mwc,gcov", [(EDGE, 1, 27, 81), (P3, 2, 54, 162), (K3, 2, 82, 244)])
    def test_goldens(self, G, maxcut, mwc, gcov):
        rep = verify_reduction(G)
        assert (rep.maxcut, rep.mwc_opt, rep.gcov_opt) == (maxcut, mwc, gcov)
        assert rep.gcov_route == "brute-force" and rep.identities_ok

    def test_decomposed_route(self):
        G = SimpleGraph(list("abcde"), [(0, 1), (1, 2), (2, 3), (3, 4)])
        rep = verify_reduction(G)
        assert rep.gcov_route == "decomposed" and rep.identities_ok
        assert (rep.maxcut, rep.mwc_opt, rep.gcov_opt) == (4, 108, 324)

    @given(seeds)
    @settings(max_examples=20)
    def test_small_graphs(self, seed):
        rng = np.random.default_rng(seed)
        G = random_graph(rng, int(rng.integers(2, 6)))
        R = reduce(G)
        maxcut, U = maxcut_brute(G)
        assert maxcut == naive_maxcut(G.n, G.edges) == G.cut_size(U)
        _, mwc = mwc_decomposed(G, R)
        assert mwc == 28 * G.m - maxcut


class TestCanonical:
    @given(seeds)
    @settings(max_examples=25)
    def test_cut_to_partition(self, seed):
        rng = np.random.default_rng(seed)
        G = random_graph(rng, int(rng.integers(2, 6)))
        R = reduce(G)
        U = {v for v in range(G.n) if rng.random() < 0.5}
        P = canonical_partition(G, R, U)
        assert cut_objective(R.graph, P) <= 28 * G.m - G.cut_size(U)

    @given(seeds)
    @settings(max_examples=25)
    def test_translation(self, seed):
        rng = np.random.default_rng(seed)
        G = random_graph(rng, int(rng.integers(2, 5)))
        R = reduce(G)
        P = random_h_partition(R, rng)
        assert objective(R.instance(), P) == mwc_to_gcov(R.graph, R.terminals, P) == cut_objective(R.graph, P) + 54 * G.m


class TestExtraction:
    @given(seeds)
    @settings(max_examples=40)
    def test_bound_on_random_partitions(self, seed):
        rng = np.random.default_rng(seed)
        G = random_graph(rng, int(rng.integers(2, 6)))
        R = reduce(G)
        maxcut, _ = maxcut_brute(G)
        P = random_h_partition(R, rng)
        U = extract_cut(G, R, P)
        assert G.cut_size(U) >= extraction_bound(G, R, normalize(R, P), maxcut)

    def test_optimal_partition_of_triangle(self):
        R = reduce(K3)
        P, _ = mwc_decomposed(K3, R)
        assert K3.cut_size(extract_cut(K3, R, P)) == 2

    def test_all_in_one_part(self):
        R = reduce(EDGE)
        labels = [0] * R.graph.n
        labels[1], labels[2] = 1, 2
        U = extract_cut(EDGE, R, Partition(tuple(labels), 3))
        assert EDGE.cut_size(U) >= 0

    def test_clock_rounding_on_single_edge(self):
        R = reduce(EDGE)
        x = solve_relaxation(R.instance(), max_iters=3000).best_x
        for s in range(10):
            P = exp_clock_round(R.graph, R.terminals, x, seed=s)
            U = extract_cut(EDGE, R, P)
            assert EDGE.cut_size(U) in (0, 1)
            assert EDGE.cut_size(U) >= extraction_bound(EDGE, R, normalize(R, P), 1)


class TestTransfer:
    def test_values(self):
        assert approx_transfer(1, 7) == 7
        assert approx_transfer(Fraction(9, 8), 7) == 0
        assert abs(approx_transfer(1.0001, 1) - 0.9837) < 1e-9
        with pytest.raises(DomainError):
            approx_transfer(Fraction(1, 2), 3)
        with pytest.raises(DomainError):
            approx_transfer(1, 3, gcov_value=250, gcov_opt=244)
