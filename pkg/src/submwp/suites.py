"""Named property suites driven by ``submwp verify``.

Each suite returns a list of :class:`Check` records; a failed check carries a
witness describing the first counterexample.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction

import numpy as np

from ._util import fmt_value, make_rng
from .core import (check_monotone, check_row_column_type, check_submodular, check_transpose_invariant,
                   truncated_mass)
from .errors import SubmwpError


@dataclass
class Check:
    name: str
    ok: bool
    detail: str = ""

    def line(self) -> str:
        tag = "PASS" if self.ok else "FAIL"
        return f"{tag} {self.name}" + (f": {self.detail}" if self.detail else "")


def _guard(name, fn):
    try:
        ok, detail = fn()
    except SubmwpError as exc:
        return Check(name, False, f"{type(exc).__name__}: {exc}")
    return Check(name, bool(ok), detail)


def _checker(fn, *args):
    def run():
        res = fn(*args)
        return res.holds, "" if res.holds else str(res.witness)
    return run


def _random_simplex(rng, k):
    p = rng.dirichlet(np.ones(k))
    if rng.random() < 0.3:
        p[rng.random(k) < 0.5] = 0
        if p.sum() == 0:
            p[0] = 1
        p = p / p.sum()
    return p


def lemma_suite(seed=0, vectors=10_000, instances=10, points=10):
    from .families import random_assignment, random_monotone, tight_example, tight_example_point
    from .relax import assigned_vs_unassigned, integral_unassigned, relaxation_objective, telescope_terms
    from .rounding import RoundingConfig, expected_cost

    rng = make_rng(seed, "lemma-suite")
    deltas = [0.25, 0.3, 0.5, 1.0]
    out = []

    def mass():
        for t in range(vectors):
            p = _random_simplex(rng, int(rng.integers(2, 9)))
            for d in deltas:
                if truncated_mass(p, d) < 1 - p.max() - 1e-12:
                    return False, f"p={p.tolist()} delta={d}"
        return True, f"{vectors} vectors x {len(deltas)} deltas"

    out.append(_guard("truncated mass >= 1 - max p for delta >= 1/4", mass))

    def mass_fails():
        p = [Fraction(1, 2), Fraction(1, 2)]
        bad = [d for d in (Fraction(0), Fraction(1, 5), Fraction(6, 25)) if truncated_mass(p, d) >= Fraction(1, 2)]
        return not bad, "p=(1/2,1/2) violates the bound at delta=0, 1/5, 6/25" if not bad else f"held at {bad}"

    out.append(_guard("truncated mass bound fails below 1/4", mass_fails))

    cases = []
    for _ in range(instances):
        inst = random_monotone(rng, int(rng.integers(3, 9)), int(rng.integers(2, 4)))
        for _ in range(points):
            cases.append((inst, random_assignment(rng, inst, denominator=int(rng.integers(2, 13)))))

    def telescope():
        for inst, x in cases:
            for d in (Fraction(1, 4), Fraction(1, 2), Fraction(1)):
                for j in range(1, inst.n + 1):
                    lhs, rhs = telescope_terms(inst.oracle, x, j, d)
                    if lhs < rhs:
                        return False, f"{inst.name} j={j} delta={d}: {lhs} < {rhs}"
        return True, f"{len(cases)} points"

    out.append(_guard("per-element telescoping bound", telescope))

    def closed_form():
        for inst, x in cases:
            for r in {Fraction(0), Fraction(1, 3), Fraction(1, 2), Fraction(1), *x.alphas()}:
                integral_unassigned(inst.oracle, x, r)
        return True, "direct and telescoped integrals agree"

    out.append(_guard("unassigned-set integral closed form", closed_form))

    def assigned():
        for inst, x in cases:
            for d in (Fraction(1, 4), Fraction(3, 10), Fraction(1, 2), Fraction(1)):
                lhs, rhs = assigned_vs_unassigned(inst.oracle, x, d)
                if lhs < rhs:
                    return False, f"{inst.name} delta={d}: {lhs} < {rhs}"
        inst = tight_example()
        x = tight_example_point(inst)
        lhs, rhs = assigned_vs_unassigned(inst.oracle, x, Fraction(1, 4))
        if lhs != rhs:
            return False, f"tight example not tight at 1/4: {lhs} vs {rhs}"
        lhs, rhs = assigned_vs_unassigned(inst.oracle, x, Fraction(1, 5))
        if not lhs < rhs:
            return False, "tight example did not fail at delta=1/5"
        return True, f"{len(cases)} points; tight example equal at 1/4, fails at 1/5"

    out.append(_guard("assigned mass bounds the unassigned integral", assigned))

    def four_thirds():
        cfg = RoundingConfig("quarter")
        for inst, x in cases:
            e = expected_cost(inst, x, cfg)
            lp = relaxation_objective(inst.oracle, x)
            if e > Fraction(4, 3) * lp:
                return False, f"{inst.name}: E={e} > 4/3 * {lp}"
        return True, f"{len(cases)} points"

    out.append(_guard("expected quarter-rounding cost <= 4/3 relaxation", four_thirds))
    return out


def symgap_suite(k=4, seed=0, partitions=200):
    from .exact import brute_force_sym_opt
    from .symgap import (SymInstance, SymPartition, min_structured_value, opt_upper_partition,
                         structure_partition, structured_lower_bound, swap, sym_lower_bound, sym_objective,
                         symmetry_gap)

    sym = SymInstance(k)
    f = sym.oracle()
    rng = make_rng(seed, "symgap-suite", k)
    out = []
    if f.n <= 16:
        out.append(_guard("monotone", _checker(check_monotone, f)))
        out.append(_guard("submodular", _checker(check_submodular, f)))
        out.append(_guard("row-column type", _checker(check_row_column_type, f, k)))
        out.append(_guard("transpose invariant", _checker(check_transpose_invariant, f, k)))
    out.append(_guard("row partition value", lambda: (True, fmt_value(opt_upper_partition(sym)[1]))))

    def structured_bound():
        val, i_star = min_structured_value(sym)
        return val >= structured_lower_bound(k), f"min {fmt_value(val)} at i*={i_star}"

    out.append(_guard("structured partition lower bound", structured_bound))

    if k <= 4:
        def bounds():
            rep = symmetry_gap(sym)
            return rep.ok, f"OPT={fmt_value(rep.opt)} OPT_Sym={fmt_value(rep.opt_sym)} " + \
                ", ".join(f"{n}: {v}" for n, v in rep.checks.items())

        out.append(_guard("symmetry gap bounds", bounds))
    elif k <= 5:
        def sym_bound():
            _, v = brute_force_sym_opt(sym)
            return v >= sym_lower_bound(k), f"OPT_Sym={fmt_value(v)}"

        out.append(_guard("symmetric optimum lower bound", sym_bound))

    if k >= 4:
        def pipeline():
            for _ in range(partitions):
                P = SymPartition.random(k, rng)
                Q, tag = structure_partition(sym, P)
                if not tag.structured or sym_objective(sym, Q) > sym_objective(sym, P) + 2 * k:
                    return False, f"board {P.L.tolist()}"
            return True, f"{partitions} random partitions"

        out.append(_guard("structuring pipeline", pipeline))

        def swaps():
            for _ in range(partitions):
                P = SymPartition.random(k, rng)
                i = int(rng.integers(2, k + 1))
                Q = swap(P, i)
                Q.validate()
                if sym_objective(sym, Q) != sym_objective(sym, P):
                    return False, f"swap_{i} on {P.L.tolist()}"
            return True, f"{partitions} random swaps"

        out.append(_guard("swap preserves the objective", swaps))
    return out


def reduction_suite(seed=0, partitions=200):
    from .hardness import (SimpleGraph, canonical_partition, extract_cut, extraction_bound, gadget_edges,
                           maxcut_brute, reduce, verify_reduction)
    from .core import Partition
    from .gcov import cut_objective

    out = []

    def census():
        es = gadget_edges()
        heavy = [e for e in es if e[2] == 4]
        return (len(es) == 18 and len(heavy) == 12 and sum(e[2] for e in es) == 54,
                f"{len(es)} edges, {len(heavy)} of weight 4")

    out.append(_guard("gadget census", census))
    graphs = {
        "single edge": SimpleGraph(["a", "b"], [(0, 1)]),
        "P3": SimpleGraph(["a", "b", "c"], [(0, 1), (1, 2)]),
        "K3": SimpleGraph(["a", "b", "c"], [(0, 1), (1, 2), (0, 2)]),
    }
    for name, G in graphs.items():
        def run(G=G):
            rep = verify_reduction(G)
            return rep.identities_ok, (f"maxcut={rep.maxcut} mwc={fmt_value(rep.mwc_opt)} "
                                       f"gcov={fmt_value(rep.gcov_opt)}")

        out.append(_guard(f"reduction identities on {name}", run))

    rng = make_rng(seed, "reduction-suite")
    G = graphs["K3"]
    R = reduce(G)
    maxcut, _ = maxcut_brute(G)

    def canonical():
        for bits in range(1 << G.n):
            U = {v for v in range(G.n) if bits >> v & 1}
            P = canonical_partition(G, R, U)
            if cut_objective(R.graph, P) > 28 * G.m - G.cut_size(U):
                return False, f"U={sorted(U)}"
        return True, "every cut of K3"

    out.append(_guard("canonical partition from a cut", canonical))

    def extraction():
        for _ in range(partitions):
            labels = rng.integers(0, 3, size=R.graph.n)
            labels[:3] = [0, 1, 2]
            P = Partition(tuple(int(v) for v in labels), 3)
            U = extract_cut(G, R, P)
            if G.cut_size(U) < extraction_bound(G, R, P, maxcut):
                return False, f"labels {labels.tolist()}"
        return True, f"{partitions} random partitions of reduce(K3)"

    out.append(_guard("extracted cut bound", extraction))
    return out


def gcov_suite(seed=0, trials=100_000, pairs=1000, pair_trials=10_000):
    from .exact import brute_force_opt
    from .gcov import (ckr_half_point, ckr_instance, estimate_expected_cost, estimate_sep_prob,
                       gcov_objective_frac, mwc_to_gcov, row_epsilon, separation_bound)
    from .relax import relaxation_objective

    g, t = ckr_instance(3)
    inst = g.instance(t)
    x = ckr_half_point(g, t)
    out = []

    def lp():
        a, b = gcov_objective_frac(g, x), relaxation_objective(inst.oracle, x)
        return a == b == Fraction(45, 2), f"LP={fmt_value(a)} Lovasz={fmt_value(b)}"

    out.append(_guard("CKR half-point LP value", lp))

    def gap():
        P, opt = brute_force_opt(inst)
        mwc_to_gcov(g, t, P)
        return opt / Fraction(45, 2) == Fraction(46, 45), f"OPT={fmt_value(opt)}"

    out.append(_guard("CKR integrality gap 46/45", gap))

    def nine_eighths():
        est = estimate_expected_cost(g, t, x, trials=trials, seed=seed)
        bound = 9 / 8 * 22.5 + 4 * est.stderr
        return est.mean <= bound, f"E={est.mean:.4f} +- {est.stderr:.4f}, bound {bound:.4f}"

    out.append(_guard("exponential clocks within 9/8", nine_eighths))

    def separation():
        rng = make_rng(seed, "gcov-pairs")
        for p in range(pairs):
            k = int(rng.integers(2, 6))
            xu, xv = _random_simplex(rng, k), _random_simplex(rng, k)
            eps = row_epsilon(xu, xv)
            est = estimate_sep_prob(xu, xv, trials=pair_trials, seed=seed * 7919 + p)
            if est.mean > separation_bound(eps) + 4 * est.stderr + 1e-12:
                return False, f"xu={xu.tolist()} xv={xv.tolist()} p={est.mean}"
        return True, f"{pairs} random pairs"

    out.append(_guard("different-labels probability bound", separation))
    return out


SUITES = {"lemmas": lemma_suite, "symgap": symgap_suite, "reduction": reduction_suite, "gcov": gcov_suite}
