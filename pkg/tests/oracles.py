"""Slow reference implementations written straight from the definitions.

They share no code paths with the package beyond set-function evaluation
and are used to freeze derived golden values.
"""

import itertools
from fractions import Fraction
from math import lcm


def subsets(n):
    for r in range(n + 1):
        yield from itertools.combinations(range(n), r)


def f_of(oracle, elems):
    return oracle.value(set(elems))


def naive_opt(instance):
    """(labels, value) by trying every labeling of the non-terminals."""
    f, n, k = instance.oracle, instance.n, instance.k
    free = [v for v in range(n) if v not in instance.terminals]
    best = None
    for combo in itertools.product(range(k), repeat=len(free)):
        lab = [0] * n
        for i, t in enumerate(instance.terminals):
            lab[t] = i
        for v, c in zip(free, combo):
            lab[v] = c
        val = sum(f_of(f, [v for v in range(n) if lab[v] == i]) for i in range(k))
        if best is None or val < best[1]:
            best = (tuple(lab), val)
    return best


def naive_lovasz(oracle, x):
    """Integral of f({v : x_v >= t}) over t in [0, 1] using the distinct levels."""
    x = [Fraction(v) for v in x]
    levels = sorted(set(x) | {Fraction(0)}, reverse=True)
    total = Fraction(0)
    for hi, lo in zip(levels, levels[1:] + [None]):
        if lo is None:
            break
        total += (hi - lo) * f_of(oracle, [v for v in range(len(x)) if x[v] >= hi])
    return total


def naive_multilinear(oracle, x):
    x = [Fraction(v) for v in x]
    total = Fraction(0)
    for S in subsets(len(x)):
        p = Fraction(1)
        for v in range(len(x)):
            p *= x[v] if v in S else 1 - x[v]
        total += p * f_of(oracle, S)
    return total


def naive_round_cost(instance, rows, theta, sink=None):
    """Cost of threshold rounding at theta, lowest-index uncrossing, leftovers to ``sink``."""
    n, k = instance.n, instance.k
    sink = k - 1 if sink is None else sink
    lab = []
    for v in range(n):
        hits = [i for i in range(k) if rows[v][i] >= theta]
        lab.append(hits[0] if hits else sink)
    return sum(f_of(instance.oracle, [v for v in range(n) if lab[v] == i]) for i in range(k))


def naive_expected_cost(instance, rows, a, b):
    """Exact expectation for theta ~ U[a, b] by midpoints of a grid fine enough
    that the cost is constant on each cell."""
    rows = [[Fraction(v) for v in r] for r in rows]
    a, b = Fraction(a), Fraction(b)
    D = lcm(*(v.denominator for r in rows for v in r), a.denominator, b.denominator)
    total = Fraction(0)
    m = 0
    lo = a
    while lo < b:
        hi = lo + Fraction(1, D)
        total += Fraction(1, D) * naive_round_cost(instance, rows, (lo + hi) / 2)
        lo = hi
        m += 1
    return total / (b - a)


def grid_f(k, S):
    """Row-column function of the grid instance, from its defining formulas."""
    def phi_n(a):
        return min(Fraction(a), Fraction(7 * k, 8))

    def phi_t(a):
        return min(Fraction(3 * k * a, 8), Fraction(3 * k, 8) + a - 1, Fraction(7 * k, 8))

    def g(T):
        if not T:
            return Fraction(0)
        return phi_t(len(T)) if any(i == j for i, j in T) else phi_n(len(T))

    S = set(S)
    return sum(g({c for c in S if c[0] == i}) + g({c for c in S if c[1] == i}) for i in range(1, k + 1))


def naive_sym_opt(k):
    """Best symmetric partition of the grid instance by trying every pair labeling."""
    pairs = [(i, j) for i in range(1, k + 1) for j in range(i + 1, k + 1)]
    best = None
    for combo in itertools.product(range(1, k + 1), repeat=len(pairs)):
        parts = {ell: {(ell, ell)} for ell in range(1, k + 1)}
        for (i, j), ell in zip(pairs, combo):
            parts[ell].update({(i, j), (j, i)})
        val = sum(grid_f(k, p) for p in parts.values())
        if best is None or val < best:
            best = val
    return best


def naive_maxcut(n, edges):
    best = 0
    for bits in range(1 << n):
        best = max(best, sum(1 for u, v in edges if (bits >> u & 1) != (bits >> v & 1)))
    return best


def naive_multiway_cut(n, edges, terminals):
    """Minimum weight of edges between parts, over labelings of the non-terminals."""
    k = len(terminals)
    free = [v for v in range(n) if v not in terminals]
    best = None
    for combo in itertools.product(range(k), repeat=len(free)):
        lab = [0] * n
        for i, t in enumerate(terminals):
            lab[t] = i
        for v, c in zip(free, combo):
            lab[v] = c
        val = sum(w for u, v, w in edges if lab[u] != lab[v])
        if best is None or val < best:
            best = val
    return best
