"""The row-column-type instance on the k x k grid with a 10/9 symmetry gap.

Cells are (i, j) with 1 <= i, j <= k and parts are numbered 1..k; cell
(i, j) has ground index (i-1) k + (j-1) and terminal i is the diagonal cell
(i, i). A symmetric partition keeps each pair {(i,j), (j,i)} together and
the diagonal cell (i, i) in part i.

Internally a partition is a k x k integer board ``L`` with ``L[i-1, j-1]``
equal to the (0-based) part of cell (i, j).
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from typing import Iterable

import numpy as np

from ._util import make_rng
from .core import GroundSet, Instance, Partition, SetFunctionOracle
from .errors import DomainError, VerificationError


class SymInstance:
    """f(S) = sum_i g(S & row_i) + g(S & col_i), where g(T) is phi_t(|T|) when T
    meets the diagonal and phi_n(|T|) otherwise, with

        phi_n(a) = min(a, 7k/8)
        phi_t(a) = min(3ka/8, 3k/8 + a - 1, 7k/8).
    """

    def __init__(self, k: int):
        if k < 3:
            raise DomainError("the grid instance needs k >= 3")
        self.k = int(k)
        self.bounds_apply = k >= 4

    def __repr__(self):
        return f"SymInstance(k={self.k})"

    # values scaled by 8 are integers
    def phi_n8(self, a):
        return np.minimum(8 * np.asarray(a), 7 * self.k)

    def phi_t8(self, a):
        a = np.asarray(a)
        k = self.k
        return np.minimum(np.minimum(3 * k * a, 3 * k + 8 * a - 8), 7 * k)

    def phi_n(self, a) -> Fraction:
        return Fraction(int(self.phi_n8(a)), 8)

    def phi_t(self, a) -> Fraction:
        return Fraction(int(self.phi_t8(a)), 8)

    def g(self, cells) -> Fraction:
        cells = list(cells)
        if not cells:
            return Fraction(0)
        if any(i == j for i, j in cells):
            return self.phi_t(len(cells))
        return self.phi_n(len(cells))

    def cell(self, i: int, j: int) -> int:
        if not (1 <= i <= self.k and 1 <= j <= self.k):
            raise DomainError(f"cell ({i}, {j}) is off the {self.k} x {self.k} grid")
        return (i - 1) * self.k + (j - 1)

    def row(self, i: int) -> set:
        return {(i, j) for j in range(1, self.k + 1)}

    def col(self, j: int) -> set:
        return {(i, j) for i in range(1, self.k + 1)}

    def ground(self) -> GroundSet:
        return GroundSet([f"({i},{j})" for i in range(1, self.k + 1) for j in range(1, self.k + 1)])

    def oracle(self) -> "SymOracle":
        return SymOracle(self)

    def instance(self) -> Instance:
        terms = tuple(self.cell(i, i) for i in range(1, self.k + 1))
        return Instance(self.oracle(), terms, name=f"symgap({self.k})")


class SymOracle(SetFunctionOracle):
    kind = "symgap"

    def __init__(self, sym: SymInstance):
        super().__init__(sym.ground())
        self.sym = sym

    def _cells(self, mask):
        k = self.sym.k
        return {(v // k + 1, v % k + 1) for v in range(k * k) if mask >> v & 1}

    def _exact(self, mask):
        return sym_eval(self.sym, self._cells(mask))

    def _table_nums(self, masks):
        k = self.sym.k
        bit = lambda i, j: (masks >> ((i - 1) * k + (j - 1))) & 1
        out = np.zeros(len(masks), dtype=np.int64)
        for i in range(1, k + 1):
            rc = sum(bit(i, j) for j in range(1, k + 1))
            cc = sum(bit(j, i) for j in range(1, k + 1))
            d = bit(i, i) == 1
            for cnt in (rc, cc):
                out += np.where(d, self.sym.phi_t8(cnt), self.sym.phi_n8(cnt))
        return out, 8

    def describe(self):
        return {"kind": "symgap", "k": self.sym.k}


def sym_eval(sym: SymInstance, S: Iterable) -> Fraction:
    """Exact f(S) for a set of 1-based cells."""
    S = set((int(i), int(j)) for i, j in S)
    for i, j in S:
        sym.cell(i, j)
    total = Fraction(0)
    for i in range(1, sym.k + 1):
        total += sym.g(S & sym.row(i)) + sym.g(S & sym.col(i))
    return total


class SymPartition:
    """A symmetric multiway partition of the grid (see module docstring)."""

    def __init__(self, board, check: bool = True):
        self.L = np.array(board, dtype=np.int64)
        if check:
            self.validate()

    @property
    def k(self) -> int:
        return self.L.shape[0]

    def validate(self) -> "SymPartition":
        L, k = self.L, self.L.shape[0]
        if L.shape != (k, k):
            raise DomainError("board must be square")
        if np.any((L < 0) | (L >= k)):
            raise DomainError("board labels out of range")
        if not np.array_equal(L, L.T):
            raise DomainError("partition is not transpose-symmetric")
        if not np.array_equal(np.diag(L), np.arange(k)):
            raise DomainError("diagonal cell (i, i) must be in part i")
        return self

    def part(self, i: int, j: int) -> int:
        return int(self.L[i - 1, j - 1]) + 1

    def parts(self) -> list[set]:
        k = self.k
        out = [set() for _ in range(k)]
        for a in range(k):
            for b in range(k):
                out[self.L[a, b]].add((a + 1, b + 1))
        return out

    def row_counts(self) -> np.ndarray:
        """c[i-1, l-1] = |R_i & P_l|."""
        k = self.k
        return (self.L[:, :, None] == np.arange(k)).sum(axis=1)

    def to_partition(self) -> Partition:
        return Partition(tuple(int(v) for v in self.L.ravel()), self.k)

    def copy(self) -> "SymPartition":
        return SymPartition(self.L.copy(), check=False)

    def __eq__(self, other):
        return isinstance(other, SymPartition) and np.array_equal(self.L, other.L)

    @classmethod
    def from_parts(cls, k: int, parts: dict) -> "SymPartition":
        """Build from {part: cells}; cells missing from ``parts`` fall into part 1."""
        L = np.zeros((k, k), dtype=np.int64)
        np.fill_diagonal(L, np.arange(k))
        for ell, cells in parts.items():
            for i, j in cells:
                L[i - 1, j - 1] = ell - 1
        return cls(L)

    @classmethod
    def from_pairs(cls, k: int, labels: dict) -> "SymPartition":
        """Build from {(i, j): part} over pairs i < j (1-based)."""
        L = np.zeros((k, k), dtype=np.int64)
        np.fill_diagonal(L, np.arange(k))
        for (i, j), ell in labels.items():
            L[i - 1, j - 1] = L[j - 1, i - 1] = ell - 1
        return cls(L)

    @classmethod
    def random(cls, k: int, rng: np.random.Generator) -> "SymPartition":
        L = np.zeros((k, k), dtype=np.int64)
        iu = np.triu_indices(k, 1)
        L[iu] = rng.integers(0, k, size=len(iu[0]))
        L = L + L.T
        np.fill_diagonal(L, np.arange(k))
        return cls(L, check=False)


def _obj8(sym: SymInstance, L: np.ndarray) -> int:
    """8 * obj, with obj = (1/2) sum_l f(P_l) = sum_i [phi_t(|R_i & P_i|) + sum_{l != i} phi_n(|R_i & P_l|)]."""
    k = L.shape[0]
    c = (L[:, :, None] == np.arange(k)).sum(axis=1)
    diag = np.diag(c)
    off = c.copy()
    np.fill_diagonal(off, 0)
    return int(sym.phi_t8(diag).sum() + sym.phi_n8(off).sum())


def sym_objective(sym: SymInstance, P: SymPartition) -> Fraction:
    """sum_l f(P_l) from row counts (uses the symmetry of P)."""
    return Fraction(2 * _obj8(sym, P.L), 8)


def sym_objective_direct(sym: SymInstance, P: SymPartition) -> Fraction:
    """sum_l f(P_l) by evaluating every part."""
    return sum((sym_eval(sym, part) for part in P.parts()), Fraction(0))


def row_partition_value(sym: SymInstance) -> Fraction:
    return sum((sym_eval(sym, sym.row(i)) for i in range(1, sym.k + 1)), Fraction(0))


def opt_upper_partition(sym: SymInstance):
    """Part i = row i. Returns (Partition, value) and checks value = (9k^2 - 4k)/4."""
    k = sym.k
    labels = tuple(v // k for v in range(k * k))
    value = row_partition_value(sym)
    if value != Fraction(9 * k * k - 4 * k, 4):
        raise VerificationError(f"row partition value {value} differs from (9k^2-4k)/4")
    return Partition(labels, k), value


def structured_value(sym: SymInstance, i_star: int) -> Fraction:
    """sum_l f(Q_l) of the canonical structured partition with threshold i_star."""
    k = sym.k
    if not 1 <= i_star <= k:
        raise DomainError("i_star must lie in 1..k")
    obj = Fraction(0)
    for i in range(1, i_star + 1):
        obj += sym.phi_t(k + 1 - i) + (i - 1)
    obj += (k - i_star) * (Fraction(3 * k, 8) + sym.phi_n(k - i_star) + i_star - 1)
    return 2 * obj


def structured_partition(sym: SymInstance, i_star: int) -> SymPartition:
    """Pair {(i,j),(j,i)} with i < j goes to part i if i <= i_star, else to part 1."""
    k = sym.k
    if not 1 <= i_star <= k:
        raise DomainError("i_star must lie in 1..k")
    L = np.zeros((k, k), dtype=np.int64)
    for a in range(k):
        for b in range(a, k):
            ell = a if a + 1 <= i_star else 0
            if a == b:
                ell = a
            L[a, b] = L[b, a] = ell
    return SymPartition(L)


def min_structured_value(sym: SymInstance):
    vals = [(structured_value(sym, s), s) for s in range(1, sym.k + 1)]
    return min(vals)


def structured_lower_bound(k: int) -> Fraction:
    return Fraction(10 * k * k - 6 * k - 1, 4)


def sym_lower_bound(k: int) -> Fraction:
    return Fraction(10 * k * k - 14 * k - 1, 4)


def opt_upper_bound(k: int) -> Fraction:
    return Fraction(9 * k * k - 4 * k, 4)


def unhappy_set(P: SymPartition) -> set:
    """Cells (i, j) in a part other than i and j."""
    L, k = P.L, P.k
    out = set()
    for a in range(k):
        for b in range(k):
            if L[a, b] != a and L[a, b] != b:
                out.add((a + 1, b + 1))
    return out


def _pi(k: int, i: int) -> np.ndarray:
    """0-based permutation exchanging i-1 and i (1-based)."""
    p = np.arange(k)
    p[i - 2], p[i - 1] = i - 1, i - 2
    return p


def _swap(L: np.ndarray, i: int) -> np.ndarray:
    p = _pi(L.shape[0], i)
    return p[L[np.ix_(p, p)]]


def swap(P: SymPartition, i: int) -> SymPartition:
    """Relabel cells and parts by the transposition of i-1 and i (2 <= i <= k)."""
    if not 2 <= i <= P.k:
        raise DomainError("swap index must lie in 2..k")
    return SymPartition(_swap(P.L, i), check=False)


def move_pair(P: SymPartition, i: int, j: int) -> SymPartition:
    """Move {(i,j), (j,i)} from part i to part j."""
    L = P.L.copy()
    if L[i - 1, j - 1] != i - 1 or i == j:
        raise DomainError(f"cell ({i}, {j}) is not in part {i}")
    L[i - 1, j - 1] = L[j - 1, i - 1] = j - 1
    return SymPartition(L, check=False)


@dataclass(frozen=True)
class StructureTag:
    i_star: int | None
    structured: bool


def structure_tag(P: SymPartition) -> StructureTag:
    """Largest i* with the upper tail of row i in part i for i <= i* and in part 1 beyond."""
    L, k = P.L, P.k
    own = [bool(np.all(L[a, a + 1:] == a)) for a in range(k)]
    one = [bool(np.all(L[a, a + 1:] == 0)) for a in range(k)]
    for s in range(k, 0, -1):
        if all(own[:s]) and all(one[s:]):
            return StructureTag(s, True)
    return StructureTag(None, False)


class _Pipeline:
    """Mutable board plus bookkeeping for the structuring claims."""

    def __init__(self, sym: SymInstance, L: np.ndarray, stage_cap: int | None = None):
        self.sym = sym
        self.k = L.shape[0]
        self.L = L.copy()
        self.stages = 0
        self.cap = stage_cap if stage_cap is not None else self.k ** 3
        self.log = []

    def obj8(self):
        return _obj8(self.sym, self.L)

    def tick(self, what):
        self.stages += 1
        self.log.append(what)
        if self.stages > self.cap:
            raise VerificationError(f"structuring exceeded its stage cap of {self.cap}")

    def d(self, i):
        """|R_i & P_i| for 1-based i."""
        return int(np.count_nonzero(self.L[i - 1] == i - 1))

    def check(self, cond, msg):
        if not cond:
            raise VerificationError(f"structuring invariant failed: {msg}")

    # predicates, 1-based rows
    def row1_in_part1(self):
        return bool(np.all(self.L[0] == 0))

    def unhappy_in_part1(self):
        L, k = self.L, self.k
        a, b = np.indices((k, k))
        bad = (L != a) & (L != b) & (L != 0)
        return not bool(bad.any())

    def left_empty(self, i):
        return not bool(np.any(self.L[i - 1, : i - 1] == i - 1))

    def right_in(self, i):
        tail = self.L[i - 1, i:]
        return bool(np.all((tail == 0) | (tail == i - 1)))

    def move_pair(self, i, j):
        before = self.obj8()
        self.check(self.L[i - 1, j - 1] == i - 1 and self.d(j) >= self.d(i), f"move_pair({i},{j}) hypotheses")
        self.L[i - 1, j - 1] = self.L[j - 1, i - 1] = j - 1
        self.check(self.obj8() <= before, f"move_pair({i},{j}) increased the objective")

    def swap(self, i):
        before = self.obj8()
        self.L = _swap(self.L, i)
        self.check(self.obj8() == before, f"swap_{i} changed the objective")

    def move_first_row(self):
        self.L[0, :] = 0
        self.L[:, 0] = 0

    def move_unhappy(self):
        k = self.k
        a, b = np.indices((k, k))
        self.L[(self.L != a) & (self.L != b)] = 0

    def induction_size(self, i):
        """Make |R_{i-1} & P_{i-1}| >= |R_i & P_i| while keeping rows i.. sorted."""
        if i == self.k + 1:
            return
        while self.d(i - 1) < self.d(i):
            self.tick(("size", i))
            grow = self.d(i)
            if self.L[i - 2, i - 1] == i - 2:
                self.move_pair(i - 1, i)
            self.swap(i)
            self.induction_size(i + 1)
            self.check(self.d(i) > grow or self.d(i - 1) >= self.d(i), "size potential did not grow")

    def induction_containment(self, i):
        """Move the smallest of rows 1..i-2 to position i-2 and empty its left part."""
        if i == 3:
            return
        self.tick(("containment", i))
        sizes = [self.d(ell) for ell in range(1, i - 1)]
        j = max(ell for ell in range(1, i - 1) if sizes[ell - 1] == min(sizes))
        self.check(j >= 2, "row 1 cannot be the smallest")
        for s in range(j + 1, i - 1):
            self.swap(s)
        r = i - 2
        for ell in range(1, r):
            if self.L[r - 1, ell - 1] == r - 1:
                self.move_pair(r, ell)

    def partial_structure(self):
        k = self.k
        # base step: containment at i = k+2 empties the left part of row k
        self.induction_containment(k + 2)
        self.check(self.left_empty(k), "left part of row k not empty after base step")
        for i in range(k + 1, 2, -1):
            before = self.obj8()
            self.induction_size(i)
            self.induction_containment(i)
            self.check(self.obj8() <= before, f"induction step {i} increased the objective")
            for ell in range(max(i - 2, 1), k + 1):
                self.check(self.left_empty(ell), f"left part of row {ell} not empty (step {i})")
                self.check(self.right_in(ell), f"right part of row {ell} escapes parts 1 and {ell} (step {i})")
            sizes = [self.d(ell) for ell in range(i - 1, k + 1)]
            self.check(all(a >= b for a, b in zip(sizes, sizes[1:])), f"rows {i - 1}.. not sorted (step {i})")
        self.check(self.row1_in_part1(), "row 1 left part 1")
        sizes = [self.d(ell) for ell in range(1, k + 1)]
        self.check(all(a >= b for a, b in zip(sizes, sizes[1:])), "row sizes not sorted")

    def _tail_to(self, j, part):
        self.L[j - 1, j:] = part
        self.L[j:, j - 1] = part

    def final_structure(self):
        """Send each upper tail wholly to its own part (large rows) or to part 1 (small rows)."""
        k = self.k
        sizes = [self.d(ell) for ell in range(1, k + 1)]
        big = [2 * s >= k + 4 for s in sizes]
        small = [2 * s <= k + 2 for s in sizes]
        a = max(j for j in range(1, k + 1) if big[j - 1])
        b = a
        while b < k and not small[b]:
            b += 1
        before = self.obj8()
        best = None
        for cut in range(a, b + 1):
            trial = _Pipeline(self.sym, self.L, self.cap)
            for j in range(1, cut + 1):
                o = trial.obj8()
                trial._tail_to(j, j - 1)
                if big[j - 1]:
                    trial.check(trial.obj8() <= o, f"move_to_{j} increased the objective")
            for j in range(cut + 1, k + 1):
                o = trial.obj8()
                trial._tail_to(j, 0)
                if small[j - 1]:
                    trial.check(trial.obj8() <= o, f"move_to_1 on row {j} increased the objective")
            val = trial.obj8()
            if best is None or val < best[0]:
                best = (val, cut, trial.L)
        self.check(best[0] <= before, "final structuring increased the objective")
        self.L = best[2]
        return best[1]


def structure_partition(sym: SymInstance, P: SymPartition, stage_cap: int | None = None):
    """Turn a symmetric partition into a structured one at additive cost at most 2k in sum f.

    Stages: put row/column 1 into part 1; send unhappy cells to part 1; sort
    and clean rows from the bottom with swaps and pair moves; finally move
    every upper tail to its own part or to part 1. Objective bounds are
    asserted after every stage.
    """
    k = sym.k
    if k < 4:
        raise DomainError("structuring needs k >= 4")
    if P.k != k:
        raise DomainError("partition size does not match the instance")
    w = _Pipeline(sym, P.L, stage_cap)
    start = w.obj8()
    w.move_first_row()
    w.check(w.obj8() <= start + 8 * k, "moving row 1 cost more than k")
    after_first = w.obj8()
    w.move_unhappy()
    w.check(w.obj8() <= after_first, "moving unhappy cells increased the objective")
    w.check(w.row1_in_part1() and w.unhappy_in_part1(), "row 1 / unhappy cells not in part 1")
    w.partial_structure()
    w.final_structure()
    Q = SymPartition(w.L)
    tag = structure_tag(Q)
    w.check(tag.structured, "result is not structured")
    w.check(sym_objective(sym, Q) <= sym_objective(sym, P) + 2 * k, "sum f grew by more than 2k")
    return Q, tag


@dataclass(frozen=True)
class GapReport:
    k: int
    opt: Fraction
    opt_sym: Fraction
    gap: Fraction
    checks: dict

    @property
    def ok(self) -> bool:
        return all(self.checks.values())


def symmetry_gap(sym: SymInstance, budget: int | None = None, jobs=None) -> GapReport:
    """Brute-force OPT and OPT_Sym; at k >= 4 also checks the two bounds."""
    from .exact import DEFAULT_BUDGET, brute_force_opt, brute_force_sym_opt

    budget = budget or DEFAULT_BUDGET
    _, opt = brute_force_opt(sym.instance(), budget=budget, jobs=jobs)
    _, opt_sym = brute_force_sym_opt(sym, budget=budget)
    checks = {"opt_sym >= opt": opt_sym >= opt}
    if sym.bounds_apply:
        checks["opt <= (9k^2-4k)/4"] = opt <= opt_upper_bound(sym.k)
        checks["opt_sym >= (10k^2-14k-1)/4"] = opt_sym >= sym_lower_bound(sym.k)
    return GapReport(sym.k, opt, opt_sym, opt_sym / opt, checks)


# Samplers for the multilinear relaxation on the grid.

def independent_rounding(x: np.ndarray, rng: np.random.Generator, trials: int) -> np.ndarray:
    """Labels (trials x n): each cell independently gets part l with probability x[cell, l]."""
    x = np.asarray(x, dtype=np.float64)
    z = np.cumsum(x, axis=1)
    z[:, -1] = 1.0
    theta = rng.random((trials, x.shape[0]))
    return (theta[:, :, None] >= z[None, :, :]).sum(axis=2)


def symmetric_rounding(sym: SymInstance, y: np.ndarray, rng: np.random.Generator, trials: int) -> np.ndarray:
    """Labels (trials x n): each pair {(i,j),(j,i)} draws one shared part from y's row
    for (i, j); diagonal cells draw on their own."""
    k = sym.k
    y = np.asarray(y, dtype=np.float64)
    z = np.cumsum(y, axis=1)
    z[:, -1] = 1.0
    labels = np.empty((trials, k * k), dtype=np.int64)
    for i in range(1, k + 1):
        d = sym.cell(i, i)
        labels[:, d] = (rng.random(trials)[:, None] >= z[d][None, :]).sum(axis=1)
        for j in range(i + 1, k + 1):
            a, b = sym.cell(i, j), sym.cell(j, i)
            theta = rng.random(trials)
            lab = (theta[:, None] >= z[a][None, :]).sum(axis=1)
            labels[:, a] = lab
            labels[:, b] = lab
    return labels


def partition_costs(oracle: SetFunctionOracle, labels: np.ndarray, k: int) -> np.ndarray:
    """sum_l f(V_l) for each row of a (trials x n) label matrix."""
    pow2 = 1 << np.arange(labels.shape[1], dtype=np.int64)
    table = oracle.float_table()
    total = np.zeros(labels.shape[0])
    for ell in range(k):
        total += table[(labels == ell).astype(np.int64) @ pow2]
    return total


def is_symmetric_point(sym: SymInstance, y) -> bool:
    k = sym.k
    y = np.asarray(y)
    return all(np.allclose(y[sym.cell(i, j)], y[sym.cell(j, i)]) for i in range(1, k + 1) for j in range(1, k + 1))


def sampler_check(sym: SymInstance, x, trials: int, seed: int, symmetric: bool):
    """(mean, stderr, multilinear sum) for one sampler at the fractional point x."""
    from .core import multilinear_ext

    rng = make_rng(seed, "sym-sampler", int(symmetric))
    oracle = sym.oracle()
    if symmetric:
        if not is_symmetric_point(sym, x):
            raise DomainError("symmetric rounding needs a transpose-symmetric point")
        labels = symmetric_rounding(sym, x, rng, trials)
    else:
        labels = independent_rounding(x, rng, trials)
    costs = partition_costs(oracle, labels, sym.k)
    target = sum(multilinear_ext(oracle, [float(v) for v in np.asarray(x)[:, ell]], exact=False)
                 for ell in range(sym.k))
    return float(costs.mean()), float(costs.std(ddof=1) / np.sqrt(trials)), float(target)
