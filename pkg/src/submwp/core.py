"""Ground sets, set-function oracles, extensions and exhaustive checkers.

Subsets are passed around as Python int bitmasks (bit ``v`` set iff element
``v`` is in the set). Public entry points also accept any iterable of element
indices. Every oracle evaluates in exact rationals; a float path exists for
the relaxation solver.
"""

from __future__ import annotations

import threading
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Iterable, Sequence

import numpy as np

from ._util import as_fraction, is_exact, lcm_denominators, make_rng
from .errors import CapacityError, DomainError

TABLE_MAX_N = 22
MONOTONE_MAX_N = 20
SUBMODULAR_MAX_N = 16
MULTILINEAR_MAX_N = 20


class GroundSet:
    """An ordered list of distinct element names, indexed 0..n-1."""

    def __init__(self, elements: Iterable):
        names = tuple(str(e) for e in elements)
        if len(set(names)) != len(names):
            raise DomainError("ground set elements must be unique")
        if len(names) > 62:
            raise CapacityError("ground sets above 62 elements are not supported", required=len(names))
        self.elements = names
        self._index = {e: i for i, e in enumerate(names)}

    @property
    def n(self) -> int:
        return len(self.elements)

    def __len__(self):
        return len(self.elements)

    def __iter__(self):
        return iter(self.elements)

    def __eq__(self, other):
        return isinstance(other, GroundSet) and other.elements == self.elements

    def __hash__(self):
        return hash(self.elements)

    def __repr__(self):
        return f"GroundSet({list(self.elements)!r})"

    def index(self, name) -> int:
        try:
            return self._index[str(name)]
        except KeyError:
            raise DomainError(f"element {name!r} not in ground set") from None

    @property
    def full_mask(self) -> int:
        return (1 << self.n) - 1

    def mask(self, S) -> int:
        """Bitmask of ``S`` (an int mask or an iterable of indices)."""
        if isinstance(S, (int, np.integer)) and not isinstance(S, bool):
            S = int(S)
            if S < 0 or S >> self.n:
                raise DomainError(f"mask {S} has bits outside the ground set")
            return S
        m = 0
        for v in S:
            v = int(v)
            if not 0 <= v < self.n:
                raise DomainError(f"element index {v} outside ground set of size {self.n}")
            m |= 1 << v
        return m

    def mask_of_names(self, names) -> int:
        m = 0
        for e in names:
            m |= 1 << self.index(e)
        return m

    def members(self, mask: int) -> list[int]:
        return [v for v in range(self.n) if mask >> v & 1]

    def names(self, mask: int) -> list[str]:
        return [self.elements[v] for v in self.members(mask)]


def _scaled(weights: Sequence[Fraction]):
    """Common denominator and integer numerators; object dtype if int64 could overflow."""
    den = lcm_denominators(weights) if weights else 1
    nums = [int(w * den) for w in weights]
    dtype = np.int64 if sum(abs(x) for x in nums) < 2**62 else object
    return np.array(nums, dtype=dtype), den


class SetFunctionOracle:
    """Base class. Subclasses implement ``_exact(mask)`` and ideally ``_table_nums``."""

    kind = "abstract"
    monotone = True

    def __init__(self, ground: GroundSet):
        self.ground = ground
        self._lock = threading.Lock()
        self._exact_tab = None
        self._float_tab = None

    @property
    def n(self) -> int:
        return self.ground.n

    def _exact(self, mask: int) -> Fraction:
        raise NotImplementedError

    def _float(self, mask: int) -> float:
        return float(self._exact(mask))

    def _table_nums(self, masks: np.ndarray):
        vals = [self._exact(int(m)) for m in masks]
        den = lcm_denominators(vals)
        nums = np.array([int(v * den) for v in vals], dtype=object)
        if len(nums) and max(abs(int(x)) for x in nums) < 2**62:
            nums = nums.astype(np.int64)
        return nums, den

    def value(self, S, exact: bool = True):
        """f(S) as a Fraction (``exact``) or float."""
        mask = self.ground.mask(S)
        if exact:
            return self._exact(mask)
        if self._float_tab is not None:
            return float(self._float_tab[mask])
        return self._float(mask)

    __call__ = value

    def values(self, masks: np.ndarray) -> np.ndarray:
        """Float values for an array of masks, through the table when small."""
        if self.n <= 20:
            return self.float_table()[masks]
        return np.array([self._float(int(m)) for m in masks])

    def exact_table(self):
        """(numerators, denominator) over all 2^n masks, built once."""
        if self.n > TABLE_MAX_N:
            raise CapacityError(f"full table needs n <= {TABLE_MAX_N}, got n={self.n}", required=2**self.n)
        with self._lock:
            if self._exact_tab is None:
                masks = np.arange(1 << self.n, dtype=np.int64)
                self._exact_tab = self._table_nums(masks)
        return self._exact_tab

    def float_table(self) -> np.ndarray:
        nums, den = self.exact_table()
        with self._lock:
            if self._float_tab is None:
                self._float_tab = np.asarray(nums, dtype=np.float64) / den
        return self._float_tab

    def describe(self) -> dict:
        return {"kind": self.kind, "n": self.n}


class ExplicitOracle(SetFunctionOracle):
    """A full value table keyed by mask."""

    kind = "explicit"

    def __init__(self, ground: GroundSet, values: dict, monotone: bool = True):
        super().__init__(ground)
        if ground.n > TABLE_MAX_N:
            raise CapacityError(f"explicit tables need n <= {TABLE_MAX_N}")
        table = {}
        for key, val in values.items():
            table[ground.mask(key)] = as_fraction(val)
        missing = (1 << ground.n) - len(table)
        if missing:
            raise DomainError(f"explicit table is missing {missing} subsets")
        if table[0] != 0:
            raise DomainError("explicit table must satisfy f(empty) = 0")
        neg = [m for m, v in table.items() if v < 0]
        if neg:
            raise DomainError(f"explicit table is negative on {ground.names(neg[0])}")
        self.table = table
        self.monotone = monotone

    def _exact(self, mask):
        return self.table[mask]


class CoverageOracle(SetFunctionOracle):
    """Weighted hypergraph coverage: total weight of hyperedges meeting S."""

    kind = "coverage"

    def __init__(self, ground: GroundSet, hyperedges: Sequence):
        super().__init__(ground)
        masks, weights = [], []
        for members, w in hyperedges:
            w = as_fraction(w)
            if w < 0:
                raise DomainError("coverage weights must be non-negative")
            m = ground.mask(members)
            if m == 0:
                raise DomainError("empty hyperedge")
            masks.append(m)
            weights.append(w)
        self.edge_masks = masks
        self.weights = weights
        self._wf = [float(w) for w in weights]

    def _exact(self, mask):
        return sum((w for m, w in zip(self.edge_masks, self.weights) if m & mask), Fraction(0))

    def _float(self, mask):
        return sum(w for m, w in zip(self.edge_masks, self._wf) if m & mask)

    def _table_nums(self, masks):
        nums, den = _scaled(self.weights)
        out = np.zeros(len(masks), dtype=nums.dtype)
        for m, w in zip(self.edge_masks, nums):
            out += np.where((masks & m) != 0, w, 0).astype(nums.dtype)
        return out, den


class GraphCoverageOracle(CoverageOracle):
    """b(S): weight of edges with at least one endpoint in S (a loop counts once)."""

    kind = "graph_coverage"

    def __init__(self, ground: GroundSet, edges: Sequence):
        self.edges = [(int(u), int(v), as_fraction(w)) for u, v, w in edges]
        super().__init__(ground, [({u, v}, w) for u, v, w in self.edges])


class CutOracle(SetFunctionOracle):
    """d(S): weight of edges with exactly one endpoint in S. Not monotone."""

    kind = "cut"
    monotone = False

    def __init__(self, ground: GroundSet, edges: Sequence):
        super().__init__(ground)
        self.edges = [(int(u), int(v), as_fraction(w)) for u, v, w in edges]
        for u, v, w in self.edges:
            ground.mask([u, v])
            if w < 0:
                raise DomainError("cut weights must be non-negative")

    def _exact(self, mask):
        return sum((w for u, v, w in self.edges if (mask >> u & 1) != (mask >> v & 1)), Fraction(0))

    def _table_nums(self, masks):
        nums, den = _scaled([w for _, _, w in self.edges])
        out = np.zeros(len(masks), dtype=nums.dtype)
        for (u, v, _), w in zip(self.edges, nums):
            out += np.where(((masks >> u) & 1) != ((masks >> v) & 1), w, 0).astype(nums.dtype)
        return out, den


class PartitionMatroidOracle(SetFunctionOracle):
    """Rank of the partition matroid with capacity one per block."""

    kind = "partition_matroid"

    def __init__(self, ground: GroundSet, blocks: Sequence):
        super().__init__(ground)
        self.blocks = [ground.mask(b) for b in blocks]
        seen = 0
        for b in self.blocks:
            if b & seen:
                raise DomainError("partition matroid blocks must be disjoint")
            seen |= b

    def _exact(self, mask):
        return Fraction(sum(1 for b in self.blocks if b & mask))

    def _table_nums(self, masks):
        out = np.zeros(len(masks), dtype=np.int64)
        for b in self.blocks:
            out += (masks & b) != 0
        return out, 1


@dataclass(frozen=True)
class Instance:
    """An oracle plus k distinct terminals; terminal i must end up in part i."""

    oracle: SetFunctionOracle
    terminals: tuple
    name: str = ""

    def __post_init__(self):
        ts = tuple(int(t) for t in self.terminals)
        object.__setattr__(self, "terminals", ts)
        if not 1 <= len(ts) <= self.oracle.n:
            raise DomainError(f"need 1 <= k <= n, got k={len(ts)}, n={self.oracle.n}")
        if len(set(ts)) != len(ts):
            raise DomainError("terminals must be distinct")
        self.oracle.ground.mask(ts)

    @property
    def n(self) -> int:
        return self.oracle.n

    @property
    def k(self) -> int:
        return len(self.terminals)

    @property
    def ground(self) -> GroundSet:
        return self.oracle.ground

    @property
    def free(self) -> tuple:
        ts = set(self.terminals)
        return tuple(v for v in range(self.n) if v not in ts)


@dataclass(frozen=True)
class Partition:
    """Labels in 0..k-1, one per ground element (part ``i`` holds terminal ``i``)."""

    labels: tuple
    k: int = field(default=0)

    def __post_init__(self):
        labs = tuple(int(x) for x in self.labels)
        object.__setattr__(self, "labels", labs)
        if not self.k:
            object.__setattr__(self, "k", max(labs) + 1 if labs else 1)
        if any(not 0 <= x < self.k for x in labs):
            raise DomainError("partition label out of range")

    def parts(self) -> list[int]:
        out = [0] * self.k
        for v, lab in enumerate(self.labels):
            out[lab] |= 1 << v
        return out

    def check(self, instance: Instance) -> "Partition":
        if len(self.labels) != instance.n:
            raise DomainError(f"partition labels {len(self.labels)} elements, instance has {instance.n}")
        if self.k != instance.k:
            raise DomainError(f"partition has {self.k} parts, instance has {instance.k} terminals")
        for i, t in enumerate(instance.terminals):
            if self.labels[t] != i:
                raise DomainError(f"terminal {i} is not in its own part")
        return self

    @classmethod
    def from_parts(cls, parts: Sequence[int], n: int) -> "Partition":
        labels = [-1] * n
        for i, m in enumerate(parts):
            for v in range(n):
                if m >> v & 1:
                    if labels[v] != -1:
                        raise DomainError(f"element {v} lies in two parts")
                    labels[v] = i
        if -1 in labels:
            raise DomainError("parts do not cover the ground set")
        return cls(tuple(labels), len(parts))


def objective(instance: Instance, partition: Partition, exact: bool = True):
    """Sum of f over the parts."""
    partition.check(instance)
    f = instance.oracle
    return sum((f.value(m, exact) for m in partition.parts()), Fraction(0) if exact else 0.0)


def _vector(x, n):
    x = list(x)
    if len(x) != n:
        raise DomainError(f"vector has length {len(x)}, expected {n}")
    return x


def lovasz_ext(oracle: SetFunctionOracle, x, exact: bool | None = None):
    """Lovász extension at ``x`` in [0,1]^V with the closed threshold {v : x_v >= theta}.

    The integrand is piecewise constant between the distinct entries of x, so
    the integral is a finite sum. Exact when every entry is rational.
    """
    x = _vector(x, oracle.n)
    if exact is None:
        exact = is_exact(x)
    if exact:
        x = [as_fraction(v) for v in x]
    for v in x:
        if v < 0 or v > 1:
            raise DomainError("Lovász extension needs 0 <= x <= 1")
    levels = sorted({v for v in x if v > 0}, reverse=True)
    total = Fraction(0) if exact else 0.0
    for r, lev in enumerate(levels):
        nxt = levels[r + 1] if r + 1 < len(levels) else 0
        mask = 0
        for v, xv in enumerate(x):
            if xv >= lev:
                mask |= 1 << v
        total += (lev - nxt) * oracle.value(mask, exact)
    return total


def greedy_order(x) -> list[int]:
    """Indices sorted by decreasing x, ties broken by index."""
    return sorted(range(len(x)), key=lambda v: (-x[v], v))


def lovasz_subgradient(oracle: SetFunctionOracle, x, exact: bool | None = None):
    """Greedy (Edmonds) subgradient of the Lovász extension at x.

    Returns ``(value, g)`` where ``value = g . x`` equals the extension at x.
    """
    x = _vector(x, oracle.n)
    if exact is None:
        exact = is_exact(x)
    zero = Fraction(0) if exact else 0.0
    g = [zero] * oracle.n
    prev, mask = zero, 0
    for v in greedy_order(x):
        mask |= 1 << v
        cur = oracle.value(mask, exact)
        g[v] = cur - prev
        prev = cur
    value = sum((gv * (as_fraction(xv) if exact else xv) for gv, xv in zip(g, x)), zero)
    return value, g


@dataclass(frozen=True)
class Estimate:
    mean: float
    stderr: float
    trials: int


def multilinear_ext(oracle: SetFunctionOracle, x, mode: str = "exact", trials: int = 10_000,
                    seed: int = 0, exact: bool | None = None):
    """Multilinear extension F(x) = E f(R) with R including v independently w.p. x_v.

    ``mode="exact"`` sums over all 2^n subsets (n <= 20; rational when x is
    rational and n <= 16). ``mode="sampled"`` returns an :class:`Estimate`.
    """
    x = _vector(x, oracle.n)
    for v in x:
        if v < 0 or v > 1:
            raise DomainError("multilinear extension needs x in [0,1]^n")
    n = oracle.n
    if mode == "exact":
        if n > MULTILINEAR_MAX_N:
            raise CapacityError(f"exact multilinear extension needs n <= {MULTILINEAR_MAX_N}", required=2**n)
        if exact is None:
            exact = is_exact(x) and n <= 16
        if exact:
            # integer weights over the common denominator D: x_v = a_v / D
            xs = [as_fraction(xv) for xv in x]
            D = lcm_denominators(xs)
            p = np.array([1], dtype=object)
            for xv in xs:
                a = int(xv * D)
                p = np.concatenate([p * (D - a), p * a])
            nums, den = oracle.exact_table()
            return Fraction(int(np.dot(p, np.asarray(nums, dtype=object))), den * D ** n)
        p = np.ones(1)
        for xv in x:
            xv = float(xv)
            p = np.concatenate([p * (1 - xv), p * xv])
        return float(p @ oracle.float_table())
    if mode == "sampled":
        if trials < 1:
            raise DomainError("trials must be positive")
        rng = make_rng(seed, "multilinear")
        xf = np.asarray([float(v) for v in x])
        pow2 = (1 << np.arange(n, dtype=np.int64))
        vals = np.empty(trials)
        step = 1 << 16
        for a in range(0, trials, step):
            b = min(trials, a + step)
            draws = rng.random((b - a, n)) < xf
            vals[a:b] = oracle.values(draws.astype(np.int64) @ pow2)
        se = float(vals.std(ddof=1) / np.sqrt(trials)) if trials > 1 else 0.0
        return Estimate(float(vals.mean()), se, trials)
    raise DomainError(f"unknown mode {mode!r}")


@dataclass(frozen=True)
class CheckResult:
    holds: bool
    witness: dict | None = None

    def __bool__(self):
        return self.holds


def check_nonnegative(oracle: SetFunctionOracle) -> CheckResult:
    if oracle.n > MONOTONE_MAX_N:
        raise CapacityError(f"exhaustive checks need n <= {MONOTONE_MAX_N}")
    nums, _ = oracle.exact_table()
    bad = np.flatnonzero(np.asarray(nums) < 0)
    if len(bad):
        return CheckResult(False, {"S": oracle.ground.names(int(bad[0]))})
    return CheckResult(True)


def check_monotone(oracle: SetFunctionOracle) -> CheckResult:
    """Exhaustive f(S) <= f(S + v) over all S and v not in S."""
    n = oracle.n
    if n > MONOTONE_MAX_N:
        raise CapacityError(f"check_monotone needs n <= {MONOTONE_MAX_N}, got {n}", required=n)
    nums, den = oracle.exact_table()
    masks = np.arange(1 << n, dtype=np.int64)
    for v in range(n):
        base = masks[(masks >> v) & 1 == 0]
        bad = np.flatnonzero(nums[base] > nums[base | (1 << v)])
        if len(bad):
            a = int(base[bad[0]])
            return CheckResult(False, {"A": oracle.ground.names(a), "B": oracle.ground.names(a | 1 << v),
                                       "fA": Fraction(int(nums[a]), den),
                                       "fB": Fraction(int(nums[a | 1 << v]), den)})
    return CheckResult(True)


def check_submodular(oracle: SetFunctionOracle) -> CheckResult:
    """Exhaustive diminishing-returns check via the pairwise local form.

    For every S and distinct i, j outside S: f(S+i) - f(S) >= f(S+j+i) - f(S+j).
    A failure is reported as X=S, Y=S+j and the element i.
    """
    n = oracle.n
    if n > SUBMODULAR_MAX_N:
        raise CapacityError(f"check_submodular needs n <= {SUBMODULAR_MAX_N}, got {n}", required=n)
    nums, den = oracle.exact_table()
    masks = np.arange(1 << n, dtype=np.int64)
    for i in range(n):
        for j in range(i + 1, n):
            base = masks[((masks >> i) & 1 == 0) & ((masks >> j) & 1 == 0)]
            si, sj = base | (1 << i), base | (1 << j)
            lhs = nums[si] + nums[sj]
            rhs = nums[si | sj] + nums[base]
            bad = np.flatnonzero(lhs < rhs)
            if len(bad):
                s = int(base[bad[0]])
                names = oracle.ground.names
                return CheckResult(False, {"X": names(s), "Y": names(s | 1 << j),
                                           "element": oracle.ground.elements[i],
                                           "gain_X": Fraction(int(nums[s | 1 << i]) - int(nums[s]), den),
                                           "gain_Y": Fraction(int(nums[s | 1 << i | 1 << j])
                                                              - int(nums[s | 1 << j]), den)})
    return CheckResult(True)


def check_row_column_type(oracle: SetFunctionOracle, k: int | None = None) -> CheckResult:
    """Decide whether f(A) = sum_i g(A & row_i) + g(A & col_i) for some g.

    Elements are read as grid cells in row-major order. g is recovered from f
    on the empty set, singletons and subsets of single rows/columns, then the
    decomposition is verified on every subset.
    """
    n = oracle.n
    if k is None:
        k = int(round(n ** 0.5))
    if k * k != n:
        raise DomainError("row-column check needs a k x k ground set")
    if n > SUBMODULAR_MAX_N:
        raise CapacityError(f"row-column check needs n <= {SUBMODULAR_MAX_N}")
    nums, den = oracle.exact_table()
    nums = np.asarray(nums, dtype=object)
    cell = lambda r, c: r * k + c
    rows = [[cell(r, c) for c in range(k)] for r in range(k)]
    cols = [[cell(r, c) for r in range(k)] for c in range(k)]
    g0 = Fraction(int(nums[0]), 2 * k)
    single = {}
    for v in range(n):
        single[v] = (Fraction(int(nums[1 << v])) - (2 * k - 2) * g0) / 2

    def g_line(line):
        out = []
        for sub in range(1 << k):
            m = 0
            cells = [line[b] for b in range(k) if sub >> b & 1]
            for v in cells:
                m |= 1 << v
            if not cells:
                out.append(g0)
            elif len(cells) == 1:
                out.append(single[cells[0]])
            else:
                rest = sum((single[v] for v in cells), Fraction(0))
                out.append(Fraction(int(nums[m])) - rest - (2 * k - 1 - len(cells)) * g0)
        return out

    gr = [g_line(line) for line in rows]
    gc = [g_line(line) for line in cols]
    masks = np.arange(1 << n, dtype=np.int64)

    def compress(line):
        idx = np.zeros(len(masks), dtype=np.int64)
        for b, v in enumerate(line):
            idx |= ((masks >> v) & 1) << b
        return idx

    total = np.zeros(len(masks), dtype=object)
    for line, g in zip(rows, gr):
        total = total + np.asarray(g, dtype=object)[compress(line)]
    for line, g in zip(cols, gc):
        total = total + np.asarray(g, dtype=object)[compress(line)]
    bad = np.flatnonzero(total != nums)
    if len(bad):
        s = int(bad[0])
        return CheckResult(False, {"S": oracle.ground.names(s), "f": Fraction(int(nums[s]), den),
                                   "decomposed": total[s] / den})
    return CheckResult(True)


def check_transpose_invariant(oracle: SetFunctionOracle, k: int | None = None) -> CheckResult:
    n = oracle.n
    k = k or int(round(n ** 0.5))
    nums, _ = oracle.exact_table()
    masks = np.arange(1 << n, dtype=np.int64)
    tr = np.zeros_like(masks)
    for r in range(k):
        for c in range(k):
            tr |= ((masks >> (r * k + c)) & 1) << (c * k + r)
    bad = np.flatnonzero(np.asarray(nums)[tr] != np.asarray(nums))
    if len(bad):
        return CheckResult(False, {"S": oracle.ground.names(int(bad[0]))})
    return CheckResult(True)


def truncated_mass(p, delta):
    """Sum_i min(delta, p_i) for a probability vector p."""
    p = list(p)
    exact = is_exact(p) and is_exact([delta])
    if any(v < 0 for v in p):
        raise DomainError("truncated_mass needs p >= 0")
    total = sum(p)
    if (exact and total != 1) or (not exact and abs(total - 1) > 1e-9):
        raise DomainError(f"truncated_mass needs sum(p) = 1, got {total}")
    if not 0 <= delta <= 1:
        raise DomainError("delta must lie in [0, 1]")
    return sum((min(delta, v) for v in p), Fraction(0) if exact else 0.0)
