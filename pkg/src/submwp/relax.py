"""Convex relaxation: fractional assignments, the projected subgradient solver,
and exact threshold-set integrals.

A fractional assignment is an n x k matrix whose rows lie in the probability
simplex, with terminal ``i``'s row pinned to the unit vector e_i. Its cost is
the sum over columns of the Lovász extension.
"""

from __future__ import annotations

import math
import warnings
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Sequence

import numpy as np

from ._util import as_fraction, is_exact, make_rng
from .core import Instance, Partition, SetFunctionOracle, lovasz_ext
from .errors import DomainError, NumericError, VerificationError

FLOAT_TOL = 1e-9


class FractionalAssignment:
    """Rows in the simplex, terminal rows pinned.

    Stored as a float64 array, or as an object array of Fractions when
    ``exact`` (every entry rational).
    """

    def __init__(self, x, terminals: Sequence[int], exact: bool | None = None, check: bool = True):
        rows = [list(r) for r in x]
        if exact is None:
            exact = all(is_exact(r) for r in rows)
        if exact:
            self.x = np.array([[as_fraction(v) for v in r] for r in rows], dtype=object)
        else:
            self.x = np.array(rows, dtype=np.float64)
        if self.x.ndim != 2:
            raise DomainError("assignment must be a 2-d matrix")
        self.exact = bool(exact)
        self.terminals = tuple(int(t) for t in terminals)
        if check:
            self.validate()

    @property
    def n(self) -> int:
        return self.x.shape[0]

    @property
    def k(self) -> int:
        return self.x.shape[1]

    def validate(self, tol: float = FLOAT_TOL) -> "FractionalAssignment":
        if len(self.terminals) != self.k:
            raise DomainError(f"{self.k} columns but {len(self.terminals)} terminals")
        for v in range(self.n):
            row = self.x[v]
            if self.exact:
                ok = all(e >= 0 for e in row) and sum(row) == 1
            else:
                ok = bool(np.all(row >= -tol)) and abs(float(row.sum()) - 1) <= tol
            if not ok:
                raise DomainError(f"row {v} is not in the simplex")
        for i, t in enumerate(self.terminals):
            if self.x[t, i] != 1:
                raise DomainError(f"terminal row {t} is not pinned to part {i}")
        return self

    def column(self, i: int) -> list:
        return list(self.x[:, i])

    def alphas(self) -> list:
        """alpha_v = max_i x(v, i)."""
        return [max(self.x[v]) for v in range(self.n)]

    def rationalize(self, max_denominator: int = 10**6) -> "FractionalAssignment":
        """Snap entries to nearby rationals, keeping every row exactly on the simplex."""
        if self.exact:
            return self
        rows = []
        pinned = dict(zip(self.terminals, range(self.k)))
        for v in range(self.n):
            if v in pinned:
                rows.append([Fraction(int(i == pinned[v])) for i in range(self.k)])
                continue
            r = [max(Fraction(0), Fraction(float(e)).limit_denominator(max_denominator)) for e in self.x[v]]
            top = max(range(self.k), key=lambda i: r[i])
            r[top] += 1 - sum(r)
            if r[top] < 0:
                raise NumericError(f"cannot rationalize row {v}")
            rows.append(r)
        return FractionalAssignment(rows, self.terminals, exact=True)

    def as_float(self) -> np.ndarray:
        return np.asarray(self.x, dtype=np.float64)

    def tolist(self) -> list:
        return [list(r) for r in self.x]

    @classmethod
    def uniform(cls, instance: Instance) -> "FractionalAssignment":
        k = instance.k
        rows = [[Fraction(1, k)] * k for _ in range(instance.n)]
        for i, t in enumerate(instance.terminals):
            rows[t] = [Fraction(int(j == i)) for j in range(k)]
        return cls(rows, instance.terminals, exact=True)

    @classmethod
    def from_partition(cls, partition: Partition, terminals) -> "FractionalAssignment":
        rows = [[Fraction(int(j == lab)) for j in range(partition.k)] for lab in partition.labels]
        return cls(rows, terminals, exact=True)


def relaxation_objective(oracle: SetFunctionOracle, x: FractionalAssignment):
    """Sum over parts i of the Lovász extension of column i."""
    zero = Fraction(0) if x.exact else 0.0
    return sum((lovasz_ext(oracle, x.column(i), exact=x.exact) for i in range(x.k)), zero)


def project_simplex_rows(Y: np.ndarray) -> np.ndarray:
    """Euclidean projection of each row of Y onto the probability simplex (sort-based)."""
    Y = np.atleast_2d(np.asarray(Y, dtype=np.float64))
    m, k = Y.shape
    U = -np.sort(-Y, axis=1)
    css = np.cumsum(U, axis=1) - 1.0
    ind = np.arange(1, k + 1)
    cond = U - css / ind > 0
    rho = k - 1 - np.argmax(cond[:, ::-1], axis=1)
    theta = css[np.arange(m), rho] / (rho + 1)
    return np.maximum(Y - theta[:, None], 0.0)


@dataclass
class SolverConfig:
    max_iters: int = 20_000
    step_scale: float | None = None
    tol: float = 1e-9
    window: int = 200
    seed: int = 0
    init: str = "uniform"


@dataclass
class SolveReport:
    objective: float
    iterations: int
    best_x: FractionalAssignment
    gap_estimate: float | None = None
    converged: bool = True
    history: list = field(default_factory=list, repr=False)


class _ColumnEvaluator:
    """Float Lovász value and greedy subgradient for one column at a time."""

    def __init__(self, oracle: SetFunctionOracle):
        self.oracle = oracle
        self.n = oracle.n
        self.table = oracle.float_table() if oracle.n <= 20 else None
        self.idx = np.arange(self.n)
        self.bits = np.left_shift(np.int64(1), self.idx.astype(np.int64))

    def __call__(self, xc: np.ndarray):
        order = np.lexsort((self.idx, -xc))
        prefix = np.bitwise_or.accumulate(self.bits[order])
        vals = self.table[prefix] if self.table is not None else self.oracle.values(prefix)
        if not np.all(np.isfinite(vals)):
            raise NumericError("oracle returned a non-finite value")
        g = np.empty(self.n)
        g[order] = np.diff(vals, prepend=0.0)
        return float(g @ xc), g


def solve_relaxation(instance: Instance, config: SolverConfig | None = None, **kw) -> SolveReport:
    """Projected subgradient descent on the sum of column Lovász extensions.

    Step t moves along the normalised subgradient by ``c / sqrt(t)``; free rows
    are projected back onto the simplex, terminal rows stay pinned. Stops when
    the best objective improves by less than ``tol`` (relative) over
    ``window`` iterations, or after ``max_iters``.
    """
    cfg = config or SolverConfig()
    for key, val in kw.items():
        setattr(cfg, key, val)
    oracle, n, k = instance.oracle, instance.n, instance.k
    free = np.array(instance.free, dtype=np.int64)
    ev = _ColumnEvaluator(oracle)

    x = np.zeros((n, k))
    for i, t in enumerate(instance.terminals):
        x[t, i] = 1.0
    if len(free):
        if cfg.init == "random":
            rng = make_rng(cfg.seed, "relax-init")
            x[free] = project_simplex_rows(rng.random((len(free), k)))
        elif cfg.init == "uniform":
            x[free] = 1.0 / k
        else:
            raise DomainError(f"unknown init {cfg.init!r}")

    def evaluate(x):
        G = np.empty_like(x)
        total = 0.0
        for i in range(k):
            val, G[:, i] = ev(x[:, i])
            total += val
        return total, G

    obj, G = evaluate(x)
    best, best_x = obj, x.copy()
    history = [best]
    if len(free) == 0:
        fa = FractionalAssignment(best_x, instance.terminals, exact=False)
        return SolveReport(best, 0, fa, converged=True, history=history)

    # Step length in x-space: a row moves at most sqrt(2); scale to the number of free rows.
    c = cfg.step_scale if cfg.step_scale is not None else math.sqrt(2.0 * len(free)) / 2.0
    converged = False
    it = 0
    for it in range(1, cfg.max_iters + 1):
        Gf = G[free]
        norm = float(np.linalg.norm(Gf))
        if norm == 0.0:
            converged = True
            break
        x[free] = project_simplex_rows(x[free] - (c / math.sqrt(it)) * Gf / norm)
        obj, G = evaluate(x)
        if obj < best:
            best, best_x = obj, x.copy()
        history.append(best)
        if it >= cfg.window:
            old = history[-cfg.window - 1]
            if old - best <= cfg.tol * max(1.0, abs(best)):
                converged = True
                break
    if not converged:
        warnings.warn("solve_relaxation hit max_iters before the improvement window settled")
    fa = FractionalAssignment(best_x, instance.terminals, exact=False)
    return SolveReport(best, it, fa, converged=converged, history=history)


@dataclass(frozen=True)
class ThresholdInterval:
    lo: object
    hi: object
    parts: tuple
    unassigned: int


@dataclass(frozen=True)
class ThresholdProfile:
    """The threshold sets A(i, theta) and U(theta) on each interval (lo, hi]."""

    breakpoints: tuple
    intervals: tuple


def _sets_at(x: FractionalAssignment, theta):
    n, k = x.n, x.k
    parts = []
    covered = 0
    for i in range(k):
        m = 0
        for v in range(n):
            if x.x[v, i] >= theta:
                m |= 1 << v
        parts.append(m)
        covered |= m
    return tuple(parts), ((1 << n) - 1) & ~covered


def threshold_profile(x: FractionalAssignment) -> ThresholdProfile:
    """Exact piecewise-constant description of theta -> (A(., theta), U(theta)) on (0, 1].

    A(i, theta) = {v : x(v,i) >= theta} only changes at entries of x, so on
    each interval (b_r, b_{r+1}] between consecutive breakpoints it equals the
    sets taken at the right endpoint.
    """
    zero, one = (Fraction(0), Fraction(1)) if x.exact else (0.0, 1.0)
    pts = sorted({zero, one} | {e for e in x.x.ravel() if zero < e < one})
    intervals = []
    for lo, hi in zip(pts, pts[1:]):
        parts, un = _sets_at(x, hi)
        intervals.append(ThresholdInterval(lo, hi, parts, un))
    return ThresholdProfile(tuple(pts), tuple(intervals))


def _overlap(lo, hi, a, b):
    """Length of (lo, hi] intersected with [a, b]."""
    left, right = max(lo, a), min(hi, b)
    return right - left if right > left else 0


def integral_assigned(oracle: SetFunctionOracle, x: FractionalAssignment, delta, profile=None):
    """Sum_i of the integral over [0, delta] of f(A(i, theta))."""
    if not 0 <= delta <= 1:
        raise DomainError("delta must lie in [0, 1]")
    profile = profile or threshold_profile(x)
    exact = x.exact and is_exact([delta])
    total = Fraction(0) if exact else 0.0
    for iv in profile.intervals:
        w = _overlap(iv.lo, iv.hi, 0, delta)
        if w:
            total += w * sum((oracle.value(m, exact) for m in iv.parts), Fraction(0) if exact else 0.0)
    return total


def _integral_unassigned_direct(oracle, x, r, profile):
    exact = x.exact and is_exact([r])
    total = Fraction(0) if exact else 0.0
    for iv in profile.intervals:
        w = _overlap(iv.lo, iv.hi, 0, r)
        if w:
            total += w * oracle.value(iv.unassigned, exact)
    return total


def alpha_order(x: FractionalAssignment) -> list[int]:
    """Elements sorted by increasing alpha_v = max_i x(v,i), ties by index."""
    al = x.alphas()
    return sorted(range(x.n), key=lambda v: (al[v], v))


def integral_unassigned_telescoped(oracle: SetFunctionOracle, x: FractionalAssignment, r):
    """Closed form: sum_{j<=h} alpha_j (f(V_{j-1}) - f(V_j)) + r f(V_h),
    with elements sorted by alpha, V_j the first j of them and h the largest
    index with alpha_h <= r."""
    exact = x.exact and is_exact([r])
    al = x.alphas()
    order = alpha_order(x)
    total = Fraction(0) if exact else 0.0
    prev_mask, prev_val = 0, oracle.value(0, exact)
    for v in order:
        if al[v] > r:
            break
        mask = prev_mask | 1 << v
        val = oracle.value(mask, exact)
        total += al[v] * (prev_val - val)
        prev_mask, prev_val = mask, val
    return total + r * prev_val


def integral_unassigned(oracle: SetFunctionOracle, x: FractionalAssignment, r, profile=None):
    """Integral over [0, r] of f(U(theta)); computed two ways and cross-checked."""
    if not 0 <= r <= 1:
        raise DomainError("r must lie in [0, 1]")
    profile = profile or threshold_profile(x)
    direct = _integral_unassigned_direct(oracle, x, r, profile)
    closed = integral_unassigned_telescoped(oracle, x, r)
    exact = x.exact and is_exact([r])
    if (exact and direct != closed) or (not exact and abs(direct - closed) > 1e-12 * max(1.0, abs(direct))):
        raise VerificationError(f"unassigned integral routes disagree: {direct} vs {closed}")
    return direct


def telescope_terms(oracle: SetFunctionOracle, x: FractionalAssignment, j: int, delta, profile=None):
    """Both sides of the per-element telescoping bound for the j-th element (1-based)
    in alpha order:

        lhs = sum_i int_0^delta f(A_j(i,t)) - f(A_{j-1}(i,t)) dt
        rhs = (1 - alpha_j) (f(V_j) - f(V_{j-1}))

    where A_j(i,t) = A(i,t) restricted to the first j elements.
    """
    profile = profile or threshold_profile(x)
    exact = x.exact and is_exact([delta])
    zero = Fraction(0) if exact else 0.0
    order = alpha_order(x)
    if not 1 <= j <= x.n:
        raise DomainError("j out of range")
    prev = 0
    for v in order[: j - 1]:
        prev |= 1 << v
    cur = prev | 1 << order[j - 1]
    lhs = zero
    for iv in profile.intervals:
        w = _overlap(iv.lo, iv.hi, 0, delta)
        if w:
            lhs += w * sum((oracle.value(m & cur, exact) - oracle.value(m & prev, exact) for m in iv.parts), zero)
    alpha = x.alphas()[order[j - 1]]
    rhs = (1 - alpha) * (oracle.value(cur, exact) - oracle.value(prev, exact))
    return lhs, rhs


def assigned_vs_unassigned(oracle: SetFunctionOracle, x: FractionalAssignment, delta):
    """Both sides of: sum_i int_0^delta f(A(i,t)) dt >= (k delta - 1) f(empty) + int_0^1 f(U(t)) dt."""
    profile = threshold_profile(x)
    exact = x.exact and is_exact([delta])
    lhs = integral_assigned(oracle, x, delta, profile)
    one = Fraction(1) if exact else 1.0
    rhs = (x.k * delta - 1) * oracle.value(0, exact) + integral_unassigned(oracle, x, one, profile)
    return lhs, rhs
