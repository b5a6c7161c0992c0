"""Exhaustive solvers and the simple greedy baseline."""

from __future__ import annotations

from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass
from fractions import Fraction

import numpy as np

from ._util import resolve_jobs
from .core import Instance, Partition, objective
from .errors import CapacityError, DomainError, VerificationError

DEFAULT_BUDGET = 50_000_000
CHUNK = 1 << 18
PARALLEL_MIN_STATES = 1 << 21


@dataclass(frozen=True)
class SearchBudget:
    max_states: int = DEFAULT_BUDGET

    def __post_init__(self):
        if int(self.max_states) < 1:
            raise DomainError("search budget must be positive")


def _max_states(budget) -> int:
    if budget is None:
        return DEFAULT_BUDGET
    if isinstance(budget, SearchBudget):
        return int(budget.max_states)
    b = int(budget)
    if b < 1:
        raise DomainError("search budget must be positive")
    return b


def _scan(nums, term_masks, free, k, lo, hi):
    """Best (total, state) over states lo..hi-1; digits of a state label the
    free elements, most significant first."""
    m = len(free)
    pw = [k ** (m - 1 - p) for p in range(m)]
    best = None
    for a in range(lo, hi, CHUNK):
        s = np.arange(a, min(hi, a + CHUNK), dtype=np.int64)
        masks = np.tile(np.asarray(term_masks, dtype=np.int64)[:, None], (1, len(s)))
        for p, v in enumerate(free):
            lab = (s // pw[p]) % k
            masks[lab, np.arange(len(s))] += np.int64(1) << v
        total = nums[masks].sum(axis=0)
        i = int(np.argmin(total))
        cand = (int(total[i]), int(s[i]))
        if best is None or cand < best:
            best = cand
    return best


def _scan_job(args):
    return _scan(*args)


def brute_force_opt(instance: Instance, budget=None, jobs=None):
    """Minimum of sum_i f(V_i) over all partitions with t_i in V_i.

    Returns ``(Partition, Fraction)``; among optimal labelings the lexicographically
    smallest one (over non-terminal elements in index order) is reported.
    """
    k, free = instance.k, instance.free
    required = k ** len(free)
    if required > _max_states(budget):
        raise CapacityError(f"brute force needs {required} states, budget is {_max_states(budget)}",
                            required=required)
    nums, den = instance.oracle.exact_table()
    if nums.dtype == object:
        raise CapacityError("oracle values too large for the vectorized search")
    term_masks = [1 << t for t in instance.terminals]
    jobs = resolve_jobs(jobs)
    if jobs > 1 and required >= PARALLEL_MIN_STATES:
        step = -(-required // (jobs * 4))
        tasks = [(nums, term_masks, free, k, a, min(required, a + step)) for a in range(0, required, step)]
        with ProcessPoolExecutor(max_workers=jobs) as ex:
            best = min(ex.map(_scan_job, tasks))
    else:
        best = _scan(nums, term_masks, free, k, 0, required)
    total, state = best
    labels = [0] * instance.n
    for i, t in enumerate(instance.terminals):
        labels[t] = i
    for p, v in enumerate(reversed(free)):
        labels[v] = (state // k ** p) % k
    P = Partition(tuple(labels), k).check(instance)
    value = Fraction(total, den)
    if objective(instance, P) != value:
        raise VerificationError("brute-force table total disagrees with direct evaluation")
    return P, value


def greedy_baseline(instance: Instance):
    """Singletons for the k-1 cheapest terminals; the rest joins the most expensive one."""
    f = instance.oracle
    order = sorted(range(instance.k), key=lambda i: (f.value({instance.terminals[i]}), i))
    last = order[-1]
    labels = [last] * instance.n
    for i, t in enumerate(instance.terminals):
        labels[t] = i
    P = Partition(tuple(labels), instance.k).check(instance)
    return P, objective(instance, P)


def brute_force_sym_opt(sym, budget=None):
    """Minimum of sum_l f(V_l) over symmetric partitions of the grid instance.

    Each unordered off-diagonal pair takes one joint label. Returns
    ``(SymPartition, Fraction)``, cross-checked against direct evaluation.
    """
    from .symgap import SymPartition, sym_objective, sym_objective_direct

    k = sym.k
    pairs = [(a, b) for a in range(k) for b in range(a + 1, k)]
    m = len(pairs)
    required = k ** m
    if required > _max_states(budget):
        raise CapacityError(f"symmetric brute force needs {required} states, budget is {_max_states(budget)}",
                            required=required)
    pw = [k ** (m - 1 - p) for p in range(m)]
    # row r sees the k-1 pairs through it; tabulate its cost over their joint labels
    combos = np.indices((k,) * (k - 1)).reshape(k - 1, -1)
    through = []
    row_cost = []
    for r in range(k):
        idx = [pairs.index((min(r, c), max(r, c))) for c in range(k) if c != r]
        through.append(idx)
        cnt = (combos[:, :, None] == np.arange(k)).sum(axis=0)
        cnt[:, r] += 1
        cost = sym.phi_n8(cnt)
        cost[:, r] = sym.phi_t8(cnt[:, r])
        row_cost.append(cost.sum(axis=1).astype(np.int64))
    best = None
    for lo in range(0, required, CHUNK):
        s = np.arange(lo, min(required, lo + CHUNK), dtype=np.int64)
        digits = [(s // pw[p]) % k for p in range(m)]
        total = np.zeros(len(s), dtype=np.int64)
        for r in range(k):
            code = np.zeros(len(s), dtype=np.int64)
            for p in through[r]:
                code = code * k + digits[p]
            total += row_cost[r][code]
        i = int(np.argmin(total))
        cand = (int(total[i]), int(s[i]))
        if best is None or cand < best:
            best = cand
    total8, state = best
    L = np.zeros((k, k), dtype=np.int64)
    np.fill_diagonal(L, np.arange(k))
    for p, (a, b) in enumerate(pairs):
        L[a, b] = L[b, a] = (state // pw[p]) % k
    P = SymPartition(L)
    value = Fraction(total8, 4)
    if not (sym_objective(sym, P) == value == sym_objective_direct(sym, P)):
        raise VerificationError("symmetric brute-force value disagrees with direct evaluation")
    return P, value
