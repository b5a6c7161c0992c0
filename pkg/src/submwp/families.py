"""Named instance families and random instance generators."""

from __future__ import annotations

from fractions import Fraction

import numpy as np

from .core import CoverageOracle, GroundSet, Instance, PartitionMatroidOracle
from .errors import DomainError
from .relax import FractionalAssignment


def tight43(pairs: int) -> Instance:
    """Coverage family on which threshold rounding over [1/4, 1] loses 4/3 - 1/(3 pairs).

    Ground set t1..t_{2p}, u1..u_p (terminals first); hyperedge i is
    {t_{2i-1}, t_{2i}, u_i} with weight 1.
    """
    if pairs < 1:
        raise DomainError("tight43 needs at least one pair")
    names = [f"t{i}" for i in range(1, 2 * pairs + 1)] + [f"u{i}" for i in range(1, pairs + 1)]
    ground = GroundSet(names)
    edges = [({2 * i, 2 * i + 1, 2 * pairs + i}, 1) for i in range(pairs)]
    return Instance(CoverageOracle(ground, edges), tuple(range(2 * pairs)), name=f"tight43({pairs})")


def tight43_half_point(instance: Instance) -> FractionalAssignment:
    """Each u_i split evenly between the two terminals of its hyperedge."""
    pairs = instance.k // 2
    k = instance.k
    rows = []
    for v in range(instance.n):
        row = [Fraction(0)] * k
        if v < k:
            row[v] = Fraction(1)
        else:
            i = v - k
            row[2 * i] = row[2 * i + 1] = Fraction(1, 2)
        rows.append(row)
    return FractionalAssignment(rows, instance.terminals, exact=True)


def tight_example() -> Instance:
    """V = {t1, t2, u}, f = 1 on every non-empty set (one hyperedge covering all)."""
    ground = GroundSet(["t1", "t2", "u"])
    return Instance(CoverageOracle(ground, [({0, 1, 2}, 1)]), (0, 1), name="tight-example")


def tight_example_point(instance: Instance) -> FractionalAssignment:
    h = Fraction(1, 2)
    return FractionalAssignment([[1, 0], [0, 1], [h, h]], instance.terminals, exact=True)


def matroid_tight(k: int) -> Instance:
    """k blocks {t_i, s_i} of a partition matroid; greedy pays 2k - 1 against OPT k."""
    if k < 1:
        raise DomainError("matroid-tight needs k >= 1")
    names = [f"t{i}" for i in range(1, k + 1)] + [f"s{i}" for i in range(1, k + 1)]
    ground = GroundSet(names)
    blocks = [{i, k + i} for i in range(k)]
    return Instance(PartitionMatroidOracle(ground, blocks), tuple(range(k)), name=f"matroid-tight({k})")


def random_coverage(rng: np.random.Generator, n: int, k: int, edges: int | None = None,
                    max_weight: int = 4, max_size: int = 3) -> Instance:
    """Random weighted hypergraph coverage instance; terminals are elements 0..k-1."""
    if not 1 <= k <= n:
        raise DomainError("need 1 <= k <= n")
    edges = edges if edges is not None else int(rng.integers(n, 2 * n + 1))
    hyper = []
    for _ in range(edges):
        size = int(rng.integers(1, min(max_size, n) + 1))
        members = set(int(v) for v in rng.choice(n, size=size, replace=False))
        hyper.append((members, Fraction(int(rng.integers(1, max_weight + 1)))))
    ground = GroundSet([f"v{i}" for i in range(n)])
    return Instance(CoverageOracle(ground, hyper), tuple(range(k)), name=f"coverage(n={n},k={k})")


def random_matroid(rng: np.random.Generator, n: int, k: int) -> Instance:
    """Random partition matroid rank over n elements; terminals are 0..k-1."""
    blocks_of = rng.integers(0, max(1, n // 2) + 1, size=n)
    blocks = [set(np.flatnonzero(blocks_of == b).tolist()) for b in np.unique(blocks_of)]
    ground = GroundSet([f"v{i}" for i in range(n)])
    return Instance(PartitionMatroidOracle(ground, [b for b in blocks if b]), tuple(range(k)),
                    name=f"matroid(n={n},k={k})")


def random_monotone(rng: np.random.Generator, n: int, k: int) -> Instance:
    """A random monotone submodular instance: coverage most of the time, matroid rank otherwise."""
    if rng.random() < 0.75:
        return random_coverage(rng, n, k)
    return random_matroid(rng, n, k)


def random_assignment(rng: np.random.Generator, instance: Instance, denominator: int = 12,
                      sparsity: float = 0.3) -> FractionalAssignment:
    """A random feasible assignment with rational entries of the given denominator."""
    k = instance.k
    rows = []
    pinned = dict(zip(instance.terminals, range(k)))
    for v in range(instance.n):
        if v in pinned:
            rows.append([Fraction(int(i == pinned[v])) for i in range(k)])
            continue
        w = rng.integers(0, denominator, size=k)
        w[rng.random(k) < sparsity] = 0
        if w.sum() == 0:
            w[int(rng.integers(k))] = 1
        # split `denominator` units proportionally, remainder to the largest weight
        units = np.floor(w / w.sum() * denominator).astype(int)
        units[int(np.argmax(w))] += denominator - units.sum()
        rows.append([Fraction(int(u), denominator) for u in units])
    return FractionalAssignment(rows, instance.terminals, exact=True)
