"""Graph coverage multiway partition: LP objective, exponential-clock rounding,
separation estimates, the multiway-cut translation and the CKR gap instance."""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from typing import Sequence

import numpy as np

from ._util import as_fraction, is_exact, make_rng
from .core import CutOracle, Estimate, GraphCoverageOracle, GroundSet, Instance, Partition, objective
from .errors import DomainError, VerificationError
from .relax import FractionalAssignment

BLOCK = 4096


@dataclass
class WeightedGraph:
    """Vertices (names) and weighted edges given by vertex index."""

    vertices: GroundSet
    edges: list

    def __post_init__(self):
        if not isinstance(self.vertices, GroundSet):
            self.vertices = GroundSet(self.vertices)
        edges = []
        for u, v, w in self.edges:
            u, v, w = int(u), int(v), as_fraction(w)
            if not (0 <= u < self.n and 0 <= v < self.n):
                raise DomainError(f"edge ({u}, {v}) has an endpoint outside the vertex set")
            if w < 0:
                raise DomainError("edge weights must be non-negative")
            edges.append((u, v, w))
        self.edges = edges

    @property
    def n(self) -> int:
        return self.vertices.n

    def total_weight(self) -> Fraction:
        return sum((w for _, _, w in self.edges), Fraction(0))

    def coverage(self) -> GraphCoverageOracle:
        return GraphCoverageOracle(self.vertices, self.edges)

    def cut(self) -> CutOracle:
        return CutOracle(self.vertices, self.edges)

    def instance(self, terminals: Sequence[int], name: str = "") -> Instance:
        return Instance(self.coverage(), tuple(terminals), name=name)


def gcov_objective_frac(graph: WeightedGraph, x: FractionalAssignment):
    """Sum_e w_e sum_i max(x_u^i, x_v^i)."""
    zero = Fraction(0) if x.exact else 0.0
    total = zero
    for u, v, w in graph.edges:
        s = sum((max(a, b) for a, b in zip(x.x[u], x.x[v])), zero)
        total += (w if x.exact else float(w)) * s
    return total


def edge_epsilon(x: FractionalAssignment, u: int, v: int):
    """epsilon_uv = sum_j max(0, x_u^j - x_v^j), checked against half the l1 distance."""
    return row_epsilon(x.x[u], x.x[v])


def row_epsilon(xu, xv):
    xu, xv = list(xu), list(xv)
    exact = is_exact(xu) and is_exact(xv)
    zero = Fraction(0) if exact else 0.0
    pos = sum((max(zero, a - b) for a, b in zip(xu, xv)), zero)
    half_l1 = sum((abs(a - b) for a, b in zip(xu, xv)), zero) / 2
    if (exact and pos != half_l1) or (not exact and abs(pos - half_l1) > 1e-12):
        raise VerificationError(f"epsilon formulas disagree: {pos} vs {half_l1}")
    return pos


def separation_bound(eps):
    """Upper bound 2 eps / (1 + eps) on the probability that an edge is split."""
    return 2 * eps / (1 + eps)


def _exponentials(seed, block: int, rows: int, k: int) -> np.ndarray:
    rng = make_rng(seed, "clocks", block)
    return -np.log1p(-rng.random((rows, k)))


def _labels_from_clocks(X: np.ndarray, Z: np.ndarray) -> np.ndarray:
    """Labels (trials x n): argmin_i Z_i / x_i over coordinates with x_i > 0."""
    with np.errstate(divide="ignore"):
        inv = np.where(X > 0, 1.0 / np.where(X > 0, X, 1.0), np.inf)
    ratio = Z[:, None, :] * inv[None, :, :]
    return np.argmin(ratio, axis=2)


def exp_clock_round(graph: WeightedGraph, terminals: Sequence[int], x: FractionalAssignment,
                    seed: int = 0) -> Partition:
    """One global draw Z_1..Z_k ~ Exp(1); vertex u goes to argmin Z_i / x_u^i."""
    Z = _exponentials(seed, 0, 1, x.k)
    labels = _labels_from_clocks(x.as_float(), Z)[0]
    return Partition(tuple(int(v) for v in labels), x.k).check(graph.instance(terminals))


def _trial_blocks(trials: int):
    for b, a in enumerate(range(0, trials, BLOCK)):
        yield b, min(BLOCK, trials - a)


def estimate_sep_prob(xu, xv, trials: int = 10_000, seed: int = 0) -> Estimate:
    """Monte Carlo Pr[label(u) != label(v)] under one shared clock draw per trial."""
    if trials < 1:
        raise DomainError("trials must be positive")
    X = np.array([[float(a) for a in xu], [float(b) for b in xv]])
    hits = 0
    for b, rows in _trial_blocks(trials):
        lab = _labels_from_clocks(X, _exponentials(seed, b, rows, X.shape[1]))
        hits += int(np.count_nonzero(lab[:, 0] != lab[:, 1]))
    p = hits / trials
    return Estimate(p, float(np.sqrt(p * (1 - p) / trials)), trials)


def _coverage_costs(graph: WeightedGraph, labels: np.ndarray) -> np.ndarray:
    """Coverage objective per trial: an edge costs w once per distinct endpoint label."""
    cost = np.zeros(labels.shape[0])
    for u, v, w in graph.edges:
        cost += float(w) * (1 + (labels[:, u] != labels[:, v]))
    return cost


def estimate_expected_cost(graph: WeightedGraph, terminals: Sequence[int], x: FractionalAssignment,
                           trials: int = 10_000, seed: int = 0) -> Estimate:
    """Mean and standard error of the rounded coverage cost.

    Trials are drawn in fixed blocks whose streams depend only on (seed, block),
    so the estimate does not depend on how the work is split.
    """
    if trials < 1:
        raise DomainError("trials must be positive")
    X = x.as_float()
    costs = np.empty(trials)
    pos = 0
    for b, rows in _trial_blocks(trials):
        lab = _labels_from_clocks(X, _exponentials(seed, b, rows, x.k))
        costs[pos:pos + rows] = _coverage_costs(graph, lab)
        pos += rows
    se = float(costs.std(ddof=1) / np.sqrt(trials)) if trials > 1 else 0.0
    return Estimate(float(costs.mean()), se, trials)


def cut_objective(graph: WeightedGraph, partition: Partition) -> Fraction:
    """Multiway-cut weight: edges whose endpoints lie in different parts."""
    return sum((w for u, v, w in graph.edges if partition.labels[u] != partition.labels[v]), Fraction(0))


def mwc_to_gcov(graph: WeightedGraph, terminals: Sequence[int], partition: Partition) -> Fraction:
    """Coverage objective of a partition, checked against (1/2) sum_i d(S_i) + w(E)."""
    inst = graph.instance(terminals)
    cov = objective(inst, partition)
    d = graph.cut()
    half_cut = sum((d.value(m) for m in partition.parts()), Fraction(0)) / 2
    if cov != half_cut + graph.total_weight():
        raise VerificationError(f"coverage {cov} != half cut {half_cut} + total weight {graph.total_weight()}")
    return cov


def transfer_ratio(alpha):
    """Approximation ratio for coverage obtained from an alpha-approximate multiway cut."""
    if alpha < 1:
        raise DomainError("alpha must be at least 1")
    return (1 + alpha) / 2


def ckr_instance(k: int = 3):
    """Vertices: subsets of {1..k} of size 1 or 2; edges join sets meeting in exactly
    one element; weight 2 when a singleton is involved, 1 otherwise."""
    if k != 3:
        raise DomainError("only k = 3 is bundled")
    sets = [frozenset({i}) for i in range(1, k + 1)]
    sets += [frozenset({i, j}) for i in range(1, k + 1) for j in range(i + 1, k + 1)]
    names = ["".join(str(e) for e in sorted(s)) for s in sets]
    edges = []
    for a in range(len(sets)):
        for b in range(a + 1, len(sets)):
            if len(sets[a] & sets[b]) == 1:
                w = 2 if min(len(sets[a]), len(sets[b])) == 1 else 1
                edges.append((a, b, Fraction(w)))
    return WeightedGraph(GroundSet(names), edges), tuple(range(k))


def ckr_half_point(graph: WeightedGraph, terminals: Sequence[int]) -> FractionalAssignment:
    """Embed vertex S at the uniform distribution over its members."""
    k = len(terminals)
    rows = []
    for name in graph.vertices:
        members = [int(c) - 1 for c in name]
        rows.append([Fraction(1, len(members)) if i in members else Fraction(0) for i in range(k)])
    return FractionalAssignment(rows, terminals, exact=True)
