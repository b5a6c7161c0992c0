"""Max-Cut to graph-coverage partition gadget reduction.

Each edge (u, v) of G becomes a 3x3 torus whose diagonal cells are the three
shared terminals, whose cells (1,2) and (2,1) are the vertices u and v, and
whose other four cells are fresh dummies. Edges at a terminal weigh 4, the
other six weigh 1.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass, field
from fractions import Fraction
from functools import lru_cache

import numpy as np

from ._util import as_fraction
from .core import GroundSet, Instance, Partition, objective
from .errors import CapacityError, DomainError, VerificationError
from .exact import DEFAULT_BUDGET, brute_force_opt
from .gcov import WeightedGraph, cut_objective

CELLS = [(r, c) for r in (1, 2, 3) for c in (1, 2, 3)]
TERMINAL_CELLS = {(1, 1): 0, (2, 2): 1, (3, 3): 2}
PORT_X, PORT_Y = (1, 2), (2, 1)
DUMMY_CELLS = [c for c in CELLS if c not in TERMINAL_CELLS and c not in (PORT_X, PORT_Y)]
MAXCUT_MAX_N = 24
DECOMPOSE_MAX_STATES = 3 ** 13


def gadget_edges() -> list:
    """The 18 weighted torus edges ((r,c), (r',c'), w)."""
    pairs = []
    for r in (1, 2, 3):
        pairs += [((r, 1), (r, 2)), ((r, 2), (r, 3)), ((r, 1), (r, 3))]
    for c in (1, 2, 3):
        pairs += [((1, c), (2, c)), ((2, c), (3, c)), ((1, c), (3, c))]
    return [(a, b, 4 if a in TERMINAL_CELLS or b in TERMINAL_CELLS else 1) for a, b in pairs]


@lru_cache(maxsize=None)
def gadget_table() -> dict:
    """(port-x label, port-y label) -> (least cut weight, dummy labels), ties lexicographic."""
    edges = gadget_edges()
    out = {}
    for a, b in itertools.product(range(3), repeat=2):
        best = None
        for d in itertools.product(range(3), repeat=4):
            lab = dict(TERMINAL_CELLS)
            lab[PORT_X], lab[PORT_Y] = a, b
            lab.update(zip(DUMMY_CELLS, d))
            cost = sum(w for p, q, w in edges if lab[p] != lab[q])
            if best is None or (cost, d) < best:
                best = (cost, d)
        out[(a, b)] = best
    return out


@dataclass
class SimpleGraph:
    vertices: list
    edges: list

    def __post_init__(self):
        self.vertices = [str(v) for v in self.vertices]
        if len(set(self.vertices)) != len(self.vertices):
            raise DomainError("duplicate vertex names")
        seen = set()
        edges = []
        for u, v in self.edges:
            u, v = int(u), int(v)
            if not (0 <= u < self.n and 0 <= v < self.n):
                raise DomainError(f"edge ({u}, {v}) leaves the vertex set")
            if u == v:
                raise DomainError("graph must be simple: self-loop")
            key = (min(u, v), max(u, v))
            if key in seen:
                raise DomainError("graph must be simple: repeated edge")
            seen.add(key)
            edges.append((u, v))
        self.edges = edges

    @property
    def n(self) -> int:
        return len(self.vertices)

    @property
    def m(self) -> int:
        return len(self.edges)

    def cut_size(self, U) -> int:
        U = set(U)
        return sum(1 for u, v in self.edges if (u in U) != (v in U))


@dataclass
class ReducedInstance:
    graph: WeightedGraph
    port_map: list
    gadgets: list = field(default_factory=list)
    terminals: tuple = (0, 1, 2)

    def instance(self) -> Instance:
        return self.graph.instance(self.terminals, name="reduced")


def reduce(G: SimpleGraph) -> ReducedInstance:
    names = ["s1", "s2", "s3"] + [f"v:{v}" for v in G.vertices]
    port_map = list(range(3, 3 + G.n))
    gadgets = []
    for e, (u, v) in enumerate(G.edges):
        cell = dict((c, t) for c, t in TERMINAL_CELLS.items())
        cell[PORT_X], cell[PORT_Y] = port_map[u], port_map[v]
        for c in DUMMY_CELLS:
            cell[c] = len(names)
            names.append(f"e{e}:{c[0]}{c[1]}")
        gadgets.append(cell)
    edges = [(cell[a], cell[b], w) for cell in gadgets for a, b, w in gadget_edges()]
    H = WeightedGraph(GroundSet(names), edges)
    return ReducedInstance(H, port_map, gadgets)


def normalize(R: ReducedInstance, P: Partition) -> Partition:
    """Relabel every gadget's dummies to the cheapest labels given its ports."""
    P.check(R.instance())
    labels = list(P.labels)
    table = gadget_table()
    for cell in R.gadgets:
        _, d = table[(labels[cell[PORT_X]], labels[cell[PORT_Y]])]
        for c, lab in zip(DUMMY_CELLS, d):
            labels[cell[c]] = lab
    return Partition(tuple(labels), 3)


def ports_partition(R: ReducedInstance, port_labels) -> Partition:
    labels = [0] * R.graph.n
    labels[1], labels[2] = 1, 2
    for idx, lab in zip(R.port_map, port_labels):
        labels[idx] = int(lab)
    return normalize(R, Partition(tuple(labels), 3))


def canonical_partition(G: SimpleGraph, R: ReducedInstance, U) -> Partition:
    """Ports of U join s_1, the other ports join s_2, dummies locally optimal."""
    U = set(U)
    return ports_partition(R, [0 if v in U else 1 for v in range(G.n)])


def extract_cut(G: SimpleGraph, R: ReducedInstance, P: Partition) -> set:
    """Best of the three one-part-versus-rest splits of the (normalized) port labels."""
    Q = normalize(R, P)
    labs = [Q.labels[R.port_map[v]] for v in range(G.n)]
    best = None
    for j in range(3):
        U = {v for v in range(G.n) if labs[v] == j}
        size = G.cut_size(U)
        if best is None or size > best[0]:
            best = (size, U)
    return best[1]


def maxcut_brute(G: SimpleGraph):
    """(max cut size, U) by enumerating bipartitions with vertex 0 outside U."""
    if G.n > MAXCUT_MAX_N:
        raise CapacityError(f"max-cut brute force needs n <= {MAXCUT_MAX_N}", required=2 ** G.n)
    if G.n == 0 or G.m == 0:
        return 0, set()
    s = np.arange(1 << (G.n - 1), dtype=np.int64) << 1
    size = np.zeros(len(s), dtype=np.int64)
    for u, v in G.edges:
        size += ((s >> u) ^ (s >> v)) & 1
    i = int(np.argmax(size))
    return int(size[i]), {v for v in range(G.n) if s[i] >> v & 1}


def mwc_decomposed(G: SimpleGraph, R: ReducedInstance):
    """Minimum multiway cut of H: enumerate port labels, gadgets solved locally."""
    states = 3 ** G.n
    if states > DECOMPOSE_MAX_STATES:
        raise CapacityError("too many port labelings", required=states)
    table = gadget_table()
    cost = np.array([[table[(a, b)][0] for b in range(3)] for a in range(3)], dtype=np.int64)
    s = np.arange(states, dtype=np.int64)
    lab = [(s // 3 ** (G.n - 1 - v)) % 3 for v in range(G.n)]
    total = np.zeros(states, dtype=np.int64)
    for u, v in G.edges:
        total += cost[lab[u], lab[v]]
    i = int(np.argmin(total))
    P = ports_partition(R, [int(l[i]) for l in lab])
    value = cut_objective(R.graph, P)
    if value != int(total[i]):
        raise VerificationError("decomposed multiway cut disagrees with direct evaluation")
    return P, value


@dataclass
class ReductionReport:
    maxcut: int
    mwc_opt: Fraction
    gcov_opt: Fraction
    gcov_route: str
    identities: dict

    @property
    def identities_ok(self) -> bool:
        return all(self.identities.values())


def verify_reduction(G: SimpleGraph, budget=None, jobs=None) -> ReductionReport:
    """Brute-force both problems and check the reduction identities."""
    R = reduce(G)
    m = G.m
    maxcut, _ = maxcut_brute(G)
    _, mwc = mwc_decomposed(G, R)
    inst = R.instance()
    required = 3 ** (inst.n - 3)
    if inst.n <= 22 and required <= (budget or DEFAULT_BUDGET):
        _, gcov = brute_force_opt(inst, budget=budget, jobs=jobs)
        route = "brute-force"
    elif m > 0:
        # no direct enumeration at this size; the translation identity gives gcov from the cut side
        gcov = mwc + R.graph.total_weight()
        route = "decomposed"
    else:
        raise CapacityError("reduced instance too large", required=required)
    ident = {
        "mwc_opt = 28|E| - maxcut": mwc == 28 * m - maxcut,
        "gcov_opt = 82|E| - maxcut": gcov == 82 * m - maxcut,
        "gcov_opt = mwc_opt + 54|E|": gcov == mwc + 54 * m,
        "gcov_opt <= 163 maxcut": gcov <= 163 * maxcut,
        "w(E(H)) = 54|E|": R.graph.total_weight() == 54 * m,
        "|V(H)| = 3 + |V| + 4|E|": R.graph.n == 3 + G.n + 4 * m,
    }
    return ReductionReport(maxcut, Fraction(mwc), Fraction(gcov), route, ident)


def approx_transfer(alpha, maxcut_opt, gcov_value=None, gcov_opt=None):
    """Guaranteed extracted cut (164 - 163 alpha) maxcut_opt, floored at 0."""
    alpha = as_fraction(alpha) if not isinstance(alpha, float) else alpha
    if alpha < 1:
        raise DomainError("alpha must be at least 1")
    if gcov_value is not None and gcov_opt is not None and gcov_value > alpha * gcov_opt:
        raise DomainError("gcov_value exceeds alpha * gcov_opt")
    return max(0, (164 - 163 * alpha) * maxcut_opt)


def extraction_bound(G: SimpleGraph, R: ReducedInstance, P: Partition, maxcut: int):
    """OPT_MaxCut + OPT_GCov - sum_i b(V_i), with OPT_GCov = 82|E| - maxcut."""
    return maxcut + (82 * G.m - maxcut) - objective(R.instance(), P)
