"""Threshold rounding of a fractional assignment, with exact expectations.

For a threshold theta every part i takes A(i, theta) = {v : x(v,i) >= theta};
an element claimed by several parts stays in the lowest-index one, and the
unclaimed elements U(theta) go to the sink part (the last part by default).
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction

from ._util import is_exact, make_rng
from .core import Instance, Partition, objective
from .errors import DomainError
from .relax import FractionalAssignment, _sets_at, threshold_profile

INTERVALS = {
    "quarter": (Fraction(1, 4), Fraction(1)),
    "half": (Fraction(1, 2), Fraction(1)),
    "full": (Fraction(0), Fraction(1)),
}


@dataclass(frozen=True)
class RoundingConfig:
    interval: str = "quarter"
    uncross_rule: str = "lowest-index"
    unassigned_sink: int | None = None

    def __post_init__(self):
        if self.interval not in INTERVALS:
            raise DomainError(f"unknown interval {self.interval!r}; choose from {sorted(INTERVALS)}")
        if self.uncross_rule != "lowest-index":
            raise DomainError("only the lowest-index uncrossing rule is supported")

    @property
    def bounds(self):
        return INTERVALS[self.interval]

    def sink(self, k: int) -> int:
        s = k - 1 if self.unassigned_sink is None else self.unassigned_sink
        if not 0 <= s < k:
            raise DomainError(f"sink part {s} out of range for k={k}")
        return s


@dataclass(frozen=True)
class RoundingOutcome:
    partition: Partition
    theta: object
    cost: object


def _uncross(parts, unassigned, n, k, sink):
    labels = [-1] * n
    for i, m in enumerate(parts):
        for v in range(n):
            if m >> v & 1 and labels[v] == -1:
                labels[v] = i
    for v in range(n):
        if unassigned >> v & 1:
            labels[v] = sink
    return Partition(tuple(labels), k)


def round_at(instance: Instance, x: FractionalAssignment, theta, config: RoundingConfig | None = None,
             exact: bool | None = None) -> RoundingOutcome:
    """Deterministic rounding at a given threshold in (0, 1]."""
    config = config or RoundingConfig()
    if not 0 < theta <= 1:
        raise DomainError("theta must lie in (0, 1]")
    if exact is None:
        exact = x.exact
    parts, un = _sets_at(x, theta)
    P = _uncross(parts, un, x.n, x.k, config.sink(x.k))
    return RoundingOutcome(P, theta, objective(instance, P, exact))


def pointwise_bound(instance: Instance, x: FractionalAssignment, theta, exact: bool | None = None):
    """Sum_i f(A(i, theta)) + f(U(theta)), the bound on the cost at theta used by the 4/3 argument."""
    if exact is None:
        exact = x.exact
    parts, un = _sets_at(x, theta)
    f = instance.oracle
    zero = Fraction(0) if exact else 0.0
    return sum((f.value(m, exact) for m in parts), zero) + f.value(un, exact)


def interval_costs(instance: Instance, x: FractionalAssignment, config: RoundingConfig | None = None):
    """[(lo, hi, outcome)] over the threshold intervals meeting the configured range."""
    config = config or RoundingConfig()
    a, b = config.bounds
    if not x.exact:
        a, b = float(a), float(b)
    out = []
    for iv in threshold_profile(x).intervals:
        lo, hi = max(iv.lo, a), min(iv.hi, b)
        if hi <= lo:
            continue
        P = _uncross(iv.parts, iv.unassigned, x.n, x.k, config.sink(x.k))
        out.append((lo, hi, RoundingOutcome(P, iv.hi, objective(instance, P, x.exact))))
    return out


def expected_cost(instance: Instance, x: FractionalAssignment, config: RoundingConfig | None = None):
    """Exact expectation of the rounded cost for theta uniform on the configured interval."""
    config = config or RoundingConfig()
    a, b = config.bounds
    if not x.exact:
        a, b = float(a), float(b)
    total = Fraction(0) if x.exact else 0.0
    for lo, hi, out in interval_costs(instance, x, config):
        total += (hi - lo) * out.cost
    return total / (b - a)


def round_random(instance: Instance, x: FractionalAssignment, config: RoundingConfig | None = None,
                 seed: int = 0) -> RoundingOutcome:
    """Draw theta uniformly from the configured interval and round there.

    The draw is 1 - U with U uniform on [0, 1), so theta never hits the
    excluded left end of the range.
    """
    config = config or RoundingConfig()
    a, b = (float(t) for t in config.bounds)
    u = 1.0 - make_rng(seed, "theta").random()
    theta = a + (b - a) * u
    if x.exact:
        theta = Fraction(theta)
    return round_at(instance, x, theta, config, exact=x.exact and is_exact([theta]))
