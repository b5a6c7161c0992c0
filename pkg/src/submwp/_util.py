"""Small shared helpers: rationals, seeded streams, worker counts."""

import os
import zlib
from fractions import Fraction
from math import gcd

import numpy as np

from .errors import DomainError


def as_fraction(v) -> Fraction:
    """Parse an int, Fraction, float or "p/q" string into an exact Fraction."""
    if isinstance(v, Fraction):
        return v
    if isinstance(v, bool):
        raise DomainError(f"not a number: {v!r}")
    if isinstance(v, (int, np.integer)):
        return Fraction(int(v))
    if isinstance(v, (float, np.floating)):
        if not np.isfinite(v):
            raise DomainError(f"non-finite value {v!r}")
        return Fraction(float(v))
    if isinstance(v, str):
        try:
            return Fraction(v.strip())
        except (ValueError, ZeroDivisionError) as exc:
            raise DomainError(f"cannot parse rational {v!r}") from exc
    raise DomainError(f"not a number: {v!r}")


def is_exact(values) -> bool:
    """True when every entry is an int or Fraction (no floats)."""
    for v in values:
        if not isinstance(v, (Fraction, int, np.integer)) or isinstance(v, bool):
            return False
    return True


def fmt_value(v) -> str | float:
    """Render rationals losslessly as "p/q" (or "p" when integral); floats pass through."""
    if isinstance(v, (Fraction, int, np.integer)):
        v = Fraction(v)
        return str(v.numerator) if v.denominator == 1 else f"{v.numerator}/{v.denominator}"
    return float(v)


def lcm_denominators(values) -> int:
    out = 1
    for v in values:
        d = Fraction(v).denominator
        out = out * d // gcd(out, d)
    return out


def make_rng(seed, *labels) -> np.random.Generator:
    """Counter-based generator; the stream is keyed by (seed, labels).

    Labels are hashed with crc32 so the derivation is stable across runs and
    platforms (builtin hash() is salted per process).
    """
    key = tuple(zlib.crc32(str(lab).encode()) for lab in labels)
    ss = np.random.SeedSequence(entropy=int(seed or 0), spawn_key=key)
    return np.random.Generator(np.random.Philox(ss))


def resolve_jobs(jobs=None) -> int:
    if jobs is None:
        jobs = os.environ.get("SUBMWP_JOBS", "1")
    try:
        jobs = int(jobs)
    except ValueError as exc:
        raise DomainError(f"bad worker count {jobs!r}") from exc
    return max(1, jobs)


def popcount(a: np.ndarray) -> np.ndarray:
    """Vectorised popcount for non-negative int64 arrays."""
    a = a.astype(np.uint64)
    a = a - ((a >> np.uint64(1)) & np.uint64(0x5555555555555555))
    a = (a & np.uint64(0x3333333333333333)) + ((a >> np.uint64(2)) & np.uint64(0x3333333333333333))
    a = (a + (a >> np.uint64(4))) & np.uint64(0x0F0F0F0F0F0F0F0F)
    return ((a * np.uint64(0x0101010101010101)) >> np.uint64(56)).astype(np.int64)
