"""Which register counts allow symmetry to be broken.

A memory size m works for n processes exactly when no possible contention level
shares a factor with m: gcd(l, m) = 1 for every l in 2..n.  Equivalently, at
every elimination round the per-survivor share of the m registers is never an
integer, so some process always falls strictly below the ownership threshold
and withdraws.
"""

from __future__ import annotations

from dataclasses import dataclass


def gcd(a: int, b: int) -> int:
    """Greatest common divisor by Euclid's algorithm.

    Arguments must be non-negative and not both zero.
    """
    if a < 0 or b < 0:
        raise ValueError("gcd arguments must be non-negative")
    if a == 0 and b == 0:
        raise ValueError("gcd(0, 0) is undefined")
    while b:
        a, b = b, a % b
    return a


def is_admissible(n: int, m: int) -> bool:
    """True when m registers suffice to break symmetry among n processes.

    Checks gcd(l, m) = 1 for every l in 2..n.  n must be >= 2 and m >= 1.
    """
    if n < 2:
        raise ValueError("need at least two processes")
    if m < 1:
        raise ValueError("need at least one register")
    return all(gcd(l, m) == 1 for l in range(2, n + 1))


def share_is_never_integral(n: int, m: int) -> bool:
    """True when m/(n-r+1) is non-integral for every round r in 1..n-1.

    This is the withdrawal-threshold property the mutex rounds rely on; it is
    equivalent to is_admissible(n, m) and exists as an independent phrasing.
    The divisors n-r+1 range over {2..n}.
    """
    return all(m % (n - r + 1) != 0 for r in range(1, n))


@dataclass(frozen=True)
class AdmissibilitySet:
    """All admissible sizes for n processes up to a search limit."""

    n: int
    limit: int
    members: tuple[int, ...]

    def __contains__(self, m: int) -> bool:
        return m in self.members


def admissible_sizes(n: int, limit: int) -> AdmissibilitySet:
    """Enumerate admissible m in 1..limit for n processes, ascending."""
    if limit < 1:
        raise ValueError("limit must be at least 1")
    members = tuple(m for m in range(1, limit + 1) if is_admissible(n, m))
    return AdmissibilitySet(n=n, limit=limit, members=members)
