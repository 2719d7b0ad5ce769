"""Memory-size admissibility against a brute-force divisor scan."""

import math

import pytest

import anonshm as A


def brute_force(n, limit):
    # a size is usable iff no group of 2..n processes divides it evenly
    return tuple(
        m for m in range(1, limit + 1)
        if all(math.gcd(k, m) == 1 for k in range(2, n + 1))
    )


FROZEN = {
    (2, 10): (1, 3, 5, 7, 9),
    (3, 10): (1, 5, 7),
    (4, 12): (1, 5, 7, 11),
}


@pytest.mark.parametrize("n,limit", sorted(FROZEN))
def test_frozen_tables(n, limit):
    got = A.admissible_sizes(n, limit)
    assert got.members == FROZEN[(n, limit)]
    assert got.members == brute_force(n, limit)
    assert (got.n, got.limit) == (n, limit)


@pytest.mark.parametrize("n", range(2, 7))
def test_matches_brute_force_wide(n):
    assert A.admissible_sizes(n, 60).members == brute_force(n, 60)


def test_membership_equals_never_integral_share():
    for n in range(2, 6):
        allowed = set(brute_force(n, 60))
        for m in range(1, 61):
            assert A.is_admissible(n, m) == (m in allowed)
            assert A.share_is_never_integral(n, m) == (m in allowed)


def test_gcd():
    assert A.gcd(12, 18) == 6
    assert A.gcd(7, 1) == 1
    assert A.gcd(9, 28) == 1
