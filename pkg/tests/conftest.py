import pytest

from stmoments.classnumbers import build_hurwitz_table
from stmoments.hecke import TraceStore


@pytest.fixture(scope="session")
def hurwitz_table():
    return build_hurwitz_table(4 * 200)


@pytest.fixture(scope="session")
def trace_store():
    return TraceStore()


def trial_division_primes(limit: int) -> list[int]:
    """Independent prime oracle."""
    out = []
    for n in range(2, limit + 1):
        if all(n % d for d in range(2, int(n ** 0.5) + 1)):
            out.append(n)
    return out


def brute_projective_count(p: int, a: int, b: int) -> int:
    """Points of y^2 = x^3 + ax + b over F_p, counting the point at infinity,
    by full enumeration."""
    n = 1
    for x in range(p):
        rhs = (x * x * x + a * x + b) % p
        for y in range(p):
            if (y * y - rhs) % p == 0:
                n += 1
    return n
