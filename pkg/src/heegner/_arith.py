"""Small integer helpers shared across modules."""
from functools import lru_cache
from math import gcd, isqrt


class DomainError(ValueError):
    """Input outside the mathematical domain of an operation."""


class ConsistencyError(ArithmeticError):
    """Two independent computations disagree beyond their error bounds."""


class PreconditionError(ValueError):
    """A documented precondition does not hold."""


def factorint(n: int) -> dict:
    """Trial-division factorisation of a nonzero integer: {p: e}."""
    n = abs(n)
    if n == 0:
        raise DomainError("cannot factor 0")
    out = {}
    for p in (2, 3):
        while n % p == 0:
            out[p] = out.get(p, 0) + 1
            n //= p
    p = 5
    step = 2
    while p * p <= n:
        while n % p == 0:
            out[p] = out.get(p, 0) + 1
            n //= p
        p += step
        step = 6 - step
    if n > 1:
        out[n] = out.get(n, 0) + 1
    return out


def prime_divisors(n: int) -> list:
    return sorted(factorint(n))


def is_squarefree(n: int) -> bool:
    return all(e == 1 for e in factorint(n).values())


def valuation(n: int, p: int) -> int:
    if n == 0:
        raise DomainError("valuation of 0")
    v = 0
    while n % p == 0:
        n //= p
        v += 1
    return v


@lru_cache(maxsize=8)
def primes_upto(n: int) -> tuple:
    if n < 2:
        return ()
    sieve = bytearray([1]) * (n + 1)
    sieve[0] = sieve[1] = 0
    for p in range(2, isqrt(n) + 1):
        if sieve[p]:
            sieve[p * p :: p] = bytearray(len(range(p * p, n + 1, p)))
    return tuple(i for i in range(n + 1) if sieve[i])


def is_prime(n: int) -> bool:
    if n < 2:
        return False
    return factorint(n) == {n: 1}


def xgcd(a: int, b: int):
    """Return (g, x, y) with a*x + b*y = g = gcd(a, b) >= 0."""
    x0, y0, x1, y1 = 1, 0, 0, 1
    while b:
        q, a, b = a // b, b, a % b
        x0, x1 = x1, x0 - q * x1
        y0, y1 = y1, y0 - q * y1
    if a < 0:
        a, x0, y0 = -a, -x0, -y0
    return a, x0, y0


def crt(r1: int, m1: int, r2: int, m2: int):
    """Solve x = r1 (m1), x = r2 (m2); returns (x, lcm) or None."""
    g, p, _ = xgcd(m1, m2)
    if (r2 - r1) % g:
        return None
    lcm = m1 // g * m2
    x = (r1 + (r2 - r1) // g * p % (m2 // g) * m1) % lcm
    return x, lcm


def sqrt_mod(d: int, m: int) -> list:
    """All x in [0, m) with x^2 = d mod m (brute force, m is small here)."""
    d %= m
    return [x for x in range(m) if (x * x - d) % m == 0]


def omega(n: int) -> int:
    return len(factorint(n)) if n != 1 else 0


def sl2_index(N: int) -> int:
    """Index of Gamma_0(N) in SL_2(Z): N * prod_{p|N} (1 + 1/p)."""
    idx = N
    for p in factorint(N) if N > 1 else ():
        idx = idx // p * (p + 1)
    return idx


__all__ = [
    "DomainError", "ConsistencyError", "PreconditionError", "factorint",
    "prime_divisors", "is_squarefree", "valuation", "primes_upto", "is_prime",
    "xgcd", "crt", "sqrt_mod", "omega", "sl2_index", "gcd", "isqrt",
]
