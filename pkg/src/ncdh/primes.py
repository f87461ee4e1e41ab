"""Primality testing and integer factorization helpers.

Miller-Rabin with the fixed witness set is deterministic for every input
below 3.3 * 10^24, which covers 64-bit moduli and the cyclotomic order
pieces p^2+1, p^2+p+1 for p < 2^40. Larger inputs fall back to a fixed
pseudo-random witness schedule (still deterministic run to run).
"""

import math
import random

# Deterministic for n < 3,317,044,064,679,887,385,961,981 (~2^81.5).
_MR_WITNESSES = (2, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37, 41)
_MR_DETERMINISTIC_BOUND = 3_317_044_064_679_887_385_961_981

_SMALL_PRIMES = (2, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37, 41, 43, 47, 53, 59, 61, 67)


def _mr_round(n: int, a: int, d: int, s: int) -> bool:
    """One Miller-Rabin round; True means 'probably prime'."""
    x = pow(a % n, d, n)
    if x in (0, 1, n - 1):
        return True
    for _ in range(s - 1):
        x = x * x % n
        if x == n - 1:
            return True
    return False


def is_prime(n: int) -> bool:
    if n < 2:
        return False
    for q in _SMALL_PRIMES:
        if n == q:
            return True
        if n % q == 0:
            return False
    d, s = n - 1, 0
    while d % 2 == 0:
        d //= 2
        s += 1
    if n < _MR_DETERMINISTIC_BOUND:
        witnesses = _MR_WITNESSES
    else:
        gen = random.Random(n & 0xFFFFFFFF)
        witnesses = tuple(gen.randrange(2, n - 1) for _ in range(40))
    return all(_mr_round(n, a, d, s) for a in witnesses)


def _pollard_rho(n: int) -> int:
    """Brent-cycle Pollard rho; returns a nontrivial factor of composite odd n."""
    if n % 2 == 0:
        return 2
    gen = random.Random(n)
    while True:
        y = gen.randrange(1, n)
        c = gen.randrange(1, n)
        m = 128
        g = r = q = 1
        while g == 1:
            x = y
            for _ in range(r):
                y = (y * y + c) % n
            k = 0
            while k < r and g == 1:
                ys = y
                for _ in range(min(m, r - k)):
                    y = (y * y + c) % n
                    q = q * abs(x - y) % n
                g = math.gcd(q, n)
                k += m
            r *= 2
        if g == n:
            g = 1
            while g == 1:
                ys = (ys * ys + c) % n
                g = math.gcd(abs(x - ys), n)
        if g != n:
            return g


def factorize(n: int) -> dict[int, int]:
    """Full factorization as {prime: exponent}. Exact for any n >= 1."""
    if n < 1:
        raise ValueError("factorize expects n >= 1")
    factors: dict[int, int] = {}
    for q in _SMALL_PRIMES:
        while n % q == 0:
            factors[q] = factors.get(q, 0) + 1
            n //= q
    stack = [n] if n > 1 else []
    while stack:
        m = stack.pop()
        if m == 1:
            continue
        if is_prime(m):
            factors[m] = factors.get(m, 0) + 1
            continue
        d = _pollard_rho(m)
        stack.append(d)
        stack.append(m // d)
    return factors


def merge_factorizations(*parts: dict[int, int]) -> dict[int, int]:
    total: dict[int, int] = {}
    for part in parts:
        for q, e in part.items():
            total[q] = total.get(q, 0) + e
    return total


def divisors_from_factorization(factors: dict[int, int]):
    """Yield every divisor (unsorted)."""
    divs = [1]
    for q, e in factors.items():
        divs = [d * q**k for d in divs for k in range(e + 1)]
    return divs


def largest_divisor_in_range(factors: dict[int, int], lo: int, hi: int) -> int | None:
    """Largest divisor d with lo <= d <= hi, or None."""
    best = None
    for d in divisors_from_factorization(factors):
        if lo <= d <= hi and (best is None or d > best):
            best = d
    return best
