"""Trial-division counters, independent of the sieve tables.  Slow; for checks only."""
import math
from functools import lru_cache


@lru_cache(maxsize=None)
def factor(n):
    """Distinct prime factors of n in increasing order, as a tuple."""
    out, p = [], 2
    while p * p <= n:
        if n % p == 0:
            out.append(p)
            while n % p == 0:
                n //= p
        p += 1
    if n > 1:
        out.append(n)
    return tuple(out)


def largest_prime_factor(n):
    f = factor(n)
    return f[-1] if f else 1


def radical(n):
    return math.prod(factor(n))


def _top(x):
    return int(math.floor(x * (1 + 1e-12)))


def psi(x, y):
    return sum(1 for n in range(1, _top(x) + 1) if largest_prime_factor(n) <= y * (1 + 1e-12))


def n_count(x, y):
    return sum(1 for n in range(1, _top(x) + 1) if radical(n) <= y * (1 + 1e-12))


def d_count(x, u):
    total = 0
    for n in range(1, _top(x) + 1):
        p = largest_prime_factor(n)
        if u == int(u):
            total += p ** int(u) <= n
        else:
            total += p ** u <= n * (1 + 1e-12)
    return total


def s_count(x, theta, alpha):
    total = 1 if x >= 1 else 0
    for n in range(2, _top(x) + 1):
        k = radical(n)
        inv = 1 / theta
        if alpha == 0 and inv == int(inv):
            total += k ** int(inv) <= n
        else:
            total += k <= n ** theta * math.log(n) ** alpha * (1 + 1e-12)
    return total
