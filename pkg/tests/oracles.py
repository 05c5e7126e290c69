"""Independent reference computations used by the tests.

Nothing here imports from socialss: interpolation is done by solving the
Vandermonde system with Gaussian elimination, inverses by brute force or
Fermat, primality by trial division.
"""

from __future__ import annotations

import itertools


def is_prime_trial(n: int) -> bool:
    if n < 2:
        return False
    d = 2
    while d * d <= n:
        if n % d == 0:
            return False
        d += 1
    return True


def brute_inverse(a: int, p: int) -> int:
    (inv,) = [v for v in range(1, p) if a * v % p == 1]
    return inv


def fermat_inverse(a: int, p: int) -> int:
    return pow(a, p - 2, p)


def poly_eval(coeffs: list[int], x: int, p: int) -> int:
    return sum(c * x**k for k, c in enumerate(coeffs)) % p


def solve_coefficients(points: list[tuple[int, int]], p: int) -> list[int]:
    """Coefficients a_0..a_{k-1} of the polynomial through ``points`` (Gauss-Jordan mod p)."""
    k = len(points)
    rows = [[pow(x, j, p) for j in range(k)] + [y % p] for x, y in points]
    for col in range(k):
        piv = next(r for r in range(col, k) if rows[r][col] % p)
        rows[col], rows[piv] = rows[piv], rows[col]
        inv = fermat_inverse(rows[col][col], p)
        rows[col] = [v * inv % p for v in rows[col]]
        for r in range(k):
            if r != col and rows[r][col]:
                f = rows[r][col]
                rows[r] = [(a - f * b) % p for a, b in zip(rows[r], rows[col])]
    return [rows[j][k] for j in range(k)]


def interpolate_oracle(points: list[tuple[int, int]], x: int, p: int) -> int:
    return poly_eval(solve_coefficients(points, p), x, p)


def consistent_polynomials(points: list[tuple[int, int]], t: int, p: int) -> list[tuple[int, ...]]:
    """Every coefficient vector of degree < t passing through ``points`` (enumeration)."""
    return [
        coeffs
        for coeffs in itertools.product(range(p), repeat=t)
        if all(poly_eval(list(coeffs), x, p) == y for x, y in points)
    ]
