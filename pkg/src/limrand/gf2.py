"""Arithmetic in GF(2^m) for polynomial-based k-wise independent tapes.

Elements are integers in [0, 2^m) read as bit vectors of polynomial
coefficients.  The modulus is the smallest irreducible polynomial of degree m.
"""

from __future__ import annotations

import functools

import numpy as np
from numba import njit

from .errors import ParameterError

MAX_DEGREE = 62


def _pmul(a: int, b: int) -> int:
    r = 0
    while b:
        if b & 1:
            r ^= a
        a <<= 1
        b >>= 1
    return r


def _pmod(a: int, f: int) -> int:
    df = f.bit_length() - 1
    while a.bit_length() - 1 >= df:
        a ^= f << (a.bit_length() - 1 - df)
    return a


def _pgcd(a: int, b: int) -> int:
    while b:
        a, b = b, _pmod(a, b)
    return a


def _mulmod(a: int, b: int, f: int) -> int:
    return _pmod(_pmul(a, b), f)


def _prime_factors(x: int) -> list[int]:
    out, p = [], 2
    while p * p <= x:
        if x % p == 0:
            out.append(p)
            while x % p == 0:
                x //= p
        p += 1
    if x > 1:
        out.append(x)
    return out


def is_irreducible(f: int) -> bool:
    """Rabin's test for a polynomial over GF(2) given as an int bitmask."""
    m = f.bit_length() - 1
    if m < 1:
        return False
    if m == 1:
        return True

    def frob(k: int) -> int:
        # x^(2^k) mod f
        y = 2
        for _ in range(k):
            y = _mulmod(y, y, f)
        return y

    if frob(m) != _pmod(2, f):
        return False
    for q in _prime_factors(m):
        if _pgcd(f, frob(m // q) ^ 2) != 1:
            return False
    return True


@functools.lru_cache(maxsize=None)
def irreducible_poly(m: int) -> int:
    """Smallest irreducible polynomial of degree m (includes the x^m bit)."""
    if not 1 <= m <= MAX_DEGREE:
        raise ParameterError(f"field degree {m} outside 1..{MAX_DEGREE}")
    for low in range(1, 1 << m, 2):
        f = (1 << m) | low
        if is_irreducible(f):
            return f
    raise AssertionError("no irreducible polynomial found")


def gf_mul(a: int, b: int, m: int) -> int:
    return _mulmod(a, b, irreducible_poly(m))


@functools.lru_cache(maxsize=None)
def _tables(m: int) -> tuple[np.ndarray, np.ndarray]:
    """exp/log tables w.r.t. a primitive element; only for small m."""
    f = irreducible_poly(m)
    order = (1 << m) - 1
    qs = _prime_factors(order) if order > 1 else []

    def pw(a, e):
        r = 1
        while e:
            if e & 1:
                r = _mulmod(r, a, f)
            a = _mulmod(a, a, f)
            e >>= 1
        return r

    gen = next(a for a in range(1, 1 << m) if all(pw(a, order // q) != 1 for q in qs))
    exp, log = _fill_tables(np.uint64(gen), np.uint64(m), np.uint64(f), order)
    return exp, log


@njit(cache=True)
def _fill_tables(gen, m, f, order):
    exp = np.zeros(2 * order + 1, dtype=np.int64)
    log = np.zeros(order + 1, dtype=np.int64)
    x = np.uint64(1)
    for i in range(order):
        exp[i] = x
        exp[i + order] = x
        log[x] = i
        x = _clmul_mod(x, gen, m, f)
    return exp, log


@njit(cache=True)
def _horner_table(coeffs, points, exp, log):
    out = np.empty(points.shape[0], dtype=np.int64)
    for j in range(points.shape[0]):
        x = points[j]
        lx = log[x]
        acc = 0
        for i in range(coeffs.shape[0]):
            if acc != 0 and x != 0:
                acc = exp[log[acc] + lx]
            else:
                acc = 0
            acc ^= coeffs[i]
        out[j] = acc
    return out


@njit(cache=True)
def _clmul_mod(a, b, m, f):
    r = np.uint64(0)
    top = np.uint64(1) << np.uint64(m)
    one = np.uint64(1)
    while b:
        if b & one:
            r ^= a
        b >>= one
        a <<= one
        if a & top:
            a ^= f
    return r


@njit(cache=True)
def _horner_clmul(coeffs, points, m, f):
    out = np.empty(points.shape[0], dtype=np.uint64)
    for j in range(points.shape[0]):
        x = points[j]
        acc = np.uint64(0)
        for i in range(coeffs.shape[0]):
            acc = _clmul_mod(acc, x, m, f) ^ coeffs[i]
        out[j] = acc
    return out


TABLE_MAX = 20


def poly_eval(coeffs, points, m: int) -> np.ndarray:
    """Evaluate the polynomial with ``coeffs`` (highest degree first) at ``points``.

    Args:
        coeffs: field elements, leading coefficient first.
        points: field elements at which to evaluate.
        m: field degree.

    Returns:
        int64 array of field elements.
    """
    coeffs = np.asarray(coeffs, dtype=np.int64)
    points = np.asarray(points, dtype=np.int64)
    if points.size and (points.min() < 0 or points.max() >= (1 << m)):
        raise ParameterError("evaluation point outside the field")
    if m <= TABLE_MAX:
        exp, log = _tables(m)
        return _horner_table(coeffs, points, exp, log)
    f = np.uint64(irreducible_poly(m))
    res = _horner_clmul(coeffs.astype(np.uint64), points.astype(np.uint64), np.uint64(m), f)
    return res.astype(np.int64)
