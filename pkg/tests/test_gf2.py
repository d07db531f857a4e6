import random

import numpy as np
import pytest
import sympy
from hypothesis import given, strategies as st

from limrand import gf2
from limrand.errors import ParameterError


def _sympy_irreducible(f: int) -> bool:
    x = sympy.symbols("x")
    coeffs = [int(b) for b in bin(f)[2:]]
    return sympy.Poly(coeffs, x, modulus=2).is_irreducible


@pytest.mark.parametrize("m", range(1, 11))
def test_irreducible_matches_sympy(m):
    for f in range(1 << m, 1 << (m + 1)):
        assert gf2.is_irreducible(f) == _sympy_irreducible(f)


def test_known_smallest_polynomials():
    assert gf2.irreducible_poly(3) == 0b1011
    assert gf2.irreducible_poly(8) == 0b100011011
    with pytest.raises(ParameterError):
        gf2.irreducible_poly(0)
    with pytest.raises(ParameterError):
        gf2.irreducible_poly(63)


@given(st.integers(2, 62), st.data())
def test_field_axioms(m, data):
    a, b, c = (data.draw(st.integers(0, (1 << m) - 1)) for _ in range(3))
    mul = lambda x, y: gf2.gf_mul(x, y, m)
    assert mul(a, b) == mul(b, a)
    assert mul(a, mul(b, c)) == mul(mul(a, b), c)
    assert mul(a, b ^ c) == mul(a, b) ^ mul(a, c)
    assert mul(a, 1) == a
    assert mul(a, b) < (1 << m)


@pytest.mark.parametrize("m", [1, 3, 8, 16, 17, 20, 21, 33, 44, 62])
def test_poly_eval_matches_horner_oracle(m):
    rng = random.Random(m)
    coeffs = [rng.randrange(1 << m) for _ in range(7)]
    pts = [rng.randrange(1 << m) for _ in range(40)] + [0, 1]
    expected = []
    for x in pts:
        acc = 0
        for c in coeffs:
            acc = gf2.gf_mul(acc, x, m) ^ c
        expected.append(acc)
    assert gf2.poly_eval(coeffs, pts, m).tolist() == expected


def test_poly_eval_rejects_points_outside_field():
    with pytest.raises(ParameterError):
        gf2.poly_eval([1], [8], 3)


def test_multiplicative_group_is_cyclic_for_tables():
    exp, log = gf2._tables(5)
    assert sorted(exp[:31].tolist()) == list(range(1, 32))
    assert all(exp[log[a]] == a for a in range(1, 32))
    assert np.all(exp[31:62] == exp[:31])
