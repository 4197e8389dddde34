from fractions import Fraction

import numpy as np
import pytest

from qfasim import numeric as nm
from qfasim.errors import DimensionError, ParseError
from qfasim.numeric import GaussianRational as G


def test_gaussian_arithmetic():
    a, b = G(1, 2), G("1/2", -1)
    assert a + b == G(Fraction(3, 2), 1)
    assert a * b == G(Fraction(1, 2) + 2, -1 + 1)
    assert (a / b) * b == a
    assert a.conjugate() == G(1, -2)
    assert a.abs2() == 5
    assert -a == G(-1, -2)
    assert 1 - a == G(0, -2)


def test_gaussian_mixes_with_fraction_and_int():
    assert G(1, 1) * Fraction(1, 2) == G("1/2", "1/2")
    assert G(3) == 3
    assert hash(G(3)) == hash(G(Fraction(3)))
    assert complex(G("1/4", "-1/2")) == 0.25 - 0.5j


def test_float_to_fraction_uses_shortest_decimal():
    assert nm._frac(0.1) == Fraction(1, 10)
    with pytest.raises(ValueError):
        nm._frac(float("nan"))


def test_object_matmul_dispatches():
    u = nm.complex_matrix([["3/5", "-4/5"], ["4/5", "3/5"]], exact=True)
    prod = nm.dagger(u) @ u
    assert all(prod[i, j] == (1 if i == j else 0) for i in range(2) for j in range(2))


def test_pairs_versus_rows():
    v = nm.complex_vector([[1, 2], [0, "1/2"]])
    assert v.shape == (2,)
    assert v[0] == 1 + 2j
    m = nm.real_matrix([[1, 2], [3, 4]])
    assert m.shape == (2, 2)


def test_ragged_rows_rejected():
    with pytest.raises(DimensionError):
        nm.real_matrix([[1, 2], [3]])


def test_complex_entry_in_real_matrix_rejected():
    with pytest.raises(ValueError):
        nm.real_matrix([[[1, 1]]], exact=True)


def test_round_trip_exact_float():
    a = np.array([[0.5, -0.25j], [1.0, 0.0]])
    e = nm.to_exact(a)
    assert nm.is_exact(e)
    assert np.array_equal(nm.to_float(e), a)


def test_encode_decode_scalars():
    assert nm.encode_scalar(Fraction(-3, 4)) == "-3/4"
    assert nm.encode_scalar(G(1, "1/3")) == ["1", "1/3"]
    assert nm.encode_scalar(1 + 2j) == [1.0, 2.0]
    for bad in ("x/y", [1, 2, 3], True, None, "1/0"):
        with pytest.raises(ParseError):
            nm.decode_scalar(bad, "f")


def test_max_abs_both_modes():
    assert nm.max_abs(nm.complex_matrix([[G(3, 4)]], exact=True)) == pytest.approx(5.0)
    assert nm.max_abs(np.zeros((0, 0))) == 0.0


def test_integer_chain_matches_fraction_product():
    rng = np.random.default_rng(3)
    mats = [np.array([[Fraction(int(rng.integers(-5, 6)), int(rng.integers(1, 7))) for _ in range(3)]
                      for _ in range(3)], dtype=object) for _ in range(4)]
    v = np.array([Fraction(1, 3), Fraction(-2, 5), Fraction(0)], dtype=object)
    f = np.array([Fraction(1), Fraction(1, 2), Fraction(7, 4)], dtype=object)
    expected = v
    for m in mats:
        expected = nm.matmul(m, expected)
    expected = nm.matmul(f, expected)
    got = nm.integer_chain(nm.integer_form(f), [nm.integer_form(m) for m in mats], nm.integer_form(v))
    assert got == expected


def test_matmul_keeps_gaussian_type_on_real_data():
    a = nm.complex_matrix([[1, 0], [Fraction(1, 2), 2]], exact=True)
    out = nm.matmul(a, a)
    assert all(isinstance(x, nm.GaussianRational) for x in out.flat)
    assert out[1, 0] == Fraction(3, 2) and out[1, 1] == 4
