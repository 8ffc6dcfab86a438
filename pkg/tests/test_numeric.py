from fractions import Fraction

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from morrey import numeric
from morrey.numeric import exact, mpq


def test_exact_conversions():
    assert exact("1/2") == mpq(1, 2)
    assert exact("0.5") == mpq(1, 2)
    assert exact(0.25) == mpq(1, 4)
    assert exact(Fraction(3, 7)) == mpq(3, 7)
    assert exact(np.int64(5)) == 5


def test_exact_rejects_nonfinite():
    with pytest.raises(ValueError):
        exact(float("inf"))


def test_exact_sqrt():
    assert numeric.exact_sqrt(mpq(1, 128) * 2) == mpq(1, 8)
    assert abs(numeric.exact_sqrt(mpq(1, 128)) - 2**0.5 / 16) < 1e-15


def test_mode_checks():
    assert numeric.mode_of_values([mpq(1), 2]) == "rational"
    assert numeric.mode_of_values([mpq(1), 2.0]) == "float"
    with pytest.raises(ValueError):
        numeric.check_mode("decimal")


@given(st.fractions(max_denominator=10**6))
def test_dump_load_roundtrip(q):
    x = exact(q)
    assert numeric.load_number(numeric.dump_number(x)) == x


@given(st.floats(allow_nan=False, allow_infinity=False))
def test_float_dump_roundtrip(x):
    assert numeric.load_number(numeric.dump_number(x), "float") == x
