from fractions import Fraction

import pytest

from hczonal.forms import LinearForm


def test_arithmetic_and_eval():
    a = LinearForm.make(3, {0: 1, 2: -1}, k=Fraction(1, 2), const=-1)
    b = LinearForm.make(3, {1: 2}, k=1)
    s = a + b - LinearForm.make(3, const=1)
    assert s([0.1, 0.2, 0.3], 0.4) == pytest.approx(0.1 + 0.4 - 0.3 + 0.6 - 2)
    assert (-a).scale(2)([1, 0, 0], 0) == pytest.approx(-2 + 2)
    assert (a + 2).const == 1


def test_str_and_integer_constant():
    assert str(LinearForm.make(2, {0: -1, 1: 1}, k=-1, const=1)) == "-l1+l2-k+1"
    assert str(LinearForm.zero(2)) == "0"
    assert LinearForm.make(2, const=3).is_integer_constant()
    assert not LinearForm.make(2, const=Fraction(1, 2)).is_integer_constant()
    assert not LinearForm.make(2, k=1).is_integer_constant()
