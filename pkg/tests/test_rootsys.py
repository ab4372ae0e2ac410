import itertools

import numpy as np
import pytest
from hypothesis import given, strategies as st

from hczonal.errors import InvalidInput
from hczonal.rootsys import (RootSystemAn, WeylElement, act, delta, identity, pairing, rho,
                             simple_reflection, weyl_elements, weyl_from_exponent)


@pytest.mark.parametrize("n", [1, 2, 3, 4, 5])
def test_root_system_invariants(n):
    R = RootSystemAn(n)
    assert len(R.positive_roots) == n * (n + 1) // 2
    half = sum(R.root_vector(r) for r in R.positive_roots) / 2
    assert np.allclose(half, R.delta)
    assert abs(R.delta.sum()) < 1e-15
    assert R.fundamental_weights.shape == (n, n + 1)


def test_pairing_examples():
    assert pairing([3, 1], (1, 2)) == 2
    assert pairing([0.4, 0.4], (1, 2)) == 0
    assert pairing([0.3, -0.1, -0.2], (1, 3)) == pytest.approx(0.5)
    with pytest.raises(InvalidInput):
        pairing([1, 2], (1, 3))
    with pytest.raises(InvalidInput):
        pairing([1, 2], (2, 1))


def test_rho_examples():
    assert np.allclose(rho(2, 0.5), [0.5, 0, -0.5])
    assert np.allclose(rho(1, 1), [0.5, -0.5])
    assert np.allclose(rho(4, 0), 0)


def test_weyl_elements_counts_and_lengths():
    assert sorted(w.length for w in weyl_elements(1)) == [0, 1]
    assert sorted(w.length for w in weyl_elements(2)) == [0, 1, 1, 2, 2, 3]
    assert len(weyl_elements(3)) == 24
    with pytest.raises(InvalidInput):
        weyl_elements(7)


def test_act_examples():
    assert np.allclose(act(identity(1), [3, 1]), [3, 1])
    assert np.allclose(act(simple_reflection(1, 1), [3, 1]), [1, 3])


@given(st.lists(st.floats(-5, 5), min_size=4, max_size=4))
def test_act_permutes_components(lam):
    for w in weyl_elements(3):
        wl = act(w, lam)
        assert sorted(wl.real) == sorted(lam)
        assert abs(wl.sum() - sum(lam)) < 1e-12


def test_act_pairing_convention():
    lam = np.array([0.3, -0.7, 1.1, 0.2])
    for w in weyl_elements(3):
        winv = w.inverse()
        for i, j in itertools.combinations(range(1, 5), 2):
            a, b = winv.perm[i - 1] + 1, winv.perm[j - 1] + 1
            assert pairing(act(w, lam), (i, j)) == pytest.approx(lam[a - 1] - lam[b - 1])


def test_length_changes_by_one_under_simple_reflection():
    for n in (2, 3):
        for w in weyl_elements(n):
            for a in range(1, n + 1):
                assert abs(w.compose(simple_reflection(n, a)).length - w.length) == 1


def test_rho_pairing_sum_two_ways():
    for n in (1, 2, 5):
        k = 0.37
        s = sum(pairing(rho(n, k), r) for r in RootSystemAn(n).positive_roots)
        assert abs(s - 2 * k * np.dot(delta(n), delta(n))) < 1e-12


def test_weyl_from_exponent_roundtrip():
    lam = np.array([0.2, -0.3, 0.05])
    for w in weyl_elements(2):
        assert weyl_from_exponent(act(w, lam) + rho(2, 0.6), lam, 0.6) == w


def test_one_line_and_inverse():
    w = WeylElement((1, 2, 0))
    assert w.one_line() == [2, 3, 1]
    assert w.compose(w.inverse()).is_identity()
    assert str(w) == "[2,3,1]"
