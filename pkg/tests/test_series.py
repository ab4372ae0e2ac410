import numpy as np
import pytest

from hczonal.errors import InvalidInput, RegionError, ResonanceError
from hczonal.rootsys import act, identity, rho, simple_reflection, weyl_elements
from hczonal.series import (cone, eigenvalue, eval_series, eval_zonal, height_count, hc_series,
                            operator_residual)


def test_cone_enumeration():
    for n in (1, 2, 3):
        for h in range(6):
            ms = list(cone(n, h))
            assert len(ms) == len(set(ms)) == height_count(n, h)
            assert all(sum(m) == h and min(m) >= 0 for m in ms)


def test_eigenvalue_examples():
    mu = np.array([0.3, -0.2, 0.7])
    assert eigenvalue(mu, 0) == pytest.approx(np.sum(mu ** 2))
    assert eigenvalue(np.zeros(3), 0) == 0


def test_eigenvalue_weyl_invariant():
    rng = np.random.default_rng(0)
    for n in (1, 2, 3):
        for _ in range(100):
            lam = rng.uniform(-1, 1, n + 1) + 1j * rng.uniform(-1, 1, n + 1)
            k = rng.uniform(0.1, 2) + 0.1j
            e0 = eigenvalue(lam + rho(n, k), k)
            for w in weyl_elements(n):
                assert abs(eigenvalue(act(w, lam) + rho(n, k), k) - e0) < 1e-12 * max(1, abs(e0))


def test_zero_truncation_is_leading_monomial():
    lam, k, z = np.array([0.3, -0.1]), 0.6, np.array([0.3, 1.1])
    s = hc_series(identity(1), lam, k, 0)
    mu = lam + rho(1, k)
    assert eval_series(s, z).value == pytest.approx(np.prod(z ** mu), rel=1e-14)


@pytest.mark.parametrize("n,height", [(1, 12), (2, 12), (3, 6)])
def test_operator_residual(n, height):
    rng = np.random.default_rng(n)
    lam = rng.uniform(-0.5, 0.5, n + 1)
    for w in weyl_elements(n):
        assert operator_residual(hc_series(w, lam, 0.63, height)) < 1e-10


def test_operator_detects_a_wrong_coefficient():
    s = hc_series(identity(2), np.array([0.2, -0.1, 0.05]), 0.6, 5)
    s.coeffs[(1, 1)] *= 1.001
    assert operator_residual(s) > 1e-6


def _gauss(a, b, c, N):
    out, t = [], 1.0 + 0j
    for m in range(N):
        out.append(t)
        t *= (a + m) * (b + m) / ((c + m) * (m + 1))
    return out


def test_rank_one_gauss_coefficients():
    lam, k = np.array([0.3, -0.1]), 0.6
    d = lam[0] - lam[1]
    for w, (a, b, c) in ((identity(1), (d + k, k, 1 + d)), (simple_reflection(1, 1), (k, -d + k, 1 - d))):
        s = hc_series(w, lam, k, 10)
        ref = _gauss(a, b, c, 11)
        for m in range(11):
            assert abs(s.coeffs[(m,)] - ref[m]) < 1e-12


def test_triangularity_masked():
    lam, k = np.array([0.2, -0.1, 0.05]), 0.6
    full = hc_series(identity(2), lam, k, 6)
    for h in range(1, 7):
        masked = hc_series(identity(2), lam, k, h, mask_above=h - 1)
        for m, c in full.coeffs.items():
            if sum(m) == h:
                assert masked.coeffs[m] == c


def test_resonance_named():
    with pytest.raises(ResonanceError) as exc:
        hc_series(identity(1), np.array([-0.5, 0.5]), 0.6, 5)
    assert exc.value.where == (1,)


def test_truncation_limit():
    with pytest.raises(InvalidInput):
        hc_series(identity(1), [0.1, 0.0], 0.5, 31)


def test_tail_bound_halves():
    lam, k = np.array([0.3, -0.1]), 0.6
    b = [eval_series(hc_series(identity(1), lam, k, N), [0.5, 1.0]).tail_bound for N in (11, 12, 13)]
    assert b[1] <= 0.5 * b[0] * (1 + 1e-9)
    assert b[2] <= 0.5 * b[1] * (1 + 1e-9)


def test_tail_bound_covers_change():
    lam, k, z = np.array([0.3, -0.1]), 0.6, [0.2, 1.0]
    for w in weyl_elements(1):
        a = eval_series(hc_series(w, lam, k, 10), z)
        b = eval_series(hc_series(w, lam, k, 20), z)
        assert abs(a.value - b.value) < a.tail_bound


def test_region_checked():
    s = hc_series(identity(1), [0.1, 0.0], 0.5, 4)
    with pytest.raises(RegionError):
        eval_series(s, [0.9, 1.0])


def test_zonal_swap_and_permutation_symmetry():
    lam, k = np.array([0.27, -0.27]), 0.55
    z = [0.3, 1.0]
    a = eval_zonal(lam, k, z, 25).value
    assert eval_zonal(-lam, k, z, 25).value == pytest.approx(a, rel=1e-12)
    assert eval_zonal(lam, k, z[::-1], 25).value == pytest.approx(a, rel=1e-12)
    lam3 = np.array([0.21, -0.07, -0.11])
    z3 = [0.1, 0.35, 1.0]
    v = eval_zonal(lam3, 0.6, z3, 20)
    assert eval_zonal(lam3, 0.6, [0.35, 1.0, 0.1], 20).value == pytest.approx(v.value, rel=1e-12)


def test_zonal_extrapolates_to_one():
    # fit in log r on [0.5, 0.8] and evaluate at r = 1; limited by the series error near 0.8
    lam, k, deg = np.array([0.13, -0.21]), 0.4, 3
    r = 0.65 + 0.15 * np.cos(np.pi * (np.arange(deg + 1) + 0.5) / (deg + 1))
    v = np.array([eval_zonal(lam, k, [x, 1.0], 30).value.real for x in r])
    p = np.polynomial.Chebyshev.fit(np.log(r), v, deg)
    assert abs(p(0.0) - 1) < 1e-4
