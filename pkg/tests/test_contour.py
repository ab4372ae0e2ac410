import numpy as np
import pytest
from scipy.special import beta

from hczonal.contour import (ContourError, ContourSpec, Factor, GZPattern, Loop, MultivaluedIntegrand,
                             QuadratureSpec, Segment, build_omega, build_omega_delta, constant_path,
                             delta_barycenter, eval_phase_tracked, expected_factor_count,
                             integrate_cycle, integrate_cycle_fixed, integrate_delta, tvar, zvar)
from hczonal.errors import InvalidInput, RegionError
from hczonal.forms import LinearForm


def _families(f):
    fam = {"zpow": 0, "zz": 0, "zt": 0, "adj": 0, "row": 0, "tpow": 0}
    for x in f.factors:
        if x.b is None:
            fam["zpow" if x.a[0] == "z" else "tpow"] += 1
        elif x.a[0] == "z" and x.b[0] == "z":
            fam["zz"] += 1
        elif "z" in (x.a[0], x.b[0]):
            fam["zt"] += 1
        elif x.a[2] == x.b[2]:
            fam["row"] += 1
        else:
            fam["adj"] += 1
    return fam


@pytest.mark.parametrize("n", [1, 2, 3, 4])
def test_build_omega_count(n):
    assert len(build_omega(n).factors) == expected_factor_count(n)


def test_build_omega_rank_one_and_two():
    f1 = build_omega(1)
    assert sorted(map(str, f1.factors)) == sorted([
        "z1^(l1+1/2*k)", "z2^(l1+1/2*k)", "(z2-z1)^(-2*k+1)",
        "(z1-t11)^(k-1)", "(z2-t11)^(k-1)", "t11^(-l1+l2-k)"])
    assert _families(build_omega(2)) == {"zpow": 3, "zz": 3, "zt": 6, "adj": 2, "row": 1, "tpow": 3}
    assert len(build_omega(2).factors) == 18


def test_exponents_at_half():
    for x in build_omega(2).factors:
        if x.b is not None and "z" in (x.a[0], x.b[0]) and "t" in (x.a[0], x.b[0]):
            assert x.exponent([0, 0, 0], 0.5) == pytest.approx(-0.5)


def test_delta_orientation_flips():
    assert build_omega_delta(1).orientation_flips(build_omega(1)) == 1
    flipped = [x for x in build_omega_delta(1).factors if x.b is not None and x.a == tvar(1, 1)]
    assert [str(x) for x in flipped] == ["(t11-z1)^(k-1)"]


@pytest.mark.parametrize("n,z", [(1, [1.0, 2.0]), (2, [1.0, 2.0, 3.0]), (3, [1.0, 1.5, 3.0, 4.0])])
def test_delta_integrand_positive_inside(n, z):
    p = delta_barycenter(n, z)
    assert p.in_delta()
    assert p.variable_count == n * (n + 1) // 2 + n + 1
    lam = np.linspace(0.3, -0.2, n + 1)
    v = eval_phase_tracked(build_omega_delta(n), constant_path(p), [0.0, 0.5], lam, 0.6)
    assert np.all(v.phase == 0)
    assert np.all(v.value.real > 0)


def test_rank_one_sample_point_positive():
    p = GZPattern(1, {(1, 1): 1.5}, np.array([1.0, 2.0]))
    v = eval_phase_tracked(build_omega_delta(1), constant_path(p), [0.0], [0.2, -0.1], 0.45)
    assert v.phase[0] == 0 and v.value[0].real > 0


def _single(exponent_const, dim=1):
    t = tvar(1, 1)
    return MultivaluedIntegrand(1, (Factor(t, None, LinearForm.make(dim, {0: 1}, const=exponent_const)),), (t,), dim)


def test_full_loop_phase_winding():
    a = 0.37
    f = _single(0)
    s = np.linspace(0, 1, 2001)
    path = lambda s: {tvar(1, 1): 1.3 * np.exp(2j * np.pi * s)}
    v = eval_phase_tracked(f, path, s, [a], 0)
    assert v.phase[-1] - v.phase[0] == pytest.approx(2 * np.pi * a, rel=1e-12)


def test_half_loop_phase_and_additivity():
    k = 0.6
    t, z1 = tvar(1, 1), zvar(1)
    f = MultivaluedIntegrand(1, (Factor(z1, t, LinearForm.make(2, k=1, const=-1)),
                                 Factor(t, None, LinearForm.make(2, {0: 1}))), (t,), 2)
    s = np.linspace(0, 1, 10_000)
    eps = 0.1
    path = lambda s: {t: 2.0 + eps * np.exp(1j * np.pi * (1 + s)), z1: 2.0}
    v = eval_phase_tracked(f, path, s, [0.3, 0.0], k)
    assert v.per_factor_phase[0][-1] - v.per_factor_phase[0][0] == pytest.approx(np.pi * (k - 1), rel=1e-9)
    assert np.max(np.abs(v.phase - sum(v.per_factor_phase))) < 1e-12


def test_branch_point_collision_raises():
    t, z1 = tvar(1, 1), zvar(1)
    f = MultivaluedIntegrand(1, (Factor(z1, t, LinearForm.make(1, k=1, const=-1)),), (t,), 1)
    with pytest.raises(ContourError):
        eval_phase_tracked(f, lambda s: {t: np.full(s.shape, 2.0), z1: 2.0}, [0.0, 1.0], [0.0], 0.5)


def test_loop_around_origin_closed_form():
    a, r = 0.37, 1.3
    spec = ContourSpec.make({tvar(1, 1): Loop(zvar(1))})
    val = integrate_cycle(spec, _single(-1), [r], [a], 0.5, QuadratureSpec(tol=1e-13)).value
    assert val == pytest.approx((np.exp(2j * np.pi * a) - 1) * r ** a / a, rel=1e-12)


def test_contractible_loop_vanishes():
    spec = ContourSpec.make({tvar(1, 1): Loop(zvar(1))})
    val = integrate_cycle_fixed(spec, _single(2), [1.0], [0.0], 0.5, 32)
    assert abs(val) < 1e-13


def test_delta_rank_one_brute_force():
    z1, z2, k = 1.0, 2.0, 0.5
    got = integrate_delta(1, [z1, z2], [0.0, 0.0], k).value
    # t = z1 + (z2 - z1) sin^2 phi removes both endpoint singularities
    M = 100_000
    phi = (np.arange(M) + 0.5) * (np.pi / 2) / M
    t = z1 + (z2 - z1) * np.sin(phi) ** 2
    inner = np.sum(2 * t ** (-k)) * (np.pi / 2) / M
    pref = (z1 * z2) ** (k / 2) * (z2 - z1) ** (1 - 2 * k)
    assert got == pytest.approx(pref * inner, rel=1e-8)


def test_delta_degenerate_interval_is_zero():
    assert integrate_delta(1, [1.0, 1.0], [0.1, 0.0], 0.5).value == 0


def test_delta_region_errors():
    with pytest.raises(RegionError):
        integrate_delta(1, [2.0, 1.0], [0.0, 0.0], 0.5)
    with pytest.raises(InvalidInput):
        integrate_delta(3, [1, 2, 3, 4], [0, 0, 0, 0], 0.5)
    with pytest.raises(InvalidInput):
        integrate_delta(1, [1.0, 2.0], [0.0, 0.0], -0.2)


def test_delta_rank_two_self_consistency():
    lam, z, k = [0.21, -0.07, -0.11], [1.0, 2.0, 3.0], 0.6
    a = integrate_delta(2, z, lam, k, QuadratureSpec(tol=1e-6)).value
    b = integrate_delta(2, z, lam, k, QuadratureSpec(tol=1e-8)).value
    assert abs(a - b) / abs(b) < 1e-5


@pytest.mark.parametrize("k", [0.4, 0.7, 1.3])
def test_degeneration_rate(k):
    lam = np.array([0.1, -0.2])
    vals, eps = [], [1e-2, 1e-3]
    for e in eps:
        z = np.array([1.0, 1.0 + e])
        pref = np.prod(z) ** (lam[0] + k / 2) * (z[1] - z[0]) ** (1 - 2 * k)
        vals.append(abs(integrate_delta(1, z, lam, k).value / pref))
    slope = np.log(vals[1] / vals[0]) / np.log(eps[1] / eps[0])
    assert abs(slope - (2 * k - 1)) < 0.1


def test_quadrature_error_decreases():
    k = 0.45
    exact = beta(k, k)
    lam = -np.array([k / 2, -k / 2])  # lambda = -rho: integral equals B(k, k)
    errs = [abs(integrate_cycle_fixed(ContourSpec.delta(1), build_omega_delta(1), [1.0, 3.0], lam, k, N) - exact)
            for N in (2, 4, 8)]
    assert errs[0] > errs[1] > errs[2]
    assert errs[2] < 1e-6


def test_homotopy_invariance_of_loop():
    lam, k, z = [0.13, -0.05], 0.4, [1.0, 2.0]
    f = build_omega(1)
    q = QuadratureSpec(tol=1e-10)
    plain = integrate_cycle(ContourSpec.make({tvar(1, 1): Loop(zvar(2))}), f, z, lam, k, q).value
    dented = integrate_cycle(ContourSpec.make({tvar(1, 1): Loop(zvar(2), 0.2)}), f, z, lam, k, q).value
    assert abs(plain - dented) <= 10 * q.tol * abs(plain)


def test_contour_spec_validation():
    t11, t12, t22 = tvar(1, 1), tvar(1, 2), tvar(2, 2)
    with pytest.raises(InvalidInput):
        ContourSpec.make({t11: Loop(t12), t12: Loop(t11)})
    with pytest.raises(InvalidInput):
        ContourSpec(((t11, Segment(t12, t22)), (t12, Loop(zvar(1))), (t22, Loop(zvar(2))))).validate()
    with pytest.raises(InvalidInput):
        ContourSpec.make({t11: Loop(zvar(1), 1.5)})
    spec = ContourSpec.delta(2)
    assert [v for v, _ in spec.cycles][-1] == t11
