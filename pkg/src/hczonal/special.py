"""Gamma function, c-function, decomposition coefficients and normalizations."""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np
from scipy import special as sps

from .errors import PoleError, ResonanceError
from .rootsys import (RootSystemAn, WeylElement, act, as_lambda, delta, identity,
                      pairing, rho)

GENERIC_TOL = 1e-8


def _near_nonpositive_int(z: complex, tol: float = GENERIC_TOL) -> bool:
    z = complex(z)
    return z.real < 0.5 and abs(z - round(z.real)) < tol


def _near_int(z: complex, tol: float = GENERIC_TOL) -> bool:
    z = complex(z)
    return abs(z - round(z.real)) < tol


def loggamma(z: complex) -> complex:
    """Principal log-Gamma (scipy); raises at poles."""
    if _near_nonpositive_int(z, 0.0 if complex(z).imag else 1e-14):
        raise PoleError(f"Gamma pole at {z}")
    return complex(sps.loggamma(complex(z)))


def cgamma(z: complex) -> complex:
    z = complex(z)
    if z.imag == 0 and z.real <= 0 and z.real == round(z.real):
        raise PoleError(f"Gamma pole at {z}")
    return complex(sps.gamma(z))


def _check_gamma_arg(x: complex, root=None):
    if _near_nonpositive_int(x):
        raise PoleError(f"Gamma argument {x:.6g} within {GENERIC_TOL} of a pole", root=root)


def check_generic(w: WeylElement, lam, k: complex, *, sines: bool = True, gammas: bool = True):
    """Raise if (w lam, alpha) is near an integer or a Gamma argument near a pole."""
    lam = as_lambda(lam)
    n = lam.size - 1
    wl = act(w, lam)
    for root in RootSystemAn(n).positive_roots:
        x = -pairing(wl, root)
        if sines and _near_int(x):
            raise ResonanceError(f"(w lambda, alpha) = {-x:.6g} is an integer for root {root}", where=root)
        if gammas:
            _check_gamma_arg(x, root)
            _check_gamma_arg(x + k, root)


@dataclass(frozen=True)
class CFunctionValue:
    value: complex
    per_root_factors: tuple[tuple[tuple[int, int], complex], ...]
    log_value: complex = 0j


def _log_root_factor(x: complex, r: complex, k: complex, root) -> complex:
    for arg in (r, r + k, x, x + k):
        _check_gamma_arg(arg, root)
    return (loggamma(r + k) - loggamma(r)) - (loggamma(x + k) - loggamma(x))


def c_function(w: WeylElement, lam, k: complex) -> CFunctionValue:
    """Harish-Chandra c-function c(w lam, k) with its rank-one factors."""
    lam = as_lambda(lam)
    n = lam.size - 1
    k = complex(k)
    wl = act(w, lam)
    rh = rho(n, k)
    factors, total = [], 0j
    for root in RootSystemAn(n).positive_roots:
        lf = _log_root_factor(-pairing(wl, root), pairing(rh, root), k, root)
        total += lf
        factors.append((root, complex(np.exp(lf))))
    return CFunctionValue(complex(np.exp(total)), tuple(factors), total)


def _n_roots(n: int) -> int:
    return n * (n + 1) // 2


def b_coeff(w: WeylElement, lam, k: complex) -> complex:
    """Coefficient of the w-th loop cycle in the decomposition of the segment cycle."""
    lam = as_lambda(lam)
    n = lam.size - 1
    k = complex(k)
    check_generic(w, lam, k, gammas=False)
    wl = act(w, lam)
    N = _n_roots(n)
    log_num = 2j * np.pi * np.dot(lam, delta(n)) + 1j * np.pi * w.length * (k - 1)
    den = (2j) ** N
    for root in RootSystemAn(n).positive_roots:
        den *= np.sin(-np.pi * pairing(wl, root))
    return complex(np.exp(log_num) / den)


@dataclass(frozen=True)
class NormalizerFw:
    w: WeylElement
    value: complex


@dataclass(frozen=True)
class NormalizerFDelta:
    value: complex


def norm_Fw(w: WeylElement, lam, k: complex) -> NormalizerFw:
    """Prefactor whose inverse times the w-th loop integral gives F_w."""
    lam = as_lambda(lam)
    n = lam.size - 1
    k = complex(k)
    check_generic(w, lam, k)
    wl = act(w, lam)
    N = _n_roots(n)
    logv = 0j
    sines = 1.0 + 0j
    for root in RootSystemAn(n).positive_roots:
        x = -pairing(wl, root)
        logv += loggamma(x) - loggamma(x + k)
        sines *= np.sin(np.pi * x)
    _check_gamma_arg(k)
    logv += -2j * np.pi * np.dot(lam, delta(n)) - 1j * np.pi * (k - 1) * w.length
    logv += N * loggamma(k)
    return NormalizerFw(w, complex(np.exp(logv) * sines * (2j) ** N))


def norm_FDelta(n: int, k: complex) -> NormalizerFDelta:
    k = complex(k)
    logv = 0j
    for m in range(1, n + 2):
        _check_gamma_arg(m * k)
        logv += loggamma(m * k)
    logv -= (n + 1) * (n + 2) // 2 * loggamma(k)
    return NormalizerFDelta(complex(np.exp(logv)))


def connection_residual(w: WeylElement, lam, k: complex) -> float:
    """|norm_FDelta * b * norm_Fw - c| / |c|."""
    n = as_lambda(lam).size - 1
    c = c_function(w, lam, k).value
    lhs = norm_FDelta(n, k).value * b_coeff(w, lam, k) * norm_Fw(w, lam, k).value
    return abs(lhs - c) / abs(c)


def _rank_one_factor_direct(x: complex, r: complex, k: complex) -> complex:
    return cgamma(r + k) / cgamma(r) * cgamma(x) / cgamma(x + k)


def gk_factor_check(lam, k: complex, w: WeylElement) -> float:
    """Relative residual of c = c_{A_{n-1} block} * c_{last column}.

    The block factor is recomputed as a rank n-1 c-function on the first n
    components of w lam; the last column uses direct Gamma values.
    """
    lam = as_lambda(lam)
    n = lam.size - 1
    k = complex(k)
    full = c_function(w, lam, k).value
    if n == 1:
        return abs(full - c_function(w, lam, k).value) / abs(full)
    wl = act(w, lam)
    block = c_function(identity(n - 1), wl[:n], k).value
    col = 1.0 + 0j
    for i in range(1, n + 1):
        col *= _rank_one_factor_direct(-(wl[i - 1] - wl[n]), k * (n + 1 - i), k)
    return abs(full - block * col) / abs(full)


# ------------------------------------------------ vectorized over the Weyl group

def _weyl_tables(n: int):
    from .rootsys import weyl_elements
    W = weyl_elements(n)
    inv = np.array([w.inverse().perm for w in W])  # (w lam)_i = lam[inv[i]]
    lengths = np.array([w.length for w in W])
    roots = np.array(RootSystemAn(n).positive_roots) - 1
    return W, inv, lengths, roots


def _pairings_all(lam, n):
    _, inv, _, roots = _weyl_tables(n)
    wl = lam[inv]
    return wl, wl[:, roots[:, 0]] - wl[:, roots[:, 1]]


def _check_poles_array(x):
    x = np.asarray(x)
    bad = (x.real < 0.5) & (np.abs(x - np.round(x.real)) < GENERIC_TOL)
    if np.any(bad):
        raise PoleError(f"Gamma argument within {GENERIC_TOL} of a pole")


def log_c_function_all(lam, k: complex) -> np.ndarray:
    """log c(w lam, k) for every w in ``weyl_elements(n)`` order."""
    lam = as_lambda(lam)
    n = lam.size - 1
    k = complex(k)
    _, _, _, roots = _weyl_tables(n)
    _, pw = _pairings_all(lam, n)
    x = -pw
    r = k * (roots[:, 1] - roots[:, 0]).astype(float)
    args = [r, r + k, x, x + k]
    for a in args:
        _check_poles_array(a)
    lg = sps.loggamma
    per = (lg(r + k) - lg(r))[None, :] - (lg(x + k) - lg(x))
    return per.sum(axis=1)


def connection_residual_all(lam, k: complex) -> np.ndarray:
    """Relative residual of norm_FDelta * b * norm_Fw = c, for every w."""
    lam = as_lambda(lam)
    n = lam.size - 1
    k = complex(k)
    _, _, lengths, _ = _weyl_tables(n)
    _, pw = _pairings_all(lam, n)
    x = -pw
    if np.any(np.abs(x - np.round(x.real)) < GENERIC_TOL):
        raise ResonanceError("(w lambda, alpha) is an integer")
    _check_poles_array(x)
    _check_poles_array(x + k)
    N = _n_roots(n)
    lg = sps.loggamma
    ld = np.dot(lam, delta(n))
    sin_prod = np.prod(np.sin(np.pi * x), axis=1)
    b = (np.exp(2j * np.pi * ld + 1j * np.pi * lengths * (k - 1))
         / ((2j) ** N * np.prod(np.sin(-np.pi * pw), axis=1)))
    log_nfw = ((lg(x) - lg(x + k)).sum(axis=1) - 2j * np.pi * ld
               - 1j * np.pi * (k - 1) * lengths + N * lg(k))
    nfw = np.exp(log_nfw) * sin_prod * (2j) ** N
    nd = norm_FDelta(n, k).value
    c = np.exp(log_c_function_all(lam, k))
    return np.abs(nd * b * nfw - c) / np.abs(c)


def gk_factor_check_all(lam, k: complex) -> np.ndarray:
    """gk_factor_check for every w at once."""
    lam = as_lambda(lam)
    n = lam.size - 1
    k = complex(k)
    full = np.exp(log_c_function_all(lam, k))
    if n == 1:
        return np.abs(full - full) / np.abs(full)
    wl, _ = _pairings_all(lam, n)
    bi, bj = np.triu_indices(n, 1)
    xb = -(wl[:, bi] - wl[:, bj])
    rb = k * (bj - bi).astype(float)
    lg = sps.loggamma
    blocks = np.exp(((lg(rb + k) - lg(rb))[None, :] - (lg(xb + k) - lg(xb))).sum(axis=1))
    i = np.arange(1, n + 1)
    x = -(wl[:, :n] - wl[:, n:n + 1])
    r = k * (n + 1 - i)
    g = sps.gamma
    col = np.prod(g(r + k) / g(r) * g(x) / g(x + k), axis=1)
    return np.abs(full - blocks * col) / np.abs(full)
