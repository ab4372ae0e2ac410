"""Harish-Chandra series for the second-order A_n radial operator.

``L = sum (z_i d_i)^2 + k sum_{i<j} (z_i+z_j)/(z_i-z_j) (z_i d_i - z_j d_j)``.
In ``0 < |z_1| < ... < |z_{n+1}|`` the solution with leading term ``z^mu``,
``mu = w lam + rho``, is ``z^mu sum_kappa c_kappa z^kappa`` with kappa in the
cone spanned by the simple roots ``e_a - e_{a+1}``.
"""
from __future__ import annotations

import itertools
from dataclasses import dataclass
from math import comb

import numpy as np

from .errors import InvalidInput, RegionError, ResonanceError
from .rootsys import WeylElement, act, as_lambda, rho, weyl_elements
from .special import c_function

RESONANCE_TOL = 1e-10
MAX_HEIGHT = 30
MAX_RATIO = 0.8


def eigenvalue(mu, k) -> complex:
    mu = np.asarray(mu, dtype=complex)
    k = complex(k)
    m = mu.size
    s = np.sum(mu ** 2)
    for i in range(m):
        for j in range(i + 1, m):
            s -= k * (mu[i] - mu[j])
    return complex(s)


def kappa_vector(m: tuple, dim: int) -> np.ndarray:
    """Simple-root coordinates -> ambient vector."""
    v = np.zeros(dim)
    for a, c in enumerate(m):
        v[a] += c
        v[a + 1] -= c
    return v


def cone(n: int, height: int):
    """Simple-root coordinate tuples of total height exactly ``height``."""
    for cut in itertools.combinations(range(height + n - 1), n - 1):
        prev, out = -1, []
        for c in cut + (height + n - 1,):
            out.append(c - prev - 1)
            prev = c
        yield tuple(out)


def _root_coords(n: int, i: int, j: int) -> tuple:
    """e_i - e_j (0-based, i < j) in simple-root coordinates."""
    return tuple(1 if i <= a < j else 0 for a in range(n))


@dataclass(frozen=True)
class SeriesSolution:
    w: WeylElement
    mu: np.ndarray
    k: complex
    coeffs: dict
    n_max: int

    @property
    def n(self) -> int:
        return self.mu.size - 1

    def shell(self, h: int) -> float:
        return float(sum(abs(c) for m, c in self.coeffs.items() if sum(m) == h))


def hc_series(w: WeylElement, lam, k, n_max: int, mask_above: int | None = None) -> SeriesSolution:
    """Triangular recursion for the coefficients up to height ``n_max``.

    ``mask_above`` drops coefficients of height greater than it from the
    right-hand side (used to check that height h only uses heights < h).
    """
    lam = as_lambda(lam)
    n = lam.size - 1
    if n_max < 0 or n_max > MAX_HEIGHT:
        raise InvalidInput(f"truncation height must lie in [0, {MAX_HEIGHT}]")
    k = complex(k)
    mu = act(w, lam) + rho(n, k)
    e0 = eigenvalue(mu, k)
    roots = [(i, j, _root_coords(n, i, j)) for i in range(n + 1) for j in range(i + 1, n + 1)]
    c = {(0,) * n: 1.0 + 0j}
    for h in range(1, n_max + 1):
        for m in cone(n, h):
            nu = mu + kappa_vector(m, n + 1)
            d = eigenvalue(nu, k) - e0
            if abs(d) < RESONANCE_TOL:
                raise ResonanceError(f"resonance at kappa={m} for w={w}", where=m)
            rhs = 0j
            for i, j, r in roots:
                t = 1
                while True:
                    mp = tuple(a - t * b for a, b in zip(m, r))
                    if min(mp) < 0:
                        break
                    if mask_above is None or sum(mp) <= mask_above:
                        cp = c.get(mp)
                        if cp is not None:
                            nup = mu + kappa_vector(mp, n + 1)
                            rhs += (nup[i] - nup[j]) * cp
                    t += 1
            c[m] = 2 * k * rhs / d
    return SeriesSolution(w, mu, k, c, n_max)


# ------------------------------------------------------------ operator oracle

def _poly_mul(p: dict, q: dict) -> dict:
    out: dict = {}
    for a, x in p.items():
        for b, y in q.items():
            e = tuple(u + v for u, v in zip(a, b))
            out[e] = out.get(e, 0) + x * y
    return out


def _vandermonde(dim: int, skip=None) -> dict:
    """prod_{a<b, (a,b) != skip} (z_b - z_a) as {exponent: coeff}."""
    p = {(0,) * dim: 1}
    for a in range(dim):
        for b in range(a + 1, dim):
            if (a, b) == skip:
                continue
            ea = tuple(1 if x == a else 0 for x in range(dim))
            eb = tuple(1 if x == b else 0 for x in range(dim))
            p = _poly_mul(p, {eb: 1, ea: -1})
    return p


def apply_operator(s: SeriesSolution) -> dict:
    """Coefficients of ``V (L - e) F_N`` with V the Vandermonde product.

    The result is a finite Laurent polynomial times ``z^mu``; it is keyed by
    the simple-root coordinates of ``exponent - (0,1,...,n)`` and each value is
    ``(sum, sum of |contributions|)``.  Exactly solved terms must cancel at
    every height ``<= N``.  No geometric expansion is used here.
    """
    n = s.n
    dim = n + 1
    k = s.k
    e0 = eigenvalue(s.mu, k)
    V = _vandermonde(dim)
    Vij = {}
    for i in range(dim):
        for j in range(i + 1, dim):
            ei = tuple(1 if x == i else 0 for x in range(dim))
            ej = tuple(1 if x == j else 0 for x in range(dim))
            # (z_i + z_j)/(z_i - z_j) * V = -(z_i + z_j) * V_ij
            Vij[(i, j)] = _poly_mul(_vandermonde(dim, (i, j)), {ei: -1, ej: -1})
    out: dict = {}

    def add(key, val):
        tot, mag = out.get(key, (0j, 0.0))
        out[key] = (tot + val, mag + abs(val))

    base = tuple(range(dim))
    for m, cm in s.coeffs.items():
        kv = kappa_vector(m, dim).astype(int)
        nu = s.mu + kv
        diag = np.sum(nu ** 2) - e0
        terms = [(V, diag)] + [(Vij[(i, j)], k * (nu[i] - nu[j])) for (i, j) in Vij]
        for poly, fac in terms:
            for ex, pc in poly.items():
                shift = tuple(int(x) + y - b for x, y, b in zip(kv, ex, base))
                key = tuple(int(v) for v in np.cumsum(shift)[:-1])
                add(key, cm * fac * pc)
    return out


def operator_residual(s: SeriesSolution, height: int | None = None) -> float:
    """max over heights <= N of |coefficient| / max(1, sum |contributions|)."""
    height = s.n_max if height is None else height
    worst = 0.0
    for key, (tot, mag) in apply_operator(s).items():
        if min(key) < 0:
            raise AssertionError(f"operator produced a term outside the cone: {key}")
        if sum(key) <= height:
            worst = max(worst, abs(tot) / max(1.0, mag))
    return worst


# ------------------------------------------------------------------ evaluation

def check_series_region(z, max_ratio: float = MAX_RATIO) -> np.ndarray:
    z = np.asarray(z, dtype=complex)
    if np.any(z == 0):
        raise RegionError("arguments must be nonzero")
    r = np.abs(z[:-1] / z[1:])
    if np.any(r > max_ratio):
        raise RegionError(f"need |z_i/z_(i+1)| <= {max_ratio}, got max {r.max():.3g}")
    return z


@dataclass(frozen=True)
class SeriesValue:
    value: complex
    tail_bound: float


def eval_series(s: SeriesSolution, z) -> SeriesValue:
    """Sum of the truncated series with a geometric tail estimate.

    The tail estimate uses the largest shell sum over heights in [N/2, N]
    times ``r^{N+1} / (1-r)^n`` with ``r`` the largest ratio ``|z_a / z_{a+1}|``.
    """
    z = check_series_region(z)
    n = s.n
    if z.size != n + 1:
        raise InvalidInput("dimension mismatch")
    x = z[:-1] / z[1:]
    lead = np.exp(np.sum(s.mu * np.log(z)))
    tot = 0j
    for m, c in s.coeffs.items():
        tot += c * np.prod(x ** np.array(m))
    r = float(np.max(np.abs(x)))
    N = s.n_max
    A = max(s.shell(h) for h in range((N + 1) // 2, N + 1)) if N > 0 else 1.0
    tail = abs(lead) * A * r ** (N + 1) / (1 - r) ** n
    return SeriesValue(complex(lead * tot), float(tail))


def eval_zonal(lam, k, z, n_max: int) -> SeriesValue:
    """``sum_w c(w lam, k) F_w(z)``, with z brought into the ordered region.

    The zonal function is symmetric, so arguments are sorted by modulus first.
    """
    lam = as_lambda(lam)
    n = lam.size - 1
    z = np.asarray(z, dtype=complex)
    z = z[np.argsort(np.abs(z), kind="stable")]
    tot, tail = 0j, 0.0
    for w in weyl_elements(n):
        try:
            cw = c_function(w, lam, k).value
            sv = eval_series(hc_series(w, lam, k, n_max), z)
        except ResonanceError as exc:
            raise ResonanceError(f"w={w}: {exc}", where=str(w)) from exc
        tot += cw * sv.value
        tail += abs(cw) * sv.tail_bound
    return SeriesValue(tot, tail)


def height_count(n: int, h: int) -> int:
    return comb(h + n - 1, n - 1)
