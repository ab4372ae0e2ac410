"""Multivalued integrand, phase tracking and iterated contour quadrature.

Variables are tuples: ``("z", l)`` for the arguments and ``("t", i, j)`` for
the integration variables of the Gelfand-Zetlin pattern.  Every difference
factor is evaluated on the branch ``big * (1 - small/big)`` where ``big`` is
the factor with the larger modulus (decided structurally, see
``_order_pair``), ``log(big)`` is the tracked logarithm of that variable and
the second factor uses the principal logarithm.  On the segment cycle this
is the real positive branch; on loop cycles it fixes the reference branch
that the decomposition coefficients refer to.
"""
from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction
from typing import Callable, Mapping

import numpy as np
from scipy.special import roots_jacobi

from .errors import BudgetExhausted, HCError, InvalidInput, RegionError
from .forms import LinearForm
from .rootsys import as_lambda

BRANCH_EPS = 1e-12
CHUNK_POINTS = 1 << 18


class ContourError(HCError):
    pass


def zvar(l: int) -> tuple:
    return ("z", l)


def tvar(i: int, j: int) -> tuple:
    return ("t", i, j)


def var_name(v: tuple) -> str:
    if v[0] == "z":
        return f"z{v[1]}"
    i, j = v[1], v[2]
    return f"t{i}{j}" if max(i, j) < 10 else f"t{i},{j}"


def t_variables(n: int) -> tuple[tuple, ...]:
    """Measure order dt11 dt12 dt22 dt13 ..."""
    return tuple(tvar(i, j) for j in range(1, n + 1) for i in range(1, j + 1))


def _node(n: int, i: int, j: int) -> tuple:
    return zvar(i) if j == n + 1 else tvar(i, j)


# ----------------------------------------------------------------- integrand

@dataclass(frozen=True)
class Factor:
    """``a**e`` (``b is None``) or ``(a - b)**e``."""

    a: tuple
    b: tuple | None
    exponent: LinearForm

    @property
    def kind(self) -> str:
        return "power" if self.b is None else "diff"

    def pair(self) -> frozenset:
        return frozenset((self.a, self.b))

    def __str__(self):
        base = var_name(self.a) if self.b is None else f"({var_name(self.a)}-{var_name(self.b)})"
        return f"{base}^({self.exponent})"


@dataclass(frozen=True)
class MultivaluedIntegrand:
    n: int
    factors: tuple[Factor, ...]
    variables: tuple[tuple, ...]
    dim: int

    def exponent_of(self, a, b=None) -> LinearForm | None:
        """Total exponent of the factor on ``{a, b}`` (or of the power of ``a``)."""
        tot = None
        for f in self.factors:
            hit = (f.b is None and b is None and f.a == a) or \
                  (f.b is not None and b is not None and f.pair() == frozenset((a, b)))
            if hit:
                tot = f.exponent if tot is None else tot + f.exponent
        return tot

    def count(self, kind: str | None = None) -> int:
        return sum(1 for f in self.factors if kind is None or f.kind == kind)

    def orientation_flips(self, other: "MultivaluedIntegrand") -> int:
        """Number of difference factors whose orientation differs from ``other``."""
        mine = {f.pair(): f for f in self.factors if f.b is not None}
        return sum(1 for f in other.factors
                   if f.b is not None and mine[f.pair()].a != f.a)


def expected_factor_count(n: int) -> int:
    return ((n + 1) + n * (n + 1) // 2 + (n + 1) * n
            + sum(j * (j + 1) for j in range(1, n))
            + sum(j * (j - 1) // 2 for j in range(2, n + 1))
            + n * (n + 1) // 2)


def build_omega(n: int) -> MultivaluedIntegrand:
    """Factor list of the multivalued form at rank n, orientations as written."""
    if n < 1:
        raise InvalidInput("rank must be >= 1")
    d = n + 1
    one = Fraction(1)
    fs: list[Factor] = []
    zpow = LinearForm.make(d, {0: 1}, k=Fraction(n, 2))
    for l in range(1, n + 2):
        fs.append(Factor(zvar(l), None, zpow))
    for i1 in range(1, n + 2):
        for i2 in range(1, i1):
            fs.append(Factor(zvar(i1), zvar(i2), LinearForm.make(d, k=-2, const=1)))
    km1 = LinearForm.make(d, k=1, const=-1)
    for l in range(1, n + 2):
        for i in range(1, n + 1):
            fs.append(Factor(zvar(l), tvar(i, n), km1))
    for j in range(1, n):
        for i1 in range(1, j + 2):
            for i in range(1, j + 1):
                fs.append(Factor(tvar(i, j), tvar(i1, j + 1), km1))
    for j in range(2, n + 1):
        for i1 in range(1, j + 1):
            for i2 in range(1, i1):
                fs.append(Factor(tvar(i1, j), tvar(i2, j), LinearForm.make(d, k=-2, const=2)))
    for j in range(1, n + 1):
        # lambda_{n-j+2} - lambda_{n-j+1} - k, 0-based indices n-j+1 and n-j
        e = LinearForm.make(d, {n - j + 1: one, n - j: -one}, k=-1)
        for i in range(1, j + 1):
            fs.append(Factor(tvar(i, j), None, e))
    return MultivaluedIntegrand(n, tuple(fs), t_variables(n), d)


def build_omega_delta(n: int) -> MultivaluedIntegrand:
    """Same factors, each difference oriented to be positive on the segment cycle.

    On the cycle ``z_i <= t_{i,n} <= z_{i+1}`` and ``t_{i,j+1} <= t_{ij} <= t_{i+1,j+1}``,
    so ``(z_l - t_{i,n})`` flips for ``l <= i`` and ``(t_{ij} - t_{i1,j+1})`` flips for ``i1 > i``.
    """
    om = build_omega(n)
    out = []
    for f in om.factors:
        if f.b is not None and _delta_flip(f.a, f.b):
            f = Factor(f.b, f.a, f.exponent)
        out.append(f)
    return MultivaluedIntegrand(n, tuple(out), om.variables, om.dim)


def _delta_flip(a, b) -> bool:
    if a[0] == "z" and b[0] == "t":
        return a[1] <= b[1]
    if a[0] == "t" and b[0] == "t" and b[2] == a[2] + 1:
        return b[1] > a[1]
    return False


# ---------------------------------------------------------------- GZ pattern

@dataclass
class GZPattern:
    n: int
    t: dict
    z: np.ndarray

    @property
    def variable_count(self) -> int:
        return len(self.t) + len(self.z)

    def values(self) -> dict:
        out = {zvar(l + 1): complex(x) for l, x in enumerate(self.z)}
        out.update({tvar(*ij): complex(v) for ij, v in self.t.items()})
        return out

    def in_delta(self, tol: float = 0.0) -> bool:
        n = self.n
        v = {k: complex(x).real for k, x in self.values().items()}
        for j in range(1, n + 1):
            for i in range(1, j + 1):
                lo, hi = v[_node(n, i, j + 1)], v[_node(n, i + 1, j + 1)]
                if not (lo - tol <= v[tvar(i, j)] <= hi + tol):
                    return False
        return True


def delta_barycenter(n: int, z) -> GZPattern:
    """A point inside the segment cycle: each t at the midpoint of its bounds."""
    z = np.asarray(z, dtype=float)
    vals = {zvar(l + 1): z[l] for l in range(n + 1)}
    t = {}
    for j in range(n, 0, -1):
        for i in range(1, j + 1):
            x = 0.5 * (vals[_node(n, i, j + 1)] + vals[_node(n, i + 1, j + 1)])
            vals[tvar(i, j)] = x
            t[(i, j)] = x
    return GZPattern(n, t, z)


# ----------------------------------------------------------- phase tracking

@dataclass(frozen=True)
class PhaseTrackedValue:
    log_magnitude: np.ndarray
    phase: np.ndarray
    per_factor_phase: tuple = field(default=(), repr=False)

    @property
    def value(self):
        return np.exp(self.log_magnitude + 1j * self.phase)


def eval_phase_tracked(f: MultivaluedIntegrand, path: Callable[[np.ndarray], Mapping],
                       s, lam, k) -> PhaseTrackedValue:
    """Evaluate ``f`` along ``path(s)`` with each factor's phase continued in s.

    ``path`` maps an array of parameters to ``{variable: complex array}``.  The
    phase of each base starts at its principal argument at ``s[0]`` (zero for
    positive bases) and is unwrapped along the samples.
    """
    s = np.atleast_1d(np.asarray(s, dtype=float))
    lam = as_lambda(lam, f.dim - 1)
    pts = {v: np.broadcast_to(np.asarray(x, dtype=complex), s.shape) for v, x in path(s).items()}
    logmag = np.zeros(s.shape)
    phase = np.zeros(s.shape)
    per = []
    for fac in f.factors:
        base = pts[fac.a] if fac.b is None else pts[fac.a] - pts[fac.b]
        if np.min(np.abs(base)) < BRANCH_EPS:
            raise ContourError(f"path hits a branch point of {fac}")
        lb = np.log(np.abs(base)) + 1j * np.unwrap(np.angle(base))
        lv = fac.exponent(lam, k) * lb
        logmag = logmag + lv.real
        phase = phase + lv.imag
        per.append(lv.imag)
    return PhaseTrackedValue(logmag, phase, tuple(per))


def constant_path(point: GZPattern):
    vals = point.values()
    return lambda s: vals


# ---------------------------------------------------------------- cycles

@dataclass(frozen=True)
class Segment:
    """Variable runs from ``lo`` to ``hi`` along ``exp(log lo + s (log hi - log lo))``."""

    lo: tuple
    hi: tuple


@dataclass(frozen=True)
class Loop:
    """Counterclockwise origin-centred loop through ``anchor``.

    ``v = anchor * g(theta) * exp(i theta)``, ``g = 1 - dent sin^2(theta/2)``;
    a positive dent pulls the loop inside the circle ``|v| = |anchor|``.
    """

    anchor: tuple
    dent: float = 0.0
    orientation: str = "ccw"


@dataclass(frozen=True)
class ContourSpec:
    cycles: tuple  # ((var, Segment | Loop), ...) in integration order

    @classmethod
    def make(cls, mapping: Mapping) -> "ContourSpec":
        """Order the descriptors so that bounds and anchors come first."""
        todo = dict(mapping)
        order = []
        while todo:
            ready = [v for v, c in todo.items() if all(d[0] == "z" or d not in todo for d in _deps(c))]
            if not ready:
                raise InvalidInput("cyclic contour dependencies")
            for v in sorted(ready, key=lambda v: (-v[2], v[1])):
                order.append((v, todo.pop(v)))
        spec = cls(tuple(order))
        spec.validate()
        return spec

    def validate(self):
        seen = set()
        for v, c in self.cycles:
            for d in _deps(c):
                if d[0] != "z" and d not in seen:
                    raise InvalidInput(f"{var_name(v)} references {var_name(d)} before it is integrated")
            if isinstance(c, Loop):
                if c.orientation != "ccw":
                    raise InvalidInput("only counterclockwise loops are supported")
                if not 0.0 <= c.dent < 1.0:
                    raise InvalidInput("dent must lie in [0, 1)")
            seen.add(v)

    def as_dict(self) -> dict:
        return dict(self.cycles)

    @classmethod
    def delta(cls, n: int) -> "ContourSpec":
        m = {}
        for j in range(1, n + 1):
            for i in range(1, j + 1):
                m[tvar(i, j)] = Segment(_node(n, i, j + 1), _node(n, i + 1, j + 1))
        return cls.make(m)

    @classmethod
    def loops(cls, anchors: Mapping, dents: Mapping | None = None) -> "ContourSpec":
        dents = dents or {}
        return cls.make({v: Loop(a, dents.get(v, 0.0)) for v, a in anchors.items()})


def _deps(c) -> tuple:
    return (c.lo, c.hi) if isinstance(c, Segment) else (c.anchor,)


@dataclass(frozen=True)
class QuadratureSpec:
    tol: float = 1e-9
    n_start: int = 16
    n_max: int = 256
    depth: int = 12

    @classmethod
    def default(cls, n: int) -> "QuadratureSpec":
        return cls(tol=1e-9 if n == 1 else 1e-6)


@dataclass(frozen=True)
class QuadResult:
    value: complex
    error: float
    nodes: int
    history: tuple = ()


# ------------------------------------------------------------ quadrature core

def _log_expm1_ratio(x):
    """log((e^x - 1)/x), stable near 0."""
    x = np.asarray(x, dtype=complex)
    small = np.abs(x) < 1e-8
    xs = np.where(small, 1.0, x)
    return np.where(small, x / 2, np.log(np.expm1(xs) / xs))


def _root_key(v, cyc: dict, z: np.ndarray):
    """(radius, -dent depth) used to decide which side of a difference is big."""
    if v[0] == "z":
        return (float(z[v[1] - 1]), 0)
    c = cyc[v]
    if isinstance(c, Loop):
        r, d = _root_key(c.anchor, cyc, z)
        return (r, d - (1 if c.dent > 0 else 0))
    lo, hi = _root_key(c.lo, cyc, z), _root_key(c.hi, cyc, z)
    return (float(np.sqrt(lo[0] * hi[0])), min(lo[1], hi[1]))


def _order_pair(a, b, cyc: dict, z):
    for x, y in ((a, b), (b, a)):
        c = cyc.get(y)
        if isinstance(c, Loop) and c.anchor == x:
            return x, y
    ka, kb = _root_key(a, cyc, z), _root_key(b, cyc, z)
    if ka == kb:
        raise ContourError(f"cannot order {var_name(a)} and {var_name(b)}: same radius")
    return (a, b) if ka > kb else (b, a)


def _rule(N: int, e_hi: float, e_lo: float):
    """Gauss-Jacobi nodes on s in (0,1) with the algebraic weight divided out."""
    if e_hi <= -1 or e_lo <= -1:
        raise InvalidInput("endpoint exponent must have real part > -1 (need Re k > 0)")
    x, w = roots_jacobi(N, e_hi, e_lo)
    wd = w / ((1 - x) ** e_hi * (1 + x) ** e_lo) / 2
    return (x + 1) / 2, wd


def _endpoint_exponents(v, c, f: MultivaluedIntegrand, lam, k):
    def ex(a):
        e = f.exponent_of(v, a)
        return 0.0 if e is None else float(e(lam, k).real)
    if isinstance(c, Loop):
        e = ex(c.anchor)
        return e, e
    return ex(c.hi), ex(c.lo)


def _integrate_fixed(spec: ContourSpec, f: MultivaluedIntegrand, z, lam, k, N: int) -> complex:
    cyc = spec.as_dict()
    order = [v for v, _ in spec.cycles]
    m = len(order)
    rules = []
    for v in order:
        e_hi, e_lo = _endpoint_exponents(v, cyc[v], f, lam, k)
        rules.append(_rule(N, e_hi, e_lo))

    # factor pre-processing: exponents and structural orientation
    consts, plan = 0j, []
    for fac in f.factors:
        e = fac.exponent(lam, k)
        if fac.b is None:
            if fac.a[0] == "z":
                consts += e * np.log(z[fac.a[1] - 1])
            else:
                plan.append(("pow", fac.a, None, e))
            continue
        a, b = fac.a, fac.b
        if a[0] == "z" and b[0] == "z":
            big, small = (a, b) if z[a[1] - 1] > z[b[1] - 1] else (b, a)
            consts += e * np.log(z[big[1] - 1] - z[small[1] - 1])
            continue
        seg_end = None
        for x, y in ((a, b), (b, a)):
            c = cyc.get(x)
            if isinstance(c, Segment) and y in (c.lo, c.hi):
                seg_end = ("lo" if y == c.lo else "hi", x)
        if seg_end:
            plan.append(("seg_" + seg_end[0], seg_end[1], None, e))
        else:
            big, small = _order_pair(a, b, cyc, z)
            plan.append(("diff", big, small, e))

    outer = max(1, CHUNK_POINTS // max(1, N ** (m - 1)))
    total = 0j
    for start in range(0, N, outer):
        sl = slice(start, min(N, start + outer))
        total += _eval_block(order, cyc, rules, plan, z, N, m, sl)
    return complex(np.exp(consts) * total)


def _eval_block(order, cyc, rules, plan, z, N, m, sl):
    val, lg, par = {}, {}, {}
    logw = 0.0
    for l in range(len(z)):
        lg[zvar(l + 1)] = np.log(complex(z[l]))
        val[zvar(l + 1)] = complex(z[l])
    for ax, v in enumerate(order):
        s, wd = rules[ax]
        if ax == 0:
            s, wd = s[sl], wd[sl]
        shape = [1] * m
        shape[ax] = s.size
        s = s.reshape(shape)
        logw = logw + np.log(wd.reshape(shape))
        c = cyc[v]
        if isinstance(c, Loop):
            th = 2 * np.pi * s
            g = 1 - c.dent * np.sin(th / 2) ** 2
            dg = -c.dent * np.sin(th / 2) * np.cos(th / 2)
            lg[v] = lg[c.anchor] + np.log(g) + 1j * th
            logw = logw + lg[v] + np.log(dg / g + 1j) + np.log(2 * np.pi)
        else:
            D = lg[c.hi] - lg[c.lo]
            lg[v] = lg[c.lo] + s * D
            logw = logw + lg[v] + np.log(D)
            par[v] = (s, D)
        val[v] = np.exp(lg[v])
    L = logw
    for kind, a, b, e in plan:
        if kind == "pow":
            L = L + e * lg[a]
        elif kind == "diff":
            ratio = val[b] / val[a]
            if np.min(np.abs(1 - ratio)) < BRANCH_EPS:
                raise ContourError(f"branch-point collision between {var_name(a)} and {var_name(b)}")
            L = L + e * (lg[a] + np.log(1 - ratio))
        else:
            s, D = par[a]
            c = cyc[a]
            if kind == "seg_lo":  # v - lo = lo (e^{sD} - 1)
                L = L + e * (lg[c.lo] + np.log(s * D) + _log_expm1_ratio(s * D))
            else:  # hi - v = v (e^{(1-s)D} - 1)
                u = (1 - s) * D
                L = L + e * (lg[a] + np.log(u) + _log_expm1_ratio(u))
    return np.sum(np.exp(L))


def integrate_cycle_fixed(spec: ContourSpec, f: MultivaluedIntegrand, z, lam, k, nodes: int) -> complex:
    z = _check_z(z, f)
    return _integrate_fixed(spec, f, z, as_lambda(lam, f.dim - 1), complex(k), nodes)


def integrate_cycle(spec: ContourSpec, f: MultivaluedIntegrand, z, lam, k,
                    q: QuadratureSpec | None = None) -> QuadResult:
    """Iterated quadrature over ``spec`` with node doubling until the relative
    change drops below ``q.tol``."""
    q = q or QuadratureSpec.default(f.n)
    z = _check_z(z, f)
    lam = as_lambda(lam, f.dim - 1)
    k = complex(k)
    N = q.n_start
    prev = _integrate_fixed(spec, f, z, lam, k, N)
    hist = [(N, prev)]
    for _ in range(q.depth):
        N *= 2
        if N > q.n_max:
            break
        cur = _integrate_fixed(spec, f, z, lam, k, N)
        hist.append((N, cur))
        err = abs(cur - prev)
        if err <= q.tol * abs(cur):
            return QuadResult(cur, err, N, tuple(hist))
        prev = cur
    raise BudgetExhausted(f"quadrature did not reach tol {q.tol} within {q.n_max} nodes per layer "
                          f"(last change {abs(hist[-1][1] - hist[-2][1]) if len(hist) > 1 else float('nan'):.3g})")


def _check_z(z, f):
    z = np.asarray(z, dtype=float)
    if np.any(z <= 0):
        raise RegionError("arguments must be real and positive")
    return z


def check_delta_region(n: int, z) -> np.ndarray:
    z = np.asarray(z, dtype=float)
    if z.size != n + 1:
        raise InvalidInput(f"need {n + 1} arguments for rank {n}")
    if z[0] <= 0 or np.any(np.diff(z) < 0):
        raise RegionError("need 0 < z_1 <= ... <= z_{n+1}")
    return z


def integrate_delta(n: int, z, lam, k, q: QuadratureSpec | None = None) -> QuadResult:
    """Integral of the positive-branch form over the segment cycle."""
    if n > 2:
        raise InvalidInput("iterated quadrature over the segment cycle is limited to n <= 2")
    z = check_delta_region(n, z)
    if np.any(np.diff(z) == 0):
        return QuadResult(0j, 0.0, 0)
    if complex(k).real <= 0:
        raise InvalidInput("Re k > 0 is required for integration")
    return integrate_cycle(ContourSpec.delta(n), build_omega_delta(n), z, lam, k, q)


def integrate_loops(n: int, anchors: Mapping, z, lam, k, q: QuadratureSpec | None = None,
                    dents: Mapping | None = None) -> QuadResult:
    """Integral of the form over a fully looped diagram, ``anchors[t] = anchor``."""
    if complex(k).real <= 0:
        raise InvalidInput("Re k > 0 is required for integration")
    return integrate_cycle(ContourSpec.loops(anchors, dents), build_omega(n), z, lam, k, q)


# ------------------------------------------------ one-variable elementary form

def elementary_integrand(m: int) -> MultivaluedIntegrand:
    """``t^{a_0-1} prod_{l=1..m} (z_l - t)^{a_l-1}`` with the exponents a as parameters.

    The exponent vector a = (a_0..a_m) plays the role of lambda (dim m+1).
    """
    d = m + 1
    t = tvar(1, 1)
    fs = [Factor(t, None, LinearForm.make(d, {0: 1}, const=-1))]
    for l in range(1, m + 1):
        fs.append(Factor(zvar(l), t, LinearForm.make(d, {l: 1}, const=-1)))
    return MultivaluedIntegrand(1, tuple(fs), (t,), d)


def elementary_integrals(a, z, i: int, q: QuadratureSpec | None = None) -> dict:
    """Segment ``[z_{i-1}, z_i]`` and the loops through ``z_{i-1}`` and ``z_i``."""
    a = np.asarray(a, dtype=complex)
    z = np.asarray(z, dtype=float)
    m = a.size - 1
    if z.size != m or not 2 <= i <= m:
        raise InvalidInput("need len(z) = len(a) - 1 and 2 <= i <= len(z)")
    f = elementary_integrand(m)
    q = q or QuadratureSpec(tol=1e-11, n_max=512)
    t = tvar(1, 1)
    out = {}
    for name, spec in (("segment", ContourSpec.make({t: Segment(zvar(i - 1), zvar(i))})),
                       ("gamma1", ContourSpec.make({t: Loop(zvar(i - 1))})),
                       ("gamma2", ContourSpec.make({t: Loop(zvar(i))}))):
        out[name] = _integrate_adaptive_1d(spec, f, z, a, q)
    return out


def _integrate_adaptive_1d(spec, f, z, a, q):
    # the exponents enter through lam; k is unused by the elementary form
    N, prev = q.n_start, None
    while N <= q.n_max:
        cur = _integrate_fixed(spec, f, z, a, 0j, N)
        if prev is not None and abs(cur - prev) <= q.tol * abs(cur):
            return cur
        prev, N = cur, 2 * N
    raise BudgetExhausted(f"one-variable quadrature did not reach tol {q.tol} within {q.n_max} nodes")
