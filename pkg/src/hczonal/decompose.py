"""Expansion of the segment cycle into loop diagrams.

Each segment variable is replaced by two loops (through its lower and upper
bound) using the elementary one-variable decomposition; diagrams where two
variables of one row loop around the same target are dropped.  Surviving
diagrams are labelled by Weyl elements through their scaling exponents.
"""
from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction

import numpy as np

from .contour import (ContourSpec, Loop, _node, build_omega, elementary_integrals,
                      t_variables, var_name)
from .errors import InvalidInput, ResonanceError
from .forms import LinearForm
from .rootsys import WeylElement, as_lambda
from .special import GENERIC_TOL

VARIANTS = ("printed", "denominator", "corrected")
MAX_EXPAND_RANK = 6


@dataclass(frozen=True)
class CoeffExpr:
    """``sign * prod exp(-i pi L) * prod 1/(2i sin(pi M))``."""

    sign: int = 1
    phases: tuple[LinearForm, ...] = ()
    sines: tuple[LinearForm, ...] = ()

    def __mul__(self, other: "CoeffExpr") -> "CoeffExpr":
        return CoeffExpr(self.sign * other.sign, self.phases + other.phases, self.sines + other.sines)

    def normalized(self) -> "CoeffExpr":
        """Reduce phase constants mod 2 and sine constants mod 1 (tracking the sign)."""
        sign = self.sign
        ph = []
        for L in self.phases:
            c = L.const % 2
            ph.append(LinearForm(L.lam, L.k, c))
        sn = []
        for M in self.sines:
            fl = M.const.numerator // M.const.denominator
            if fl % 2:
                sign = -sign
            sn.append(LinearForm(M.lam, M.k, M.const - fl))
        return CoeffExpr(sign, tuple(ph), tuple(sn))

    def __str__(self):
        return (f"phases:[{','.join(map(str, self.phases))}] "
                f"sines:[{','.join(map(str, self.sines))}] sign={'+1' if self.sign > 0 else '-1'}")


def coeff_eval(c: CoeffExpr, lam, k) -> complex:
    lam = np.asarray(lam, dtype=complex)
    k = complex(k)
    val = complex(c.sign)
    for L in c.phases:
        val *= np.exp(-1j * np.pi * L(lam, k))
    for M in c.sines:
        m = M(lam, k)
        if abs(m - round(m.real)) < GENERIC_TOL:
            raise ResonanceError(f"sine argument {M} = {m:.6g} is an integer", where=str(M))
        val /= 2j * np.sin(np.pi * m)
    return val


# ------------------------------------------------------------ elementary step

@dataclass(frozen=True)
class ElementaryFactorization:
    """``t^{a_0-1} prod_l (z_l - t)^{a_l-1}`` on the segment ``[z_{i-1}, z_i]``."""

    a: tuple[LinearForm, ...]
    i: int

    def __post_init__(self):
        m = len(self.a) - 1
        if not 2 <= self.i <= m:
            raise InvalidInput(f"segment index must satisfy 2 <= i <= {m}")

    def partial_sum(self, upto: int) -> LinearForm:
        s = self.a[0]
        for x in self.a[1:upto + 1]:
            s = s + x
        return s


def _guard_k(k):
    if k is not None:
        k = complex(k)
        if abs(k - round(k.real)) < GENERIC_TOL:
            raise ResonanceError(f"k = {k} is an integer: wrong diagrams need not vanish", where="k")


def elementary_step(f: ElementaryFactorization, variant: str = "corrected", k=None):
    """Coefficients expressing the segment through the loops about its ends.

    Returns ``[(("gamma1", i-1), c1), (("gamma2", i), c2)]`` with
    ``segment = c1 * gamma1 + c2 * gamma2``.  Variants:

    - ``printed``: both denominators ``sin pi S_i``; ``c1 = -e^{-i pi S_{i-1}}``, ``c2 = e^{-i pi S_i}``
    - ``denominator``: as printed but the first denominator is ``sin pi S_{i-1}``
    - ``corrected``: ``c1 = e^{-i pi S_{i-2}}``, ``c2 = e^{-i pi S_{i-1}}``, both over ``sin pi S_{i-1}``

    where ``S_j = a_0 + ... + a_j``.  Passing a numeric ``k`` refuses integer
    couplings, for which the expansion is not claimed.
    """
    _guard_k(k)
    if variant not in VARIANTS:
        raise InvalidInput(f"unknown variant {variant!r}")
    i = f.i
    S = {j: f.partial_sum(j) for j in range(i - 2, i + 1)}
    if variant == "corrected":
        c1 = CoeffExpr(1, (S[i - 2],), (S[i - 1],))
        c2 = CoeffExpr(1, (S[i - 1],), (S[i - 1],))
    else:
        d1 = S[i - 1] if variant == "denominator" else S[i]
        c1 = CoeffExpr(-1, (S[i - 1],), (d1,))
        c2 = CoeffExpr(1, (S[i],), (S[i],))
    for c in (c1, c2):
        for M in c.sines:
            if M.is_integer_constant():
                raise ResonanceError(f"sine argument {M} is an integer", where=str(M))
    return [(("gamma1", i - 1), c1), (("gamma2", i), c2)]


def elementary_oracle(a, z, i: int, variant: str, integrals: dict | None = None) -> float:
    """Relative residual of the elementary relation, both sides by quadrature."""
    a = np.asarray(a, dtype=complex)
    m = a.size - 1
    ints = integrals or elementary_integrals(a, z, i)
    forms = tuple(LinearForm.make(m + 1, {j: 1}) for j in range(m + 1))
    (_, c1), (_, c2) = elementary_step(ElementaryFactorization(forms, i), variant)
    rhs = coeff_eval(c1, a, 0) * ints["gamma1"] + coeff_eval(c2, a, 0) * ints["gamma2"]
    return abs(ints["segment"] - rhs) / abs(ints["segment"])


# ------------------------------------------------------------------ diagrams

@dataclass(frozen=True)
class Diagram:
    """Anchor assignment for looped variables; unlisted variables are segments."""

    n: int
    anchors: tuple[tuple[tuple, tuple], ...]

    @classmethod
    def from_dict(cls, n: int, anchors: dict) -> "Diagram":
        order = {v: idx for idx, v in enumerate(t_variables(n))}
        return cls(n, tuple(sorted(anchors.items(), key=lambda kv: order[kv[0]])))

    def as_dict(self) -> dict:
        return dict(self.anchors)

    def root(self, v):
        a = self.as_dict()
        while v in a:
            v = a[v]
        return v

    def is_complete(self) -> bool:
        return len(self.anchors) == len(t_variables(self.n))

    def is_wrong(self) -> bool:
        """Two variables of one row loop around the same target."""
        seen = set()
        for v, tgt in self.anchors:
            key = (v[2], tgt)
            if key in seen:
                return True
            seen.add(key)
        return False

    def contour(self) -> ContourSpec:
        return ContourSpec.make({v: Loop(a) for v, a in self.anchors})

    def __str__(self):
        return "[" + ",".join(f"{var_name(v)}->{var_name(a)}" for v, a in self.anchors) + "]"


def _pos(n: int, x) -> Fraction:
    """Position of a variable on the real line ordering of the segment cycle."""
    if x[0] == "z":
        return Fraction(2 * x[1])
    i, j = x[1], x[2]
    return (_pos(n, _node(n, i, j + 1)) + _pos(n, _node(n, i + 1, j + 1))) / 2


class _Expander:
    def __init__(self, n: int, variant: str):
        self.n = n
        self.variant = variant
        om = build_omega(n)
        self.dim = om.dim
        self.power = {f.a: f.exponent for f in om.factors if f.b is None and f.a[0] == "t"}
        self.pairs = [(f.a, f.b, f.exponent) for f in om.factors
                      if f.b is not None and not (f.a[0] == "z" and f.b[0] == "z")]
        self.k = LinearForm.make(self.dim, k=1)

    def sigma(self, anchors: dict, v) -> LinearForm:
        """Monodromy exponent of the cluster inside the lower bound of ``v``."""
        n = self.n
        d = Diagram(n, tuple(anchors.items()))
        p = _node(n, v[1], v[2] + 1)
        riders = [x for x in anchors if d.root(x) == v]
        grp = set(riders) | {v}
        s = self.power[v]
        for r in riders:
            s = s + self.power[r] + 1
        for a, b, E in self.pairs:
            ina, inb = a in grp, b in grp
            if ina and inb:
                s = s + E
            elif ina or inb:
                u = b if ina else a
                if _pos(n, d.root(u)) <= _pos(n, p):
                    s = s + E
        return s

    def step(self, anchors: dict, v):
        sig = self.sigma(anchors, v)
        two = LinearForm.make(self.dim, const=2)
        ef = ElementaryFactorization((sig - self.k + two, self.k, self.k), 2)
        (_, c1), (_, c2) = elementary_step(ef, self.variant)
        p = _node(self.n, v[1], v[2] + 1)
        q = _node(self.n, v[1] + 1, v[2] + 1)
        return [(p, c1), (q, c2)]


def expand_delta(n: int, variant: str = "corrected", k=None) -> list[tuple[Diagram, CoeffExpr]]:
    """All surviving loop diagrams with their symbolic coefficients.

    Variables are processed row by row starting from the top row ``t11``,
    left to right; wrong diagrams are removed after every step.
    """
    _guard_k(k)
    if n < 1 or n > MAX_EXPAND_RANK:
        raise InvalidInput(f"expansion supports 1 <= n <= {MAX_EXPAND_RANK}")
    ex = _Expander(n, variant)
    terms = [({}, CoeffExpr())]
    for v in t_variables(n):
        new = []
        for anchors, c in terms:
            for tgt, cstep in ex.step(anchors, v):
                a2 = dict(anchors)
                a2[v] = tgt
                d = Diagram(n, tuple(a2.items()))
                if d.is_wrong():
                    continue
                new.append((a2, c * cstep))
        terms = new
    return [(Diagram.from_dict(n, a), c.normalized()) for a, c in terms]


def scaling_exponents(d: Diagram) -> list[LinearForm]:
    """Homogeneity degree of the diagram integral in each z_l (as z_l dominates)."""
    n = d.n
    om = build_omega(n)
    ex = [LinearForm.zero(om.dim) for _ in range(n + 1)]
    for f in om.factors:
        if f.b is None:
            r = d.root(f.a)
            ex[r[1] - 1] = ex[r[1] - 1] + f.exponent
        else:
            ra, rb = d.root(f.a), d.root(f.b)
            l = max(ra[1], rb[1])
            ex[l - 1] = ex[l - 1] + f.exponent
    for v in t_variables(n):  # the measure dt
        r = d.root(v)
        ex[r[1] - 1] = ex[r[1] - 1] + 1
    return ex


def diagram_to_weyl(d: Diagram) -> WeylElement:
    """The w with scaling exponents equal to ``w lambda + rho``."""
    n = d.n
    if not d.is_complete() or d.is_wrong():
        raise InvalidInput(f"diagram {d} is not a complete surviving diagram")
    ex = scaling_exponents(d)
    inv = []
    for l, e in enumerate(ex, start=1):
        resid = e - LinearForm.make(n + 1, k=Fraction(n + 2 - 2 * l, 2))
        hits = [i for i, c in enumerate(resid.lam) if c]
        if resid.k or resid.const or len(hits) != 1 or resid.lam[hits[0]] != 1:
            raise InvalidInput(f"diagram {d} has exponent {e} not of the form (w lambda + rho)_{l}")
        inv.append(hits[0])
    if sorted(inv) != list(range(n + 1)):
        raise InvalidInput(f"diagram {d} does not induce a permutation")
    return WeylElement(tuple(inv)).inverse()


def dump_line(d: Diagram, c: CoeffExpr) -> str:
    anchors = ",".join(f"{var_name(v)}->{var_name(a)}" for v, a in d.anchors)
    return f"anchors=[{anchors}] coeff={c} weyl={diagram_to_weyl(d)}"


def dump_diagrams(n: int, variant: str = "corrected") -> str:
    return "\n".join(dump_line(d, c) for d, c in expand_delta(n, variant)) + "\n"


def engine_residual(n: int, lam, k, variant: str = "corrected", terms=None) -> float:
    """max over diagrams of |coeff - b(w)| / |b(w)|."""
    from .special import b_coeff
    lam = as_lambda(lam, n)
    worst = 0.0
    for d, c in terms or expand_delta(n, variant):
        b = b_coeff(diagram_to_weyl(d), lam, k)
        worst = max(worst, abs(coeff_eval(c, lam, k) - b) / abs(b))
    return worst
