"""Linear forms a.lambda + b.k + c with rational coefficients."""
from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from typing import Sequence

import numpy as np


def _frac(x) -> Fraction:
    return x if isinstance(x, Fraction) else Fraction(x)


@dataclass(frozen=True)
class LinearForm:
    lam: tuple[Fraction, ...]
    k: Fraction = Fraction(0)
    const: Fraction = Fraction(0)

    @classmethod
    def zero(cls, dim: int) -> "LinearForm":
        return cls(tuple(Fraction(0) for _ in range(dim)))

    @classmethod
    def make(cls, dim: int, lam: dict[int, object] | None = None, k=0, const=0) -> "LinearForm":
        """Build from a sparse ``{index: coeff}`` map; indices are 0-based."""
        coeffs = [Fraction(0)] * dim
        for i, c in (lam or {}).items():
            coeffs[i] = _frac(c)
        return cls(tuple(coeffs), _frac(k), _frac(const))

    @property
    def dim(self) -> int:
        return len(self.lam)

    def __add__(self, other: "LinearForm") -> "LinearForm":
        if isinstance(other, (int, Fraction)):
            return LinearForm(self.lam, self.k, self.const + other)
        return LinearForm(tuple(a + b for a, b in zip(self.lam, other.lam)),
                          self.k + other.k, self.const + other.const)

    __radd__ = __add__

    def __neg__(self) -> "LinearForm":
        return LinearForm(tuple(-a for a in self.lam), -self.k, -self.const)

    def __sub__(self, other) -> "LinearForm":
        return self + (-other)

    def scale(self, c) -> "LinearForm":
        c = _frac(c)
        return LinearForm(tuple(c * a for a in self.lam), c * self.k, c * self.const)

    def __call__(self, lam: Sequence[complex], k: complex) -> complex:
        lam = np.asarray(lam, dtype=complex)
        val = complex(self.const) + complex(self.k) * k
        for a, x in zip(self.lam, lam):
            if a:
                val += float(a) * x
        return val

    def is_integer_constant(self) -> bool:
        return all(a == 0 for a in self.lam) and self.k == 0 and self.const.denominator == 1

    def __str__(self) -> str:
        terms = []
        for i, a in enumerate(self.lam):
            if a:
                terms.append(_term(a, f"l{i + 1}"))
        if self.k:
            terms.append(_term(self.k, "k"))
        if self.const or not terms:
            terms.append(_term(self.const, ""))
        out = "".join(terms)
        return out[1:] if out.startswith("+") else out


def _term(a: Fraction, sym: str) -> str:
    sign = "-" if a < 0 else "+"
    a = abs(a)
    if not sym:
        return f"{sign}{a}"
    if a == 1:
        return f"{sign}{sym}"
    return f"{sign}{a}*{sym}"
