"""Root system A_n: positive roots, rho and delta, and the Weyl group S_{n+1}.

Roots are stored as 1-based index pairs ``(i, j)`` with ``i < j`` standing for
``e_i - e_j``.  Weyl elements act on the ambient (n+1)-space by
``(w lam)_i = lam_{w^{-1}(i)}``.
"""
from __future__ import annotations

import itertools
from dataclasses import dataclass, field
from functools import lru_cache

import numpy as np

from .errors import InvalidInput

MAX_ENUM_RANK = 6


@dataclass(frozen=True)
class RootSystemAn:
    n: int
    positive_roots: tuple[tuple[int, int], ...] = field(init=False)
    delta: np.ndarray = field(init=False, compare=False, repr=False)
    fundamental_weights: np.ndarray = field(init=False, compare=False, repr=False)

    def __post_init__(self):
        n = self.n
        if n < 1:
            raise InvalidInput(f"rank must be >= 1, got {n}")
        roots = tuple((i, j) for i in range(1, n + 2) for j in range(i + 1, n + 2))
        object.__setattr__(self, "positive_roots", roots)
        object.__setattr__(self, "delta", delta(n))
        # Lambda_i = e_1 + ... + e_i - i/(n+1) * (e_1 + ... + e_{n+1})
        fw = np.zeros((n, n + 1))
        for i in range(1, n + 1):
            fw[i - 1, :i] = 1.0
            fw[i - 1] -= i / (n + 1)
        object.__setattr__(self, "fundamental_weights", fw)

    @property
    def dim(self) -> int:
        return self.n + 1

    def root_vector(self, root: tuple[int, int]) -> np.ndarray:
        i, j = root
        v = np.zeros(self.n + 1)
        v[i - 1], v[j - 1] = 1.0, -1.0
        return v

    def simple_roots(self) -> list[tuple[int, int]]:
        return [(i, i + 1) for i in range(1, self.n + 1)]


def delta(n: int) -> np.ndarray:
    """Half the sum of positive roots: ``delta_i = (n + 2 - 2i) / 2``."""
    return np.array([(n + 2 - 2 * i) / 2 for i in range(1, n + 2)])


def rho(n: int, k: complex) -> np.ndarray:
    return k * delta(n)


def as_lambda(lam, n: int | None = None) -> np.ndarray:
    lam = np.atleast_1d(np.asarray(lam, dtype=complex))
    if lam.ndim != 1:
        raise InvalidInput("lambda must be a vector")
    if n is not None and lam.size != n + 1:
        raise InvalidInput(f"lambda must have {n + 1} components for rank {n}, got {lam.size}")
    return lam


def pairing(lam, root: tuple[int, int]) -> complex:
    """``(lam, e_i - e_j) = lam_i - lam_j``; A_n is simply laced so the coroot is the root."""
    lam = as_lambda(lam)
    i, j = root
    m = lam.size
    if not (1 <= i < j <= m):
        raise InvalidInput(f"root {root} out of range for a {m}-component weight")
    return complex(lam[i - 1] - lam[j - 1])


@dataclass(frozen=True)
class WeylElement:
    """Permutation ``w`` of {1..n+1} in 0-based one-line form: ``perm[i] = w(i)``."""

    perm: tuple[int, ...]

    @property
    def length(self) -> int:
        p = self.perm
        return sum(1 for a in range(len(p)) for b in range(a + 1, len(p)) if p[a] > p[b])

    @property
    def n(self) -> int:
        return len(self.perm) - 1

    def inverse(self) -> "WeylElement":
        inv = [0] * len(self.perm)
        for i, w in enumerate(self.perm):
            inv[w] = i
        return WeylElement(tuple(inv))

    def compose(self, other: "WeylElement") -> "WeylElement":
        """``(self * other)(i) = self(other(i))``."""
        return WeylElement(tuple(self.perm[o] for o in other.perm))

    def is_identity(self) -> bool:
        return all(i == p for i, p in enumerate(self.perm))

    def one_line(self) -> list[int]:
        """1-based one-line notation, as printed in reports."""
        return [p + 1 for p in self.perm]

    def __str__(self) -> str:
        return "[" + ",".join(map(str, self.one_line())) + "]"


def identity(n: int) -> WeylElement:
    return WeylElement(tuple(range(n + 1)))


def simple_reflection(n: int, a: int) -> WeylElement:
    """The transposition ``s_a = (a, a+1)``, 1 <= a <= n."""
    p = list(range(n + 1))
    p[a - 1], p[a] = p[a], p[a - 1]
    return WeylElement(tuple(p))


@lru_cache(maxsize=None)
def weyl_elements(n: int) -> tuple[WeylElement, ...]:
    if n < 1:
        raise InvalidInput(f"rank must be >= 1, got {n}")
    if n > MAX_ENUM_RANK:
        raise InvalidInput(f"refusing to enumerate S_{n + 1}: rank {n} exceeds {MAX_ENUM_RANK}")
    return tuple(WeylElement(p) for p in itertools.permutations(range(n + 1)))


def act(w: WeylElement, lam) -> np.ndarray:
    lam = as_lambda(lam)
    if lam.size != len(w.perm):
        raise InvalidInput("dimension mismatch between Weyl element and lambda")
    out = np.empty_like(lam)
    out[list(w.perm)] = lam
    return out


def weyl_from_exponent(mu, lam, k: complex, tol: float = 1e-9) -> WeylElement:
    """Find ``w`` with ``w lam + rho == mu``; raises if none matches."""
    lam = as_lambda(lam)
    n = lam.size - 1
    target = np.asarray(mu, dtype=complex) - rho(n, k)
    for w in weyl_elements(n):
        if np.max(np.abs(act(w, lam) - target)) < tol:
            return w
    raise InvalidInput("exponent is not of the form w.lambda + rho")
