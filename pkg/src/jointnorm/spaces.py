"""Finite-dimensional l_p spaces: norms, dual exponents, duality maps.

Functionals act on vectors by the bilinear pairing ``f(x) = sum_i f_i x_i``
(no conjugation), so that a norming functional of ``x`` has entries
``conj(sgn x_i) |x_i|^{p-1} / ||x||^{p-1}``.
"""

from __future__ import annotations

import enum
import itertools
import math
from dataclasses import dataclass, field
from fractions import Fraction

import numpy as np

from .errors import NotUnitVectorError, ZeroVectorError

__all__ = [
    "Kind", "Exponent", "LpSpace", "NormingFunctionalSet",
    "REAL", "COMPLEX",
    "dual_exponent", "lp_norm", "duality_map", "is_smooth_point",
    "is_extreme_point", "rho_vector", "sgn",
]

REAL = "real"
COMPLEX = "complex"

TAU_DUAL = 1e-9
TAU_CLUSTER = 1e-7


class Kind(enum.Enum):
    ONE = "one"
    FINITE = "finite"
    INF = "inf"


@dataclass(frozen=True)
class Exponent:
    """An exponent in [1, inf].

    Finite exponents are kept as exact fractions so that ``p.dual().dual()``
    returns ``p`` unchanged.
    """

    kind: Kind
    ratio: Fraction | None = None

    @classmethod
    def of(cls, p) -> "Exponent":
        if isinstance(p, Exponent):
            return p
        if isinstance(p, str):
            s = p.strip().lower()
            if s in ("inf", "infinity", "∞"):
                return cls(Kind.INF)
            p = Fraction(s)
        if isinstance(p, float):
            if math.isinf(p) and p > 0:
                return cls(Kind.INF)
            if math.isnan(p):
                raise ValueError("exponent is NaN")
            p = Fraction(p)
        p = Fraction(p)
        if p < 1:
            raise ValueError(f"exponent must lie in [1, inf], got {float(p)}")
        if p == 1:
            return cls(Kind.ONE)
        return cls(Kind.FINITE, p)

    @property
    def is_one(self) -> bool:
        return self.kind is Kind.ONE

    @property
    def is_inf(self) -> bool:
        return self.kind is Kind.INF

    @property
    def is_strict(self) -> bool:
        """True for 1 < p < inf (strictly convex and smooth)."""
        return self.kind is Kind.FINITE

    @property
    def value(self) -> float:
        """Float value for numerics; infinity maps to ``math.inf``."""
        if self.kind is Kind.ONE:
            return 1.0
        if self.kind is Kind.INF:
            return math.inf
        return float(self.ratio)

    def dual(self) -> "Exponent":
        if self.kind is Kind.ONE:
            return Exponent(Kind.INF)
        if self.kind is Kind.INF:
            return Exponent(Kind.ONE)
        return Exponent(Kind.FINITE, self.ratio / (self.ratio - 1))

    def to_json(self):
        if self.kind is Kind.INF:
            return "inf"
        if self.kind is Kind.ONE:
            return 1
        r = self.ratio
        return int(r) if r.denominator == 1 else float(r)

    def __str__(self):
        return str(self.to_json())


def dual_exponent(p) -> Exponent:
    """Hölder conjugate of ``p``."""
    return Exponent.of(p).dual()


@dataclass(frozen=True)
class LpSpace:
    dim: int
    p: Exponent
    field: str = REAL

    def __post_init__(self):
        object.__setattr__(self, "p", Exponent.of(self.p))
        if int(self.dim) != self.dim or self.dim < 1:
            raise ValueError(f"dimension must be a positive integer, got {self.dim}")
        if self.field not in (REAL, COMPLEX):
            raise ValueError(f"unknown field {self.field!r}")

    @property
    def dtype(self):
        return np.complex128 if self.field == COMPLEX else np.float64

    def dual(self) -> "LpSpace":
        return LpSpace(self.dim, self.p.dual(), self.field)

    def norm(self, x) -> float:
        return lp_norm(x, self.p)

    def vector(self, entries) -> np.ndarray:
        x = np.asarray(entries, dtype=self.dtype)
        if x.shape != (self.dim,):
            from .errors import DimensionMismatch
            raise DimensionMismatch(f"expected length {self.dim}, got shape {x.shape}")
        return x


def sgn(z):
    """Unimodular sign, 0 at 0 (works for real and complex arrays)."""
    z = np.asarray(z)
    a = np.abs(z)
    out = np.zeros_like(z)
    nz = a > 0
    out[nz] = z[nz] / a[nz]
    return out


def lp_norm(x, p) -> float:
    """The p-norm of ``x``; ``p`` may be anything :meth:`Exponent.of` accepts."""
    p = Exponent.of(p)
    a = np.abs(np.asarray(x))
    if a.size == 0:
        return 0.0
    if p.is_inf:
        return float(a.max())
    if p.is_one:
        return float(a.sum())
    m = a.max()
    if m == 0:
        return 0.0
    pv = p.value
    return float(m * np.sum((a / m) ** pv) ** (1.0 / pv))


def _argmax_set(a, tol):
    m = a.max()
    return np.flatnonzero(a >= m - tol * m)


@dataclass(frozen=True)
class NormingFunctionalSet:
    """The duality set J(x) of a nonzero vector in an l_p space.

    ``base`` holds the functional on the coordinates where it is forced.
    For ``1 < p < inf`` it is the unique element.  For ``p = 1`` the
    coordinates in ``free`` (zeros of ``x``) take any value of modulus at
    most one; the extreme points put a unimodular phase there.  For
    ``p = inf`` the extreme points are ``conj(sgn x_k) e_k`` for ``k`` in
    ``selectors`` and ``base`` is the first of them.
    """

    space: LpSpace
    x: np.ndarray
    base: np.ndarray
    free: np.ndarray = field(default_factory=lambda: np.zeros(0, dtype=int))
    selectors: np.ndarray = field(default_factory=lambda: np.zeros(0, dtype=int))

    @property
    def is_singleton(self) -> bool:
        if self.space.p.is_inf:
            return len(self.selectors) == 1
        return len(self.free) == 0

    def extremes(self, limit: int = 4096) -> list[np.ndarray]:
        """Enumerate extreme points (phase representatives in the complex case).

        Complex free coordinates of an l_1 point carry a continuum of phases;
        they are represented by ``{1, i, -1, -i}``.
        """
        p = self.space.p
        if p.is_strict:
            return [self.base.copy()]
        if p.is_inf:
            out = []
            for k in self.selectors:
                f = np.zeros(self.space.dim, dtype=self.space.dtype)
                f[k] = np.conj(sgn(self.x[k]))
                out.append(f)
            return out
        phases = (1.0, -1.0) if self.space.field == "real" else (1.0, 1j, -1.0, -1j)
        n_free = len(self.free)
        if len(phases) ** n_free > limit:
            raise ValueError(f"{len(phases) ** n_free} extreme functionals exceed limit {limit}")
        out = []
        for combo in itertools.product(phases, repeat=n_free):
            f = self.base.copy()
            f[self.free] = combo
            out.append(f)
        return out

    def support_re(self, y) -> tuple[float, float]:
        """(inf, sup) of Re f(y) over J(x), in closed form."""
        y = np.asarray(y)
        p = self.space.p
        if p.is_strict:
            v = float(np.real(np.dot(self.base, y)))
            return v, v
        if p.is_inf:
            vals = [float(np.real(np.conj(sgn(self.x[k])) * y[k])) for k in self.selectors]
            return min(vals), max(vals)
        fixed = float(np.real(np.dot(self.base, y)))
        slack = float(np.abs(y[self.free]).sum())
        return fixed - slack, fixed + slack


def duality_map(x, space: LpSpace, tol: float = TAU_CLUSTER) -> NormingFunctionalSet:
    """Norming functionals of ``x``: ``||f||_q = 1`` and ``f(x) = ||x||_p``.

    Coordinates count as zero (p = 1) or tied for the maximum (p = inf) within
    ``tol`` relative to ``||x||``.
    """
    x = np.asarray(x, dtype=space.dtype)
    a = np.abs(x)
    if a.max(initial=0.0) == 0:
        raise ZeroVectorError("duality map is undefined at the zero vector")
    p = space.p
    if p.is_strict:
        nrm = lp_norm(x, p)
        pv = p.value
        base = np.conj(sgn(x)) * (a / nrm) ** (pv - 1)
        return NormingFunctionalSet(space, x, base)
    if p.is_inf:
        sel = _argmax_set(a, tol)
        base = np.zeros(space.dim, dtype=space.dtype)
        base[sel[0]] = np.conj(sgn(x[sel[0]]))
        return NormingFunctionalSet(space, x, base, selectors=sel)
    nrm = a.sum()
    zero = a <= tol * nrm
    base = np.conj(sgn(x))
    base[zero] = 0
    return NormingFunctionalSet(space, x, base, free=np.flatnonzero(zero))


def is_smooth_point(x, space: LpSpace, tol: float = TAU_CLUSTER) -> bool:
    return duality_map(x, space, tol).is_singleton


def is_extreme_point(x, space: LpSpace, tol: float = TAU_DUAL) -> bool:
    """Whether unit vector ``x`` is an extreme point of the closed unit ball."""
    x = np.asarray(x)
    nrm = lp_norm(x, space.p)
    if abs(nrm - 1.0) > tol:
        raise NotUnitVectorError(f"||x|| = {nrm!r} is not 1")
    p = space.p
    if p.is_strict:
        return True
    a = np.abs(x)
    if p.is_one:
        return int(np.count_nonzero(a > tol)) == 1
    return bool(np.all(a >= 1.0 - tol))


def rho_vector(x, y, space: LpSpace, tol: float = TAU_CLUSTER) -> tuple[float, float]:
    """One-sided Gateaux derivatives (rho_minus, rho_plus) of the norm at x along y."""
    return duality_map(x, space, tol).support_re(np.asarray(y, dtype=space.dtype))
