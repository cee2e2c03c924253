"""Deformation functions f^2 over two-mode occupation numbers.

A :class:`DeformationSpec` is a declarative description of f^2.  Entangled
specs define a joint f^2(na, nb) shared by both dressed operators
``A = a f(na, nb)``, ``B = b f(na, nb)``; separable specs define one
function per mode, ``A = a fa(na)``, ``B = b fb(nb)``.

Built-in kinds:

* ``IDENTITY``        f^2 = 1 (the undeformed fields)
* ``SELF_COLLISION``  fa^2(n) = fb^2(n) = kappa*n + (1 - kappa)   (separable)
* ``CROSS_COLLISION`` f^2 = kappa*(na + nb) + (1 - kappa)        (entangled)
* ``Q_OSCILLATOR``    fa^2(n) = fb^2(n) = sinh(lam*n) / (n*sinh(lam)),
                      with the continuous limit lam/sinh(lam) at n = 0

Values are produced both as plain doubles and as exact expansions (see
:mod:`fdeform._exact`) so that Hamiltonian differences can be formed
without cancellation error.
"""

from __future__ import annotations

import enum
import math
from dataclasses import dataclass, field
from typing import Callable, Optional

import numpy as np

from . import _exact
from .errors import FDeformError, NegativeDeformation, OutOfRange, SeparableMisuse


class Kind(enum.Enum):
    IDENTITY = "identity"
    SELF_COLLISION = "self_collision"
    CROSS_COLLISION = "cross_collision"
    Q_OSCILLATOR = "q_oscillator"
    CUSTOM_ENTANGLED = "custom_entangled"
    CUSTOM_SEPARABLE = "custom_separable"

    @classmethod
    def parse(cls, name: str) -> "Kind":
        """Accept ``self_collision``, ``SelfCollision``, ``self-collision`` etc."""
        key = "".join(ch for ch in str(name).lower() if ch.isalnum())
        for kind in cls:
            if kind.value.replace("_", "") == key:
                return kind
        raise ValueError(f"unknown deformation kind {name!r}")


_SEPARABLE_KINDS = {Kind.SELF_COLLISION, Kind.Q_OSCILLATOR, Kind.CUSTOM_SEPARABLE}


class TableRule:
    """Lookup rule backed by a finite array of f^2 values.

    Works for 1-D (per mode) and 2-D (joint) tables.  Indices outside the
    table raise :class:`OutOfRange`.
    """

    def __init__(self, values):
        arr = np.array(values, dtype=float)
        if arr.ndim not in (1, 2) or arr.size == 0:
            raise ValueError("f^2 table must be a non-empty 1-D or 2-D array")
        if arr.ndim == 2 and arr.shape[0] != arr.shape[1]:
            raise ValueError(f"f^2 table must be square, got shape {arr.shape}")
        arr.setflags(write=False)
        self.values = arr

    @property
    def size(self) -> int:
        return self.values.shape[0]

    def __call__(self, *idx):
        if len(idx) != self.values.ndim:
            raise TypeError(f"table rule takes {self.values.ndim} indices")
        if any(i < 0 or i >= self.size for i in idx):
            raise OutOfRange(f"index {idx} outside f^2 table of size {self.size}")
        return float(self.values[idx])

    def take(self, *idx) -> np.ndarray:
        """Vectorised lookup at integer index arrays."""
        if len(idx) != self.values.ndim:
            raise TypeError(f"table rule takes {self.values.ndim} index arrays")
        idx = [np.asarray(i, dtype=np.int64) for i in idx]
        for i in idx:
            if i.size and (i.min() < 0 or i.max() >= self.size):
                raise OutOfRange(
                    f"f^2 table of size {self.size} does not cover occupation {int(i.max())}")
        return self.values[tuple(idx)].astype(float)

    def __repr__(self):
        return f"TableRule(shape={self.values.shape})"


@dataclass(frozen=True, eq=False)
class DeformationSpec:
    kind: Kind
    kappa: float = 0.0
    lam: Optional[float] = None
    custom_f2: Optional[Callable] = None
    custom_fa2: Optional[Callable] = None
    custom_fb2: Optional[Callable] = None
    declared_symmetric: bool = True
    separable: Optional[bool] = None

    def __post_init__(self):
        if not isinstance(self.kind, Kind):
            object.__setattr__(self, "kind", Kind.parse(self.kind))
        if self.separable is None:
            object.__setattr__(self, "separable", self.kind in _SEPARABLE_KINDS)
        if not math.isfinite(self.kappa):
            raise ValueError("kappa must be finite")
        if self.kind is Kind.Q_OSCILLATOR:
            if self.lam is None or not math.isfinite(self.lam) or self.lam <= 0:
                raise ValueError("q-oscillator requires a finite lambda > 0")
        if self.kind is Kind.CUSTOM_ENTANGLED and self.custom_f2 is None:
            raise ValueError("custom entangled deformation needs custom_f2")
        if self.kind is Kind.CUSTOM_SEPARABLE and (
                self.custom_fa2 is None or self.custom_fb2 is None):
            raise ValueError("custom separable deformation needs custom_fa2 and custom_fb2")

    @classmethod
    def identity(cls):
        return cls(Kind.IDENTITY)

    @classmethod
    def self_collision(cls, kappa: float):
        return cls(Kind.SELF_COLLISION, kappa=float(kappa))

    @classmethod
    def cross_collision(cls, kappa: float):
        return cls(Kind.CROSS_COLLISION, kappa=float(kappa))

    @classmethod
    def q_oscillator(cls, lam: float):
        return cls(Kind.Q_OSCILLATOR, lam=float(lam))

    @classmethod
    def custom_entangled(cls, rule, symmetric: bool = False):
        """``rule`` is a callable ``(na, nb) -> f^2`` or a square 2-D table."""
        if not callable(rule):
            rule = TableRule(rule)
        return cls(Kind.CUSTOM_ENTANGLED, custom_f2=rule, declared_symmetric=symmetric)

    @classmethod
    def custom_separable(cls, fa2, fb2, symmetric: bool = False):
        """``fa2``/``fb2`` are callables ``n -> f^2`` or 1-D tables."""
        fa2 = fa2 if callable(fa2) else TableRule(fa2)
        fb2 = fb2 if callable(fb2) else TableRule(fb2)
        return cls(Kind.CUSTOM_SEPARABLE, custom_fa2=fa2, custom_fb2=fb2,
                   declared_symmetric=symmetric)

    def describe(self) -> str:
        if self.kind in (Kind.SELF_COLLISION, Kind.CROSS_COLLISION):
            return f"{self.kind.value}(kappa={self.kappa!r})"
        if self.kind is Kind.Q_OSCILLATOR:
            return f"{self.kind.value}(lambda={self.lam!r})"
        return self.kind.value


# -- expansions ---------------------------------------------------------------

def _linear_expansion(kappa: float, m) -> np.ndarray:
    """Exact components of kappa*m + (1 - kappa) for integer arrays m."""
    m = np.asarray(m)
    k_hi, k_lo = _exact.split(kappa)
    s, e = _exact.two_sum(1.0, -kappa)
    mf = m.astype(float)
    ones = np.ones_like(mf)
    return np.stack([mf * k_hi, mf * k_lo, s * ones, e * ones])


def _q_values(lam: float, n) -> np.ndarray:
    n = np.asarray(n, dtype=float)
    out = np.empty_like(n)
    zero = n == 0
    out[zero] = lam / math.sinh(lam)
    nz = n[~zero]
    # sinh(lam n)/sinh(lam) rewritten to stay finite for large lam*n
    out[~zero] = (np.exp(lam * (nz - 1.0)) * np.expm1(-2.0 * lam * nz)
                  / (nz * math.expm1(-2.0 * lam)))
    return out


def _eval_rule(rule, *idx) -> np.ndarray:
    idx = np.broadcast_arrays(*(np.asarray(i) for i in idx))
    if isinstance(rule, TableRule):
        return rule.take(*idx)
    flat = [float(rule(*(int(v) for v in point))) for point in zip(*(i.ravel() for i in idx))]
    return np.array(flat, dtype=float).reshape(idx[0].shape)


def mode_expansion_at(spec: DeformationSpec, mode: str, n) -> np.ndarray:
    """Exact components of fa^2 (mode 'a') or fb^2 (mode 'b') at occupations ``n``.

    The leading axis enumerates components; remaining axes follow ``n``.
    """
    if not spec.separable:
        raise SeparableMisuse(f"{spec.describe()} has no per-mode f^2")
    if mode not in ("a", "b"):
        raise ValueError("mode must be 'a' or 'b'")
    n = np.asarray(n)
    if spec.kind is Kind.SELF_COLLISION:
        return _linear_expansion(spec.kappa, n)
    if spec.kind is Kind.Q_OSCILLATOR:
        return _q_values(spec.lam, n)[None, ...]
    rule = spec.custom_fa2 if mode == "a" else spec.custom_fb2
    return _eval_rule(rule, n)[None, ...]


def joint_expansion_at(spec: DeformationSpec, na, nb) -> np.ndarray:
    """Exact components of the joint f^2 at broadcast occupations ``(na, nb)``."""
    if spec.separable:
        raise SeparableMisuse(f"{spec.describe()} is separable; use per-mode f^2")
    na, nb = np.broadcast_arrays(np.asarray(na), np.asarray(nb))
    if spec.kind is Kind.IDENTITY:
        return np.ones((1,) + na.shape)
    if spec.kind is Kind.CROSS_COLLISION:
        return _linear_expansion(spec.kappa, na + nb)
    if spec.kind is Kind.CUSTOM_ENTANGLED:
        return _eval_rule(spec.custom_f2, na, nb)[None, ...]
    raise SeparableMisuse(f"{spec.describe()} is not an entangled deformation")


def mode_expansion(spec: DeformationSpec, mode: str, m: int) -> np.ndarray:
    """Per-mode components for n = 0..m-1, shape ``(K, m)``."""
    return mode_expansion_at(spec, mode, np.arange(m))


def joint_expansion(spec: DeformationSpec, m: int) -> np.ndarray:
    """Joint components for na, nb = 0..m-1, shape ``(K, m, m)``."""
    na, nb = np.meshgrid(np.arange(m), np.arange(m), indexing="ij")
    return joint_expansion_at(spec, na, nb)


# -- scalar evaluation ----------------------------------------------------------

def _checked(value: float, where: str) -> float:
    if value < 0:
        raise NegativeDeformation(f"f^2{where} = {value!r} < 0")
    return value


def f_squared(spec: DeformationSpec, na: int, nb: int) -> float:
    """Joint f^2(na, nb) of an entangled spec."""
    if spec.separable:
        raise SeparableMisuse(
            f"{spec.describe()} is separable; use fa_squared / fb_squared")
    if na < 0 or nb < 0:
        raise ValueError("occupation numbers must be nonnegative")
    if spec.kind is Kind.IDENTITY:
        return 1.0
    if spec.kind is Kind.CROSS_COLLISION:
        value = math.fsum(_linear_expansion(spec.kappa, na + nb).ravel())
    else:
        value = float(spec.custom_f2(na, nb))
    return _checked(value, f"({na}, {nb})")


def _mode_f_squared(spec, mode, n):
    if not spec.separable:
        raise SeparableMisuse(f"{spec.describe()} is entangled; use f_squared")
    if n < 0:
        raise ValueError("occupation numbers must be nonnegative")
    if spec.kind is Kind.SELF_COLLISION:
        value = math.fsum(_linear_expansion(spec.kappa, n).ravel())
    elif spec.kind is Kind.Q_OSCILLATOR:
        value = float(_q_values(spec.lam, [n])[0])
    else:
        rule = spec.custom_fa2 if mode == "a" else spec.custom_fb2
        value = float(rule(n))
    return _checked(value, f"_{mode}({n})")


def fa_squared(spec: DeformationSpec, n: int) -> float:
    return _mode_f_squared(spec, "a", n)


def fb_squared(spec: DeformationSpec, n: int) -> float:
    return _mode_f_squared(spec, "b", n)


# -- validation --------------------------------------------------------------------

@dataclass(frozen=True, eq=False)
class ValidationReport:
    """Outcome of :func:`validate` over occupations ``0..n_max+1`` per mode.

    For entangled specs ``f2`` holds the exact expansion table of shape
    ``(K, n_max+2, n_max+2)``; for separable specs ``fa2``/``fb2`` hold
    ``(K, n_max+2)`` tables.  ``values`` are the correctly rounded doubles.
    """

    spec: DeformationSpec
    n_max: int
    nonnegative: bool
    symmetric: Optional[bool]
    separable_consistent: bool
    failures: list = field(default_factory=list)
    f2: Optional[np.ndarray] = None
    fa2: Optional[np.ndarray] = None
    fb2: Optional[np.ndarray] = None

    @property
    def ok(self) -> bool:
        return not self.failures

    @property
    def size(self) -> int:
        return self.n_max + 2


def validate(spec: DeformationSpec, n_max: int) -> ValidationReport:
    """Check nonnegativity, declared symmetry and separability over [0, n_max+1]^2.

    Never raises for a bad deformation; failures are collected in the report.
    """
    if n_max < 1:
        raise ValueError("n_max must be >= 1")
    m = n_max + 2
    failures = []
    separable_consistent = spec.separable == (spec.kind in _SEPARABLE_KINDS) or (
        spec.kind is Kind.IDENTITY)
    if not separable_consistent:
        failures.append(
            f"separable={spec.separable} inconsistent with kind {spec.kind.value}")
        return ValidationReport(spec, n_max, False, None, False, failures)

    f2 = fa2 = fb2 = None
    try:
        if spec.separable:
            fa2 = mode_expansion(spec, "a", m)
            fb2 = mode_expansion(spec, "b", m)
            tables = [fa2, fb2]
        else:
            f2 = joint_expansion(spec, m)
            tables = [f2]
    except (FDeformError, ValueError, TypeError, ArithmeticError) as exc:
        failures.append(f"deformation not evaluable over 0..{m - 1}: {exc}")
        return ValidationReport(spec, n_max, False, None, True, failures)

    finite = all(np.all(np.isfinite(t)) for t in tables)
    if not finite:
        failures.append("f^2 not finite over the active range")
        return ValidationReport(spec, n_max, False, None, True, failures)

    values = [_exact.reduce(t) for t in tables]
    nonnegative = all(np.all(v >= 0) for v in values)
    if not nonnegative:
        where = []
        for v in values:
            idx = np.argwhere(v < 0)
            where.append(f"{tuple(int(i) for i in idx[0])} -> {v[tuple(idx[0])]!r}")
        failures.append("f^2 negative at " + ", ".join(where))

    if spec.separable:
        # symmetric under na <-> nb iff fa^2 == fb^2 componentwise in value
        symmetric = bool(np.array_equal(values[0], values[1]))
    else:
        symmetric = bool(np.array_equal(values[0], values[0].T))
    if spec.declared_symmetric and not symmetric:
        failures.append("declared symmetric but f^2(na, nb) != f^2(nb, na)")

    return ValidationReport(spec, n_max, nonnegative, symmetric, True, failures,
                            f2=f2, fa2=fa2, fb2=fb2)
