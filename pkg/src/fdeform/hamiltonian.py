"""Diagonal deformed Hamiltonian and the interference phase exponent.

Both deformed Hamiltonians are diagonal in the occupation basis |na, nb>.
Entangled form (joint f^2)::

    H(na, nb) = 1/2 [ (na + nb) f^2(na, nb)
                      + (na + 1) f^2(na + 1, nb)
                      + (nb + 1) f^2(na, nb + 1) ]

Separable form (per-mode fa^2, fb^2)::

    H(na, nb) = 1/2 [ na fa^2(na) + nb fb^2(nb)
                      + (na + 1) fa^2(na + 1) + (nb + 1) fb^2(nb + 1) ]

The phase exponent is E(na, nb) = H(na, nb + 1) - H(na + 1, nb).  It is
evaluated from the exact expansions of both Hamiltonian values and rounded
once, so sum-only structure (cross collisions, identity) gives E == 0.0
exactly and self collisions give 2*kappa*(nb - na) to within an ulp.

Units: hbar = c = 1 and unit mode frequencies, so f == 1 gives
H = na + nb + 1.
"""

from __future__ import annotations

import enum
from typing import Callable, Optional

import numpy as np

from . import _exact
from .deformation import (DeformationSpec, Kind, ValidationReport,
                          joint_expansion_at, mode_expansion_at, validate)
from .errors import InvalidDeformation, NegativeDeformation, SeparableMisuse

# lattice rows reduced per chunk in e_table; bounds peak memory
_CHUNK_ROWS = 64


class Form(enum.Enum):
    ENTANGLED = "entangled"
    SEPARABLE = "separable"


class _ReportSource:
    """f^2 components looked up from a validated report's tables."""

    def __init__(self, report: ValidationReport):
        self.report = report

    def joint(self, na, nb):
        return self.report.f2[:, na, nb]

    def mode(self, mode, n):
        table = self.report.fa2 if mode == "a" else self.report.fb2
        return table[:, n]


class _DirectSource:
    """f^2 components evaluated on demand, rejecting negative values."""

    def __init__(self, spec: DeformationSpec):
        self.spec = spec

    @staticmethod
    def _check(comp, where):
        if np.any(_exact.reduce(comp) < 0):
            raise NegativeDeformation(f"f^2{where} < 0 in the requested range")
        return comp

    def joint(self, na, nb):
        return self._check(joint_expansion_at(self.spec, na, nb), "")

    def mode(self, mode, n):
        return self._check(mode_expansion_at(self.spec, mode, n), f"_{mode}")


class DiagonalHamiltonian:
    """Evaluator for H(na, nb) built on a :class:`DeformationSpec`.

    ``form`` defaults to the one matching the spec.  The identity
    deformation is accepted in either form since f == 1 is both.
    """

    def __init__(self, spec: DeformationSpec, form: Optional[Form] = None):
        if form is None:
            form = Form.SEPARABLE if spec.separable else Form.ENTANGLED
        form = Form(form)
        if spec.kind is not Kind.IDENTITY and spec.separable != (form is Form.SEPARABLE):
            raise SeparableMisuse(f"{spec.describe()} cannot be used in {form.value} form")
        self.spec = spec
        self.form = form

    def __repr__(self):
        return f"{type(self).__name__}({self.spec.describe()}, form={self.form.value})"

    def _twice_h(self, source, na, nb) -> np.ndarray:
        """Exact components of 2*H at broadcast index arrays ``(na, nb)``."""
        na, nb = np.broadcast_arrays(np.asarray(na, dtype=np.int64),
                                     np.asarray(nb, dtype=np.int64))
        if self.spec.kind is Kind.IDENTITY:
            parts = [(2.0 * (na + nb + 1)).astype(float)[None, ...]]
        elif self.form is Form.ENTANGLED:
            parts = [
                _exact.scale(source.joint(na, nb), na + nb),
                _exact.scale(source.joint(na + 1, nb), na + 1),
                _exact.scale(source.joint(na, nb + 1), nb + 1),
            ]
        else:
            parts = [
                _exact.scale(source.mode("a", na), na),
                _exact.scale(source.mode("a", na + 1), na + 1),
                _exact.scale(source.mode("b", nb), nb),
                _exact.scale(source.mode("b", nb + 1), nb + 1),
            ]
        shift = self._shift(na, nb)
        if shift is not None:
            parts.append(shift)
        return np.concatenate([np.broadcast_to(p, p.shape[:1] + na.shape) for p in parts])

    def _shift(self, na, nb):
        """Optional extra exact component of 2*H (see ShiftedHamiltonian)."""
        return None

    def _source(self, n_max: int):
        report = validate(self.spec, max(n_max, 1))
        if not report.ok:
            raise InvalidDeformation(report)
        return _ReportSource(report)

    def h(self, na: int, nb: int) -> float:
        if na < 0 or nb < 0:
            raise ValueError("occupation numbers must be nonnegative")
        comp = self._twice_h(_DirectSource(self.spec), [na], [nb])
        return 0.5 * float(_exact.reduce(comp)[0])

    def exponent(self, na: int, nb: int) -> float:
        if na < 0 or nb < 0:
            raise ValueError("occupation numbers must be nonnegative")
        src = _DirectSource(self.spec)
        comp = np.concatenate([self._twice_h(src, [na], [nb + 1]),
                               -self._twice_h(src, [na + 1], [nb])])
        return 0.5 * float(_exact.reduce(comp)[0])

    def h_table(self, n_max: int) -> np.ndarray:
        """H(na, nb) for na, nb in 0..n_max; validates f^2 over 0..n_max+1."""
        src = self._source(n_max)
        na, nb = np.meshgrid(np.arange(n_max + 1), np.arange(n_max + 1), indexing="ij")
        return 0.5 * _exact.reduce(self._twice_h(src, na, nb))

    def e_table(self, n: int) -> np.ndarray:
        """E(na, nb) for na, nb in 0..n; validates f^2 over 0..n+2."""
        src = self._source(n + 1)
        out = np.empty((n + 1, n + 1))
        cols = np.arange(n + 1)[None, :]
        for r0 in range(0, n + 1, _CHUNK_ROWS):
            rows = np.arange(r0, min(r0 + _CHUNK_ROWS, n + 1))[:, None]
            comp = np.concatenate([self._twice_h(src, rows, cols + 1),
                                   -self._twice_h(src, rows + 1, cols)])
            out[rows[:, 0]] = 0.5 * _exact.reduce(comp)
        return out


class ShiftedHamiltonian(DiagonalHamiltonian):
    """``base`` plus an additive diagonal term ``shift(na, nb)``.

    ``shift`` receives integer arrays and returns doubles.  It enters the
    exact expansion, so a shift depending only on na + nb leaves E
    bit-for-bit unchanged.  Also used to inject deliberate faults.
    """

    def __init__(self, base: DiagonalHamiltonian, shift: Callable):
        super().__init__(base.spec, base.form)
        self.shift_fn = shift

    def _shift(self, na, nb):
        value = np.asarray(self.shift_fn(na, nb), dtype=float)
        return 2.0 * np.broadcast_to(value, na.shape)[None, ...]


def h_diag(H: DiagonalHamiltonian, na: int, nb: int) -> float:
    """Diagonal Hamiltonian value H(na, nb)."""
    return H.h(na, nb)


def phase_exponent(H: DiagonalHamiltonian, na: int, nb: int) -> float:
    """E(na, nb) = H(na, nb + 1) - H(na + 1, nb)."""
    return H.exponent(na, nb)
