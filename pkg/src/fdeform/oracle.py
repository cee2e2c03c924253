"""Brute-force state-vector cross-check in a truncated two-mode Fock basis.

Builds |alpha> x |beta> amplitude by amplitude, evolves it with the diagonal
deformed Hamiltonian (amps(na, nb) *= exp(-i H(na, nb) t)) and evaluates the
intensity from matrix elements of a^dag a, b^dag b and a^dag b.  Nothing
here touches the series module; the two paths only share f^2 and H.

Phase convention: :func:`oracle_intensity` takes the spatial phase
phi(x) = (k1 - k2) x, i.e. the raw phase multiplying <a^dag b>.  For the
scenario convention of the series path, phi(x) = Delta + phi, see
:func:`spatial_phase`.  With the identity deformation both reproduce
2|alpha|^2 (1 + cos Delta).
"""

from __future__ import annotations

import cmath
import math
from dataclasses import dataclass
from typing import Optional

import numpy as np

from .errors import TailTooLarge, ZeroIntensity
from .hamiltonian import DiagonalHamiltonian

NORM_TARGET = 1e-12
NORM_LIMIT = 1e-8
N_MAX_CAP = 256


@dataclass(frozen=True, eq=False)
class FockState2:
    n_max: int
    amps: np.ndarray  # (n_max + 1, n_max + 1), indexed [na, nb]
    tail_bound: float

    @property
    def norm(self) -> float:
        return math.fsum((np.abs(self.amps) ** 2).ravel().tolist())


def _mode_amplitudes(z: complex, n_max: int) -> np.ndarray:
    c = np.empty(n_max + 1, dtype=complex)
    c[0] = math.exp(-0.5 * abs(z) ** 2)
    for n in range(n_max):
        c[n + 1] = c[n] * z / math.sqrt(n + 1)
    return c


def _deficit(ca: np.ndarray, cb: np.ndarray) -> float:
    pa = math.fsum((np.abs(ca) ** 2).tolist())
    pb = math.fsum((np.abs(cb) ** 2).tolist())
    return max(0.0, 1.0 - pa * pb)


def _moment_deficit(c: np.ndarray, z: complex) -> float:
    """Relative shortfall of the truncated <n> against |z|^2."""
    mean = math.fsum((np.arange(len(c)) * np.abs(c) ** 2).tolist())
    return (abs(z) ** 2 - mean) / max(1.0, abs(z) ** 2)


def coherent_state(alpha: complex, beta: complex, n_max: Optional[int] = None) -> FockState2:
    """Product coherent state truncated at ``n_max`` quanta per mode.

    Without ``n_max`` the smallest cutoff with norm deficit <= 1e-12 is
    chosen (capped at 256); the cutoff is also grown until each mode's <n>
    is converged to the same level.  A norm deficit above 1e-8 raises
    TailTooLarge.
    """
    alpha, beta = complex(alpha), complex(beta)
    if n_max is None:
        n = 1
        while True:
            ca, cb = _mode_amplitudes(alpha, n), _mode_amplitudes(beta, n)
            deficit = _deficit(ca, cb)
            converged = (deficit <= NORM_TARGET
                         and _moment_deficit(ca, alpha) <= NORM_TARGET
                         and _moment_deficit(cb, beta) <= NORM_TARGET)
            if converged or n >= N_MAX_CAP:
                break
            n = min(2 * n, N_MAX_CAP) if deficit > 1e-3 else n + 1
        n_max = n
    else:
        if n_max < 1:
            raise ValueError("n_max must be >= 1")
        ca, cb = _mode_amplitudes(alpha, n_max), _mode_amplitudes(beta, n_max)
        deficit = _deficit(ca, cb)
    if deficit > NORM_LIMIT:
        raise TailTooLarge(
            f"norm deficit {deficit:.3g} at n_max={n_max} exceeds {NORM_LIMIT:g}")
    amps = np.outer(ca, cb)
    amps.setflags(write=False)
    return FockState2(n_max, amps, deficit)


def scenario_state(alpha_sq: float, phi: float, n_max: Optional[int] = None) -> FockState2:
    """State |alpha> x |alpha e^{-i phi}> with real alpha = sqrt(alpha_sq)."""
    alpha = math.sqrt(alpha_sq)
    return coherent_state(alpha, alpha * cmath.exp(-1j * phi), n_max)


def spatial_phase(fringe_phase: float, phi: float) -> float:
    """phi(x) corresponding to the scenario fringe phase Delta = phi(x) - phi."""
    return fringe_phase + phi


def evolve(state: FockState2, H: DiagonalHamiltonian, t: float) -> FockState2:
    if t == 0:
        return state
    energies = H.h_table(state.n_max)
    # polar update keeps each modulus within 2 ulps
    r = np.abs(state.amps)
    phase = np.angle(state.amps) - energies * t
    amps = r * np.cos(phase) + 1j * (r * np.sin(phase))
    amps.setflags(write=False)
    return FockState2(state.n_max, amps, state.tail_bound)


def mean_numbers(state: FockState2):
    """(<na>, <nb>)."""
    p = np.abs(state.amps) ** 2
    n = np.arange(state.n_max + 1)
    return float(np.sum(p.sum(axis=1) * n)), float(np.sum(p.sum(axis=0) * n))


def cross_correlation(state: FockState2) -> complex:
    """<a^dag b> from explicit matrix elements."""
    a = state.amps
    na = np.arange(state.n_max)[:, None]
    nb = np.arange(1, state.n_max + 1)[None, :]
    return complex(np.sum(np.conj(a[1:, :-1]) * a[:-1, 1:] * np.sqrt((na + 1) * nb)))


def oracle_intensity(state: FockState2, delta: float) -> float:
    """<na> + <nb> + 2 Re(<a^dag b> e^{i delta}) with ``delta`` = phi(x)."""
    mean_a, mean_b = mean_numbers(state)
    ab = cross_correlation(state)
    return mean_a + mean_b + 2.0 * (ab * cmath.exp(1j * delta)).real


def oracle_visibility(state: FockState2) -> float:
    mean_a, mean_b = mean_numbers(state)
    total = mean_a + mean_b
    if total == 0:
        raise ZeroIntensity("no quanta in either mode")
    return 2.0 * abs(cross_correlation(state)) / total
