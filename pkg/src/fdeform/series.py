"""Poisson-weighted double series for the deformed intensity and visibility.

For equal-amplitude coherent inputs (|beta| = |alpha|) both quantities reduce
to the weighted phase sum

    S(t) = sum_{na, nb >= 0} w(na) w(nb) exp(i E(na, nb) t),
    w(n) = exp(-|alpha|^2) |alpha|^(2n) / n!,

with V(t) = S(t) and I(Delta, t) = 2|alpha|^2 [1 + Re(S(t) exp(-i Delta))],
Delta being the fringe phase phi(x) - phi.

The lattice is cut at N per mode (see :func:`truncation_order`); the omitted
Poisson weight plus a rounding allowance is reported as the truncation
bound.  Each time point is summed over the lattice in lexicographic order
(na outer, nb inner) with ``math.fsum``, so results are exactly rounded and
independent of scheduling.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np
from scipy.special import gammaln, pdtrc

from .errors import CapExceeded, NotSymmetric
from .hamiltonian import DiagonalHamiltonian

_U = 2.0 ** -53
# below exp(-700) the linear weight recurrence would start from a subnormal
_LINEAR_WEIGHT_LIMIT = 700.0


@dataclass(frozen=True, eq=False)
class CoherentScenario:
    """Product coherent input |alpha> x |alpha e^{-i phi}> and sample points.

    ``fringe_phase`` is Delta = (k1 - k2) x - phi; ``phi`` itself is only
    needed to build the explicit state (oracle path).
    """

    alpha_sq: float
    phi: float = 0.0
    fringe_phase: float = 0.0
    times: np.ndarray = field(default_factory=lambda: np.zeros(1))

    def __post_init__(self):
        if not (math.isfinite(self.alpha_sq) and self.alpha_sq >= 0):
            raise ValueError(f"alpha_sq must be finite and >= 0, got {self.alpha_sq!r}")
        times = np.atleast_1d(np.asarray(self.times, dtype=float))
        if times.ndim != 1 or times.size == 0:
            raise ValueError("times must be a non-empty 1-D grid")
        if not np.all(np.isfinite(times)):
            raise ValueError("times must be finite")
        if np.any(np.diff(times) <= 0):
            raise ValueError("times must be strictly increasing")
        times.setflags(write=False)
        object.__setattr__(self, "times", times)


@dataclass(frozen=True)
class TruncationPolicy:
    epsilon: float = 1e-12
    n_cap: int = 4096

    def __post_init__(self):
        if not 0.0 < self.epsilon < 1.0:
            raise ValueError(f"epsilon must lie in (0, 1), got {self.epsilon!r}")
        if self.n_cap < 0:
            raise ValueError("n_cap must be nonnegative")


@dataclass(frozen=True, eq=False)
class VisibilityCurve:
    t: np.ndarray
    v: np.ndarray
    truncation_bound: float
    n_cutoff: int
    weight_total: float
    symmetric_regime: bool = True

    @property
    def v_abs(self) -> np.ndarray:
        return np.abs(self.v)

    @property
    def v_arg(self) -> np.ndarray:
        return np.angle(self.v)

    def __len__(self):
        return len(self.t)


@dataclass(frozen=True, eq=False)
class IntensityMap:
    t: np.ndarray
    delta: np.ndarray
    intensity: np.ndarray  # shape (len(t), len(delta))
    truncation_bound: float


def poisson_tail(alpha_sq: float, n) -> np.ndarray:
    """P(X > n) for X ~ Poisson(alpha_sq)."""
    n = np.asarray(n)
    if alpha_sq == 0:
        return np.zeros(n.shape)
    return pdtrc(n, alpha_sq)


def truncation_order(alpha_sq: float, policy: TruncationPolicy = TruncationPolicy()) -> int:
    """Smallest per-mode cutoff N whose single-mode tail is at most epsilon/2.

    The joint omitted weight is then 1 - (1 - tail)^2 <= epsilon.
    """
    if not alpha_sq >= 0:
        raise ValueError("alpha_sq must be >= 0")
    tails = poisson_tail(alpha_sq, np.arange(policy.n_cap + 1))
    ok = np.flatnonzero(tails <= 0.5 * policy.epsilon)
    if ok.size == 0:
        raise CapExceeded(
            f"no cutoff <= {policy.n_cap} keeps the Poisson({alpha_sq}) tail below "
            f"{0.5 * policy.epsilon:g}")
    return int(ok[0])


def omitted_weight(alpha_sq: float, n: int) -> float:
    tail = float(poisson_tail(alpha_sq, n))
    return 2.0 * tail - tail * tail


def mode_weights(alpha_sq: float, n: int) -> np.ndarray:
    """Single-mode Poisson weights w(0..n)."""
    k = np.arange(n + 1)
    if alpha_sq == 0:
        return (k == 0).astype(float)
    if alpha_sq < _LINEAR_WEIGHT_LIMIT:
        w = np.empty(n + 1)
        w[0] = math.exp(-alpha_sq)
        for j in range(n):
            w[j + 1] = w[j] * alpha_sq / (j + 1)
        return w
    return np.exp(k * math.log(alpha_sq) - alpha_sq - gammaln(k + 1))


def rounding_allowance(alpha_sq: float, n: int) -> float:
    """Bound on the accumulated relative rounding of the lattice weights."""
    extra = 2.0 * alpha_sq if alpha_sq >= _LINEAR_WEIGHT_LIMIT else 0.0
    return (4.0 * n + 8.0 + extra) * _U


@dataclass(frozen=True, eq=False)
class _Lattice:
    n: int
    weights: np.ndarray  # flattened outer product, lexicographic order
    exponents: np.ndarray
    bound: float
    weight_total: float


def _lattice(H: DiagonalHamiltonian, alpha_sq: float, policy: TruncationPolicy) -> _Lattice:
    n = truncation_order(alpha_sq, policy)
    w = mode_weights(alpha_sq, n)
    weights = np.outer(w, w).ravel()
    exponents = H.e_table(n).ravel()
    bound = omitted_weight(alpha_sq, n) + rounding_allowance(alpha_sq, n)
    return _Lattice(n, weights, exponents, bound, math.fsum(weights.tolist()))


def _phase_sums(lat: _Lattice, times) -> np.ndarray:
    out = np.empty(len(times), dtype=complex)
    for i, t in enumerate(times):
        phase = lat.exponents * t
        re = math.fsum((lat.weights * np.cos(phase)).tolist())
        im = math.fsum((lat.weights * np.sin(phase)).tolist())
        out[i] = complex(re, im)
    return out


def phase_sum(H: DiagonalHamiltonian, alpha_sq: float, times,
              policy: TruncationPolicy = TruncationPolicy()):
    """Raw weighted phase sum S(t) and its truncation bound, no symmetry gate."""
    lat = _lattice(H, alpha_sq, policy)
    times = np.atleast_1d(np.asarray(times, dtype=float))
    return _phase_sums(lat, times), lat.bound


def visibility(H: DiagonalHamiltonian, scenario: CoherentScenario,
               policy: TruncationPolicy = TruncationPolicy(),
               allow_asymmetric: bool = False) -> VisibilityCurve:
    """Complex visibility V(t) over ``scenario.times``.

    The series form of V is only established for deformations symmetric
    under na <-> nb.  Asymmetric specs raise :class:`NotSymmetric` unless
    ``allow_asymmetric`` is set, in which case the curve is flagged with
    ``symmetric_regime=False``.
    """
    symmetric = H.spec.declared_symmetric
    if not symmetric and not allow_asymmetric:
        raise NotSymmetric(
            f"{H.spec.describe()} is not declared symmetric; pass allow_asymmetric "
            "to evaluate the sum anyway")
    lat = _lattice(H, scenario.alpha_sq, policy)
    v = _phase_sums(lat, scenario.times)
    return VisibilityCurve(scenario.times, v, lat.bound, lat.n, lat.weight_total,
                           symmetric_regime=symmetric)


def fringe_intensity(alpha_sq, s, delta):
    """2|alpha|^2 [1 + Re(s e^{-i delta})] for a phase sum ``s``."""
    delta = np.asarray(delta, dtype=float)
    return 2.0 * alpha_sq * (1.0 + s.real * np.cos(delta) + s.imag * np.sin(delta))


def intensity(H: DiagonalHamiltonian, scenario: CoherentScenario,
              policy: TruncationPolicy = TruncationPolicy(), t: float = 0.0) -> float:
    """Interference intensity at time ``t`` and fringe phase ``scenario.fringe_phase``."""
    (s,), _ = phase_sum(H, scenario.alpha_sq, [t], policy)
    return float(fringe_intensity(scenario.alpha_sq, s, scenario.fringe_phase))


def intensity_map(H: DiagonalHamiltonian, scenario: CoherentScenario, deltas,
                  policy: TruncationPolicy = TruncationPolicy()) -> IntensityMap:
    """Intensities for every (t, delta) pair of ``scenario.times`` x ``deltas``."""
    deltas = np.atleast_1d(np.asarray(deltas, dtype=float))
    s, bound = phase_sum(H, scenario.alpha_sq, scenario.times, policy)
    grid = np.array([fringe_intensity(scenario.alpha_sq, si, deltas) for si in s])
    return IntensityMap(scenario.times, deltas, grid, bound)


def fringe_function(H: DiagonalHamiltonian, scenario: CoherentScenario, t: float,
                    policy: TruncationPolicy = TruncationPolicy()):
    """Vectorised map delta -> intensity at a fixed time, for fringe scans."""
    (s,), _ = phase_sum(H, scenario.alpha_sq, [t], policy)
    alpha_sq = scenario.alpha_sq
    return lambda delta: fringe_intensity(alpha_sq, s, delta)


def undeformed_intensity(alpha_sq: float, delta: float) -> float:
    """Undeformed fringe pattern 2|alpha|^2 (1 + cos delta)."""
    if alpha_sq < 0:
        raise ValueError("alpha_sq must be >= 0")
    return 2.0 * alpha_sq * (1.0 + math.cos(delta))
