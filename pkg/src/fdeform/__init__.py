"""Interference intensity and fringe visibility of f-deformed two-mode fields."""

from .deformation import DeformationSpec, Kind, ValidationReport, f_squared, fa_squared, fb_squared, validate
from .errors import (CapExceeded, FDeformError, InvalidDeformation, NegativeDeformation,
                     NotSymmetric, OutOfRange, SeparableMisuse, TailTooLarge, ZeroIntensity)
from .hamiltonian import DiagonalHamiltonian, Form, ShiftedHamiltonian, h_diag, phase_exponent
from .series import (CoherentScenario, TruncationPolicy, VisibilityCurve, intensity,
                     truncation_order, undeformed_intensity, visibility)

__version__ = "0.1.0"
