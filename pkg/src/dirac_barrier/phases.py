"""Relative helicity phases seen through reflected intensities.

When both incoming helicities are present, the reflected helicity
intensities carry an interference term proportional to ``sin(alpha - beta)``,
the relative phase of ``I+ = |I+| e^{i alpha}`` and ``I- = |I-| e^{i beta}``.
This module evaluates that law, inverts it, and reports the fixed relative
phase of the reflected pair for polarized input.
"""
from __future__ import annotations

import cmath
import math
from dataclasses import dataclass
from typing import NamedTuple

from .amplitudes import ScatteringAmplitudes, helicity_channels
from .errors import DomainError, InconsistentMeasurementError, NormalizationError, UndefinedPhaseError

NORM_TOL = 1e-12
PHASE_FLOOR = 1e-14
SINE_SLACK = 1e-9
EXTREMUM_TOL = 1e-12


def wrap_phase(phi: float) -> float:
    """Map an angle onto (-pi, pi]."""
    wrapped = math.remainder(phi, 2 * math.pi)
    return math.pi if wrapped <= -math.pi else wrapped


@dataclass(frozen=True)
class IncomingState:
    mag_plus: float
    mag_minus: float
    alpha: float = 0.0
    beta: float = 0.0

    def __post_init__(self) -> None:
        if self.mag_plus < 0 or self.mag_minus < 0:
            raise NormalizationError("helicity magnitudes must be non-negative")
        norm = self.mag_plus**2 + self.mag_minus**2
        if abs(norm - 1) > NORM_TOL:
            raise NormalizationError(f"|I+|^2 + |I-|^2 = {norm!r}, expected 1")

    @classmethod
    def from_mixing(cls, mixing: float, alpha: float = 0.0, beta: float = 0.0) -> IncomingState:
        """``|I+| = cos(mixing)``, ``|I-| = sin(mixing)`` for mixing in [0, pi/2]."""
        if not 0 <= mixing <= math.pi / 2:
            raise DomainError(f"mixing angle must lie in [0, pi/2], got {mixing}")
        return cls(math.cos(mixing), math.sin(mixing), alpha, beta)

    @property
    def I_plus(self) -> complex:
        return cmath.rect(self.mag_plus, self.alpha)

    @property
    def I_minus(self) -> complex:
        return cmath.rect(self.mag_minus, self.beta)

    @property
    def relative_phase(self) -> float:
        return wrap_phase(self.alpha - self.beta)


@dataclass(frozen=True)
class IntensityReport:
    r_plus: float
    r_minus: float
    t_plus: float
    t_minus: float
    relative_phase_used: float
    cross_check_residual: float

    @property
    def total(self) -> float:
        return self.r_plus + self.r_minus + self.t_plus + self.t_minus


class RelativePhase(NamedTuple):
    phase: float
    modulus: float


def _orientation(amp: ScatteringAmplitudes) -> int:
    """Sign of the interference term: +1 when ``R_tilde/R = -i|.|``.

    That is the case for ``p2 > 0``; incidence from below the normal
    (``p2 < 0``) flips it.
    """
    return -1 if (amp.R * amp.R_tilde.conjugate()).imag < 0 else 1


def interference_coefficients(amp: ScatteringAmplitudes, mag_plus: float, mag_minus: float) -> tuple[float, float, float]:
    """``(C_plus, C_minus, C1)`` with ``|R±|^2 = C_± ∓ C1 sin(alpha - beta)``.

    ``C1`` already includes the orientation sign, so it is negative for
    ``p2 < 0``.
    """
    abs_R, abs_Rt = abs(amp.R), abs(amp.R_tilde)
    c_plus = (mag_plus * abs_R) ** 2 + (mag_minus * abs_Rt) ** 2
    c_minus = (mag_minus * abs_R) ** 2 + (mag_plus * abs_Rt) ** 2
    c1 = 2 * mag_plus * mag_minus * abs_R * abs_Rt * _orientation(amp)
    return c_plus, c_minus, c1


def reflected_intensities(amp: ScatteringAmplitudes, state: IncomingState) -> IntensityReport:
    """Helicity-resolved intensities from the sinusoidal interference law.

    The same quantities are also formed directly from ``|I± R + I∓ R_tilde|^2``;
    the largest disagreement is kept as ``cross_check_residual``.
    """
    phi = state.relative_phase
    c_plus, c_minus, c1 = interference_coefficients(amp, state.mag_plus, state.mag_minus)
    r_plus = c_plus - c1 * math.sin(phi)
    r_minus = c_minus + c1 * math.sin(phi)
    t_plus = (state.mag_plus * abs(amp.T)) ** 2
    t_minus = (state.mag_minus * abs(amp.T)) ** 2

    direct = helicity_channels(amp, state.I_plus, state.I_minus)
    d_rp, d_rm, d_tp, d_tm = direct.intensities
    residual = max(abs(r_plus - d_rp), abs(r_minus - d_rm), abs(t_plus - d_tp), abs(t_minus - d_tm))
    return IntensityReport(r_plus, r_minus, t_plus, t_minus, phi, residual)


def reflected_relative_phase(amp: ScatteringAmplitudes) -> RelativePhase:
    """Phase and modulus of ``R_tilde / R`` for a polarized incoming wave."""
    if abs(amp.R) < PHASE_FLOOR:
        raise UndefinedPhaseError("helicity-conserving reflection vanishes (head-on incidence); no relative phase")
    ratio = amp.R_tilde / amp.R
    return RelativePhase(wrap_phase(cmath.phase(ratio)), abs(ratio))


def infer_relative_phase(
    measured_r_plus: float,
    measured_r_minus: float,
    amp: ScatteringAmplitudes,
    in_mags: tuple[float, float],
) -> tuple[float, ...]:
    """Relative incoming phase(s) compatible with two reflected intensities.

    Both intensities are used: their half-difference from the phase-free
    baselines fixes ``sin(alpha - beta)``.  The two arcsine branches
    ``phi`` and ``pi - phi`` are returned (one value at the extremum).
    """
    mag_plus, mag_minus = in_mags
    norm = mag_plus**2 + mag_minus**2
    if abs(norm - 1) > NORM_TOL:
        raise NormalizationError(f"|I+|^2 + |I-|^2 = {norm!r}, expected 1")
    c_plus, c_minus, c1 = interference_coefficients(amp, mag_plus, mag_minus)
    if abs(c1) <= PHASE_FLOOR:
        raise InconsistentMeasurementError(
            "interference term vanishes (|I+ I- R R_tilde| ~ 0); the relative phase is unobservable"
        )
    sine = ((c_plus - measured_r_plus) + (measured_r_minus - c_minus)) / (2 * c1)
    if abs(sine) > 1 + SINE_SLACK:
        raise InconsistentMeasurementError(f"measured intensities imply sin(alpha - beta) = {sine:.12g}")
    if abs(sine) >= 1 - EXTREMUM_TOL:
        # double root at the interference extremum
        return (math.copysign(math.pi / 2, sine),)
    phi = math.asin(sine)
    return (phi, wrap_phase(math.pi - phi))


def isospin_ratio(theta: float, alpha: float, eps: float = 1e-12) -> float:
    """Cross-section ratio ``2 / (1 + cos(alpha) sin(2 theta))``.

    ``theta`` mixes the ``np`` and ``pn`` orderings and ``alpha`` is their
    relative phase.
    """
    denominator = 1 + math.cos(alpha) * math.sin(2 * theta)
    if denominator <= eps:
        raise DomainError(f"ratio diverges: 1 + cos(alpha) sin(2 theta) = {denominator:.3e}")
    return 2 / denominator
