"""Closed-form reflection and transmission helicity amplitudes.

``R`` keeps the incident helicity on reflection, ``R_tilde`` flips it and
``T`` is the (helicity preserving) transmission amplitude.  All three are
amplitudes, not probabilities.
"""
from __future__ import annotations

import cmath
import math
import warnings
from dataclasses import dataclass
from typing import Optional, Sequence

import numpy as np
from scipy.optimize import brentq

from .errors import DomainError, NormalizationError, ZoneError
from .kinematics import (
    EPS_ZONE,
    BarrierChannel,
    EnergyZone,
    Kinematics,
    barrier_channel,
    make_kinematics,
    oscillation_factors,
)

NORM_TOL = 1e-12
KLEIN_WARNING = (
    "Klein zone: amplitudes are the analytic continuation of the barrier formulas; "
    "pair-production effects are not modelled"
)


class ZoneWarning(UserWarning):
    pass


@dataclass(frozen=True)
class ScatteringAmplitudes:
    R: complex
    R_tilde: complex
    T: complex
    zone: EnergyZone = EnergyZone.DIFFUSION

    @property
    def reflectance(self) -> float:
        return abs(self.R) ** 2 + abs(self.R_tilde) ** 2

    @property
    def transmittance(self) -> float:
        return abs(self.T) ** 2

    @property
    def unitarity_residual(self) -> float:
        return abs(self.reflectance + self.transmittance - 1.0)

    @property
    def conserving_to_flip_ratio(self) -> complex:
        """``R / R_tilde``; equals ``i p2 E / (p1 m)`` for any barrier."""
        if self.R_tilde == 0:
            return complex("nan")
        return self.R / self.R_tilde

    @property
    def warning(self) -> Optional[str]:
        return KLEIN_WARNING if self.zone is EnergyZone.KLEIN else None


@dataclass(frozen=True)
class HelicityChannels:
    R_plus: complex
    R_minus: complex
    T_plus: complex
    T_minus: complex

    @property
    def intensities(self) -> tuple[float, float, float, float]:
        return (
            abs(self.R_plus) ** 2,
            abs(self.R_minus) ** 2,
            abs(self.T_plus) ** 2,
            abs(self.T_minus) ** 2,
        )

    @property
    def probability_residual(self) -> float:
        return abs(sum(self.intensities) - 1.0)


def closed_form_amplitudes(
    k: Kinematics, ch: Optional[BarrierChannel] = None, eps_zone: float = EPS_ZONE
) -> ScatteringAmplitudes:
    """Evaluate R, R_tilde and T for one barrier in complex arithmetic.

    Works unchanged in every zone: for tunneling q1 is imaginary and the
    trigonometric factors turn hyperbolic by themselves.
    """
    if ch is None:
        ch = barrier_channel(k, eps_zone)
    E, m, p1, p2, V0, L = k.E, k.m, k.p1, k.p2, k.V0, k.L
    if p1 <= 0:
        raise DomainError(f"grazing incidence p1={p1} has no transmitted flux")
    p_squared = (E - m) * (E + m)
    if p_squared <= 0:
        raise DomainError(f"E={E} does not exceed m={m}")
    cos_ql, sinc_ql = oscillation_factors(ch.q1, L)
    # T e^{i p1 L}
    inner = 1.0 / (cos_ql + 1j * (E * V0 - p1 * p1) / p1 * sinc_ql)
    T = cmath.exp(-1j * p1 * L) * inner
    pt = complex(p1, p2)
    R_tilde = 1j * m * V0 * pt / p_squared * sinc_ql * inner
    R = -(p2 * V0 * E * pt) / (p1 * p_squared) * sinc_ql * inner
    return ScatteringAmplitudes(R=R, R_tilde=R_tilde, T=T, zone=ch.zone)


def helicity_channels(amp: ScatteringAmplitudes, I_plus: complex, I_minus: complex) -> HelicityChannels:
    """Split the amplitudes into outgoing helicity channels for a given input."""
    norm = abs(I_plus) ** 2 + abs(I_minus) ** 2
    if abs(norm - 1) > NORM_TOL:
        raise NormalizationError(f"|I+|^2 + |I-|^2 = {norm!r}, expected 1")
    return HelicityChannels(
        R_plus=I_plus * amp.R + I_minus * amp.R_tilde,
        R_minus=I_minus * amp.R + I_plus * amp.R_tilde,
        T_plus=I_plus * amp.T,
        T_minus=I_minus * amp.T,
    )


# --------------------------------------------------------------------------
# tunneling
# --------------------------------------------------------------------------


@dataclass(frozen=True)
class TunnelingReport:
    kappa: float
    branch_residual: float
    sine_residual: float
    abs_sine: float
    min_abs_R: float
    min_abs_reflection: float
    unitarity_residual: float

    @property
    def resonance_free(self) -> bool:
        return self.abs_sine > 0 and self.min_abs_reflection > 0


def hyperbolic_amplitudes(k: Kinematics, kappa: float) -> ScatteringAmplitudes:
    """The tunneling amplitudes written with cosh/sinh of ``kappa L`` explicitly."""
    E, m, p1, p2, V0, L = k.E, k.m, k.p1, k.p2, k.V0, k.L
    p_squared = (E - m) * (E + m)
    cosh_kl = math.cosh(kappa * L)
    sinh_over_kappa = math.sinh(kappa * L) / kappa
    inner = 1.0 / (cosh_kl + 1j * (E * V0 - p1 * p1) / p1 * sinh_over_kappa)
    pt = complex(p1, p2)
    return ScatteringAmplitudes(
        R=-(p2 * V0 * E * pt) / (p1 * p_squared) * sinh_over_kappa * inner,
        R_tilde=1j * m * V0 * pt / p_squared * sinh_over_kappa * inner,
        T=cmath.exp(-1j * p1 * L) * inner,
        zone=EnergyZone.TUNNELING,
    )


def tunneling_branch_check(
    k: Kinematics,
    ch: Optional[BarrierChannel] = None,
    n_grid: int = 2048,
    L_max: float = 10.0,
) -> TunnelingReport:
    """Confirm the imaginary-q1 continuation and the absence of resonances.

    Compares the complex evaluation with the explicit hyperbolic one, checks
    ``sin(q1 L) = i sinh(kappa L)`` and scans ``L`` over ``(0, L_max]`` for a
    vanishing reflection.
    """
    if ch is None:
        ch = barrier_channel(k)
    if ch.zone is not EnergyZone.TUNNELING:
        raise ZoneError(f"tunneling check needs the tunneling zone, got {ch.zone}")
    kappa = ch.q1.imag
    complex_amp = closed_form_amplitudes(k, ch)
    hyper_amp = hyperbolic_amplitudes(k, kappa)
    branch_residual = max(
        abs(complex_amp.R - hyper_amp.R),
        abs(complex_amp.R_tilde - hyper_amp.R_tilde),
        abs(complex_amp.T - hyper_amp.T),
    )
    sine = cmath.sin(ch.q1 * k.L)
    sine_residual = abs(sine - 1j * math.sinh(abs(kappa * k.L)))

    min_abs_R = math.inf
    min_reflection = math.inf
    worst_unitarity = complex_amp.unitarity_residual
    for L in np.linspace(L_max / n_grid, L_max, n_grid):
        amp = closed_form_amplitudes(k.replace(L=float(L)), ch)
        min_abs_R = min(min_abs_R, abs(amp.R))
        min_reflection = min(min_reflection, math.sqrt(amp.reflectance))
        worst_unitarity = max(worst_unitarity, amp.unitarity_residual)
    return TunnelingReport(
        kappa=kappa,
        branch_residual=branch_residual,
        sine_residual=sine_residual,
        abs_sine=abs(sine),
        min_abs_R=min_abs_R,
        min_abs_reflection=min_reflection,
        unitarity_residual=worst_unitarity,
    )


# --------------------------------------------------------------------------
# resonances
# --------------------------------------------------------------------------

RESONANCE_VARIABLES = ("L", "E", "angle")
ROOT_TOL = 1e-12


@dataclass(frozen=True)
class Resonance:
    n: int
    variable: str
    value: float
    q1: float
    abs_T: float
    abs_R: float
    abs_R_tilde: float


def _vary(k: Kinematics, variable: str, x: float) -> Kinematics:
    if variable == "L":
        return k.replace(L=x)
    if variable == "E":
        return make_kinematics(x, k.angle, k.m, k.V0, k.L)
    if variable == "angle":
        return make_kinematics(k.E, x, k.m, k.V0, k.L)
    raise ValueError(f"unknown resonance variable {variable!r}; choose from {RESONANCE_VARIABLES}")


def _resonance_at(k: Kinematics, n: int, variable: str, x: float) -> Resonance:
    kk = _vary(k, variable, x)
    ch = barrier_channel(kk)
    amp = closed_form_amplitudes(kk, ch)
    return Resonance(
        n=n,
        variable=variable,
        value=x,
        q1=ch.q1.real,
        abs_T=abs(amp.T),
        abs_R=abs(amp.R),
        abs_R_tilde=abs(amp.R_tilde),
    )


def _diffusion_phase(k: Kinematics, variable: str, x: float) -> Optional[float]:
    """``q1 L`` at parameter value x, or None outside the diffusion zone."""
    try:
        kk = _vary(k, variable, x)
    except DomainError:
        return None
    ch = barrier_channel(kk)
    if ch.zone is not EnergyZone.DIFFUSION:
        return None
    return ch.q1.real * kk.L


def find_resonances(
    k: Kinematics,
    variable: str,
    bounds: Optional[Sequence[float]] = None,
    n_max: int = 5,
    n_grid: int = 2048,
) -> list[Resonance]:
    """All parameter values in ``bounds`` where ``q1 L = n pi`` for n = 1..n_max.

    For ``variable == "L"`` the roots are ``n pi / q1`` exactly and ``bounds``
    may be omitted.  For ``E`` and ``angle`` the range is sampled on a uniform
    grid, sign changes of ``q1 L - n pi`` are bracketed and refined with
    Brent's method.  Grid points outside the diffusion zone are dropped with
    a :class:`ZoneWarning`; if none remain a :class:`ZoneError` is raised.
    """
    if n_max < 0:
        raise ValueError("n_max must be non-negative")
    if variable not in RESONANCE_VARIABLES:
        raise ValueError(f"unknown resonance variable {variable!r}; choose from {RESONANCE_VARIABLES}")
    if n_max == 0:
        return []

    if variable == "L":
        ch = barrier_channel(k)
        if ch.zone is not EnergyZone.DIFFUSION:
            raise ZoneError(f"resonances need the diffusion zone, got {ch.zone}")
        q1 = ch.q1.real
        found = []
        for n in range(1, n_max + 1):
            L_n = n * math.pi / q1
            if bounds is None or bounds[0] <= L_n <= bounds[1]:
                found.append(_resonance_at(k, n, "L", L_n))
        return found

    if bounds is None:
        raise ValueError(f"a search range is required when scanning {variable}")
    lo, hi = float(bounds[0]), float(bounds[1])
    if not lo < hi:
        raise ValueError(f"empty search range [{lo}, {hi}]")
    grid = np.linspace(lo, hi, n_grid)
    phases = [_diffusion_phase(k, variable, float(x)) for x in grid]
    valid = np.array([p is not None for p in phases])
    if not valid.any():
        raise ZoneError(f"no point of {variable} in [{lo}, {hi}] lies in the diffusion zone")
    if not valid.all():
        warnings.warn(
            f"{int((~valid).sum())} of {n_grid} grid points of {variable} are outside the diffusion zone "
            "and were excluded from the resonance search",
            ZoneWarning,
            stacklevel=2,
        )

    found: list[Resonance] = []
    for n in range(1, n_max + 1):
        target = n * math.pi
        roots: list[float] = []
        for i in range(n_grid - 1):
            if not (valid[i] and valid[i + 1]):
                continue
            ga, gb = phases[i] - target, phases[i + 1] - target
            if ga == 0:
                root = float(grid[i])
            elif gb == 0 or ga * gb > 0:
                continue
            else:
                try:
                    root = brentq(
                        lambda x: _diffusion_phase(k, variable, x) - target,
                        float(grid[i]),
                        float(grid[i + 1]),
                        xtol=1e-15,
                        rtol=4 * np.finfo(float).eps,
                        maxiter=200,
                    )
                except TypeError:
                    # bracket dips out of the diffusion zone between grid points
                    continue
            phase = _diffusion_phase(k, variable, root)
            if phase is None or abs(phase - target) > ROOT_TOL:
                continue
            roots.append(root)
        if valid[-1] and phases[-1] == target:
            roots.append(float(grid[-1]))
        found.extend(_resonance_at(k, n, variable, r) for r in roots)
    found.sort(key=lambda r: (r.n, r.value))
    return found
