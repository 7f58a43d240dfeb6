"""Incident kinematics, barrier-region momentum and energy-zone classification.

Natural units (hbar = c = 1) throughout; the mass defaults to 1 so every
quantity is a dimensionless ratio to m.  The barrier occupies 0 < x < L with
height V0; transverse momentum p2 is conserved across both interfaces.
"""
from __future__ import annotations

import cmath
import enum
import math
from dataclasses import dataclass

from .errors import DomainError

ON_SHELL_RTOL = 1e-12
EPS_ZONE = 1e-10
# angles closer than this to pi/2 count as grazing
GRAZING_MARGIN = 1e-6
# below this |q1 L| the oscillation factors switch to their Taylor series
_SERIES_CUTOFF = 1e-4


class EnergyZone(str, enum.Enum):
    DIFFUSION = "diffusion"
    KLEIN = "klein"
    TUNNELING = "tunneling"
    BOUNDARY = "boundary"

    def __str__(self) -> str:
        return self.value


@dataclass(frozen=True)
class Kinematics:
    """On-shell incident plane wave plus the barrier it meets.

    ``L == 0`` is accepted here as the degenerate no-barrier limit used by the
    transfer-matrix checks; :func:`make_kinematics` insists on ``L > 0``.
    """

    E: float
    m: float
    p1: float
    p2: float
    V0: float
    L: float

    def __post_init__(self) -> None:
        for name in ("E", "m", "p1", "p2", "V0", "L"):
            value = getattr(self, name)
            if not math.isfinite(value):
                raise DomainError(f"{name} must be finite, got {value!r}")
        if self.m <= 0:
            raise DomainError(f"mass must be positive, got m={self.m}")
        if self.E <= self.m:
            raise DomainError(f"need E > m for a propagating incident wave (E={self.E}, m={self.m})")
        if self.p1 <= 0:
            raise DomainError(f"longitudinal momentum must be positive, got p1={self.p1}")
        if self.L < 0:
            raise DomainError(f"barrier width must be non-negative, got L={self.L}")
        mismatch = self.E**2 - (self.p1**2 + self.p2**2 + self.m**2)
        if abs(mismatch) > ON_SHELL_RTOL * self.E**2:
            raise DomainError(
                f"off-shell kinematics: E^2 - p^2 - m^2 = {mismatch:.3e} (E={self.E}, p1={self.p1}, p2={self.p2})"
            )

    @property
    def momentum(self) -> float:
        """Magnitude of the incident three-momentum."""
        return math.hypot(self.p1, self.p2)

    @property
    def angle(self) -> float:
        """Angle of incidence measured from the barrier normal."""
        return math.atan2(self.p2, self.p1)

    @property
    def energy_in_barrier(self) -> float:
        return self.E - self.V0

    @classmethod
    def from_momenta(cls, p1: float, p2: float, m: float = 1.0, V0: float = 0.0, L: float = 1.0) -> Kinematics:
        """Build kinematics with the energy derived from the momenta."""
        return cls(E=math.sqrt(p1 * p1 + p2 * p2 + m * m), m=m, p1=p1, p2=p2, V0=V0, L=L)

    def replace(self, **changes: float) -> Kinematics:
        """Return a copy with barrier parameters (``V0``, ``L``) changed.

        Changing ``E`` or the angle goes through :func:`make_kinematics` so the
        on-shell relation is re-derived rather than broken.
        """
        unknown = set(changes) - {"V0", "L"}
        if unknown:
            raise TypeError(f"only V0 and L can be replaced, got {sorted(unknown)}")
        params = {f: getattr(self, f) for f in ("E", "m", "p1", "p2", "V0", "L")}
        params.update(changes)
        return Kinematics(**params)


@dataclass(frozen=True)
class BarrierChannel:
    """Longitudinal momentum inside the barrier and the zone it implies."""

    q1: complex
    zone: EnergyZone
    q1_squared: float


def make_kinematics(E: float, angle: float, m: float = 1.0, V0: float = 0.0, L: float = 1.0) -> Kinematics:
    """Incident kinematics from energy and angle of incidence (radians).

    ``p1 = |p| cos(angle)``, ``p2 = |p| sin(angle)`` with ``|p| = sqrt(E^2 - m^2)``.
    """
    if not m > 0:
        raise DomainError(f"mass must be positive, got m={m}")
    if not E > m:
        raise DomainError(f"need E > m for a propagating incident wave (E={E}, m={m})")
    if not abs(angle) < math.pi / 2 - GRAZING_MARGIN:
        raise DomainError(
            f"angle must satisfy |angle| < pi/2 - {GRAZING_MARGIN:g} (grazing incidence excluded), got {angle}"
        )
    if not L > 0:
        raise DomainError(f"barrier width must be positive, got L={L}")
    p = math.sqrt((E - m) * (E + m))
    p1 = p * math.cos(angle)
    if p1 <= 0:
        raise DomainError(f"angle {angle} leaves no longitudinal momentum")
    return Kinematics(E=E, m=m, p1=p1, p2=p * math.sin(angle), V0=V0, L=L)


def classify_zone(E: float, V0: float, p2: float, m: float, eps_zone: float = EPS_ZONE) -> EnergyZone:
    """Energy zone from the dispersion relation inside the barrier."""
    q1_squared = (E - V0) ** 2 - p2 * p2 - m * m
    if abs(q1_squared) < eps_zone:
        return EnergyZone.BOUNDARY
    if q1_squared < 0:
        return EnergyZone.TUNNELING
    # q1^2 > 0 leaves |E - V0| > sqrt(p2^2 + m^2); the sign picks the band
    return EnergyZone.DIFFUSION if E > V0 else EnergyZone.KLEIN


def barrier_channel(k: Kinematics, eps_zone: float = EPS_ZONE) -> BarrierChannel:
    """Solve ``(E - V0)^2 = q1^2 + p2^2 + m^2`` for q1.

    Real solutions are taken positive; evanescent ones as ``i*kappa`` with
    ``kappa > 0`` so the wave decays towards +x.
    """
    q1_squared = (k.E - k.V0) ** 2 - k.p2 * k.p2 - k.m * k.m
    if q1_squared >= 0:
        q1 = complex(math.sqrt(q1_squared), 0.0)
    else:
        q1 = complex(0.0, math.sqrt(-q1_squared))
    zone = classify_zone(k.E, k.V0, k.p2, k.m, eps_zone)
    return BarrierChannel(q1=q1, zone=zone, q1_squared=q1_squared)


def oscillation_factors(q1: complex, L: float) -> tuple[complex, complex]:
    """Return ``(cos(q1 L), sin(q1 L) / q1)``.

    Both are entire functions of ``q1**2``; near ``q1 = 0`` a Taylor series
    replaces the quotient so the zone boundary is not singular.
    """
    z = q1 * L
    if abs(z) < _SERIES_CUTOFF:
        z2 = z * z
        cos_term = 1 - z2 / 2 + z2 * z2 / 24
        sinc_term = L * (1 - z2 / 6 + z2 * z2 / 120)
        return complex(cos_term), complex(sinc_term)
    return cmath.cos(z), cmath.sin(z) / q1
