"""Planar helicity eigenspinors and the Dirac-representation spin matrices.

Spinors are plain ``numpy`` arrays of shape ``(4,)`` in the Pauli-Dirac
representation.  The spatial factor ``exp(i p1 x)`` is never included; the
matching code applies it at each interface.
"""
from __future__ import annotations

import cmath
import math
from typing import NamedTuple, Union

import numpy as np

from .errors import DomainError

SIGMA_X = np.array([[0, 1], [1, 0]], dtype=complex)
SIGMA_Y = np.array([[0, -1j], [1j, 0]], dtype=complex)
SIGMA_Z = np.array([[1, 0], [0, -1]], dtype=complex)

_ZERO2 = np.zeros((2, 2), dtype=complex)


def _block_diag(a: np.ndarray) -> np.ndarray:
    return np.block([[a, _ZERO2], [_ZERO2, a]])


# Sigma = diag(sigma, sigma)
SPIN_X = _block_diag(SIGMA_X)
SPIN_Y = _block_diag(SIGMA_Y)
SPIN_Z = _block_diag(SIGMA_Z)

GAMMA0 = np.diag([1, 1, -1, -1]).astype(complex)
ALPHA_X = np.block([[_ZERO2, SIGMA_X], [SIGMA_X, _ZERO2]])
ALPHA_Y = np.block([[_ZERO2, SIGMA_Y], [SIGMA_Y, _ZERO2]])


class HelicityLabel(NamedTuple):
    """Helicity ``sign`` (+1/-1) and the sign of the longitudinal momentum."""

    sign: int
    direction: int = 1


HelicityLike = Union[HelicityLabel, int]


def _label(h: HelicityLike) -> HelicityLabel:
    label = h if isinstance(h, HelicityLabel) else HelicityLabel(int(h))
    if label.sign not in (1, -1) or label.direction not in (1, -1):
        raise DomainError(f"helicity sign and direction must be +1 or -1, got {label}")
    return label


def basis_spinor(sign: int, k1: complex, p2: float, energy: float, m: float) -> np.ndarray:
    """Unnormalized helicity spinor for longitudinal momentum ``k1``.

    Components are ``(±1, (k1 + i p2)/s, s/(energy + m), ±(k1 + i p2)/(energy + m))``
    with ``s = sqrt(energy^2 - m^2)`` (principal root).  ``k1`` may be complex
    and ``energy`` may sit below ``m`` or be negative, which is what the
    barrier region needs.  Writing the third entry as ``s/(energy + m)``
    rather than ``sqrt((energy - m)/(energy + m))`` keeps the column a solution
    of the Dirac equation when ``energy + m < 0``; the two agree otherwise.
    """
    s = cmath.sqrt(energy * energy - m * m)
    kt = k1 + 1j * p2
    return np.array([sign, kt / s, s / (energy + m), sign * kt / (energy + m)], dtype=complex)


def helicity_spinor(h: HelicityLike, p1: float, p2: float, E: float, m: float) -> np.ndarray:
    """Unit-density helicity eigenspinor of a free particle.

    ``h`` is either a :class:`HelicityLabel` or a bare helicity sign.  The
    label's ``direction`` multiplies ``p1``, so ``HelicityLabel(+1, -1)`` is
    the reflected wave with momentum ``(-p1, p2)``.
    """
    label = _label(h)
    if not E > m:
        raise DomainError(f"need E > m for a free helicity spinor (E={E}, m={m})")
    if p1 == 0 and p2 == 0:
        raise DomainError("helicity is undefined at zero momentum")
    norm = 0.5 * math.sqrt((E + m) / E)
    return norm * basis_spinor(label.sign, label.direction * p1, p2, E, m)


def helicity_operator(p1: float, p2: float) -> np.ndarray:
    """``Sigma . p / |p|`` for momentum in the x-y plane."""
    p = math.hypot(p1, p2)
    if p == 0:
        raise DomainError("helicity operator needs non-zero momentum")
    return (p1 * SPIN_X + p2 * SPIN_Y) / p


def dirac_hamiltonian(p1: float, p2: float, m: float, V0: float = 0.0) -> np.ndarray:
    """Plane-wave Dirac Hamiltonian ``alpha . p + beta m + V0``."""
    return p1 * ALPHA_X + p2 * ALPHA_Y + m * GAMMA0 + V0 * np.eye(4)
