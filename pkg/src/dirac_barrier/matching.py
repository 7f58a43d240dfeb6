"""Boundary matching at x = 0 and x = L.

Two independent routes to the same physics live here: the 4x4 transfer
matrix ``M = S D^-1 S^-1`` (numerically and in closed form), and a direct
8x8 solve of the continuity conditions that knows nothing about either.
"""
from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np
import scipy.linalg

from .errors import NormalizationError, SingularMatchError
from .kinematics import EPS_ZONE, BarrierChannel, EnergyZone, Kinematics, oscillation_factors
from .spinors import basis_spinor, helicity_spinor

NORM_TOL = 1e-12
_RCOND_MIN = 1e-14


@dataclass(frozen=True)
class MatchMatrices:
    """Interface matrices for one barrier.

    ``D`` holds the propagation phases ``exp(±i q1 L)``; ``D_inv`` is its exact
    inverse, equal to ``conj(D)`` whenever q1 is real.
    """

    S: np.ndarray
    D: np.ndarray
    D_inv: np.ndarray
    M: np.ndarray
    residual: float


@dataclass(frozen=True)
class TransferClosedForm:
    a_plus: complex
    a_minus: complex
    b_plus: complex
    b_minus: complex

    def matrix(self) -> np.ndarray:
        ap, am, bp, bm = self.a_plus, self.a_minus, self.b_plus, self.b_minus
        return np.array(
            [
                [am, 0, 0, bp],
                [0, ap, bp, 0],
                [0, bm, am, 0],
                [bm, 0, 0, ap],
            ],
            dtype=complex,
        )


# positions of the eight structural zeros of M
STRUCTURAL_ZEROS = np.array(
    [
        [False, True, True, False],
        [True, False, False, True],
        [True, False, False, True],
        [False, True, True, False],
    ]
)


@dataclass(frozen=True)
class FullSolution:
    """Every amplitude of the three-region wavefunction.

    ``A_*`` and ``B_*`` multiply the unnormalized barrier-region columns of
    :func:`build_S` (right- and left-moving respectively).
    """

    I_plus: complex
    I_minus: complex
    R_plus: complex
    R_minus: complex
    A_plus: complex
    A_minus: complex
    B_plus: complex
    B_minus: complex
    T_plus: complex
    T_minus: complex
    residual: float


def _check_matchable(k: Kinematics, ch: BarrierChannel, eps_zone: float) -> None:
    if ch.zone is EnergyZone.BOUNDARY:
        raise SingularMatchError(f"q1^2 = {ch.q1_squared:.3e} lies in the boundary band; S is singular")
    energy = k.E - k.V0
    if abs(energy * energy - k.m * k.m) < eps_zone:
        raise SingularMatchError(f"(E - V0)^2 - m^2 = {energy * energy - k.m * k.m:.3e}; S entries diverge")


def build_S(k: Kinematics, ch: BarrierChannel, eps_zone: float = EPS_ZONE) -> np.ndarray:
    """Columns are the barrier spinors ``psi_+(q1), psi_-(q1), psi_+(-q1), psi_-(-q1)``."""
    _check_matchable(k, ch, eps_zone)
    energy = k.E - k.V0
    cols = [
        basis_spinor(+1, ch.q1, k.p2, energy, k.m),
        basis_spinor(-1, ch.q1, k.p2, energy, k.m),
        basis_spinor(+1, -ch.q1, k.p2, energy, k.m),
        basis_spinor(-1, -ch.q1, k.p2, energy, k.m),
    ]
    return np.column_stack(cols)


def _solve_checked(A: np.ndarray, B: np.ndarray) -> np.ndarray:
    # column equilibration keeps exp(+-kappa L) scales from masquerading as rank loss
    scale = np.abs(A).max(axis=0)
    if not np.all(np.isfinite(A)) or np.any(scale == 0):
        raise SingularMatchError("matching system has a vanishing or non-finite column")
    try:
        lu, piv = scipy.linalg.lu_factor(A / scale, check_finite=True)
    except (ValueError, np.linalg.LinAlgError) as exc:
        raise SingularMatchError(str(exc)) from exc
    diag = np.abs(np.diag(lu))
    if diag.min() <= _RCOND_MIN * diag.max():
        raise SingularMatchError("matching system is numerically rank deficient")
    x = scipy.linalg.lu_solve((lu, piv), B)
    return x / (scale[:, None] if x.ndim == 2 else scale)


def transfer_matrix_numeric(k: Kinematics, ch: BarrierChannel, eps_zone: float = EPS_ZONE) -> MatchMatrices:
    """``M = S D^-1 S^-1`` by a linear solve, never an explicit inverse."""
    S = build_S(k, ch, eps_zone)
    phase = np.exp(1j * ch.q1 * k.L)
    D = np.diag([phase, phase, 1 / phase, 1 / phase])
    D_inv = np.diag([1 / phase, 1 / phase, phase, phase])
    rhs = S @ D_inv
    # M S = S D^-1  <=>  S^T M^T = (S D^-1)^T
    M = _solve_checked(S.T, rhs.T).T
    # normwise backward error of the solve M S = S D^-1
    residual = float(np.linalg.norm(M @ S - rhs) / (np.linalg.norm(M) * np.linalg.norm(S)))
    return MatchMatrices(S=S, D=D, D_inv=D_inv, M=M, residual=residual)


def transfer_matrix_closed(k: Kinematics, ch: BarrierChannel) -> TransferClosedForm:
    cos_ql, sinc_ql = oscillation_factors(ch.q1, k.L)
    energy = k.E - k.V0
    return TransferClosedForm(
        a_plus=cos_ql + k.p2 * sinc_ql,
        a_minus=cos_ql - k.p2 * sinc_ql,
        b_plus=-1j * (energy + k.m) * sinc_ql,
        b_minus=-1j * (energy - k.m) * sinc_ql,
    )


def solve_continuity(
    k: Kinematics,
    ch: BarrierChannel,
    I_plus: complex,
    I_minus: complex,
    eps_zone: float = EPS_ZONE,
) -> FullSolution:
    """Solve the eight continuity conditions for R±, A±, B±, T± directly.

    Unknown order: ``R+, R-, A+, A-, B+, B-, T+, T-``.  The wavefunction is
    matched component by component at x = 0 and x = L.
    """
    norm = abs(I_plus) ** 2 + abs(I_minus) ** 2
    if abs(norm - 1) > NORM_TOL:
        raise NormalizationError(f"|I+|^2 + |I-|^2 = {norm!r}, expected 1")
    S = build_S(k, ch, eps_zone)
    E, m, p1, p2 = k.E, k.m, k.p1, k.p2
    incoming_p = helicity_spinor(+1, p1, p2, E, m)
    incoming_m = helicity_spinor(-1, p1, p2, E, m)
    reflected_p = helicity_spinor(+1, -p1, p2, E, m)
    reflected_m = helicity_spinor(-1, -p1, p2, E, m)

    inner = np.exp(1j * ch.q1 * k.L)
    outer = np.exp(1j * p1 * k.L)
    A = np.zeros((8, 8), dtype=complex)
    b = np.zeros(8, dtype=complex)
    # x = 0: incoming + reflected = barrier interior
    A[:4, 0] = reflected_p
    A[:4, 1] = reflected_m
    A[:4, 2:6] = -S
    b[:4] = -(I_plus * incoming_p + I_minus * incoming_m)
    # x = L: barrier interior = transmitted
    A[4:, 2:4] = S[:, :2] * inner
    A[4:, 4:6] = S[:, 2:] / inner
    A[4:, 6] = -incoming_p * outer
    A[4:, 7] = -incoming_m * outer

    x = _solve_checked(A, b)
    residual = float(np.linalg.norm(A @ x - b) / max(np.linalg.norm(b), math.ulp(1.0)))
    if not residual <= 1e-10:
        raise SingularMatchError(f"continuity residual {residual:.3e} exceeds 1e-10")
    return FullSolution(
        I_plus=complex(I_plus),
        I_minus=complex(I_minus),
        R_plus=complex(x[0]),
        R_minus=complex(x[1]),
        A_plus=complex(x[2]),
        A_minus=complex(x[3]),
        B_plus=complex(x[4]),
        B_minus=complex(x[5]),
        T_plus=complex(x[6]),
        T_minus=complex(x[7]),
        residual=residual,
    )
