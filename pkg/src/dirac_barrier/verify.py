"""Seeded self-verification: closed forms against independent routes.

Every check draws its own random kinematics from a ``numpy`` generator
seeded once per run, so a report is reproducible from ``(samples, seed)``.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Callable, Iterable, Iterator, Optional, Sequence

import numpy as np

from .amplitudes import closed_form_amplitudes, helicity_channels
from .errors import SingularMatchError
from .kinematics import BarrierChannel, EnergyZone, Kinematics, barrier_channel, make_kinematics
from .matching import STRUCTURAL_ZEROS, solve_continuity, transfer_matrix_closed, transfer_matrix_numeric
from .phases import IncomingState, reflected_intensities
from .spinors import helicity_operator, helicity_spinor

ZONES = (EnergyZone.DIFFUSION, EnergyZone.KLEIN, EnergyZone.TUNNELING)
BOUNDARY_BAND = 1e-8
# keeps the barrier basis away from its removable singularity at (E - V0)^2 = m^2
ORACLE_GAP = 1e-6

TOLERANCES = {
    "unitarity": 1e-11,
    "channel_unitarity": 1e-11,
    "oracle_equivalence": 1e-10,
    "transfer_matrix": 1e-11,
    "structural_zeros": 1e-11,
    "helicity_eigen": 1e-13,
    "spinor_norm": 1e-12,
    "spinor_orthogonality": 1e-13,
    "head_on_zero": 0.0,
    "resonance_totality": 1e-10,
    "phase_law": 1e-12,
}


def sample_kinematics(
    rng: np.random.Generator,
    zone: EnergyZone,
    *,
    m: float = 1.0,
    E_range: tuple[float, float] = (1.05, 6.0),
    max_angle: float = 1.3,
    L_range: tuple[float, float] = (0.05, 3.0),
    boundary_band: float = BOUNDARY_BAND,
    energy_gap: float = 0.0,
    head_on: bool = False,
) -> tuple[Kinematics, BarrierChannel]:
    """Draw one random kinematic point inside ``zone``.

    The barrier height is placed relative to the zone edges
    ``E - V0 = ±sqrt(p2^2 + m^2)`` so every draw lands in the requested zone;
    points within ``boundary_band`` of ``q1^2 = 0`` or within ``energy_gap``
    of ``(E - V0)^2 = m^2`` are redrawn.
    """
    if zone not in ZONES:
        raise ValueError(f"cannot sample zone {zone}")
    while True:
        E = m * rng.uniform(*E_range)
        angle = 0.0 if head_on else rng.uniform(-max_angle, max_angle)
        L = rng.uniform(*L_range) / m
        p2 = math.sqrt((E - m) * (E + m)) * math.sin(angle)
        edge = math.hypot(p2, m)
        if zone is EnergyZone.DIFFUSION:
            V0 = E - edge - m * rng.uniform(0.0, 4.0)
        elif zone is EnergyZone.KLEIN:
            V0 = E + edge + m * rng.uniform(0.0, 4.0)
        else:
            V0 = E - edge * rng.uniform(-1.0, 1.0)
        k = make_kinematics(E, angle, m, V0, L)
        ch = barrier_channel(k)
        if ch.zone is not zone or abs(ch.q1_squared) < boundary_band * m * m:
            continue
        if abs((E - V0) ** 2 - m * m) < energy_gap * m * m:
            continue
        return k, ch


def relative_error(value: complex, reference: complex) -> float:
    if reference == 0:
        return abs(value)
    return abs(value - reference) / abs(reference)


@dataclass
class CheckResult:
    name: str
    tolerance: float
    max_residual: float = 0.0
    count: int = 0
    worst: Optional[dict] = None
    failures: int = 0

    @property
    def passed(self) -> bool:
        return self.failures == 0 and self.count > 0

    def record(self, residual: float, sample: dict) -> None:
        self.count += 1
        if not math.isfinite(residual):
            residual = math.inf
        if residual > self.tolerance:
            self.failures += 1
        if residual > self.max_residual or self.worst is None:
            self.max_residual = max(residual, self.max_residual)
            self.worst = sample


def describe(k: Kinematics, **extra: float) -> dict:
    out = {"E": k.E, "angle": k.angle, "m": k.m, "p1": k.p1, "p2": k.p2, "V0": k.V0, "L": k.L}
    out.update(extra)
    return out


# --------------------------------------------------------------------------
# individual checks; each yields (residual, sample-description)
# --------------------------------------------------------------------------

CheckFn = Callable[[np.random.Generator, int, Sequence[EnergyZone]], Iterator[tuple[float, dict]]]


def _unitarity(rng, n, zones):
    for zone in zones:
        for _ in range(n):
            k, ch = sample_kinematics(rng, zone)
            yield closed_form_amplitudes(k, ch).unitarity_residual, describe(k)


def _channel_unitarity(rng, n, zones):
    for zone in zones:
        for _ in range(n):
            k, ch = sample_kinematics(rng, zone)
            state = _random_state(rng)
            amp = closed_form_amplitudes(k, ch)
            channels = helicity_channels(amp, state.I_plus, state.I_minus)
            yield channels.probability_residual, describe(k, alpha=state.alpha, beta=state.beta)


def _oracle(rng, n, zones):
    for zone in zones:
        for _ in range(n):
            k, ch = sample_kinematics(rng, zone, energy_gap=ORACLE_GAP)
            amp = closed_form_amplitudes(k, ch)
            try:
                sol = solve_continuity(k, ch, 1.0, 0.0)
            except SingularMatchError:
                yield math.inf, describe(k)
                continue
            residual = max(
                relative_error(sol.R_plus, amp.R),
                relative_error(sol.R_minus, amp.R_tilde),
                relative_error(sol.T_plus, amp.T),
                abs(sol.T_minus),
            )
            yield residual, describe(k)


def _transfer(rng, n, zones):
    for zone in zones:
        for _ in range(n):
            k, ch = sample_kinematics(rng, zone, energy_gap=ORACLE_GAP)
            try:
                numeric = transfer_matrix_numeric(k, ch).M
            except SingularMatchError:
                yield math.inf, describe(k)
                continue
            closed = transfer_matrix_closed(k, ch).matrix()
            yield float(np.abs(numeric - closed).max() / np.linalg.norm(closed)), describe(k)


def _structural_zeros(rng, n, zones):
    for zone in zones:
        for _ in range(n):
            k, ch = sample_kinematics(rng, zone, energy_gap=ORACLE_GAP)
            try:
                M = transfer_matrix_numeric(k, ch).M
            except SingularMatchError:
                yield math.inf, describe(k)
                continue
            yield float(np.abs(M[STRUCTURAL_ZEROS]).max() / np.linalg.norm(M)), describe(k)


def _random_free(rng):
    m = 1.0
    E = m * rng.uniform(1.01, 8.0)
    angle = rng.uniform(-1.5, 1.5)
    p = math.sqrt((E - m) * (E + m))
    return p * math.cos(angle), p * math.sin(angle), E, m


def _helicity_eigen(rng, n, zones):
    for _ in range(n):
        p1, p2, E, m = _random_free(rng)
        for direction in (1, -1):
            op = helicity_operator(direction * p1, p2)
            for sign in (1, -1):
                psi = helicity_spinor(sign, direction * p1, p2, E, m)
                residual = float(np.abs(op @ psi - sign * psi).max())
                yield residual, {"p1": direction * p1, "p2": p2, "E": E, "m": m, "helicity": sign}


def _spinor_norm(rng, n, zones):
    for _ in range(n):
        p1, p2, E, m = _random_free(rng)
        for sign in (1, -1):
            psi = helicity_spinor(sign, p1, p2, E, m)
            yield abs(float(np.vdot(psi, psi).real) - 1.0), {"p1": p1, "p2": p2, "E": E, "m": m, "helicity": sign}


def _spinor_orthogonality(rng, n, zones):
    for _ in range(n):
        p1, p2, E, m = _random_free(rng)
        overlap = np.vdot(helicity_spinor(1, p1, p2, E, m), helicity_spinor(-1, p1, p2, E, m))
        yield abs(overlap), {"p1": p1, "p2": p2, "E": E, "m": m}


def _head_on(rng, n, zones):
    for zone in zones:
        for _ in range(n):
            k, ch = sample_kinematics(rng, zone, head_on=True)
            amp = closed_form_amplitudes(k, ch)
            # R must be an exact zero while the flip amplitude survives
            residual = abs(amp.R) if abs(amp.R_tilde) > 0 else math.inf
            yield residual, describe(k)


def _resonance(rng, n, zones):
    for _ in range(n):
        k, ch = sample_kinematics(rng, EnergyZone.DIFFUSION)
        state = _random_state(rng)
        for order in range(1, 6):
            kk = k.replace(L=order * math.pi / ch.q1.real)
            amp = closed_form_amplitudes(kk)
            channels = helicity_channels(amp, state.I_plus, state.I_minus)
            residual = max(abs(channels.R_plus), abs(channels.R_minus), abs(abs(amp.T) - 1.0))
            yield residual, describe(kk, n=order)


def _phase_law(rng, n, zones):
    for zone in zones:
        for _ in range(n):
            k, ch = sample_kinematics(rng, zone)
            state = _random_state(rng)
            report = reflected_intensities(closed_form_amplitudes(k, ch), state)
            yield report.cross_check_residual, describe(k, alpha=state.alpha, beta=state.beta)


def _random_state(rng: np.random.Generator) -> IncomingState:
    mixing = rng.uniform(0.0, math.pi / 2)
    return IncomingState.from_mixing(mixing, rng.uniform(-math.pi, math.pi), rng.uniform(-math.pi, math.pi))


CHECKS: dict[str, CheckFn] = {
    "unitarity": _unitarity,
    "channel_unitarity": _channel_unitarity,
    "oracle_equivalence": _oracle,
    "transfer_matrix": _transfer,
    "structural_zeros": _structural_zeros,
    "helicity_eigen": _helicity_eigen,
    "spinor_norm": _spinor_norm,
    "spinor_orthogonality": _spinor_orthogonality,
    "head_on_zero": _head_on,
    "resonance_totality": _resonance,
    "phase_law": _phase_law,
}


@dataclass
class VerificationReport:
    samples: int
    seed: int
    zones: tuple[EnergyZone, ...]
    results: list[CheckResult] = field(default_factory=list)

    @property
    def passed(self) -> bool:
        return all(r.passed for r in self.results)

    def lines(self) -> list[str]:
        zones = ",".join(z.value for z in self.zones)
        out = [f"verify samples={self.samples} seed={self.seed} zones={zones}"]
        for r in self.results:
            status = "PASS" if r.passed else "FAIL"
            out.append(
                f"{status} {r.name:<22} max_residual={r.max_residual:.3e} tol={r.tolerance:.1e} "
                f"n={r.count} failures={r.failures}"
            )
            if not r.passed and r.worst is not None:
                sample = " ".join(f"{key}={value!r}" for key, value in r.worst.items())
                out.append(f"     worst sample: {sample}")
        out.append("RESULT " + ("PASS" if self.passed else "FAIL"))
        return out


def run_verification(
    samples: int = 1000,
    seed: int = 42,
    zones: Iterable[EnergyZone] = ZONES,
    tolerance: Optional[float] = None,
    checks: Optional[Iterable[str]] = None,
) -> VerificationReport:
    """Run the invariant and oracle suites.

    ``tolerance`` overrides every per-check tolerance at once (handy for
    proving the harness can fail).
    """
    zones = tuple(EnergyZone(z) for z in zones)
    rng = np.random.default_rng(seed)
    report = VerificationReport(samples=samples, seed=seed, zones=zones)
    for name in checks or CHECKS:
        fn = CHECKS[name]
        tol = TOLERANCES[name] if tolerance is None else tolerance
        result = CheckResult(name=name, tolerance=tol)
        for residual, sample in fn(rng, samples, zones):
            result.record(residual, sample)
        report.results.append(result)
    return report
