"""Planar Dirac scattering of helicity plane waves off an electrostatic barrier."""
from .amplitudes import (
    HelicityChannels,
    Resonance,
    ScatteringAmplitudes,
    TunnelingReport,
    closed_form_amplitudes,
    find_resonances,
    helicity_channels,
    tunneling_branch_check,
)
from .errors import (
    DiracBarrierError,
    DomainError,
    InconsistentMeasurementError,
    NormalizationError,
    SingularMatchError,
    UndefinedPhaseError,
    ZoneError,
)
from .kinematics import BarrierChannel, EnergyZone, Kinematics, barrier_channel, make_kinematics
from .matching import (
    FullSolution,
    MatchMatrices,
    TransferClosedForm,
    build_S,
    solve_continuity,
    transfer_matrix_closed,
    transfer_matrix_numeric,
)
from .phases import (
    IncomingState,
    IntensityReport,
    infer_relative_phase,
    isospin_ratio,
    reflected_intensities,
    reflected_relative_phase,
)
from .spinors import HelicityLabel, helicity_operator, helicity_spinor

__version__ = "0.1.0"
