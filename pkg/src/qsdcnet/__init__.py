"""Simulation of EPR-pair quantum secure direct communication networks."""

from .adversary import (
    AncillaEntangling,
    BasisPolicy,
    DishonestServer,
    InterceptResend,
    NoAttack,
    TrojanHorse,
)
from .bell import BellIndex, PauliOp, SwapOutcome
from .bidirectional import (
    AbortAtSampleCheck,
    AbortAtVerification,
    CapacityMismatch,
    ProtocolAbort,
    SessionConfig,
    Transcript,
    run_session,
)
from .quantum import MeasurementBasis, QuantumState, RandomStream
from .security import LeakageReport, attack_sweep, holevo_numeric, i0_closed_form
from .swapping import SwapSessionConfig, run_swap_session

__version__ = "0.1.0"
