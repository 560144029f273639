"""Eavesdropping strategies and the beam-splitter test for multi-photon probes."""

from __future__ import annotations

import math
from dataclasses import asdict, dataclass, field
from enum import Enum
from typing import ClassVar, Union

import numpy as np

from .bell import PauliOp
from .quantum import (
    MeasurementBasis,
    QuantumState,
    RandomStream,
    apply_unitary,
    basis_state,
    measure,
    tensor,
)


class BasisPolicy(Enum):
    RANDOM_ZX = "random"
    FIXED_Z = "Z"
    FIXED_X = "X"


@dataclass(frozen=True)
class NoAttack:
    name: ClassVar[str] = "none"


@dataclass(frozen=True)
class InterceptResend:
    basis_policy: BasisPolicy = BasisPolicy.RANDOM_ZX
    name: ClassVar[str] = "intercept-resend"

    def __post_init__(self):
        object.__setattr__(self, "basis_policy", BasisPolicy(self.basis_policy))


@dataclass(frozen=True)
class AncillaEntangling:
    d: float = 0.25
    name: ClassVar[str] = "ancilla"

    def __post_init__(self):
        if not 0.0 <= self.d <= 1.0:
            raise ValueError(f"detection parameter d={self.d} outside [0, 1]")


@dataclass(frozen=True)
class DishonestServer:
    lie_fraction: float = 1.0
    name: ClassVar[str] = "dishonest-server"

    def __post_init__(self):
        if not 0.0 <= self.lie_fraction <= 1.0:
            raise ValueError(f"lie_fraction={self.lie_fraction} outside [0, 1]")


@dataclass(frozen=True)
class TrojanHorse:
    extra_photons: int = 1
    name: ClassVar[str] = "trojan-horse"

    def __post_init__(self):
        if int(self.extra_photons) != self.extra_photons or self.extra_photons < 1:
            raise ValueError(f"extra_photons must be an integer >= 1, got {self.extra_photons}")


AttackModel = Union[NoAttack, InterceptResend, AncillaEntangling, DishonestServer, TrojanHorse]

ATTACKS: dict[str, type] = {
    cls.name: cls for cls in (NoAttack, InterceptResend, AncillaEntangling, DishonestServer, TrojanHorse)
}


def attack_to_dict(attack: AttackModel) -> dict:
    out = {"kind": attack.name}
    for k, v in asdict(attack).items():
        out[k] = v.value if isinstance(v, Enum) else v
    return out


def attack_from_dict(fields: dict) -> AttackModel:
    fields = dict(fields)
    kind = fields.pop("kind", "none")
    if kind not in ATTACKS:
        raise ValueError(f"unknown attack {kind!r}; valid names: {', '.join(ATTACKS)}")
    return ATTACKS[kind](**fields)


# -- ancilla-entangling attack -------------------------------------------------

_KET0 = np.array([1, 0], dtype=complex)
_KET1 = np.array([0, 1], dtype=complex)


@dataclass(frozen=True)
class AncillaConvention:
    """Ancilla states Eve attaches in each branch of the attack unitary."""

    e00: np.ndarray = field(default_factory=lambda: _KET0.copy())
    e01: np.ndarray = field(default_factory=lambda: _KET1.copy())
    e10: np.ndarray = field(default_factory=lambda: _KET1.copy())
    e11: np.ndarray = field(default_factory=lambda: _KET0.copy())

    def residuals(self, d: float) -> tuple[float, float, float]:
        """Deviation from the three unitarity conditions at detection level ``d``."""
        f = 1.0 - d
        n0 = f * np.vdot(self.e00, self.e00).real + d * np.vdot(self.e01, self.e01).real - 1.0
        n1 = d * np.vdot(self.e10, self.e10).real + f * np.vdot(self.e11, self.e11).real - 1.0
        cross = np.vdot(self.e00, self.e10) + np.vdot(self.e01, self.e11)
        return float(abs(n0)), float(abs(n1)), float(abs(cross))


DEFAULT_CONVENTION = AncillaConvention()


def ancilla_attack_unitary(d: float) -> np.ndarray:
    """4x4 unitary on (photon, ancilla), basis |00>,|01>,|10>,|11>.

    Columns for ancilla input |0> follow the attack definition with the
    default convention; the |1>-ancilla columns complete it so that d=0 is
    the identity.
    """
    if not 0.0 <= d <= 1.0:
        raise ValueError(f"detection parameter d={d} outside [0, 1]")
    sf, sd = math.sqrt(1.0 - d), math.sqrt(d)
    c = DEFAULT_CONVENTION
    col00 = sf * np.kron(_KET0, c.e00) + sd * np.kron(_KET1, c.e01)
    col10 = sd * np.kron(_KET0, c.e10) + sf * np.kron(_KET1, c.e11)
    col01 = sf * np.kron(_KET0, _KET1) - sd * np.kron(_KET1, _KET0)
    col11 = -sd * np.kron(_KET0, _KET0) + sf * np.kron(_KET1, _KET1)
    return np.column_stack([col00, col01, col10, col11])


def apply_ancilla_attack(
    state: QuantumState, target: str, d: float, ancilla: str | None = None
) -> QuantumState:
    """Attach a fresh |0> ancilla and entangle it with ``target``."""
    u = ancilla_attack_unitary(d)
    if ancilla is None:
        ancilla = "e" if "e" not in state.labels else f"e_{target}"
    extended = tensor(state, basis_state("0", (ancilla,)))
    return apply_unitary(extended, u, (target, ancilla))


# -- intercept-resend ------------------------------------------------------------


@dataclass(frozen=True)
class EveRecord:
    target: str
    basis: MeasurementBasis
    outcome: int


def apply_intercept_resend(
    state: QuantumState, target: str, policy: BasisPolicy, rand: RandomStream
) -> tuple[QuantumState, EveRecord]:
    policy = BasisPolicy(policy)
    if policy is BasisPolicy.RANDOM_ZX:
        basis = MeasurementBasis.Z if rand.random() < 0.5 else MeasurementBasis.X
    else:
        basis = MeasurementBasis(policy.value)
    out = measure(state, target, basis, rand)
    # the projected post-state is exactly the resent eigenstate
    return out.post_state, EveRecord(target, basis, int(out.value))


# -- dishonest server ------------------------------------------------------------


def server_lie(truth: PauliOp, lie_fraction: float, rand: RandomStream) -> PauliOp:
    if not 0.0 <= lie_fraction <= 1.0:
        raise ValueError(f"lie_fraction={lie_fraction} outside [0, 1]")
    if not rand.bernoulli(lie_fraction):
        return truth
    others = [op for op in PauliOp if op is not truth]
    return others[int(rand.integers(0, 3))]


# -- Trojan horse ------------------------------------------------------------------


@dataclass(frozen=True)
class BeamSplitterRecord:
    n_photons: int
    detector_a: bool
    detector_b: bool

    @property
    def both_clicked(self) -> bool:
        return self.detector_a and self.detector_b


def both_click_probability(n_photons: int) -> float:
    if n_photons < 1:
        raise ValueError("need at least one photon")
    return 1.0 - 2.0 ** (1 - n_photons)


def trojan_beam_splitter_check(extra_photons: int, rand: RandomStream) -> BeamSplitterRecord:
    """Route each photon of the pulse through a 50/50 splitter to threshold detectors.

    ``extra_photons`` is 0 for an honest single-photon signal.
    """
    if extra_photons < 0:
        raise ValueError("extra_photons must be >= 0")
    n = 1 + int(extra_photons)
    to_a = rand.integers(0, 2, size=n)
    hits_a = int(to_a.sum())
    return BeamSplitterRecord(n, hits_a > 0, hits_a < n)
