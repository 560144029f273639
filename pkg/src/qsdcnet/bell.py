"""Symbolic Bell-state and Pauli-encoding algebra.

A Bell label is stored as two bits: ``parity`` (1 for the psi states, whose
two qubits disagree in Z) and ``phase`` (1 for the minus states).  A Pauli
acting on either qubit of a Bell pair toggles these bits and nothing else
(up to a global phase), which is what makes every table here a lookup.

Phase convention: the singlet ket is ``(|10> - |01>)/sqrt(2)``, the other
three are the textbook ``(|01> + |10>)/sqrt(2)``, ``(|00> -+ |11>)/sqrt(2)``.
The overall sign on the singlet is immaterial physically, and it is the one
choice under which all four swapping expansions below carry consistent signs.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from enum import Enum
from typing import Iterable, Sequence

import numpy as np

_S = 1.0 / math.sqrt(2.0)


class BellIndex(Enum):
    PSI_MINUS = "psi-"
    PSI_PLUS = "psi+"
    PHI_MINUS = "phi-"
    PHI_PLUS = "phi+"

    @property
    def parity(self) -> int:
        return 1 if self in (BellIndex.PSI_MINUS, BellIndex.PSI_PLUS) else 0

    @property
    def phase(self) -> int:
        return 1 if self in (BellIndex.PSI_MINUS, BellIndex.PHI_MINUS) else 0

    @classmethod
    def from_bits(cls, parity: int, phase: int) -> "BellIndex":
        return _BELL_BY_BITS[(parity & 1, phase & 1)]

    def __str__(self) -> str:
        return self.value


_BELL_BY_BITS = {(b.parity, b.phase): b for b in BellIndex}


class PauliOp(Enum):
    """The four encoding operations I, sigma_z, sigma_x, i*sigma_y."""

    U0 = 0
    U1 = 1
    U2 = 2
    U3 = 3

    @property
    def bits(self) -> tuple[int, int]:
        return _CODE[self]

    @property
    def code(self) -> str:
        return "".join(str(b) for b in _CODE[self])

    @property
    def flips(self) -> tuple[int, int]:
        """(parity flip, phase flip) induced on a Bell label."""
        return _FLIPS[self]

    @property
    def matrix(self) -> np.ndarray:
        return _MATRICES[self].copy()

    @classmethod
    def from_bits(cls, hi: int, lo: int) -> "PauliOp":
        return _PAULI_BY_CODE[(hi & 1, lo & 1)]

    @classmethod
    def from_flips(cls, parity: int, phase: int) -> "PauliOp":
        return _PAULI_BY_FLIPS[(parity & 1, phase & 1)]

    def __str__(self) -> str:
        return self.name


_CODE = {
    PauliOp.U0: (0, 0),
    PauliOp.U1: (1, 1),
    PauliOp.U2: (0, 1),
    PauliOp.U3: (1, 0),
}
_PAULI_BY_CODE = {v: k for k, v in _CODE.items()}

_FLIPS = {
    PauliOp.U0: (0, 0),
    PauliOp.U1: (0, 1),  # sigma_z
    PauliOp.U2: (1, 0),  # sigma_x
    PauliOp.U3: (1, 1),  # i sigma_y
}
_PAULI_BY_FLIPS = {v: k for k, v in _FLIPS.items()}

_MATRICES = {
    PauliOp.U0: np.array([[1, 0], [0, 1]], dtype=complex),
    PauliOp.U1: np.array([[1, 0], [0, -1]], dtype=complex),
    PauliOp.U2: np.array([[0, 1], [1, 0]], dtype=complex),
    PauliOp.U3: np.array([[0, 1], [-1, 0]], dtype=complex),
}


class Side(Enum):
    B = "B"
    C = "C"


def bell_ket(index: BellIndex) -> np.ndarray:
    """Four-amplitude vector in the |00>,|01>,|10>,|11> basis."""
    return _KETS[index].copy()


def _ket(parity: int, phase: int) -> np.ndarray:
    v = np.zeros(4, dtype=complex)
    # (|0,parity> + (-1)^phase |1,1-parity>) / sqrt(2)
    v[parity] = _S
    v[2 + (1 - parity)] = _S * (-1) ** phase
    return v


_KETS = {b: _ket(b.parity, b.phase) for b in BellIndex}
_KETS[BellIndex.PSI_MINUS] = -_KETS[BellIndex.PSI_MINUS]

# sign of each convention ket relative to _ket(parity, phase)
_CONVENTION_SIGN = {b: (-1 if b is BellIndex.PSI_MINUS else 1) for b in BellIndex}


def pauli_on_bell(b: BellIndex, op: PauliOp, side: Side | str = Side.C) -> BellIndex:
    """Bell label reached by applying ``op`` to one qubit of the pair.

    The label is the same whichever side the operator acts on; only the
    discarded global phase differs.
    """
    Side(side)
    fx, fz = op.flips
    return BellIndex.from_bits(b.parity ^ fx, b.phase ^ fz)


def pauli_compose(a: PauliOp, b: PauliOp) -> PauliOp:
    """Product ``a @ b`` modulo global phase."""
    return PauliOp.from_bits(a.bits[0] ^ b.bits[0], a.bits[1] ^ b.bits[1])


def decode_pauli(published: PauliOp, own: PauliOp) -> PauliOp:
    return pauli_compose(published, own)


def bell_to_pauli(outcome: BellIndex) -> PauliOp:
    """One-sided Pauli taking the singlet to ``outcome``."""
    ref = BellIndex.PSI_MINUS
    return PauliOp.from_flips(outcome.parity ^ ref.parity, outcome.phase ^ ref.phase)


@dataclass(frozen=True)
class SwapOutcome:
    bob_result: BellIndex
    carol_result: BellIndex
    probability: float
    sign: int

    @property
    def amplitude(self) -> float:
        return self.sign * math.sqrt(self.probability)


def swap_expand(first_pair: BellIndex, second_pair: BellIndex) -> tuple[SwapOutcome, ...]:
    """Rewrite ``|first>_{B1C1} |second>_{B2C2}`` in the (B1B2)(C1C2) Bell basis.

    Every input produces exactly four terms of amplitude +-1/2.  Carol's label
    is fixed by XOR of the other three labels' bits; the sign follows from
    summing the two computational-basis branches of each pair.
    """
    f, s = first_pair, second_pair
    terms = []
    for a in BellIndex:
        b = BellIndex.from_bits(
            a.parity ^ f.parity ^ s.parity,
            a.phase ^ f.phase ^ s.phase,
        )
        exponent = (s.phase * a.parity + b.phase * f.parity) & 1
        sign = (-1) ** exponent
        sign *= (
            _CONVENTION_SIGN[a]
            * _CONVENTION_SIGN[b]
            * _CONVENTION_SIGN[f]
            * _CONVENTION_SIGN[s]
        )
        terms.append(SwapOutcome(a, b, 0.25, sign))
    return tuple(terms)


def decode_swap(bob_outcome: BellIndex, carol_outcome: BellIndex) -> PauliOp:
    """Encoding Pauli recovered from the two Bell results.

    Assumes both pairs were singlets before the sender's encoding.  Same
    letter (psi/phi) and same sign give U0, same letter and opposite sign U1,
    different letter and same sign U2, both different U3.
    """
    return PauliOp.from_flips(
        bob_outcome.parity ^ carol_outcome.parity,
        bob_outcome.phase ^ carol_outcome.phase,
    )


def bits_to_paulis(bits: Sequence[int]) -> list[PauliOp]:
    if len(bits) % 2:
        raise ValueError(f"bit string length must be even, got {len(bits)}")
    return [PauliOp.from_bits(bits[i], bits[i + 1]) for i in range(0, len(bits), 2)]


def paulis_to_bits(ops: Iterable[PauliOp]) -> list[int]:
    out: list[int] = []
    for op in ops:
        out.extend(op.bits)
    return out
