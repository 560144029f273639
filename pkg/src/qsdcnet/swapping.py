"""QSDC by entanglement swapping over purified singlets.

Bob and Carol first share singlets through the same distribution and
sample check as the bidirectional scheme.  Purification is an ideal oracle:
it keeps ``floor(yield * n_groups)`` groups of two fresh singlets.  Bob
writes a Pauli on B1, Bell-measures (B1, B2) and announces the result;
Carol Bell-measures (C1, C2) and decodes.  The encoded photons never travel
back to the server.
"""

from __future__ import annotations

import json
import math
from collections import Counter
from dataclasses import asdict, dataclass, field
from typing import Sequence

from .adversary import AttackModel, NoAttack, attack_from_dict, attack_to_dict
from .bell import BellIndex, PauliOp, bits_to_paulis, decode_swap, paulis_to_bits
from .bidirectional import (
    SIDES,
    AbortAtSampleCheck,
    CapacityMismatch,
    ChannelRecord,
    _ceil,
    _jsonable,
    establish_channel,
)
from .quantum import QuantumState, RandomStream, apply_unitary, bell_measure, bell_state, tensor


@dataclass(frozen=True)
class SwapSessionConfig:
    n_groups: int = 64
    purification_yield: float = 1.0
    sample_fraction: float = 0.2
    error_threshold: float = 0.0
    attack: AttackModel = NoAttack()
    attack_targets: tuple[str, ...] = SIDES
    seed: int = 0

    def __post_init__(self):
        object.__setattr__(self, "attack_targets", tuple(self.attack_targets))
        if int(self.n_groups) != self.n_groups or self.n_groups < 1:
            raise ValueError(f"n_groups must be an integer >= 1, got {self.n_groups}")
        if not 0.0 < self.purification_yield <= 1.0:
            raise ValueError(f"purification_yield must be in (0, 1], got {self.purification_yield}")
        if not 0.0 < self.sample_fraction < 1.0:
            raise ValueError(f"sample_fraction must be in (0, 1), got {self.sample_fraction}")
        if not 0.0 <= self.error_threshold <= 1.0:
            raise ValueError(f"error_threshold must be in [0, 1], got {self.error_threshold}")
        if not 0 <= int(self.seed) < 2**64:
            raise ValueError("seed must fit in 64 unsigned bits")
        if self.usable_groups < 1:
            raise ValueError("purification yield leaves no usable group")

    @property
    def usable_groups(self) -> int:
        return int(math.floor(self.purification_yield * self.n_groups + 1e-9))

    @property
    def channel_pairs(self) -> int:
        return 2 * self.n_groups

    @property
    def n_samples(self) -> int:
        return _ceil(self.sample_fraction * self.channel_pairs)

    @property
    def capacity_bits(self) -> int:
        return 2 * self.usable_groups

    def to_dict(self) -> dict:
        return {
            "n_groups": self.n_groups,
            "purification_yield": self.purification_yield,
            "sample_fraction": self.sample_fraction,
            "error_threshold": self.error_threshold,
            "attack": attack_to_dict(self.attack),
            "attack_targets": list(self.attack_targets),
            "seed": self.seed,
        }

    @classmethod
    def from_dict(cls, d: dict) -> "SwapSessionConfig":
        d = dict(d)
        if isinstance(d.get("attack"), dict):
            d["attack"] = attack_from_dict(d["attack"])
        return cls(**d)


@dataclass
class SwapGroupRecord:
    encoding: PauliOp
    bob_outcome: BellIndex
    carol_outcome: BellIndex
    decoded: PauliOp


@dataclass
class SwapTranscript:
    protocol: str
    config: dict
    message_bits: list[int]
    status: str
    channel: ChannelRecord | None = None
    usable_groups: int = 0
    groups: list[SwapGroupRecord] = field(default_factory=list)
    decoded_bits: list[int] | None = None
    bits_per_pair: float | None = None

    def to_json(self) -> str:
        return json.dumps(asdict(self), indent=2, default=_jsonable) + "\n"


def setup_channel(config: SwapSessionConfig, rand: RandomStream) -> tuple[ChannelRecord, list[tuple[QuantumState, QuantumState]]]:
    """Distribute and check ``2 * n_groups`` pairs plus the check sample, then purify.

    Raises :class:`AbortAtSampleCheck` (without a transcript) on detection.
    """
    n_total = config.channel_pairs + config.n_samples
    record, _ = establish_channel(
        n_total,
        config.n_samples,
        config.attack,
        config.attack_targets,
        0.0,
        config.error_threshold,
        rand,
    )
    if not record.passed:
        raise AbortAtSampleCheck(record.abort_reason or "channel setup failed")
    groups = []
    for g in range(config.usable_groups):
        first = bell_state(BellIndex.PSI_MINUS, ("B1", "C1"))
        second = bell_state(BellIndex.PSI_MINUS, ("B2", "C2"))
        groups.append((first, second))
    return record, groups


def swap_group(
    first: QuantumState, second: QuantumState, encoding: PauliOp, rand: RandomStream
) -> SwapGroupRecord:
    state = tensor(first, second)
    state = apply_unitary(state, encoding.matrix, "B1")
    bob = bell_measure(state, ("B1", "B2"), rand)
    carol = bell_measure(bob.post_state, ("C1", "C2"), rand)
    return SwapGroupRecord(encoding, bob.value, carol.value, decode_swap(bob.value, carol.value))


def run_swap_session(config: SwapSessionConfig, message: Sequence[int]) -> SwapTranscript:
    bits = [int(b) for b in message]
    if len(bits) != config.capacity_bits:
        raise CapacityMismatch(
            f"message has {len(bits)} bits but {config.usable_groups} groups carry {config.capacity_bits}"
        )
    rand = RandomStream(config.seed, name="swap-session")
    t = SwapTranscript("swapping", config.to_dict(), bits, status="running")
    try:
        record, groups = setup_channel(config, rand)
    except AbortAtSampleCheck as exc:
        t.status = AbortAtSampleCheck.status
        exc.transcript = t
        raise
    t.channel = record
    t.usable_groups = len(groups)
    for (first, second), op in zip(groups, bits_to_paulis(bits)):
        t.groups.append(swap_group(first, second, op, rand))
    t.decoded_bits = paulis_to_bits(g.decoded for g in t.groups)
    # one Pauli (two bits) per group of two pairs
    t.bits_per_pair = len(t.decoded_bits) / (2 * len(groups))
    t.status = "ok"
    return t


def plugin_mutual_information(xs: Sequence, ys: Sequence) -> float:
    """Plug-in estimate of I(X;Y) in bits from paired samples."""
    if len(xs) != len(ys) or not xs:
        raise ValueError("need equally long, non-empty samples")
    n = len(xs)
    joint = Counter(zip(xs, ys))
    px = Counter(xs)
    py = Counter(ys)
    mi = 0.0
    for (x, y), c in joint.items():
        mi += c / n * math.log2(c * n / (px[x] * py[y]))
    return max(mi, 0.0)
