"""Bidirectional QSDC session on one server/sender/receiver cell.

The server (Alice) prepares singlets and sends the B halves to the sender
(Bob) and the C halves to the receiver (Carol).  After a joint sample
check, Carol masks her photons with random Paulis, Bob encodes his message
(plus ``k`` decoys), both return their photons and Alice announces the
Bell result of every pair.  Carol removes her mask to read the message.
"""

from __future__ import annotations

import json
import math
from dataclasses import asdict, dataclass, field
from enum import Enum
from typing import Sequence

import numpy as np

from .adversary import (
    AncillaEntangling,
    AttackModel,
    DishonestServer,
    InterceptResend,
    NoAttack,
    TrojanHorse,
    apply_ancilla_attack,
    apply_intercept_resend,
    attack_from_dict,
    attack_to_dict,
    server_lie,
    trojan_beam_splitter_check,
)
from .bell import (
    BellIndex,
    PauliOp,
    bell_to_pauli,
    bits_to_paulis,
    decode_pauli,
    pauli_compose,
    paulis_to_bits,
)
from .quantum import (
    MeasurementBasis,
    QuantumState,
    RandomStream,
    apply_unitary,
    bell_measure,
    bell_state,
    measure,
)

SIDES = ("B", "C")


class ProtocolError(Exception):
    pass


class CapacityMismatch(ProtocolError, ValueError):
    pass


class InsufficientSamples(ProtocolError):
    pass


class ProtocolAbort(ProtocolError):
    """Eavesdropping (or a lying server) was detected and the round discarded."""

    status = "abort"

    def __init__(self, message: str, transcript=None):
        super().__init__(message)
        self.transcript = transcript


class AbortAtSampleCheck(ProtocolAbort):
    status = "abort_sample_check"


class AbortAtVerification(ProtocolAbort):
    status = "abort_verification"


def _ceil(x: float) -> int:
    # tolerate float products like 0.1 * 30 = 3.0000000000000004
    return int(math.ceil(x - 1e-9))


@dataclass(frozen=True)
class SessionConfig:
    n_pairs: int = 256
    sample_fraction: float = 0.2
    k_decoys: int = 16
    error_threshold: float = 0.0
    loss_prob: float = 0.0
    attack: AttackModel = NoAttack()
    attack_targets: tuple[str, ...] = SIDES
    seed: int = 0

    def __post_init__(self):
        object.__setattr__(self, "attack_targets", tuple(self.attack_targets))
        if int(self.n_pairs) != self.n_pairs or self.n_pairs < 4:
            raise ValueError(f"n_pairs must be an integer >= 4, got {self.n_pairs}")
        if not 0.0 < self.sample_fraction < 1.0:
            raise ValueError(f"sample_fraction must be in (0, 1), got {self.sample_fraction}")
        if int(self.k_decoys) != self.k_decoys or self.k_decoys < 1:
            raise ValueError(f"k_decoys must be an integer >= 1, got {self.k_decoys}")
        for name in ("error_threshold", "loss_prob"):
            v = getattr(self, name)
            if not 0.0 <= v <= 1.0:
                raise ValueError(f"{name} must be in [0, 1], got {v}")
        bad = [t for t in self.attack_targets if t not in SIDES]
        if bad or not self.attack_targets:
            raise ValueError(f"attack_targets must be a non-empty subset of {SIDES}, got {self.attack_targets}")
        if not 0 <= int(self.seed) < 2**64:
            raise ValueError("seed must fit in 64 unsigned bits")
        if self.message_pairs < 1:
            raise ValueError(
                f"no room for a message: {self.n_pairs} pairs - {self.n_samples} samples "
                f"- {self.k_decoys} decoys < 1"
            )

    @property
    def n_samples(self) -> int:
        return _ceil(self.sample_fraction * self.n_pairs)

    @property
    def message_pairs(self) -> int:
        return self.n_pairs - self.n_samples - self.k_decoys

    @property
    def capacity_bits(self) -> int:
        return 2 * self.message_pairs

    def to_dict(self) -> dict:
        return {
            "n_pairs": self.n_pairs,
            "sample_fraction": self.sample_fraction,
            "k_decoys": self.k_decoys,
            "error_threshold": self.error_threshold,
            "loss_prob": self.loss_prob,
            "attack": attack_to_dict(self.attack),
            "attack_targets": list(self.attack_targets),
            "seed": self.seed,
        }

    @classmethod
    def from_dict(cls, d: dict) -> "SessionConfig":
        d = dict(d)
        if "attack" in d and isinstance(d["attack"], dict):
            d["attack"] = attack_from_dict(d["attack"])
        if "attack_targets" in d:
            d["attack_targets"] = tuple(d["attack_targets"])
        return cls(**d)


# -- records -------------------------------------------------------------------


@dataclass
class SampleComparison:
    index: int
    bob_basis: str
    bob_outcome: int
    carol_basis: str
    carol_outcome: int

    @property
    def compared(self) -> bool:
        return self.bob_basis == self.carol_basis

    @property
    def error(self) -> bool:
        # singlets anticorrelate in both Z and X
        return self.compared and self.bob_outcome == self.carol_outcome


@dataclass
class SampleCheckRecord:
    compared: int
    errors: int
    rate: float
    insufficient: bool
    compared_z: int
    errors_z: int
    compared_x: int
    errors_x: int
    comparisons: list[SampleComparison] = field(default_factory=list)


@dataclass
class TrojanCheckRecord:
    indices: list[int]
    photons_tested: int
    both_clicks: int
    rate: float


@dataclass
class VerificationRecord:
    checked: int
    mismatches: int
    rate: float


@dataclass
class EfficiencyReport:
    q_u: int
    q_t: int
    eta_q: float

    @classmethod
    def from_counts(cls, q_u: int, q_t: int) -> "EfficiencyReport":
        return cls(q_u, q_t, q_u / q_t)


@dataclass
class ChannelRecord:
    """Steps 1-3: preparation, distribution and the joint sample check."""

    n_pairs: int
    prepared_state: str
    lost: list[int]
    eve: list[dict]
    sample_indices: list[int]
    trojan_check: TrojanCheckRecord | None
    sample_check: SampleCheckRecord | None
    passed: bool
    abort_reason: str | None = None


@dataclass
class Transcript:
    protocol: str
    config: dict
    message_bits: list[int]
    status: str
    channel: ChannelRecord | None = None
    decoy_indices: list[int] | None = None
    decoy_ops: list[PauliOp] | None = None
    message_indices: list[int] | None = None
    message_ops: list[PauliOp] | None = None
    message_bits_dropped: int = 0
    published: list[PauliOp] | None = None
    verification: VerificationRecord | None = None
    decoded_bits: list[int] | None = None
    efficiency: EfficiencyReport | None = None
    # Carol's one-time pad; kept in the record for auditing only
    secret: dict = field(default_factory=dict)

    def to_json(self) -> str:
        return json.dumps(asdict(self), indent=2, default=_jsonable) + "\n"


def _jsonable(o):
    if isinstance(o, PauliOp):
        return o.name
    if isinstance(o, Enum):
        return o.value
    if isinstance(o, np.integer):
        return int(o)
    if isinstance(o, np.floating):
        return float(o)
    raise TypeError(f"cannot serialize {type(o).__name__}")


# -- steps 1-3 -------------------------------------------------------------------


def prepare_pairs(n_pairs: int) -> list[QuantumState]:
    singlet = bell_state(BellIndex.PSI_MINUS, SIDES)
    return [singlet] * n_pairs


def _photon_count(attack: AttackModel, targets: Sequence[str], side: str) -> int:
    if isinstance(attack, TrojanHorse) and side in targets:
        return 1 + attack.extra_photons
    return 1


def distribute(
    pairs: Sequence[QuantumState],
    attack: AttackModel,
    targets: Sequence[str],
    loss_prob: float,
    rand: RandomStream,
) -> tuple[dict[int, QuantumState], list[int], list[dict]]:
    """Send both halves of every pair through a lossy, possibly tapped line.

    Returns the arrived pair states by position, the lost positions (a pair
    is lost if either photon fails to arrive) and Eve's measurement log.
    """
    arrived: dict[int, QuantumState] = {}
    lost: list[int] = []
    eve: list[dict] = []
    for i, state in enumerate(pairs):
        if loss_prob > 0.0:
            gone = [rand.bernoulli(loss_prob) for _ in SIDES]
            if any(gone):
                lost.append(i)
                continue
        for side in SIDES:
            if side not in targets:
                continue
            if isinstance(attack, InterceptResend):
                state, rec = apply_intercept_resend(state, side, attack.basis_policy, rand)
                eve.append({"index": i, "photon": side, "basis": rec.basis.value, "outcome": rec.outcome})
            elif isinstance(attack, AncillaEntangling):
                state = apply_ancilla_attack(state, side, attack.d, ancilla=f"e{side}")
        arrived[i] = state
    return arrived, lost, eve


def sample_check(
    pairs: Sequence[QuantumState],
    rand: RandomStream,
    indices: Sequence[int] | None = None,
    basis: MeasurementBasis | str | None = None,
    require_comparisons: bool = False,
) -> SampleCheckRecord:
    """Measure sampled pairs in random Z/X bases and compare matching-basis results.

    ``basis`` forces both parties into one basis (every sample compared).
    With no comparison the rate is reported as 0 and flagged insufficient,
    unless ``require_comparisons`` asks for :class:`InsufficientSamples`.
    """
    if indices is None:
        indices = range(len(pairs))
    forced = MeasurementBasis(basis) if basis is not None else None
    comparisons = []
    counts = {MeasurementBasis.Z: [0, 0], MeasurementBasis.X: [0, 0]}
    for idx, state in zip(indices, pairs):
        if forced is None:
            bb = MeasurementBasis.Z if rand.random() < 0.5 else MeasurementBasis.X
            cb = MeasurementBasis.Z if rand.random() < 0.5 else MeasurementBasis.X
        else:
            bb = cb = forced
        ob = measure(state, "B", bb, rand)
        oc = measure(ob.post_state, "C", cb, rand)
        cmp = SampleComparison(int(idx), bb.value, int(ob.value), cb.value, int(oc.value))
        comparisons.append(cmp)
        if cmp.compared:
            counts[bb][0] += 1
            counts[bb][1] += int(cmp.error)
    compared = counts[MeasurementBasis.Z][0] + counts[MeasurementBasis.X][0]
    errors = counts[MeasurementBasis.Z][1] + counts[MeasurementBasis.X][1]
    if compared == 0 and require_comparisons:
        raise InsufficientSamples("no sample was measured in matching bases")
    return SampleCheckRecord(
        compared=compared,
        errors=errors,
        rate=errors / compared if compared else 0.0,
        insufficient=compared == 0,
        compared_z=counts[MeasurementBasis.Z][0],
        errors_z=counts[MeasurementBasis.Z][1],
        compared_x=counts[MeasurementBasis.X][0],
        errors_x=counts[MeasurementBasis.X][1],
        comparisons=comparisons,
    )


def trojan_check(
    indices: Sequence[int], attack: AttackModel, targets: Sequence[str], rand: RandomStream
) -> TrojanCheckRecord:
    tested = 0
    both = 0
    for _ in indices:
        for side in SIDES:
            extra = _photon_count(attack, targets, side) - 1
            rec = trojan_beam_splitter_check(extra, rand)
            tested += 1
            both += int(rec.both_clicked)
    return TrojanCheckRecord(list(indices), tested, both, both / tested if tested else 0.0)


def establish_channel(
    n_pairs: int,
    n_samples: int,
    attack: AttackModel,
    targets: Sequence[str],
    loss_prob: float,
    error_threshold: float,
    rand: RandomStream,
) -> tuple[ChannelRecord, dict[int, QuantumState]]:
    """Steps 1-3.  Returns the record and the unsampled arrived pairs.

    Half of the samples go to the beam-splitter photon-number test, the
    other half to the basis comparison.
    """
    pairs = prepare_pairs(n_pairs)
    arrived, lost, eve = distribute(pairs, attack, targets, loss_prob, rand)
    record = ChannelRecord(
        n_pairs=n_pairs,
        prepared_state=BellIndex.PSI_MINUS.value,
        lost=lost,
        eve=eve,
        sample_indices=[],
        trojan_check=None,
        sample_check=None,
        passed=False,
    )
    positions = sorted(arrived)
    if len(positions) < n_samples:
        record.abort_reason = "too few pairs arrived to draw the check sample"
        return record, {}
    sampled = sorted(int(i) for i in rand.choice(positions, size=n_samples, replace=False))
    record.sample_indices = sampled
    order = [sampled[int(j)] for j in rand.permutation(len(sampled))]
    half = len(order) // 2
    trojan_part = sorted(order[:half])
    basis_part = sorted(order[half:])

    record.trojan_check = trojan_check(trojan_part, attack, targets, rand)
    record.sample_check = sample_check([arrived[i] for i in basis_part], rand, indices=basis_part)

    if record.trojan_check.rate > error_threshold:
        record.abort_reason = "multi-photon signal detected by the beam-splitter test"
    elif record.sample_check.rate > error_threshold:
        record.abort_reason = "sample error rate above threshold"
    else:
        record.passed = True
    sampled_set = set(sampled)
    remaining = {i: arrived[i] for i in positions if i not in sampled_set}
    return record, remaining


# -- steps 4-7 -------------------------------------------------------------------


def verify_decoys(
    published: Sequence[PauliOp], decoy_ops: Sequence[PauliOp], mask_ops: Sequence[PauliOp]
) -> VerificationRecord:
    if not len(published) == len(decoy_ops) == len(mask_ops):
        raise ValueError("published, decoy and mask lists must align")
    mismatches = sum(1 for a, b, c in zip(published, decoy_ops, mask_ops) if a is not pauli_compose(b, c))
    n = len(published)
    return VerificationRecord(n, mismatches, mismatches / n if n else 0.0)


def run_session(config: SessionConfig, message: Sequence[int]) -> Transcript:
    """Run all seven steps; raise a :class:`ProtocolAbort` subclass on detection.

    ``message`` must fill the loss-free capacity exactly; positions lost in
    transit shorten it, and the dropped tail is recorded in the transcript.
    """
    bits = [int(b) for b in message]
    if any(b not in (0, 1) for b in bits):
        raise ValueError("message must be a sequence of bits")
    if len(bits) != config.capacity_bits:
        raise CapacityMismatch(
            f"message has {len(bits)} bits but the session carries {config.capacity_bits}"
        )
    rand = RandomStream(config.seed, name="session")
    t = Transcript("bidirectional", config.to_dict(), bits, status="running")

    channel, remaining = establish_channel(
        config.n_pairs,
        config.n_samples,
        config.attack,
        config.attack_targets,
        config.loss_prob,
        config.error_threshold,
        rand,
    )
    t.channel = channel
    if channel.abort_reason and not channel.sample_indices:
        t.status = "capacity_mismatch"
        raise CapacityMismatch(channel.abort_reason)
    if not channel.passed:
        t.status = AbortAtSampleCheck.status
        raise AbortAtSampleCheck(channel.abort_reason, t)

    positions = sorted(remaining)
    if len(positions) < config.k_decoys + 1:
        t.status = "capacity_mismatch"
        raise CapacityMismatch(f"only {len(positions)} pairs left after loss and sampling")

    # step 4: Carol masks every remaining C photon
    masks = {i: PauliOp(int(rand.integers(0, 4))) for i in positions}
    states = {i: apply_unitary(remaining[i], masks[i].matrix, "C") for i in positions}

    # step 5: Bob's decoys, then the message on the rest
    decoys = sorted(int(i) for i in rand.choice(positions, size=config.k_decoys, replace=False))
    decoy_set = set(decoys)
    decoy_ops = [PauliOp(int(rand.integers(0, 4))) for _ in decoys]
    msg_positions = [i for i in positions if i not in decoy_set]
    usable_bits = bits[: 2 * len(msg_positions)]
    t.message_bits_dropped = len(bits) - len(usable_bits)
    msg_ops = bits_to_paulis(usable_bits)
    msg_positions = msg_positions[: len(msg_ops)]
    bob_ops = dict(zip(decoys, decoy_ops))
    bob_ops.update(zip(msg_positions, msg_ops))
    states = {i: apply_unitary(states[i], bob_ops[i].matrix, "B") for i in positions if i in bob_ops}
    t.decoy_indices, t.decoy_ops = decoys, decoy_ops
    t.message_indices, t.message_ops = msg_positions, msg_ops

    # step 6: Alice's Bell measurements and announcement
    lie = config.attack.lie_fraction if isinstance(config.attack, DishonestServer) else 0.0
    published = {}
    for i in sorted(states):
        outcome = bell_measure(states[i], SIDES, rand).value
        truth = bell_to_pauli(outcome)
        published[i] = server_lie(truth, lie, rand) if lie > 0.0 else truth
    t.published = [published[i] for i in sorted(published)]
    t.secret = {"carol_mask_ops": [masks[i] for i in positions]}

    # step 7: decoy audit, then decoding
    t.verification = verify_decoys(
        [published[i] for i in decoys], decoy_ops, [masks[i] for i in decoys]
    )
    if t.verification.rate > config.error_threshold:
        t.status = AbortAtVerification.status
        raise AbortAtVerification("decoy mismatch rate above threshold", t)
    decoded = [decode_pauli(published[i], masks[i]) for i in msg_positions]
    t.decoded_bits = paulis_to_bits(decoded)
    t.efficiency = EfficiencyReport.from_counts(len(msg_positions), config.n_pairs)
    t.status = "ok"
    return t


def replay(transcript_json: str) -> Transcript:
    """Re-run the session a serialized transcript describes.

    Aborted sessions return the transcript carried by the abort.
    """
    doc = json.loads(transcript_json)
    config = SessionConfig.from_dict(doc["config"])
    try:
        return run_session(config, doc["message_bits"])
    except ProtocolAbort as exc:
        return exc.transcript
