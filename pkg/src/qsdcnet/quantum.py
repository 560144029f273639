"""Exact dense simulation of a few labeled qubits.

States are immutable.  A pure state stores ``2**n`` amplitudes, a mixed
state a ``2**n x 2**n`` density matrix; the first label is the most
significant tensor factor.  Every sampling operation takes an explicit
:class:`RandomStream`.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from enum import Enum
from typing import Sequence, Union

import numpy as np

from .bell import BellIndex, bell_ket
from .eigen import jacobi_eigh

MAX_DIM = 16
ATOL = 1e-10
EIG_FLOOR = -1e-9


class LabelError(ValueError):
    pass


class RandomStream:
    """Named, seedable PRNG handle.

    Sub-streams from :meth:`spawn` are independent of each other and of the
    parent, and depend only on ``(seed, key path)``.
    """

    def __init__(self, seed: Union[int, np.random.SeedSequence], name: str = "root"):
        if isinstance(seed, np.random.SeedSequence):
            self._seq = seed
        else:
            if int(seed) < 0:
                raise ValueError(f"seed must be non-negative, got {seed}")
            self._seq = np.random.SeedSequence(int(seed))
        self.name = name
        self._gen = np.random.Generator(np.random.PCG64(self._seq))

    def __repr__(self) -> str:
        return f"RandomStream(name={self.name!r}, entropy={self._seq.entropy}, key={self._seq.spawn_key})"

    def spawn(self, key: int, name: str | None = None) -> "RandomStream":
        seq = np.random.SeedSequence(self._seq.entropy, spawn_key=self._seq.spawn_key + (int(key),))
        return RandomStream(seq, name or f"{self.name}/{key}")

    def random(self) -> float:
        return float(self._gen.random())

    def bernoulli(self, p: float) -> bool:
        return self._gen.random() < p

    def integers(self, low: int, high: int | None = None, size=None):
        return self._gen.integers(low, high, size=size)

    def choice(self, a, size=None, replace: bool = True, p=None):
        return self._gen.choice(a, size=size, replace=replace, p=p)

    def permutation(self, x):
        return self._gen.permutation(x)

    def categorical(self, probabilities: Sequence[float]) -> int:
        """Index drawn from a discrete distribution by inverse CDF."""
        u = self._gen.random()
        acc = 0.0
        last = 0
        for i, p in enumerate(probabilities):
            if p <= 0.0:
                continue
            last = i
            acc += p
            if u < acc:
                return i
        return last


class MeasurementBasis(Enum):
    Z = "Z"
    X = "X"

    @property
    def vectors(self) -> tuple[np.ndarray, np.ndarray]:
        return _BASIS_VECTORS[self]


_BASIS_VECTORS = {
    MeasurementBasis.Z: (np.array([1, 0], dtype=complex), np.array([0, 1], dtype=complex)),
    MeasurementBasis.X: (
        np.array([1, 1], dtype=complex) / math.sqrt(2.0),
        np.array([1, -1], dtype=complex) / math.sqrt(2.0),
    ),
}


@dataclass(frozen=True, eq=False)
class QuantumState:
    """Pure vector (1-D ``data``) or density matrix (2-D ``data``) over ``labels``."""

    labels: tuple[str, ...]
    data: np.ndarray

    def __post_init__(self):
        labels = tuple(self.labels)
        object.__setattr__(self, "labels", labels)
        if not labels:
            raise LabelError("a state needs at least one subsystem label")
        seen = set()
        for lab in labels:
            if not isinstance(lab, str) or not lab:
                raise LabelError(f"invalid subsystem label {lab!r}")
            if lab in seen:
                raise LabelError(f"duplicate subsystem label {lab!r}")
            seen.add(lab)
        dim = 2 ** len(labels)
        if dim > MAX_DIM:
            raise ValueError(f"dimension {dim} exceeds the cap of {MAX_DIM}")
        data = np.array(self.data, dtype=complex)
        if not np.all(np.isfinite(data)):
            raise ValueError("state contains non-finite amplitudes")
        if data.ndim == 1:
            if data.shape != (dim,):
                raise ValueError(f"expected {dim} amplitudes, got {data.shape}")
            norm = np.linalg.norm(data)
            if abs(norm - 1.0) > ATOL:
                raise ValueError(f"state vector norm {norm!r} is not 1")
        elif data.ndim == 2:
            if data.shape != (dim, dim):
                raise ValueError(f"expected a {dim}x{dim} density matrix, got {data.shape}")
            if not np.allclose(data, data.conj().T, atol=ATOL, rtol=0.0):
                raise ValueError("density matrix is not Hermitian")
            tr = np.trace(data).real
            if abs(tr - 1.0) > ATOL:
                raise ValueError(f"density matrix trace {tr!r} is not 1")
            if np.linalg.eigvalsh(data).min() < EIG_FLOOR:
                raise ValueError("density matrix has a negative eigenvalue")
        else:
            raise ValueError("state data must be a vector or a square matrix")
        data.flags.writeable = False
        object.__setattr__(self, "data", data)

    @property
    def is_pure(self) -> bool:
        return self.data.ndim == 1

    @property
    def n_qubits(self) -> int:
        return len(self.labels)

    @property
    def dim(self) -> int:
        return 2 ** len(self.labels)

    def index(self, label: str) -> int:
        try:
            return self.labels.index(label)
        except ValueError:
            raise LabelError(f"unknown subsystem label {label!r}; state has {self.labels}") from None

    def density_matrix(self) -> np.ndarray:
        if self.is_pure:
            return np.outer(self.data, self.data.conj())
        return self.data.copy()

    def as_density(self) -> "QuantumState":
        return QuantumState(self.labels, self.density_matrix())

    def relabel(self, mapping: dict[str, str]) -> "QuantumState":
        return QuantumState(tuple(mapping.get(l, l) for l in self.labels), self.data)

    def __repr__(self) -> str:
        kind = "pure" if self.is_pure else "mixed"
        return f"QuantumState({kind}, labels={self.labels})"


def basis_state(bits: str, labels: Sequence[str]) -> QuantumState:
    """Computational basis state, e.g. ``basis_state("01", ("B", "C"))``."""
    if len(bits) != len(labels):
        raise ValueError("need one bit per label")
    vec = np.zeros(2 ** len(bits), dtype=complex)
    vec[int(bits, 2)] = 1.0
    return QuantumState(tuple(labels), vec)


def bell_state(index: BellIndex, labels: Sequence[str] = ("B", "C")) -> QuantumState:
    if len(labels) != 2:
        raise ValueError("a Bell state needs exactly two labels")
    return QuantumState(tuple(labels), bell_ket(index))


def same_up_to_phase(a: QuantumState, b: QuantumState, tol: float = ATOL) -> bool:
    if a.labels != b.labels or not (a.is_pure and b.is_pure):
        raise ValueError("phase comparison needs two pure states over the same labels")
    return abs(np.vdot(a.data, b.data)) >= 1.0 - tol


def tensor(a: QuantumState, b: QuantumState) -> QuantumState:
    for lab in b.labels:
        if lab in a.labels:
            raise LabelError(f"duplicate subsystem label {lab!r}")
    labels = a.labels + b.labels
    if a.is_pure and b.is_pure:
        return QuantumState(labels, np.kron(a.data, b.data))
    return QuantumState(labels, np.kron(a.density_matrix(), b.density_matrix()))


def _axes(state: QuantumState, targets: Sequence[str]) -> list[int]:
    if len(set(targets)) != len(targets):
        raise LabelError(f"repeated target labels {tuple(targets)}")
    return [state.index(t) for t in targets]


def _apply_to_axes(t: np.ndarray, op: np.ndarray, axes: Sequence[int]) -> np.ndarray:
    k = len(axes)
    front = list(range(k))
    t = np.moveaxis(t, axes, front)
    shape = t.shape
    t = (op @ t.reshape(2**k, -1)).reshape(shape)
    return np.moveaxis(t, front, axes)


def _apply_operator(state: QuantumState, op: np.ndarray, axes: Sequence[int]) -> np.ndarray:
    """Unnormalized ``op`` applied to the state's raw data."""
    n = state.n_qubits
    if state.is_pure:
        t = state.data.reshape((2,) * n)
        return _apply_to_axes(t, op, axes).reshape(-1)
    t = state.data.reshape((2,) * (2 * n))
    t = _apply_to_axes(t, op, axes)
    t = _apply_to_axes(t, op.conj(), [n + a for a in axes])
    d = state.dim
    return t.reshape(d, d)


def is_unitary(u: np.ndarray, tol: float = ATOL) -> bool:
    u = np.asarray(u, dtype=complex)
    if u.ndim != 2 or u.shape[0] != u.shape[1]:
        return False
    return bool(np.allclose(u.conj().T @ u, np.eye(u.shape[0]), atol=tol, rtol=0.0))


def apply_unitary(state: QuantumState, u, targets: Sequence[str] | str) -> QuantumState:
    if isinstance(targets, str):
        targets = (targets,)
    u = np.asarray(u, dtype=complex)
    if u.shape != (2 ** len(targets),) * 2:
        raise ValueError(f"a {u.shape} matrix cannot act on {len(targets)} qubit(s)")
    if not is_unitary(u):
        raise ValueError("matrix is not unitary")
    axes = _axes(state, targets)
    return QuantumState(state.labels, _apply_operator(state, u, axes))


@dataclass(frozen=True)
class MeasurementOutcome:
    value: Union[int, BellIndex]
    probability: float
    post_state: QuantumState


def _project(state: QuantumState, projector: np.ndarray, axes: Sequence[int]) -> tuple[float, np.ndarray]:
    raw = _apply_operator(state, projector, axes)
    if state.is_pure:
        p = float(np.vdot(raw, raw).real)
    else:
        p = float(np.trace(raw).real)
    return p, raw


def _renormalize(state: QuantumState, raw: np.ndarray, p: float) -> QuantumState:
    if state.is_pure:
        return QuantumState(state.labels, raw / math.sqrt(p))
    return QuantumState(state.labels, raw / p)


def _sample(state: QuantumState, kets: Sequence[np.ndarray], axes, rand: RandomStream):
    branches = []
    for ket in kets:
        proj = np.outer(ket, ket.conj())
        branches.append(_project(state, proj, axes))
    probs = [max(p, 0.0) for p, _ in branches]
    total = sum(probs)
    if abs(total - 1.0) > 1e-8:
        raise ArithmeticError(f"outcome probabilities sum to {total!r}")
    k = rand.categorical(probs)
    p, raw = branches[k]
    return k, p, _renormalize(state, raw, p)


def outcome_probabilities(state: QuantumState, target: str, basis: MeasurementBasis) -> tuple[float, float]:
    axes = _axes(state, (target,))
    out = []
    for ket in MeasurementBasis(basis).vectors:
        p, _ = _project(state, np.outer(ket, ket.conj()), axes)
        out.append(p)
    return tuple(out)


def measure(
    state: QuantumState,
    target: str,
    basis: MeasurementBasis | str,
    rand: RandomStream,
) -> MeasurementOutcome:
    """Projective single-qubit measurement; the post-state keeps the measured qubit."""
    basis = MeasurementBasis(basis)
    axes = _axes(state, (target,))
    k, p, post = _sample(state, basis.vectors, axes, rand)
    return MeasurementOutcome(k, p, post)


_BELL_ORDER = tuple(BellIndex)


def bell_probabilities(state: QuantumState, targets: Sequence[str]) -> dict[BellIndex, float]:
    axes = _axes(state, targets)
    out = {}
    for b in _BELL_ORDER:
        ket = bell_ket(b)
        p, _ = _project(state, np.outer(ket, ket.conj()), axes)
        out[b] = p
    return out


def bell_measure(state: QuantumState, targets: Sequence[str], rand: RandomStream) -> MeasurementOutcome:
    """Bell-basis measurement of two qubits (first target is the left factor).

    The post-state is the full projected state; the measured pair is left in
    the observed Bell state.
    """
    targets = tuple(targets)
    if len(targets) != 2:
        raise ValueError("Bell measurement needs exactly two targets")
    if targets[0] == targets[1]:
        raise LabelError(f"Bell measurement on identical labels {targets[0]!r}")
    axes = _axes(state, targets)
    k, p, post = _sample(state, [bell_ket(b) for b in _BELL_ORDER], axes, rand)
    return MeasurementOutcome(_BELL_ORDER[k], p, post)


def partial_trace(state: QuantumState, keep: Sequence[str] | str) -> QuantumState:
    """Reduced density matrix on ``keep``; kept labels retain their original order."""
    if isinstance(keep, str):
        keep = (keep,)
    if not keep:
        raise ValueError("partial trace needs at least one label to keep")
    keep_axes = sorted(_axes(state, keep))
    drop_axes = [i for i in range(state.n_qubits) if i not in keep_axes]
    labels = tuple(state.labels[i] for i in keep_axes)
    dk = 2 ** len(keep_axes)
    dd = 2 ** len(drop_axes)
    n = state.n_qubits
    if state.is_pure:
        t = state.data.reshape((2,) * n).transpose(keep_axes + drop_axes).reshape(dk, dd)
        rho = t @ t.conj().T
    else:
        t = state.data.reshape((2,) * (2 * n))
        order = keep_axes + drop_axes
        t = t.transpose(order + [n + a for a in order]).reshape(dk, dd, dk, dd)
        rho = np.einsum("ajbj->ab", t)
    return QuantumState(labels, rho)


def von_neumann_entropy(rho: QuantumState | np.ndarray) -> float:
    """Entropy in bits, ``-sum(l * log2(l))`` over the Jacobi eigenvalues."""
    if isinstance(rho, QuantumState):
        if rho.is_pure:
            return 0.0
        m = rho.data
    else:
        m = np.asarray(rho, dtype=complex)
        if m.ndim != 2 or m.shape[0] != m.shape[1]:
            raise ValueError("entropy needs a square density matrix")
        if not np.allclose(m, m.conj().T, atol=ATOL, rtol=0.0):
            raise ValueError("density matrix is not Hermitian")
        tr = np.trace(m).real
        if abs(tr - 1.0) > ATOL:
            raise ValueError(f"density matrix trace {tr!r} is not 1")
    eigenvalues, _ = jacobi_eigh(m)
    if eigenvalues.min() < EIG_FLOOR:
        raise ValueError(f"eigenvalue {eigenvalues.min()!r} below {EIG_FLOOR}")
    s = 0.0
    for lam in eigenvalues:
        if lam > 0.0:
            s -= lam * math.log2(lam)
    return float(s) + 0.0
