"""Leakage bound for the ancilla-entangling attack and detection/leakage sweeps."""

from __future__ import annotations

import csv
import io
import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass
from typing import Iterable, Sequence

import numpy as np

from .adversary import ancilla_attack_unitary, apply_ancilla_attack
from .bell import BellIndex, PauliOp
from .bidirectional import sample_check
from .quantum import MeasurementBasis, QuantumState, RandomStream, bell_state, von_neumann_entropy

SWEEP_HEADER = ("d", "error_rate_z", "error_rate_x", "i0_closed", "i0_numeric", "twice_i0")


def uniform_priors() -> np.ndarray:
    return np.full(4, 0.25)


def check_priors(priors) -> np.ndarray:
    p = np.asarray(priors, dtype=float)
    if p.shape != (4,) or np.any(p < 0.0) or abs(p.sum() - 1.0) > 1e-12:
        raise ValueError(f"priors must be four non-negative reals summing to 1, got {priors!r}")
    return p


def i0_closed_form(d: float) -> float:
    """Binary entropy of ``d`` in bits."""
    if not 0.0 <= d <= 1.0:
        raise ValueError(f"d={d} outside [0, 1]")
    h = 0.0
    for p in (d, 1.0 - d):
        if p > 0.0:
            h -= p * math.log2(p)
    return h


@dataclass(frozen=True)
class LeakageReport:
    d: float
    i0_closed: float
    i0_numeric: float
    twice_i0: float
    s_mix: float
    s_branches: tuple[float, float, float, float]


def attacked_photon_state(d: float) -> np.ndarray:
    """Photon-ancilla density matrix after Eve's unitary on the maximally mixed photon."""
    rho_b = 0.5 * np.eye(2, dtype=complex)
    ancilla = np.array([[1, 0], [0, 0]], dtype=complex)
    e = ancilla_attack_unitary(d)
    return e @ np.kron(rho_b, ancilla) @ e.conj().T


def holevo_numeric(d: float, priors=None) -> LeakageReport:
    """Holevo quantity of Bob's four encodings as seen on (photon, ancilla)."""
    p = uniform_priors() if priors is None else check_priors(priors)
    base = attacked_photon_state(d)
    branches = []
    for op in PauliOp:
        u = np.kron(op.matrix, np.eye(2))
        branches.append(u @ base @ u.conj().T)
    mix = sum(pi * b for pi, b in zip(p, branches))
    s_branches = tuple(von_neumann_entropy(b) for b in branches)
    s_mix = von_neumann_entropy(mix)
    i0 = s_mix - float(np.dot(p, s_branches))
    closed = i0_closed_form(d)
    return LeakageReport(d, closed, i0, 2.0 * closed, s_mix, s_branches)


@dataclass(frozen=True)
class SweepRow:
    d: float
    error_rate_z: float
    error_rate_x: float
    i0_closed: float
    i0_numeric: float
    twice_i0: float


def _attacked_pair(d: float) -> QuantumState:
    return apply_ancilla_attack(bell_state(BellIndex.PSI_MINUS, ("B", "C")), "B", d)


def sweep_row(d: float, trials: int, rand: RandomStream) -> SweepRow:
    """Simulated Z- and X-basis check error rates at ``d`` joined with the leakage numbers."""
    pair = _attacked_pair(d)
    z = sample_check([pair] * trials, rand, basis=MeasurementBasis.Z)
    x = sample_check([pair] * trials, rand, basis=MeasurementBasis.X)
    leak = holevo_numeric(d)
    return SweepRow(d, z.rate, x.rate, leak.i0_closed, leak.i0_numeric, leak.twice_i0)


def attack_sweep(
    d_grid: Iterable[float], trials: int, seed: int, workers: int | None = None
) -> list[SweepRow]:
    """One row per grid point; row ``i`` draws from the stream ``(seed, i)``."""
    grid = [float(d) for d in d_grid]
    if any(not 0.0 <= d <= 1.0 for d in grid):
        raise ValueError("every grid point must lie in [0, 1]")
    if trials < 1:
        raise ValueError("trials must be >= 1")
    root = RandomStream(seed, name="sweep")
    jobs = [(d, root.spawn(i)) for i, d in enumerate(grid)]
    if workers and workers > 1:
        with ThreadPoolExecutor(max_workers=workers) as pool:
            return list(pool.map(lambda job: sweep_row(job[0], trials, job[1]), jobs))
    return [sweep_row(d, trials, r) for d, r in jobs]


def write_sweep_csv(rows: Sequence[SweepRow], out=None) -> str:
    """CSV text with a fixed header and ``repr`` floats; also written to ``out`` if given."""
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(SWEEP_HEADER)
    for r in rows:
        w.writerow([repr(float(getattr(r, col))) for col in SWEEP_HEADER])
    text = buf.getvalue()
    if out is not None:
        if hasattr(out, "write"):
            out.write(text)
        else:
            with open(out, "w", newline="") as fh:
                fh.write(text)
    return text


def read_sweep_csv(path) -> list[SweepRow]:
    with open(path, newline="") as fh:
        reader = csv.DictReader(fh)
        if tuple(reader.fieldnames or ()) != SWEEP_HEADER:
            raise ValueError(f"unexpected header {reader.fieldnames}")
        return [SweepRow(**{k: float(v) for k, v in row.items()}) for row in reader]
