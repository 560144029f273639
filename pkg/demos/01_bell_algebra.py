"""
Bell states and the four Pauli encodings
========================================

Bob's two message bits pick one of four local operations. Each one moves
the singlet to a different Bell state, which is why a Bell measurement can
read both bits back.
"""

import numpy as np

from qsdcnet.bell import BellIndex, PauliOp, pauli_compose, pauli_on_bell, swap_expand
from qsdcnet.quantum import apply_unitary, bell_state, same_up_to_phase

np.set_printoptions(precision=3, suppress=True)

# the shared carrier
singlet = bell_state(BellIndex.PSI_MINUS)
print("singlet amplitudes over |00>,|01>,|10>,|11>:", singlet.data.real)

# apply each encoding to photon C and name the Bell state that comes out
print("\nencoding on C -> resulting Bell state")
for op in PauliOp:
    out = apply_unitary(singlet, op.matrix, "C")
    name = pauli_on_bell(BellIndex.PSI_MINUS, op, "C")
    assert same_up_to_phase(out, bell_state(name))
    print(f"  {op.name} (bits {op.code}) -> {name.value}")

# composing two encodings XORs their codes; this is what lets Carol strip her mask
print("\ncomposition table (row then column)")
print("      " + "  ".join(op.name for op in PauliOp))
for a in PauliOp:
    print(f"  {a.name}  " + "  ".join(pauli_compose(a, b).name for b in PauliOp))

# entanglement swapping: Bob's encoded pair times a fresh singlet, re-paired
print("\nswapping U2-encoded pair with a singlet: Bob's result, Carol's result, amplitude")
first = pauli_on_bell(BellIndex.PSI_MINUS, PauliOp.U2, "B")
for term in swap_expand(first, BellIndex.PSI_MINUS):
    print(f"  {term.bob_result.value:5s} {term.carol_result.value:5s} {term.amplitude:+.2f}")
