"""
Sending through entanglement swapping
=====================================

Here the encoded qubit never returns to the server. Bob encodes on the
first pair of each group, Bell-measures his two photons and announces the
result. Carol Bell-measures hers and decodes from both results.
"""

import random
from collections import Counter

from qsdcnet import BellIndex, PauliOp, SwapSessionConfig, run_swap_session
from qsdcnet.bell import bits_to_paulis
from qsdcnet.swapping import plugin_mutual_information

config = SwapSessionConfig(n_groups=400, seed=3)
rng = random.Random(2024)
message = [rng.randint(0, 1) for _ in range(config.capacity_bits)]
t = run_swap_session(config, message)

print("groups used:", t.usable_groups)
print("recovered exactly:", t.decoded_bits == message)
print("bits per EPR pair:", t.bits_per_pair)

print("\na few groups: encoding, Bob's announcement, Carol's result")
for g in t.groups[:6]:
    print(f"  {g.encoding.name}  {g.bob_outcome.value:5s} {g.carol_outcome.value:5s} -> {g.decoded.name}")

# Bob's public announcement is uniform whatever he encoded
counts = Counter(g.bob_outcome for g in t.groups)
print("\nBob's announcements:", {b.value: counts[b] for b in BellIndex})
mi = plugin_mutual_information(bits_to_paulis(message), [g.bob_outcome for g in t.groups])
print(f"plug-in mutual information with the message: {mi:.4f} bits")

# a purification yield below one leaves fewer usable groups
half = SwapSessionConfig(n_groups=10, purification_yield=0.5)
print("\nyield 0.5 on 10 groups leaves", half.usable_groups, "groups")
print("encodings:", [op.name for op in PauliOp])
