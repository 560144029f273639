"""
A full bidirectional session
============================

Alice (the server) hands out singlets. Bob and Carol check a sample for
eavesdropping, Carol masks her photons, Bob writes his message, Alice
Bell-measures and publishes what she saw. Carol removes her mask and reads
the message.
"""

from qsdcnet import SessionConfig, run_session
from qsdcnet.cli import bits_to_hex, hex_to_bits

config = SessionConfig(n_pairs=256, sample_fraction=0.2, k_decoys=16, seed=7)
print("pairs:", config.n_pairs)
print("checked in the sample:", config.n_samples)
print("decoys:", config.k_decoys)
print("message capacity (bits):", config.capacity_bits)

# pad a short message up to the session's capacity
message = hex_to_bits("c0ffee")
padded = message + [0] * (config.capacity_bits - len(message))
t = run_session(config, padded)

print("\nstatus:", t.status)
sc = t.channel.sample_check
print(f"sample check: {sc.compared} same-basis comparisons, {sc.errors} errors")
print(f"decoy check: {t.verification.checked} decoys, {t.verification.mismatches} mismatches")

# what Alice published tells her nothing, Carol's masks are uniform
print("\nfirst ten published operations:", [op.name for op in t.published[:10]])
print("decoded:", bits_to_hex(t.decoded_bits[: len(message)]))

e = t.efficiency
print(f"\nqubit efficiency: {e.q_u}/{e.q_t} = {e.eta_q:.4f}")

# the transcript is plain JSON and fully determined by (config, message)
print("\ntranscript size:", len(t.to_json()), "bytes")
print("identical on rerun:", t.to_json() == run_session(config, padded).to_json())
