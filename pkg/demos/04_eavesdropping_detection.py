"""
Catching an eavesdropper
========================

Four kinds of attack, and the check that catches each: the basis sample
check for intercept-resend and entangling probes, the beam splitter for
Trojan-horse photons, and the decoys for a server that lies.
"""

from qsdcnet import (
    AbortAtSampleCheck,
    AbortAtVerification,
    AncillaEntangling,
    DishonestServer,
    InterceptResend,
    SessionConfig,
    TrojanHorse,
    run_session,
)
from qsdcnet.adversary import both_click_probability
from qsdcnet.security import attack_sweep


def attempt(attack, **kw):
    config = SessionConfig(n_pairs=256, attack=attack, seed=11, **kw)
    try:
        t = run_session(config, [0] * config.capacity_bits)
        return f"not detected (status {t.status})"
    except (AbortAtSampleCheck, AbortAtVerification) as exc:
        return f"{exc.status}: {exc}"


print("intercept-resend:", attempt(InterceptResend(), sample_fraction=0.5))
print("ancilla probe:   ", attempt(AncillaEntangling(0.25)))
print("trojan horse:    ", attempt(TrojanHorse(1)))
print("lying server:    ", attempt(DishonestServer(1.0)))

# a multi-photon pulse splits at a 50/50 beam splitter and fires both detectors
print("\nphotons per pulse, chance both detectors click")
for n in (1, 2, 3, 4):
    print(f"  {n}  {both_click_probability(n):.4f}")

# the entangling probe trades detection for information
print("\nd      Z errors  X errors")
for row in attack_sweep([0.0, 0.1, 0.25, 0.4], trials=4000, seed=1):
    print(f"{row.d:.2f}   {row.error_rate_z:.4f}    {row.error_rate_x:.4f}")
# with this choice of probe states only the Z check sees the disturbance
