import itertools
import math

import numpy as np
import pytest

from qsdcnet.adversary import (
    DEFAULT_CONVENTION,
    AncillaEntangling,
    BasisPolicy,
    DishonestServer,
    InterceptResend,
    NoAttack,
    TrojanHorse,
    ancilla_attack_unitary,
    apply_ancilla_attack,
    apply_intercept_resend,
    attack_from_dict,
    attack_to_dict,
    both_click_probability,
    server_lie,
    trojan_beam_splitter_check,
)
from qsdcnet.bell import BellIndex, PauliOp
from qsdcnet.bidirectional import sample_check
from qsdcnet.quantum import (
    MeasurementBasis,
    RandomStream,
    basis_state,
    bell_state,
    partial_trace,
)

GRID = [round(0.1 * i, 1) for i in range(11)]
KETS = {
    "Z": [np.array([1, 0]), np.array([0, 1])],
    "X": [np.array([1, 1]) / math.sqrt(2), np.array([1, -1]) / math.sqrt(2)],
}
SINGLET = np.array([0, 1, -1, 0]) / math.sqrt(2)


def three_sigma(p, n):
    return 3 * math.sqrt(p * (1 - p) / n)


class TestAttackModels:
    def test_ranges(self):
        with pytest.raises(ValueError):
            AncillaEntangling(1.5)
        with pytest.raises(ValueError):
            DishonestServer(-0.1)
        with pytest.raises(ValueError):
            TrojanHorse(0)

    @pytest.mark.parametrize(
        "attack",
        [NoAttack(), InterceptResend(BasisPolicy.FIXED_X), AncillaEntangling(0.3), DishonestServer(0.2), TrojanHorse(3)],
    )
    def test_dict_roundtrip(self, attack):
        assert attack_from_dict(attack_to_dict(attack)) == attack

    def test_unknown_name_lists_valid(self):
        with pytest.raises(ValueError, match="intercept-resend"):
            attack_from_dict({"kind": "photon-cannon"})


class TestAncillaAttack:
    @pytest.mark.parametrize("d", GRID)
    def test_unitary_and_constraints(self, d):
        u = ancilla_attack_unitary(d)
        np.testing.assert_allclose(u.conj().T @ u, np.eye(4), atol=1e-12)
        assert max(DEFAULT_CONVENTION.residuals(d)) < 1e-12

    @pytest.mark.parametrize("d", GRID)
    def test_matches_attack_definition(self, d):
        # columns for ancilla |0>, built straight from the branch amplitudes
        f = 1 - d
        c = DEFAULT_CONVENTION
        zero, one = np.array([1, 0]), np.array([0, 1])
        col0 = math.sqrt(f) * np.kron(zero, c.e00) + math.sqrt(d) * np.kron(one, c.e01)
        col1 = math.sqrt(d) * np.kron(zero, c.e10) + math.sqrt(f) * np.kron(one, c.e11)
        u = ancilla_attack_unitary(d)
        np.testing.assert_allclose(u[:, 0], col0, atol=1e-15)
        np.testing.assert_allclose(u[:, 2], col1, atol=1e-15)

    def test_d_zero_untouched(self):
        s = bell_state(BellIndex.PSI_MINUS)
        out = apply_ancilla_attack(s, "B", 0.0)
        assert out.labels == ("B", "C", "e")
        np.testing.assert_allclose(
            partial_trace(out, ("B", "C")).data, s.density_matrix(), atol=1e-12
        )
        np.testing.assert_allclose(partial_trace(out, "e").data, [[1, 0], [0, 0]], atol=1e-12)

    def test_d_one_flips_and_tags(self):
        out = apply_ancilla_attack(basis_state("0", ("B",)), "B", 1.0)
        np.testing.assert_allclose(out.data, basis_state("11", ("B", "e")).data, atol=1e-12)

    def test_z_error_rate_density_matrix(self):
        # oracle: P(B == C) after the attack, from the reduced BC density matrix
        d = 0.25
        f = 1 - d
        e = np.zeros((4, 4))
        e[:, 0] = [math.sqrt(f), 0, 0, math.sqrt(d)]
        e[:, 2] = [0, math.sqrt(d), math.sqrt(f), 0]
        e[:, 1] = [0, math.sqrt(f), -math.sqrt(d), 0]
        e[:, 3] = [-math.sqrt(d), 0, 0, math.sqrt(f)]
        full = np.kron(SINGLET, [1, 0]).reshape(2, 2, 2)  # B C e
        full = np.einsum("xyBe,BCe->xCy", e.reshape(2, 2, 2, 2), full)  # B C e
        rho_bc = np.einsum("bce,BCe->bcBC", full, full.conj()).reshape(4, 4)
        p_same = rho_bc[0, 0].real + rho_bc[3, 3].real
        assert p_same == pytest.approx(0.25, abs=1e-12)

        attacked = apply_ancilla_attack(bell_state(BellIndex.PSI_MINUS), "B", d)
        lib = partial_trace(attacked, ("B", "C")).data
        np.testing.assert_allclose(lib, rho_bc, atol=1e-12)

    def test_z_error_rate_sampled(self):
        pair = apply_ancilla_attack(bell_state(BellIndex.PSI_MINUS), "B", 0.25)
        n = 10000
        rec = sample_check([pair] * n, RandomStream(4), basis="Z")
        assert rec.compared == n
        assert abs(rec.rate - 0.25) < three_sigma(0.25, n)

    def test_ancilla_label_collision(self):
        s = apply_ancilla_attack(bell_state(BellIndex.PSI_MINUS), "B", 0.1)
        s2 = apply_ancilla_attack(s, "C", 0.1)
        assert s2.labels == ("B", "C", "e", "e_C")


def intercept_error_oracle(eve_bases, check_bases):
    """Exact error probability averaged over Eve's and the checkers' basis choices."""
    total = 0.0
    for eb in eve_bases:
        for cb in check_bases:
            err = 0.0
            for k, ket in enumerate(KETS[eb]):
                # Eve projects B onto ket; C collapses to the conditional state
                proj = np.kron(np.outer(ket, ket), np.eye(2)) @ SINGLET
                p_eve = np.vdot(proj, proj).real
                post = proj / math.sqrt(p_eve)
                for ob, kb in enumerate(KETS[cb]):
                    for oc, kc in enumerate(KETS[cb]):
                        amp = np.vdot(np.kron(kb, kc), post)
                        if ob == oc:
                            err += p_eve * abs(amp) ** 2
            total += err
    return total / (len(eve_bases) * len(check_bases))


class TestInterceptResend:
    def test_oracle_values(self):
        assert intercept_error_oracle("Z", "Z") == pytest.approx(0.0, abs=1e-12)
        assert intercept_error_oracle("Z", "X") == pytest.approx(0.5, abs=1e-12)
        assert intercept_error_oracle("ZX", "ZX") == pytest.approx(0.25, abs=1e-12)

    def test_fixed_z_z_check(self):
        rand = RandomStream(1)
        pairs = [apply_intercept_resend(bell_state(BellIndex.PSI_MINUS), "B", "Z", rand)[0] for _ in range(500)]
        assert sample_check(pairs, rand, basis="Z").errors == 0

    def test_fixed_z_x_check(self):
        rand = RandomStream(2)
        n = 5000
        pairs = [apply_intercept_resend(bell_state(BellIndex.PSI_MINUS), "B", BasisPolicy.FIXED_Z, rand)[0] for _ in range(n)]
        rec = sample_check(pairs, rand, basis=MeasurementBasis.X)
        assert abs(rec.rate - 0.5) < three_sigma(0.5, n)

    def test_random_policy_quarter(self):
        rand = RandomStream(3)
        pairs = []
        bases = set()
        for _ in range(20000):
            s, rec = apply_intercept_resend(bell_state(BellIndex.PSI_MINUS), "B", BasisPolicy.RANDOM_ZX, rand)
            pairs.append(s)
            bases.add(rec.basis)
        rec = sample_check(pairs, rand)
        assert bases == {MeasurementBasis.Z, MeasurementBasis.X}
        assert abs(rec.rate - 0.25) < three_sigma(0.25, rec.compared)


class TestServerLie:
    def test_honest(self):
        rand = RandomStream(0)
        assert all(server_lie(op, 0.0, rand) is op for op in PauliOp for _ in range(50))

    def test_always_lies_uniformly(self):
        rand = RandomStream(0)
        for truth in PauliOp:
            seen = {server_lie(truth, 1.0, rand) for _ in range(200)}
            assert truth not in seen
            assert len(seen) == 3

    def test_rate(self):
        rand = RandomStream(5)
        n = 10000
        lies = sum(server_lie(PauliOp.U2, 0.2, rand) is not PauliOp.U2 for _ in range(n))
        assert abs(lies / n - 0.2) < three_sigma(0.2, n)


class TestTrojan:
    @pytest.mark.parametrize("n", [1, 2, 3, 4, 6])
    def test_probability_by_enumeration(self, n):
        routes = list(itertools.product((0, 1), repeat=n))
        both = sum(1 for r in routes if 0 < sum(r) < n)
        assert both_click_probability(n) == pytest.approx(both / len(routes))

    def test_known_values(self):
        assert both_click_probability(1) == 0.0
        assert both_click_probability(2) == 0.5
        assert both_click_probability(4) == 0.875

    def test_single_photon_never_double_clicks(self):
        rand = RandomStream(0)
        assert not any(trojan_beam_splitter_check(0, rand).both_clicked for _ in range(2000))

    @pytest.mark.parametrize("extra", [1, 3])
    def test_frequency(self, extra):
        rand = RandomStream(extra)
        n = 10000
        p = both_click_probability(extra + 1)
        hits = sum(trojan_beam_splitter_check(extra, rand).both_clicked for _ in range(n))
        assert abs(hits / n - p) < three_sigma(p, n)
