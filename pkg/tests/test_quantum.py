import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from qsdcnet.bell import BellIndex, PauliOp
from qsdcnet.quantum import (
    LabelError,
    MeasurementBasis,
    QuantumState,
    RandomStream,
    apply_unitary,
    basis_state,
    bell_measure,
    bell_probabilities,
    bell_state,
    measure,
    outcome_probabilities,
    partial_trace,
    same_up_to_phase,
    tensor,
    von_neumann_entropy,
)

SX = PauliOp.U2.matrix
SZ = PauliOp.U1.matrix


def random_pure(rng, labels):
    v = rng.normal(size=2 ** len(labels)) + 1j * rng.normal(size=2 ** len(labels))
    return QuantumState(tuple(labels), v / np.linalg.norm(v))


def random_unitary(rng, n):
    q, r = np.linalg.qr(rng.normal(size=(n, n)) + 1j * rng.normal(size=(n, n)))
    return q * (np.diag(r) / np.abs(np.diag(r)))


class TestConstruction:
    def test_norm_checked(self):
        with pytest.raises(ValueError, match="norm"):
            QuantumState(("B",), np.array([1.0, 1.0]))

    def test_non_finite(self):
        with pytest.raises(ValueError, match="non-finite"):
            QuantumState(("B",), np.array([np.nan, 0]))

    def test_density_checks(self):
        with pytest.raises(ValueError, match="trace"):
            QuantumState(("B",), np.eye(2))
        with pytest.raises(ValueError, match="Hermitian"):
            QuantumState(("B",), np.array([[0.5, 0.5], [0, 0.5]]))
        with pytest.raises(ValueError, match="negative eigenvalue"):
            QuantumState(("B",), np.array([[1.5, 0], [0, -0.5]]))

    def test_dimension_cap(self):
        with pytest.raises(ValueError, match="exceeds"):
            basis_state("00000", "abcde")

    def test_immutable(self):
        s = basis_state("0", ("B",))
        with pytest.raises(ValueError):
            s.data[0] = 0


class TestTensor:
    def test_basis_product(self):
        s = tensor(basis_state("0", ("B",)), basis_state("1", ("C",)))
        assert s.labels == ("B", "C")
        np.testing.assert_array_equal(s.data, basis_state("01", ("B", "C")).data)

    def test_two_singlets(self):
        s = tensor(
            bell_state(BellIndex.PSI_MINUS, ("B1", "C1")),
            bell_state(BellIndex.PSI_MINUS, ("B2", "C2")),
        )
        nz = s.data[np.abs(s.data) > 1e-12]
        assert len(nz) == 4
        np.testing.assert_allclose(np.abs(nz), 0.5)

    def test_duplicate_label_named(self):
        with pytest.raises(LabelError, match="'B'"):
            tensor(basis_state("0", ("B",)), basis_state("0", ("B",)))

    def test_mixed_operand(self):
        rho = partial_trace(bell_state(BellIndex.PSI_MINUS), "B")
        s = tensor(rho, basis_state("1", ("e",)))
        assert not s.is_pure
        assert np.trace(s.data).real == pytest.approx(1.0, abs=1e-12)


class TestApplyUnitary:
    def test_sigma_x_on_c_gives_phi_minus(self):
        s = apply_unitary(bell_state(BellIndex.PSI_MINUS), SX, "C")
        assert same_up_to_phase(s, bell_state(BellIndex.PHI_MINUS))

    def test_identity(self):
        s = bell_state(BellIndex.PHI_PLUS)
        np.testing.assert_allclose(apply_unitary(s, np.eye(2), "B").data, s.data)

    def test_involution(self):
        s = bell_state(BellIndex.PSI_PLUS)
        twice = apply_unitary(apply_unitary(s, SZ, "B"), SZ, "B")
        assert same_up_to_phase(twice, s)

    def test_two_qubit_target_order(self):
        cnot = np.eye(4)[[0, 1, 3, 2]]
        s = basis_state("01", ("a", "b"))
        # control b, target a
        out = apply_unitary(s, cnot, ("b", "a"))
        np.testing.assert_allclose(out.data, basis_state("11", ("a", "b")).data)

    def test_density_matrix_path(self):
        rng = np.random.default_rng(5)
        psi = random_pure(rng, ("a", "b", "c"))
        u = random_unitary(rng, 4)
        pure = apply_unitary(psi, u, ("c", "a"))
        mixed = apply_unitary(psi.as_density(), u, ("c", "a"))
        np.testing.assert_allclose(mixed.data, pure.density_matrix(), atol=1e-12)

    def test_rejects_non_unitary(self):
        with pytest.raises(ValueError, match="unitary"):
            apply_unitary(basis_state("0", ("B",)), np.array([[1, 1], [0, 1]]), "B")

    def test_unknown_label(self):
        with pytest.raises(LabelError, match="'Z'"):
            apply_unitary(basis_state("0", ("B",)), SX, "Z")

    @settings(max_examples=40, deadline=None)
    @given(st.integers(0, 2**32 - 1), st.integers(1, 4))
    def test_norm_preserved(self, seed, n):
        rng = np.random.default_rng(seed)
        labels = tuple(f"q{i}" for i in range(n))
        s = random_pure(rng, labels)
        t = apply_unitary(s, random_unitary(rng, 2), labels[-1])
        assert np.linalg.norm(t.data) == pytest.approx(1.0, abs=1e-10)


class TestMeasure:
    def test_singlet_marginal(self):
        assert outcome_probabilities(bell_state(BellIndex.PSI_MINUS), "B", "Z") == pytest.approx((0.5, 0.5))

    def test_anticorrelation_after_collapse(self):
        rand = RandomStream(11)
        for _ in range(50):
            o = measure(bell_state(BellIndex.PSI_MINUS), "B", "Z", rand)
            p = outcome_probabilities(o.post_state, "C", "Z")
            assert p[1 - o.value] == pytest.approx(1.0, abs=1e-12)

    def test_zero_in_x(self):
        assert outcome_probabilities(basis_state("0", ("B",)), "B", MeasurementBasis.X) == pytest.approx((0.5, 0.5))

    def test_x_collapse_is_x_eigenstate(self):
        o = measure(basis_state("0", ("B",)), "B", "X", RandomStream(1))
        p = outcome_probabilities(o.post_state, "B", "X")
        assert p[o.value] == pytest.approx(1.0)

    def test_born_frequencies(self):
        theta = 0.7
        s = QuantumState(("q",), np.array([math.cos(theta), math.sin(theta)]))
        p1 = math.sin(theta) ** 2
        rand = RandomStream(2024)
        n = 20000
        ones = sum(measure(s, "q", "Z", rand).value for _ in range(n))
        sigma = math.sqrt(n * p1 * (1 - p1))
        assert abs(ones - n * p1) < 3 * sigma

    def test_density_matrix_measurement(self):
        rho = partial_trace(bell_state(BellIndex.PSI_MINUS), "B")
        o = measure(rho, "B", "Z", RandomStream(0))
        assert o.probability == pytest.approx(0.5)
        assert not o.post_state.is_pure
        assert np.trace(o.post_state.data).real == pytest.approx(1.0)


class TestBellMeasure:
    def test_eigenstate(self):
        o = bell_measure(bell_state(BellIndex.PHI_PLUS), ("B", "C"), RandomStream(0))
        assert o.value is BellIndex.PHI_PLUS
        assert o.probability == pytest.approx(1.0)

    def test_swap_quarter_each(self):
        s = tensor(
            bell_state(BellIndex.PSI_MINUS, ("B1", "C1")),
            bell_state(BellIndex.PSI_MINUS, ("B2", "C2")),
        )
        probs = bell_probabilities(s, ("B1", "B2"))
        for p in probs.values():
            assert p == pytest.approx(0.25, abs=1e-12)
        assert sum(probs.values()) == pytest.approx(1.0, abs=1e-10)

    def test_identical_labels(self):
        with pytest.raises(LabelError):
            bell_measure(bell_state(BellIndex.PHI_PLUS), ("B", "B"), RandomStream(0))

    @settings(max_examples=30, deadline=None)
    @given(st.integers(0, 2**32 - 1))
    def test_probabilities_normalized(self, seed):
        s = random_pure(np.random.default_rng(seed), ("a", "b", "c"))
        assert sum(bell_probabilities(s, ("c", "a")).values()) == pytest.approx(1.0, abs=1e-10)


class TestPartialTrace:
    def test_singlet_reduces_to_half_identity(self):
        rho = partial_trace(bell_state(BellIndex.PSI_MINUS), "B")
        np.testing.assert_allclose(rho.data, 0.5 * np.eye(2), atol=1e-12)

    def test_product_state(self):
        rho = partial_trace(basis_state("01", ("B", "C")), "B")
        np.testing.assert_allclose(rho.data, [[1, 0], [0, 0]], atol=1e-12)

    def test_keep_all_is_identity(self):
        s = random_pure(np.random.default_rng(3), ("a", "b", "c"))
        np.testing.assert_allclose(partial_trace(s, ("a", "b", "c")).data, s.density_matrix(), atol=1e-12)

    def test_matches_einsum_oracle(self):
        rng = np.random.default_rng(8)
        s = random_pure(rng, ("a", "b", "c", "d"))
        t = s.data.reshape(2, 2, 2, 2)
        oracle = np.einsum("abcd,AbCd->acAC", t, t.conj()).reshape(4, 4)
        np.testing.assert_allclose(partial_trace(s, ("c", "a")).data, oracle, atol=1e-12)
        np.testing.assert_allclose(partial_trace(s.as_density(), ("a", "c")).data, oracle, atol=1e-12)

    def test_empty_keep(self):
        with pytest.raises(ValueError):
            partial_trace(bell_state(BellIndex.PSI_MINUS), ())

    @settings(max_examples=30, deadline=None)
    @given(st.integers(0, 2**32 - 1))
    def test_unit_trace(self, seed):
        s = random_pure(np.random.default_rng(seed), ("a", "b", "c"))
        assert np.trace(partial_trace(s, "b").data).real == pytest.approx(1.0, abs=1e-10)


class TestEntropy:
    def test_maximally_mixed(self):
        assert von_neumann_entropy(0.5 * np.eye(2)) == pytest.approx(1.0, abs=1e-12)

    def test_pure_projector(self):
        v = np.array([0.6, 0.8j])
        assert von_neumann_entropy(np.outer(v, v.conj())) == pytest.approx(0.0, abs=1e-12)

    def test_quarter_three_quarters(self):
        oracle = -(0.25 * math.log2(0.25) + 0.75 * math.log2(0.75))
        assert oracle == pytest.approx(0.8113, abs=1e-4)
        assert von_neumann_entropy(np.diag([0.25, 0.75])) == pytest.approx(oracle, abs=1e-12)

    def test_rejects_non_hermitian(self):
        with pytest.raises(ValueError, match="Hermitian"):
            von_neumann_entropy(np.array([[0.5, 0.1], [0.0, 0.5]]))

    def test_tiny_negative_eigenvalue_clamped(self):
        assert von_neumann_entropy(np.diag([1.0 + 5e-11, -5e-11])) == pytest.approx(0.0, abs=1e-9)

    @settings(max_examples=30, deadline=None)
    @given(st.integers(0, 2**32 - 1))
    def test_unitary_invariance(self, seed):
        rng = np.random.default_rng(seed)
        s = random_pure(rng, ("a", "b", "c"))
        rho = partial_trace(s, ("a", "b")).data
        u = random_unitary(rng, 4)
        assert von_neumann_entropy(u @ rho @ u.conj().T) == pytest.approx(von_neumann_entropy(rho), abs=1e-9)


def test_random_stream_reproducible_and_spawn_independent():
    a, b = RandomStream(9), RandomStream(9)
    assert [a.random() for _ in range(5)] == [b.random() for _ in range(5)]
    c0, c1 = RandomStream(9).spawn(0), RandomStream(9).spawn(1)
    assert c0.random() != c1.random()
    assert RandomStream(9).spawn(3).random() == RandomStream(9).spawn(3).random()
