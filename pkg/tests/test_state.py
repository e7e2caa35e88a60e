"""Tests for state-vector storage, basis conventions and observables."""

import numpy as np
import pytest

from spinsim.state import (
    CapacityError,
    StateVector,
    UnitarityError,
    fidelity,
    inner_product,
    new_basis_state,
)

SQ2 = np.sqrt(2.0)
GATE_X = np.array([[1, 1j], [1j, 1]]) / SQ2   # clockwise quarter turn about x
GATE_YB = np.array([[1, -1], [1, 1]]) / SQ2   # anticlockwise quarter turn about y


class TestBasisState:
    def test_all_up_is_index_zero(self):
        s = new_basis_state(2, [0, 0])
        assert s.amp[0] == 1.0
        assert np.all(s.amp[1:] == 0.0)

    def test_qubit_one_is_least_significant(self):
        s = new_basis_state(2, [1, 0])
        assert s.amp[1] == 1.0

    def test_three_qubit_index(self):
        s = new_basis_state(3, [0, 1, 1])
        assert s.amp[6] == 1.0  # 0 + 2 + 4

    def test_norm_exactly_one(self):
        s = new_basis_state(4, [1, 0, 1, 0])
        assert np.sum(np.abs(s.amp) ** 2) == 1.0

    def test_capacity_bounds(self):
        with pytest.raises(CapacityError):
            new_basis_state(0, [])
        with pytest.raises(CapacityError):
            new_basis_state(27, [0] * 27)

    def test_wrong_bits(self):
        with pytest.raises(ValueError):
            new_basis_state(2, [0])
        with pytest.raises(ValueError):
            new_basis_state(2, [0, 2])


class TestGateApplication:
    def test_identity_leaves_state(self):
        rng = np.random.default_rng(1)
        amp = rng.normal(size=8) + 1j * rng.normal(size=8)
        amp /= np.linalg.norm(amp)
        s = StateVector(3, amp)
        s.apply_gate(2, np.eye(2))
        assert np.allclose(s.amp, amp, atol=1e-15)

    def test_x_gate_on_up(self):
        s = new_basis_state(1, [0]).apply_gate(1, GATE_X)
        assert np.allclose(s.amp, [1 / SQ2, 1j / SQ2], atol=1e-15)

    def test_ybar_gate_on_up(self):
        s = new_basis_state(1, [0]).apply_gate(1, GATE_YB)
        assert np.allclose(s.amp, [1 / SQ2, 1 / SQ2], atol=1e-15)

    def test_non_unitary_rejected_with_deviation(self):
        with pytest.raises(UnitarityError, match="deviation"):
            new_basis_state(1, [0]).apply_gate(1, np.array([[1, 0], [0, 1.1]]))

    def test_gates_on_distinct_qubits_commute(self):
        rng = np.random.default_rng(7)
        amp = rng.normal(size=16) + 1j * rng.normal(size=16)
        amp /= np.linalg.norm(amp)
        a = StateVector(4, amp).apply_gate(1, GATE_X).apply_gate(3, GATE_YB)
        b = StateVector(4, amp).apply_gate(3, GATE_YB).apply_gate(1, GATE_X)
        assert np.allclose(a.amp, b.amp, atol=1e-12)

    def test_norm_preserved(self):
        rng = np.random.default_rng(3)
        amp = rng.normal(size=32) + 1j * rng.normal(size=32)
        amp /= np.linalg.norm(amp)
        s = StateVector(5, amp)
        for j in (1, 3, 5):
            s.apply_gate(j, GATE_X)
        assert abs(s.norm() - 1.0) < 1e-12


class TestExpectations:
    def test_up_eigenstate(self):
        s = new_basis_state(2, [0, 0])
        assert s.expect(1, "z") == pytest.approx(0.5, abs=1e-12)

    def test_plus_eigenstate_of_x(self):
        s = new_basis_state(2, [0, 0]).apply_gate(1, np.array([[1, 1], [1, -1]]) / SQ2)
        assert s.expect(1, "x") == pytest.approx(0.5, abs=1e-12)
        assert s.expect(2, "z") == pytest.approx(0.5, abs=1e-12)

    def test_equatorial_state(self):
        s = StateVector(1, np.array([1, 1j]) / SQ2)
        assert s.expect(1, "z") == pytest.approx(0.0, abs=1e-12)
        assert s.expect(1, "y") == pytest.approx(0.5, abs=1e-12)

    def test_bounds(self):
        rng = np.random.default_rng(11)
        for _ in range(20):
            amp = rng.normal(size=8) + 1j * rng.normal(size=8)
            amp /= np.linalg.norm(amp)
            s = StateVector(3, amp)
            for j in (1, 2, 3):
                for ax in "xyz":
                    assert abs(s.expect(j, ax)) <= 0.5 + 1e-12


class TestQubitValues:
    def test_ground_state(self):
        obs = new_basis_state(2, [0, 0]).observables()
        assert np.allclose(obs.q, [0.0, 0.0], atol=1e-12)

    def test_up_down(self):
        obs = new_basis_state(2, [0, 1]).observables()
        assert np.allclose(obs.q, [0.0, 1.0], atol=1e-12)

    def test_uniform_state(self):
        obs = StateVector(2, np.full(4, 0.5)).observables()
        assert np.allclose(obs.q, [0.5, 0.5], atol=1e-12)

    def test_q_relation_holds(self):
        rng = np.random.default_rng(5)
        amp = rng.normal(size=4) + 1j * rng.normal(size=4)
        amp /= np.linalg.norm(amp)
        obs = StateVector(2, amp).observables(t=3.5)
        assert np.allclose(obs.q, 0.5 - obs.sz, atol=1e-15)
        assert obs.t == 3.5


class TestInnerProductFidelity:
    def test_self_fidelity(self):
        s = new_basis_state(2, [0, 0])
        assert fidelity(s, s) == pytest.approx(1.0, abs=1e-12)

    def test_orthogonal(self):
        assert fidelity(new_basis_state(2, [0, 0]), new_basis_state(2, [1, 1])) == 0.0

    def test_phase_insensitive(self):
        rng = np.random.default_rng(9)
        amp = rng.normal(size=4) + 1j * rng.normal(size=4)
        amp /= np.linalg.norm(amp)
        a = StateVector(2, amp)
        b = StateVector(2, amp * np.exp(0.7j))
        assert fidelity(a, b) == pytest.approx(1.0, abs=1e-12)
        assert inner_product(a, b) == pytest.approx(np.exp(0.7j), abs=1e-12)

    def test_dimension_mismatch(self):
        with pytest.raises(ValueError):
            inner_product(new_basis_state(1, [0]), new_basis_state(2, [0, 0]))


class TestFrameRotation:
    def test_zero_time_is_identity(self):
        rng = np.random.default_rng(2)
        amp = rng.normal(size=4) + 1j * rng.normal(size=4)
        amp /= np.linalg.norm(amp)
        s = StateVector(2, amp)
        s.rotate_frame(0.0, [1.3, -0.4])
        assert np.allclose(s.amp, amp, atol=1e-15)

    def test_full_period_up_to_global_phase(self):
        s = StateVector(1, np.array([0.6, 0.8j]))
        ref = s.copy()
        s.rotate_frame(2 * np.pi, [1.0])
        assert fidelity(s, ref) == pytest.approx(1.0, abs=1e-12)

    def test_z_expectations_invariant(self):
        rng = np.random.default_rng(17)
        amp = rng.normal(size=8) + 1j * rng.normal(size=8)
        amp /= np.linalg.norm(amp)
        s = StateVector(3, amp)
        before = s.observables()
        s.rotate_frame(0.37, [1.0, 0.25, -2.0])
        after = s.observables()
        assert np.allclose(after.q, before.q, atol=1e-12)
        assert np.allclose(after.sz, before.sz, atol=1e-12)
