"""Tests for the sup-norm engine and its axiom checks."""

from __future__ import annotations

import numpy as np
import pytest

from gpt_recon.dual_pair import DualPair, embed_theory, polytope
from gpt_recon.errors import DimensionMismatchError
from gpt_recon.instances import classical, gbit, qubit
from gpt_recon.norms import (
    NormEngine,
    check_duality,
    check_norm_axioms,
    effect_norm,
    effect_norms,
    state_norm,
    state_norms,
)
from gpt_recon.operational import OperationalStatistics


def qubit_engine() -> NormEngine:
    return qubit().engine


def coords_of(engine: NormEngine, mat: np.ndarray) -> np.ndarray:
    flat = engine.matrix_basis.reshape(engine.pair.effect_dim, -1)
    return flat.conj() @ mat.ravel()


class TestClassicalNorms:
    def test_unit_effect_has_norm_one(self):
        inst = classical(3)
        assert effect_norm(inst.engine, np.ones(3)) == pytest.approx(1.0, abs=1e-15)

    def test_effect_norm_is_max_abs_coordinate(self):
        inst = classical(4)
        vec = np.array([0.7, -0.3, 0.1, 0.2])
        assert effect_norm(inst.engine, vec) == pytest.approx(0.7, abs=1e-15)

    def test_state_norm_of_probability_vector_is_one(self):
        inst = classical(4)
        rng = np.random.default_rng(0)
        for _ in range(20):
            p = rng.dirichlet(np.ones(4))
            assert state_norm(inst.engine, p) == pytest.approx(1.0, abs=1e-12)

    def test_state_norm_sums_positive_and_negative_parts(self):
        # hypercube vertices pick out max(sum positive, sum |negative|)
        inst = classical(3)
        vec = np.array([0.5, -0.75, 0.25])
        assert state_norm(inst.engine, vec) == pytest.approx(0.75, abs=1e-15)
        vec2 = np.array([0.5, -0.25, 0.25])
        assert state_norm(inst.engine, vec2) == pytest.approx(0.75, abs=1e-15)


class TestQubitNorms:
    def test_effect_norm_is_largest_singular_value(self):
        engine = qubit_engine()
        rng = np.random.default_rng(1)
        for _ in range(50):
            g = rng.standard_normal((2, 2)) + 1j * rng.standard_normal((2, 2))
            expected = np.linalg.svd(g, compute_uv=False)[0]
            assert effect_norm(engine, coords_of(engine, g)) == pytest.approx(expected, rel=1e-12)

    def test_effect_norm_monte_carlo_oracle(self):
        # maximising |tr(E rho)| over many pure states approaches the norm
        engine = qubit_engine()
        rng = np.random.default_rng(2)
        g = rng.standard_normal((2, 2))
        herm = g + g.T  # Hermitian: the sup is attained on pure states
        psi = rng.standard_normal((100_000, 2)) + 1j * rng.standard_normal((100_000, 2))
        psi /= np.linalg.norm(psi, axis=1, keepdims=True)
        values = np.abs(np.einsum("ki,ij,kj->k", psi.conj(), herm, psi))
        mc = values.max()
        exact = effect_norm(engine, coords_of(engine, herm))
        assert mc <= exact + 1e-9
        assert exact - mc <= 1e-2

    def test_state_norm_of_density_matrix_is_one(self):
        engine = qubit_engine()
        rng = np.random.default_rng(3)
        for _ in range(20):
            g = rng.standard_normal((2, 2)) + 1j * rng.standard_normal((2, 2))
            rho = g @ g.conj().T
            rho /= np.trace(rho).real
            assert state_norm(engine, coords_of(engine, rho)) == pytest.approx(1.0, abs=1e-12)

    def test_state_norm_traceless_hermitian(self):
        # sigma_z against the interval: best projection collects one eigenvalue
        engine = qubit_engine()
        sz = np.array([[1.0, 0.0], [0.0, -1.0]], dtype=complex)
        assert state_norm(engine, coords_of(engine, sz)) == pytest.approx(1.0, abs=1e-12)

    def test_state_norm_non_hermitian_search(self):
        # |tr(M^H E)| over the interval, brute-forced over random projections
        engine = qubit_engine()
        rng = np.random.default_rng(4)
        m = rng.standard_normal((2, 2)) + 1j * rng.standard_normal((2, 2))
        psi = rng.standard_normal((50_000, 2)) + 1j * rng.standard_normal((50_000, 2))
        psi /= np.linalg.norm(psi, axis=1, keepdims=True)
        projections = np.einsum("ki,kj->kij", psi, psi.conj())
        values = np.abs(np.einsum("ab,kab->k", m.conj(), projections))
        brute = max(values.max(), abs(np.trace(m.conj().T)), 0.0)
        engine_value = state_norm(engine, coords_of(engine, m))
        assert engine_value >= brute - 1e-6
        assert engine_value <= brute + 1e-2


class TestBatchConsistency:
    def test_batched_norms_match_single(self):
        for inst in (classical(3), qubit(), gbit()):
            rng = np.random.default_rng(5)
            dim = inst.engine.pair.effect_dim
            batch = rng.standard_normal((10, dim)) + 1j * rng.standard_normal((10, dim))
            singles = [effect_norm(inst.engine, v) for v in batch]
            np.testing.assert_allclose(effect_norms(inst.engine, batch), singles, rtol=1e-13)
            states = rng.standard_normal((10, dim)) + 1j * rng.standard_normal((10, dim))
            singles = [state_norm(inst.engine, v) for v in states]
            np.testing.assert_allclose(state_norms(inst.engine, states), singles, rtol=1e-13)

    def test_dimension_mismatch(self):
        with pytest.raises(DimensionMismatchError):
            effect_norm(classical(3).engine, np.zeros(4))


class TestNormAxioms:
    @pytest.mark.parametrize("name", ["classical", "qubit", "gbit"])
    def test_axioms_pass_on_builtins(self, name):
        inst = {"classical": classical(4), "qubit": qubit(), "gbit": gbit()}[name]
        result = check_norm_axioms(inst.engine, samples=2000, seed=7)
        assert result.verdict == "PASS"
        assert result.residual <= 1e-9
        assert result.detail["unit_norm_residual"] <= 1e-12

    def test_completeness_recorded_as_note(self):
        result = check_norm_axioms(classical(2).engine, samples=10, seed=0)
        assert "complete" in result.detail["completeness"]


class TestDuality:
    @pytest.mark.parametrize("n", [2, 3, 4, 5])
    def test_classical_duality(self, n):
        result = check_duality(classical(n).engine)
        assert result.verdict == "PASS"
        assert result.detail["state_dim"] == n

    def test_qubit_duality(self):
        result = check_duality(qubit().engine)
        assert result.verdict == "PASS"
        assert result.detail["state_dim"] == 4

    def test_rank_deficient_pairing_fails(self):
        # hand-built pair whose pairing matrix kills one direction
        basis = np.eye(3, dtype=complex)
        degenerate = np.diag([1.0, 1.0, 0.0]).astype(complex)
        pair = DualPair(3, 3, basis, basis, degenerate)
        body = polytope(basis, assume_minimal=True)
        engine = NormEngine(pair, body, body)
        result = check_duality(engine)
        assert result.verdict == "FAIL"
        assert result.witness["sigma_min"] == pytest.approx(0.0, abs=1e-15)

    def test_embedded_tables_always_nondegenerate(self):
        rng = np.random.default_rng(8)
        count = 0
        while count < 10:
            table = rng.random((4, 5))
            stats = OperationalStatistics(
                tuple(f"p{i}" for i in range(4)), tuple(f"o{j}" for j in range(5)), table
            )
            pair, states, effects = embed_theory(stats)
            engine = NormEngine(pair, states, effects)
            assert check_duality(engine).verdict == "PASS"
            count += 1
