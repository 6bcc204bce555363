"""Tests for the table embedding, pairing and convex bodies."""

from __future__ import annotations

import numpy as np
import pytest

from gpt_recon.dual_pair import (
    ConvexBody,
    DualPair,
    bloch_ball,
    embed_theory,
    check_nondegenerate,
    hypercube_vertices,
    matrix_interval,
    membership,
    mix,
    pairing,
    pairing_batch,
    polytope,
)
from gpt_recon.errors import (
    DimensionMismatchError,
    DomainError,
    RankDeficiencyError,
    WeightError,
)
from gpt_recon.instances import PAULIS, qubit
from gpt_recon.operational import OperationalStatistics


def make_stats(table: np.ndarray) -> OperationalStatistics:
    m, n = table.shape
    return OperationalStatistics(
        tuple(f"p{i}" for i in range(m)), tuple(f"o{j}" for j in range(n)), table
    )


class TestEmbedding:
    def test_single_cell_table(self):
        pair, states, effects = embed_theory(make_stats(np.array([[1.0]])))
        assert pair.state_dim == pair.effect_dim == 1
        assert states.vertices.shape == (1, 1)
        np.testing.assert_allclose(pairing(pair, pair.state_basis[0], pair.effect_basis[0]), 1.0)

    def test_classical_bit_table_dims(self):
        # two states, four effects: identity, complement, sure, impossible
        table = np.array([[1.0, 0.0, 1.0, 0.0], [0.0, 1.0, 1.0, 0.0]])
        pair, _, _ = embed_theory(make_stats(table))
        assert pair.state_dim == 2
        assert pair.effect_dim == 2
        assert pair.state_basis.shape == (2, 2)
        assert pair.effect_basis.shape == (4, 2)

    def test_round_trip_reproduces_table(self):
        rng = np.random.default_rng(11)
        for _ in range(25):
            m = int(rng.integers(1, 7))
            n = int(rng.integers(1, 7))
            table = rng.random((m, n))
            stats = make_stats(table)
            try:
                pair, _, _ = embed_theory(stats)
            except DomainError:
                continue  # random collision made it unseparated; not this test
            recon = np.real(pairing_batch(pair, pair.state_basis, pair.effect_basis))
            np.testing.assert_allclose(recon, table, atol=1e-12)

    def test_rank_three_square_table(self):
        # gbit-style deterministic table has rank 3
        table = np.array(
            [[1.0, 0.0, 1.0, 0.0], [1.0, 0.0, 0.0, 1.0], [0.0, 1.0, 1.0, 0.0], [0.0, 1.0, 0.0, 1.0]]
        )
        pair, _, _ = embed_theory(make_stats(table))
        assert pair.state_dim == 3
        assert check_nondegenerate(pair)

    def test_qubit_frame_table_rank_four(self):
        pair, _, _ = embed_theory(qubit().stats)
        assert pair.state_dim == 4
        assert check_nondegenerate(pair)

    def test_unseparated_input_rejected(self):
        table = np.array([[0.3, 0.7], [0.3, 0.7]])
        with pytest.raises(DomainError):
            embed_theory(make_stats(table))

    def test_zero_table_rank_deficient(self):
        with pytest.raises(RankDeficiencyError):
            embed_theory(make_stats(np.array([[0.0]])))


class TestPairing:
    def test_conjugate_linear_in_state_slot(self):
        rng = np.random.default_rng(5)
        pair, _, _ = embed_theory(make_stats(rng.random((3, 4))))
        omega = rng.standard_normal(3) + 1j * rng.standard_normal(3)
        effect = rng.standard_normal(3) + 1j * rng.standard_normal(3)
        direct = pairing(pair, 1j * omega, effect)
        np.testing.assert_allclose(direct, -1j * pairing(pair, omega, effect))
        np.testing.assert_allclose(
            pairing(pair, omega, 1j * effect), 1j * pairing(pair, omega, effect)
        )

    def test_additivity_random_triples(self):
        rng = np.random.default_rng(6)
        pair, _, _ = embed_theory(make_stats(rng.random((4, 4))))
        for _ in range(50):
            a, b = rng.standard_normal((2, 4)) + 1j * rng.standard_normal((2, 4))
            e = rng.standard_normal(4) + 1j * rng.standard_normal(4)
            np.testing.assert_allclose(
                pairing(pair, a + b, e),
                pairing(pair, a, e) + pairing(pair, b, e),
                atol=1e-12,
            )

    def test_shape_checks(self):
        pair, _, _ = embed_theory(make_stats(np.eye(2)))
        with pytest.raises(DimensionMismatchError):
            pairing(pair, np.zeros(3), np.zeros(2))

    def test_degenerate_pairing_detected(self):
        bad = DualPair(
            2,
            2,
            np.eye(2, dtype=complex),
            np.eye(2, dtype=complex),
            np.array([[1.0, 0.0], [0.0, 0.0]], dtype=complex),
        )
        assert not check_nondegenerate(bad)

    def test_unequal_dims_degenerate(self):
        bad = DualPair(
            2,
            3,
            np.eye(2, dtype=complex),
            np.eye(3, dtype=complex),
            np.ones((2, 3), dtype=complex),
        )
        assert not check_nondegenerate(bad)


class TestBodies:
    def test_polytope_prunes_interior_points(self):
        pts = np.array([[0.0, 0.0], [1.0, 0.0], [0.0, 1.0], [0.25, 0.25]])
        body = polytope(pts)
        assert body.vertices.shape == (3, 2)

    def test_membership_polytope(self):
        simplex = polytope(np.eye(3))
        assert membership(simplex, np.array([1 / 3, 1 / 3, 1 / 3]))
        assert membership(simplex, np.array([1.0, 0.0, 0.0]))
        assert not membership(simplex, np.array([0.7, 0.7, -0.4]))

    def test_mix_stays_inside(self):
        rng = np.random.default_rng(2)
        square = polytope(np.array([[1, 1], [1, -1], [-1, 1], [-1, -1]], dtype=float))
        for _ in range(20):
            w = rng.dirichlet(np.ones(4))
            point = mix(square.vertices, w)
            assert membership(square, point)

    def test_mix_weight_validation(self):
        pts = np.eye(2)
        with pytest.raises(WeightError):
            mix(pts, np.array([0.6, 0.6]))
        with pytest.raises(WeightError):
            mix(pts, np.array([1.2, -0.2]))
        with pytest.raises(WeightError):
            mix(pts, np.array([1.0]))

    def test_qubit_mixture_eigenvalue_oracle(self):
        # random mixtures of the frame states stay positive with unit trace
        rng = np.random.default_rng(9)
        inst = qubit()
        basis = inst.engine.matrix_basis
        for _ in range(25):
            w = rng.dirichlet(np.ones(4))
            coords = mix(inst.engine.pair.state_basis, w)
            mat = np.tensordot(coords, basis, axes=([0], [0]))
            eigs = np.linalg.eigvalsh(mat)
            assert eigs.min() >= -1e-12
            np.testing.assert_allclose(np.trace(mat).real, 1.0, atol=1e-12)

    def test_bloch_ball_membership(self):
        basis = np.concatenate([[np.eye(2, dtype=complex)], PAULIS]) / np.sqrt(2.0)
        ball = bloch_ball(basis)
        flat = basis.reshape(4, 4)
        maxmix = flat.conj() @ (np.eye(2, dtype=complex) / 2).ravel()
        assert membership(ball, maxmix)
        pure = flat.conj() @ np.array([[1, 0], [0, 0]], dtype=complex).ravel()
        assert membership(ball, pure)
        hot = flat.conj() @ np.array([[1.2, 0], [0, -0.2]], dtype=complex).ravel()
        assert not membership(ball, hot)

    def test_matrix_interval_membership(self):
        basis = np.concatenate([[np.eye(2, dtype=complex)], PAULIS]) / np.sqrt(2.0)
        interval = matrix_interval(basis)
        flat = basis.reshape(4, 4)
        half = flat.conj() @ (np.eye(2, dtype=complex) / 2).ravel()
        assert membership(interval, half)
        over = flat.conj() @ (1.5 * np.eye(2, dtype=complex)).ravel()
        assert not membership(interval, over)

    def test_hypercube_vertices(self):
        verts = hypercube_vertices(3)
        assert verts.shape == (8, 3)
        assert set(map(tuple, verts)) == {
            tuple(map(float, bits)) for bits in np.ndindex(2, 2, 2)
        }

    def test_body_kind_validation(self):
        with pytest.raises(DomainError):
            ConvexBody("ball", 2)
