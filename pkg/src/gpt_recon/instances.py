"""Built-in theory instances: classical, qubit, and the gbit counter-model.

Each instance packages a statistics table, the native state and effect
bodies, the algebra the model carries, and the verdict map the axiom
battery is expected to produce.  The gbit ships a candidate coordinatewise
product precisely so the battery can catch it: its regular representation
is not isometric and the C*-identity fails with an explicit witness.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .algebra import AlgebraModel, from_matrix_basis, pointwise_algebra
from .dual_pair import ConvexBody, DualPair, bloch_ball, hypercube_vertices, matrix_interval, polytope
from .errors import SizeError, UnsupportedModelError
from .norms import NormEngine
from .operational import OperationalStatistics
from .report import FAIL, NOT_APPLICABLE, PASS
from .star import StarAlgebraModel

MAX_CLASSICAL_DIM = 8

#: Bloch vectors of the tetrahedral frame used for the qubit table.
TETRAHEDRON = np.array(
    [[1.0, 1.0, 1.0], [1.0, -1.0, -1.0], [-1.0, 1.0, -1.0], [-1.0, -1.0, 1.0]]
) / np.sqrt(3.0)

PAULIS = np.array(
    [
        [[0.0, 1.0], [1.0, 0.0]],
        [[0.0, -1.0j], [1.0j, 0.0]],
        [[1.0, 0.0], [0.0, -1.0]],
    ],
    dtype=complex,
)


@dataclass(frozen=True)
class TheoryInstance:
    """A named model with everything the axiom battery consumes."""

    name: str
    stats: OperationalStatistics
    state_body: ConvexBody
    effect_body: ConvexBody
    engine: NormEngine
    algebra: AlgebraModel | None
    star: StarAlgebraModel | None
    expected: dict[str, str] = field(default_factory=dict)
    witnesses: dict[str, np.ndarray] = field(default_factory=dict)


_ALL_PASS = {
    "separation": PASS,
    "duality-dims": PASS,
    "norm-axioms": PASS,
    "submultiplicativity": PASS,
    "uniform-bound": PASS,
    "isometry": PASS,
    "projections": PASS,
    "complements": PASS,
    "involution": PASS,
    "cstar-identity": PASS,
    "support-norm-equality": PASS,
    "predual-duality": PASS,
}


def classical(n: int) -> TheoryInstance:
    """Classical theory on ``n`` outcomes: simplex states, hypercube
    effects, pointwise multiplication, trivial involution.

    The statistics table is the identity — preparation i yields outcome i
    with certainty — which separates everything and spans dimension n.
    """
    if not isinstance(n, int) or n < 1:
        raise SizeError(f"classical dimension must be a positive integer, got {n!r}")
    if n > MAX_CLASSICAL_DIM:
        raise SizeError(
            f"classical dimension {n} exceeds the supported maximum {MAX_CLASSICAL_DIM}"
        )
    stats = OperationalStatistics(
        tuple(f"p{i}" for i in range(n)),
        tuple(f"o{i}" for i in range(n)),
        np.eye(n),
    )
    eye = np.eye(n, dtype=complex)
    state_body = polytope(eye, assume_minimal=True)
    effect_body = polytope(hypercube_vertices(n).astype(complex), assume_minimal=True)
    pair = DualPair(n, n, eye, eye, np.eye(n, dtype=complex))
    engine = NormEngine(
        pair, state_body, effect_body, unit_effect=np.ones(n, dtype=complex)
    )
    alg = pointwise_algebra(n, engine, support_rule="indicator")
    star = StarAlgebraModel(alg, np.eye(n, dtype=complex))
    return TheoryInstance(
        name=f"classical:{n}",
        stats=stats,
        state_body=state_body,
        effect_body=effect_body,
        engine=engine,
        algebra=alg,
        star=star,
        expected=dict(_ALL_PASS),
    )


def qubit() -> TheoryInstance:
    """Qubit theory probed on a tetrahedral frame.

    Four pure states with Bloch vectors at tetrahedron corners, measured
    against the four-outcome frame measurement built from the same
    directions, give the table ``(1 + t_i . t_j) / 4`` of rank four.
    Coordinates are taken in the Hermitian orthonormal basis
    ``{I, X, Y, Z} / sqrt(2)``, where matrix conjugate-transposition is
    plain coordinate conjugation.
    """
    basis = np.concatenate([[np.eye(2, dtype=complex)], PAULIS]) / np.sqrt(2.0)
    flat = basis.reshape(4, 4)

    def coords(mat: np.ndarray) -> np.ndarray:
        return flat.conj() @ mat.ravel()  # orthonormal basis: plain overlap

    states = [(np.eye(2) + np.tensordot(t, PAULIS, axes=1)) / 2.0 for t in TETRAHEDRON]
    effects = [s / 2.0 for s in states]
    table = np.array([[float(np.trace(r.conj().T @ e).real) for e in effects] for r in states])
    stats = OperationalStatistics(
        tuple(f"p{i}" for i in range(4)),
        tuple(f"o{i}" for i in range(4)),
        table,
    )
    state_body = bloch_ball(basis)
    effect_body = matrix_interval(basis)
    state_basis = np.array([coords(s) for s in states])
    effect_basis = np.array([coords(e) for e in effects])
    pair = DualPair(4, 4, state_basis, effect_basis, np.eye(4, dtype=complex))
    engine = NormEngine(
        pair,
        state_body,
        effect_body,
        matrix_basis=basis,
        unit_effect=coords(np.eye(2, dtype=complex)),
    )
    alg = from_matrix_basis(basis, engine, coords(np.eye(2, dtype=complex)), support_rule="range")
    star = StarAlgebraModel(alg, np.eye(4, dtype=complex))
    return TheoryInstance(
        name="qubit",
        stats=stats,
        state_body=state_body,
        effect_body=effect_body,
        engine=engine,
        algebra=alg,
        star=star,
        expected=dict(_ALL_PASS),
    )


def gbit() -> TheoryInstance:
    """The gbit (square-state-space) counter-model.

    States live on the square with coordinates ``(1, x, y)``; the effect
    body is spanned by zero, the unit effect ``(1, 0, 0)`` and the four
    half-plane effects ``(1/2, +-1/2, 0)``, ``(1/2, 0, +-1/2)``.  The
    candidate product is coordinatewise.  Multiplication operators then
    shrink: right multiplication by a half-plane effect has operator norm
    1/2 against effect norm 1, so the regular representation is not
    isometric and ``||f* f|| = 1/2 < 1 = ||f||^2`` breaks the C*-identity.
    Support projections are not defined for this model.
    """
    states = np.array([[1.0, s, t] for s in (1.0, -1.0) for t in (1.0, -1.0)], dtype=complex)
    unit_effect = np.array([1.0, 0.0, 0.0], dtype=complex)
    frame = np.array(
        [
            [0.5, 0.5, 0.0],
            [0.5, -0.5, 0.0],
            [0.5, 0.0, 0.5],
            [0.5, 0.0, -0.5],
        ],
        dtype=complex,
    )
    table = np.real(np.conj(states) @ frame.T)
    stats = OperationalStatistics(
        ("p++", "p+-", "p-+", "p--"),
        ("x+", "x-", "y+", "y-"),
        table,
    )
    state_body = polytope(states, assume_minimal=True)
    effect_vertices = np.vstack([np.zeros((1, 3), dtype=complex), [unit_effect], frame])
    effect_body = polytope(effect_vertices, assume_minimal=True)
    pair = DualPair(3, 3, states, frame, np.eye(3, dtype=complex))
    engine = NormEngine(pair, state_body, effect_body, unit_effect=unit_effect)
    alg = pointwise_algebra(3, engine, support_rule=None)
    star = StarAlgebraModel(alg, np.eye(3, dtype=complex))
    expected = dict(_ALL_PASS)
    expected["isometry"] = FAIL
    expected["cstar-identity"] = FAIL
    expected["support-norm-equality"] = NOT_APPLICABLE
    return TheoryInstance(
        name="gbit",
        stats=stats,
        state_body=state_body,
        effect_body=effect_body,
        engine=engine,
        algebra=alg,
        star=star,
        expected=expected,
        witnesses={"cstar-identity": np.array([0.5, 0.5, 0.0], dtype=complex)},
    )


def builtin_names() -> list[str]:
    """Names accepted by :func:`get_builtin`."""
    return ["classical:<n>", "qubit", "gbit"]


def get_builtin(name: str) -> TheoryInstance:
    """Instantiate a built-in model from its name."""
    name = name.strip()
    if name == "qubit":
        return qubit()
    if name == "gbit":
        return gbit()
    if name.startswith("classical:"):
        tail = name.split(":", 1)[1]
        try:
            n = int(tail)
        except ValueError:
            raise UnsupportedModelError(f"bad classical dimension {tail!r}") from None
        return classical(n)
    raise UnsupportedModelError(
        f"unknown builtin {name!r}; available: {', '.join(builtin_names())}"
    )


def noisy_sample(instance: TheoryInstance, shots: int, seed: int = 0) -> OperationalStatistics:
    """Finite-shot simulation of an instance's table.

    Every cell is an independent binomial estimate from ``shots`` trials,
    so identical seeds reproduce identical tables.
    """
    if shots < 1:
        raise SizeError(f"shots must be >= 1, got {shots}")
    rng = np.random.default_rng(seed)
    table = instance.stats.table
    counts = rng.binomial(shots, table)
    return OperationalStatistics(
        instance.stats.prep_labels,
        instance.stats.outcome_labels,
        counts.astype(float) / float(shots),
    )
