"""Dual pair of state and effect spaces spanned by a statistics table.

A separated table defines two families of vectors — ensembles (rows) and
effects (columns) — together with a bilinear evaluation that reproduces the
table.  We embed both families into coordinate spaces of the table's
numerical rank, so the pairing between them is nondegenerate by
construction and every table entry is recovered exactly by
``pairing(state_basis[i], effect_basis[j])``.

The pairing is sesquilinear: conjugate-linear in the state slot, linear in
the effect slot.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass, field
from typing import Any

import numpy as np
from scipy.optimize import linprog

from .errors import (
    DimensionMismatchError,
    DomainError,
    RankDeficiencyError,
    WeightError,
)
from .operational import OperationalStatistics, check_separation

BODY_KINDS = ("polytope", "bloch-ball", "matrix-interval")


@dataclass(frozen=True)
class ConvexBody:
    """A convex subset of a coordinate space.

    ``polytope`` bodies carry their vertices explicitly; ``bloch-ball`` and
    ``matrix-interval`` bodies are described in closed form by a matrix
    basis stored in ``descriptor`` (coordinates are taken with respect to
    that basis).
    """

    kind: str
    dim: int
    vertices: np.ndarray | None = field(default=None, repr=False)
    descriptor: dict[str, Any] | None = field(default=None, repr=False)

    def __post_init__(self) -> None:
        if self.kind not in BODY_KINDS:
            raise DomainError(f"unknown body kind {self.kind!r}")
        if self.kind == "polytope":
            if self.vertices is None or self.vertices.ndim != 2 or self.vertices.shape[0] == 0:
                raise DomainError("polytope body requires a non-empty (k, dim) vertex array")
            if self.vertices.shape[1] != self.dim:
                raise DimensionMismatchError(
                    f"vertices of width {self.vertices.shape[1]} in a dim-{self.dim} body"
                )
        else:
            if self.descriptor is None or "basis" not in self.descriptor:
                raise DomainError(f"{self.kind} body requires a matrix basis descriptor")
            basis = self.descriptor["basis"]
            if basis.shape[0] != self.dim:
                raise DimensionMismatchError(
                    f"matrix basis of size {basis.shape[0]} in a dim-{self.dim} body"
                )


def polytope(points: np.ndarray, assume_minimal: bool = False) -> ConvexBody:
    """Convex hull of finitely many points, stored by its extreme points.

    With ``assume_minimal`` the points are trusted to be vertices already;
    otherwise points expressible as convex mixtures of the others are
    pruned (linear programming feasibility per point).
    """
    pts = np.atleast_2d(np.asarray(points))
    if pts.shape[0] == 0:
        raise DomainError("polytope needs at least one point")
    if not assume_minimal and pts.shape[0] > 1:
        keep: list[int] = []
        for i in range(pts.shape[0]):
            others = np.delete(pts, i, axis=0)
            if not _in_hull(others, pts[i], tol=1e-9):
                keep.append(i)
        if not keep:  # all points coincide
            keep = [0]
        pts = pts[keep]
    return ConvexBody("polytope", pts.shape[1], vertices=pts)


def bloch_ball(basis: np.ndarray, radius: float = 1.0) -> ConvexBody:
    """All 2x2 density matrices (Bloch vectors of length <= radius), in the
    coordinates of ``basis``."""
    return ConvexBody("bloch-ball", basis.shape[0], descriptor={"basis": basis, "radius": radius})


def matrix_interval(basis: np.ndarray) -> ConvexBody:
    """Hermitian matrices between 0 and the identity, in the coordinates of
    ``basis``."""
    return ConvexBody("matrix-interval", basis.shape[0], descriptor={"basis": basis})


@dataclass(frozen=True)
class DualPair:
    """Finite-dimensional pairing between a state span and an effect span.

    ``state_basis`` (rows: embedded ensembles) and ``effect_basis`` (rows:
    embedded effects) are the marked families the table produced; the spans
    are full coordinate spaces of dimension ``state_dim`` / ``effect_dim``.
    """

    state_dim: int
    effect_dim: int
    state_basis: np.ndarray = field(repr=False)
    effect_basis: np.ndarray = field(repr=False)
    pairing_matrix: np.ndarray = field(repr=False)

    def __post_init__(self) -> None:
        if self.state_basis.shape[1] != self.state_dim:
            raise DimensionMismatchError("state basis width != state_dim")
        if self.effect_basis.shape[1] != self.effect_dim:
            raise DimensionMismatchError("effect basis width != effect_dim")
        if self.pairing_matrix.shape != (self.state_dim, self.effect_dim):
            raise DimensionMismatchError(
                f"pairing matrix shape {self.pairing_matrix.shape} != "
                f"({self.state_dim}, {self.effect_dim})"
            )


def pairing(pair: DualPair, state: np.ndarray, effect: np.ndarray) -> complex:
    """Evaluate ``<state|effect>``; conjugate-linear in the state slot."""
    state = np.asarray(state)
    effect = np.asarray(effect)
    if state.shape != (pair.state_dim,):
        raise DimensionMismatchError(f"state has shape {state.shape}, expected ({pair.state_dim},)")
    if effect.shape != (pair.effect_dim,):
        raise DimensionMismatchError(f"effect has shape {effect.shape}, expected ({pair.effect_dim},)")
    return complex(np.conj(state) @ pair.pairing_matrix @ effect)


def pairing_batch(pair: DualPair, states: np.ndarray, effects: np.ndarray) -> np.ndarray:
    """All pairings between rows of ``states`` and rows of ``effects``."""
    return np.conj(states) @ pair.pairing_matrix @ effects.T


def embed_theory(
    stats: OperationalStatistics, tol: float = 1e-9
) -> tuple[DualPair, ConvexBody, ConvexBody]:
    """Embed a separated table into a dual pair plus its two convex bodies.

    The table ``R`` is factored through its numerical rank r (singular
    values above ``tol`` times the largest): rows embed as
    ``U_r sqrt(S_r)``, columns as ``V_r sqrt(S_r)``, and the pairing matrix
    is the r-by-r identity.  The factorisation reproduces every table entry
    to machine precision and makes the pairing nondegenerate on the spans.
    """
    if not check_separation(stats, tol):
        raise DomainError("statistics must be quotiented before embedding")
    table = stats.table
    u, s, vt = np.linalg.svd(table, full_matrices=False)
    if s.size == 0 or s[0] <= 0.0:
        raise RankDeficiencyError("statistics table is numerically zero")
    rank = int(np.sum(s > tol * s[0]))
    if rank == 0:
        raise RankDeficiencyError("statistics table has numerical rank zero")
    root = np.sqrt(s[:rank])
    state_basis = (u[:, :rank] * root).astype(complex)
    effect_basis = (vt[:rank, :].T * root).astype(complex)
    pair = DualPair(rank, rank, state_basis, effect_basis, np.eye(rank, dtype=complex))
    state_body = polytope(state_basis)
    effect_body = polytope(effect_basis)
    return pair, state_body, effect_body


def check_nondegenerate(pair: DualPair, tol: float = 1e-9) -> bool:
    """True iff the pairing matrix has full rank relative to ``tol``."""
    s = np.linalg.svd(pair.pairing_matrix, compute_uv=False)
    if s.size == 0 or s[0] <= 0.0:
        return False
    return pair.state_dim == pair.effect_dim and bool(s[-1] > tol * s[0])


def mix(points: np.ndarray, weights: np.ndarray) -> np.ndarray:
    """Convex combination of the rows of ``points``."""
    points = np.atleast_2d(np.asarray(points))
    weights = np.asarray(weights, dtype=float)
    if weights.ndim != 1 or weights.shape[0] != points.shape[0]:
        raise WeightError(f"{weights.shape} weights for {points.shape[0]} points")
    if weights.min() < -1e-12:
        raise WeightError(f"negative mixture weight {weights.min():.3g}")
    total = weights.sum()
    if abs(total - 1.0) > 1e-9:
        raise WeightError(f"mixture weights sum to {total:.12g}, expected 1")
    return weights @ points


def _in_hull(vertices: np.ndarray, point: np.ndarray, tol: float) -> bool:
    """LP feasibility: is ``point`` a convex combination of ``vertices``?"""
    k = vertices.shape[0]
    if k == 0:
        return False
    # fast path: coincides with a vertex
    if np.abs(vertices - point).max(axis=1).min() <= tol:
        return True
    # stack real and imaginary parts; weights are real
    a_eq = np.vstack(
        [np.real(vertices.T), np.imag(vertices.T), np.ones((1, k))]
    )
    b_eq = np.concatenate([np.real(point), np.imag(point), [1.0]])
    res = linprog(
        c=np.zeros(k),
        A_eq=a_eq,
        b_eq=b_eq,
        bounds=[(0, None)] * k,
        method="highs",
    )
    if not res.success:
        return False
    recon = res.x @ vertices
    return bool(np.abs(recon - point).max() <= max(tol, 1e-7))


def membership(body: ConvexBody, point: np.ndarray, tol: float = 1e-9) -> bool:
    """Decide whether ``point`` lies in ``body`` (up to ``tol``)."""
    point = np.asarray(point)
    if point.shape != (body.dim,):
        raise DimensionMismatchError(f"point of shape {point.shape} in a dim-{body.dim} body")
    if body.kind == "polytope":
        return _in_hull(body.vertices, point.astype(complex), tol)

    basis = body.descriptor["basis"]
    mat = np.tensordot(point, basis, axes=([0], [0]))
    herm = 0.5 * (mat + mat.conj().T)
    if np.abs(mat - herm).max() > max(tol, 1e-9):
        return False
    eigs = np.linalg.eigvalsh(herm)
    if body.kind == "bloch-ball":
        radius = body.descriptor.get("radius", 1.0)
        if abs(np.trace(herm).real - 1.0) > max(tol, 1e-9):
            return False
        # trace-one qubit state: eigenvalues (1 +- |bloch|)/2
        bloch_len = float(eigs.max() - eigs.min())
        return bloch_len <= radius + max(tol, 1e-9)
    # matrix-interval: 0 <= M <= 1
    return bool(eigs.min() >= -max(tol, 1e-9) and eigs.max() <= 1.0 + max(tol, 1e-9))


def hypercube_vertices(dim: int) -> np.ndarray:
    """All 0/1 vectors of length ``dim`` in lexicographic order."""
    return np.array(list(itertools.product((0.0, 1.0), repeat=dim)))
