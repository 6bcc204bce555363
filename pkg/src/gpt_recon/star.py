"""Involutions, C*-identity checks and support projections.

The involution on the effect span is an antilinear map ``x -> M conj(x)``
compatible with the product: ``(TS)^dagger = S^dagger T^dagger``.  Adjoints
of operators are taken with respect to the pairing, and the battery's
centrepiece — ``||T^dagger T|| = ||T||^2`` — distinguishes the models that
carry genuine operator-algebra structure from those that cannot.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .algebra import AlgebraModel, product
from .errors import (
    DegeneratePairingError,
    DimensionMismatchError,
    DomainError,
    UnsupportedModelError,
)
from .norms import effect_norm, effect_norms, sample_span, state_norm
from .report import FAIL, PASS, StageResult, vector_payload


@dataclass(frozen=True)
class StarAlgebraModel:
    """An algebra together with an antilinear involution.

    The involution acts on coordinates as ``x -> involution_matrix @
    conj(x)``; for models whose coordinates are taken in a Hermitian
    matrix basis this is exactly the conjugate transpose.
    """

    base: AlgebraModel
    involution_matrix: np.ndarray = field(repr=False)

    def __post_init__(self) -> None:
        n = self.base.dim
        if self.involution_matrix.shape != (n, n):
            raise DimensionMismatchError("involution matrix must be square of algebra dim")
        # an involution composed with itself is the identity
        m = self.involution_matrix
        if np.abs(m @ np.conj(m) - np.eye(n)).max() > 1e-12:
            raise DomainError("involution matrix does not square to the identity (antilinearly)")

    @property
    def dim(self) -> int:
        return self.base.dim


def involve(model: StarAlgebraModel, x: np.ndarray) -> np.ndarray:
    """Apply the involution to an effect-span element."""
    x = np.asarray(x, dtype=complex)
    if x.shape != (model.dim,):
        raise DimensionMismatchError(f"element must have shape ({model.dim},)")
    return model.involution_matrix @ np.conj(x)


def adjoint(model: StarAlgebraModel, op_matrix: np.ndarray) -> np.ndarray:
    """Pairing adjoint of an operator on the span.

    Defined by ``<A omega | E> = <omega | T E>`` for all states and
    effects; with pairing matrix P this is ``P^-H T^H P^H``, the plain
    conjugate transpose whenever P is the identity.
    """
    op_matrix = np.asarray(op_matrix, dtype=complex)
    p = model.base.norm_engine.pair.pairing_matrix
    if p.shape[0] != p.shape[1]:
        raise DegeneratePairingError("pairing adjoint requires a square pairing matrix")
    if op_matrix.shape != p.shape:
        raise DimensionMismatchError("operator matrix does not match the pairing dimension")
    s = np.linalg.svd(p, compute_uv=False)
    if s[-1] <= 1e-12 * s[0]:
        raise DegeneratePairingError("pairing matrix is too ill-conditioned to invert")
    ph = p.conj().T
    return np.linalg.solve(ph, op_matrix.conj().T @ ph)


def check_involution_laws(
    model: StarAlgebraModel, samples: int = 1000, seed: int = 0, tol: float = 1e-12
) -> StageResult:
    """Verify antilinearity, product reversal and involutivity on random
    triples, coordinatewise to machine precision."""
    rng = np.random.default_rng(seed)
    n = model.dim
    t = sample_span(rng, n, samples)
    s = sample_span(rng, n, samples)
    lam = rng.standard_normal(samples) + 1j * rng.standard_normal(samples)
    mu = rng.standard_normal(samples) + 1j * rng.standard_normal(samples)

    m = model.involution_matrix
    inv_t = (m @ np.conj(t).T).T
    inv_s = (m @ np.conj(s).T).T

    # (lam T + mu S)^dagger = conj(lam) T^dagger + conj(mu) S^dagger
    combo = (m @ np.conj(lam[:, None] * t + mu[:, None] * s).T).T
    anti = np.abs(combo - (np.conj(lam)[:, None] * inv_t + np.conj(mu)[:, None] * inv_s))

    # (T S)^dagger = S^dagger T^dagger
    ts = np.einsum("ki,kj,ijl->kl", t, s, model.base.structure)
    lhs = (m @ np.conj(ts).T).T
    rhs = np.einsum("ki,kj,ijl->kl", inv_s, inv_t, model.base.structure)
    reversal = np.abs(lhs - rhs)

    # (T^dagger)^dagger = T
    double = (m @ np.conj(inv_t).T).T
    idem = np.abs(double - t)

    scale = max(1.0, float(np.abs(ts).max()), float(np.abs(t).max()), float(np.abs(s).max()))
    residual = float(max(anti.max(), reversal.max(), idem.max()) / scale)
    verdict = PASS if residual <= tol else FAIL
    witness = None
    if verdict == FAIL:
        worst = int(np.unravel_index(np.argmax(reversal), reversal.shape)[0])
        witness = {"T": vector_payload(t[worst]), "S": vector_payload(s[worst])}
    return StageResult(
        "involution",
        verdict,
        residual,
        witness=witness,
        detail={
            "antilinearity_residual": float(anti.max() / scale),
            "product_reversal_residual": float(reversal.max() / scale),
            "involutivity_residual": float(idem.max() / scale),
        },
    )


def check_cstar_identity(
    model: StarAlgebraModel, samples: int = 1000, seed: int = 0, tol: float = 1e-9
) -> StageResult:
    """Check ``||T^dagger T|| = ||T||^2`` on random span elements plus the
    effect-body probes, with residuals relative to ``max(1, ||T||^2)``."""
    rng = np.random.default_rng(seed)
    alg = model.base
    t = sample_span(rng, alg.dim, samples)
    body = alg.norm_engine.effect_body
    if body.kind == "polytope":
        k = min(body.vertices.shape[0], samples)
        t[:k] = body.vertices[:k]
    inv_t = (model.involution_matrix @ np.conj(t).T).T
    prods = np.einsum("ki,kj,ijl->kl", inv_t, t, alg.structure)
    lhs = effect_norms(alg.norm_engine, prods)
    norms = effect_norms(alg.norm_engine, t)
    rel = np.abs(lhs - norms**2) / np.maximum(1.0, norms**2)
    worst = int(np.argmax(rel))
    residual = float(rel[worst])
    verdict = PASS if residual <= tol else FAIL
    witness = None
    if verdict == FAIL:
        witness = {
            "T": vector_payload(t[worst]),
            "norm_T_dagger_T": float(lhs[worst]),
            "norm_T_squared": float(norms[worst] ** 2),
            "violation": float(abs(lhs[worst] - norms[worst] ** 2)),
        }
    return StageResult("cstar-identity", verdict, residual, witness=witness)


@dataclass(frozen=True)
class SupportResult:
    """A state, its support projection, and the two norms whose equality
    the battery checks."""

    state: np.ndarray = field(repr=False)
    projection: np.ndarray = field(repr=False)
    state_norm_value: float = 0.0
    effect_norm_value: float = 0.0


def support_projection(model: StarAlgebraModel, state: np.ndarray, tol: float = 1e-9) -> SupportResult:
    """Smallest projection in the span that the state 'sees' fully.

    Matrix models: the range projection of the density-matrix
    representative.  Pointwise function models: the indicator of the
    coordinates where the state is non-zero.  Models without a support
    rule raise :class:`UnsupportedModelError`.
    """
    alg = model.base
    state = np.asarray(state, dtype=complex)
    if state.shape != (alg.dim,):
        raise DimensionMismatchError(f"state must have shape ({alg.dim},)")
    if alg.support_rule == "range":
        basis = alg.matrix_basis
        d = basis.shape[1]
        mat = np.tensordot(state, basis, axes=([0], [0]))
        herm = 0.5 * (mat + mat.conj().T)
        if np.abs(mat - herm).max() > max(tol, 1e-9) * max(1.0, np.abs(mat).max()):
            raise DomainError("support projection requires a Hermitian state representative")
        eigs, vecs = np.linalg.eigh(herm)
        keep = np.abs(eigs) > max(tol, 1e-9) * max(1.0, float(np.abs(eigs).max()))
        proj = (vecs[:, keep] @ vecs[:, keep].conj().T) if keep.any() else np.zeros((d, d))
        flat = basis.reshape(alg.dim, d * d)
        gram = flat.conj() @ flat.T
        proj_coords = np.linalg.solve(gram, flat.conj() @ proj.ravel())
    elif alg.support_rule == "indicator":
        proj_coords = (np.abs(state) > max(tol, 1e-9) * max(1.0, float(np.abs(state).max()))).astype(
            complex
        )
    else:
        raise UnsupportedModelError("this model does not define support projections")
    return SupportResult(
        state=state,
        projection=proj_coords,
        state_norm_value=state_norm(alg.norm_engine, state),
        effect_norm_value=effect_norm(alg.norm_engine, proj_coords),
    )


def check_support_norms(
    model: StarAlgebraModel, states: np.ndarray, tol: float = 1e-9
) -> StageResult:
    """Verify that each state's norm equals the norm of its support
    projection's effect column — the hallmark of normalised states whose
    support carries all their weight."""
    residual = 0.0
    witness = None
    for state in np.atleast_2d(np.asarray(states, dtype=complex)):
        result = support_projection(model, state, tol)
        gap = abs(result.state_norm_value - result.effect_norm_value)
        if gap > residual:
            residual = gap
            witness = {
                "state": vector_payload(state),
                "state_norm": result.state_norm_value,
                "support_effect_norm": result.effect_norm_value,
            }
    verdict = PASS if residual <= tol else FAIL
    return StageResult(
        "support-norm-equality",
        verdict,
        float(residual),
        witness=witness if verdict == FAIL else None,
    )


def check_predual_duality(model: StarAlgebraModel, tol: float = 1e-9) -> StageResult:
    """Finite-dimensional stand-in for 'the algebra is a dual space': the
    state span and the algebra have equal dimension and the pairing between
    them is nondegenerate."""
    engine = model.base.norm_engine
    pair = engine.pair
    body = engine.state_body
    if body.kind == "polytope":
        state_span_dim = int(np.linalg.matrix_rank(body.vertices, tol=1e-9))
    else:
        state_span_dim = pair.state_dim  # closed-form bodies span everything
    s = np.linalg.svd(pair.pairing_matrix, compute_uv=False)
    nondegenerate = s.size > 0 and s[0] > 0 and bool(s[-1] > tol * s[0])
    dims_equal = state_span_dim == model.base.dim
    verdict = PASS if (dims_equal and nondegenerate) else FAIL
    residual = 0.0 if verdict == PASS else float(
        max(abs(state_span_dim - model.base.dim), 1.0 if not nondegenerate else 0.0)
    )
    return StageResult(
        "predual-duality",
        verdict,
        residual,
        detail={
            "state_span_dim": state_span_dim,
            "algebra_dim": model.base.dim,
            "pairing_sigma_min": float(s[-1]) if s.size else 0.0,
            "pairing_sigma_max": float(s[0]) if s.size else 0.0,
        },
    )
