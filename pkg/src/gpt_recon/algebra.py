"""Banach-algebra structure on the effect span.

A product on the span turns every element into two multiplication
operators, ``L_E: F -> E F`` and ``R_F: E -> E F``.  Operator norms are
taken as suprema of the effect norm over the effect body, which is exactly
what makes the regular representation isometric for well-behaved models
and lets badly behaved ones fail visibly.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np
from scipy.optimize import minimize

from .errors import (
    DimensionMismatchError,
    DomainError,
    NotAProjectionError,
    ReconstructionError,
    UnsupportedModelError,
)
from .norms import (
    NormEngine,
    effect_norm,
    effect_norms,
    effect_probe_points,
    rank_one_coords,
    sample_span,
)
from .report import FAIL, PASS, StageResult, vector_payload

SIDES = ("left", "right")


@dataclass(frozen=True)
class AlgebraModel:
    """A finite-dimensional unital algebra carried by the effect span.

    ``structure[i, j, :]`` holds the coordinates of ``e_i e_j``.  The unit
    is the algebra unit (for function algebras the all-ones vector), which
    need not coincide with the model's unit *effect* stored on the norm
    engine.  ``support_rule`` selects how support projections of states are
    formed: ``"range"`` for matrix models, ``"indicator"`` for pointwise
    function models, ``None`` when the notion is undefined.
    """

    dim: int
    structure: np.ndarray = field(repr=False)
    unit: np.ndarray = field(repr=False)
    norm_engine: NormEngine
    matrix_basis: np.ndarray | None = field(default=None, repr=False)
    support_rule: str | None = None

    def __post_init__(self) -> None:
        if self.structure.shape != (self.dim, self.dim, self.dim):
            raise DimensionMismatchError(
                f"structure tensor shape {self.structure.shape} != ({self.dim},) * 3"
            )
        if self.unit.shape != (self.dim,):
            raise DimensionMismatchError("unit vector has the wrong length")
        if self.norm_engine.pair.effect_dim != self.dim:
            raise DimensionMismatchError("norm engine effect span does not match algebra dim")
        if self.support_rule not in (None, "range", "indicator"):
            raise DomainError(f"unknown support rule {self.support_rule!r}")
        # the unit must actually be a unit, on basis vectors
        eye = np.eye(self.dim)
        left = np.einsum("i,ijl->jl", self.unit.astype(complex), self.structure)
        right = np.einsum("j,ijl->il", self.unit.astype(complex), self.structure)
        if np.abs(left - eye).max() > 1e-9 or np.abs(right - eye).max() > 1e-9:
            raise DomainError("declared unit does not act as identity on the span")


@dataclass(frozen=True)
class MultOperator:
    """Left or right multiplication by a fixed element, as a matrix on
    effect coordinates."""

    side: str
    element: np.ndarray = field(repr=False)
    matrix: np.ndarray = field(repr=False)

    def __post_init__(self) -> None:
        if self.side not in SIDES:
            raise DomainError(f"operator side must be one of {SIDES}")
        n = self.element.shape[0]
        if self.matrix.shape != (n, n):
            raise DimensionMismatchError("multiplication matrix must be square of element size")


def product(alg: AlgebraModel, x: np.ndarray, y: np.ndarray) -> np.ndarray:
    """Algebra product of two coordinate vectors."""
    x = np.asarray(x, dtype=complex)
    y = np.asarray(y, dtype=complex)
    if x.shape != (alg.dim,) or y.shape != (alg.dim,):
        raise DimensionMismatchError(f"product arguments must have shape ({alg.dim},)")
    return np.einsum("i,j,ijl->l", x, y, alg.structure)


def from_matrix_basis(
    basis: np.ndarray, norm_engine: NormEngine, unit_coords: np.ndarray, support_rule: str | None = "range"
) -> AlgebraModel:
    """Build the structure tensor of matrix multiplication in a matrix basis.

    The span of ``basis`` must be closed under the matrix product; a
    residual above 1e-9 in the re-expansion of any ``B_i B_j`` raises.
    """
    k, d, _ = basis.shape
    flat = basis.reshape(k, d * d)
    gram = flat.conj() @ flat.T
    prods = np.einsum("iab,jbc->ijac", basis, basis).reshape(k * k, d * d)
    coeffs = np.linalg.solve(gram, flat.conj() @ prods.T).T
    recon = coeffs @ flat
    if np.abs(recon - prods).max() > 1e-9:
        raise ReconstructionError("matrix span is not closed under multiplication")
    structure = coeffs.reshape(k, k, k)
    return AlgebraModel(
        dim=k,
        structure=structure,
        unit=np.asarray(unit_coords, dtype=complex),
        norm_engine=norm_engine,
        matrix_basis=basis,
        support_rule=support_rule,
    )


def pointwise_algebra(
    dim: int, norm_engine: NormEngine, support_rule: str | None = "indicator"
) -> AlgebraModel:
    """Coordinatewise product: the function algebra on ``dim`` points."""
    structure = np.zeros((dim, dim, dim), dtype=complex)
    idx = np.arange(dim)
    structure[idx, idx, idx] = 1.0
    return AlgebraModel(
        dim=dim,
        structure=structure,
        unit=np.ones(dim, dtype=complex),
        norm_engine=norm_engine,
        support_rule=support_rule,
    )


def mult_operator(alg: AlgebraModel, side: str, element: np.ndarray) -> MultOperator:
    """Matrix of ``L_element`` or ``R_element`` on effect coordinates."""
    element = np.asarray(element, dtype=complex)
    if element.shape != (alg.dim,):
        raise DimensionMismatchError(f"element must have shape ({alg.dim},)")
    if side == "left":
        matrix = np.einsum("i,ijl->lj", element, alg.structure)
    elif side == "right":
        matrix = np.einsum("i,jil->lj", element, alg.structure)
    else:
        raise DomainError(f"operator side must be one of {SIDES}")
    return MultOperator(side=side, element=element, matrix=matrix)


def operator_norm(alg: AlgebraModel, op: MultOperator | np.ndarray) -> float:
    """Norm of an operator on the effect span: sup of ``||T E||`` over the
    effect body.

    Polytope bodies: the sup of a convex function is attained at a vertex,
    so the maximum over vertices is exact.  Matrix-interval bodies: the
    extreme points are projections; the cached probe grid (0, 1 and a
    rank-one sweep) is evaluated in one batch and the best rank-one point
    is polished with a local search.
    """
    matrix = op.matrix if isinstance(op, MultOperator) else np.asarray(op, dtype=complex)
    if matrix.shape != (alg.dim, alg.dim):
        raise DimensionMismatchError("operator matrix has the wrong shape")
    engine = alg.norm_engine
    body = engine.effect_body
    if body.kind not in ("polytope", "matrix-interval"):
        raise UnsupportedModelError(f"operator norms undefined over body kind {body.kind!r}")
    probes = effect_probe_points(engine)
    values = effect_norms(engine, probes @ matrix.T)
    best = float(values.max())
    if body.kind == "polytope":
        return best

    # polish the best rank-one grid point (the grid tail holds 0 and 1)
    n_grid = probes.shape[0] - 2
    idx = int(values[:n_grid].argmax())
    theta0 = np.linspace(0.0, np.pi, 25)[idx // 48]
    phi0 = np.linspace(0.0, 2 * np.pi, 48, endpoint=False)[idx % 48]

    def image_norm(params: np.ndarray) -> float:
        return effect_norm(engine, matrix @ rank_one_coords(engine, params[0], params[1]))

    res = minimize(
        lambda p: -image_norm(p),
        x0=np.array([theta0, phi0]),
        method="Nelder-Mead",
        options={"maxiter": 80, "xatol": 1e-6, "fatol": 1e-12},
    )
    return float(max(best, -res.fun))


# ---------------------------------------------------------------------------
# axiom checks


def check_submultiplicative(
    alg: AlgebraModel, samples: int = 1000, seed: int = 0, tol: float = 1e-9
) -> StageResult:
    """Check ``||E F|| <= ||E|| ||F||`` on random pairs plus body vertices."""
    rng = np.random.default_rng(seed)
    e = sample_span(rng, alg.dim, samples)
    f = sample_span(rng, alg.dim, samples)
    body = alg.norm_engine.effect_body
    if body.kind == "polytope" and body.vertices.shape[0] >= 2:
        k = min(body.vertices.shape[0], samples)
        e[:k] = body.vertices[:k]
        f[:k] = body.vertices[np.arange(1, k + 1) % body.vertices.shape[0]]
    prods = np.einsum("ki,kj,ijl->kl", e, f, alg.structure)
    viol = effect_norms(alg.norm_engine, prods) - effect_norms(alg.norm_engine, e) * effect_norms(
        alg.norm_engine, f
    )
    worst = int(np.argmax(viol))
    residual = float(max(viol[worst], 0.0))
    verdict = PASS if residual <= tol else FAIL
    witness = None
    if verdict == FAIL:
        witness = {
            "E": vector_payload(e[worst]),
            "F": vector_payload(f[worst]),
            "violation": float(viol[worst]),
        }
    return StageResult("submultiplicativity", verdict, residual, witness=witness)


def check_uniform_bound(
    alg: AlgebraModel, samples: int = 200, seed: int = 0, tol: float = 1e-9
) -> StageResult:
    """Check ``sup_F ||R_F|| / ||F|| <= 1`` on random elements and vertices.

    Elements with ``||F|| < tol`` are skipped (the ratio is undefined);
    the number skipped is reported.
    """
    rng = np.random.default_rng(seed)
    f = sample_span(rng, alg.dim, samples)
    body = alg.norm_engine.effect_body
    extra = [np.asarray(alg.unit, dtype=complex)]
    if alg.norm_engine.unit_effect is not None:
        extra.append(np.asarray(alg.norm_engine.unit_effect, dtype=complex))
    if body.kind == "polytope":
        extra.extend(np.asarray(body.vertices, dtype=complex))
    candidates = np.vstack([f, np.array(extra)])
    norms = effect_norms(alg.norm_engine, candidates)
    stat = 0.0
    worst_vec: np.ndarray | None = None
    skipped = 0
    for vec, n in zip(candidates, norms):
        if n < tol:
            skipped += 1
            continue
        ratio = operator_norm(alg, mult_operator(alg, "right", vec)) / n
        if ratio > stat:
            stat, worst_vec = ratio, vec
    residual = float(max(stat - 1.0, 0.0))
    verdict = PASS if residual <= tol else FAIL
    witness = None
    if verdict == FAIL and worst_vec is not None:
        witness = {"F": vector_payload(worst_vec), "ratio": float(stat)}
    return StageResult(
        "uniform-bound",
        verdict,
        residual,
        witness=witness,
        detail={"sup_ratio": float(stat), "skipped_small_norm": skipped},
    )


def check_isometry(
    alg: AlgebraModel, samples: int = 200, seed: int = 0, tol: float = 1e-8
) -> StageResult:
    """Check ``||R_E|| = ||E|| = ||L_E||`` on random elements and vertices."""
    rng = np.random.default_rng(seed)
    elems = sample_span(rng, alg.dim, samples)
    body = alg.norm_engine.effect_body
    if body.kind == "polytope":
        elems = np.vstack([np.asarray(body.vertices, dtype=complex), elems])
    norms = effect_norms(alg.norm_engine, elems)
    residual = 0.0
    witness = None
    for vec, n in zip(elems, norms):
        r = operator_norm(alg, mult_operator(alg, "right", vec))
        l = operator_norm(alg, mult_operator(alg, "left", vec))
        gap = max(abs(r - n), abs(l - n))
        if gap > residual:
            residual = gap
            witness = {
                "E": vector_payload(vec),
                "norm": float(n),
                "right_operator_norm": float(r),
                "left_operator_norm": float(l),
            }
    verdict = PASS if residual <= tol else FAIL
    return StageResult(
        "isometry", verdict, float(residual), witness=witness if verdict == FAIL else None
    )


def detect_projections(
    alg: AlgebraModel, candidates: np.ndarray, tol: float = 1e-9
) -> list[np.ndarray]:
    """Return the candidates that are idempotent within tolerance."""
    found = []
    for c in np.atleast_2d(np.asarray(candidates, dtype=complex)):
        resid = effect_norm(alg.norm_engine, product(alg, c, c) - c)
        scale = max(1.0, effect_norm(alg.norm_engine, c) ** 2)
        if resid <= tol * scale:
            found.append(c)
    return found


def is_projection(alg: AlgebraModel, element: np.ndarray, tol: float = 1e-9) -> bool:
    return len(detect_projections(alg, np.asarray(element)[None, :], tol)) == 1


def complement(alg: AlgebraModel, element: np.ndarray) -> np.ndarray:
    """The effect answering "no" exactly when ``element`` answers "yes".

    Formed against the model's unit effect, which represents certainty; on
    normalised states ``<omega|unit - E> = 1 - <omega|E>``.
    """
    element = np.asarray(element, dtype=complex)
    if element.shape != (alg.dim,):
        raise DimensionMismatchError(f"element must have shape ({alg.dim},)")
    unit = alg.norm_engine.unit_effect
    if unit is None:
        unit = alg.unit
    return np.asarray(unit, dtype=complex) - element


def check_projections(
    alg: AlgebraModel, samples: int = 200, seed: int = 0, tol: float = 1e-9
) -> StageResult:
    """Detect projections among body vertices (plus the units) and verify
    the family behaves: idempotence residuals, closure under complement,
    and complement pairing arithmetic on marked states."""
    body = alg.norm_engine.effect_body
    candidates = [np.asarray(alg.unit, dtype=complex), np.zeros(alg.dim, dtype=complex)]
    if alg.norm_engine.unit_effect is not None:
        candidates.append(np.asarray(alg.norm_engine.unit_effect, dtype=complex))
    if body.kind == "polytope":
        candidates.extend(np.asarray(body.vertices, dtype=complex))
    else:
        # spectral projections of random Hermitian span elements
        rng = np.random.default_rng(seed)
        basis = alg.matrix_basis
        d = basis.shape[1]
        flat = basis.reshape(alg.dim, d * d)
        gram = flat.conj() @ flat.T
        for _ in range(min(samples, 32)):
            g = rng.standard_normal((d, d)) + 1j * rng.standard_normal((d, d))
            herm = 0.5 * (g + g.conj().T)
            _, vecs = np.linalg.eigh(herm)
            proj = np.outer(vecs[:, -1], vecs[:, -1].conj())
            candidates.append(np.linalg.solve(gram, flat.conj() @ proj.reshape(d * d)))

    cands = np.array(candidates)
    projections = detect_projections(alg, cands, tol)
    if not projections:
        return StageResult(
            "projections", FAIL, 1.0, witness={"reason": "no idempotent candidates found"}
        )
    # worst idempotence residual among the detected family
    residual = 0.0
    for p in projections:
        residual = max(residual, effect_norm(alg.norm_engine, product(alg, p, p) - p))
    verdict = PASS if residual <= tol else FAIL
    return StageResult(
        "projections",
        verdict,
        float(residual),
        detail={"candidates": int(cands.shape[0]), "projections_found": len(projections)},
    )


def check_complements(
    engine: NormEngine,
    alg: AlgebraModel | None = None,
    samples: int = 200,
    seed: int = 0,
    tol: float = 1e-9,
) -> StageResult:
    """Verify complement arithmetic against the unit effect: involutivity
    ``(E^perp)^perp = E``, pairing complementarity ``<omega|E^perp> =
    1 - <omega|E>`` on the marked states, and — when a product is
    available — that complements of projections are again projections."""
    unit = engine.unit_effect
    if unit is None:
        raise DomainError("complements require a unit effect on the norm engine")
    unit = np.asarray(unit, dtype=complex)
    rng = np.random.default_rng(seed)
    dim = engine.pair.effect_dim
    elems = sample_span(rng, dim, samples)

    # involutivity on random span elements: unit - (unit - E) = E exactly
    double = unit[None, :] - (unit[None, :] - elems)
    inv_resid = float(effect_norms(engine, double - elems).max())
    residual = inv_resid
    witness = None

    # <omega | E^perp> = 1 - <omega | E> on the marked states
    states = engine.pair.state_basis
    comp = unit[None, :] - elems
    lhs = np.conj(states) @ engine.pair.pairing_matrix @ comp.T
    rhs = 1.0 - np.conj(states) @ engine.pair.pairing_matrix @ elems.T
    pair_resid = float(np.abs(lhs - rhs).max())
    if pair_resid > residual:
        residual = pair_resid
        worst = np.unravel_index(np.argmax(np.abs(lhs - rhs)), lhs.shape)
        witness = {"state_index": int(worst[0]), "E": vector_payload(elems[worst[1]])}

    # complements of projections are projections
    proj_resid = 0.0
    if alg is not None:
        for p in detect_projections(alg, np.vstack([np.zeros(dim), [unit]]), tol):
            q = complement(alg, p)
            proj_resid = max(proj_resid, effect_norm(engine, product(alg, q, q) - q))
        residual = max(residual, float(proj_resid))

    verdict = PASS if residual <= tol else FAIL
    return StageResult(
        "complements",
        verdict,
        float(residual),
        witness=witness if verdict == FAIL else None,
        detail={"pairing_residual": pair_resid, "involutivity_residual": inv_resid},
    )


def decompose(
    alg: AlgebraModel, element: np.ndarray, projection: np.ndarray, tol: float = 1e-9
) -> tuple[np.ndarray, np.ndarray]:
    """Split ``element`` into its corner ``M element M`` and the remainder.

    ``projection`` must be idempotent within tolerance, otherwise
    :class:`NotAProjectionError` is raised.  For commutative models the
    corner is a pointwise masking; for matrix models it is the usual
    two-sided compression.
    """
    element = np.asarray(element, dtype=complex)
    projection = np.asarray(projection, dtype=complex)
    if not is_projection(alg, projection, tol):
        raise NotAProjectionError("decompose requires an idempotent projection")
    corner = product(alg, product(alg, projection, element), projection)
    return corner, element - corner
