"""End-to-end verification pipeline: source -> instance -> axiom battery.

A source is either a built-in instance name (``classical:<n>``, ``qubit``,
``gbit``) or a path to a JSON theory document.  Documents are quotiented,
embedded through their table's rank factorisation, optionally equipped
with the product/involution they declare, and then run through the same
twelve-stage battery as the built-ins.
"""

from __future__ import annotations

import re
from dataclasses import dataclass
from pathlib import Path

import numpy as np

from .algebra import (
    AlgebraModel,
    check_complements,
    check_isometry,
    check_projections,
    check_submultiplicative,
    check_uniform_bound,
)
from .dual_pair import embed_theory
from .errors import DomainError, ParseError, UnsupportedModelError
from .instances import TheoryInstance, builtin_names, get_builtin
from .norms import NormEngine, check_duality, check_norm_axioms
from .operational import (
    TheoryDocument,
    load_document,
    quotient_effects,
    quotient_ensembles,
    reduce_statistics,
)
from .report import (
    FAIL,
    NOT_APPLICABLE,
    PASS,
    STAGE_ORDER,
    AxiomReport,
    StageResult,
    write_report,
)
from .star import (
    StarAlgebraModel,
    check_cstar_identity,
    check_involution_laws,
    check_predual_duality,
    check_support_norms,
)

_BUILTIN_RE = re.compile(r"^(classical:\d+|qubit|gbit)$")

DEFAULT_TOLERANCE = 1e-9
DEFAULT_SAMPLES = 1000


@dataclass(frozen=True)
class PipelineConfig:
    """Everything one verification run depends on."""

    source: str
    tolerance: float = DEFAULT_TOLERANCE
    samples: int = DEFAULT_SAMPLES
    seed: int = 0
    report_path: str | None = None
    format: str = "json"

    def __post_init__(self) -> None:
        if not (self.tolerance > 0.0 and np.isfinite(self.tolerance)):
            raise DomainError(f"tolerance must be positive and finite, got {self.tolerance}")
        if self.samples < 1:
            raise DomainError(f"samples must be >= 1, got {self.samples}")
        if self.format not in ("json", "text"):
            raise DomainError(f"format must be 'json' or 'text', got {self.format!r}")


def is_builtin_name(source: str) -> bool:
    return bool(_BUILTIN_RE.match(source.strip()))


def list_builtins() -> list[str]:
    return builtin_names()


# ---------------------------------------------------------------------------
# document -> instance


def _complex_array(data: object, what: str, base_ndim: int) -> np.ndarray:
    """Decode a nested JSON array of expected dimensionality as complex.

    Real input has exactly ``base_ndim`` axes; complex input carries one
    extra trailing axis of length two holding (real, imaginary) pairs.
    """
    try:
        arr = np.asarray(data, dtype=float)
    except (TypeError, ValueError) as exc:
        raise ParseError(f"{what} must be a rectangular numeric array") from exc
    if arr.ndim == base_ndim + 1 and arr.shape[-1] == 2:
        return arr[..., 0] + 1j * arr[..., 1]
    if arr.ndim == base_ndim:
        return arr.astype(complex)
    raise ParseError(
        f"{what} must have {base_ndim} axes (real) or {base_ndim + 1} with "
        f"trailing (re, im) pairs; got shape {arr.shape}"
    )


def _solve_structure_unit(structure: np.ndarray, tol: float) -> np.ndarray:
    """Find the two-sided unit of a structure tensor, or raise."""
    r = structure.shape[0]
    eye = np.eye(r, dtype=complex).ravel()
    # right action of the unit: sum_i z_i C[i, j, l] = delta_jl, and left
    left_rows = structure.reshape(r, r * r)                    # z @ rows ~ delta
    right_rows = structure.transpose(1, 0, 2).reshape(r, r * r)
    a = np.concatenate([left_rows, right_rows], axis=1).T
    b = np.concatenate([eye, eye])
    z, *_ = np.linalg.lstsq(a, b, rcond=None)
    resid = np.abs(a @ z - b).max()
    if resid > max(tol, 1e-9):
        raise UnsupportedModelError(
            f"declared product has no unit on the span (residual {resid:.3g})"
        )
    return z


def _pointwise_structure(evaluation: np.ndarray, tol: float) -> np.ndarray:
    """Structure tensor of pointwise multiplication of state-value functions.

    ``evaluation[i, a]`` holds the value of coordinate basis vector ``e_a``
    as a function on marked state i; the span must be closed under the
    pointwise product of such functions.
    """
    ev = evaluation
    r = ev.shape[1]
    funcs = (ev[:, :, None] * ev[:, None, :]).reshape(ev.shape[0], r * r)
    z, *_ = np.linalg.lstsq(ev, funcs, rcond=None)
    resid = np.abs(ev @ z - funcs).max()
    if resid > max(tol, 1e-9) * max(1.0, np.abs(funcs).max()):
        raise UnsupportedModelError(
            f"span is not closed under the pointwise product (residual {resid:.3g})"
        )
    return z.T.reshape(r, r, r)


def _matrix_structure(
    effect_basis: np.ndarray, mats: np.ndarray, tol: float
) -> tuple[np.ndarray, np.ndarray]:
    """Structure tensor of matrix multiplication transported to effect
    coordinates via the marked effects' matrix representatives.

    Returns the tensor and the (dim, d*d) coordinate-to-matrix map ``A``
    with ``vec(mat(x)) = A.T @ x``.
    """
    n, r = effect_basis.shape
    d = mats.shape[1]
    flat = mats.reshape(n, d * d)
    coord_to_mat, *_ = np.linalg.lstsq(effect_basis, flat, rcond=None)  # (r, d*d)
    resid = np.abs(effect_basis @ coord_to_mat - flat).max()
    if resid > max(tol, 1e-9) * max(1.0, np.abs(flat).max()):
        raise UnsupportedModelError(
            "matrix data is not a linear function of the effect span "
            f"(residual {resid:.3g})"
        )
    basis_mats = coord_to_mat.reshape(r, d, d)
    prods = np.einsum("iab,jbc->ijac", basis_mats, basis_mats).reshape(r * r, d * d)
    coeffs, *_ = np.linalg.lstsq(coord_to_mat.T, prods.T, rcond=None)
    coeffs = coeffs.T  # row (a, b) = coordinates of mat(e_a) mat(e_b)
    resid = np.abs(coeffs @ coord_to_mat - prods).max()
    if resid > max(tol, 1e-9) * max(1.0, np.abs(prods).max()):
        raise UnsupportedModelError(
            f"matrix span is not closed under multiplication (residual {resid:.3g})"
        )
    return coeffs.reshape(r, r, r), coord_to_mat


def _tensor_structure(effect_basis: np.ndarray, data: np.ndarray, tol: float) -> np.ndarray:
    """Transport structure constants over the marked effects to coordinates."""
    n, r = effect_basis.shape
    if n != r:
        raise UnsupportedModelError(
            "tensor structure constants require the marked effects to be a "
            f"basis of the span ({n} effects, span dimension {r})"
        )
    if data.shape != (n, n, n):
        raise ParseError(f"tensor product data must have shape ({n}, {n}, {n})")
    b = effect_basis  # rows are the marked effect coordinates
    binv = np.linalg.inv(b.T)  # alpha(x) = binv @ x expands x in marked effects
    return np.einsum("ia,jb,ijk,kl->abl", binv, binv, data, b)


def _document_algebra(
    doc: TheoryDocument,
    engine: NormEngine,
    col_reps: tuple[int, ...],
    tol: float,
) -> tuple[AlgebraModel | None, np.ndarray | None]:
    """Interpret the document's product descriptor on the embedded span.

    Returns the algebra (or None) plus the coordinate-to-matrix map when
    the product came from matrix data.
    """
    if doc.product is None:
        return None, None
    kind = doc.product["kind"]
    pair = engine.pair
    coord_to_mat = None
    if kind == "pointwise":
        evaluation = np.conj(pair.state_basis) @ pair.pairing_matrix
        structure = _pointwise_structure(evaluation, tol)
    elif kind == "matrix":
        mats = _complex_array(doc.product["data"], "product data", base_ndim=3)
        if mats.shape[1] != mats.shape[2]:
            raise ParseError("matrix product data must be a list of square matrices")
        if mats.shape[0] < max(col_reps) + 1:
            raise ParseError("matrix product data must cover every outcome column")
        mats = mats[list(col_reps)]
        structure, coord_to_mat = _matrix_structure(pair.effect_basis, mats, tol)
    elif kind == "tensor":
        data = _complex_array(doc.product["data"], "product data", base_ndim=3)
        structure = _tensor_structure(pair.effect_basis, data, tol)
    else:  # unreachable; the parser restricts kinds
        raise ParseError(f"unknown product kind {kind!r}")
    unit = _solve_structure_unit(structure, tol)
    alg = AlgebraModel(
        dim=pair.effect_dim,
        structure=structure,
        unit=unit,
        norm_engine=engine,
        support_rule=None,
    )
    return alg, coord_to_mat


def _document_involution(
    doc: TheoryDocument, alg: AlgebraModel, coord_to_mat: np.ndarray | None, tol: float
) -> StarAlgebraModel | None:
    if doc.involution is None:
        return None
    kind = doc.involution["kind"]
    r = alg.dim
    if kind == "identity":
        m = np.eye(r, dtype=complex)
    elif kind == "conjugate-transpose":
        if coord_to_mat is None:
            raise ParseError("conjugate-transpose involution requires a matrix product")
        d = int(np.sqrt(coord_to_mat.shape[1]))
        # columns of M are the coordinates of mat(e_a)^H
        daggered = coord_to_mat.reshape(r, d, d).conj().transpose(0, 2, 1).reshape(r, d * d)
        m, *_ = np.linalg.lstsq(coord_to_mat.T, daggered.T, rcond=None)
        resid = np.abs(coord_to_mat.T @ m - daggered.T).max()
        if resid > max(tol, 1e-9) * max(1.0, np.abs(coord_to_mat).max()):
            raise UnsupportedModelError(
                f"span is not closed under conjugate transposition (residual {resid:.3g})"
            )
    else:  # explicit matrix over the marked effect basis
        data = _complex_array(doc.involution["data"], "involution data", base_ndim=2)
        b = alg.norm_engine.pair.effect_basis
        n, rr = b.shape
        if n != rr:
            raise UnsupportedModelError(
                "matrix involution data requires the marked effects to be a basis"
            )
        if data.shape != (n, n):
            raise ParseError(f"involution data must have shape ({n}, {n})")
        # involve(e_i) = sum_j data[i, j] e_j on the marked effects
        binv = np.linalg.inv(b.T)
        m = b.T @ data.T @ np.conj(binv)
    return StarAlgebraModel(alg, m)


def instance_from_document(doc: TheoryDocument, tol: float, name: str = "document") -> TheoryInstance:
    """Quotient, embed and equip a parsed document as a theory instance."""
    reduced, _rows, cols = reduce_statistics(doc.stats, tol)
    pair, state_body, effect_body = embed_theory(reduced, tol)

    unit_effect = None
    if doc.unit_column is not None:
        # follow the original column through the quotient
        pos = None
        for k, cls_ in enumerate(cols.classes):
            members = set(cls_)
            if doc.unit_column in members:
                pos = k
                break
        if pos is None:  # unit column merged away is impossible; defensive
            raise ParseError(f"unit column {doc.unit_column} lost in the quotient")
        column = reduced.table[:, pos]
        if np.abs(column - 1.0).max() > max(tol, 1e-9):
            raise DomainError(
                "declared unit column must equal one on every preparation; "
                f"worst deviation {np.abs(column - 1.0).max():.3g}"
            )
        unit_effect = pair.effect_basis[pos]

    engine = NormEngine(pair, state_body, effect_body, tol=tol, unit_effect=unit_effect)
    alg, coord_to_mat = _document_algebra(doc, engine, cols.representatives, tol)
    star = _document_involution(doc, alg, coord_to_mat, tol) if alg is not None else None
    return TheoryInstance(
        name=name,
        stats=doc.stats,
        state_body=state_body,
        effect_body=effect_body,
        engine=engine,
        algebra=alg,
        star=star,
        expected={},
    )


def resolve_instance(source: str, tol: float = DEFAULT_TOLERANCE) -> TheoryInstance:
    """Turn a source string into a theory instance (built-in or file)."""
    if is_builtin_name(source):
        return get_builtin(source.strip())
    path = Path(source)
    doc = load_document(path)
    return instance_from_document(doc, tol, name=path.name)


# ---------------------------------------------------------------------------
# the battery


def _stage_seed(seed: int, ordinal: int) -> int:
    return seed * 1009 + ordinal


def _sample_support_states(instance: TheoryInstance, count: int, rng: np.random.Generator) -> np.ndarray:
    alg = instance.algebra
    if alg.support_rule == "indicator":
        return rng.dirichlet(np.ones(alg.dim), size=count).astype(complex)
    # range rule: mixed states from unnormalised random matrices
    basis = alg.matrix_basis
    d = basis.shape[1]
    flat = basis.reshape(alg.dim, d * d)
    gram = flat.conj() @ flat.T
    g = rng.standard_normal((count, d, d)) + 1j * rng.standard_normal((count, d, d))
    rho = np.einsum("kab,kcb->kac", g, g.conj())
    rho /= np.trace(rho, axis1=1, axis2=2)[:, None, None]
    return np.linalg.solve(gram, (flat.conj() @ rho.reshape(count, d * d).T)).T


def run_battery(
    instance: TheoryInstance,
    tolerance: float = DEFAULT_TOLERANCE,
    samples: int = DEFAULT_SAMPLES,
    seed: int = 0,
) -> AxiomReport:
    """Run all twelve stages against one instance and collect the report."""
    engine = instance.engine
    alg = instance.algebra
    star = instance.star
    tol = tolerance
    stages: list[StageResult] = []

    # 1. separation on the raw table
    rows = quotient_ensembles(instance.stats, tol)
    cols = quotient_effects(instance.stats, tol)
    separated = rows.is_trivial() and cols.is_trivial()
    witness = None
    if not separated:
        merged = next(c for c in (rows.classes + cols.classes) if len(c) > 1)
        witness = {"merged_indices": list(merged)}
    stages.append(
        StageResult(
            "separation",
            PASS if separated else FAIL,
            0.0 if separated else 1.0,
            witness=witness,
            detail={"ensemble_classes": rows.n_classes, "effect_classes": cols.n_classes},
        )
    )

    # 2. duality of the table's own embedding
    reduced, _, _ = reduce_statistics(instance.stats, tol)
    table_pair, table_states, table_effects = embed_theory(reduced, tol)
    table_engine = NormEngine(table_pair, table_states, table_effects, tol=tol)
    stages.append(check_duality(table_engine, tol))

    # 3. norm axioms on the model's own engine
    stages.append(check_norm_axioms(engine, samples, _stage_seed(seed, 2), tol))

    # 4-7. algebra battery
    if alg is None:
        for name in ("submultiplicativity", "uniform-bound", "isometry", "projections"):
            stages.append(StageResult(name, NOT_APPLICABLE))
    else:
        stages.append(check_submultiplicative(alg, samples, _stage_seed(seed, 3), tol))
        stages.append(check_uniform_bound(alg, min(samples, 200), _stage_seed(seed, 4), tol))
        stages.append(check_isometry(alg, min(samples, 200), _stage_seed(seed, 5), tol))
        stages.append(check_projections(alg, samples, _stage_seed(seed, 6), tol))

    # 8. complements against the unit effect
    if engine.unit_effect is None:
        stages.append(StageResult("complements", NOT_APPLICABLE))
    else:
        stages.append(check_complements(engine, alg, samples, _stage_seed(seed, 7), tol))

    # 9-12. star battery
    if star is None:
        for name in ("involution", "cstar-identity", "support-norm-equality", "predual-duality"):
            stages.append(StageResult(name, NOT_APPLICABLE))
    else:
        stages.append(check_involution_laws(star, samples, _stage_seed(seed, 8), tol))
        stages.append(check_cstar_identity(star, samples, _stage_seed(seed, 9), tol))
        if alg is not None and alg.support_rule is not None:
            rng = np.random.default_rng(_stage_seed(seed, 10))
            states = _sample_support_states(instance, min(samples, 200), rng)
            stages.append(check_support_norms(star, states, tol))
        else:
            stages.append(StageResult("support-norm-equality", NOT_APPLICABLE))
        stages.append(check_predual_duality(star, tol))

    ordered = sorted(stages, key=lambda s: STAGE_ORDER.index(s.name))
    return AxiomReport(
        instance_name=instance.name,
        tolerance=tolerance,
        samples=samples,
        seed=seed,
        stages=tuple(ordered),
    )


def run_pipeline(config: PipelineConfig) -> AxiomReport:
    """Resolve the configured source, run the battery, write any report."""
    instance = resolve_instance(config.source, config.tolerance)
    report = run_battery(instance, config.tolerance, config.samples, config.seed)
    if config.report_path is not None:
        write_report(report, config.report_path, config.format)
    return report


def exit_code_for(report: AxiomReport) -> int:
    """0 when every applicable stage passed, 2 when any stage failed."""
    return 0 if report.all_pass() else 2
