"""Reconstruction of operator-algebraic structure from operational statistics.

The toolkit takes finite probability tables, quotients away operational
redundancy, embeds the resulting state/effect dual pair, equips the effect
span with sup-norms, products and involutions, and checks the battery of
axioms separating genuine operator-algebraic models from impostors.
"""

from __future__ import annotations

__version__ = "0.1.0"

from .algebra import (
    AlgebraModel,
    MultOperator,
    check_complements,
    check_isometry,
    check_projections,
    check_submultiplicative,
    check_uniform_bound,
    complement,
    decompose,
    detect_projections,
    is_projection,
    mult_operator,
    operator_norm,
    product,
)
from .dual_pair import (
    ConvexBody,
    DualPair,
    check_nondegenerate,
    embed_theory,
    membership,
    mix,
    pairing,
)
from .errors import (
    DegeneratePairingError,
    DimensionMismatchError,
    DomainError,
    EmptyTableError,
    NotAProjectionError,
    ParseError,
    RankDeficiencyError,
    ReconstructionError,
    SizeError,
    UnsupportedModelError,
    WeightError,
)
from .instances import TheoryInstance, classical, gbit, get_builtin, noisy_sample, qubit
from .norms import (
    NormEngine,
    check_duality,
    check_norm_axioms,
    effect_norm,
    effect_norms,
    state_norm,
    state_norms,
)
from .operational import (
    OperationalStatistics,
    QuotientResult,
    check_separation,
    load_document,
    load_statistics,
    quotient_effects,
    quotient_ensembles,
)
from .pipeline import PipelineConfig, exit_code_for, list_builtins, run_battery, run_pipeline
from .report import AxiomReport, StageResult, render_report, write_report
from .star import (
    StarAlgebraModel,
    SupportResult,
    adjoint,
    check_cstar_identity,
    check_involution_laws,
    check_predual_duality,
    check_support_norms,
    involve,
    support_projection,
)

__all__ = [
    "__version__",
    "AlgebraModel",
    "AxiomReport",
    "ConvexBody",
    "DegeneratePairingError",
    "DimensionMismatchError",
    "DomainError",
    "DualPair",
    "EmptyTableError",
    "MultOperator",
    "NormEngine",
    "NotAProjectionError",
    "OperationalStatistics",
    "ParseError",
    "PipelineConfig",
    "QuotientResult",
    "RankDeficiencyError",
    "ReconstructionError",
    "SizeError",
    "StageResult",
    "StarAlgebraModel",
    "SupportResult",
    "TheoryInstance",
    "UnsupportedModelError",
    "WeightError",
    "adjoint",
    "check_complements",
    "check_cstar_identity",
    "check_duality",
    "check_involution_laws",
    "check_isometry",
    "check_nondegenerate",
    "check_norm_axioms",
    "check_predual_duality",
    "check_projections",
    "check_separation",
    "check_submultiplicative",
    "check_support_norms",
    "check_uniform_bound",
    "classical",
    "complement",
    "decompose",
    "detect_projections",
    "effect_norm",
    "effect_norms",
    "embed_theory",
    "exit_code_for",
    "gbit",
    "get_builtin",
    "involve",
    "is_projection",
    "list_builtins",
    "load_document",
    "load_statistics",
    "membership",
    "mix",
    "mult_operator",
    "noisy_sample",
    "operator_norm",
    "pairing",
    "product",
    "quotient_effects",
    "quotient_ensembles",
    "qubit",
    "render_report",
    "run_battery",
    "run_pipeline",
    "state_norm",
    "state_norms",
    "support_projection",
    "write_report",
]
