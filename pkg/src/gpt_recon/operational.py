"""Operational statistics tables and their quotients.

The raw input of the toolkit is a finite table ``mu[i, j]`` holding the
probability that preparation ``i`` produces outcome ``j``.  Preparations with
identical rows are operationally indistinguishable, and likewise outcomes
with identical columns; quotienting by those identifications is the first
step of every reconstruction.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field
from pathlib import Path
from typing import Any

import numpy as np

from .errors import DomainError, EmptyTableError, ParseError

#: Slack allowed when validating that probabilities lie in [0, 1].
ENTRY_TOLERANCE = 1e-9


@dataclass(frozen=True)
class OperationalStatistics:
    """An m-by-n table of outcome probabilities with row/column labels.

    Parameters
    ----------
    prep_labels:
        Names of the m preparation procedures (table rows).
    outcome_labels:
        Names of the n measurement outcomes (table columns).
    table:
        Real (m, n) array with entries in [0, 1].
    """

    prep_labels: tuple[str, ...]
    outcome_labels: tuple[str, ...]
    table: np.ndarray = field(repr=False)

    def __post_init__(self) -> None:
        table = np.asarray(self.table, dtype=float)
        object.__setattr__(self, "table", table)
        object.__setattr__(self, "prep_labels", tuple(str(p) for p in self.prep_labels))
        object.__setattr__(self, "outcome_labels", tuple(str(o) for o in self.outcome_labels))
        if table.ndim != 2:
            raise ParseError(f"statistics table must be 2-dimensional, got shape {table.shape}")
        m, n = table.shape
        if m == 0 or n == 0:
            raise EmptyTableError("statistics table needs at least one row and one column")
        if len(self.prep_labels) != m:
            raise ParseError(f"{len(self.prep_labels)} preparation labels for {m} rows")
        if len(self.outcome_labels) != n:
            raise ParseError(f"{len(self.outcome_labels)} outcome labels for {n} columns")
        if not np.all(np.isfinite(table)):
            raise DomainError("statistics table contains non-finite entries")
        if table.min() < 0.0 or table.max() > 1.0:
            raise DomainError(
                "statistics entries must lie in [0, 1]; "
                f"range found [{table.min():.6g}, {table.max():.6g}]"
            )

    @classmethod
    def from_table(
        cls,
        prep_labels: tuple[str, ...] | list[str],
        outcome_labels: tuple[str, ...] | list[str],
        table: Any,
        entry_tolerance: float = ENTRY_TOLERANCE,
    ) -> "OperationalStatistics":
        """Build a table, clipping entries that stray from [0, 1] by at most
        ``entry_tolerance`` (anything worse raises :class:`DomainError`)."""
        arr = np.asarray(table, dtype=float)
        if arr.ndim == 2 and arr.size and np.all(np.isfinite(arr)):
            low, high = arr.min(), arr.max()
            if low < -entry_tolerance or high > 1.0 + entry_tolerance:
                raise DomainError(
                    "statistics entries must lie in [0, 1] up to tolerance "
                    f"{entry_tolerance:g}; range found [{low:.6g}, {high:.6g}]"
                )
            arr = np.clip(arr, 0.0, 1.0)
        return cls(tuple(prep_labels), tuple(outcome_labels), arr)

    @property
    def shape(self) -> tuple[int, int]:
        return self.table.shape

    def transpose(self) -> "OperationalStatistics":
        """Swap the roles of preparations and outcomes."""
        return OperationalStatistics(self.outcome_labels, self.prep_labels, self.table.T.copy())


@dataclass(frozen=True)
class QuotientResult:
    """Partition of rows (or columns) into indistinguishability classes.

    ``classes[k]`` lists the original indices merged into class ``k``,
    ``representatives[k]`` is the smallest index of class ``k``, and
    ``reduced_table`` keeps one row (or column) per class.  Classes are
    ordered by their representative, so the quotient of an already-reduced
    table is the identity partition.
    """

    classes: tuple[tuple[int, ...], ...]
    representatives: tuple[int, ...]
    reduced_table: np.ndarray = field(repr=False)

    def __post_init__(self) -> None:
        seen: set[int] = set()
        for cls_, rep in zip(self.classes, self.representatives):
            if rep != min(cls_):
                raise ValueError("representative must be the smallest class member")
            seen.update(cls_)
        total = sum(len(c) for c in self.classes)
        if len(seen) != total:
            raise ValueError("quotient classes must be disjoint")

    @property
    def n_classes(self) -> int:
        return len(self.classes)

    def is_trivial(self) -> bool:
        """True when every class is a singleton (nothing was merged)."""
        return all(len(c) == 1 for c in self.classes)


def _partition(vectors: np.ndarray, tol: float) -> tuple[tuple[tuple[int, ...], ...], tuple[int, ...]]:
    """Group rows of ``vectors`` whose sup-distance is <= tol (transitively)."""
    k = vectors.shape[0]
    parent = list(range(k))

    def find(i: int) -> int:
        while parent[i] != i:
            parent[i] = parent[parent[i]]
            i = parent[i]
        return i

    # pairwise sup-distances; k is small (table axes), so O(k^2) is fine
    dist = np.abs(vectors[:, None, :] - vectors[None, :, :]).max(axis=2)
    for i in range(k):
        for j in range(i + 1, k):
            if dist[i, j] <= tol:
                ri, rj = find(i), find(j)
                if ri != rj:
                    parent[max(ri, rj)] = min(ri, rj)

    groups: dict[int, list[int]] = {}
    for i in range(k):
        groups.setdefault(find(i), []).append(i)
    reps = sorted(groups)
    classes = tuple(tuple(groups[r]) for r in reps)
    return classes, tuple(reps)


def quotient_ensembles(stats: OperationalStatistics, tol: float = 1e-9) -> QuotientResult:
    """Merge preparations whose outcome rows agree within ``tol``.

    Merging is transitive: rows linked by a chain of tol-close neighbours
    land in one class.  The reduced table keeps the representative rows in
    order of first appearance.
    """
    if tol < 0:
        raise DomainError("quotient tolerance must be non-negative")
    classes, reps = _partition(stats.table, tol)
    reduced = stats.table[list(reps), :].copy()
    return QuotientResult(classes, reps, reduced)


def quotient_effects(stats: OperationalStatistics, tol: float = 1e-9) -> QuotientResult:
    """Column analogue of :func:`quotient_ensembles`."""
    if tol < 0:
        raise DomainError("quotient tolerance must be non-negative")
    classes, reps = _partition(stats.table.T, tol)
    reduced = stats.table[:, list(reps)].copy()
    return QuotientResult(classes, reps, reduced)


def reduce_statistics(
    stats: OperationalStatistics, tol: float = 1e-9
) -> tuple[OperationalStatistics, QuotientResult, QuotientResult]:
    """Quotient both axes and return the separated table plus both partitions.

    Row classes are computed on the original table, column classes on the
    row-reduced table, so the column partition refers to the object that is
    actually kept.
    """
    rows = quotient_ensembles(stats, tol)
    row_stats = OperationalStatistics(
        tuple(stats.prep_labels[r] for r in rows.representatives),
        stats.outcome_labels,
        rows.reduced_table,
    )
    cols = quotient_effects(row_stats, tol)
    reduced = OperationalStatistics(
        row_stats.prep_labels,
        tuple(row_stats.outcome_labels[c] for c in cols.representatives),
        cols.reduced_table,
    )
    return reduced, rows, cols


def check_separation(stats: OperationalStatistics, tol: float = 1e-9) -> bool:
    """True iff distinct preparations and distinct outcomes are already
    distinguishable, i.e. both quotients are identity partitions."""
    return quotient_ensembles(stats, tol).is_trivial() and quotient_effects(stats, tol).is_trivial()


# ---------------------------------------------------------------------------
# input documents

_PRODUCT_KINDS = ("pointwise", "matrix", "tensor")
_INVOLUTION_KINDS = ("identity", "conjugate-transpose", "matrix")


@dataclass(frozen=True)
class TheoryDocument:
    """Parsed input file: a statistics table plus optional algebraic data.

    ``product`` and ``involution`` are kept as raw descriptors here; they are
    interpreted against the embedded model by the pipeline, which knows the
    span the table generates.
    """

    stats: OperationalStatistics
    product: dict[str, Any] | None = None
    involution: dict[str, Any] | None = None
    unit_column: int | None = None


def _require(obj: dict[str, Any], key: str, kind: type, what: str) -> Any:
    if key not in obj:
        raise ParseError(f"{what} is missing required key {key!r}")
    value = obj[key]
    if not isinstance(value, kind):
        raise ParseError(f"{what} key {key!r} must be of type {kind.__name__}")
    return value


def _parse_descriptor(obj: Any, key: str, kinds: tuple[str, ...]) -> dict[str, Any]:
    if not isinstance(obj, dict):
        raise ParseError(f"{key!r} must be an object with a 'kind' field")
    kind = _require(obj, "kind", str, f"{key!r} descriptor")
    if kind not in kinds:
        raise ParseError(f"{key!r} kind must be one of {kinds}, got {kind!r}")
    data = obj.get("data")
    if kind in ("matrix", "tensor") and data is None:
        raise ParseError(f"{key!r} kind {kind!r} requires a 'data' array")
    return {"kind": kind, "data": data}


def parse_document(payload: Any, entry_tolerance: float = ENTRY_TOLERANCE) -> TheoryDocument:
    """Validate a decoded JSON object against the input schema."""
    if not isinstance(payload, dict):
        raise ParseError("input document must be a JSON object")

    preps = _require(payload, "preparations", list, "document")
    outs = _require(payload, "outcomes", list, "document")
    rows = _require(payload, "statistics", list, "document")
    if not all(isinstance(p, str) for p in preps):
        raise ParseError("'preparations' must be a list of strings")
    if not all(isinstance(o, str) for o in outs):
        raise ParseError("'outcomes' must be a list of strings")
    if len(preps) == 0 or len(outs) == 0:
        raise EmptyTableError("document declares an empty table")
    if len(rows) != len(preps):
        raise ParseError(f"{len(rows)} statistics rows for {len(preps)} preparations")
    width = len(outs)
    for i, row in enumerate(rows):
        if not isinstance(row, list) or len(row) != width:
            raise ParseError(f"statistics row {i} must be a list of {width} numbers")
        for x in row:
            if not isinstance(x, (int, float)) or isinstance(x, bool):
                raise ParseError(f"statistics row {i} contains a non-numeric entry")

    stats = OperationalStatistics.from_table(preps, outs, rows, entry_tolerance)

    product = None
    if payload.get("product") is not None:
        product = _parse_descriptor(payload["product"], "product", _PRODUCT_KINDS)
    involution = None
    if payload.get("involution") is not None:
        involution = _parse_descriptor(payload["involution"], "involution", _INVOLUTION_KINDS)
    if involution is not None and product is None:
        raise ParseError("an 'involution' descriptor requires a 'product' descriptor")

    unit_column = payload.get("unit_column")
    if unit_column is not None:
        if not isinstance(unit_column, int) or isinstance(unit_column, bool):
            raise ParseError("'unit_column' must be an integer index")
        if not 0 <= unit_column < len(outs):
            raise ParseError(f"'unit_column' {unit_column} out of range for {len(outs)} outcomes")

    return TheoryDocument(stats, product, involution, unit_column)


def load_document(source: str | Path, entry_tolerance: float = ENTRY_TOLERANCE) -> TheoryDocument:
    """Read and validate a JSON theory document from disk."""
    path = Path(source)
    try:
        text = path.read_text()
    except OSError as exc:
        raise ParseError(f"cannot read input file {path}: {exc}") from exc
    try:
        payload = json.loads(text)
    except json.JSONDecodeError as exc:
        raise ParseError(f"input file {path} is not valid JSON: {exc}") from exc
    return parse_document(payload, entry_tolerance)


def load_statistics(source: str | Path, entry_tolerance: float = ENTRY_TOLERANCE) -> OperationalStatistics:
    """Read just the statistics table from a JSON document."""
    return load_document(source, entry_tolerance).stats
