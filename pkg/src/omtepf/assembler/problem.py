"""Indexed mathematical programs and the pieces emitters contribute to them."""

from __future__ import annotations

import dataclasses
from typing import TYPE_CHECKING, Literal, NamedTuple

import numpy as np
from scipy import sparse

from omtepf.exceptions import InfeasibleBoundaryError, StructuralError

if TYPE_CHECKING:
    from collections.abc import Iterable, Sequence

    from omtepf.assembler.variable_index import VariableIndex

FIX_TOL = 1e-9


class RowTag(NamedTuple):
    """Provenance of one assembled row."""

    family: str
    k: int
    element: int | str


@dataclasses.dataclass(frozen=True, eq=False)
class RowBlock:
    """A block of linear rows lower ≤ A x ≤ upper with their provenance.

    Args:
        kind: "eq" for equality rows (lower == upper), "ineq" otherwise.
        matrix: CSR matrix with one column per variable.
        lower: Row lower bounds.
        upper: Row upper bounds.
        tags: One tag per row.
    """

    kind: Literal["eq", "ineq"]
    matrix: sparse.csr_matrix
    lower: np.ndarray
    upper: np.ndarray
    tags: tuple[RowTag, ...]

    def __post_init__(self) -> None:
        rows = self.matrix.shape[0]
        if not (len(self.lower) == len(self.upper) == len(self.tags) == rows):
            raise StructuralError(
                f"Row block has {rows} rows but {len(self.lower)}/{len(self.upper)} bounds "
                f"and {len(self.tags)} tags"
            )

    @property
    def row_count(self) -> int:
        return self.matrix.shape[0]


class RowSet:
    """Collects linear rows from (column, coefficient) lists."""

    def __init__(self, column_count: int) -> None:
        self._column_count = column_count
        self._rows: list[int] = []
        self._cols: list[int] = []
        self._vals: list[float] = []
        self._lower: list[float] = []
        self._upper: list[float] = []
        self._tags: list[RowTag] = []

    def __len__(self) -> int:
        return len(self._tags)

    def add_row(
        self,
        columns: Sequence[int] | np.ndarray,
        coefficients: Sequence[float] | np.ndarray,
        lower: float,
        upper: float,
        tag: RowTag,
    ) -> None:
        row = len(self._tags)
        for col, val in zip(columns, coefficients):
            if not 0 <= col < self._column_count:
                raise StructuralError(f"Row {tag} references column {col} outside the index")
            self._rows.append(row)
            self._cols.append(int(col))
            self._vals.append(float(val))
        self._lower.append(lower)
        self._upper.append(upper)
        self._tags.append(tag)

    def add_block(
        self,
        matrix: sparse.spmatrix,
        lower: np.ndarray | float,
        upper: np.ndarray | float,
        tags: Sequence[RowTag],
    ) -> None:
        """Appends the rows of a sparse matrix already laid out over all columns."""
        coo = sparse.coo_matrix(matrix)
        if coo.shape[1] != self._column_count:
            raise StructuralError(
                f"Block has {coo.shape[1]} columns, expected {self._column_count}"
            )
        offset = len(self._tags)
        self._rows.extend((coo.row + offset).tolist())
        self._cols.extend(coo.col.tolist())
        self._vals.extend(coo.data.tolist())
        self._lower.extend(np.broadcast_to(lower, coo.shape[0]).tolist())
        self._upper.extend(np.broadcast_to(upper, coo.shape[0]).tolist())
        self._tags.extend(tags)

    def block(self, kind: Literal["eq", "ineq"]) -> RowBlock:
        shape = (len(self._tags), self._column_count)
        matrix = sparse.coo_matrix((self._vals, (self._rows, self._cols)), shape=shape)
        return RowBlock(
            kind=kind,
            matrix=matrix.tocsr(),
            lower=np.asarray(self._lower, dtype=float),
            upper=np.asarray(self._upper, dtype=float),
            tags=tuple(self._tags),
        )


@dataclasses.dataclass(frozen=True)
class BoundUpdate:
    """Tightens the bounds of some columns; lower == upper pins them."""

    columns: np.ndarray
    lower: np.ndarray
    upper: np.ndarray
    tag: str

    @classmethod
    def fix(cls, columns: Sequence[int] | np.ndarray, values: np.ndarray | float, tag: str) -> BoundUpdate:
        columns = np.atleast_1d(np.asarray(columns, dtype=np.int64))
        values = np.broadcast_to(np.asarray(values, dtype=float), columns.shape).copy()
        return cls(columns, values, values.copy(), tag)

    @classmethod
    def range(
        cls,
        columns: Sequence[int] | np.ndarray,
        lower: np.ndarray | float,
        upper: np.ndarray | float,
        tag: str,
    ) -> BoundUpdate:
        columns = np.atleast_1d(np.asarray(columns, dtype=np.int64))
        return cls(
            columns,
            np.broadcast_to(np.asarray(lower, dtype=float), columns.shape).copy(),
            np.broadcast_to(np.asarray(upper, dtype=float), columns.shape).copy(),
            tag,
        )

    @property
    def is_fix(self) -> bool:
        return bool(np.array_equal(self.lower, self.upper))


@dataclasses.dataclass(frozen=True)
class SquaredNormTerm:
    """Objective term a·r² + b·r + c where r = Σ x_j² over `columns`.

    Args:
        columns: Columns summed in the squared norm (typically a real/imaginary pair).
        quartic: Coefficient a.
        quadratic: Coefficient b.
        constant: Coefficient c.
        tag: Provenance label.
    """

    columns: tuple[int, ...]
    quartic: float
    quadratic: float
    constant: float = 0.0
    tag: str = ""

    def value(self, x: np.ndarray) -> float:
        r = float(np.sum(np.asarray(x)[list(self.columns)] ** 2))
        return self.quartic * r * r + self.quadratic * r + self.constant

    @property
    def convex(self) -> bool:
        return self.quartic >= 0 and self.quadratic >= 0


@dataclasses.dataclass(frozen=True)
class QuadraticConstraint:
    """Convex constraint Σ x_j² + a·x ≤ rhs over `squares`."""

    squares: tuple[int, ...]
    linear: tuple[tuple[int, float], ...]
    rhs: float
    tag: str = ""

    def value(self, x: np.ndarray) -> float:
        x = np.asarray(x)
        lin = sum(coef * x[col] for col, coef in self.linear)
        return float(np.sum(x[list(self.squares)] ** 2) + lin)

    def gradient(self, x: np.ndarray) -> dict[int, float]:
        grad: dict[int, float] = {}
        for col in self.squares:
            grad[col] = grad.get(col, 0.0) + 2.0 * float(x[col])
        for col, coef in self.linear:
            grad[col] = grad.get(col, 0.0) + coef
        return grad


@dataclasses.dataclass(eq=False)
class Emission:
    """Everything one constraint family contributes to a program."""

    rows: list[RowBlock] = dataclasses.field(default_factory=list)
    bounds: list[BoundUpdate] = dataclasses.field(default_factory=list)
    linear: list[tuple[np.ndarray, np.ndarray]] = dataclasses.field(default_factory=list)
    offset: float = 0.0
    quadratic: list[sparse.spmatrix] = dataclasses.field(default_factory=list)
    norm_terms: list[SquaredNormTerm] = dataclasses.field(default_factory=list)
    quadratic_constraints: list[QuadraticConstraint] = dataclasses.field(default_factory=list)

    def merge(self, other: Emission) -> Emission:
        self.rows.extend(other.rows)
        self.bounds.extend(other.bounds)
        self.linear.extend(other.linear)
        self.offset += other.offset
        self.quadratic.extend(other.quadratic)
        self.norm_terms.extend(other.norm_terms)
        self.quadratic_constraints.extend(other.quadratic_constraints)
        return self

    @classmethod
    def of_rows(cls, *blocks: RowBlock) -> Emission:
        return cls(rows=[b for b in blocks if b.row_count])


@dataclasses.dataclass(frozen=True, eq=False)
class ProblemMatrices:
    """An assembled program.

    minimize   ½xᵀPx + cᵀx + offset + Σ norm_terms(x)
    subject to a_eq x = b_eq
               ineq_lower ≤ a_ineq x ≤ ineq_upper
               quadratic_constraints(x) ≤ rhs
               lower ≤ x ≤ upper, x_j ∈ {0, 1} where binary[j]
    """

    index: VariableIndex | None
    binary: np.ndarray
    a_eq: sparse.csr_matrix
    b_eq: np.ndarray
    eq_tags: tuple[RowTag, ...]
    a_ineq: sparse.csr_matrix
    ineq_lower: np.ndarray
    ineq_upper: np.ndarray
    ineq_tags: tuple[RowTag, ...]
    lower: np.ndarray
    upper: np.ndarray
    c: np.ndarray
    offset: float = 0.0
    p: sparse.csc_matrix | None = None
    norm_terms: tuple[SquaredNormTerm, ...] = ()
    quadratic_constraints: tuple[QuadraticConstraint, ...] = ()
    column_names: tuple[str, ...] = ()

    @property
    def column_count(self) -> int:
        return len(self.c)

    @property
    def has_binaries(self) -> bool:
        return bool(self.binary.any())

    @property
    def is_linear(self) -> bool:
        return (
            (self.p is None or self.p.nnz == 0)
            and not self.norm_terms
            and not self.quadratic_constraints
        )

    def objective(self, x: np.ndarray) -> float:
        x = np.asarray(x, dtype=float)
        value = float(self.c @ x) + self.offset
        if self.p is not None and self.p.nnz:
            value += 0.5 * float(x @ (self.p @ x))
        value += sum(term.value(x) for term in self.norm_terms)
        return value

    def name(self, column: int) -> str:
        if self.column_names:
            return self.column_names[column]
        return f"x{column}"

    def replace(self, **changes: object) -> ProblemMatrices:
        return dataclasses.replace(self, **changes)


class ProblemBuilder:
    """Accumulates emissions over one variable index and builds the program.

    Args:
        index: The variable index.
        column_names: Optional names of the columns.
    """

    def __init__(self, index: VariableIndex, column_names: Sequence[str] = ()) -> None:
        self._index = index
        self._column_names = tuple(column_names)
        self._emission = Emission()

    @property
    def index(self) -> VariableIndex:
        return self._index

    def merge(self, emissions: Iterable[Emission] | Emission) -> ProblemBuilder:
        if isinstance(emissions, Emission):
            emissions = [emissions]
        for emission in emissions:
            self._emission.merge(emission)
        return self

    def build(self) -> ProblemMatrices:
        """Builds the program.

        Raises:
            InfeasibleBoundaryError: Two pins fix one column to different values, or a
                tightened range is empty.

        Returns:
            The assembled program.
        """
        n = self._index.total
        emission = self._emission
        lower, upper = self._index.default_bounds()
        _apply_bounds(emission.bounds, lower, upper)

        c = np.zeros(n)
        for columns, coefficients in emission.linear:
            np.add.at(c, columns, coefficients)

        p = None
        if emission.quadratic:
            p = sparse.csc_matrix((n, n))
            for part in emission.quadratic:
                p = p + sparse.csc_matrix(part)

        eq = [b for b in emission.rows if b.kind == "eq"]
        ineq = [b for b in emission.rows if b.kind == "ineq"]
        a_eq, b_eq, _, eq_tags = _stack(eq, n)
        a_ineq, ineq_lower, ineq_upper, ineq_tags = _stack(ineq, n)

        return ProblemMatrices(
            index=self._index,
            binary=self._index.binary_mask(),
            a_eq=a_eq,
            b_eq=b_eq,
            eq_tags=eq_tags,
            a_ineq=a_ineq,
            ineq_lower=ineq_lower,
            ineq_upper=ineq_upper,
            ineq_tags=ineq_tags,
            lower=lower,
            upper=upper,
            c=c,
            offset=emission.offset,
            p=p,
            norm_terms=tuple(emission.norm_terms),
            quadratic_constraints=tuple(emission.quadratic_constraints),
            column_names=self._column_names,
        )


def _apply_bounds(updates: Sequence[BoundUpdate], lower: np.ndarray, upper: np.ndarray) -> None:
    pinned = np.full(len(lower), np.nan)
    pinned_by: dict[int, str] = {}
    for update in updates:
        if update.is_fix:
            for col, value in zip(update.columns.tolist(), update.lower.tolist()):
                if not np.isnan(pinned[col]) and abs(pinned[col] - value) > FIX_TOL:
                    raise InfeasibleBoundaryError(
                        f"Column {col} pinned to {pinned[col]} by {pinned_by[col]} "
                        f"and to {value} by {update.tag}"
                    )
                pinned[col] = value
                pinned_by[col] = update.tag
        np.maximum.at(lower, update.columns, update.lower)
        np.minimum.at(upper, update.columns, update.upper)
        bad = update.columns[lower[update.columns] > upper[update.columns] + FIX_TOL]
        if bad.size:
            col = int(bad[0])
            raise InfeasibleBoundaryError(
                f"Column {col} has empty range [{lower[col]}, {upper[col]}] after {update.tag}"
            )
    # Keep pins exact after intersecting with the family defaults.
    fixed = ~np.isnan(pinned)
    lower[fixed] = pinned[fixed]
    upper[fixed] = pinned[fixed]


def _stack(
    blocks: Sequence[RowBlock], n: int
) -> tuple[sparse.csr_matrix, np.ndarray, np.ndarray, tuple[RowTag, ...]]:
    if not blocks:
        return sparse.csr_matrix((0, n)), np.zeros(0), np.zeros(0), ()
    matrix = sparse.vstack([b.matrix for b in blocks], format="csr")
    lower = np.concatenate([b.lower for b in blocks])
    upper = np.concatenate([b.upper for b in blocks])
    tags = tuple(tag for b in blocks for tag in b.tags)
    return matrix, lower, upper, tags
