"""Model export in CPLEX LP format and solution import.

The exported file is readable by common external solvers. Quartic norm terms are
written through their epigraph form, so the file only holds linear and quadratic
expressions. Solutions come back as JSON:

    {"status": "optimal", "objective": 1.5, "values": {"Q_B_0_1": 1.0, ...}}
"""

from __future__ import annotations

import dataclasses
import json
import logging
import re
from pathlib import Path
from typing import TYPE_CHECKING

import numpy as np
import pydantic
from scipy import sparse

from omtepf.assembler.problem import ProblemMatrices, QuadraticConstraint, RowTag
from omtepf.exceptions import AuditError
from omtepf.solvers.audit import audit
from omtepf.solvers.types import SolveResult, SolveStatus
from omtepf.transformers.quartic_epigraph import QuarticEpigraph

if TYPE_CHECKING:
    from omtepf.solvers.types import SolveRequest

logger = logging.getLogger(__name__)

TERMS_PER_LINE = 6
_OFFSET_COMMENT = "\\ Objective offset:"
_NAME_RE = re.compile(r"[^A-Za-z0-9_.]")
_STATEMENT_RE = re.compile(r"^\s*([A-Za-z_][\w.]*)\s*:(.*)$")
_TOKEN_RE = re.compile(
    r"\s*(<=|>=|=<|=>|=|\[|\]|\^|\*|/|[+-]"
    r"|(?:\d+\.?\d*|\.\d+)(?:[eE][+-]?\d+)?"
    r"|[A-Za-z_][\w.]*)"
)
_SECTIONS = {
    "minimize": "objective",
    "minimise": "objective",
    "subject to": "constraints",
    "st": "constraints",
    "s.t.": "constraints",
    "bounds": "bounds",
    "binaries": "binaries",
    "binary": "binaries",
    "end": "end",
}


def column_labels(problem: ProblemMatrices) -> tuple[str, ...]:
    """LP-safe unique names of the columns."""
    labels: list[str] = []
    seen: set[str] = set()
    for col in range(problem.column_count):
        label = _NAME_RE.sub("_", problem.name(col))
        if not label or label[0].isdigit():
            label = f"x_{label}"
        while label in seen:
            label = f"{label}_{col}"
        seen.add(label)
        labels.append(label)
    return tuple(labels)


def _number(value: float) -> str:
    return repr(float(value))


def _bound(value: float) -> str:
    if np.isposinf(value):
        return "+infinity"
    if np.isneginf(value):
        return "-infinity"
    return _number(value)


def _expression(terms: list[str]) -> str:
    lines = [" ".join(terms[i : i + TERMS_PER_LINE]) for i in range(0, len(terms), TERMS_PER_LINE)]
    return "\n   ".join(lines)


def _linear_terms(cols: np.ndarray, vals: np.ndarray, labels: tuple[str, ...]) -> list[str]:
    terms = []
    for col, val in zip(cols.tolist(), vals.tolist()):
        if val == 0:
            continue
        sign = "-" if val < 0 else "+"
        terms.append(f"{sign} {_number(abs(val))} {labels[col]}")
    return terms


def _exportable(problem: ProblemMatrices) -> ProblemMatrices:
    """Epigraph form of the program with every remaining norm term moved into P."""
    if any(t.quartic < 0 for t in problem.norm_terms):
        raise ValueError("Norm terms with a negative quartic coefficient cannot be exported")
    concave = [t for t in problem.norm_terms if not t.convex]
    convex = problem.replace(norm_terms=tuple(t for t in problem.norm_terms if t.convex))
    lifted = QuarticEpigraph().transform(convex)
    if not concave:
        return lifted

    n = lifted.column_count
    rows = [c for t in concave for c in t.columns]
    vals = [2.0 * t.quadratic for t in concave for _ in t.columns]
    extra = sparse.csc_matrix((vals, (rows, rows)), shape=(n, n))
    p = extra if lifted.p is None else sparse.csc_matrix(lifted.p) + extra
    offset = lifted.offset + sum(t.constant for t in concave)
    return lifted.replace(p=p, offset=offset)


def export_model(request: SolveRequest, path: str | Path) -> Path:
    """Writes the program of `request` as a CPLEX LP file.

    Coefficients are written with full float precision. The objective offset is kept
    in a comment line, since the format has no constant term.

    Args:
        request: The request to export.
        path: Destination file.

    Raises:
        ValueError: A norm term has a negative quartic coefficient.

    Returns:
        The path written.
    """
    problem = _exportable(request.problem)
    labels = column_labels(problem)
    path = Path(path)
    out: list[str] = ["\\ omtepf model", f"{_OFFSET_COMMENT} {_number(problem.offset)}"]

    out.append("Minimize")
    objective = _linear_terms(np.flatnonzero(problem.c), problem.c[problem.c != 0], labels)
    if problem.p is not None and problem.p.nnz:
        upper = sparse.triu(sparse.csc_matrix(problem.p)).tocoo()
        quad = []
        for i, j, v in sorted(zip(upper.row.tolist(), upper.col.tolist(), upper.data.tolist())):
            coef = v if i == j else 2.0 * v
            if coef == 0:
                continue
            sign = "-" if coef < 0 else "+"
            body = f"{labels[i]} ^ 2" if i == j else f"{labels[i]} * {labels[j]}"
            quad.append(f"{sign} {_number(abs(coef))} {body}")
        if quad:
            objective += ["+ ["] + quad + ["] / 2"]
    out.append(f" obj: {_expression(objective)}")

    out.append("Subject To")
    a_eq = problem.a_eq.tocsr()
    for row in range(a_eq.shape[0]):
        lo, hi = a_eq.indptr[row], a_eq.indptr[row + 1]
        body = _expression(_linear_terms(a_eq.indices[lo:hi], a_eq.data[lo:hi], labels))
        body = body or f"0 {labels[0]}"
        out.append(f" e{row}: {body} = {_number(problem.b_eq[row])}")
    a_ineq = problem.a_ineq.tocsr()
    for row in range(a_ineq.shape[0]):
        lo, hi = a_ineq.indptr[row], a_ineq.indptr[row + 1]
        body = _expression(_linear_terms(a_ineq.indices[lo:hi], a_ineq.data[lo:hi], labels))
        body = body or f"0 {labels[0]}"
        lower, upper = problem.ineq_lower[row], problem.ineq_upper[row]
        if lower == upper:
            out.append(f" i{row}: {body} = {_number(upper)}")
            continue
        if np.isfinite(upper):
            out.append(f" i{row}_up: {body} <= {_number(upper)}")
        if np.isfinite(lower):
            out.append(f" i{row}_lo: {body} >= {_number(lower)}")
    for row, constraint in enumerate(problem.quadratic_constraints):
        cols = np.asarray([c for c, _ in constraint.linear], dtype=np.int64)
        vals = np.asarray([v for _, v in constraint.linear], dtype=float)
        terms = _linear_terms(cols, vals, labels)
        squares = " + ".join(f"{labels[c]} ^ 2" for c in constraint.squares)
        terms.append(f"+ [ {squares} ]")
        out.append(f" q{row}: {_expression(terms)} <= {_number(constraint.rhs)}")

    out.append("Bounds")
    for col, label in enumerate(labels):
        lower, upper = problem.lower[col], problem.upper[col]
        if lower == upper:
            out.append(f" {label} = {_number(lower)}")
        elif np.isneginf(lower) and np.isposinf(upper):
            out.append(f" {label} free")
        else:
            out.append(f" {_bound(lower)} <= {label} <= {_bound(upper)}")

    binaries = [labels[c] for c in np.flatnonzero(problem.binary)]
    if binaries:
        out.append("Binaries")
        out.extend(f" {label}" for label in binaries)
    out.append("End")

    path.write_text("\n".join(out) + "\n")
    logger.info("Exported %d columns to %s", problem.column_count, path)
    return path


@dataclasses.dataclass
class LpConstraint:
    name: str
    linear: dict[str, float]
    squares: dict[str, float]
    sense: str
    rhs: float


@dataclasses.dataclass
class LpModel:
    """Contents of an LP file, keyed by column name."""

    columns: list[str] = dataclasses.field(default_factory=list)
    objective: dict[str, float] = dataclasses.field(default_factory=dict)
    quadratic: dict[tuple[str, str], float] = dataclasses.field(default_factory=dict)
    offset: float = 0.0
    constraints: list[LpConstraint] = dataclasses.field(default_factory=list)
    bounds: dict[str, tuple[float, float]] = dataclasses.field(default_factory=dict)
    binaries: list[str] = dataclasses.field(default_factory=list)

    def to_problem(self) -> ProblemMatrices:
        """Rebuilds the program, columns in the order of the Bounds section."""
        position = {name: i for i, name in enumerate(self.columns)}
        n = len(self.columns)

        def row_matrix(rows: list[LpConstraint]) -> sparse.csr_matrix:
            data, ri, ci = [], [], []
            for r, con in enumerate(rows):
                for name, coef in con.linear.items():
                    data.append(coef)
                    ri.append(r)
                    ci.append(position[name])
            return sparse.csr_matrix((data, (ri, ci)), shape=(len(rows), n))

        linear = [con for con in self.constraints if not con.squares]
        eq = [con for con in linear if con.sense == "="]
        ineq = [con for con in linear if con.sense != "="]
        quadratic = [
            QuadraticConstraint(
                squares=tuple(position[name] for name in con.squares),
                linear=tuple((position[name], coef) for name, coef in con.linear.items()),
                rhs=con.rhs,
                tag=con.name,
            )
            for con in self.constraints
            if con.squares
        ]

        # objective terms q·xᵢxⱼ become ½xᵀPx entries
        p = None
        if self.quadratic:
            data, ri, ci = [], [], []
            for (a, b), coef in self.quadratic.items():
                i, j = position[a], position[b]
                if i == j:
                    data.append(2.0 * coef)
                    ri.append(i)
                    ci.append(i)
                else:
                    data.extend([coef, coef])
                    ri.extend([i, j])
                    ci.extend([j, i])
            p = sparse.csc_matrix((data, (ri, ci)), shape=(n, n))

        c = np.zeros(n)
        for name, coef in self.objective.items():
            c[position[name]] += coef
        lower = np.array([self.bounds[name][0] for name in self.columns])
        upper = np.array([self.bounds[name][1] for name in self.columns])
        binary = np.zeros(n, dtype=bool)
        binary[[position[name] for name in self.binaries]] = True
        return ProblemMatrices(
            index=None,
            binary=binary,
            a_eq=row_matrix(eq),
            b_eq=np.array([con.rhs for con in eq], dtype=float),
            eq_tags=tuple(RowTag(con.name, 0, 0) for con in eq),
            a_ineq=row_matrix(ineq),
            ineq_lower=np.array(
                [con.rhs if con.sense == ">=" else -np.inf for con in ineq], dtype=float
            ),
            ineq_upper=np.array(
                [con.rhs if con.sense == "<=" else np.inf for con in ineq], dtype=float
            ),
            ineq_tags=tuple(RowTag(con.name, 0, 0) for con in ineq),
            lower=lower,
            upper=upper,
            c=c,
            offset=self.offset,
            p=p,
            quadratic_constraints=tuple(quadratic),
            column_names=tuple(self.columns),
        )


def _tokens(text: str) -> list[str]:
    tokens = []
    pos = 0
    text = text.rstrip()
    while pos < len(text):
        match = _TOKEN_RE.match(text, pos)
        if match is None:
            raise AuditError(f"Cannot parse LP expression near {text[pos:pos + 20]!r}")
        tokens.append(match.group(1))
        pos = match.end()
        while pos < len(text) and text[pos].isspace():
            pos += 1
    return tokens


def _parse_number(token: str) -> float | None:
    if token.lower() in ("inf", "infinity"):
        return np.inf
    try:
        return float(token)
    except ValueError:
        return None


def _parse_expression(
    tokens: list[str],
) -> tuple[dict[str, float], dict[tuple[str, str], float], int]:
    """Parses linear and bracketed quadratic terms up to a comparison operator.

    Returns the linear terms, the quadratic terms and the position of the first
    unconsumed token.
    """
    linear: dict[str, float] = {}
    quadratic: dict[tuple[str, str], float] = {}
    sign, coef = 1.0, None
    in_bracket = False
    bracket: dict[tuple[str, str], float] = {}
    i = 0
    while i < len(tokens):
        token = tokens[i]
        if token in ("<=", ">=", "=<", "=>", "="):
            break
        if token in ("+", "-"):
            sign = -sign if token == "-" else sign
        elif token == "[":
            in_bracket, bracket, sign = True, {}, 1.0
        elif token == "]":
            in_bracket = False
            scale = 1.0
            if tokens[i + 1 : i + 2] == ["/"] and i + 2 < len(tokens):
                scale = 1.0 / float(tokens[i + 2])
                i += 2
            for key, value in bracket.items():
                quadratic[key] = quadratic.get(key, 0.0) + value * scale
            sign = 1.0
        elif (number := _parse_number(token)) is not None:
            coef = number
        else:
            value = sign * (1.0 if coef is None else coef)
            if tokens[i + 1 : i + 2] == ["^"]:
                key = (token, token)
                i += 2
            elif tokens[i + 1 : i + 2] == ["*"]:
                key = (token, tokens[i + 2])
                i += 2
            else:
                key = None
            if key is None:
                linear[token] = linear.get(token, 0.0) + value
            elif in_bracket:
                bracket[key] = bracket.get(key, 0.0) + value
            else:
                raise AuditError(f"Quadratic term outside brackets: {token}")
            sign, coef = 1.0, None
        i += 1
    return linear, quadratic, i


def _statements(lines: list[str]) -> list[tuple[str | None, str]]:
    statements: list[tuple[str | None, str]] = []
    for line in lines:
        match = _STATEMENT_RE.match(line)
        if match:
            statements.append((match.group(1), match.group(2)))
        elif statements:
            name, body = statements[-1]
            statements[-1] = (name, f"{body} {line.strip()}")
        else:
            statements.append((None, line.strip()))
    return statements


def read_model(path: str | Path) -> LpModel:
    """Parses an LP file written by `export_model`.

    Raises:
        AuditError: The file is malformed.
    """
    sections: dict[str, list[str]] = {"objective": [], "constraints": [], "bounds": [], "binaries": []}
    model = LpModel()
    current = None
    for raw in Path(path).read_text().splitlines():
        line = raw.rstrip()
        if line.startswith(_OFFSET_COMMENT):
            model.offset = float(line[len(_OFFSET_COMMENT) :])
            continue
        if not line.strip() or line.lstrip().startswith("\\"):
            continue
        keyword = line.strip().lower()
        if keyword in _SECTIONS:
            current = _SECTIONS[keyword]
            if current == "end":
                break
            continue
        if current is None:
            raise AuditError(f"Content before the first section: {line!r}")
        sections[current].append(line)

    for _, body in _statements(sections["objective"]):
        linear, quadratic, _ = _parse_expression(_tokens(body))
        model.objective.update(linear)
        model.quadratic.update(quadratic)

    for name, body in _statements(sections["constraints"]):
        tokens = _tokens(body)
        linear, quadratic, at = _parse_expression(tokens)
        if at >= len(tokens):
            raise AuditError(f"Constraint {name} has no comparison")
        sense = {"=<": "<=", "=>": ">="}.get(tokens[at], tokens[at])
        rhs = _parse_number("".join(tokens[at + 1 :]))
        if rhs is None:
            raise AuditError(f"Constraint {name} has no right-hand side")
        squares = {a: v for (a, b), v in quadratic.items() if a == b}
        if len(squares) != len(quadratic):
            raise AuditError(f"Constraint {name} has cross terms")
        model.constraints.append(LpConstraint(name or "", linear, squares, sense, rhs))

    for line in sections["bounds"]:
        tokens = line.split()
        if len(tokens) == 2 and tokens[1].lower() == "free":
            name, bound = tokens[0], (-np.inf, np.inf)
        elif len(tokens) == 3 and tokens[1] == "=":
            value = float(tokens[2])
            name, bound = tokens[0], (value, value)
        elif len(tokens) == 5 and tokens[1] == tokens[3] == "<=":
            name, bound = tokens[2], (_parse_number(tokens[0]), _parse_number(tokens[4]))
            if bound[0] is None or bound[1] is None:
                raise AuditError(f"Malformed bound: {line!r}")
        else:
            raise AuditError(f"Malformed bound: {line!r}")
        model.columns.append(name)
        model.bounds[name] = bound

    for line in sections["binaries"]:
        model.binaries.extend(line.split())

    known = set(model.columns)
    used = set(model.objective) | {n for pair in model.quadratic for n in pair}
    for con in model.constraints:
        used |= set(con.linear) | set(con.squares)
    if used - known:
        raise AuditError(f"Columns without bounds: {sorted(used - known)[:5]}")
    return model


class SolutionFile(pydantic.BaseModel):
    """Solution exchanged with external solvers."""

    model_config = {"extra": "forbid"}

    status: SolveStatus
    objective: float | None = None
    values: dict[str, float] = pydantic.Field(default_factory=dict)


def write_solution(path: str | Path, result: SolveResult, problem: ProblemMatrices) -> Path:
    """Writes a result in the solution-file format, keyed by the exported names."""
    path = Path(path)
    values = {}
    if result.x is not None:
        values = dict(zip(column_labels(problem), map(float, result.x)))
    objective = None if np.isnan(result.objective) else float(result.objective)
    solution = SolutionFile(status=result.status, objective=objective, values=values)
    path.write_text(solution.model_dump_json(indent=1))
    return path


def import_result(path: str | Path, request: SolveRequest) -> SolveResult:
    """Reads a solution file and re-audits it against the program of `request`.

    Values of auxiliary columns added at export are ignored. The objective is
    recomputed from the program.

    Raises:
        AuditError: The file is malformed, a column has no value, or the point fails
            the residual audit.
    """
    problem = request.problem
    try:
        solution = SolutionFile.model_validate(json.loads(Path(path).read_text()))
    except (OSError, json.JSONDecodeError, pydantic.ValidationError) as e:
        raise AuditError(f"Malformed solution file {path}: {e}") from e

    if solution.status in (SolveStatus.INFEASIBLE, SolveStatus.UNBOUNDED) or not solution.values:
        return SolveResult.failed(solution.status, f"external solver reported {solution.status.value}")

    labels = column_labels(problem)
    missing = [label for label in labels if label not in solution.values]
    if missing:
        raise AuditError(f"Solution file lacks {len(missing)} columns, e.g. {missing[:3]}")
    x = np.array([solution.values[label] for label in labels])

    report = audit(problem, x, request.options.feasibility_tol)
    if not report.ok:
        raise AuditError(f"Imported solution rejected: {report}")
    return SolveResult(
        status=solution.status,
        x=x,
        objective=problem.objective(x),
        residuals=report.residuals,
        message=f"imported from {path}",
    )
