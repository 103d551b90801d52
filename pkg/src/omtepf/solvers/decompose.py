"""Solves a continuous program as independent blocks."""

from __future__ import annotations

import concurrent.futures
import dataclasses
import logging
import time
from typing import TYPE_CHECKING

import numpy as np
from scipy import sparse
from scipy.sparse import csgraph

from omtepf.assembler.problem import ProblemMatrices, QuadraticConstraint, SquaredNormTerm
from omtepf.exceptions import InfeasibleBoundaryError
from omtepf.solvers.audit import audit
from omtepf.solvers.interior_point import solve_convex_problem
from omtepf.solvers.types import SolveResult, SolveStatus
from omtepf.transformers.presolve import FixedColumnEliminator, SingletonRowReducer

if TYPE_CHECKING:
    from omtepf.solvers.interior_point import ConvexOutcome
    from omtepf.solvers.types import SolveRequest

logger = logging.getLogger(__name__)


@dataclasses.dataclass(frozen=True, eq=False)
class Block:
    """One independent part of a program.

    Args:
        columns: Columns of the part, ascending.
        eq_rows: Equality rows touching only these columns.
        ineq_rows: Inequality rows touching only these columns.
        norm_terms: Positions of the norm terms of the part.
        constraints: Positions of the quadratic constraints of the part.
        key: Smallest group key among the columns, or -1.
    """

    columns: np.ndarray
    eq_rows: np.ndarray
    ineq_rows: np.ndarray
    norm_terms: np.ndarray
    constraints: np.ndarray
    key: int = -1


def split_blocks(problem: ProblemMatrices, keys: np.ndarray | None = None) -> list[Block]:
    """Splits the columns of a program into independent blocks.

    Two columns share a block when a row, a norm term or a quadratic constraint
    couples them, or when they carry the same group key.

    Args:
        problem: The program.
        keys: Optional nonnegative group key per column; negative keys group nothing.

    Returns:
        The blocks ordered by key, then by first column.
    """
    n = problem.column_count
    eq_count, ineq_count = problem.a_eq.shape[0], problem.a_ineq.shape[0]
    terms, constraints = problem.norm_terms, problem.quadratic_constraints
    keys = np.full(n, -1, dtype=np.int64) if keys is None else np.asarray(keys, dtype=np.int64)
    distinct = np.unique(keys[keys >= 0])

    starts = np.cumsum([n, eq_count, ineq_count, len(terms), len(constraints)])
    node_count = int(starts[-1]) + distinct.size
    heads: list[np.ndarray] = []
    tails: list[np.ndarray] = []

    for matrix, start in [(problem.a_eq, starts[0]), (problem.a_ineq, starts[1])]:
        coo = sparse.coo_matrix(matrix)
        heads.append(coo.col.astype(np.int64))
        tails.append(coo.row.astype(np.int64) + start)
    for i, term in enumerate(terms):
        heads.append(np.asarray(term.columns, dtype=np.int64))
        tails.append(np.full(len(term.columns), starts[2] + i))
    for i, constraint in enumerate(constraints):
        cols = [*constraint.squares, *(c for c, _ in constraint.linear)]
        heads.append(np.asarray(cols, dtype=np.int64))
        tails.append(np.full(len(cols), starts[3] + i))
    keyed = np.flatnonzero(keys >= 0)
    heads.append(keyed)
    tails.append(starts[4] + np.searchsorted(distinct, keys[keyed]))

    head, tail = np.concatenate(heads), np.concatenate(tails)
    graph = sparse.coo_matrix(
        (np.ones(head.size), (head, tail)), shape=(node_count, node_count)
    )
    _, labels = csgraph.connected_components(graph, directed=False)

    def members(first: int, stop: int, label: int) -> np.ndarray:
        return np.flatnonzero(labels[first:stop] == label)

    blocks = []
    for label in np.unique(labels[:n]).tolist():
        columns = members(0, n, label)
        block_keys = keys[columns]
        keyed_here = block_keys[block_keys >= 0]
        blocks.append(
            Block(
                columns=columns,
                eq_rows=members(starts[0], starts[1], label),
                ineq_rows=members(starts[1], starts[2], label),
                norm_terms=members(starts[2], starts[3], label),
                constraints=members(starts[3], starts[4], label),
                key=int(keyed_here.min()) if keyed_here.size else -1,
            )
        )
    blocks.sort(key=lambda b: (b.key, int(b.columns[0])))
    logger.debug("Split %d columns into %d blocks", n, len(blocks))
    return blocks


def extract_block(problem: ProblemMatrices, block: Block) -> ProblemMatrices:
    """The program restricted to one block. The offset stays with the whole program."""
    remap = np.full(problem.column_count, -1, dtype=np.int64)
    remap[block.columns] = np.arange(block.columns.size)
    a_eq = problem.a_eq.tocsr()[block.eq_rows][:, block.columns]
    a_ineq = problem.a_ineq.tocsr()[block.ineq_rows][:, block.columns]
    return ProblemMatrices(
        index=None,
        binary=problem.binary[block.columns],
        a_eq=a_eq.tocsr(),
        b_eq=problem.b_eq[block.eq_rows],
        eq_tags=tuple(problem.eq_tags[i] for i in block.eq_rows),
        a_ineq=a_ineq.tocsr(),
        ineq_lower=problem.ineq_lower[block.ineq_rows],
        ineq_upper=problem.ineq_upper[block.ineq_rows],
        ineq_tags=tuple(problem.ineq_tags[i] for i in block.ineq_rows),
        lower=problem.lower[block.columns],
        upper=problem.upper[block.columns],
        c=problem.c[block.columns],
        p=None
        if problem.p is None
        else sparse.csc_matrix(problem.p)[block.columns][:, block.columns],
        norm_terms=tuple(
            SquaredNormTerm(
                columns=tuple(int(remap[c]) for c in problem.norm_terms[i].columns),
                quartic=problem.norm_terms[i].quartic,
                quadratic=problem.norm_terms[i].quadratic,
                constant=problem.norm_terms[i].constant,
                tag=problem.norm_terms[i].tag,
            )
            for i in block.norm_terms
        ),
        quadratic_constraints=tuple(
            QuadraticConstraint(
                squares=tuple(int(remap[c]) for c in problem.quadratic_constraints[i].squares),
                linear=tuple(
                    (int(remap[c]), v) for c, v in problem.quadratic_constraints[i].linear
                ),
                rhs=problem.quadratic_constraints[i].rhs,
                tag=problem.quadratic_constraints[i].tag,
            )
            for i in block.constraints
        ),
    )


def solve_decomposed(request: SolveRequest, keys: np.ndarray | None = None) -> SolveResult:
    """Solves a continuous program block by block.

    The program is presolved, split into independent blocks and every block is
    solved by the interior-point method, in parallel when the options allow more
    than one thread. The merged point is audited against the whole program.

    Args:
        request: A request without binary columns.
        keys: Optional group key per column of the program, e.g. the time step.

    Raises:
        ValueError: The program has binary columns.

    Returns:
        The result. A failing block makes the whole result fail; its message names
        the block key.
    """
    problem, options = request.problem, request.options
    if problem.has_binaries:
        raise ValueError("solve_decomposed requires a program without binary columns")
    start = time.perf_counter()

    reducer, eliminator = SingletonRowReducer(), FixedColumnEliminator()
    try:
        reduced = eliminator.transform(reducer.transform(problem))
    except InfeasibleBoundaryError as e:
        return SolveResult.failed(SolveStatus.INFEASIBLE, str(e), time.perf_counter() - start)

    kept_keys = None if keys is None else np.asarray(keys)[eliminator.kept_columns]
    blocks = split_blocks(reduced, kept_keys)
    parts = [extract_block(reduced, block) for block in blocks]
    logger.info("Solving %d blocks with %d threads", len(blocks), options.threads)

    def run(part: ProblemMatrices) -> ConvexOutcome:
        return solve_convex_problem(part, options)

    if options.threads > 1:
        with concurrent.futures.ThreadPoolExecutor(max_workers=options.threads) as pool:
            outcomes = list(pool.map(run, parts))
    else:
        outcomes = [run(part) for part in parts]

    x_reduced = np.zeros(reduced.column_count)
    for block, outcome in zip(blocks, outcomes):
        if outcome.status is not SolveStatus.OPTIMAL:
            elapsed = time.perf_counter() - start
            logger.info("Block %d stopped with status %s", block.key, outcome.status.value)
            return SolveResult.failed(
                outcome.status, f"block {block.key}: {outcome.message}", elapsed
            )
        x_reduced[block.columns] = outcome.x

    x = eliminator.postsolve(x_reduced)
    report = audit(problem, x, options.feasibility_tol)
    elapsed = time.perf_counter() - start
    status = SolveStatus.OPTIMAL if report.ok else SolveStatus.LIMIT
    return SolveResult(
        status=status,
        x=x,
        objective=problem.objective(x),
        residuals=report.residuals,
        wall_time=elapsed,
        message=f"{len(blocks)} blocks" if report.ok else str(report),
    )
