"""External solvers driven through a command template."""

from __future__ import annotations

import logging
import shlex
import subprocess
import time
from pathlib import Path
from typing import TYPE_CHECKING

from omtepf.config import SOLVER_COMMAND_ENV, solver_command_template
from omtepf.exceptions import ConfigurationError
from omtepf.solvers.lp_format import export_model, import_result
from omtepf.solvers.types import SolveResult, SolveStatus

if TYPE_CHECKING:
    from omtepf.solvers.types import SolveRequest

logger = logging.getLogger(__name__)

MODEL_FILE = "model.lp"
SOLUTION_FILE = "solution.json"


def solve_external(
    request: SolveRequest, workdir: str | Path, command: str | None = None
) -> SolveResult:
    """Exports the program, runs an external solver and imports its solution.

    The command template holds `{model}` and `{solution}` placeholders. The solver
    must write the JSON solution format read by `import_result`.

    Args:
        request: The request.
        workdir: Directory for the model and solution files.
        command: The template. Defaults to the OMTEPF_SOLVER_COMMAND variable.

    Raises:
        ConfigurationError: No command template is set.
        AuditError: The solution file is malformed or fails the residual audit.

    Returns:
        The imported result.
    """
    template = command or solver_command_template()
    if template is None:
        raise ConfigurationError(f"No external solver command; set {SOLVER_COMMAND_ENV}")

    workdir = Path(workdir)
    workdir.mkdir(parents=True, exist_ok=True)
    model = export_model(request, workdir / MODEL_FILE)
    solution = workdir / SOLUTION_FILE
    solution.unlink(missing_ok=True)
    argv = shlex.split(template.format(model=shlex.quote(str(model)), solution=shlex.quote(str(solution))))

    start = time.perf_counter()
    logger.info("Running external solver: %s", " ".join(argv))
    try:
        proc = subprocess.run(  # noqa: S603
            argv,
            capture_output=True,
            text=True,
            timeout=request.options.time_limit,
            check=False,
        )
    except subprocess.TimeoutExpired:
        return SolveResult.failed(
            SolveStatus.LIMIT, "external solver timed out", time.perf_counter() - start
        )
    elapsed = time.perf_counter() - start
    if proc.returncode != 0 or not solution.exists():
        logger.warning("External solver exited with %d: %s", proc.returncode, proc.stderr.strip())
        return SolveResult.failed(
            SolveStatus.LIMIT, f"external solver exited with {proc.returncode}", elapsed
        )
    return import_result(solution, request).replace(wall_time=elapsed)
