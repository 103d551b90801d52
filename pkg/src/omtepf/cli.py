"""Command line interface.

    omtepf run --model symmetrica --scenario coordinated --out results/
    omtepf validate --model my_city.json

`run` exits with 0 when every stage is optimal, 2 when a stage stopped at a
budget with an incumbent, 3 when a stage is infeasible and 1 on any other error,
a result that fails its audit included.
"""

from __future__ import annotations

import argparse
import logging
import os
import sys
from pathlib import Path

from omtepf.config import LOG_LEVEL_ENV, ScenarioConfig, ScenarioKind, SolverOptions
from omtepf.exceptions import OmtepfError, StageInfeasibleError
from omtepf.frontend import _describe_error, load_model, run_scenario
from omtepf.petri.validation import validate_net
from omtepf.scenarios.report import write_report
from omtepf.solvers.backend import Backend
from omtepf.solvers.types import SolveStatus
from omtepf.ten.taxonomy import CHARGING_FAMILIES, ELECTRIC_FAMILIES, TRANSPORT_FAMILIES

EXIT_OK = 0
EXIT_ERROR = 1
EXIT_LIMIT = 2
EXIT_INFEASIBLE = 3


def _parse_args(argv: list[str] | None = None) -> argparse.Namespace:
    parser = argparse.ArgumentParser(
        prog="omtepf",
        description="Optimal operation of a transportation-electricity nexus.",
    )
    parser.add_argument(
        "--log-level",
        default=os.environ.get(LOG_LEVEL_ENV, "WARNING"),
        choices=["DEBUG", "INFO", "WARNING", "ERROR"],
    )
    commands = parser.add_subparsers(dest="command", required=True)

    def model_options(sub: argparse.ArgumentParser) -> None:
        sub.add_argument("--model", default="symmetrica", help="Bundled name or model file.")
        sub.add_argument("--ev-count", type=int)
        sub.add_argument("--horizon-steps", type=int)

    run = commands.add_parser("run", help="Run an operating scenario.")
    model_options(run)
    run.add_argument(
        "--scenario", choices=[k.value for k in ScenarioKind], default=ScenarioKind.UNCOORDINATED.value
    )
    run.add_argument("--solver", choices=[b.value for b in Backend], default=Backend.BUILTIN.value)
    run.add_argument("--out", type=Path, required=True, help="Directory of the report files.")
    run.add_argument("--seed", type=int)
    run.add_argument("--node-limit", type=int)
    run.add_argument("--time-limit", type=float)
    run.add_argument("--threads", type=int)

    validate = commands.add_parser("validate", help="Build a model and check its nets.")
    model_options(validate)
    return parser.parse_args(argv)


def _config(args: argparse.Namespace, scenario: ScenarioKind) -> ScenarioConfig:
    return ScenarioConfig(
        ev_count=args.ev_count,
        horizon_steps=args.horizon_steps,
        scenario=scenario,
    )


def _run(args: argparse.Namespace) -> int:
    scenario = ScenarioKind(args.scenario)
    options = SolverOptions().with_updates(
        seed=args.seed,
        node_limit=args.node_limit,
        time_limit=args.time_limit,
        threads=args.threads,
    )
    model = load_model(args.model, _config(args, scenario))
    try:
        result = run_scenario(
            model, scenario, options, Backend(args.solver), workdir=args.out / "solver"
        )
    except StageInfeasibleError as e:
        print(_describe_error(e), file=sys.stderr)
        if e.result is not None and e.result.status is SolveStatus.LIMIT:
            return EXIT_LIMIT
        return EXIT_INFEASIBLE
    write_report(result, model, args.out)
    print(f"{scenario.value}: total {result.total:.4f} ({result.status.value})")
    for label, value in result.costs.as_dict().items():
        print(f"  {label:<6}{value:>12.4f}")
    return EXIT_OK if result.status is SolveStatus.OPTIMAL else EXIT_LIMIT


def _validate(args: argparse.Namespace) -> int:
    model = load_model(args.model, _config(args, ScenarioKind.UNCOORDINATED))
    report = validate_net(model.net)
    print(
        f"{model.net.place_count} places, {model.net.transition_count} transitions "
        f"({model.transitions(ELECTRIC_FAMILIES).size} electric, "
        f"{model.transitions(TRANSPORT_FAMILIES).size} transport, "
        f"{model.transitions(CHARGING_FAMILIES).size} charging), K = {model.steps}"
    )
    print(report)
    return EXIT_OK if report.ok else EXIT_ERROR


def main(argv: list[str] | None = None) -> int:
    args = _parse_args(argv)
    logging.basicConfig(
        level=args.log_level, format="%(asctime)s %(name)s %(levelname)s %(message)s"
    )
    try:
        if args.command == "run":
            return _run(args)
        return _validate(args)
    except (OmtepfError, OSError) as e:
        print(_describe_error(e), file=sys.stderr)
        return EXIT_ERROR


if __name__ == "__main__":
    raise SystemExit(main())
