from __future__ import annotations

from typing import TYPE_CHECKING

if TYPE_CHECKING:
    from collections.abc import Mapping

    from omtepf.scenarios.result import ScenarioResult

_COST_NAMES = {
    "Z_TT": "Transportation cost",
    "Z_TQ": "Queuing cost",
    "Z_EGC": "Dispatchable generation cost",
    "Z_EGS": "Solar generation cost",
    "Z_EC": "Charging revenue",
    "Z_EDS": "Demand revenue",
}


class ScenarioTable:
    """Cost and energy tables of scenario results with LaTeX representation."""

    _results: dict[str, ScenarioResult]
    _str: str
    _latex: str

    def __init__(self, results: Mapping[str, ScenarioResult], error: str | None = None) -> None:
        self._results = dict(results)
        if error is not None:
            self._str = self._latex = error
        else:
            self._str = _plain(self._results)
            self._latex = _latex(self._results)

    def __getitem__(self, name: str) -> ScenarioResult:
        return self._results[name]

    def __str__(self) -> str:
        return self._str

    def _repr_latex_(self) -> str:
        """IPython hook to display LaTeX visualization.

        See https://ipython.readthedocs.io/en/stable/config/integrating.html
        """
        return self._latex


def _rows(results: dict[str, ScenarioResult]) -> list[tuple[str, list[float]]]:
    rows = [
        (name, [r.costs.as_dict()[label] for r in results.values()])
        for label, name in _COST_NAMES.items()
    ]
    rows.append(("Total", [r.total for r in results.values()]))
    return rows


def _plain(results: dict[str, ScenarioResult]) -> str:
    width = max(len(name) for name in [*_COST_NAMES.values(), "Total"])
    lines = [" " * width + "".join(f"  {name:>14}" for name in results)]
    for name, values in _rows(results):
        lines.append(f"{name:<{width}}" + "".join(f"  {v:>14.4f}" for v in values))
    lines.append("")
    for name, result in results.items():
        for row in result.energy:
            lines.append(
                f"{name} {row.category}: cost {row.cost:.4f}, energy {row.energy:.4f}, "
                f"unit cost {row.unit_cost:.4f}"
            )
    return "\n".join(lines)


def _latex(results: dict[str, ScenarioResult]) -> str:
    header = " & ".join(["", *(rf"\mathrm{{{name}}}" for name in results)])
    body = [header]
    for name, values in _rows(results):
        body.append(" & ".join([rf"\mathrm{{{name}}}".replace(" ", r"\ "), *(f"{v:.2f}" for v in values)]))
    cols = "l" + "r" * len(results)
    rows = r" \\ ".join(body)
    return rf"$$ \begin{{array}}{{{cols}}} {rows} \end{{array}} $$"
