"""Names of decision variables for model files and LaTeX output."""

from __future__ import annotations

from typing import TYPE_CHECKING

from omtepf.assembler.variable_index import (
    Q_B,
    Q_E,
    Q_EL,
    Q_SL,
    U_MINUS,
    U_PLUS,
    UL_MINUS,
    UL_PLUS,
)

if TYPE_CHECKING:
    from omtepf.assembler.variable_index import VariableIndex

_LATEX_SYMBOLS = {
    Q_B: "Q_{{B,{k}}}",
    Q_E: "Q_{{E,{k}}}",
    Q_SL: "Q_{{SL,{k}}}",
    Q_EL: "Q_{{EL,{k}}}",
    U_MINUS: "U^{{-}}_{{{k}}}",
    U_PLUS: "U^{{+}}_{{{k}}}",
    UL_MINUS: "U^{{-}}_{{L,{k}}}",
    UL_PLUS: "U^{{+}}_{{L,{k}}}",
}


def lp_name(family: str, k: int, element: int) -> str:
    """Name usable in LP-format model files, e.g. Q_B_3_12."""
    return f"{family}_{element}_{k}"


def latex_name(family: str, k: int, element: int) -> str:
    """LaTeX name, e.g. Q_{B,12}[3] or U^{-}_{12}[3]."""
    template = _LATEX_SYMBOLS.get(family)
    if template is None:
        head, _, tail = family.partition("_")
        template = f"{head}_{{{{{tail},{{k}}}}}}" if tail else f"{head}_{{{{{{k}}}}}}"
    return template.format(k=k) + f"[{element}]"


def column_names(index: VariableIndex) -> tuple[str, ...]:
    """LP names of every column, in column order."""
    names: list[str] = []
    for family in index.families:
        for k in range(family.first_step, family.last_step + 1):
            names.extend(lp_name(family.name, k, e) for e in range(family.size))
    return tuple(names)
