from __future__ import annotations

from abc import ABCMeta
from typing import TYPE_CHECKING

if TYPE_CHECKING:
    from omtepf.assembler.plugin_stack import Stack
    from omtepf.assembler.problem import Emission
    from omtepf.assembler.variable_index import VariableIndex


class Emitter(metaclass=ABCMeta):
    """An element of a linked list of emitters.

    Subclasses implement `visit_<FamilyClassName>` methods that turn a constraint
    family descriptor into an `Emission`.
    """

    _base: Stack | None = None

    def _setup(self, stack: Stack) -> None:
        self._base = stack

    @property
    def index(self) -> VariableIndex:
        return self._base.index

    def visit(self, family: object) -> Emission:
        """Redirects the visit call to the base stack."""
        return self._base.visit(family)

    def dispatch(self, family: object) -> Emission:
        method = getattr(self, "visit_" + family.__class__.__name__, self.generic_visit)
        return method(family)

    def generic_visit(self, _family: object) -> Emission:
        # differentiate from the StructuralError raised by the Stack
        raise NotImplementedError
