from __future__ import annotations

from typing import TYPE_CHECKING

from omtepf.assembler.hfnmcf import HfnmcfEmitter
from omtepf.assembler.plugin import Emitter
from omtepf.exceptions import StructuralError

if TYPE_CHECKING:
    from omtepf.assembler.problem import Emission
    from omtepf.assembler.variable_index import VariableIndex


class Stack:
    _emitters: tuple[Emitter, ...]

    def __init__(self, index: VariableIndex, *emitters: Emitter):
        self.index = index
        self._emitters = emitters
        for emitter in emitters:
            if not isinstance(emitter, Emitter):
                raise TypeError(f"Expected Emitter, got {type(emitter)}")
            emitter._setup(self)  # noqa: SLF001

    def visit(self, family: object) -> Emission:
        """Apply the emitters to a constraint family.

        Args:
            family: The constraint family descriptor.

        Raises:
            StructuralError: If the family is not supported by any emitter.

        Returns:
            Emission: The rows, bounds and objective parts of the family.
        """
        for emitter in self._emitters:
            try:
                return emitter.dispatch(family)
            except NotImplementedError:
                pass

        raise StructuralError(f"Unsupported constraint family: {family.__class__.__name__}")


def _default_stack(index: VariableIndex, *emitters: Emitter) -> Stack:
    """Append the core HFNMCF emitter to the given emitters."""

    return Stack(index, *emitters, HfnmcfEmitter())
