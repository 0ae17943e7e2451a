"""Syntax tree of circuit programs.

Source positions are carried for diagnostics but excluded from equality, so
two programs compare equal when they describe the same circuit.
"""
import cmath
import math
from dataclasses import dataclass, field


class EvaluationError(ValueError):
    """Raised when an expression cannot be evaluated."""


@dataclass(frozen=True)
class Num:
    """Numeric literal: int, float or complex."""

    value: object

    def evaluate(self, values=None):
        return self.value

    def registers(self):
        return set()


@dataclass(frozen=True)
class Pi:
    def evaluate(self, values=None):
        return math.pi

    def registers(self):
        return set()


@dataclass(frozen=True)
class Reg:
    """Reference to the measured value of register ``q[index]``."""

    index: int

    def evaluate(self, values=None):
        if values is None or self.index not in values:
            raise EvaluationError(f"q[{self.index}] has no measured value")
        return values[self.index]

    def registers(self):
        return {self.index}


_BINARY = {
    "+": lambda a, b: a + b,
    "-": lambda a, b: a - b,
    "*": lambda a, b: a * b,
    "/": lambda a, b: a / b,
}


@dataclass(frozen=True)
class BinOp:
    op: str
    left: object
    right: object

    def evaluate(self, values=None):
        a, b = self.left.evaluate(values), self.right.evaluate(values)
        if self.op == "/" and b == 0:
            raise EvaluationError("division by zero")
        return _BINARY[self.op](a, b)

    def registers(self):
        return self.left.registers() | self.right.registers()


@dataclass(frozen=True)
class Neg:
    operand: object

    def evaluate(self, values=None):
        return -self.operand.evaluate(values)

    def registers(self):
        return self.operand.registers()


FUNCTIONS = {"sqrt"}


@dataclass(frozen=True)
class Call:
    func: str
    args: tuple

    def evaluate(self, values=None):
        vals = [a.evaluate(values) for a in self.args]
        if self.func == "sqrt":
            (v,) = vals
            if isinstance(v, complex) or v < 0:
                return cmath.sqrt(v)
            return math.sqrt(v)
        raise EvaluationError(f"unknown function {self.func}")

    def registers(self):
        out = set()
        for a in self.args:
            out |= a.registers()
        return out


@dataclass(frozen=True)
class MatRef:
    """Reference ``@name`` to a matrix stored in a sidecar file."""

    name: str

    def evaluate(self, values=None):
        raise EvaluationError(f"matrix @{self.name} must be resolved before evaluation")

    def registers(self):
        return set()


@dataclass(frozen=True)
class Str:
    value: str

    def evaluate(self, values=None):
        return self.value

    def registers(self):
        return set()


@dataclass(frozen=True)
class ListExpr:
    """Bracketed list, used for inline arrays and ``select`` patterns."""

    items: tuple

    def evaluate(self, values=None):
        return [item.evaluate(values) for item in self.items]

    def registers(self):
        out = set()
        for item in self.items:
            out |= item.registers()
        return out


@dataclass
class OperationNode:
    """One program line: ``Name(args, key=value) | targets``.

    Attributes:
        name (str): operation name
        kind (str): prepare, gate, measure, decomposition, new, delete or
            ``unknown`` for names outside the vocabulary
        args (list): positional argument expressions
        kwargs (dict): keyword argument expressions (``select``, ``phi``)
        targets (list[int]): register indices
        line, col (int): source position of the operation name
    """

    name: str
    kind: str
    args: list = field(default_factory=list)
    kwargs: dict = field(default_factory=dict)
    targets: list = field(default_factory=list)
    line: int = field(default=0, compare=False)
    col: int = field(default=0, compare=False)

    def classical_refs(self):
        """Registers whose measured values feed this operation's arguments."""
        out = set()
        for expr in list(self.args) + list(self.kwargs.values()):
            out |= expr.registers()
        return out


@dataclass
class Program:
    """A parsed program: header directives and an ordered operation list.

    Attributes:
        modes (int): number of registers at the start
        hbar (float): optional ``hbar`` directive
        cutoff (int): optional Fock cutoff directive
        name (str): optional program name
        ops (list[OperationNode]): the operations
    """

    modes: int = 0
    hbar: object = None
    cutoff: object = None
    name: object = None
    ops: list = field(default_factory=list)
