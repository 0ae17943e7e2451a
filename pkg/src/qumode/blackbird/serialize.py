"""Canonical text form of programs.

Binary subexpressions are always parenthesized and negation is written
``-(x)``, so the output parses back to the identical tree.
"""
from .ast import BinOp, Call, ListExpr, MatRef, Neg, Num, Pi, Reg, Str


def _real(x):
    if isinstance(x, bool):
        x = int(x)
    return repr(x)


def format_number(value):
    """Literal text for an int, float or complex value."""
    if isinstance(value, complex):
        re_text = repr(float(value.real))
        im = float(value.imag)
        sign = "-" if (im < 0 or (im == 0 and str(im).startswith("-"))) else "+"
        return f"{re_text}{sign}{repr(abs(im))}j"
    return _real(value)


def _quote(text):
    return '"' + text.replace("\\", "\\\\").replace('"', '\\"') + '"'


def format_expr(node):
    """Canonical text for an expression node."""
    if isinstance(node, Num):
        return format_number(node.value)
    if isinstance(node, Pi):
        return "pi"
    if isinstance(node, Reg):
        return f"q[{node.index}]"
    if isinstance(node, MatRef):
        return f"@{node.name}"
    if isinstance(node, Str):
        return _quote(node.value)
    if isinstance(node, Neg):
        return f"-({format_expr(node.operand)})"
    if isinstance(node, Call):
        return f"{node.func}(" + ", ".join(format_expr(a) for a in node.args) + ")"
    if isinstance(node, ListExpr):
        return "[" + ", ".join(format_expr(a) for a in node.items) + "]"
    if isinstance(node, BinOp):
        def side(child):
            text = format_expr(child)
            return f"({text})" if isinstance(child, BinOp) else text

        return f"{side(node.left)} {node.op} {side(node.right)}"
    raise TypeError(f"cannot serialize {type(node).__name__}")


def format_operation(op):
    """One program line for an :class:`OperationNode`."""
    parts = [format_expr(a) for a in op.args]
    parts += [f"{key}={format_expr(val)}" for key, val in op.kwargs.items()]
    head = op.name + (f"({', '.join(parts)})" if parts else "")
    if len(op.targets) == 1:
        regs = f"q[{op.targets[0]}]"
    else:
        regs = "(" + ", ".join(f"q[{t}]" for t in op.targets) + ")"
    return f"{head} | {regs}"


def serialize(program):
    """Canonical program text: headers (name, modes, hbar, cutoff), then one operation per line."""
    lines = []
    if program.name is not None:
        lines.append(f"name {_quote(program.name)}")
    lines.append(f"modes {program.modes}")
    if program.hbar is not None:
        lines.append(f"hbar {_real(program.hbar)}")
    if program.cutoff is not None:
        lines.append(f"cutoff {program.cutoff}")
    if program.ops:
        lines.append("")
    lines.extend(format_operation(op) for op in program.ops)
    return "\n".join(lines) + "\n"
