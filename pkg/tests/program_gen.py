"""Random program trees for round-trip tests.

The generator draws through a small source interface so the same code serves
a seeded numpy generator and hypothesis' ``data()`` strategy.
"""
import math

import numpy as np
from hypothesis import strategies as st

from qumode.blackbird import BinOp, Call, ListExpr, MatRef, Neg, Num, OperationNode, Pi, Program, Reg, VOCABULARY
from qumode.blackbird.ops import ANY

NAMES = sorted(VOCABULARY)


class NumpySource:
    def __init__(self, seed):
        self.rng = np.random.default_rng(seed)

    def integer(self, lo, hi):
        return int(self.rng.integers(lo, hi + 1))

    def real(self):
        kind = self.integer(0, 3)
        if kind == 0:
            return float(self.rng.normal(0, 3))
        if kind == 1:
            return float(self.rng.uniform(-1e-3, 1e-3))
        if kind == 2:
            return float(self.integer(-20, 20)) / 4
        return float(self.rng.normal(0, 1e6))

    def choice(self, items):
        return items[self.integer(0, len(items) - 1)]


class HypothesisSource:
    def __init__(self, data):
        self.data = data

    def integer(self, lo, hi):
        return self.data.draw(st.integers(lo, hi))

    def real(self):
        return self.data.draw(st.floats(allow_nan=False, allow_infinity=False, width=64))

    def choice(self, items):
        return self.data.draw(st.sampled_from(items))


def number(src):
    kind = src.integer(0, 2)
    if kind == 0:
        return Num(src.integer(-50, 50))
    if kind == 1:
        return Num(src.real())
    return Num(complex(src.real(), src.real()))


def expression(src, measured, depth=0):
    kind = src.integer(0, 7 if depth < 3 else 1)
    if kind <= 1:
        return number(src)
    if kind == 2:
        return Pi()
    if kind == 3 and measured:
        return Reg(src.choice(sorted(measured)))
    if kind == 4:
        return Neg(expression(src, measured, depth + 1))
    if kind == 5:
        return Call("sqrt", (expression(src, measured, depth + 1),))
    return BinOp(src.choice(["+", "-", "*", "/"]), expression(src, measured, depth + 1),
                 expression(src, measured, depth + 1))


def operation(src, n_modes, measured):
    name = src.choice(NAMES)
    spec = VOCABULARY[name]
    count = spec.n_modes if spec.n_modes != ANY else src.integer(1, min(3, n_modes))
    count = min(count, n_modes)
    targets = []
    while len(targets) < count:
        t = src.integer(0, n_modes - 1)
        if t not in targets:
            targets.append(t)
    args = []
    for param in spec.params[: src.integer(spec.min_args, spec.max_args)]:
        if param.kind == "matrix":
            args.append(MatRef(src.choice(["U", "S", "cov", "mat_1"])) if src.integer(0, 1) else
                        ListExpr(tuple(number(src) for _ in range(src.integer(0, 3)))))
        else:
            args.append(expression(src, measured))
    kwargs = {}
    if spec.kind == "measure" and src.integer(0, 1):
        if name == "MeasureFock":
            kwargs["select"] = ListExpr(tuple(Num(src.integer(0, 5)) for _ in targets))
        else:
            kwargs["select"] = number(src)
    if spec.kind == "measure":
        measured.update(targets)
    return OperationNode(name, spec.kind, args, kwargs, targets)


def program(src, max_ops=8):
    n_modes = src.integer(1, 4)
    measured = set()
    ops = [operation(src, n_modes, measured) for _ in range(src.integer(0, max_ops))]
    name = src.choice([None, "prog", "a b", 'quote"d', "back\\slash"])
    hbar = src.choice([None, 2.0, 1.0, 0.5, math.pi])
    cutoff = src.choice([None, 2, 5, 12])
    return Program(modes=n_modes, hbar=hbar, cutoff=cutoff, name=name, ops=ops)


class _DrawAdapter:
    """Gives a composite strategy's ``draw`` the ``data.draw`` interface."""

    def __init__(self, draw):
        self.draw = draw


@st.composite
def programs(draw):
    return program(HypothesisSource(_DrawAdapter(draw)))
