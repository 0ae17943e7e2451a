"""Program execution: registers, lowering to primitives and backend dispatch.

Registers keep the index they were created with; ``Del`` deactivates a
register without renumbering the others. The engine maps each active register
to its current position in the backend state.

Lowering turns every queued operation into primitives the backend executes
directly. Matrix decompositions are always expanded. Compound gates (``Pgate``,
``S2gate``, ``CXgate``, ``CZgate``) are expanded on the Gaussian backend, where
the expansion is exact; the Fock backend builds them natively because their
beamsplitter/squeezer expansion does not survive truncation.
"""
from collections import namedtuple
from dataclasses import dataclass, field

import numpy as np

from .blackbird.ast import EvaluationError, ListExpr, MatRef, Num, OperationNode, Program, Reg
from .blackbird.ops import COMPLEX, DECOMPOSITION, DELETE, GATE, INT, MATRIX, MEASURE, NEW, PREPARE, lookup
from .blackbird.validate import validate
from .decompositions import (
    DecompositionError,
    PrimitiveOp,
    check_unitary,
    clements,
    compound_gate_decomp,
    symplectic_ops,
    synthesize_gaussian,
)
from .fock import DEFAULT_CUTOFF, FOCK_DIAGONAL_GATES, X_DIAGONAL_GATES, FockBackend, FockError
from .gaussian import GAUSSIAN_GATES, GAUSSIAN_PREPARATIONS, GaussianBackend, GaussianError
from .linalg import DEFAULT_HBAR, MatrixError, is_symplectic

BACKENDS = ("gaussian", "fock")
COMPOUND_GATES = ("Pgate", "S2gate", "CXgate", "CZgate")
DEFAULT_SEED = 42

#: measurement primitive with a post-selected outcome
MeasureOp = namedtuple("MeasureOp", "name params modes select")


class EngineError(RuntimeError):
    """Invalid queue operation or failure while executing a program."""


@dataclass
class RegisterRef:
    """Handle to one register.

    Attributes:
        index (int): permanent register index
        active (bool): False once the register is deleted
        val: last measured value, ``None`` until measured
    """

    index: int
    active: bool = True
    val: object = None

    def __repr__(self):
        state = "active" if self.active else "deleted"
        return f"q[{self.index}] ({state}, val={self.val})"


@dataclass
class ExecutionResult:
    """Outcome of :meth:`Engine.run`.

    Attributes:
        backend (str): backend kind
        state: final state of the last shot (GaussianState or FockState)
        samples (dict[int, list]): measured values per register, one per shot
        applied (list[PrimitiveOp]): primitives executed in the last shot,
            with register indices as modes
        leakage (float): probability lost to truncation in the last shot
        positions (dict[int, int]): register index to backend mode at the end
        shots (int): number of shots run
    """

    backend: str
    state: object
    samples: dict = field(default_factory=dict)
    applied: list = field(default_factory=list)
    leakage: float = 0.0
    positions: dict = field(default_factory=dict)
    shots: int = 1


def as_expr(value):
    """Wraps a Python value as an expression node; expression nodes pass through."""
    if hasattr(value, "evaluate"):
        return value
    if isinstance(value, RegisterRef):
        return Reg(value.index)
    if isinstance(value, (list, tuple, np.ndarray)):
        return ListExpr(tuple(as_expr(v) for v in np.asarray(value).tolist()) if isinstance(value, np.ndarray)
                        else tuple(as_expr(v) for v in value))
    if isinstance(value, np.generic):
        value = value.item()
    return Num(value)


def make_op(name, args=(), targets=(), **kwargs):
    """Builds an :class:`OperationNode` from plain values.

    Args:
        name (str): operation name
        args (Sequence): positional arguments (numbers, RegisterRefs or expressions)
        targets (Sequence[int or RegisterRef]): target registers
        **kwargs: ``select`` or ``phi``
    """
    spec = lookup(name)
    regs = [t.index if isinstance(t, RegisterRef) else int(t) for t in targets]
    return OperationNode(
        name,
        spec.kind if spec else "unknown",
        [as_expr(a) for a in args],
        {k: as_expr(v) for k, v in kwargs.items()},
        regs,
    )


def _classify(name):
    if name in FOCK_DIAGONAL_GATES:
        return "fock-diagonal"
    if name in X_DIAGONAL_GATES:
        return "x-diagonal"
    return None


def _evaluate_param(expr, kind, values, matrices):
    if kind == MATRIX:
        if isinstance(expr, MatRef):
            if expr.name not in matrices:
                raise EngineError(f"matrix @{expr.name} was not provided")
            return np.asarray(matrices[expr.name])
        return np.asarray(expr.evaluate(values))
    value = expr.evaluate(values)
    if isinstance(value, np.generic):
        value = value.item()
    if kind == COMPLEX:
        return complex(value) if isinstance(value, complex) else float(value)
    if kind == INT:
        return int(value)
    if isinstance(value, complex):
        if abs(value.imag) > 1e-12 * max(1.0, abs(value.real)):
            raise EngineError(f"real parameter received complex value {value}")
        value = value.real
    return float(value)


class Engine:
    """Queues operations and runs them on a backend.

    Args:
        num_modes (int): initial number of registers
        hbar (float): convention for :math:`\\hbar`
        cutoff (int): Fock cutoff used when none is passed to :meth:`run`
        matrices (dict): matrices for ``@name`` references
        decompose_compound (bool or None): expand compound gates on every
            backend (True), never (False), or only on the Gaussian backend (None)
    """

    def __init__(self, num_modes, hbar=DEFAULT_HBAR, cutoff=None, matrices=None, decompose_compound=None):
        if not isinstance(num_modes, (int, np.integer)) or num_modes < 1:
            raise EngineError(f"an engine needs at least one mode, got {num_modes}")
        self.init_modes = int(num_modes)
        self.hbar = hbar
        self.cutoff = cutoff
        self.matrices = dict(matrices or {})
        self.decompose_compound = decompose_compound
        self.name = None
        self.reset()

    # queue management

    def reset(self):
        """Clears the queue and measured values and restores the initial registers."""
        self.queued = []
        self.registers = [RegisterRef(i) for i in range(self.init_modes)]
        return self

    @property
    def num_registers(self):
        return len(self.registers)

    def queue(self, node):
        """Appends an operation, updating register bookkeeping.

        ``New`` appends registers with the next indices; ``Del`` deactivates
        its targets.

        Raises:
            EngineError: a target is deleted or does not exist
        """
        if node.name == "New":
            for t in node.targets:
                if t != len(self.registers):
                    raise EngineError(f"New must create q[{len(self.registers)}], got q[{t}]")
                self.registers.append(RegisterRef(t))
            self.queued.append(node)
            return self
        for t in node.targets:
            if not 0 <= t < len(self.registers):
                raise EngineError(f"{node.name} targets q[{t}], which does not exist")
            if not self.registers[t].active:
                raise EngineError(f"{node.name} targets q[{t}], which was deleted")
        if node.name == "Del":
            for t in node.targets:
                self.registers[t].active = False
        self.queued.append(node)
        return self

    def new_register(self, count=1):
        """Queues ``New`` and returns the created register handles."""
        start = len(self.registers)
        refs = []
        for i in range(count):
            self.queue(OperationNode("New", NEW, [], {}, [start + i]))
            refs.append(self.registers[-1])
        return refs

    def program(self, backend=None):
        """The queue as a :class:`Program`."""
        return Program(
            modes=self.init_modes,
            hbar=None if self.hbar == DEFAULT_HBAR else self.hbar,
            cutoff=self.cutoff,
            name=self.name,
            ops=list(self.queued),
        )

    @classmethod
    def from_program(cls, program, matrices=None, decompose_compound=None):
        """An engine with ``program``'s registers, headers and operations queued."""
        eng = cls(
            program.modes,
            hbar=program.hbar if program.hbar is not None else DEFAULT_HBAR,
            cutoff=program.cutoff,
            matrices=matrices,
            decompose_compound=decompose_compound,
        )
        eng.name = program.name
        for op in program.ops:
            eng.queue(op)
        return eng

    # lowering

    def _expand_compound(self, kind):
        if self.decompose_compound is None:
            return kind == "gaussian"
        return bool(self.decompose_compound)

    def lower_node(self, node, kind, values=None):
        """Primitive ops for one node, with arguments evaluated against ``values``.

        Modes in the returned ops are register indices.
        """
        spec = lookup(node.name)
        if spec is None:
            raise EngineError(f"unknown operation '{node.name}'")
        if spec.kind in (NEW, DELETE):
            return [PrimitiveOp(node.name, (), tuple(node.targets))]
        values = values or {}
        try:
            params = [_evaluate_param(e, p.kind, values, self.matrices) for p, e in zip(spec.params, node.args)]
        except EvaluationError as exc:
            raise EngineError(f"{node.name}: {exc}") from exc
        kw = {}
        for key, expr in node.kwargs.items():
            if key == "phi":
                params = [_evaluate_param(expr, "real", values, self.matrices)]
            elif key == "select":
                sel = expr.evaluate(values)
                kw["select"] = tuple(int(v) for v in sel) if isinstance(sel, list) else sel
        # fill defaults
        for p in spec.params[len(params):]:
            params.append(p.default)
        targets = tuple(node.targets)
        if spec.fock_only and kind == "gaussian":
            raise EngineError(f"{node.name} requires a Fock-representation backend")

        if spec.kind == DECOMPOSITION:
            return self._lower_decomposition(node.name, params, targets)
        if spec.kind == GATE and node.name in COMPOUND_GATES and self._expand_compound(kind):
            return compound_gate_decomp(node.name, params, targets)
        if spec.kind == MEASURE:
            if "select" in kw:
                return [MeasureOp(node.name, tuple(params), targets, kw["select"])]
            return [PrimitiveOp(node.name, tuple(params), targets)]
        return [PrimitiveOp(node.name, tuple(params), targets)]

    def _lower_decomposition(self, name, params, targets):
        n = len(targets)
        try:
            if name == "Interferometer":
                u = np.asarray(params[0], dtype=complex)
                if u.shape != (n, n):
                    raise EngineError(f"Interferometer on {n} modes needs a {n}x{n} matrix, got {u.shape}")
                return clements(check_unitary(u, 1e-8), 1e-8).ops(targets)
            if name == "GaussianTransform":
                s = np.asarray(params[0], dtype=float)
                if s.shape != (2 * n, 2 * n):
                    raise EngineError(f"GaussianTransform on {n} modes needs a {2 * n}x{2 * n} matrix")
                if not is_symplectic(s, 1e-8):
                    raise EngineError("GaussianTransform matrix is not symplectic")
                return symplectic_ops(s, targets)
            if name == "Gaussian":
                v = np.asarray(params[0], dtype=float)
                mu = params[1] if len(params) > 1 and params[1] is not None else ()
                mu = np.asarray(mu, dtype=float).ravel()
                if v.shape != (2 * n, 2 * n):
                    raise EngineError(f"Gaussian on {n} modes needs a {2 * n}x{2 * n} covariance")
                return synthesize_gaussian(v, mu if mu.size else None, self.hbar).ops(targets)
        except (DecompositionError, MatrixError) as exc:
            raise EngineError(f"{name}: {exc}") from exc
        raise EngineError(f"{name} is not a decomposition")

    def lower(self, kind):
        """The queued program as primitives for backend ``kind``.

        Operations whose arguments depend on measurement results keep their
        expressions unevaluated and are only resolved by :meth:`run`.
        """
        if kind not in BACKENDS:
            raise EngineError(f"unknown backend '{kind}'")
        out = []
        for node in self.queued:
            if node.classical_refs():
                out.append(PrimitiveOp(node.name, tuple(node.args), tuple(node.targets)))
            else:
                out.extend(self.lower_node(node, kind))
        return out

    # execution

    def _make_backend(self, kind, cutoff, pure):
        if kind == "gaussian":
            return GaussianBackend(self.init_modes, self.hbar)
        return FockBackend(self.init_modes, cutoff, self.hbar, pure)

    def run(self, backend="gaussian", cutoff=None, hbar=None, shots=1, seed=DEFAULT_SEED, pure=True):
        """Executes the queued program ``shots`` times from vacuum.

        Each shot draws from its own generator spawned from ``seed``, so results
        depend only on (program, backend, options, seed).

        Args:
            backend (str): ``gaussian`` or ``fock``
            cutoff (int): Fock cutoff (defaults to the engine's or 10)
            hbar (float): overrides the engine's :math:`\\hbar`
            shots (int): number of repetitions
            seed (int): master seed
            pure (bool): start the Fock backend in a pure representation

        Returns:
            ExecutionResult: last shot's state and all shots' samples
        """
        if backend not in BACKENDS:
            raise EngineError(f"unknown backend '{backend}'")
        if shots < 1:
            raise EngineError(f"shots must be at least 1, got {shots}")
        if hbar is not None:
            self.hbar = hbar
        report = validate(self.program(), backend)
        report.raise_for_errors()
        cutoff = cutoff or self.cutoff or DEFAULT_CUTOFF

        # static lowering once, dynamic nodes per shot
        static = [None if node.classical_refs() else self.lower_node(node, backend) for node in self.queued]
        samples = {}
        for node in self.queued:
            if lookup(node.name).kind == MEASURE:
                for t in node.targets:
                    samples.setdefault(t, [])
        samples = dict(sorted(samples.items()))

        streams = np.random.SeedSequence(seed).spawn(shots)
        for shot in range(shots):
            rng = np.random.default_rng(streams[shot])
            be, applied, values, positions = self._run_shot(backend, cutoff, pure, rng, static)
            for reg, val in values.items():
                samples.setdefault(reg, []).append(val)
        for reg, val in values.items():
            self.registers[reg].val = val
        return ExecutionResult(backend, be.state, samples, applied, float(be.leakage()), positions, shots)

    def _run_shot(self, kind, cutoff, pure, rng, static):
        try:
            be = self._make_backend(kind, cutoff, pure)
        except (FockError, GaussianError) as exc:
            raise EngineError(str(exc)) from exc
        positions = {i: i for i in range(self.init_modes)}
        values = {}
        applied = []
        run, run_class = [], None

        def flush():
            nonlocal run, run_class
            if run:
                if kind == "fock":
                    be.apply_run([(op.name, op.params, tuple(positions[m] for m in op.modes)) for op in run])
                else:
                    for op in run:
                        be.apply(op.name, op.params, [positions[m] for m in op.modes])
            run, run_class = [], None

        try:
            for node, lowered in zip(self.queued, static):
                prims = lowered if lowered is not None else self.lower_node(node, kind, values)
                for op in prims:
                    if op.name in GAUSSIAN_GATES or op.name in ("Vgate", "Kgate", "CKgate"):
                        cls = _classify(op.name) if kind == "fock" else None
                        if run and (cls is None or cls != run_class):
                            flush()
                        run.append(op)
                        run_class = cls
                        applied.append(op)
                        if cls is None:
                            flush()
                        continue
                    flush()
                    applied.append(op)
                    self._execute(be, kind, op, positions, values, rng)
            flush()
        except (FockError, GaussianError, DecompositionError, MatrixError, EvaluationError, ValueError) as exc:
            if isinstance(exc, EngineError):
                raise
            raise EngineError(str(exc)) from exc
        return be, applied, values, positions

    def _execute(self, be, kind, op, positions, values, rng):
        name = op.name
        select = getattr(op, "select", None)
        if name == "New":
            for reg in op.modes:
                be.add_mode()
                positions[reg] = be.n_modes - 1
            return
        if name == "Del":
            for reg in op.modes:
                pos = positions.pop(reg)
                be.remove_mode(pos)
                for other, p in positions.items():
                    if p > pos:
                        positions[other] = p - 1
            return
        modes = [positions[m] for m in op.modes]
        spec = lookup(name)
        if spec.kind == PREPARE:
            if kind == "gaussian" and name not in GAUSSIAN_PREPARATIONS:
                raise EngineError(f"{name} cannot be prepared on the gaussian backend")
            be.prepare(name, op.params, modes)
            return
        if name == "MeasureHomodyne":
            values[op.modes[0]] = float(be.measure_homodyne(modes[0], op.params[0], rng, select))
        elif name == "MeasureHeterodyne":
            values[op.modes[0]] = complex(be.measure_heterodyne(modes[0], rng, select))
        elif name == "MeasureFock":
            pattern = be.measure_fock(modes, rng, select)
            for reg, v in zip(op.modes, pattern):
                values[reg] = int(v)
        else:
            raise EngineError(f"{name} is not executable on the {kind} backend")


def create_engine(num_modes, **options):
    """An :class:`Engine` and the handles of its registers.

    Returns:
        tuple[Engine, tuple[RegisterRef]]
    """
    eng = Engine(num_modes, **options)
    return eng, tuple(eng.registers)


def applied_program(result):
    """The primitive operations executed in the result's last shot."""
    return list(result.applied)


def primitives_to_program(ops, modes, hbar=None, name=None):
    """A :class:`Program` listing primitive ops, e.g. to print an applied log."""
    nodes = [make_op(op.name, op.params, op.modes, **({"select": op.select} if getattr(op, "select", None) is not None else {}))
             for op in ops]
    return Program(modes=modes, hbar=hbar, name=name, ops=nodes)
