"""Static checks on parsed programs.

Validation collects every problem rather than stopping at the first one, and
reports them ordered by source position.
"""
import difflib
import numbers
from dataclasses import dataclass, field

from .ast import EvaluationError, ListExpr, MatRef, Str
from .ops import ANY, COMPLEX, INT, KEYWORDS, MATRIX, MEASURE, REAL, VOCABULARY, lookup

BACKENDS = ("gaussian", "fock")

ERROR = "error"
WARNING = "warning"


@dataclass(frozen=True, order=True)
class Diagnostic:
    """A positioned message. Sorts by position, then text."""

    line: int
    col: int
    message: str
    code: str = "invalid"
    severity: str = ERROR

    def __str__(self):
        return f"{self.line}:{self.col}: {self.severity}: {self.message}"


class ValidationError(ValueError):
    """Raised by :meth:`ValidationReport.raise_for_errors`."""

    def __init__(self, diagnostics):
        self.diagnostics = list(diagnostics)
        super().__init__("\n".join(str(d) for d in self.diagnostics))


@dataclass
class ValidationReport:
    """Result of :func:`validate`.

    Attributes:
        program (Program): the checked program
        diagnostics (list[Diagnostic]): sorted by source position
        compatibility (dict): backend name to the list of operation names it
            cannot execute
    """

    program: object
    diagnostics: list = field(default_factory=list)
    compatibility: dict = field(default_factory=dict)

    @property
    def errors(self):
        return [d for d in self.diagnostics if d.severity == ERROR]

    @property
    def ok(self):
        return not self.errors

    def raise_for_errors(self):
        if not self.ok:
            raise ValidationError(self.errors)
        return self.program


def suggest(name, candidates=None):
    """Closest vocabulary name to ``name``, or ``None``."""
    pool = list(candidates if candidates is not None else VOCABULARY)
    match = difflib.get_close_matches(name, pool, n=1, cutoff=0.5)
    if not match:
        lowered = {c.lower(): c for c in pool}
        if name.lower() in lowered:
            return lowered[name.lower()]
        return None
    return match[0]


def _constant(expr):
    """The value of a register-free expression, or ``None`` if not constant."""
    if expr.registers():
        return None
    try:
        return expr.evaluate({})
    except (EvaluationError, ZeroDivisionError, ValueError, TypeError):
        return None


def _check_arg(expr, kind, pname, emit):
    if kind == MATRIX:
        if not isinstance(expr, (MatRef, ListExpr)):
            emit(f"argument '{pname}' must be a matrix reference @name or a list")
        return
    if isinstance(expr, (MatRef, ListExpr, Str)):
        emit(f"argument '{pname}' must be a number")
        return
    value = _constant(expr)
    if value is None:
        return
    if not isinstance(value, numbers.Number):
        emit(f"argument '{pname}' must be a number")
    elif kind == REAL and isinstance(value, complex) and value.imag != 0:
        emit(f"argument '{pname}' must be real, got {value}")
    elif kind == INT:
        if isinstance(value, complex) or value != int(value) or value < 0:
            emit(f"argument '{pname}' must be a non-negative integer, got {value}")


def validate(program, backend=None):
    """Checks a program and reports every violation.

    Checks vocabulary membership, arity and argument types, target counts,
    register liveness across ``New``/``Del``, that registers used as classical
    arguments were measured earlier, ``select`` placement, header values and
    compatibility with each backend.

    Args:
        program (Program): parsed program
        backend (str or None): if given, operations the backend cannot
            execute are errors; otherwise they only appear in
            ``compatibility``

    Returns:
        ValidationReport: diagnostics sorted by source position
    """
    diags = []
    compat = {b: [] for b in BACKENDS}

    if program.modes is None or not isinstance(program.modes, int) or program.modes < 1:
        diags.append(Diagnostic(1, 1, "program must declare 'modes N' with N >= 1", "header"))
    if program.cutoff is not None and (not isinstance(program.cutoff, int) or program.cutoff < 1):
        diags.append(Diagnostic(1, 1, f"cutoff must be a positive integer, got {program.cutoff}", "header"))
    if program.hbar is not None and not program.hbar > 0:
        diags.append(Diagnostic(1, 1, f"hbar must be positive, got {program.hbar}", "header"))
    if backend is not None and backend not in BACKENDS:
        diags.append(Diagnostic(1, 1, f"unknown backend '{backend}'", "backend"))

    n0 = program.modes if isinstance(program.modes, int) and program.modes > 0 else 0
    active = set(range(n0))
    allocated = n0
    deleted = set()
    measured = set()

    for op in program.ops:
        def emit(message, code="invalid", severity=ERROR, _op=op):
            diags.append(Diagnostic(_op.line, _op.col, message, code, severity))

        spec = lookup(op.name)
        if spec is None:
            hint = suggest(op.name)
            extra = f"; did you mean '{hint}'?" if hint else ""
            emit(f"unknown operation '{op.name}'{extra}", "vocabulary")
            continue

        # arguments
        nargs = len(op.args)
        if not spec.min_args <= nargs <= spec.max_args:
            want = (
                str(spec.min_args)
                if spec.min_args == spec.max_args
                else f"{spec.min_args} to {spec.max_args}"
            )
            emit(f"{op.name} takes {want} positional argument(s), got {nargs}", "arity")
        for param, expr in zip(spec.params, op.args):
            _check_arg(expr, param.kind, param.name, lambda m: emit(m, "type"))
        for key, expr in op.kwargs.items():
            if key not in KEYWORDS:
                emit(f"unknown keyword argument '{key}'", "keyword")
            elif key == "select" and spec.kind != MEASURE:
                emit(f"'select' is only allowed on measurements, not {op.name}", "select")
            elif key == "phi":
                if op.name != "MeasureHomodyne":
                    emit(f"keyword 'phi' is not accepted by {op.name}", "keyword")
                elif nargs >= 1:
                    emit("phi given both positionally and by keyword", "keyword")
                else:
                    _check_arg(expr, REAL, "phi", lambda m: emit(m, "type"))
        if "select" in op.kwargs and spec.kind == MEASURE:
            sel = op.kwargs["select"]
            if op.name == "MeasureFock":
                items = sel.items if isinstance(sel, ListExpr) else (sel,)
                if len(items) != len(op.targets):
                    emit(
                        f"select needs one photon number per target, got {len(items)} for {len(op.targets)}",
                        "select",
                    )
                for item in items:
                    _check_arg(item, INT, "select", lambda m: emit(m, "select"))
            else:
                _check_arg(sel, REAL if op.name == "MeasureHomodyne" else COMPLEX, "select",
                           lambda m: emit(m, "select"))

        # classical references
        for idx in sorted(op.classical_refs()):
            if idx not in measured:
                emit(f"q[{idx}] is used as a classical value before it is measured", "classical")

        # targets
        if spec.n_modes != ANY and len(op.targets) != spec.n_modes:
            emit(f"{op.name} acts on {spec.n_modes} mode(s), got {len(op.targets)}", "targets")
        if len(set(op.targets)) != len(op.targets):
            emit(f"{op.name} targets a register more than once", "targets")

        if op.name == "New":
            for t in op.targets:
                if t != allocated:
                    emit(f"New must create the next register q[{allocated}], got q[{t}]", "liveness")
                else:
                    active.add(t)
                    allocated += 1
            continue
        for t in op.targets:
            if t in deleted:
                emit(f"q[{t}] was deleted and cannot be used by {op.name}", "liveness")
            elif t not in active:
                emit(f"q[{t}] is not a declared register", "liveness")
        if op.name == "Del":
            for t in op.targets:
                if t in active:
                    active.discard(t)
                    deleted.add(t)
            continue
        if spec.kind == MEASURE:
            measured.update(op.targets)

        # backend compatibility
        if spec.fock_only:
            if op.name not in compat["gaussian"]:
                compat["gaussian"].append(op.name)
            if backend == "gaussian":
                emit(
                    f"{op.name} requires a Fock-representation backend and cannot run on the gaussian backend",
                    "backend",
                )

    diags.sort()
    return ValidationReport(program, diags, compat)
