"""Command-line interface.

Subcommands::

    qumode run FILE [--backend B] [--cutoff D] [--hbar H] [--shots S] [--seed K]
                    [--pure BOOL] [--max-photons N] [--output json|text]
    qumode check FILE [--backend B]
    qumode decompose FILE --kind interferometer|gaussian-transform|gaussian-state
                    [--means FILE] [--hbar H]
    qumode example NAME [--key value]... [--output json|text]

Exit codes: 0 success, 1 parse error (including unreadable or malformed input
files), 2 validation error, 3 runtime error, 4 an example missed its
expectation. Diagnostics go to stderr; results go to stdout.
"""
import argparse
import ast
import itertools
import json
import sys
from pathlib import Path

import numpy as np

from . import __version__, fock
from .blackbird import (
    LexError,
    MatrixFileError,
    ParseError,
    parse_text,
    read_matrix,
    resolve_matrices,
    serialize,
    validate,
)
from .blackbird.serialize import format_operation
from .decompositions import DecompositionError, check_unitary, clements, symplectic_ops, synthesize_gaussian
from .engine import DEFAULT_SEED, Engine, EngineError, primitives_to_program
from .linalg import DEFAULT_HBAR, is_symplectic, is_valid_covariance

EXIT_OK = 0
EXIT_PARSE = 1
EXIT_VALIDATION = 2
EXIT_RUNTIME = 3
EXIT_EXAMPLE_FAILED = 4

DEFAULT_MAX_PHOTONS = 4
KIND_CHOICES = ("interferometer", "gaussian-transform", "gaussian-state")
#: short names accepted by ``example`` for factory keyword arguments
EXAMPLE_ALIASES = {"modes": "n_modes"}


class CliError(Exception):
    def __init__(self, code, message):
        super().__init__(message)
        self.code = code


def _bool(text):
    low = text.lower()
    if low in ("1", "true", "yes", "on"):
        return True
    if low in ("0", "false", "no", "off"):
        return False
    raise argparse.ArgumentTypeError(f"expected a boolean, got {text!r}")


def _jsonable(value):
    """Nested structure with complex numbers as [re, im] and arrays as lists."""
    if isinstance(value, dict):
        return {str(k): _jsonable(v) for k, v in value.items()}
    if isinstance(value, (list, tuple)):
        return [_jsonable(v) for v in value]
    if isinstance(value, np.ndarray):
        return _jsonable(value.tolist())
    if isinstance(value, (complex, np.complexfloating)):
        return [float(value.real), float(value.imag)]
    if isinstance(value, np.generic):
        return value.item()
    return value


def dump_json(doc):
    return json.dumps(_jsonable(doc), sort_keys=True, indent=2)


def _load_program(path):
    path = Path(path)
    try:
        text = path.read_text(encoding="utf-8")
    except (OSError, UnicodeDecodeError) as exc:
        raise CliError(EXIT_PARSE, f"{path}: cannot read file: {exc}") from exc
    try:
        program = parse_text(text)
    except (LexError, ParseError) as exc:
        raise CliError(EXIT_PARSE, f"{path}:{exc.line}:{exc.col}: error: {exc.message}") from exc
    return program


def _check(program, path, backend):
    report = validate(program, backend)
    if not report.ok:
        raise CliError(EXIT_VALIDATION, "\n".join(f"{path}:{d}" for d in report.errors))
    return report


# ---------------------------------------------------------------------------
# run
# ---------------------------------------------------------------------------


def state_summary(result, max_photons):
    """Final-state section of the run document."""
    order = sorted(result.positions, key=result.positions.get)
    if result.backend == "gaussian":
        st = result.state
        return {"modes": order, "means": st.means, "cov": st.cov, "trace": 1.0}
    st = result.state
    probs = fock.all_fock_probs(st)
    n, d = st.n_modes, st.cutoff
    rows = []
    for total in range(min(max_photons, n * (d - 1)) + 1):
        for pattern in itertools.product(range(min(total, d - 1) + 1), repeat=n):
            if sum(pattern) == total:
                rows.append({"pattern": list(pattern), "prob": float(probs[pattern])})
    return {"modes": order, "pure": bool(st.pure), "cutoff": d, "trace": float(fock.trace(st)), "fock_probs": rows}


def run_document(program, result, options, max_photons):
    samples = [{"register": reg, "values": vals} for reg, vals in sorted(result.samples.items())]
    return {
        "name": program.name,
        "backend": result.backend,
        "options": options,
        "samples": samples,
        "state": state_summary(result, max_photons),
        "applied": [format_operation(op) for op in primitives_to_program(result.applied, program.modes).ops],
        "leakage": float(result.leakage),
    }


def _text_run(doc):
    lines = [f"backend: {doc['backend']}", f"leakage: {doc['leakage']:.3e}"]
    for entry in doc["samples"]:
        lines.append(f"q[{entry['register']}]: {entry['values']}")
    st = doc["state"]
    lines.append(f"trace: {st['trace']:.12g}")
    if "means" in st:
        lines.append("means: " + " ".join(f"{v:.6g}" for v in st["means"]))
    else:
        for row in st["fock_probs"]:
            if row["prob"] > 1e-12:
                lines.append(f"P{tuple(row['pattern'])} = {row['prob']:.6g}")
    lines.append("applied:")
    lines.extend("  " + line for line in doc["applied"])
    return "\n".join(lines)


def cmd_run(args):
    program = _load_program(args.file)
    _check(program, args.file, args.backend)
    try:
        matrices = resolve_matrices(program, Path(args.file).parent)
    except MatrixFileError as exc:
        raise CliError(EXIT_PARSE, f"{args.file}: {exc}") from exc
    if args.shots < 1:
        raise CliError(EXIT_VALIDATION, f"--shots must be at least 1, got {args.shots}")
    cutoff = args.cutoff or program.cutoff
    if args.backend == "fock" and cutoff is None:
        raise CliError(EXIT_VALIDATION, "the fock backend needs --cutoff or a 'cutoff' directive")
    hbar = args.hbar if args.hbar is not None else (program.hbar if program.hbar is not None else DEFAULT_HBAR)
    options = {"cutoff": cutoff, "hbar": hbar, "shots": args.shots, "seed": args.seed, "pure": args.pure}
    try:
        eng = Engine.from_program(program, matrices=matrices)
        result = eng.run(args.backend, cutoff=cutoff, hbar=hbar, shots=args.shots, seed=args.seed, pure=args.pure)
    except EngineError as exc:
        raise CliError(EXIT_RUNTIME, f"{args.file}: runtime error: {exc}") from exc
    doc = run_document(program, result, options, args.max_photons)
    print(dump_json(doc) if args.output == "json" else _text_run(doc))
    return EXIT_OK


# ---------------------------------------------------------------------------
# check
# ---------------------------------------------------------------------------


def cmd_check(args):
    program = _load_program(args.file)
    report = validate(program, args.backend)
    for d in report.diagnostics:
        print(f"{args.file}:{d}", file=sys.stderr)
    if not report.ok:
        return EXIT_VALIDATION
    if args.backend is None:
        for backend, names in report.compatibility.items():
            if names:
                print(f"{args.file}: note: not runnable on the {backend} backend: {', '.join(names)}", file=sys.stderr)
    return EXIT_OK


# ---------------------------------------------------------------------------
# decompose
# ---------------------------------------------------------------------------


def decompose_matrix(matrix, kind, means=None, hbar=DEFAULT_HBAR):
    """Primitive ops for a matrix.

    Raises:
        CliError: the matrix violates the invariant its kind requires
    """
    m = np.asarray(matrix)
    try:
        if kind == "interferometer":
            u = check_unitary(m, 1e-8)
            return u.shape[0], clements(u, 1e-8).ops()
        if np.iscomplexobj(m):
            raise CliError(EXIT_VALIDATION, f"{kind} matrix must be real")
        if m.ndim != 2 or m.shape[0] != m.shape[1] or m.shape[0] % 2:
            raise CliError(EXIT_VALIDATION, f"{kind} matrix must be square with even size, got {m.shape}")
        if kind == "gaussian-transform":
            if not is_symplectic(m, 1e-8):
                raise CliError(EXIT_VALIDATION, "matrix is not symplectic (S Omega S^T != Omega)")
            return m.shape[0] // 2, symplectic_ops(m)
        ok, msg = is_valid_covariance(m, hbar)
        if not ok:
            raise CliError(EXIT_VALIDATION, f"matrix is not a valid covariance: {msg}")
        return m.shape[0] // 2, synthesize_gaussian(m, means, hbar).ops()
    except DecompositionError as exc:
        raise CliError(EXIT_VALIDATION, str(exc)) from exc


def cmd_decompose(args):
    try:
        matrix = read_matrix(args.file)
        means = None
        if args.means:
            means = np.asarray(read_matrix(args.means)).ravel()
            if np.iscomplexobj(means):
                raise CliError(EXIT_VALIDATION, "means must be real")
    except MatrixFileError as exc:
        raise CliError(EXIT_PARSE, str(exc)) from exc
    hbar = args.hbar if args.hbar is not None else DEFAULT_HBAR
    n, ops = decompose_matrix(matrix, args.kind, means, hbar)
    program = primitives_to_program(ops, n, hbar=None if hbar == DEFAULT_HBAR else hbar, name=args.kind)
    sys.stdout.write(serialize(program))
    return EXIT_OK


# ---------------------------------------------------------------------------
# example
# ---------------------------------------------------------------------------


def _parse_overrides(pairs):
    out = {}
    i = 0
    while i < len(pairs):
        key = pairs[i]
        if not key.startswith("--") or i + 1 >= len(pairs):
            raise CliError(EXIT_VALIDATION, f"expected '--key value' pairs, got {' '.join(pairs[i:])}")
        name = key[2:].replace("-", "_")
        name = EXAMPLE_ALIASES.get(name, name)
        text = pairs[i + 1]
        try:
            value = ast.literal_eval(text)
        except (ValueError, SyntaxError):
            value = text
        out[name] = value
        i += 2
    return out


def cmd_example(args, extra):
    from .algorithms import EXAMPLES

    name = args.name.replace("_", "-")
    if name not in EXAMPLES:
        raise CliError(EXIT_VALIDATION, f"unknown example '{args.name}'; available: {', '.join(sorted(EXAMPLES))}")
    overrides = _parse_overrides(extra)
    try:
        alg = EXAMPLES[name](**overrides)
    except TypeError as exc:
        raise CliError(EXIT_VALIDATION, f"{args.name}: {exc}") from exc
    except ValueError as exc:
        raise CliError(EXIT_VALIDATION, f"{args.name}: {exc}") from exc
    try:
        report = alg.evaluate()
    except EngineError as exc:
        raise CliError(EXIT_RUNTIME, f"{args.name}: runtime error: {exc}") from exc
    if args.output == "json":
        doc = {
            "name": report.name,
            "passed": report.passed,
            "checks": [
                {"label": c.label, "observed": c.observed, "expected": c.expected, "error": c.error,
                 "tolerance": c.tolerance, "passed": c.passed}
                for c in report.checks
            ],
        }
        print(dump_json(doc))
    else:
        print("\n".join(report.lines()))
        table = report.info.get("table")
        if table:
            print("  " + "  ".join(report.info.get("columns", ())))
            for row in table:
                print("  " + "  ".join(_fmt_cell(v) for v in row))
    return EXIT_OK if report.passed else EXIT_EXAMPLE_FAILED


def _fmt_cell(v):
    if isinstance(v, float):
        return f"{round(v, 10) + 0.0:.10f}"
    return str(v)


# ---------------------------------------------------------------------------
# entry point
# ---------------------------------------------------------------------------


def build_parser():
    parser = argparse.ArgumentParser(prog="qumode", description="Continuous-variable photonic circuit simulator.")
    parser.add_argument("--version", action="version", version=f"qumode {__version__}")
    sub = parser.add_subparsers(dest="command", required=True)

    run = sub.add_parser("run", help="parse, validate and execute a program")
    run.add_argument("file")
    run.add_argument("--backend", choices=("gaussian", "fock"), default="gaussian")
    run.add_argument("--cutoff", type=int)
    run.add_argument("--hbar", type=float)
    run.add_argument("--shots", type=int, default=1)
    run.add_argument("--seed", type=int, default=DEFAULT_SEED)
    run.add_argument("--pure", type=_bool, default=True)
    run.add_argument("--max-photons", type=int, default=DEFAULT_MAX_PHOTONS,
                     help="largest total photon number listed for the fock backend")
    run.add_argument("--output", choices=("json", "text"), default="json")

    check = sub.add_parser("check", help="parse and validate a program")
    check.add_argument("file")
    check.add_argument("--backend", choices=("gaussian", "fock"))

    dec = sub.add_parser("decompose", help="emit a primitive circuit for a matrix file")
    dec.add_argument("file")
    dec.add_argument("--kind", choices=KIND_CHOICES, required=True)
    dec.add_argument("--means", help="matrix file holding the mean vector (gaussian-state)")
    dec.add_argument("--hbar", type=float)

    ex = sub.add_parser("example", help="run a reference algorithm against its expectation")
    ex.add_argument("name")
    ex.add_argument("--output", choices=("json", "text"), default="text")
    return parser


def main(argv=None):
    parser = build_parser()
    args, extra = parser.parse_known_args(argv)
    if extra and args.command != "example":
        parser.error(f"unrecognized arguments: {' '.join(extra)}")
    try:
        if args.command == "run":
            return cmd_run(args)
        if args.command == "check":
            return cmd_check(args)
        if args.command == "decompose":
            return cmd_decompose(args)
        return cmd_example(args, extra)
    except CliError as exc:
        print(str(exc), file=sys.stderr)
        return exc.code


if __name__ == "__main__":
    sys.exit(main())
