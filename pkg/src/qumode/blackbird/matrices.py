"""Sidecar matrix files referenced as ``@name`` in programs.

A file holds a ``rows cols`` line followed by ``rows*cols`` row-major entries,
each written as a ``re im`` pair. Entries may be split across lines freely.
"""
import os
from pathlib import Path

import numpy as np

from .ast import ListExpr, MatRef

ENV_VAR = "QUMODE_MATRIX_PATH"
EXTENSIONS = ("", ".txt", ".mat")


class MatrixFileError(ValueError):
    """Malformed or missing matrix file."""


def read_matrix(path):
    """Loads a matrix file.

    Returns:
        array: real when every imaginary part is zero, complex otherwise
    """
    path = Path(path)
    try:
        words = path.read_text().split()
    except OSError as exc:
        raise MatrixFileError(f"cannot read matrix file {path}: {exc}") from exc
    try:
        rows, cols = int(words[0]), int(words[1])
        values = [float(w) for w in words[2:]]
    except (IndexError, ValueError) as exc:
        raise MatrixFileError(f"{path}: expected 'rows cols' then numeric 're im' pairs") from exc
    if rows < 1 or cols < 1:
        raise MatrixFileError(f"{path}: matrix shape must be positive, got {rows}x{cols}")
    if len(values) != 2 * rows * cols:
        raise MatrixFileError(
            f"{path}: expected {2 * rows * cols} numbers for a {rows}x{cols} matrix, got {len(values)}"
        )
    pairs = np.array(values).reshape(rows, cols, 2)
    if np.all(pairs[..., 1] == 0):
        return pairs[..., 0].copy()
    return pairs[..., 0] + 1j * pairs[..., 1]


def write_matrix(path, matrix):
    """Writes a matrix (or vector, as one row) in sidecar format."""
    m = np.atleast_2d(np.asarray(matrix, dtype=complex))
    lines = [f"{m.shape[0]} {m.shape[1]}"]
    for row in m:
        lines.append(" ".join(f"{v.real!r} {v.imag!r}" for v in row.tolist()))
    Path(path).write_text("\n".join(lines) + "\n")


def search_path(base_dir=None):
    """Directories searched for sidecar files: ``base_dir`` then the env var entries."""
    dirs = []
    if base_dir is not None:
        dirs.append(Path(base_dir))
    for entry in os.environ.get(ENV_VAR, "").split(os.pathsep):
        if entry:
            dirs.append(Path(entry))
    return dirs


def find_matrix(name, base_dir=None):
    for directory in search_path(base_dir):
        for ext in EXTENSIONS:
            candidate = directory / f"{name}{ext}"
            if candidate.is_file():
                return candidate
    return None


def matrix_refs(program):
    """Names of all ``@name`` references in program order, without repeats."""
    names = []

    def walk(expr):
        if isinstance(expr, MatRef):
            if expr.name not in names:
                names.append(expr.name)
        elif isinstance(expr, ListExpr):
            for item in expr.items:
                walk(item)

    for op in program.ops:
        for expr in list(op.args) + list(op.kwargs.values()):
            walk(expr)
    return names


def resolve_matrices(program, base_dir=None):
    """Loads every matrix the program references.

    Args:
        program (Program): parsed program
        base_dir (str or Path): directory of the program file, searched first

    Returns:
        dict[str, array]: matrices by reference name

    Raises:
        MatrixFileError: a reference has no file on the search path or the file is malformed
    """
    out = {}
    for name in matrix_refs(program):
        path = find_matrix(name, base_dir)
        if path is None:
            where = ", ".join(str(d) for d in search_path(base_dir)) or "(empty search path)"
            raise MatrixFileError(f"matrix @{name} not found in {where}")
        out[name] = read_matrix(path)
    return out
