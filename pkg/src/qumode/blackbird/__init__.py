"""Text language for circuit programs: lexer, parser, validator and serializer."""
from .ast import (
    BinOp,
    Call,
    EvaluationError,
    ListExpr,
    MatRef,
    Neg,
    Num,
    OperationNode,
    Pi,
    Program,
    Reg,
    Str,
)
from .lexer import LexError, Token, tokenize
from .matrices import MatrixFileError, read_matrix, resolve_matrices, write_matrix
from .ops import TABLES, VOCABULARY, lookup
from .parser import ParseError, parse, parse_text
from .serialize import format_expr, format_operation, serialize
from .validate import Diagnostic, ValidationError, ValidationReport, validate

__all__ = [
    "BinOp", "Call", "Diagnostic", "EvaluationError", "LexError", "ListExpr", "MatRef",
    "MatrixFileError", "Neg", "Num", "OperationNode", "ParseError", "Pi", "Program", "Reg",
    "Str", "TABLES", "Token", "VOCABULARY", "ValidationError", "ValidationReport",
    "format_expr", "format_operation", "lookup", "parse", "parse_text", "read_matrix",
    "resolve_matrices", "serialize", "tokenize", "validate", "write_matrix",
]
