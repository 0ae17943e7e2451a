"""Tokenizer for circuit programs.

A complex literal such as ``0.5+0.1j`` is a single token, as is a register
reference ``q[3]``. In unary position (start of an expression, after ``(``,
``,``, ``=``, ``[`` or an arithmetic operator) a leading sign belongs to the
numeric literal that follows it, so ``-0.5+0.1j`` is the complex number
``-0.5 + 0.1i`` rather than the negation of ``0.5 + 0.1i``.
"""
import re
from dataclasses import dataclass

IDENT = "IDENT"
NUMBER = "NUMBER"
COMPLEX = "COMPLEX"
STRING = "STRING"
REG = "REG"
MATREF = "MATREF"
LPAREN, RPAREN, LBRACK, RBRACK = "LPAREN", "RPAREN", "LBRACK", "RBRACK"
COMMA, PIPE, EQUALS = "COMMA", "PIPE", "EQUALS"
PLUS, MINUS, STAR, SLASH = "PLUS", "MINUS", "STAR", "SLASH"
NEWLINE = "NEWLINE"
EOF = "EOF"

_PUNCT = {
    "(": LPAREN,
    ")": RPAREN,
    "[": LBRACK,
    "]": RBRACK,
    ",": COMMA,
    "|": PIPE,
    "=": EQUALS,
    "+": PLUS,
    "-": MINUS,
    "*": STAR,
    "/": SLASH,
}
_UNARY_AFTER = {None, LPAREN, LBRACK, COMMA, EQUALS, PLUS, MINUS, STAR, SLASH, NEWLINE}

_FLOAT = r"(?:\d+\.\d*|\.\d+|\d+)(?:[eE][+-]?\d+)?"
_COMPLEX_RE = re.compile(rf"([+-]?)({_FLOAT})([+-])({_FLOAT})j")
_IMAG_RE = re.compile(rf"([+-]?)({_FLOAT})j")
_NUMBER_RE = re.compile(rf"([+-]?)({_FLOAT})")
_IDENT_RE = re.compile(r"[A-Za-z_][A-Za-z_0-9]*")
_REG_RE = re.compile(r"q\[\s*(\d+)\s*\]")


class LexError(ValueError):
    """Illegal input, with its position."""

    def __init__(self, message, line, col):
        super().__init__(f"{line}:{col}: {message}")
        self.message = message
        self.line = line
        self.col = col


@dataclass(frozen=True)
class Token:
    """A token with its 1-based source position."""

    type: str
    value: object
    line: int
    col: int


def _number_value(text):
    if re.fullmatch(r"[+-]?\d+", text):
        return int(text)
    return float(text)


def tokenize(text):
    """Splits program text into tokens.

    Args:
        text (str): program source

    Returns:
        list[Token]: tokens ending with ``EOF``; line breaks become ``NEWLINE``
        and ``#`` comments are dropped
    """
    tokens = []
    line, pos, line_start = 1, 0, 0
    n = len(text)

    def prev_type():
        return tokens[-1].type if tokens else None

    while pos < n:
        ch = text[pos]
        col = pos - line_start + 1
        if ch == "\n":
            tokens.append(Token(NEWLINE, "\n", line, col))
            pos += 1
            line += 1
            line_start = pos
            continue
        if ch in " \t\r":
            pos += 1
            continue
        if ch == "#":
            while pos < n and text[pos] != "\n":
                pos += 1
            continue
        if ch == '"':
            end = pos + 1
            buf = []
            while end < n and text[end] != '"':
                if text[end] == "\n":
                    break
                if text[end] == "\\" and end + 1 < n:
                    buf.append(text[end + 1])
                    end += 2
                    continue
                buf.append(text[end])
                end += 1
            if end >= n or text[end] != '"':
                raise LexError("unterminated string", line, col)
            tokens.append(Token(STRING, "".join(buf), line, col))
            pos = end + 1
            continue
        unary = prev_type() in _UNARY_AFTER
        if ch.isdigit() or ch == "." or (ch in "+-" and unary and pos + 1 < n and (text[pos + 1].isdigit() or text[pos + 1] == ".")):
            m = _COMPLEX_RE.match(text, pos)
            if m and (m.group(1) == "" or unary):
                sign = -1 if m.group(1) == "-" else 1
                imag = float(m.group(4)) * (-1 if m.group(3) == "-" else 1)
                tokens.append(Token(COMPLEX, complex(sign * float(m.group(2)), imag), line, col))
                pos = m.end()
                continue
            m = _IMAG_RE.match(text, pos)
            if m:
                sign = -1 if m.group(1) == "-" else 1
                tokens.append(Token(COMPLEX, complex(0.0, sign * float(m.group(2))), line, col))
                pos = m.end()
                continue
            m = _NUMBER_RE.match(text, pos)
            if m and m.group(2):
                tokens.append(Token(NUMBER, _number_value(m.group(1) + m.group(2)), line, col))
                pos = m.end()
                continue
            raise LexError(f"malformed number starting with {ch!r}", line, col)
        if ch == "@":
            m = _IDENT_RE.match(text, pos + 1)
            if not m:
                raise LexError("expected a matrix name after '@'", line, col)
            tokens.append(Token(MATREF, m.group(0), line, col))
            pos = m.end()
            continue
        if ch == "q":
            m = _REG_RE.match(text, pos)
            if m:
                tokens.append(Token(REG, int(m.group(1)), line, col))
                pos = m.end()
                continue
        if ch.isalpha() or ch == "_":
            m = _IDENT_RE.match(text, pos)
            tokens.append(Token(IDENT, m.group(0), line, col))
            pos = m.end()
            continue
        if ch in _PUNCT:
            tokens.append(Token(_PUNCT[ch], ch, line, col))
            pos += 1
            continue
        raise LexError(f"illegal character {ch!r}", line, col)
    tokens.append(Token(EOF, None, line, pos - line_start + 1))
    return tokens
