"""Recursive-descent parser for circuit programs.

Grammar::

    program    := { header NEWLINE } { operation NEWLINE }
    header     := "modes" INT | "hbar" NUMBER | "cutoff" INT | "name" STRING
    operation  := IDENT [ "(" [ arglist ] ")" ] "|" targets
    arglist    := arg { "," arg }
    arg        := expr | IDENT "=" expr
    targets    := REG | "(" REG { "," REG } ")"
    expr       := term { ("+" | "-") term }
    term       := unary { ("*" | "/") unary }
    unary      := "-" unary | "+" unary | atom
    atom       := NUMBER | COMPLEX | STRING | REG | MATREF | "pi"
                | "sqrt" "(" expr ")" | "(" expr ")" | "[" [ expr { "," expr } ] "]"
"""
from . import lexer as lx
from .ast import BinOp, Call, FUNCTIONS, ListExpr, MatRef, Neg, Num, OperationNode, Pi, Program, Reg, Str
from .ops import lookup

HEADERS = ("name", "modes", "hbar", "cutoff")

_DESCRIBE = {
    lx.IDENT: "a name",
    lx.NUMBER: "a number",
    lx.COMPLEX: "a complex number",
    lx.STRING: "a string",
    lx.REG: "a register q[i]",
    lx.MATREF: "a matrix reference",
    lx.LPAREN: "'('",
    lx.RPAREN: "')'",
    lx.LBRACK: "'['",
    lx.RBRACK: "']'",
    lx.COMMA: "','",
    lx.PIPE: "'|'",
    lx.EQUALS: "'='",
    lx.PLUS: "'+'",
    lx.MINUS: "'-'",
    lx.STAR: "'*'",
    lx.SLASH: "'/'",
    lx.NEWLINE: "end of line",
    lx.EOF: "end of input",
}


class ParseError(ValueError):
    """Syntax error at a source position."""

    def __init__(self, message, line, col):
        super().__init__(f"{line}:{col}: {message}")
        self.message = message
        self.line = line
        self.col = col


def _describe(token):
    if token.type in (lx.IDENT, lx.NUMBER, lx.COMPLEX):
        return repr(token.value) if token.type != lx.IDENT else f"'{token.value}'"
    if token.type == lx.REG:
        return f"q[{token.value}]"
    return _DESCRIBE[token.type]


class _Parser:
    def __init__(self, tokens):
        self.tokens = list(tokens)
        self.pos = 0

    @property
    def tok(self):
        return self.tokens[self.pos]

    def advance(self):
        token = self.tokens[self.pos]
        if token.type != lx.EOF:
            self.pos += 1
        return token

    def error(self, expected, token=None):
        token = token or self.tok
        raise ParseError(f"expected {expected}, found {_describe(token)}", token.line, token.col)

    def expect(self, ttype, expected=None):
        if self.tok.type != ttype:
            self.error(expected or _DESCRIBE[ttype])
        return self.advance()

    def skip_newlines(self):
        while self.tok.type == lx.NEWLINE:
            self.advance()

    def end_of_line(self):
        if self.tok.type not in (lx.NEWLINE, lx.EOF):
            self.error("end of line")
        self.advance()

    # program structure

    def program(self):
        prog = Program()
        seen = set()
        self.skip_newlines()
        while self.tok.type == lx.IDENT and self.tok.value in HEADERS and self._is_header():
            key = self.advance()
            if key.value in seen:
                raise ParseError(f"duplicate '{key.value}' directive", key.line, key.col)
            seen.add(key.value)
            if key.value == "name":
                prog.name = self.expect(lx.STRING).value
            elif key.value in ("modes", "cutoff"):
                value = self.expect(lx.NUMBER, "an integer")
                if not isinstance(value.value, int):
                    self.error("an integer", value)
                setattr(prog, key.value, value.value)
            else:
                value = self.expect(lx.NUMBER, "a number")
                prog.hbar = value.value
            self.end_of_line()
            self.skip_newlines()
        while self.tok.type != lx.EOF:
            if self.tok.type == lx.IDENT and self.tok.value in HEADERS and self._is_header():
                token = self.tok
                raise ParseError(
                    f"'{token.value}' directive must precede the first operation", token.line, token.col
                )
            prog.ops.append(self.operation())
            self.end_of_line()
            self.skip_newlines()
        return prog

    def _is_header(self):
        # a header keyword is followed by its value, an operation by '(' or '|'
        nxt = self.tokens[self.pos + 1]
        return nxt.type in (lx.NUMBER, lx.STRING)

    def operation(self):
        name = self.expect(lx.IDENT, "an operation name")
        args, kwargs = [], {}
        if self.tok.type == lx.LPAREN:
            self.advance()
            if self.tok.type != lx.RPAREN:
                while True:
                    if self.tok.type == lx.IDENT and self.tokens[self.pos + 1].type == lx.EQUALS:
                        key = self.advance()
                        self.advance()
                        if key.value in kwargs:
                            raise ParseError(f"duplicate keyword '{key.value}'", key.line, key.col)
                        kwargs[key.value] = self.expr()
                    else:
                        if kwargs:
                            self.error("a keyword argument")
                        args.append(self.expr())
                    if self.tok.type == lx.COMMA:
                        self.advance()
                        continue
                    break
            self.expect(lx.RPAREN, "',' or ')'")
        self.expect(lx.PIPE, "'|' followed by target registers")
        targets = self.targets()
        spec = lookup(name.value)
        kind = spec.kind if spec is not None else "unknown"
        return OperationNode(name.value, kind, args, kwargs, targets, name.line, name.col)

    def targets(self):
        if self.tok.type == lx.REG:
            return [self.advance().value]
        self.expect(lx.LPAREN, "a register q[i] or '('")
        regs = [self.expect(lx.REG).value]
        while self.tok.type == lx.COMMA:
            self.advance()
            regs.append(self.expect(lx.REG).value)
        self.expect(lx.RPAREN, "',' or ')'")
        return regs

    # expressions

    def expr(self):
        node = self.term()
        while self.tok.type in (lx.PLUS, lx.MINUS):
            op = self.advance().value
            node = BinOp(op, node, self.term())
        return node

    def term(self):
        node = self.unary()
        while self.tok.type in (lx.STAR, lx.SLASH):
            op = self.advance().value
            node = BinOp(op, node, self.unary())
        return node

    def unary(self):
        if self.tok.type == lx.MINUS:
            self.advance()
            return Neg(self.unary())
        if self.tok.type == lx.PLUS:
            self.advance()
            return self.unary()
        return self.atom()

    def atom(self):
        tok = self.tok
        if tok.type in (lx.NUMBER, lx.COMPLEX):
            self.advance()
            return Num(tok.value)
        if tok.type == lx.STRING:
            self.advance()
            return Str(tok.value)
        if tok.type == lx.REG:
            self.advance()
            return Reg(tok.value)
        if tok.type == lx.MATREF:
            self.advance()
            return MatRef(tok.value)
        if tok.type == lx.IDENT:
            if tok.value == "pi":
                self.advance()
                return Pi()
            if tok.value in FUNCTIONS:
                self.advance()
                self.expect(lx.LPAREN)
                arg = self.expr()
                self.expect(lx.RPAREN)
                return Call(tok.value, (arg,))
            raise ParseError(f"unknown identifier '{tok.value}' in expression", tok.line, tok.col)
        if tok.type == lx.LPAREN:
            self.advance()
            node = self.expr()
            self.expect(lx.RPAREN)
            return node
        if tok.type == lx.LBRACK:
            self.advance()
            items = []
            if self.tok.type != lx.RBRACK:
                items.append(self.expr())
                while self.tok.type == lx.COMMA:
                    self.advance()
                    items.append(self.expr())
            self.expect(lx.RBRACK, "',' or ']'")
            return ListExpr(tuple(items))
        self.error("an expression")


def parse(tokens):
    """Builds a :class:`Program` from a token stream.

    Args:
        tokens (list[Token]): output of :func:`tokenize`

    Returns:
        Program: header directives and operations

    Raises:
        ParseError: on the first syntax error, naming the expected token
    """
    return _Parser(tokens).program()


def parse_text(text):
    """Tokenizes and parses program text.

    Raises:
        LexError: illegal character or unterminated string
        ParseError: syntax error
    """
    return parse(lx.tokenize(text))
