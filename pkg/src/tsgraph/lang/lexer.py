"""Tokenizer for the troubleshooting-graph description language.

The lexer is modal: inside a declaration's argument list (between the
parentheses that follow a class name) it produces loose "bare" words,
quoted strings, integers, and balanced s-expression blobs instead of
structural tokens.  `//` starts a comment only outside argument lists,
so URLs survive as config values.
"""
from __future__ import annotations

from .source import ParseError, SourceSpan
from .tokens import Token, TokenKind

_IDENT_START = set("abcdefghijklmnopqrstuvwxyzABCDEFGHIJKLMNOPQRSTUVWXYZ_")
_IDENT_CONT = _IDENT_START | set("0123456789")
# Characters that end a bare word inside an argument list.
_BARE_TERMINATORS = set(' \t\r\n,()";')


class Lexer:
    def __init__(self, text: str, source_name: str = "<string>"):
        self.text = text
        self.source_name = source_name
        self.pos = 0
        self.byte_pos = 0
        self.line = 1
        self.column = 1
        self.in_args = False

    def tokens(self) -> list[Token]:
        out = []
        while True:
            tok = self._next()
            out.append(tok)
            if tok.kind is TokenKind.EOF:
                return out

    # position helpers

    def _peek(self, ahead: int = 0) -> str:
        i = self.pos + ahead
        return self.text[i] if i < len(self.text) else ""

    def _advance(self) -> str:
        ch = self.text[self.pos]
        self.pos += 1
        self.byte_pos += len(ch.encode("utf-8"))
        if ch == "\n":
            self.line += 1
            self.column = 1
        else:
            self.column += 1
        return ch

    def _mark(self) -> tuple[int, int, int]:
        return self.byte_pos, self.line, self.column

    def _span_from(self, mark: tuple[int, int, int]) -> SourceSpan:
        return SourceSpan(mark[0], self.byte_pos, mark[1], mark[2])

    def _error(self, message: str, mark: tuple[int, int, int] | None = None) -> ParseError:
        if mark is None:
            mark = self._mark()
        span = SourceSpan(mark[0], mark[0], mark[1], mark[2])
        return ParseError(message, span, self.source_name)

    # scanning

    def _next(self) -> Token:
        self._skip_trivia()
        mark = self._mark()
        if self.pos >= len(self.text):
            if self.in_args:
                raise self._error("unclosed argument list", mark)
            return Token(TokenKind.EOF, "", self._span_from(mark))
        if self.in_args:
            return self._next_arg(mark)
        return self._next_structural(mark)

    def _skip_trivia(self) -> None:
        while self.pos < len(self.text):
            ch = self._peek()
            if ch in " \t\r\n":
                self._advance()
            elif not self.in_args and ch == "/" and self._peek(1) == "/":
                while self.pos < len(self.text) and self._peek() != "\n":
                    self._advance()
            else:
                return

    def _next_structural(self, mark: tuple[int, int, int]) -> Token:
        ch = self._peek()
        if ch in _IDENT_START:
            return Token(TokenKind.IDENT, self._scan_ident(), self._span_from(mark))
        if ch.isdigit():
            return Token(TokenKind.INT, self._scan_digits(), self._span_from(mark))
        if ch == "-":
            if self._peek(1) == "-" and self._peek(2) == ">":
                for _ in range(3):
                    self._advance()
                return Token(TokenKind.SELF_ARROW, "-->", self._span_from(mark))
            if self._peek(1) == ">":
                self._advance()
                self._advance()
                return Token(TokenKind.ARROW, "->", self._span_from(mark))
            self._advance()
            return Token(TokenKind.MINUS, "-", self._span_from(mark))
        if ch == ":":
            if self._peek(1) == ":":
                self._advance()
                self._advance()
                return Token(TokenKind.DOUBLE_COLON, "::", self._span_from(mark))
            raise self._error("expected '::'", mark)
        if ch == '"':
            return Token(TokenKind.STRING, self._scan_string(mark), self._span_from(mark))
        simple = {
            "(": TokenKind.LPAREN,
            ")": TokenKind.RPAREN,
            "[": TokenKind.LBRACKET,
            "]": TokenKind.RBRACKET,
            ",": TokenKind.COMMA,
            ";": TokenKind.SEMICOLON,
        }
        if ch in simple:
            self._advance()
            if ch == "(":
                self.in_args = True
            return Token(simple[ch], ch, self._span_from(mark))
        raise self._error(f"unexpected character {ch!r}", mark)

    def _next_arg(self, mark: tuple[int, int, int]) -> Token:
        ch = self._peek()
        if ch == ")":
            self._advance()
            self.in_args = False
            return Token(TokenKind.RPAREN, ")", self._span_from(mark))
        if ch == ",":
            self._advance()
            return Token(TokenKind.COMMA, ",", self._span_from(mark))
        if ch == '"':
            return Token(TokenKind.STRING, self._scan_string(mark), self._span_from(mark))
        if ch == "(":
            return Token(TokenKind.SEXPR, self._scan_sexpr(mark), self._span_from(mark))
        if ch == ";":
            raise self._error("';' inside an argument list (missing ')'?)", mark)
        word = []
        while self.pos < len(self.text) and self._peek() not in _BARE_TERMINATORS:
            word.append(self._advance())
        text = "".join(word)
        if text.isdigit():
            return Token(TokenKind.INT, text, self._span_from(mark))
        return Token(TokenKind.IDENT, text, self._span_from(mark))

    def _scan_ident(self) -> str:
        chars = [self._advance()]
        while self.pos < len(self.text):
            ch = self._peek()
            if ch in _IDENT_CONT:
                chars.append(self._advance())
            elif ch == "-" and self._peek(1) in _IDENT_CONT:
                chars.append(self._advance())
            else:
                break
        return "".join(chars)

    def _scan_digits(self) -> str:
        chars = []
        while self.pos < len(self.text) and self._peek().isdigit():
            chars.append(self._advance())
        return "".join(chars)

    def _scan_string(self, mark: tuple[int, int, int]) -> str:
        self._advance()
        chars = []
        while True:
            if self.pos >= len(self.text) or self._peek() == "\n":
                raise self._error("unterminated string", mark)
            ch = self._advance()
            if ch == '"':
                return "".join(chars)
            if ch == "\\":
                if self.pos >= len(self.text):
                    raise self._error("unterminated string", mark)
                esc = self._advance()
                if esc not in ('"', "\\"):
                    raise self._error(f"unknown escape '\\{esc}'", mark)
                chars.append(esc)
            else:
                chars.append(ch)

    def _scan_sexpr(self, mark: tuple[int, int, int]) -> str:
        # Captured verbatim, balanced parens, quotes shield inner parens.
        chars = []
        depth = 0
        in_string = False
        while True:
            if self.pos >= len(self.text):
                raise self._error("unbalanced s-expression", mark)
            ch = self._advance()
            chars.append(ch)
            if in_string:
                if ch == "\\" and self.pos < len(self.text):
                    chars.append(self._advance())
                elif ch == '"':
                    in_string = False
                continue
            if ch == '"':
                in_string = True
            elif ch == "(":
                depth += 1
            elif ch == ")":
                depth -= 1
                if depth == 0:
                    return "".join(chars)


def tokenize(text: str, source_name: str = "<string>") -> list[Token]:
    return Lexer(text, source_name).tokens()
