"""Recursive-descent parser producing TsgDocument trees."""
from __future__ import annotations

from .ast import (
    ARROW,
    SELF_ARROW,
    ConfigKind,
    ConfigValue,
    Endpoint,
    LinkChain,
    NIL,
    NodeDecl,
    PortKind,
    PortRef,
    Statement,
    TsgDocument,
)
from .lexer import tokenize
from .source import ParseError, SourceSpan
from .tokens import Token, TokenKind


class _Parser:
    def __init__(self, text: str, source_name: str):
        self.source_name = source_name
        self.toks = tokenize(text, source_name)
        self.pos = 0

    def peek(self) -> Token:
        return self.toks[self.pos]

    def advance(self) -> Token:
        tok = self.toks[self.pos]
        if tok.kind is not TokenKind.EOF:
            self.pos += 1
        return tok

    def expect(self, kind: TokenKind) -> Token:
        tok = self.peek()
        if tok.kind is not kind:
            raise self.error(f"expected {kind.value}, found {tok.kind.value}", tok)
        return self.advance()

    def error(self, message: str, tok: Token) -> ParseError:
        return ParseError(message, tok.span, self.source_name)

    def document(self) -> TsgDocument:
        statements: list[Statement] = []
        while self.peek().kind is not TokenKind.EOF:
            statements.append(self.statement())
        return TsgDocument(tuple(statements), self.source_name)

    def statement(self) -> Statement:
        start = self.peek()
        if start.kind is TokenKind.LBRACKET:
            raise self.error("port list before the first endpoint of a chain", start)
        first = self.element()
        if self.peek().kind is TokenKind.SEMICOLON:
            self.advance()
            if first.pre_ports is not None or first.post_ports is not None:
                raise self.error("port list on a declaration statement", start)
            if not isinstance(first.target, NodeDecl):
                raise self.error("expected '::' or a link operator", start)
            if first.target.name is None:
                raise self.error("anonymous declaration outside a link chain", start)
            return first.target
        elements = [first]
        operators: list[str] = []
        while self.peek().kind in (TokenKind.ARROW, TokenKind.SELF_ARROW):
            op_tok = self.advance()
            op = ARROW if op_tok.kind is TokenKind.ARROW else SELF_ARROW
            if op == SELF_ARROW and elements[-1].post_ports is not None:
                raise self.error("'-->' links the node itself and takes no source port list", op_tok)
            operators.append(op)
            elements.append(self.element())
        if not operators:
            raise self.error("expected '::' or a link operator", self.peek())
        if elements[-1].post_ports is not None:
            raise self.error("port list after the final endpoint of a chain", self.peek())
        self.expect(TokenKind.SEMICOLON)
        span = SourceSpan(
            start.span.start, elements[-1].span.end if elements[-1].span else start.span.end,
            start.span.line, start.span.column,
        )
        return LinkChain(tuple(elements), tuple(operators), span)

    def element(self) -> Endpoint:
        start = self.peek()
        pre = self.port_list(PortKind.INPUT) if start.kind is TokenKind.LBRACKET else None
        name_tok = self.expect(TokenKind.IDENT)
        target: str | NodeDecl
        if self.peek().kind is TokenKind.DOUBLE_COLON:
            self.advance()
            class_tok = self.expect(TokenKind.IDENT)
            args = self.arg_list()
            target = NodeDecl(name_tok.text, class_tok.text, args, name_tok.span)
        elif self.peek().kind is TokenKind.LPAREN:
            args = self.arg_list()
            target = NodeDecl(None, name_tok.text, args, name_tok.span)
        else:
            target = name_tok.text
        post = self.port_list(PortKind.OUTPUT) if self.peek().kind is TokenKind.LBRACKET else None
        end = self.toks[self.pos - 1].span.end
        span = SourceSpan(start.span.start, end, start.span.line, start.span.column)
        return Endpoint(target, pre, post, span)

    def port_list(self, role: PortKind) -> tuple[PortRef, ...]:
        self.expect(TokenKind.LBRACKET)
        ports: list[PortRef] = []
        while True:
            tok = self.peek()
            if tok.kind is TokenKind.MINUS:
                if role is PortKind.OUTPUT:
                    raise self.error("config index not allowed in a source port list", tok)
                self.advance()
                num = self.expect(TokenKind.INT)
                index = int(num.text)
                if index == 0:
                    raise self.error("config index 0 is invalid (config slots start at 1)", num)
                ports.append(PortRef(PortKind.CONFIG, index))
            elif tok.kind is TokenKind.INT:
                self.advance()
                kind = PortKind.OUTPUT if role is PortKind.OUTPUT else PortKind.INPUT
                ports.append(PortRef(kind, int(tok.text)))
            else:
                raise self.error(f"expected port index, found {tok.kind.value}", tok)
            tok = self.peek()
            if tok.kind is TokenKind.COMMA:
                self.advance()
                continue
            self.expect(TokenKind.RBRACKET)
            return tuple(ports)

    def arg_list(self) -> tuple[ConfigValue, ...]:
        self.expect(TokenKind.LPAREN)
        if self.peek().kind is TokenKind.RPAREN:
            self.advance()
            return ()
        args: list[ConfigValue] = []
        while True:
            args.append(self.arg_value())
            tok = self.peek()
            if tok.kind is TokenKind.COMMA:
                self.advance()
                continue
            self.expect(TokenKind.RPAREN)
            return tuple(args)

    def arg_value(self) -> ConfigValue:
        tok = self.advance()
        if tok.kind is TokenKind.STRING:
            return ConfigValue(ConfigKind.STRING, tok.text)
        if tok.kind is TokenKind.INT:
            return ConfigValue(ConfigKind.INTEGER, tok.text)
        if tok.kind is TokenKind.SEXPR:
            return ConfigValue(ConfigKind.SEXPR, tok.text)
        if tok.kind is TokenKind.IDENT:
            if tok.text == "nil":
                return NIL
            return ConfigValue(ConfigKind.BARE, tok.text)
        raise self.error(f"expected argument value, found {tok.kind.value}", tok)


def parse_document(text: str, source_name: str = "<string>") -> TsgDocument:
    return _Parser(text, source_name).document()
