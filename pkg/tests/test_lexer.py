import pytest

from tsgraph.lang.lexer import tokenize
from tsgraph.lang.source import ParseError
from tsgraph.lang.tokens import TokenKind


def kinds(text):
    return [t.kind for t in tokenize(text)]


def texts(text):
    return [t.text for t in tokenize(text)[:-1]]


def test_structural_tokens():
    assert kinds("a :: B(); a -> b;") == [
        TokenKind.IDENT, TokenKind.DOUBLE_COLON, TokenKind.IDENT,
        TokenKind.LPAREN, TokenKind.RPAREN, TokenKind.SEMICOLON,
        TokenKind.IDENT, TokenKind.ARROW, TokenKind.IDENT,
        TokenKind.SEMICOLON, TokenKind.EOF,
    ]


def test_arrows_without_spaces():
    assert kinds("a->b;")[:3] == [TokenKind.IDENT, TokenKind.ARROW, TokenKind.IDENT]
    assert kinds("a-->b;")[:3] == [TokenKind.IDENT, TokenKind.SELF_ARROW, TokenKind.IDENT]


def test_hyphenated_identifiers():
    assert texts("ifc-decision -> ds;") == ["ifc-decision", "->", "ds", ";"]
    assert texts("t :: Topology-SDN(x);")[:3] == ["t", "::", "Topology-SDN"]


def test_port_list_tokens():
    assert kinds("[0, -2]")[:6] == [
        TokenKind.LBRACKET, TokenKind.INT, TokenKind.COMMA,
        TokenKind.MINUS, TokenKind.INT, TokenKind.RBRACKET,
    ]


def test_comments_skipped():
    assert texts("// watch this graph\na -> b; // tail\n") == ["a", "->", "b", ";"]


def test_bare_args_keep_flags_and_urls():
    toks = tokenize("Arp(localhost, nil, -n);")
    assert [t.text for t in toks[2:7]] == ["localhost", ",", "nil", ",", "-n"]
    toks = tokenize("Dpids-pox(http://127.0.0.1:8181);")
    assert toks[2].text == "http://127.0.0.1:8181"
    assert toks[2].kind is TokenKind.IDENT


def test_quoted_arg_with_escapes():
    toks = tokenize('Format("{\\"dpid\\":\\"{0}\\"}");')
    assert toks[2].kind is TokenKind.STRING
    assert toks[2].text == '{"dpid":"{0}"}'


def test_sexpr_blob_captured_verbatim():
    toks = tokenize("Decision(c, (lambda (x) (> (length x) 0)));")
    blob = toks[4]
    assert blob.kind is TokenKind.SEXPR
    assert blob.text == "(lambda (x) (> (length x) 0))"


def test_sexpr_with_quoted_parens():
    toks = tokenize('Decision(c, (string-match ")" input));')
    assert toks[4].text == '(string-match ")" input)'


def test_integer_args():
    toks = tokenize("Clock(5);")
    assert toks[2].kind is TokenKind.INT
    assert toks[2].text == "5"


def test_unclosed_argument_list():
    with pytest.raises(ParseError) as err:
        tokenize("ping :: Ping(localhost")
    assert err.value.message == "unclosed argument list"
    assert err.value.span.start == len("ping :: Ping(localhost")


def test_unterminated_string():
    with pytest.raises(ParseError, match="unterminated string"):
        tokenize('Format("oops);')


def test_spans_monotonic_and_byte_accurate():
    src = "a -> b;\nx :: Y(q);\n"
    toks = tokenize(src)
    offsets = [t.span.start for t in toks]
    assert offsets == sorted(offsets)
    ident = toks[4]
    assert ident.text == "x"
    assert src.encode()[ident.span.start:ident.span.end].decode() == "x"
    assert ident.span.line == 2
    assert ident.span.column == 1
