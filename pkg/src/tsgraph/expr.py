"""Tiny s-expression language used by Decision verifiers and Function configs.

Atoms are integers, double-quoted strings, and symbols.  A leading quote
mark turns the next datum into a literal, which keeps config spellings
like 'input-0 working.  The operator set is closed: length, string-match,
the comparisons, not, and, or, and single-parameter lambda.
"""

from __future__ import annotations

import re
from dataclasses import dataclass
from typing import Sequence

_MAX_DEPTH = 200

_INT_RE = re.compile(r"-?[0-9]+")
_ATOM_END = set(" \t\r\n()'\"")


class ExprError(Exception):
    """Raised when compiling or evaluating an expression fails."""


class Symbol(str):
    """Bare name inside an expression, distinct from a string literal."""

    __slots__ = ()

    def __repr__(self) -> str:
        return f"Symbol({str.__repr__(self)})"


@dataclass(frozen=True)
class Lambda:
    """Closure produced by evaluating a lambda form."""

    param: str
    body: object
    env: dict


def compile_expr(text: str):
    """Parse one expression; reject trailing junk and unbalanced parens."""
    datum, pos = _read(text, _skip_ws(text, 0))
    pos = _skip_ws(text, pos)
    if pos != len(text):
        raise ExprError(f"trailing text after expression at offset {pos}")
    return datum


def eval_expr(program, inputs: Sequence[str]):
    """Evaluate with input/input-N bound to the given texts.

    Returns False or a rendered string.  A program that evaluates to a
    lambda is applied to inputs[0], so both spellings of a verifier work:
    (lambda (x) ...) and an expression using the input symbol directly.
    """
    env = {f"input-{i}": text for i, text in enumerate(inputs)}
    if inputs:
        env["input"] = inputs[0]
    value = _eval(program, env, 0)
    if isinstance(value, Lambda):
        if not inputs:
            raise ExprError("expression yielded a function and there is no input to apply it to")
        value = _apply(value, [inputs[0]], 0)
    return render_result(value)


def run_expr(text: str, inputs: Sequence[str]):
    """Compile and evaluate in one step."""
    return eval_expr(compile_expr(text), inputs)


def render_result(value):
    """Map a runtime value to the False-or-string verifier protocol."""
    if value is False:
        return False
    if value is True:
        return "t"
    if isinstance(value, bool):  # pragma: no cover - bool handled above
        raise AssertionError
    if isinstance(value, int):
        return str(value)
    if isinstance(value, str):
        return str(value)
    raise ExprError("expression yielded a function, not a value")


def looks_like_expr(text: str) -> bool:
    """Config values that start a list are expressions, not function names."""
    return text.lstrip().startswith("(")


# -- reader ------------------------------------------------------------------


def _skip_ws(text: str, pos: int) -> int:
    while pos < len(text) and text[pos] in " \t\r\n":
        pos += 1
    return pos


def _read(text: str, pos: int):
    if pos >= len(text):
        raise ExprError("unexpected end of expression")
    ch = text[pos]
    if ch == "(":
        items = []
        pos += 1
        while True:
            pos = _skip_ws(text, pos)
            if pos >= len(text):
                raise ExprError("missing ')'")
            if text[pos] == ")":
                return items, pos + 1
            datum, pos = _read(text, pos)
            items.append(datum)
    if ch == ")":
        raise ExprError(f"unexpected ')' at offset {pos}")
    if ch == "'":
        datum, pos = _read(text, _skip_ws(text, pos + 1))
        return [Symbol("quote"), datum], pos
    if ch == '"':
        return _read_string(text, pos)
    return _read_atom(text, pos)


def _read_string(text: str, pos: int):
    out = []
    pos += 1
    while pos < len(text):
        ch = text[pos]
        if ch == '"':
            return "".join(out), pos + 1
        if ch == "\\" and pos + 1 < len(text):
            out.append(text[pos + 1])
            pos += 2
            continue
        out.append(ch)
        pos += 1
    raise ExprError("unterminated string literal")


def _read_atom(text: str, pos: int):
    start = pos
    while pos < len(text) and text[pos] not in _ATOM_END:
        pos += 1
    word = text[start:pos]
    if _INT_RE.fullmatch(word):
        return int(word), pos
    return Symbol(word), pos


# -- evaluator ---------------------------------------------------------------


def _eval(datum, env: dict, depth: int):
    if depth > _MAX_DEPTH:
        raise ExprError("expression nesting too deep")
    if isinstance(datum, Symbol):
        return env.get(datum, str(datum))
    if isinstance(datum, (int, str)):
        return datum
    if isinstance(datum, list):
        return _eval_form(datum, env, depth + 1)
    raise ExprError(f"unsupported datum {datum!r}")


def _eval_form(form: list, env: dict, depth: int):
    if not form:
        raise ExprError("empty application ()")
    head = form[0]
    if isinstance(head, Symbol):
        name = str(head)
        if name == "quote":
            if len(form) != 2:
                raise ExprError("quote takes exactly one datum")
            return _unquote(form[1])
        if name == "lambda":
            return _make_lambda(form, env)
        if name == "and":
            value = True
            for item in form[1:]:
                value = _eval(item, env, depth)
                if value is False:
                    return False
            return value
        if name == "or":
            for item in form[1:]:
                value = _eval(item, env, depth)
                if value is not False:
                    return value
            return False
        if name == "not":
            if len(form) != 2:
                raise ExprError("not takes exactly one argument")
            return _eval(form[1], env, depth) is False
        if name in _BUILTINS:
            args = [_eval(item, env, depth) for item in form[1:]]
            return _BUILTINS[name](args)
    fn = _eval(head, env, depth)
    args = [_eval(item, env, depth) for item in form[1:]]
    return _apply(fn, args, depth)


def _make_lambda(form: list, env: dict) -> Lambda:
    if len(form) != 3 or not isinstance(form[1], list):
        raise ExprError("lambda form must be (lambda (param) body)")
    params = form[1]
    if len(params) != 1 or not isinstance(params[0], Symbol):
        raise ExprError("lambda takes exactly one parameter")
    return Lambda(str(params[0]), form[2], dict(env))


def _apply(fn, args: list, depth: int):
    if not isinstance(fn, Lambda):
        raise ExprError(f"not a function: {fn!r}")
    if len(args) != 1:
        raise ExprError(f"lambda takes exactly one argument, got {len(args)}")
    env = dict(fn.env)
    env[fn.param] = args[0]
    return _eval(fn.body, env, depth + 1)


def _unquote(datum):
    if isinstance(datum, Symbol):
        return str(datum)
    if isinstance(datum, (int, str)):
        return datum
    raise ExprError("quote supports atoms only")


def _builtin_length(args: list) -> int:
    if len(args) != 1:
        raise ExprError("length takes exactly one argument")
    value = args[0]
    if not isinstance(value, str):
        raise ExprError(f"length expects a string, got {_type_name(value)}")
    return len(value)


def string_match(pattern: str, text: str):
    """First line of text the pattern matches, or False."""
    try:
        compiled = re.compile(pattern)
    except re.error as err:
        raise ExprError(f"bad pattern {pattern!r}: {err}") from err
    for line in text.splitlines():
        if compiled.search(line):
            return line
    return False


def _builtin_string_match(args: list):
    if len(args) != 2:
        raise ExprError("string-match takes a pattern and a text")
    pattern, text = args
    if not isinstance(pattern, str) or not isinstance(text, str):
        raise ExprError("string-match expects string arguments")
    return string_match(pattern, text)


def _comparison(name: str, op):
    def run(args: list):
        if len(args) != 2:
            raise ExprError(f"'{name}' takes exactly two arguments")
        left, right = args
        if isinstance(left, bool) or isinstance(right, bool):
            raise ExprError(f"'{name}' expects integers, got a boolean")
        if not isinstance(left, int) or not isinstance(right, int):
            raise ExprError(
                f"'{name}' expects integers, got {_type_name(left)} and {_type_name(right)}"
            )
        return op(left, right)

    return run


def _builtin_equal(args: list):
    if len(args) != 2:
        raise ExprError("'=' takes exactly two arguments")
    left, right = args
    if isinstance(left, bool) or isinstance(right, bool):
        raise ExprError("'=' expects integers or strings, got a boolean")
    if isinstance(left, int) and isinstance(right, int):
        return left == right
    if isinstance(left, str) and isinstance(right, str):
        return str(left) == str(right)
    raise ExprError(f"'=' expects matching types, got {_type_name(left)} and {_type_name(right)}")


def _type_name(value) -> str:
    if value is False or value is True:
        return "boolean"
    if isinstance(value, Lambda):
        return "function"
    if isinstance(value, int):
        return "integer"
    if isinstance(value, str):
        return "string"
    return type(value).__name__


_BUILTINS = {
    "length": _builtin_length,
    "string-match": _builtin_string_match,
    ">": _comparison(">", lambda a, b: a > b),
    "<": _comparison("<", lambda a, b: a < b),
    ">=": _comparison(">=", lambda a, b: a >= b),
    "<=": _comparison("<=", lambda a, b: a <= b),
    "=": _builtin_equal,
}
