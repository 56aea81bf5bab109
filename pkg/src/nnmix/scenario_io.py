"""Reading and writing scenario files.

A scenario file is UTF-8 ``key = value`` text with ``#`` comments::

    # unequal variances
    fx = gaussian(mean=0, var=1)
    fz = mixture(0.3*gaussian(mean=-1, var=0.5) + 0.7*gaussian(mean=2, var=1))

Values are parsed with :mod:`ast` and only the density constructors below,
keyword numbers, ``+``, ``*`` and unary minus are accepted.
"""

from __future__ import annotations

import ast
from pathlib import Path

from .distributions import Density, Exponential, Gaussian, GaussianMixture, Laplace, Scenario, Uniform

__all__ = ["ScenarioParseError", "parse_density", "parse_scenario", "load_scenario", "dump_scenario"]

_CONSTRUCTORS = {
    "gaussian": (Gaussian, ("mean", "var")),
    "uniform": (Uniform, ("lo", "hi")),
    "exponential": (Exponential, ("rate", "shift")),
    "laplace": (Laplace, ("loc", "scale")),
}
_DEFAULTS = {"exponential": {"shift": 0.0}}


class ScenarioParseError(ValueError):
    def __init__(self, message: str, line: int | None = None, source: str | None = None) -> None:
        self.line = line
        self.source = source
        where = ""
        if source is not None:
            where += f"{source}:"
        if line is not None:
            where += f"{line}:"
        super().__init__(f"{where} {message}" if where else message)


def _number(node: ast.AST) -> float:
    if isinstance(node, ast.Constant) and isinstance(node.value, (int, float)) and not isinstance(node.value, bool):
        return float(node.value)
    if isinstance(node, ast.UnaryOp) and isinstance(node.op, (ast.USub, ast.UAdd)):
        v = _number(node.operand)
        return -v if isinstance(node.op, ast.USub) else v
    raise ScenarioParseError(f"expected a number, got {ast.unparse(node)!r}")


def _call_name(node: ast.AST) -> str:
    if isinstance(node, ast.Call) and isinstance(node.func, ast.Name):
        return node.func.id.lower()
    raise ScenarioParseError(f"expected a density like gaussian(mean=0, var=1), got {ast.unparse(node)!r}")


def _simple_density(node: ast.AST) -> Density:
    name = _call_name(node)
    if name not in _CONSTRUCTORS:
        raise ScenarioParseError(f"unknown density kind {name!r}")
    cls, params = _CONSTRUCTORS[name]
    if node.args:
        raise ScenarioParseError(f"{name}() takes keyword arguments only ({', '.join(params)})")
    kw = dict(_DEFAULTS.get(name, {}))
    for k in node.keywords:
        if k.arg not in params:
            raise ScenarioParseError(f"{name}() has no parameter {k.arg!r}; expected {', '.join(params)}")
        kw[k.arg] = _number(k.value)
    missing = [p for p in params if p not in kw]
    if missing:
        raise ScenarioParseError(f"{name}() is missing {', '.join(missing)}")
    try:
        return cls(*(kw[p] for p in params))
    except ValueError as exc:
        raise ScenarioParseError(str(exc)) from None


def _mixture_terms(node: ast.AST) -> list[tuple[float, float, float]]:
    if isinstance(node, ast.BinOp) and isinstance(node.op, ast.Add):
        return _mixture_terms(node.left) + _mixture_terms(node.right)
    if isinstance(node, ast.BinOp) and isinstance(node.op, ast.Mult):
        weight, comp = node.left, node.right
        if isinstance(weight, ast.Call):
            weight, comp = comp, weight
        g = _simple_density(comp)
        if not isinstance(g, Gaussian):
            raise ScenarioParseError("mixture components must be gaussian(...)")
        return [(_number(weight), g.mean, g.variance)]
    raise ScenarioParseError(f"mixture terms look like 0.5*gaussian(mean=0, var=1), got {ast.unparse(node)!r}")


def parse_density(text: str) -> Density:
    try:
        node = ast.parse(text.strip(), mode="eval").body
    except SyntaxError as exc:
        raise ScenarioParseError(f"syntax error in {text.strip()!r}: {exc.msg}") from None
    if _call_name(node) == "mixture":
        if len(node.args) != 1 or node.keywords:
            raise ScenarioParseError("mixture(...) takes a single sum of weighted gaussians")
        try:
            return GaussianMixture(_mixture_terms(node.args[0]))
        except ValueError as exc:
            if isinstance(exc, ScenarioParseError):
                raise
            raise ScenarioParseError(str(exc)) from None
    return _simple_density(node)


def parse_scenario(text: str, source: str | None = None) -> Scenario:
    found: dict[str, Density] = {}
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        key, sep, value = line.partition("=")
        key = key.strip().lower()
        if not sep or key not in ("fx", "fz"):
            raise ScenarioParseError("expected 'fx = <density>' or 'fz = <density>'", lineno, source)
        if key in found:
            raise ScenarioParseError(f"{key} given twice", lineno, source)
        try:
            found[key] = parse_density(value)
        except ScenarioParseError as exc:
            raise ScenarioParseError(str(exc), lineno, source) from None
    for key in ("fx", "fz"):
        if key not in found:
            raise ScenarioParseError(f"missing {key}", None, source)
    return Scenario(found["fx"], found["fz"])


def load_scenario(path: str | Path) -> Scenario:
    p = Path(path)
    try:
        text = p.read_text(encoding="utf-8")
    except OSError as exc:
        raise ScenarioParseError(f"cannot read scenario file: {exc.strerror}", None, str(p)) from None
    return parse_scenario(text, source=str(p))


def dump_scenario(s: Scenario) -> str:
    return s.to_text()
