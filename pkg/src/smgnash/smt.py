"""Polynomial constraints over the reals, SMT-LIB rendering and model parsing."""

from __future__ import annotations

import re
import shlex
import subprocess
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Iterable, Mapping

# a polynomial is a mapping from monomials (sorted tuples of variable names) to coefficients
Poly = dict


def const(c) -> Poly:
    c = Fraction(c)
    return {(): c} if c else {}


def var(name: str, coef=1) -> Poly:
    return {(name,): Fraction(coef)}


def add(*ps: Poly) -> Poly:
    out: dict = {}
    for p in ps:
        for m, c in p.items():
            out[m] = out.get(m, Fraction(0)) + c
    return {m: c for m, c in out.items() if c}


def mul(p: Poly, q: Poly) -> Poly:
    out: dict = {}
    for m1, c1 in p.items():
        for m2, c2 in q.items():
            m = tuple(sorted(m1 + m2))
            out[m] = out.get(m, Fraction(0)) + c1 * c2
    return {m: c for m, c in out.items() if c}


def evaluate_poly(p: Poly, values: Mapping[str, Fraction]) -> Fraction:
    total = Fraction(0)
    for m, c in p.items():
        term = c
        for v in m:
            term *= values[v]
        total += term
    return total


OPS = {
    "=": lambda a, b: a == b,
    ">=": lambda a, b: a >= b,
    "<=": lambda a, b: a <= b,
    ">": lambda a, b: a > b,
}


@dataclass(frozen=True)
class Constraint:
    lhs: Poly
    op: str
    rhs: Poly
    block: tuple  # e.g. ("profile",), ("payoff", i), ("best-response", i), ("final", i)

    def holds(self, values: Mapping[str, Fraction]) -> bool:
        return OPS[self.op](evaluate_poly(self.lhs, values), evaluate_poly(self.rhs, values))


@dataclass
class SmtScript:
    constraints: list[Constraint]
    manifest: dict  # variable name -> description tuple
    comments: list[str] = field(default_factory=list)

    @property
    def variables(self) -> list[str]:
        return sorted(self.manifest, key=_natural)

    def text(self) -> str:
        lines = [f"; {c}" for c in self.comments]
        lines.append("(set-logic QF_NRA)")
        for name in self.variables:
            lines.append(f"; {name} = {' '.join(str(x) for x in self.manifest[name])}")
            lines.append(f"(declare-fun {name} () Real)")
        block = None
        for c in self.constraints:
            if c.block != block:
                block = c.block
                lines.append(f"; block {' '.join(str(x) for x in block)}")
            lines.append(f"(assert ({c.op} {render_poly(c.lhs)} {render_poly(c.rhs)}))")
        lines.append("(check-sat)")
        lines.append("(get-model)")
        return "\n".join(lines) + "\n"

    def failing(self, values: Mapping[str, Fraction]) -> list[Constraint]:
        return [c for c in self.constraints if not c.holds(values)]

    def blocks(self) -> list[tuple]:
        seen: dict = {}
        for c in self.constraints:
            seen.setdefault(c.block, None)
        return list(seen)


def _natural(name: str):
    return [int(t) if t.isdigit() else t for t in re.split(r"(\d+)", name)]


def render_rational(c: Fraction) -> str:
    c = Fraction(c)
    mag = abs(c)
    s = f"{mag.numerator}.0" if mag.denominator == 1 else f"(/ {mag.numerator}.0 {mag.denominator}.0)"
    return f"(- {s})" if c < 0 else s


def render_poly(p: Poly) -> str:
    if not p:
        return "0.0"
    terms = []
    for m in sorted(p, key=lambda m: (len(m), [_natural(v) for v in m])):
        c = p[m]
        if not m:
            terms.append(render_rational(c))
        elif c == 1:
            terms.append(m[0] if len(m) == 1 else f"(* {' '.join(m)})")
        else:
            terms.append(f"(* {render_rational(c)} {' '.join(m)})")
    return terms[0] if len(terms) == 1 else f"(+ {' '.join(terms)})"


# -- solver boundary -------------------------------------------------------

class SolverUnavailable(RuntimeError):
    pass


@dataclass(frozen=True)
class SolverAnswer:
    status: str  # "sat", "unsat" or "unknown"
    model: dict  # name -> Fraction, only for parseable rational values
    unparsed: tuple = ()  # names whose values were not rational literals


def run_solver(command: str, script: str, timeout: float = 30.0) -> SolverAnswer:
    """Run an external solver on ``script`` passed via stdin; ``command`` is split shell-style."""
    argv = shlex.split(command)
    if not argv:
        raise SolverUnavailable("empty solver command")
    try:
        proc = subprocess.run(argv, input=script, capture_output=True, text=True, timeout=timeout)
    except FileNotFoundError:
        raise SolverUnavailable(f"solver {argv[0]!r} not found") from None
    except subprocess.TimeoutExpired:
        return SolverAnswer("unknown", {})
    return parse_solver_output(proc.stdout)


def parse_solver_output(text: str) -> SolverAnswer:
    tokens = _tokenize(text)
    if not tokens:
        return SolverAnswer("unknown", {})
    status = tokens[0] if tokens[0] in ("sat", "unsat", "unknown") else "unknown"
    model, unparsed = {}, []
    if status == "sat":
        pos = 1
        while pos < len(tokens):
            expr, pos = _read(tokens, pos)
            for d in _define_funs(expr):
                name, value = d[1], d[4]
                try:
                    model[name] = _value(value)
                except ValueError:
                    unparsed.append(name)
    return SolverAnswer(status, model, tuple(unparsed))


def _tokenize(text: str) -> list[str]:
    return re.findall(r"\(|\)|[^\s()]+", text)


def _read(tokens, pos):
    t = tokens[pos]
    if t == "(":
        out = []
        pos += 1
        while pos < len(tokens) and tokens[pos] != ")":
            e, pos = _read(tokens, pos)
            out.append(e)
        return out, pos + 1
    return t, pos + 1


def _define_funs(expr) -> Iterable[list]:
    if isinstance(expr, list):
        if len(expr) == 5 and expr[0] == "define-fun":
            yield expr
        else:
            for e in expr:
                yield from _define_funs(e)


def _value(e) -> Fraction:
    if isinstance(e, str):
        try:
            return Fraction(e)
        except ValueError:
            raise ValueError(e) from None
    if len(e) == 2 and e[0] == "-":
        return -_value(e[1])
    if len(e) == 3 and e[0] == "/":
        return _value(e[1]) / _value(e[2])
    raise ValueError(str(e))
