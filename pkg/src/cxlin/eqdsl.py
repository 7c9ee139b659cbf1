"""Parser and printer for the equation-system, transformation and solution DSL.

Three block kinds share one token grammar, stored in UTF-8 text files:

``.eqs`` systems::

    system ode2 "emden" {
      vars: x | f, g;
      f'' = -3*f*f' + 3*g*g' - f^3 + 3*f*g^2;
      g'' = -3*g*f' - 3*f*g' - 3*f^2*g + g^3;
    }

``.map`` point transformations::

    map "inversion" {
      source: x, y | f, g;
      target: X, Y | F, G;
      X = x - f/(f^2 + g^2);
      ...
    }

``.sol`` closed-form solutions::

    solution "general" {
      vars: x | f, g;
      constants: a1 = 0.1, a2, b1 = 0.3;
      f = ...;  g = ...;
    }

Variable declarations separate independent from dependent names with ``|``.
Derivatives are written with trailing primes for ODE blocks (``f'``, ``f''``)
and underscore subscripts for PDE blocks (``f_x``, ``g_xy``); subscripts are
canonicalized to the declared independent-variable order, so ``f_yx`` means
``f_xy``.  PDE blocks may also use the bare names ``h`` and ``l`` for the
half-sum derivative combinations (f_x + g_y)/2 and (g_x - f_y)/2.

Kinds: ``ode1``/``ode2`` (one real independent variable, first or second
order) and ``pde1``/``pde2`` (two independent variables).  Second-order left
sides may be the plain derivative symbols (``f'' = ...``) or, for systems
given implicitly, any combination linear in the second derivatives; PDE
blocks additionally accept first-order constraint equations (typically the
Cauchy-Riemann pair), which are stored separately.  Expression syntax is the
usual precedence tower ``+,-`` < ``*,/`` < unary ``-`` < ``^`` (right
associative) with parentheses and calls of exp, ln, sin, cos, arctan,
arctan2, sqrt.  Numeric literals are exact rationals.  Comments run from
``#`` to end of line.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction
from typing import Iterable

from cxlin.symexpr import (
    Apply,
    Constant,
    Expr,
    FUNCTIONS,
    Power,
    Product,
    Sum,
    Symbol,
    free_symbols,
    normalize,
    to_str,
)

__all__ = [
    "SystemSpec",
    "Equation",
    "PointTransformation",
    "SolutionSpec",
    "EqdslError",
    "DslSyntaxError",
    "UndeclaredSymbol",
    "WrongLeftSide",
    "DuplicateEquation",
    "parse_system",
    "parse_transformation",
    "parse_solution",
    "parse_expression",
    "print_system",
    "print_transformation",
    "print_solution",
    "prime",
    "partial",
    "HL_RE",
    "HL_IM",
]

HL_RE = "h"
HL_IM = "l"

SYSTEM_KINDS = ("ode1", "ode2", "pde1", "pde2")


class EqdslError(Exception):
    """Base parse-level error; carries a 1-based source position."""

    def __init__(self, message: str, line: int, col: int):
        super().__init__(f"{line}:{col}: {message}")
        self.line = line
        self.col = col


class DslSyntaxError(EqdslError):
    def __init__(self, message: str, line: int, col: int, expected: tuple[str, ...] = ()):
        if expected:
            message = f"{message} (expected {', '.join(expected)})"
        super().__init__(message, line, col)
        self.expected = expected


class UndeclaredSymbol(EqdslError):
    pass


class WrongLeftSide(EqdslError):
    pass


class DuplicateEquation(EqdslError):
    pass


def prime(name: str, order: int = 1) -> str:
    """Derivative-symbol name for d^order/dx^order of an ODE dependent."""
    return name + "'" * order


def partial(name: str, subscript: str) -> str:
    """Derivative-symbol name for a PDE partial, e.g. partial("f", "xy")."""
    return f"{name}_{subscript}"


# ---------------------------------------------------------------------------
# tokens
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class _Token:
    kind: str  # ident, number, string, punct, end
    text: str
    line: int
    col: int


_PUNCT = set("{}(),;=|^*/+-:")


def _tokenize(text: str) -> list[_Token]:
    toks: list[_Token] = []
    line, col = 1, 1
    k, n = 0, len(text)
    while k < n:
        ch = text[k]
        if ch == "\n":
            line += 1
            col = 1
            k += 1
            continue
        if ch in " \t\r":
            k += 1
            col += 1
            continue
        if ch == "#":
            while k < n and text[k] != "\n":
                k += 1
            continue
        start_line, start_col = line, col
        if ch.isdigit():
            j = k
            while j < n and text[j].isdigit():
                j += 1
            if j < n and text[j] == ".":
                j += 1
                if j >= n or not text[j].isdigit():
                    raise DslSyntaxError("malformed number", start_line, start_col)
                while j < n and text[j].isdigit():
                    j += 1
            toks.append(_Token("number", text[k:j], start_line, start_col))
            col += j - k
            k = j
            continue
        if ch.isalpha() or ch == "_":
            j = k
            while j < n and (text[j].isalnum() or text[j] == "_"):
                j += 1
            while j < n and text[j] == "'":
                j += 1
            toks.append(_Token("ident", text[k:j], start_line, start_col))
            col += j - k
            k = j
            continue
        if ch == '"':
            j = k + 1
            while j < n and text[j] != '"':
                if text[j] == "\n":
                    raise DslSyntaxError("unterminated string", start_line, start_col)
                j += 1
            if j >= n:
                raise DslSyntaxError("unterminated string", start_line, start_col)
            toks.append(_Token("string", text[k + 1:j], start_line, start_col))
            col += j - k + 1
            k = j + 1
            continue
        if ch in _PUNCT:
            toks.append(_Token("punct", ch, start_line, start_col))
            k += 1
            col += 1
            continue
        raise DslSyntaxError(f"unexpected character {ch!r}", start_line, start_col)
    toks.append(_Token("end", "", line, col))
    return toks


# ---------------------------------------------------------------------------
# declared-name environment
# ---------------------------------------------------------------------------

@dataclass
class _Scope:
    """Names visible inside a block and how identifiers resolve to symbols."""

    independent: tuple[str, ...]
    dependent: tuple[str, ...]
    order: int = 0            # highest derivative order allowed (0: none)
    use_primes: bool = True   # primes (ODE) vs subscripts (PDE)
    allow_hl: bool = False
    extra: tuple[str, ...] = ()  # named constants etc.

    def resolve(self, tok: _Token) -> Symbol:
        name = tok.text
        base = name.rstrip("'")
        primes = len(name) - len(base)
        if primes:
            if not self.use_primes:
                raise UndeclaredSymbol(
                    f"prime derivatives are not valid here: {name!r}", tok.line, tok.col)
            if base not in self.dependent:
                raise UndeclaredSymbol(
                    f"derivative of undeclared variable {base!r}", tok.line, tok.col)
            if primes > self.order:
                raise UndeclaredSymbol(
                    f"derivative order {primes} exceeds block order {self.order}",
                    tok.line, tok.col)
            return Symbol(name)
        if name in self.independent or name in self.dependent or name in self.extra:
            return Symbol(name)
        if self.allow_hl and name in (HL_RE, HL_IM):
            return Symbol(name)
        if "_" in name and not self.use_primes:
            stem, _, subs = name.partition("_")
            if stem in self.dependent:
                if not subs or any(s not in self.independent for s in subs):
                    raise UndeclaredSymbol(
                        f"invalid derivative subscript in {name!r}", tok.line, tok.col)
                if len(subs) > self.order:
                    raise UndeclaredSymbol(
                        f"derivative order {len(subs)} exceeds block order {self.order}",
                        tok.line, tok.col)
                canon = "".join(sorted(subs, key=self.independent.index))
                return Symbol(partial(stem, canon))
        raise UndeclaredSymbol(f"undeclared symbol {name!r}", tok.line, tok.col)


# ---------------------------------------------------------------------------
# recursive-descent parser
# ---------------------------------------------------------------------------

class _Parser:
    def __init__(self, text: str):
        self.toks = _tokenize(text)
        self.pos = 0

    @property
    def cur(self) -> _Token:
        return self.toks[self.pos]

    def advance(self) -> _Token:
        t = self.cur
        self.pos += 1
        return t

    def fail(self, message: str, expected: tuple[str, ...] = ()):
        t = self.cur
        got = repr(t.text) if t.kind != "end" else "end of input"
        raise DslSyntaxError(f"{message}, got {got}", t.line, t.col, expected)

    def expect_punct(self, ch: str) -> _Token:
        t = self.cur
        if t.kind != "punct" or t.text != ch:
            self.fail("unexpected token", (repr(ch),))
        return self.advance()

    def expect_ident(self, *names: str) -> _Token:
        t = self.cur
        if t.kind != "ident" or (names and t.text not in names):
            self.fail("unexpected token", names or ("identifier",))
        return self.advance()

    def at_punct(self, ch: str) -> bool:
        return self.cur.kind == "punct" and self.cur.text == ch

    def eat_punct(self, ch: str) -> bool:
        if self.at_punct(ch):
            self.advance()
            return True
        return False

    # expression grammar ---------------------------------------------------

    def expression(self, scope: _Scope) -> Expr:
        return self._sum(scope)

    def _sum(self, scope: _Scope) -> Expr:
        terms = [self._product(scope)]
        while self.cur.kind == "punct" and self.cur.text in "+-":
            op = self.advance().text
            rhs = self._product(scope)
            terms.append(rhs if op == "+" else Product((Constant(-1), rhs)))
        return terms[0] if len(terms) == 1 else Sum(tuple(terms))

    def _product(self, scope: _Scope) -> Expr:
        factors = [self._unary(scope)]
        while self.cur.kind == "punct" and self.cur.text in "*/":
            op = self.advance().text
            rhs = self._unary(scope)
            factors.append(rhs if op == "*" else Power(rhs, Constant(-1)))
        return factors[0] if len(factors) == 1 else Product(tuple(factors))

    def _unary(self, scope: _Scope) -> Expr:
        if self.at_punct("-"):
            self.advance()
            return Product((Constant(-1), self._unary(scope)))
        return self._power(scope)

    def _power(self, scope: _Scope) -> Expr:
        base = self._atom(scope)
        if self.at_punct("^"):
            self.advance()
            return Power(base, self._unary(scope))
        return base

    def _atom(self, scope: _Scope) -> Expr:
        t = self.cur
        if t.kind == "number":
            self.advance()
            return Constant(Fraction(t.text))
        if t.kind == "ident":
            if self.toks[self.pos + 1].kind == "punct" and self.toks[self.pos + 1].text == "(":
                return self._call(scope)
            self.advance()
            return scope.resolve(t)
        if self.at_punct("("):
            self.advance()
            inner = self.expression(scope)
            self.expect_punct(")")
            return inner
        self.fail("expected an expression", ("number", "identifier", "'('"))

    def _call(self, scope: _Scope) -> Expr:
        t = self.advance()
        if t.text not in FUNCTIONS:
            raise DslSyntaxError(
                f"unknown function {t.text!r}", t.line, t.col, tuple(sorted(FUNCTIONS)))
        self.expect_punct("(")
        args = [self.expression(scope)]
        while self.eat_punct(","):
            args.append(self.expression(scope))
        close = self.cur
        self.expect_punct(")")
        if len(args) != FUNCTIONS[t.text]:
            raise DslSyntaxError(
                f"{t.text} expects {FUNCTIONS[t.text]} argument(s), got {len(args)}",
                t.line, t.col)
        del close
        return Apply(t.text, tuple(args))

    # shared declaration pieces ---------------------------------------------

    def ident_list(self) -> list[str]:
        names = [self.expect_ident().text]
        while self.eat_punct(","):
            names.append(self.expect_ident().text)
        return names

    def decl_lists(self, keyword: str) -> tuple[tuple[str, ...], tuple[str, ...], _Token]:
        """Parse ``keyword: a, b | c, d;`` -> ((a, b), (c, d), keyword token)."""
        kw = self.expect_ident(keyword)
        self.expect_punct(":")
        first: list[str] = []
        if not self.at_punct("|"):
            first = self.ident_list()
        if self.eat_punct("|"):
            second = self.ident_list()
        else:
            first, second = [], first  # no bar: everything is dependent-side
        self.expect_punct(";")
        return tuple(first), tuple(second), kw


def _name_opt(p: _Parser) -> str | None:
    if p.cur.kind == "string":
        return p.advance().text
    return None


# ---------------------------------------------------------------------------
# data types
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class Equation:
    lhs: Expr
    rhs: Expr

    def residual(self) -> Expr:
        return normalize(self.lhs - self.rhs)


@dataclass(frozen=True)
class SystemSpec:
    """A parsed pair of equations with declared variables.

    ``equations`` holds the (two) order-defining equations; for PDE blocks
    first-order constraint lines (the Cauchy-Riemann pair) are kept in
    ``constraints``.  ``explicit`` is true when the left sides are exactly the
    canonical derivative symbols/combinations, in declared-dependent order.
    """

    kind: str
    independent: tuple[str, ...]
    dependent: tuple[str, ...]
    equations: tuple[Equation, ...]
    constraints: tuple[Equation, ...] = ()
    name: str | None = None
    explicit: bool = False

    @property
    def order(self) -> int:
        return 1 if self.kind in ("ode1", "pde1") else 2

    def derivative_symbols(self, order: int = 1) -> tuple[str, ...]:
        """First- (or second-) derivative symbol names for the dependents."""
        f, g = self.dependent
        if self.kind.startswith("ode"):
            return (prime(f, order), prime(g, order))
        x, y = self.independent
        if order == 1:
            return (partial(f, x), partial(f, y), partial(g, x), partial(g, y))
        subs = (x + x, x + y, y + y)
        return tuple(partial(v, s) for v in (f, g) for s in subs)

    def canonical_lhs(self) -> tuple[Expr, Expr]:
        """The two canonical left sides for this kind, in dependent order."""
        f, g = self.dependent
        if self.kind == "ode1":
            return Symbol(prime(f, 1)), Symbol(prime(g, 1))
        if self.kind == "ode2":
            return Symbol(prime(f, 2)), Symbol(prime(g, 2))
        x, y = self.independent
        if self.kind == "pde1":
            c1 = Symbol(partial(f, x)) + Symbol(partial(g, y))
            c2 = Symbol(partial(g, x)) - Symbol(partial(f, y))
        else:
            c1 = Symbol(partial(f, x + x)) - Symbol(partial(f, y + y)) + 2 * Symbol(partial(g, x + y))
            c2 = Symbol(partial(g, x + x)) - Symbol(partial(g, y + y)) - 2 * Symbol(partial(f, x + y))
        return normalize(c1), normalize(c2)

    def explicit_rhs(self) -> tuple[Expr, Expr]:
        if not self.explicit:
            raise ValueError("system is not in explicit canonical form")
        return self.equations[0].rhs, self.equations[1].rhs

    @property
    def uses_hl(self) -> bool:
        syms = set()
        for eq in self.equations:
            syms |= free_symbols(eq.lhs) | free_symbols(eq.rhs)
        return HL_RE in syms or HL_IM in syms

    def hl_substitution(self) -> dict[str, Expr]:
        """Bindings that replace h and l by their defining half-sums."""
        f, g = self.dependent
        x, y = self.independent
        half = Constant(Fraction(1, 2))
        return {
            HL_RE: half * (Symbol(partial(f, x)) + Symbol(partial(g, y))),
            HL_IM: half * (Symbol(partial(g, x)) - Symbol(partial(f, y))),
        }


@dataclass(frozen=True)
class PointTransformation:
    """A named map between variable tuples, e.g. (x,f,g) -> (chi, U).

    Target expressions are over the source variables.  Complex-valued targets
    are written as two real components named ``<base>_re`` / ``<base>_im``;
    :meth:`grouped_targets` reassembles them.  An empty target-independent
    tuple means the source independent variable is kept.
    """

    source_independent: tuple[str, ...]
    source_dependent: tuple[str, ...]
    target_independent: tuple[str, ...]
    target_dependent: tuple[str, ...]
    exprs: dict[str, Expr] = field(default_factory=dict)
    name: str | None = None

    @property
    def source(self) -> tuple[str, ...]:
        return self.source_independent + self.source_dependent

    @property
    def target(self) -> tuple[str, ...]:
        return self.target_independent + self.target_dependent

    def grouped(self, names: tuple[str, ...]) -> list[tuple[str, Expr, Expr | None]]:
        out: list[tuple[str, Expr, Expr | None]] = []
        k = 0
        names = tuple(names)
        while k < len(names):
            n = names[k]
            if n.endswith("_re") and k + 1 < len(names) and names[k + 1] == n[:-3] + "_im":
                out.append((n[:-3], self.exprs[n], self.exprs[names[k + 1]]))
                k += 2
            else:
                out.append((n, self.exprs[n], None))
                k += 1
        return out

    def grouped_targets(self) -> tuple[list, list]:
        """([(name, re, im|None)] for independents, same for dependents)."""
        return self.grouped(self.target_independent), self.grouped(self.target_dependent)


@dataclass(frozen=True)
class SolutionSpec:
    """A closed-form candidate solution: one expression per dependent variable."""

    independent: tuple[str, ...]
    dependent: tuple[str, ...]
    exprs: dict[str, Expr]
    constants: dict[str, Fraction | None] = field(default_factory=dict)
    name: str | None = None

    def bound_exprs(self, overrides: dict[str, Fraction] | None = None) -> dict[str, Expr]:
        """Dependent expressions with all named constants substituted in."""
        binding: dict[str, Expr] = {}
        merged: dict[str, Fraction | None] = dict(self.constants)
        if overrides:
            merged.update(overrides)
        unbound = [n for n, v in merged.items() if v is None]
        if unbound:
            raise ValueError(f"unbound solution constants: {', '.join(sorted(unbound))}")
        for n, v in merged.items():
            binding[n] = Constant(v)
        from cxlin.symexpr import substitute

        return {d: substitute(self.exprs[d], binding) for d in self.dependent}


# ---------------------------------------------------------------------------
# block parsers
# ---------------------------------------------------------------------------

def _parse_equations(p: _Parser, scope: _Scope) -> list[tuple[Equation, _Token]]:
    eqs = []
    while not p.at_punct("}"):
        start = p.cur
        if start.kind == "end":
            p.fail("unexpected end of input", ("'}'",))
        lhs = p.expression(scope)
        p.expect_punct("=")
        rhs = p.expression(scope)
        p.expect_punct(";")
        eqs.append((Equation(normalize(lhs), normalize(rhs)), start))
    if not eqs:
        p.fail("equation block is empty", ("equation",))
    return eqs


def _contains_any(e: Expr, names: Iterable[str]) -> bool:
    return bool(free_symbols(e) & set(names))


def parse_system(text: str) -> SystemSpec:
    """Parse a ``system`` block; see the module docstring for the grammar."""
    p = _Parser(text)
    p.expect_ident("system")
    kind_tok = p.cur
    kind = p.expect_ident(*SYSTEM_KINDS).text
    name = _name_opt(p)
    p.expect_punct("{")
    indep, dep, decl_tok = p.decl_lists("vars")
    n_indep = 1 if kind.startswith("ode") else 2
    if len(indep) != n_indep:
        raise DslSyntaxError(
            f"{kind} blocks declare {n_indep} independent variable(s), got {len(indep)}",
            decl_tok.line, decl_tok.col)
    if len(dep) != 2:
        raise DslSyntaxError(
            f"expected exactly 2 dependent variables, got {len(dep)}",
            decl_tok.line, decl_tok.col)
    order = 1 if kind in ("ode1", "pde1") else 2
    scope = _Scope(
        independent=indep,
        dependent=dep,
        order=order,
        use_primes=kind.startswith("ode"),
        allow_hl=kind.startswith("pde"),
    )
    raw = _parse_equations(p, scope)
    p.expect_punct("}")

    spec = SystemSpec(kind=kind, independent=indep, dependent=dep, equations=(), name=name)
    second_syms = set(spec.derivative_symbols(order)) if order == 2 else set(
        spec.derivative_symbols(1))
    main: list[tuple[Equation, _Token]] = []
    constraints: list[Equation] = []
    for eq, tok in raw:
        if kind == "pde2" and not _contains_any(eq.lhs, second_syms) \
                and not _contains_any(eq.rhs, second_syms):
            constraints.append(eq)
            continue
        if not _contains_any(eq.lhs, second_syms):
            raise WrongLeftSide(
                f"left side carries no order-{order} derivative of {'/'.join(dep)}",
                tok.line, tok.col)
        main.append((eq, tok))
    if len(main) != 2:
        where = raw[-1][1]
        raise DslSyntaxError(
            f"expected exactly 2 defining equations, got {len(main)}",
            where.line, where.col)
    seen_lhs = main[0][0].lhs
    if seen_lhs == main[1][0].lhs:
        tok = main[1][1]
        raise DuplicateEquation("two equations share the same left side", tok.line, tok.col)

    c1, c2 = spec.canonical_lhs()
    lhs_map = {main[0][0].lhs.key: main[0][0], main[1][0].lhs.key: main[1][0]}
    explicit = set(lhs_map) == {c1.key, c2.key}
    if explicit:
        # rhs of an explicit system must be free of the defining derivatives
        for eq, _tok in main:
            if _contains_any(eq.rhs, second_syms):
                explicit = False
                break
    if kind == "ode1" and not explicit:
        tok = main[0][1] if main[0][0].lhs.key not in (c1.key, c2.key) else main[1][1]
        raise WrongLeftSide(
            "first-order blocks require explicit left sides f' and g'",
            tok.line, tok.col)
    ordered = (lhs_map[c1.key], lhs_map[c2.key]) if explicit \
        else (main[0][0], main[1][0])
    return SystemSpec(
        kind=kind,
        independent=indep,
        dependent=dep,
        equations=ordered,
        constraints=tuple(constraints),
        name=name,
        explicit=explicit,
    )


def parse_transformation(text: str) -> PointTransformation:
    """Parse a ``map`` block into a :class:`PointTransformation`."""
    p = _Parser(text)
    p.expect_ident("map")
    name = _name_opt(p)
    p.expect_punct("{")
    s_indep, s_dep, _ = p.decl_lists("source")
    t_indep, t_dep, t_tok = p.decl_lists("target")
    if not t_dep:
        raise DslSyntaxError("a map needs at least one dependent target",
                             t_tok.line, t_tok.col)
    scope = _Scope(independent=s_indep, dependent=s_dep, order=0, use_primes=False)
    exprs: dict[str, Expr] = {}
    targets = set(t_indep) | set(t_dep)
    while not p.at_punct("}"):
        tok = p.cur
        lhs = p.expect_ident()
        if lhs.text not in targets:
            raise UndeclaredSymbol(f"{lhs.text!r} is not a declared target", tok.line, tok.col)
        if lhs.text in exprs:
            raise DuplicateEquation(f"target {lhs.text!r} assigned twice", tok.line, tok.col)
        p.expect_punct("=")
        exprs[lhs.text] = normalize(p.expression(scope))
        p.expect_punct(";")
    p.expect_punct("}")
    missing = targets - set(exprs)
    if missing:
        t = p.cur
        raise DslSyntaxError(f"missing assignments for {', '.join(sorted(missing))}",
                             t.line, t.col)
    return PointTransformation(
        source_independent=s_indep,
        source_dependent=s_dep,
        target_independent=t_indep,
        target_dependent=t_dep,
        exprs=exprs,
        name=name,
    )


def parse_solution(text: str) -> SolutionSpec:
    """Parse a ``solution`` block into a :class:`SolutionSpec`."""
    p = _Parser(text)
    p.expect_ident("solution")
    name = _name_opt(p)
    p.expect_punct("{")
    indep, dep, decl_tok = p.decl_lists("vars")
    if not indep or len(dep) != 2:
        raise DslSyntaxError(
            "solution blocks declare independent variables and exactly 2 dependents",
            decl_tok.line, decl_tok.col)
    constants: dict[str, Fraction | None] = {}
    if p.cur.kind == "ident" and p.cur.text == "constants":
        p.advance()
        p.expect_punct(":")
        while True:
            ctok = p.expect_ident()
            value: Fraction | None = None
            if p.eat_punct("="):
                negative = p.eat_punct("-")
                vtok = p.cur
                if vtok.kind != "number":
                    p.fail("expected a number", ("number",))
                p.advance()
                value = Fraction(vtok.text)
                if negative:
                    value = -value
            if ctok.text in constants:
                raise DuplicateEquation(f"constant {ctok.text!r} declared twice",
                                        ctok.line, ctok.col)
            constants[ctok.text] = value
            if not p.eat_punct(","):
                break
        p.expect_punct(";")
    scope = _Scope(independent=indep, dependent=(), order=0,
                   use_primes=False, extra=tuple(constants))
    exprs: dict[str, Expr] = {}
    while not p.at_punct("}"):
        tok = p.expect_ident()
        if tok.text not in dep:
            raise UndeclaredSymbol(f"{tok.text!r} is not a declared dependent variable",
                                   tok.line, tok.col)
        if tok.text in exprs:
            raise DuplicateEquation(f"{tok.text!r} assigned twice", tok.line, tok.col)
        p.expect_punct("=")
        exprs[tok.text] = normalize(p.expression(scope))
        p.expect_punct(";")
    p.expect_punct("}")
    missing = set(dep) - set(exprs)
    if missing:
        t = p.cur
        raise DslSyntaxError(f"missing expressions for {', '.join(sorted(missing))}",
                             t.line, t.col)
    return SolutionSpec(independent=indep, dependent=dep, exprs=exprs,
                        constants=constants, name=name)


def parse_expression(text: str, names: Iterable[str]) -> Expr:
    """Parse a standalone expression over the given symbol names."""
    p = _Parser(text)
    scope = _Scope(independent=tuple(names), dependent=(), order=0, use_primes=False)
    e = p.expression(scope)
    if p.cur.kind != "end":
        p.fail("trailing input after expression")
    return normalize(e)


# ---------------------------------------------------------------------------
# printing
# ---------------------------------------------------------------------------

def _decl(keyword: str, indep: tuple[str, ...], dep: tuple[str, ...]) -> str:
    left = ", ".join(indep)
    right = ", ".join(dep)
    return f"  {keyword}: {left} | {right};"


def print_system(spec: SystemSpec) -> str:
    name = f' "{spec.name}"' if spec.name else ""
    lines = [f"system {spec.kind}{name} {{",
             _decl("vars", spec.independent, spec.dependent)]
    for eq in spec.equations + spec.constraints:
        lines.append(f"  {to_str(eq.lhs)} = {to_str(eq.rhs)};")
    lines.append("}")
    return "\n".join(lines) + "\n"


def print_transformation(t: PointTransformation) -> str:
    name = f' "{t.name}"' if t.name else ""
    lines = [f"map{name} {{",
             _decl("source", t.source_independent, t.source_dependent),
             _decl("target", t.target_independent, t.target_dependent)]
    for n in t.target:
        lines.append(f"  {n} = {to_str(t.exprs[n])};")
    lines.append("}")
    return "\n".join(lines) + "\n"


def print_solution(s: SolutionSpec) -> str:
    name = f' "{s.name}"' if s.name else ""
    lines = [f"solution{name} {{", _decl("vars", s.independent, s.dependent)]
    if s.constants:
        items = []
        for n, v in s.constants.items():
            items.append(n if v is None else f"{n} = {_frac_literal(v)}")
        lines.append(f"  constants: {', '.join(items)};")
    for n in s.dependent:
        lines.append(f"  {n} = {to_str(s.exprs[n])};")
    lines.append("}")
    return "\n".join(lines) + "\n"


def _frac_literal(v: Fraction) -> str:
    sign = "-" if v < 0 else ""
    v = abs(v)
    if v.denominator == 1:
        return f"{sign}{v.numerator}"
    return f"{sign}{v.numerator}/{v.denominator}"
