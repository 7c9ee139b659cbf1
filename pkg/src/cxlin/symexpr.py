"""Exact symbolic expression trees with differentiation and complex evaluation.

The expression language is deliberately small: rational constants, named
symbols, n-ary sums and products, powers, and a fixed set of elementary
functions (exp, ln, sin, cos, arctan, arctan2, sqrt).  Constants are exact
``fractions.Fraction`` values; floating point only enters at evaluation time.
Division is represented as a power with exponent -1 and negation as a product
with constant -1, so there are exactly six node kinds.

Expressions are immutable and hashable.  ``normalize`` rewrites a tree into a
canonical form: sums and products are flattened, constants folded, like terms
and like factors collected, and operands sorted by a deterministic structural
key.  Normalization is idempotent and evaluation-preserving away from
removable singularities (it uses the usual computer-algebra conventions
``e**0 == 1`` and ``0 * e == 0`` even when ``e`` is singular at a point).

Symbols carry no relations: ``f`` and a derivative symbol such as ``f'`` or
``f_x`` are independent names as far as the calculus here is concerned.  The
name ``i`` is reserved for the imaginary unit and is bound to ``1j``
automatically during evaluation.
"""

from __future__ import annotations

import cmath
import random
from dataclasses import dataclass
from fractions import Fraction
from typing import Callable, Iterable, Mapping

__all__ = [
    "Expr",
    "Constant",
    "Symbol",
    "Sum",
    "Product",
    "Power",
    "Apply",
    "ZeroVerdict",
    "ExprError",
    "UnsupportedFunction",
    "UnboundSymbol",
    "DomainError",
    "NotPolynomial",
    "DegreeTooHigh",
    "IMAGINARY_UNIT",
    "C",
    "sym",
    "as_expr",
    "normalize",
    "differentiate",
    "substitute",
    "eval_complex",
    "eval_real",
    "is_identically_zero",
    "collect_polynomial",
    "free_symbols",
    "to_str",
    "compile_expr",
]


class ExprError(Exception):
    """Base class for all expression-level failures."""


class UnsupportedFunction(ExprError):
    """A function application with no evaluation or derivative rule."""


class UnboundSymbol(ExprError):
    """Evaluation met a symbol that is not bound in the environment."""


class DomainError(ExprError):
    """Evaluation hit ln(0), a division by zero, or a non-finite value."""


class NotPolynomial(ExprError):
    """The expression is not polynomial in the requested symbols."""


class DegreeTooHigh(ExprError):
    """A monomial exceeds the requested degree bound."""


#: Supported function names mapped to their arity.
FUNCTIONS = {
    "exp": 1,
    "ln": 1,
    "sin": 1,
    "cos": 1,
    "arctan": 1,
    "arctan2": 2,
    "sqrt": 1,
}

#: Reserved symbol name for the imaginary unit (auto-bound to 1j at eval).
IMAGINARY_UNIT = "i"

_HALF = Fraction(1, 2)


# ---------------------------------------------------------------------------
# node types
# ---------------------------------------------------------------------------

class Expr:
    """Base class of all expression nodes.  Immutable, hashable, orderable."""

    __slots__ = ("_key", "_hash", "_normalized", "_free")

    def _structural_key(self):
        raise NotImplementedError

    @property
    def key(self):
        """Deterministic structural key used for canonical operand ordering."""
        k = self._key
        if k is None:
            k = self._structural_key()
            object.__setattr__(self, "_key", k)
        return k

    def __hash__(self):
        h = self._hash
        if h is None:
            h = hash(self.key)
            object.__setattr__(self, "_hash", h)
        return h

    def __eq__(self, other):
        if self is other:
            return True
        if not isinstance(other, Expr):
            return NotImplemented
        return self.key == other.key

    # Construction sugar.  Operands are coerced through as_expr, so plain
    # ints, Fractions and decimal strings mix freely with Expr values.
    def __add__(self, other):
        return Sum((self, as_expr(other)))

    def __radd__(self, other):
        return Sum((as_expr(other), self))

    def __sub__(self, other):
        return Sum((self, Product((_MINUS_ONE, as_expr(other)))))

    def __rsub__(self, other):
        return Sum((as_expr(other), Product((_MINUS_ONE, self))))

    def __mul__(self, other):
        return Product((self, as_expr(other)))

    def __rmul__(self, other):
        return Product((as_expr(other), self))

    def __truediv__(self, other):
        return Product((self, Power(as_expr(other), _MINUS_ONE)))

    def __rtruediv__(self, other):
        return Product((as_expr(other), Power(self, _MINUS_ONE)))

    def __pow__(self, other):
        return Power(self, as_expr(other))

    def __neg__(self):
        return Product((_MINUS_ONE, self))

    def __repr__(self):
        return to_str(self)


def _expr_init(obj):
    object.__setattr__(obj, "_key", None)
    object.__setattr__(obj, "_hash", None)
    object.__setattr__(obj, "_normalized", False)
    object.__setattr__(obj, "_free", None)


class Constant(Expr):
    __slots__ = ("value",)

    def __init__(self, value):
        _expr_init(self)
        if not isinstance(value, Fraction):
            value = Fraction(value)
        object.__setattr__(self, "value", value)
        object.__setattr__(self, "_normalized", True)

    def _structural_key(self):
        return (0, self.value.numerator, self.value.denominator)


class Symbol(Expr):
    __slots__ = ("name",)

    def __init__(self, name: str):
        _expr_init(self)
        if not name:
            raise ValueError("empty symbol name")
        object.__setattr__(self, "name", name)
        object.__setattr__(self, "_normalized", True)

    def _structural_key(self):
        return (1, self.name)


class Power(Expr):
    __slots__ = ("base", "exponent")

    def __init__(self, base: Expr, exponent: Expr):
        _expr_init(self)
        object.__setattr__(self, "base", as_expr(base))
        object.__setattr__(self, "exponent", as_expr(exponent))

    def _structural_key(self):
        return (2, self.base.key, self.exponent.key)


class Product(Expr):
    __slots__ = ("factors",)

    def __init__(self, factors: Iterable[Expr]):
        _expr_init(self)
        object.__setattr__(self, "factors", tuple(as_expr(f) for f in factors))

    def _structural_key(self):
        return (3, tuple(f.key for f in self.factors))


class Sum(Expr):
    __slots__ = ("terms",)

    def __init__(self, terms: Iterable[Expr]):
        _expr_init(self)
        object.__setattr__(self, "terms", tuple(as_expr(t) for t in terms))

    def _structural_key(self):
        return (4, tuple(t.key for t in self.terms))


class Apply(Expr):
    __slots__ = ("fn", "args")

    def __init__(self, fn: str, args: Iterable[Expr]):
        _expr_init(self)
        arity = FUNCTIONS.get(fn)
        args = tuple(as_expr(a) for a in args)
        if arity is None:
            raise UnsupportedFunction(f"unknown function {fn!r}")
        if arity != len(args):
            raise UnsupportedFunction(f"{fn} expects {arity} argument(s), got {len(args)}")
        object.__setattr__(self, "fn", fn)
        object.__setattr__(self, "args", args)

    def _structural_key(self):
        return (5, self.fn, tuple(a.key for a in self.args))


_MINUS_ONE = Constant(Fraction(-1))
_ZERO = Constant(Fraction(0))
_ONE = Constant(Fraction(1))


def C(value) -> Constant:
    """Exact rational constant; accepts int, Fraction, or a decimal string."""
    return Constant(Fraction(value))


def sym(name: str) -> Symbol:
    return Symbol(name)


def as_expr(value) -> Expr:
    if isinstance(value, Expr):
        return value
    if isinstance(value, (int, Fraction, str)):
        return Constant(Fraction(value))
    raise TypeError(f"cannot coerce {value!r} to Expr")


def apply_fn(fn: str, *args) -> Apply:
    return Apply(fn, args)


def free_symbols(e: Expr) -> frozenset[str]:
    cached = e._free
    if cached is not None:
        return cached
    if isinstance(e, Constant):
        out = frozenset()
    elif isinstance(e, Symbol):
        out = frozenset((e.name,))
    elif isinstance(e, Power):
        out = free_symbols(e.base) | free_symbols(e.exponent)
    elif isinstance(e, Product):
        out = frozenset().union(*(free_symbols(f) for f in e.factors)) if e.factors else frozenset()
    elif isinstance(e, Sum):
        out = frozenset().union(*(free_symbols(t) for t in e.terms)) if e.terms else frozenset()
    else:
        out = frozenset().union(*(free_symbols(a) for a in e.args)) if e.args else frozenset()
    object.__setattr__(e, "_free", out)
    return out


# ---------------------------------------------------------------------------
# normalization
# ---------------------------------------------------------------------------

def _split_constant_factor(e: Expr) -> tuple[Fraction, tuple[Expr, ...]]:
    """Split a normalized non-sum term into (rational coefficient, factors)."""
    if isinstance(e, Constant):
        return e.value, ()
    if isinstance(e, Product):
        if e.factors and isinstance(e.factors[0], Constant):
            return e.factors[0].value, e.factors[1:]
        return Fraction(1), e.factors
    return Fraction(1), (e,)


def _build_term(coeff: Fraction, factors: tuple[Expr, ...]) -> Expr:
    if coeff == 0:
        return _ZERO
    if not factors:
        return Constant(coeff)
    if coeff == 1 and len(factors) == 1:
        return factors[0]
    parts = factors if coeff == 1 else (Constant(coeff),) + factors
    if len(parts) == 1:
        return parts[0]
    out = Product(parts)
    object.__setattr__(out, "_normalized", True)
    return out


def _iroot(n: int, k: int) -> int | None:
    """Exact integer k-th root of n >= 0, or None."""
    if n < 0:
        return None
    if n in (0, 1):
        return n
    r = round(n ** (1.0 / k))
    for cand in (r - 1, r, r + 1):
        if cand >= 0 and cand ** k == n:
            return cand
    return None


def _rational_power(base: Fraction, expo: Fraction) -> Fraction | None:
    """base**expo as an exact Fraction when that is possible, else None."""
    if expo.denominator == 1:
        n = expo.numerator
        if base == 0:
            return Fraction(0) if n > 0 else None
        return base ** n
    if base < 0:
        return None  # principal branch is complex
    num = _iroot(base.numerator, expo.denominator)
    den = _iroot(base.denominator, expo.denominator)
    if num is None or den is None:
        return None
    return Fraction(num, den) ** expo.numerator


def _norm_power(base: Expr, expo: Expr) -> Expr:
    if isinstance(expo, Constant):
        if expo.value == 0:
            return _ONE
        if expo.value == 1:
            return base
    if isinstance(base, Constant):
        if base.value == 1:
            return _ONE
        if isinstance(expo, Constant):
            folded = _rational_power(base.value, expo.value)
            if folded is not None:
                return Constant(folded)
    if isinstance(base, Power) and isinstance(expo, Constant) and expo.value.denominator == 1:
        # (b**e)**n == b**(e*n) is unconditionally valid for integer n
        return _norm_power(base.base, _norm(Product((base.exponent, expo))))
    if isinstance(base, Product) and isinstance(expo, Constant) and expo.value.denominator == 1:
        return _norm(Product(tuple(Power(f, expo) for f in base.factors)))
    out = Power(base, expo)
    object.__setattr__(out, "_normalized", True)
    return out


def _norm_product(factors: list[Expr]) -> Expr:
    coeff = Fraction(1)
    by_base: dict = {}  # base key -> [base, exponent-sum parts]
    order: list = []
    for f in factors:
        if isinstance(f, Constant):
            coeff *= f.value
            continue
        if isinstance(f, Power):
            b, e = f.base, f.exponent
        else:
            b, e = f, _ONE
        bk = b.key
        slot = by_base.get(bk)
        if slot is None:
            by_base[bk] = [b, [e]]
            order.append(bk)
        else:
            slot[1].append(e)
    if coeff == 0:
        return _ZERO
    out_factors: list[Expr] = []
    for bk in order:
        b, exps = by_base[bk]
        e = exps[0] if len(exps) == 1 else _norm(Sum(tuple(exps)))
        p = _norm_power(b, e)
        if isinstance(p, Constant):
            coeff *= p.value
            if coeff == 0:
                return _ZERO
        elif isinstance(p, Product):
            # a collected power folded back into a product; merge its factors
            for sub in p.factors:
                if isinstance(sub, Constant):
                    coeff *= sub.value
                else:
                    out_factors.append(sub)
        else:
            out_factors.append(p)
    out_factors.sort(key=lambda x: x.key)
    return _build_term(coeff, tuple(out_factors))


def _norm_sum(terms: list[Expr]) -> Expr:
    const = Fraction(0)
    by_factors: dict = {}  # factors key -> [factors, coeff]
    order: list = []
    for t in terms:
        c, fs = _split_constant_factor(t)
        if not fs:
            const += c
            continue
        fk = tuple(f.key for f in fs)
        slot = by_factors.get(fk)
        if slot is None:
            by_factors[fk] = [fs, c]
            order.append(fk)
        else:
            slot[1] += c
    out_terms = []
    for fk in order:
        fs, c = by_factors[fk]
        if c != 0:
            out_terms.append(_build_term(c, fs))
    out_terms.sort(key=lambda x: x.key)
    if const != 0:
        out_terms.insert(0, Constant(const))
    if not out_terms:
        return _ZERO
    if len(out_terms) == 1:
        return out_terms[0]
    out = Sum(tuple(out_terms))
    object.__setattr__(out, "_normalized", True)
    return out


_EXACT_APPLY = {
    ("exp", Fraction(0)): _ONE,
    ("ln", Fraction(1)): _ZERO,
    ("sin", Fraction(0)): _ZERO,
    ("cos", Fraction(0)): _ONE,
    ("arctan", Fraction(0)): _ZERO,
}


def _norm(e: Expr) -> Expr:
    if e._normalized:
        return e
    if isinstance(e, Sum):
        flat: list[Expr] = []
        for t in e.terms:
            tn = _norm(t)
            if isinstance(tn, Sum):
                flat.extend(tn.terms)
            else:
                flat.append(tn)
        out = _norm_sum(flat)
    elif isinstance(e, Product):
        flat = []
        for f in e.factors:
            fn_ = _norm(f)
            if isinstance(fn_, Product):
                flat.extend(fn_.factors)
            else:
                flat.append(fn_)
        out = _norm_product(flat)
    elif isinstance(e, Power):
        out = _norm_power(_norm(e.base), _norm(e.exponent))
    elif isinstance(e, Apply):
        args = tuple(_norm(a) for a in e.args)
        if e.fn == "sqrt":
            # canonical representation of sqrt is a half power
            return _norm_power(args[0], Constant(_HALF))
        if len(args) == 1 and isinstance(args[0], Constant):
            hit = _EXACT_APPLY.get((e.fn, args[0].value))
            if hit is not None:
                return hit
        out = Apply(e.fn, args)
        object.__setattr__(out, "_normalized", True)
    else:
        out = e
    object.__setattr__(out, "_normalized", True)
    return out


def normalize(e: Expr) -> Expr:
    """Canonical form: flattened, constant-folded, like terms collected, sorted."""
    return _norm(as_expr(e))


# ---------------------------------------------------------------------------
# calculus
# ---------------------------------------------------------------------------

def differentiate(e: Expr, s: str) -> Expr:
    """Exact partial derivative with respect to the symbol named ``s``.

    Every other symbol is treated as a constant; in particular derivative
    symbols like ``f'`` are independent of ``f``.
    """
    return normalize(_diff(normalize(e), s))


def _diff(e: Expr, s: str) -> Expr:
    if s not in free_symbols(e):
        return _ZERO
    if isinstance(e, Symbol):
        return _ONE if e.name == s else _ZERO
    if isinstance(e, Sum):
        return Sum(tuple(_diff(t, s) for t in e.terms))
    if isinstance(e, Product):
        terms = []
        for i, f in enumerate(e.factors):
            df = _diff(f, s)
            terms.append(Product(e.factors[:i] + (df,) + e.factors[i + 1:]))
        return Sum(tuple(terms))
    if isinstance(e, Power):
        b, x = e.base, e.exponent
        if isinstance(x, Constant):
            return Product((x, Power(b, Constant(x.value - 1)), _diff(b, s)))
        # general case d(b**x) = b**x * (dx*ln b + x*db/b)
        inner = Sum((
            Product((_diff(x, s), Apply("ln", (b,)))),
            Product((x, _diff(b, s), Power(b, _MINUS_ONE))),
        ))
        return Product((e, inner))
    if isinstance(e, Apply):
        a = e.args[0]
        da = _diff(a, s)
        if e.fn == "exp":
            outer = e
        elif e.fn == "ln":
            outer = Power(a, _MINUS_ONE)
        elif e.fn == "sin":
            outer = Apply("cos", (a,))
        elif e.fn == "cos":
            outer = Product((_MINUS_ONE, Apply("sin", (a,))))
        elif e.fn == "arctan":
            outer = Power(Sum((_ONE, Power(a, Constant(2)))), _MINUS_ONE)
        elif e.fn == "sqrt":
            outer = Product((Constant(_HALF), Power(a, Constant(Fraction(-1, 2)))))
        elif e.fn == "arctan2":
            y, x = e.args
            dy, dx = _diff(y, s), _diff(x, s)
            denom = Power(Sum((Power(x, Constant(2)), Power(y, Constant(2)))), _MINUS_ONE)
            return Product((Sum((Product((x, dy)), Product((_MINUS_ONE, y, dx)))), denom))
        else:  # pragma: no cover - Apply constructor rejects unknown functions
            raise UnsupportedFunction(e.fn)
        return Product((outer, da))
    raise UnsupportedFunction(f"cannot differentiate {type(e).__name__}")


def substitute(e: Expr, bindings: Mapping[str, Expr]) -> Expr:
    """Simultaneous substitution of symbols, then normalization.

    Bindings never cascade: replacing f by g and g by f swaps the two.
    """
    bound = {name: as_expr(v) for name, v in bindings.items()}
    return normalize(_subst(e, bound))


def _subst(e: Expr, bindings: Mapping[str, Expr]) -> Expr:
    if not (free_symbols(e) & bindings.keys()):
        return e
    if isinstance(e, Symbol):
        return bindings.get(e.name, e)
    if isinstance(e, Sum):
        return Sum(tuple(_subst(t, bindings) for t in e.terms))
    if isinstance(e, Product):
        return Product(tuple(_subst(f, bindings) for f in e.factors))
    if isinstance(e, Power):
        return Power(_subst(e.base, bindings), _subst(e.exponent, bindings))
    if isinstance(e, Apply):
        return Apply(e.fn, tuple(_subst(a, bindings) for a in e.args))
    return e


# ---------------------------------------------------------------------------
# evaluation
# ---------------------------------------------------------------------------

class _MagTracker:
    __slots__ = ("max_mag",)

    def __init__(self):
        self.max_mag = 0.0

    def note(self, v: complex) -> complex:
        m = abs(v)
        if not (m < float("inf")) or v != v:  # inf or nan
            raise DomainError("non-finite intermediate value")
        if m > self.max_mag:
            self.max_mag = m
        return v


def _atan_complex(w: complex) -> complex:
    # arctan(w) = (1/2i) ln((1+iw)/(1-iw)) on the principal branch
    den = 1 - 1j * w
    if den == 0:
        raise DomainError("arctan pole")
    return cmath.log((1 + 1j * w) / den) / 2j


def _atan2_complex(y: complex, x: complex) -> complex:
    import math
    if y.imag == 0 and x.imag == 0:
        if x.real == 0 and y.real == 0:
            raise DomainError("arctan2(0, 0)")
        return complex(math.atan2(y.real, x.real))
    # analytic continuation: -i ln((x+iy)/sqrt(x^2+y^2)), principal branch
    q = x * x + y * y
    if q == 0:
        raise DomainError("arctan2 on the isotropic cone x^2+y^2=0")
    return -1j * cmath.log((x + 1j * y) / cmath.sqrt(q))


def _eval(e: Expr, env: Mapping[str, complex], tr: _MagTracker) -> complex:
    if isinstance(e, Constant):
        return tr.note(complex(e.value))
    if isinstance(e, Symbol):
        try:
            return tr.note(complex(env[e.name]))
        except KeyError:
            if e.name == IMAGINARY_UNIT:
                return 1j
            raise UnboundSymbol(e.name) from None
    if isinstance(e, Sum):
        acc = 0j
        for t in e.terms:
            acc += _eval(t, env, tr)
        return tr.note(acc)
    if isinstance(e, Product):
        acc = 1 + 0j
        for f in e.factors:
            acc *= _eval(f, env, tr)
        return tr.note(acc)
    if isinstance(e, Power):
        b = _eval(e.base, env, tr)
        if isinstance(e.exponent, Constant) and e.exponent.value.denominator == 1:
            n = e.exponent.value.numerator
            if b == 0:
                if n < 0:
                    raise DomainError("division by zero")
                return tr.note(0j if n else 1 + 0j)
            try:
                return tr.note(b ** n)
            except OverflowError:
                raise DomainError("overflow in power") from None
        x = _eval(e.exponent, env, tr)
        if b == 0:
            if x.real > 0 and x.imag == 0:
                return 0j
            raise DomainError("zero base with non-positive exponent")
        return tr.note(cmath.exp(x * cmath.log(b)))
    if isinstance(e, Apply):
        if e.fn == "arctan2":
            y = _eval(e.args[0], env, tr)
            x = _eval(e.args[1], env, tr)
            return tr.note(_atan2_complex(y, x))
        a = _eval(e.args[0], env, tr)
        if e.fn == "exp":
            try:
                return tr.note(cmath.exp(a))
            except OverflowError:
                raise DomainError("overflow in exp") from None
        if e.fn == "ln":
            if a == 0:
                raise DomainError("ln(0)")
            return tr.note(cmath.log(a))
        if e.fn == "sin":
            return tr.note(cmath.sin(a))
        if e.fn == "cos":
            return tr.note(cmath.cos(a))
        if e.fn == "arctan":
            return tr.note(_atan_complex(a))
        if e.fn == "sqrt":
            return tr.note(cmath.sqrt(a))
        raise UnsupportedFunction(e.fn)  # pragma: no cover
    raise ExprError(f"cannot evaluate {type(e).__name__}")  # pragma: no cover


def eval_complex(e: Expr, env: Mapping[str, complex]) -> complex:
    """IEEE double complex evaluation on principal branches."""
    return _eval(e, env, _MagTracker())


def eval_with_magnitude(e: Expr, env: Mapping[str, complex]) -> tuple[complex, float]:
    """Evaluate and also report the largest intermediate magnitude seen."""
    tr = _MagTracker()
    v = _eval(e, env, tr)
    return v, tr.max_mag


def eval_real(e: Expr, env: Mapping[str, float]) -> float:
    """Evaluate at a real point; raises DomainError if the value leaves the real line."""
    v = eval_complex(e, env)
    if abs(v.imag) > 1e-12 * (1.0 + abs(v.real)):
        raise DomainError(f"value {v} is not real")
    return v.real


# ---------------------------------------------------------------------------
# zero testing
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class ZeroVerdict:
    """Outcome of a probabilistic zero test.

    ``status`` is one of "zero", "nonzero", "unknown".  For "nonzero" the
    witness point and the offending value are attached; ``max_magnitude`` is
    the largest |value| seen across the accepted samples.
    """

    status: str
    witness: dict | None = None
    value: complex | None = None
    max_magnitude: float = 0.0

    @property
    def is_zero(self) -> bool:
        return self.status == "zero"

    @classmethod
    def zero(cls, max_magnitude=0.0):
        return cls("zero", max_magnitude=max_magnitude)

    @classmethod
    def nonzero(cls, witness, value, max_magnitude=0.0):
        return cls("nonzero", witness=witness, value=value, max_magnitude=max_magnitude)

    @classmethod
    def unknown(cls):
        return cls("unknown")


def _polynomial_fast_path(e: Expr, names: list[str]) -> bool | None:
    """True/False if zero-ness is decided exactly, None if not applicable."""
    try:
        coeffs = collect_polynomial(e, names, max_degree=64)
    except (NotPolynomial, DegreeTooHigh):
        return None
    for c in coeffs.values():
        if free_symbols(c):
            return None  # coefficients must be pure constants to decide exactly
        if isinstance(c, Constant) and c.value != 0:
            return False
    return True


def is_identically_zero(
    e: Expr,
    variables: Iterable[str] | None = None,
    samples: int = 64,
    tol: float = 1e-9,
    seed: int = 0,
) -> ZeroVerdict:
    """Probabilistic zero test by seeded sampling on the complex box [-2,2]^2.

    Each variable is drawn uniformly from the square [-2,2] x [-2,2]i.  A
    sample passes when |value| <= tol * (1 + largest intermediate magnitude),
    which keeps the test meaningful near poles where intermediates blow up.
    Points raising DomainError are rejected and retried, up to 10x ``samples``
    attempts; if fewer than ``samples`` valid points are found the verdict is
    "unknown".  Expressions recognized as polynomials over the given variables
    with constant coefficients are decided exactly instead of sampled.
    """
    if samples < 1:
        raise ValueError("samples must be >= 1")
    en = normalize(e)
    if isinstance(en, Constant):
        if en.value == 0:
            return ZeroVerdict.zero()
        return ZeroVerdict.nonzero({}, complex(en.value), abs(complex(en.value)))
    names = sorted(free_symbols(en) - {IMAGINARY_UNIT}) if variables is None else list(variables)
    decided = _polynomial_fast_path(en, names)
    if decided is True:
        return ZeroVerdict.zero()
    rng = random.Random(seed)
    accepted = 0
    max_mag = 0.0
    for _ in range(10 * samples):
        point = {n: complex(rng.uniform(-2.0, 2.0), rng.uniform(-2.0, 2.0)) for n in names}
        try:
            value, inner = eval_with_magnitude(en, point)
        except DomainError:
            continue
        accepted += 1
        mag = abs(value)
        if mag > max_mag:
            max_mag = mag
        if mag > tol * (1.0 + inner):
            return ZeroVerdict.nonzero(point, value, max_mag)
        if accepted >= samples:
            return ZeroVerdict.zero(max_mag)
    return ZeroVerdict.unknown()


# ---------------------------------------------------------------------------
# polynomial collection
# ---------------------------------------------------------------------------

def collect_polynomial(
    e: Expr,
    symbols: Iterable[str],
    max_degree: int,
) -> dict[tuple[int, ...], Expr]:
    """Rewrite ``e`` as a polynomial in ``symbols`` with Expr coefficients.

    Returns a map from exponent vectors (one entry per requested symbol, in
    the given order) to normalized coefficient expressions free of those
    symbols.  Raises NotPolynomial if a requested symbol occurs inside a
    function application, a non-integer or negative power, or an exponent;
    raises DegreeTooHigh if a surviving monomial exceeds ``max_degree``
    (cancellation happens first, so terms that annihilate do not count).
    """
    names = list(symbols)
    index = {n: k for k, n in enumerate(names)}
    nvars = len(names)
    zero_vec = (0,) * nvars

    def involved(x: Expr) -> bool:
        return bool(free_symbols(x) & index.keys())

    def merge(into: dict, frm: dict) -> None:
        for mono, coeff in frm.items():
            if mono in into:
                into[mono] = into[mono] + coeff
            else:
                into[mono] = coeff

    def convolve(a: dict, b: dict) -> dict:
        out: dict = {}
        for ma, ca in a.items():
            for mb, cb in b.items():
                mono = tuple(x + y for x, y in zip(ma, mb))
                term = Product((ca, cb))
                if mono in out:
                    out[mono] = out[mono] + term
                else:
                    out[mono] = term
        return out

    def rec(node: Expr) -> dict:
        if not involved(node):
            return {zero_vec: node}
        if isinstance(node, Symbol):
            mono = tuple(1 if k == index[node.name] else 0 for k in range(nvars))
            return {mono: _ONE}
        if isinstance(node, Sum):
            acc: dict = {}
            for t in node.terms:
                merge(acc, rec(t))
            return acc
        if isinstance(node, Product):
            acc = {zero_vec: _ONE}
            for f in node.factors:
                acc = convolve(acc, rec(f))
            return acc
        if isinstance(node, Power):
            if involved(node.exponent):
                raise NotPolynomial(f"collected symbol appears in an exponent: {to_str(node)}")
            if not isinstance(node.exponent, Constant) or node.exponent.value.denominator != 1:
                raise NotPolynomial(f"non-integer power of a collected symbol: {to_str(node)}")
            n = node.exponent.value.numerator
            if n < 0:
                raise NotPolynomial(f"collected symbol in a denominator: {to_str(node)}")
            acc = {zero_vec: _ONE}
            base = rec(node.base)
            for _ in range(n):
                acc = convolve(acc, base)
            return acc
        if isinstance(node, Apply):
            raise NotPolynomial(f"collected symbol inside {node.fn}(...)")
        raise NotPolynomial(f"cannot collect {type(node).__name__}")  # pragma: no cover

    raw = rec(normalize(e))
    out: dict[tuple[int, ...], Expr] = {}
    for mono, coeff in raw.items():
        cn = normalize(coeff)
        if isinstance(cn, Constant) and cn.value == 0:
            continue
        if sum(mono) > max_degree:
            pretty = "*".join(f"{n}^{d}" for n, d in zip(names, mono) if d)
            raise DegreeTooHigh(f"monomial {pretty or '1'} exceeds degree {max_degree}")
        out[mono] = cn
    return out


# ---------------------------------------------------------------------------
# printing and compilation
# ---------------------------------------------------------------------------

def _frac_str(v: Fraction) -> str:
    return str(v.numerator) if v.denominator == 1 else f"{v.numerator}/{v.denominator}"


_PREC_SUM, _PREC_PROD, _PREC_NEG, _PREC_POW, _PREC_ATOM = 1, 2, 3, 4, 5


def _to_str(e: Expr) -> tuple[str, int]:
    if isinstance(e, Constant):
        if e.value < 0:
            return f"-{_frac_str(-e.value)}", _PREC_NEG
        if e.value.denominator != 1:
            return _frac_str(e.value), _PREC_PROD
        return _frac_str(e.value), _PREC_ATOM
    if isinstance(e, Symbol):
        return e.name, _PREC_ATOM
    if isinstance(e, Sum):
        parts = []
        for k, t in enumerate(e.terms):
            s, p = _to_str(t)
            if k == 0:
                parts.append(s if p >= _PREC_SUM else f"({s})")
            elif s.startswith("-"):
                parts.append(f" - {s[1:]}")
            else:
                parts.append(f" + {s}")
        return "".join(parts), _PREC_SUM
    if isinstance(e, Product):
        num, den = [], []
        neg = False
        for f in e.factors:
            if isinstance(f, Constant) and f.value == -1:
                neg = not neg
                continue
            if isinstance(f, Power) and isinstance(f.exponent, Constant) and f.exponent.value < 0:
                inv = Power(f.base, Constant(-f.exponent.value))
                s, p = _to_str(normalize(inv))
                den.append(s if p > _PREC_PROD else f"({s})")
                continue
            s, p = _to_str(f)
            num.append(s if p > _PREC_PROD else f"({s})")
        text = "*".join(num) if num else "1"
        if den:
            dtext = "*".join(den)
            if len(den) > 1:
                dtext = f"({dtext})"
            text = f"{text}/{dtext}"
        if neg:
            return f"-{text}", _PREC_NEG
        return text, _PREC_PROD
    if isinstance(e, Power):
        bs, bp = _to_str(e.base)
        xs, xp = _to_str(e.exponent)
        left = bs if bp >= _PREC_ATOM else f"({bs})"
        right = xs if xp >= _PREC_ATOM else f"({xs})"
        return f"{left}^{right}", _PREC_POW
    if isinstance(e, Apply):
        args = ", ".join(_to_str(a)[0] for a in e.args)
        return f"{e.fn}({args})", _PREC_ATOM
    return repr(e), _PREC_ATOM  # pragma: no cover


def to_str(e: Expr) -> str:
    """Readable infix form; parses back to a structurally equal expression."""
    return _to_str(normalize(e))[0]


_COMPILE_HELPERS = {
    "_cx_exp": cmath.exp,
    "_cx_log": cmath.log,
    "_cx_sin": cmath.sin,
    "_cx_cos": cmath.cos,
    "_cx_sqrt": cmath.sqrt,
    "_cx_atan": _atan_complex,
    "_cx_atan2": _atan2_complex,
}


def _emit(e: Expr, names: Mapping[str, str]) -> str:
    if isinstance(e, Constant):
        v = e.value
        if v.denominator == 1:
            return f"({v.numerator})"
        return f"({v.numerator}/{v.denominator})"
    if isinstance(e, Symbol):
        if e.name in names:
            return names[e.name]
        if e.name == IMAGINARY_UNIT:
            return "1j"
        raise UnboundSymbol(e.name)
    if isinstance(e, Sum):
        return "(" + "+".join(_emit(t, names) for t in e.terms) + ")"
    if isinstance(e, Product):
        return "(" + "*".join(_emit(f, names) for f in e.factors) + ")"
    if isinstance(e, Power):
        if isinstance(e.exponent, Constant) and e.exponent.value.denominator == 1:
            return f"({_emit(e.base, names)}**({e.exponent.value.numerator}))"
        return f"_cx_exp({_emit(e.exponent, names)}*_cx_log({_emit(e.base, names)}))"
    if isinstance(e, Apply):
        fn = {"exp": "_cx_exp", "ln": "_cx_log", "sin": "_cx_sin", "cos": "_cx_cos",
              "arctan": "_cx_atan", "arctan2": "_cx_atan2", "sqrt": "_cx_sqrt"}[e.fn]
        return fn + "(" + ", ".join(_emit(a, names) for a in e.args) + ")"
    raise ExprError(f"cannot compile {type(e).__name__}")  # pragma: no cover


def compile_expr(e: Expr, variables: Iterable[str]) -> Callable[..., complex]:
    """Compile to a fast positional callable over complex arguments.

    The compiled function agrees with ``eval_complex`` on its domain; domain
    failures surface as DomainError.  Used by the numeric layer where
    expression trees are evaluated many thousands of times.
    """
    order = list(variables)
    names = {n: f"_a{k}" for k, n in enumerate(order)}
    body = _emit(normalize(e), names)
    src = f"def _compiled({', '.join(names[n] for n in order)}): return {body}"
    scope = dict(_COMPILE_HELPERS)
    exec(src, scope)  # noqa: S102 - source is generated from a validated tree
    raw = scope["_compiled"]

    def call(*args):
        try:
            v = complex(raw(*args))
        except ZeroDivisionError:
            raise DomainError("division by zero") from None
        except (ValueError, OverflowError) as exc:
            raise DomainError(str(exc)) from None
        if v != v or abs(v) == float("inf"):
            raise DomainError("non-finite value")
        return v

    return call
