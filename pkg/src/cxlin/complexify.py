"""Complex-pair calculus: real/imaginary splits of complex quantities.

A :class:`ComplexPair` stores a complex-valued quantity W = W1 + i*W2 as two
real expressions.  Arithmetic follows the complex field rules exactly, so the
split of any rational operation is available symbolically.  The two halved
derivative operators

    d_u W = (  (d_f W1 + d_g W2)/2,  (d_f W2 - d_g W1)/2 )
    d_z W = (  (d_x W1 + d_y W2)/2,  (d_x W2 - d_y W1)/2 )

realize differentiation with respect to the joined dependent variable
u = f + i*g and the joined independent variable z = x + i*y.  Applied to the
dependent pair (f, g) itself, d_z produces exactly the half-sum combinations
(f_x + g_y)/2 and (g_x - f_y)/2 that the equation DSL abbreviates as h and l.
On pairs satisfying the Cauchy-Riemann equations both operators agree with
the complex derivative.

The 1/2 factor convention is fixed here once and adjudicated empirically
against the printed real condition sets by ``lincheck.derive_real_conditions``.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from typing import Callable

from cxlin import symexpr
from cxlin.symexpr import (
    Apply,
    C,
    Expr,
    IMAGINARY_UNIT,
    Symbol,
    UnsupportedFunction,
    as_expr,
    differentiate,
    normalize,
)

__all__ = ["ComplexPair", "pair_apply", "d_u", "d_z", "d_x", "cr_residual", "join", "split"]

_HALF = C(Fraction(1, 2))


@dataclass(frozen=True)
class ComplexPair:
    """A complex quantity represented as (real part, imaginary part)."""

    re: Expr
    im: Expr

    def __post_init__(self):
        object.__setattr__(self, "re", normalize(as_expr(self.re)))
        object.__setattr__(self, "im", normalize(as_expr(self.im)))

    @classmethod
    def real(cls, e) -> "ComplexPair":
        return cls(as_expr(e), C(0))

    def __add__(self, other: "ComplexPair") -> "ComplexPair":
        other = _coerce(other)
        return ComplexPair(self.re + other.re, self.im + other.im)

    __radd__ = __add__

    def __sub__(self, other: "ComplexPair") -> "ComplexPair":
        other = _coerce(other)
        return ComplexPair(self.re - other.re, self.im - other.im)

    def __rsub__(self, other):
        return _coerce(other) - self

    def __mul__(self, other: "ComplexPair") -> "ComplexPair":
        other = _coerce(other)
        a, b, c, d = self.re, self.im, other.re, other.im
        return ComplexPair(a * c - b * d, a * d + b * c)

    __rmul__ = __mul__

    def __truediv__(self, other: "ComplexPair") -> "ComplexPair":
        return self * _coerce(other).reciprocal()

    def __rtruediv__(self, other):
        return _coerce(other) * self.reciprocal()

    def __neg__(self) -> "ComplexPair":
        return ComplexPair(-self.re, -self.im)

    def reciprocal(self) -> "ComplexPair":
        a, b = self.re, self.im
        q = (a ** 2 + b ** 2) ** -1
        return ComplexPair(a * q, -(b * q))

    def conjugate(self) -> "ComplexPair":
        return ComplexPair(self.re, -self.im)

    def scaled(self, c) -> "ComplexPair":
        c = as_expr(c)
        return ComplexPair(c * self.re, c * self.im)

    def times_i(self) -> "ComplexPair":
        return ComplexPair(-self.im, self.re)

    def eval(self, env) -> complex:
        return complex(
            symexpr.eval_complex(self.re, env) + 1j * symexpr.eval_complex(self.im, env)
        )

    def is_zero(self, **kwargs) -> bool:
        zr = symexpr.is_identically_zero(self.re, **kwargs)
        zi = symexpr.is_identically_zero(self.im, **kwargs)
        return zr.is_zero and zi.is_zero


def _coerce(value) -> ComplexPair:
    if isinstance(value, ComplexPair):
        return value
    return ComplexPair.real(as_expr(value))


def join(p: ComplexPair) -> Expr:
    """Single expression p.re + i*p.im using the reserved symbol ``i``."""
    return normalize(p.re + Symbol(IMAGINARY_UNIT) * p.im)


def split(re: Expr, im: Expr) -> ComplexPair:
    return ComplexPair(re, im)


def pair_apply(fn: str, p: ComplexPair) -> ComplexPair:
    """Exact real/imaginary split of an elementary function of p.

    Supported: reciprocal, square, cube, exp, ln, sqrt, arctan.  The log
    split uses arctan2 for the argument, so the branch follows the standard
    principal convention; arctan itself is reduced to logarithms.
    """
    a, b = p.re, p.im
    if fn == "reciprocal":
        return p.reciprocal()
    if fn == "square":
        return p * p
    if fn == "cube":
        return p * p * p
    if fn == "exp":
        mag = Apply("exp", (a,))
        return ComplexPair(mag * Apply("cos", (b,)), mag * Apply("sin", (b,)))
    if fn == "ln":
        return ComplexPair(
            _HALF * Apply("ln", (a ** 2 + b ** 2,)),
            Apply("arctan2", (b, a)),
        )
    if fn == "sqrt":
        # principal branch via exp(ln(p)/2)
        return pair_apply("exp", pair_apply("ln", p).scaled(_HALF))
    if fn == "arctan":
        # (1/2i) * ln((1+ip)/(1-ip)); multiplying by 1/(2i) = -i/2 swaps parts
        one = ComplexPair.real(C(1))
        w = (one + p.times_i()) / (one - p.times_i())
        lw = pair_apply("ln", w)
        return ComplexPair(lw.im * _HALF, -(lw.re * _HALF))
    raise UnsupportedFunction(f"pair_apply does not support {fn!r}")


def d_u(
    w: ComplexPair,
    f: str = "f",
    g: str = "g",
    diff: Callable[[Expr, str], Expr] = differentiate,
) -> ComplexPair:
    """Derivative with respect to the joined dependent variable u = f + i*g."""
    return ComplexPair(
        _HALF * (diff(w.re, f) + diff(w.im, g)),
        _HALF * (diff(w.im, f) - diff(w.re, g)),
    )


def d_z(
    w: ComplexPair,
    x: str = "x",
    y: str = "y",
    diff: Callable[[Expr, str], Expr] = differentiate,
) -> ComplexPair:
    """Derivative with respect to the joined independent variable z = x + i*y."""
    return ComplexPair(
        _HALF * (diff(w.re, x) + diff(w.im, y)),
        _HALF * (diff(w.im, x) - diff(w.re, y)),
    )


def d_x(
    w: ComplexPair,
    x: str = "x",
    diff: Callable[[Expr, str], Expr] = differentiate,
) -> ComplexPair:
    """Componentwise derivative along a single real independent variable."""
    return ComplexPair(diff(w.re, x), diff(w.im, x))


def cr_residual(f: Expr, g: Expr, x: str = "x", y: str = "y") -> tuple[Expr, Expr]:
    """Cauchy-Riemann residuals (f_x - g_y, f_y + g_x); both vanish iff f + i*g
    is analytic in x + i*y."""
    return (
        normalize(differentiate(f, x) - differentiate(g, y)),
        normalize(differentiate(f, y) + differentiate(g, x)),
    )
