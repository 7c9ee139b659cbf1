"""First-order differential operators, Lie brackets, and the paired-symmetry
hypothesis checks for the canonical-form reduction theorem.

A :class:`VectorField` is an operator sum(components[k] * d/d vars[k]).  The
hypothesis checker takes four real fields (X1, Y1, X2, Y2), attempts to solve

    X1 = rho1*X2 - rho2*Y2,      Y1 = rho1*Y2 + rho2*X2

componentwise for the two real proportionality functions (picking the first
component pair whose 2x2 determinant is not identically zero, then verifying
the remaining components), and zero-tests the two commutator combinations

    [X1, X2] - [Y1, Y2] = 0,     [X1, Y2] + [Y1, X2] = 0,

which are the real split of requiring the joined complex fields Z1 = X1+i*Y1
and Z2 = X2+i*Y2 to commute.
"""

from __future__ import annotations

from dataclasses import dataclass

from cxlin.symexpr import (
    C,
    Expr,
    ExprError,
    Power,
    ZeroVerdict,
    as_expr,
    differentiate,
    free_symbols,
    is_identically_zero,
    normalize,
    to_str,
)

__all__ = [
    "VectorField",
    "Theorem2Report",
    "VariableMismatch",
    "DegenerateSolve",
    "lie_bracket",
    "check_theorem2",
]


class VariableMismatch(ExprError):
    pass


class DegenerateSolve(ExprError):
    """No component pair gives an invertible 2x2 system for (rho1, rho2)."""


@dataclass(frozen=True)
class VectorField:
    """A first-order operator with one component expression per variable."""

    variables: tuple[str, ...]
    components: tuple[Expr, ...]

    def __post_init__(self):
        comps = tuple(normalize(as_expr(c)) for c in self.components)
        if len(comps) != len(self.variables):
            raise VariableMismatch(
                f"{len(comps)} components for {len(self.variables)} variables")
        object.__setattr__(self, "components", comps)

    @classmethod
    def from_dict(cls, variables, components: dict) -> "VectorField":
        variables = tuple(variables)
        return cls(variables, tuple(components.get(v, C(0)) for v in variables))

    def apply_to(self, e: Expr) -> Expr:
        """Directional derivative: sum of component * d(e)/d(var)."""
        total = C(0)
        for v, comp in zip(self.variables, self.components):
            total = total + comp * differentiate(e, v)
        return normalize(total)

    def __add__(self, other: "VectorField") -> "VectorField":
        self._check(other)
        return VectorField(self.variables,
                           tuple(a + b for a, b in zip(self.components, other.components)))

    def __sub__(self, other: "VectorField") -> "VectorField":
        self._check(other)
        return VectorField(self.variables,
                           tuple(a - b for a, b in zip(self.components, other.components)))

    def scaled(self, factor) -> "VectorField":
        factor = as_expr(factor)
        return VectorField(self.variables, tuple(factor * c for c in self.components))

    def is_zero(self, **kwargs) -> bool:
        return all(is_identically_zero(c, list(self.variables), **kwargs).is_zero
                   for c in self.components)

    def _check(self, other: "VectorField"):
        if self.variables != other.variables:
            raise VariableMismatch(
                f"fields over {self.variables} and {other.variables}")

    def __str__(self):
        parts = []
        for v, comp in zip(self.variables, self.components):
            s = to_str(comp)
            if s == "0":
                continue
            parts.append(f"({s})*d/d{v}")
        return " + ".join(parts) if parts else "0"


def lie_bracket(v: VectorField, w: VectorField) -> VectorField:
    """[V, W]: component k is sum_j (V_j d_j W_k - W_j d_j V_k)."""
    v._check(w)
    comps = tuple(
        normalize(v.apply_to(wk) - w.apply_to(vk))
        for vk, wk in zip(v.components, w.components)
    )
    return VectorField(v.variables, comps)


@dataclass(frozen=True)
class Theorem2Report:
    """Outcome of the paired-symmetry hypothesis check.

    ``proportionality`` is "found" (with rho1/rho2 attached), "inconsistent"
    (a component equation fails for the solved rho; the witness residual is
    recorded), or "degenerate" when no component pair is solvable.  ``overall``
    requires a found, nonconstant proportionality plus both commutator
    combinations identically zero.
    """

    proportionality: str
    rho1: Expr | None
    rho2: Expr | None
    nonconstant: bool
    inconsistency: str | None
    commutator_verdicts: tuple[ZeroVerdict, ZeroVerdict]
    overall: bool
    narrative: str = ""


def _solve_rho(x1: VectorField, y1: VectorField, x2: VectorField, y2: VectorField,
               samples: int, tol: float, seed: int):
    """Solve the componentwise linear system for (rho1, rho2).

    Rows come from both relations: X1_k = rho1*X2_k - rho2*Y2_k and
    Y1_k = rho1*Y2_k + rho2*X2_k.  Returns (rho1, rho2, leftover rows).
    """
    rows = []  # (a, b, rhs) meaning a*rho1 + b*rho2 = rhs
    for k in range(len(x1.variables)):
        rows.append((x2.components[k], -y2.components[k], x1.components[k], f"X1[{k}]"))
        rows.append((y2.components[k], x2.components[k], y1.components[k], f"Y1[{k}]"))
    n = len(rows)
    variables = list(x1.variables)
    for i in range(n):
        for j in range(i + 1, n):
            a1, b1, r1, _ = rows[i]
            a2, b2, r2, _ = rows[j]
            det = normalize(a1 * b2 - a2 * b1)
            if is_identically_zero(det, variables, samples=samples, tol=tol,
                                   seed=seed).is_zero:
                continue
            inv = Power(det, C(-1))
            rho1 = normalize((r1 * b2 - r2 * b1) * inv)
            rho2 = normalize((a1 * r2 - a2 * r1) * inv)
            rest = [rows[k] for k in range(n) if k not in (i, j)]
            return rho1, rho2, rest
    raise DegenerateSolve("no component pair yields an invertible 2x2 system")


def check_theorem2(
    x1: VectorField, y1: VectorField, x2: VectorField, y2: VectorField,
    samples: int = 64, tol: float = 1e-9, seed: int = 0,
) -> Theorem2Report:
    """Check the proportionality and commutator hypotheses on four fields."""
    for w in (y1, x2, y2):
        x1._check(w)
    variables = list(x1.variables)
    kw = dict(samples=samples, tol=tol, seed=seed)

    c1 = lie_bracket(x1, x2) - lie_bracket(y1, y2)
    c2 = lie_bracket(x1, y2) + lie_bracket(y1, x2)

    def field_verdict(field: VectorField) -> ZeroVerdict:
        for comp in field.components:
            v = is_identically_zero(comp, variables, **kw)
            if not v.is_zero:
                return v
        return ZeroVerdict.zero()

    comm = (field_verdict(c1), field_verdict(c2))

    try:
        rho1, rho2, rest = _solve_rho(x1, y1, x2, y2, samples, tol, seed)
    except DegenerateSolve as exc:
        return Theorem2Report(
            proportionality="degenerate", rho1=None, rho2=None, nonconstant=False,
            inconsistency=str(exc), commutator_verdicts=comm, overall=False,
            narrative="no solvable component pair for the proportionality functions")

    inconsistency = None
    for a, b, r, label in rest:
        residual = normalize(a * rho1 + b * rho2 - r)
        v = is_identically_zero(residual, variables, **kw)
        if not v.is_zero:
            inconsistency = (f"component {label} fails: residual "
                             f"{to_str(residual)} is nonzero")
            break

    nonconstant = any(
        not is_identically_zero(differentiate(r, v), variables, **kw).is_zero
        for r in (rho1, rho2) for v in variables
    )
    found = inconsistency is None
    overall = found and nonconstant and all(v.is_zero for v in comm)
    narrative = ""
    if not found:
        narrative = ("the proportionality relations are overdetermined and "
                     "componentwise inconsistent; " + inconsistency)
    return Theorem2Report(
        proportionality="found" if found else "inconsistent",
        rho1=rho1, rho2=rho2, nonconstant=nonconstant,
        inconsistency=inconsistency, commutator_verdicts=comm,
        overall=overall, narrative=narrative)
