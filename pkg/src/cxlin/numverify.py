"""Numerical verification: RK4 trajectories, residual grids, transformation
checks, and Newton inversion of planar maps.

Everything here is solution-based: rather than transforming equations
symbolically, candidate solutions are evaluated (or integrated) numerically,
pushed through point transformations, and the target equations are checked by
divided differences along curves (ODE case) or central finite differences on
regular grids after Newton inversion (PDE case).  Complex-valued intermediate
data is first class: transformed independent variables may live in the
complex plane and collinearity is checked over complex numbers.

Singularity policy: grid points where any denominator magnitude drops below
``SINGULAR_DENOMINATOR`` are excluded from residual scans and reported.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Iterable, Mapping, Sequence

import numpy as np

from cxlin import symexpr
from cxlin.eqdsl import (
    PointTransformation,
    SolutionSpec,
    SystemSpec,
    partial,
    prime,
)
from cxlin.lincheck import resolve_explicit
from cxlin.symexpr import (
    Constant,
    DomainError,
    Expr,
    ExprError,
    Power,
    Symbol,
    compile_expr,
    differentiate,
    free_symbols,
    normalize,
    substitute,
)

__all__ = [
    "Trajectory",
    "ResidualReport",
    "TransformOdeReport",
    "TransformPdeReport",
    "ImmediateBlowup",
    "AllPointsExcluded",
    "TooFewPoints",
    "DegenerateImage",
    "NoConvergence",
    "SingularJacobian",
    "rk4_integrate",
    "residual_ode",
    "residual_pde",
    "verify_transformation_ode",
    "newton_invert",
    "verify_transformation_pde",
]

SINGULAR_DENOMINATOR = 1e-8


class NumVerifyError(ExprError):
    pass


class ImmediateBlowup(NumVerifyError):
    pass


class AllPointsExcluded(NumVerifyError):
    pass


class TooFewPoints(NumVerifyError):
    pass


class DegenerateImage(NumVerifyError):
    pass


class NoConvergence(NumVerifyError):
    pass


class SingularJacobian(NumVerifyError):
    pass


# ---------------------------------------------------------------------------
# trajectories
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class Trajectory:
    """Samples of an ODE solution on a strictly increasing parameter grid."""

    parameter: np.ndarray            # shape (n,)
    states: np.ndarray               # shape (n, k)
    names: tuple[str, ...]           # state components, e.g. (f, g, f', g')
    independent: str
    step: float
    method: str = "rk4"
    truncated: bool = False

    def __post_init__(self):
        t = np.asarray(self.parameter, dtype=float)
        s = np.asarray(self.states, dtype=float)
        if t.ndim != 1 or s.shape != (t.size, len(self.names)):
            raise NumVerifyError("inconsistent trajectory shapes")
        if not np.all(np.diff(t) > 0):
            raise NumVerifyError("parameter grid must be strictly increasing")
        if not (np.all(np.isfinite(t)) and np.all(np.isfinite(s))):
            raise NumVerifyError("trajectory contains non-finite samples")
        object.__setattr__(self, "parameter", t)
        object.__setattr__(self, "states", s)

    def __len__(self):
        return self.parameter.size

    def column(self, name: str) -> np.ndarray:
        return self.states[:, self.names.index(name)]

    def env_at(self, k: int) -> dict[str, float]:
        env = {self.independent: float(self.parameter[k])}
        env.update({n: float(v) for n, v in zip(self.names, self.states[k])})
        return env


def _real_of(v: complex) -> float:
    if abs(v.imag) > 1e-9 * (1.0 + abs(v.real)):
        raise DomainError(f"value {v} left the real line")
    return v.real


def rk4_integrate(
    sys: SystemSpec,
    init: Mapping[str, float] | Sequence[float],
    interval: tuple[float, float],
    step: float,
) -> Trajectory:
    """Classical fixed-step RK4 on the first-order reduction of the system.

    Second-order systems integrate the 4-dimensional state (f, g, f', g').
    Integration aborts cleanly at the first non-finite evaluation, returning
    the partial trajectory flagged ``truncated``; a singular initial point
    raises :class:`ImmediateBlowup`.
    """
    if sys.kind not in ("ode1", "ode2"):
        raise NumVerifyError(f"rk4_integrate needs an ODE system, got {sys.kind}")
    sysx = resolve_explicit(sys) if not sys.explicit else sys
    x = sys.independent[0]
    f, g = sys.dependent
    if sys.kind == "ode1":
        names = (f, g)
        args = (x, f, g)
    else:
        names = (f, g, prime(f, 1), prime(g, 1))
        args = (x, f, g, prime(f, 1), prime(g, 1))
    rhs1, rhs2 = sysx.explicit_rhs()
    w1 = compile_expr(rhs1, args)
    w2 = compile_expr(rhs2, args)

    if isinstance(init, Mapping):
        state = np.array([float(init[n]) for n in names], dtype=float)
    else:
        state = np.array([float(v) for v in init], dtype=float)
        if state.size != len(names):
            raise NumVerifyError(f"initial state needs components {names}")

    def deriv(t: float, s: np.ndarray) -> np.ndarray:
        vals = (t, *s)
        if sys.kind == "ode1":
            return np.array([_real_of(w1(*vals)), _real_of(w2(*vals))])
        return np.array([s[2], s[3], _real_of(w1(*vals)), _real_of(w2(*vals))])

    a, b = interval
    if not b > a or step <= 0:
        raise NumVerifyError("need a < b and step > 0")
    n = max(1, round((b - a) / step))
    h = (b - a) / n
    ts = [a]
    states = [state.copy()]
    truncated = False
    for k in range(n):
        t = a + k * h
        s = states[-1]
        try:
            k1 = deriv(t, s)
            k2 = deriv(t + h / 2, s + h / 2 * k1)
            k3 = deriv(t + h / 2, s + h / 2 * k2)
            k4 = deriv(t + h, s + h * k3)
        except DomainError as exc:
            if k == 0:
                raise ImmediateBlowup(f"initial point is singular: {exc}") from exc
            truncated = True
            break
        nxt = s + h / 6 * (k1 + 2 * k2 + 2 * k3 + k4)
        if not np.all(np.isfinite(nxt)):
            if k == 0:
                raise ImmediateBlowup("blow-up within the first step")
            truncated = True
            break
        ts.append(a + (k + 1) * h)
        states.append(nxt)
    return Trajectory(np.array(ts), np.vstack(states), names, x, h,
                      truncated=truncated)


# ---------------------------------------------------------------------------
# residual scans
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class ResidualReport:
    """Max |lhs - rhs| per equation over the retained grid points."""

    equations: tuple[tuple[str, float], ...]
    excluded: tuple
    passed: bool
    tolerance: float
    grid: str
    cr_max: float | None = None
    meta: dict = field(default_factory=dict)

    @property
    def max_residual(self) -> float:
        return max((v for _, v in self.equations), default=0.0)


def _denominator_bases(e: Expr, acc: list[Expr]) -> None:
    if isinstance(e, Power):
        if isinstance(e.exponent, Constant) and e.exponent.value < 0:
            acc.append(e.base)
        _denominator_bases(e.base, acc)
        _denominator_bases(e.exponent, acc)
    elif isinstance(e, (symexpr.Sum, symexpr.Product)):
        for c in (e.terms if isinstance(e, symexpr.Sum) else e.factors):
            _denominator_bases(c, acc)
    elif isinstance(e, symexpr.Apply):
        for a in e.args:
            _denominator_bases(a, acc)


def _residual_scan(
    residual_exprs: list[tuple[str, Expr]],
    variables: tuple[str, ...],
    points: Iterable[tuple[float, ...]],
    tol: float,
    grid_desc: str,
    cr_exprs: list[Expr] | None = None,
) -> ResidualReport:
    compiled = []
    guards = []
    for label, e in residual_exprs:
        compiled.append((label, compile_expr(e, variables)))
        bases: list[Expr] = []
        _denominator_bases(e, bases)
        guards.extend(compile_expr(b, variables) for b in bases)
    cr_fns = [compile_expr(e, variables) for e in (cr_exprs or [])]
    maxima = {label: 0.0 for label, _ in residual_exprs}
    cr_max = 0.0
    excluded = []
    retained = 0
    for pt in points:
        try:
            if any(abs(gfn(*pt)) < SINGULAR_DENOMINATOR for gfn in guards):
                excluded.append(pt)
                continue
            vals = {label: abs(fn(*pt)) for label, fn in compiled}
            crv = max((abs(fn(*pt)) for fn in cr_fns), default=0.0)
        except DomainError:
            excluded.append(pt)
            continue
        retained += 1
        for label, v in vals.items():
            if v > maxima[label]:
                maxima[label] = v
        if crv > cr_max:
            cr_max = crv
    if retained == 0:
        raise AllPointsExcluded(f"all grid points excluded on {grid_desc}")
    eqs = tuple((label, maxima[label]) for label, _ in residual_exprs)
    passed = all(v <= tol for _, v in eqs)
    return ResidualReport(
        equations=eqs, excluded=tuple(excluded), passed=passed, tolerance=tol,
        grid=grid_desc, cr_max=cr_max if cr_fns else None,
        meta={"retained": retained},
    )


def _solution_exprs(sys: SystemSpec, sol, constants=None) -> dict[str, Expr]:
    if isinstance(sol, SolutionSpec):
        if tuple(sol.dependent) != tuple(sys.dependent):
            raise NumVerifyError("solution and system dependent names differ")
        return sol.bound_exprs(constants)
    return {k: normalize(symexpr.as_expr(v)) for k, v in dict(sol).items()}


def residual_ode(
    sys: SystemSpec,
    sol,
    grid: Sequence[float],
    tol: float = 1e-8,
    constants=None,
) -> ResidualReport:
    """Evaluate |lhs - rhs| of every equation after substituting a closed-form
    solution; derivatives of the solution are computed symbolically."""
    if sys.kind not in ("ode1", "ode2"):
        raise NumVerifyError("residual_ode needs an ODE system")
    x = sys.independent[0]
    f, g = sys.dependent
    exprs = _solution_exprs(sys, sol, constants)
    bindings: dict[str, Expr] = {f: exprs[f], g: exprs[g]}
    for name in (f, g):
        d1 = differentiate(exprs[name], x)
        bindings[prime(name, 1)] = d1
        if sys.order == 2:
            bindings[prime(name, 2)] = differentiate(d1, x)
    residuals = []
    for k, eq in enumerate(sys.equations):
        residuals.append((f"eq{k + 1}", substitute(eq.lhs - eq.rhs, bindings)))
    pts = [(float(v),) for v in grid]
    return _residual_scan(residuals, (x,), pts, tol,
                          f"{len(pts)} points on [{pts[0][0]:g}, {pts[-1][0]:g}]")


def _pde_bindings(sys: SystemSpec, exprs: dict[str, Expr]) -> dict[str, Expr]:
    x, y = sys.independent
    f, g = sys.dependent
    bindings: dict[str, Expr] = {f: exprs[f], g: exprs[g]}
    firsts = {}
    for name in (f, g):
        for v in (x, y):
            d = differentiate(exprs[name], v)
            firsts[(name, v)] = d
            bindings[partial(name, v)] = d
    if sys.order == 2:
        for name in (f, g):
            bindings[partial(name, x + x)] = differentiate(firsts[(name, x)], x)
            bindings[partial(name, x + y)] = differentiate(firsts[(name, x)], y)
            bindings[partial(name, y + y)] = differentiate(firsts[(name, y)], y)
    return bindings


def residual_pde(
    sys: SystemSpec,
    sol,
    box: tuple[tuple[float, float], tuple[float, float]],
    resolution: int = 21,
    tol: float = 1e-9,
    constants=None,
) -> ResidualReport:
    """Residuals of a closed-form pair on a regular box grid, with the h/l
    half-sums expanded; Cauchy-Riemann residuals of the pair are reported in
    ``cr_max`` alongside."""
    if sys.kind not in ("pde1", "pde2"):
        raise NumVerifyError("residual_pde needs a PDE system")
    x, y = sys.independent
    f, g = sys.dependent
    exprs = _solution_exprs(sys, sol, constants)
    bindings = _pde_bindings(sys, exprs)
    hl = sys.hl_substitution()
    residuals = []
    for k, eq in enumerate(sys.equations + sys.constraints):
        label = f"eq{k + 1}" if k < len(sys.equations) else f"constraint{k + 1 - len(sys.equations)}"
        r = substitute(substitute(eq.lhs - eq.rhs, hl), bindings)
        residuals.append((label, r))
    cr = [
        normalize(bindings[partial(f, x)] - bindings[partial(g, y)]),
        normalize(bindings[partial(f, y)] + bindings[partial(g, x)]),
    ]
    (x0, x1), (y0, y1) = box
    xs = np.linspace(x0, x1, resolution)
    ys = np.linspace(y0, y1, resolution)
    pts = [(float(a), float(b)) for a in xs for b in ys]
    return _residual_scan(
        residuals, (x, y), pts, tol,
        f"{resolution}x{resolution} grid on [{x0:g},{x1:g}]x[{y0:g},{y1:g}]",
        cr_exprs=cr)


# ---------------------------------------------------------------------------
# transformation checks along trajectories (ODE case)
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class Segment:
    chi: np.ndarray                      # complex, strictly monotone real part
    groups: dict[str, np.ndarray]        # dependent values, complex


@dataclass(frozen=True)
class TransformOdeReport:
    target_kind: str                     # "free" | "system"
    segments: tuple[Segment, ...]
    metrics: dict[str, float]
    passed: bool
    tolerance: float


def _map_trajectory(transform: PointTransformation, traj: Trajectory):
    """Evaluate the map at every node, assembling complex target values."""
    missing = [v for v in transform.source if v != traj.independent
               and v not in traj.names]
    if missing:
        raise NumVerifyError(f"map source variables {missing} not on the trajectory")
    order = (traj.independent,) + traj.names
    indep_groups, dep_groups = transform.grouped_targets()

    def values(re: Expr, im: Expr | None) -> np.ndarray:
        fre = compile_expr(re, order)
        fim = compile_expr(im, order) if im is not None else None
        out = np.empty(len(traj), dtype=complex)
        for k in range(len(traj)):
            args = (traj.parameter[k], *traj.states[k])
            v = fre(*args)
            if fim is not None:
                v = v + 1j * fim(*args)
            out[k] = v
        return out

    if len(indep_groups) > 1:
        raise NumVerifyError("at most one independent target is supported")
    if indep_groups:
        name, re, im = indep_groups[0]
        chi = values(re, im)
    else:
        name = traj.independent
        chi = traj.parameter.astype(complex)
    deps = {n: values(re, im) for n, re, im in dep_groups}
    return name, chi, deps


def _split_segments(chi: np.ndarray, deps: dict[str, np.ndarray],
                    max_nodes: int | None) -> list[Segment]:
    scale = float(np.max(np.abs(chi))) or 1.0
    d = np.diff(chi.real)
    if np.any(np.abs(np.diff(chi)) < 1e-13 * scale):
        raise DegenerateImage("consecutive mapped points coincide")
    # split where the real part of the new independent variable turns around
    breaks = [0]
    for k in range(1, d.size):
        if d[k] * d[k - 1] < 0:
            breaks.append(k)
    breaks.append(chi.size - 1)
    segments = []
    for a, b in zip(breaks[:-1], breaks[1:]):
        idx = np.arange(a, b + 1)
        if idx.size < 5:
            continue
        if max_nodes is not None and idx.size > max_nodes:
            idx = idx[np.round(np.linspace(0, idx.size - 1, max_nodes)).astype(int)]
        segments.append(Segment(chi[idx], {n: v[idx] for n, v in deps.items()}))
    if not segments:
        raise TooFewPoints("no monotone segment has at least 5 points")
    return segments


def _second_divided_differences(chi: np.ndarray, u: np.ndarray) -> np.ndarray:
    """f[chi_{k-1}, chi_k, chi_{k+1}] for interior k; ~ U''/2 for smooth U."""
    d1 = (u[1:] - u[:-1]) / (chi[1:] - chi[:-1])
    return (d1[1:] - d1[:-1]) / (chi[2:] - chi[:-2])


def _central_first(chi: np.ndarray, u: np.ndarray) -> np.ndarray:
    return (u[2:] - u[:-2]) / (chi[2:] - chi[:-2])


def verify_transformation_ode(
    source: SystemSpec,
    transform: PointTransformation,
    target,
    traj: Trajectory,
    tol: float = 1e-6,
    max_nodes: int | None = None,
) -> TransformOdeReport:
    """Push a trajectory through a point transformation and check the target.

    ``target`` is the string ``"free"`` (all mapped points must be collinear
    in the complex plane: second divided differences of each dependent value
    against the mapped independent variable stay below ``tol``) or an explicit
    first/second-order target :class:`SystemSpec`, checked by divided
    differences along the mapped, re-parameterized curve.  Curves whose
    mapped independent variable is non-monotone in its real part are split at
    the turning points and each monotone segment is checked separately.
    """
    _name, chi, deps = _map_trajectory(transform, traj)
    free_target = isinstance(target, str)
    if free_target and target != "free":
        raise NumVerifyError(f"unknown target {target!r}")
    if max_nodes is None:
        max_nodes = 33 if free_target else 257
    # two real dependents are the split of a single complex value
    if free_target and len(deps) == 2:
        names = list(deps)
        grouped_im = transform.grouped_targets()[1]
        if all(im is None for _, _, im in grouped_im):
            deps = {"+".join(names): deps[names[0]] + 1j * deps[names[1]]}
    segments = _split_segments(chi, deps, max_nodes)

    metrics: dict[str, float] = {}
    if free_target:
        worst = 0.0
        for seg in segments:
            for _n, u in seg.groups.items():
                dd = _second_divided_differences(seg.chi, u)
                worst = max(worst, float(np.max(np.abs(dd))))
        metrics["max_second_divdiff"] = worst
        const_dev = max(
            float(np.max(np.abs(seg.groups[n] - seg.groups[n][0])))
            for seg in segments for n in seg.groups
        )
        metrics["max_deviation_from_constant"] = const_dev
        passed = worst <= tol
        return TransformOdeReport("free", tuple(segments), metrics, passed, tol)

    if not isinstance(target, SystemSpec) or target.kind not in ("ode1", "ode2"):
        raise NumVerifyError("target must be 'free' or an ode1/ode2 system")
    if not target.explicit:
        raise NumVerifyError("target system must be explicit")
    tdep = target.dependent
    scalar_complex = False
    if len(deps) == 1 and len(tdep) == 2:
        # A single complex mapped value can be checked against an uncoupled
        # pair of identical scalar equations: the pair is then the real
        # restriction of one analytic scalar equation, which the complex
        # series must satisfy directly.
        d1, d2 = tdep
        rhs1, rhs2 = target.explicit_rhs()
        renamed = substitute(rhs2, {d2: Symbol(d1), prime(d2, 1): Symbol(prime(d1, 1))})
        same = symexpr.is_identically_zero(renamed - rhs1, samples=16)
        if not same.is_zero:
            raise NumVerifyError(
                "map produces 1 dependent value but the target pair is coupled")
        scalar_complex = True
        tdep = (d1,)
    elif len(deps) != len(tdep):
        raise NumVerifyError(
            f"map produces {len(deps)} dependent values, target has {len(tdep)}")
    tx = target.independent[0]
    arg_names = [tx, *tdep]
    if target.kind == "ode2":
        arg_names += [prime(n, 1) for n in tdep]
    rhs_list = [target.explicit_rhs()[0]] if scalar_complex else list(target.explicit_rhs())
    fns = [compile_expr(r, arg_names) for r in rhs_list]
    dep_series = list(deps.values())
    worst_abs = 0.0
    worst_rel = 0.0
    for seg in segments:
        series = [seg.groups[n] for n in seg.groups]
        mids = slice(1, -1)
        chi_m = seg.chi[mids]
        vals = [u[mids] for u in series]
        d1s = [_central_first(seg.chi, u) for u in series]
        if target.kind == "ode1":
            lhs = d1s
        else:
            lhs = [2 * _second_divided_differences(seg.chi, u) for u in series]
        for k in range(chi_m.size):
            args = [chi_m[k]] + [v[k] for v in vals]
            if target.kind == "ode2":
                args += [d[k] for d in d1s]
            for eq_idx, fn in enumerate(fns):
                rhs_v = fn(*args)
                r = abs(lhs[eq_idx][k] - rhs_v)
                worst_abs = max(worst_abs, r)
                worst_rel = max(worst_rel, r / (1.0 + abs(rhs_v)))
    metrics["max_residual_abs"] = worst_abs
    metrics["max_residual_rel"] = worst_rel
    const_dev = max(
        float(np.max(np.abs(seg.groups[n] - seg.groups[n][0])))
        for seg in segments for n in seg.groups
    )
    metrics["max_deviation_from_constant"] = const_dev
    passed = worst_rel <= tol
    return TransformOdeReport("system", tuple(segments), metrics, passed, tol)


# ---------------------------------------------------------------------------
# Newton inversion and PDE transformation checks
# ---------------------------------------------------------------------------

def newton_invert(
    plane_map: tuple[Expr, Expr],
    variables: tuple[str, str],
    targets: Sequence[tuple[float, float]],
    seed_point: tuple[float, float],
    tol: float = 1e-12,
    max_iter: int = 50,
) -> list[tuple[float, float]]:
    """Damped Newton inversion of a planar map, warm-started point to point.

    Solves (X(x,y), Y(x,y)) = target for each target; convergence is declared
    when the update norm drops below ``tol``.  Raises
    :class:`SingularJacobian` on a vanishing Jacobian determinant and
    :class:`NoConvergence` after ``max_iter`` iterations.
    """
    Xe, Ye = (normalize(symexpr.as_expr(e)) for e in plane_map)
    fX = compile_expr(Xe, variables)
    fY = compile_expr(Ye, variables)
    j = [
        compile_expr(differentiate(Xe, variables[0]), variables),
        compile_expr(differentiate(Xe, variables[1]), variables),
        compile_expr(differentiate(Ye, variables[0]), variables),
        compile_expr(differentiate(Ye, variables[1]), variables),
    ]
    out: list[tuple[float, float]] = []
    guess = (float(seed_point[0]), float(seed_point[1]))
    for tx, ty in targets:
        x, y = guess
        converged = False
        rx = fX(x, y).real - tx
        ry = fY(x, y).real - ty
        for _ in range(max_iter):
            a, b, c, d = (fn(x, y).real for fn in j)
            det = a * d - b * c
            scale = max(abs(a), abs(b), abs(c), abs(d), 1.0)
            if abs(det) < 1e-14 * scale * scale:
                raise SingularJacobian(f"Jacobian degenerate near {(x, y)}")
            dx = (-rx * d + ry * b) / det
            dy = (-a * ry + c * rx) / det
            if math.hypot(dx, dy) < tol:
                x, y = x + dx, y + dy
                converged = True
                break
            lam = 1.0
            r0 = math.hypot(rx, ry)
            for _ in range(24):
                xn, yn = x + lam * dx, y + lam * dy
                try:
                    rxn = fX(xn, yn).real - tx
                    ryn = fY(xn, yn).real - ty
                except DomainError:
                    lam /= 2
                    continue
                if math.hypot(rxn, ryn) <= (1 - 0.25 * lam) * r0:
                    break
                lam /= 2
            else:
                raise NoConvergence(f"damping failed for target {(tx, ty)}")
            x, y, rx, ry = xn, yn, rxn, ryn
            if lam * math.hypot(dx, dy) < tol:
                converged = True
                break
        if not converged:
            raise NoConvergence(f"no convergence for target {(tx, ty)}")
        out.append((x, y))
        guess = (x, y)
    return out


@dataclass(frozen=True)
class TransformPdeReport:
    source_residual: ResidualReport
    target_residual: ResidualReport
    spacing: float
    truncation_estimate: float
    passed: bool
    tolerance: float


def _fd_tables(F: np.ndarray, d: float) -> dict[str, np.ndarray]:
    """Central first/second differences of a grid field; interior values."""
    c = F[1:-1, 1:-1]
    return {
        "x": (F[2:, 1:-1] - F[:-2, 1:-1]) / (2 * d),
        "y": (F[1:-1, 2:] - F[1:-1, :-2]) / (2 * d),
        "xx": (F[2:, 1:-1] - 2 * c + F[:-2, 1:-1]) / (d * d),
        "yy": (F[1:-1, 2:] - 2 * c + F[1:-1, :-2]) / (d * d),
        "xy": (F[2:, 2:] - F[2:, :-2] - F[:-2, 2:] + F[:-2, :-2]) / (4 * d * d),
    }


def _target_residual_on_grid(
    target: SystemSpec,
    field_maps,   # callable (list of (X, Y)) -> list of (F, G) real values
    target_box: tuple[tuple[float, float], tuple[float, float]],
    spacing: float,
    tol: float,
) -> ResidualReport:
    X0, X1 = target_box[0]
    Y0, Y1 = target_box[1]
    nx = max(4, int(round((X1 - X0) / spacing)))
    xs = np.linspace(X0, X1, nx + 1)
    d = xs[1] - xs[0]
    ny = max(4, int(round((Y1 - Y0) / d)))
    ys = np.linspace(Y0, Y0 + ny * d, ny + 1)  # equal spacing on both axes
    nodes = [(float(Xv), float(Yv)) for Xv in xs for Yv in ys]
    vals = field_maps(nodes)
    Fv = np.array([v[0] for v in vals]).reshape(xs.size, ys.size)
    Gv = np.array([v[1] for v in vals]).reshape(xs.size, ys.size)
    ft = _fd_tables(Fv, d)
    gt = _fd_tables(Gv, d)
    x, y = target.independent
    f, g = target.dependent
    env = {
        x: np.broadcast_to(xs[1:-1, None], ft["x"].shape),
        y: np.broadcast_to(ys[None, 1:-1], ft["x"].shape),
        f: Fv[1:-1, 1:-1],
        g: Gv[1:-1, 1:-1],
        partial(f, x): ft["x"], partial(f, y): ft["y"],
        partial(g, x): gt["x"], partial(g, y): gt["y"],
    }
    if target.kind == "pde2":
        env.update({
            partial(f, x + x): ft["xx"], partial(f, y + y): ft["yy"],
            partial(f, x + y): ft["xy"],
            partial(g, x + x): gt["xx"], partial(g, y + y): gt["yy"],
            partial(g, x + y): gt["xy"],
        })
    hl = target.hl_substitution()
    eqs = []
    for k, eq in enumerate(target.equations):
        r = substitute(eq.lhs - eq.rhs, hl)
        names = sorted(free_symbols(r))
        unknown = [n for n in names if n not in env]
        if unknown:
            raise NumVerifyError(f"target residual uses unavailable symbols {unknown}")
        fn = compile_expr(r, tuple(names))
        flat = [env[n].ravel() for n in names]
        vals = np.array([abs(fn(*args)) for args in zip(*flat)])
        eqs.append((f"eq{k + 1}", float(np.max(vals)) if vals.size else 0.0))
    passed = all(v <= tol for _, v in eqs)
    return ResidualReport(
        equations=tuple(eqs), excluded=(), passed=passed, tolerance=tol,
        grid=f"{xs.size}x{ys.size} target grid, spacing {d:g}")


def verify_transformation_pde(
    source: SystemSpec,
    transform: PointTransformation,
    target: SystemSpec,
    sol,
    box: tuple[tuple[float, float], tuple[float, float]],
    target_box: tuple[tuple[float, float], tuple[float, float]] | None = None,
    tol: float = 1e-6,
    source_tol: float = 1e-8,
    constants=None,
    initial_spacing: float | None = None,
) -> TransformPdeReport:
    """Verify a PDE point transformation on a concrete solution.

    The solution is first residual-checked against the source system on
    ``box``.  The transformed fields F, G are then sampled on a regular
    (X, Y) grid inside the image (``target_box``; estimated from the mapped
    box when omitted) via damped Newton inversion of the planar part, and the
    target equations are checked with second-order central differences.  The
    spacing is refined until a two-spacing Richardson comparison estimates
    the truncation error below tol/10.
    """
    if source.kind not in ("pde1", "pde2") or target.kind not in ("pde1", "pde2"):
        raise NumVerifyError("verify_transformation_pde needs PDE systems")
    src_report = residual_pde(source, sol, box, tol=source_tol, constants=constants)
    if not src_report.passed:
        raise NumVerifyError(
            f"candidate solution fails the source system: {src_report.equations}")
    exprs = _solution_exprs(source, sol, constants)
    x, y = source.independent
    dep_binding = {n: exprs[n] for n in source.dependent}

    def composed(name: str) -> Expr:
        return substitute(transform.exprs[name], dep_binding)

    ti, td = transform.grouped_targets()
    if len(transform.target_independent) != 2 or len(transform.target_dependent) != 2:
        raise NumVerifyError("PDE maps need two independent and two dependent targets")
    Xn, Yn = transform.target_independent
    Fn, Gn = transform.target_dependent
    Xe, Ye = composed(Xn), composed(Yn)
    Fe, Ge = composed(Fn), composed(Gn)
    del ti, td

    if target_box is None:
        (x0, x1), (y0, y1) = box
        gx = np.linspace(x0, x1, 21)
        gy = np.linspace(y0, y1, 21)
        fX = compile_expr(Xe, (x, y))
        fY = compile_expr(Ye, (x, y))
        pts = np.array([[fX(a, b).real, fY(a, b).real] for a in gx for b in gy])
        loX, hiX = np.quantile(pts[:, 0], [0.3, 0.7])
        loY, hiY = np.quantile(pts[:, 1], [0.3, 0.7])
        target_box = ((float(loX), float(hiX)), (float(loY), float(hiY)))

    fF = compile_expr(Fe, (x, y))
    fG = compile_expr(Ge, (x, y))
    seed = ((box[0][0] + box[0][1]) / 2, (box[1][0] + box[1][1]) / 2)

    def field_maps(nodes: list[tuple[float, float]]) -> list[tuple[float, float]]:
        sources = newton_invert((Xe, Ye), (x, y), nodes, seed)
        return [(fF(*s).real, fG(*s).real) for s in sources]

    extent = min(target_box[0][1] - target_box[0][0],
                 target_box[1][1] - target_box[1][0])
    d = initial_spacing if initial_spacing is not None else extent / 16
    last = None
    trunc = float("inf")
    for _ in range(3):
        r1 = _target_residual_on_grid(target, field_maps, target_box, d, tol)
        r2 = _target_residual_on_grid(target, field_maps, target_box, d / 2, tol)
        trunc = abs(r1.max_residual - r2.max_residual) * 4 / 3
        last = r2
        d = d / 2
        if trunc < tol / 10:
            break
    assert last is not None
    passed = last.passed and src_report.passed
    return TransformPdeReport(
        source_residual=src_report, target_residual=last, spacing=d,
        truncation_estimate=trunc, passed=passed, tolerance=tol)
