"""Bundled fixture corpus and its runner.

Fixtures live in ``cxlin/fixtures``: equation systems (``.eqs``), point
transformations (``.map``), closed-form solutions (``.sol``), and a
``manifest.json`` that declares, for every named fixture, which checks to run
and which outcomes are expected.  The corpus is data: the runner interprets
the manifest, so expected verdicts are reviewable without reading code.

Fixtures flagged ``"warn": true`` document known discrepancies between
printed formulas and machine-derived ones (the runner records each
candidate's outcome); they report WARN when outcomes match the manifest and
never turn the corpus red on the discrepancy itself.
"""

from __future__ import annotations

import importlib.resources
import json
from dataclasses import dataclass, field
from fractions import Fraction

import numpy as np

from cxlin import lincheck, numverify, reporting
from cxlin.eqdsl import parse_expression, parse_solution, parse_system, parse_transformation
from cxlin.symmetry import VectorField, check_theorem2, lie_bracket
from cxlin.symexpr import is_identically_zero

__all__ = ["FixtureResult", "run_fixture", "run_corpus", "fixture_names", "load_manifest"]


def _fixture_dir():
    return importlib.resources.files("cxlin") / "fixtures"


def load_manifest() -> dict:
    with (_fixture_dir() / "manifest.json").open("r", encoding="utf-8") as fh:
        return json.load(fh)


def read_fixture(name: str) -> str:
    return (_fixture_dir() / name).read_text(encoding="utf-8")


def fixture_names() -> list[str]:
    return sorted(load_manifest()["fixtures"])


@dataclass
class FixtureResult:
    name: str
    status: str                    # "pass" | "warn" | "fail"
    checks: list[dict] = field(default_factory=list)
    notes: str = ""
    inputs: dict[str, bytes] = field(default_factory=dict)

    def as_dict(self) -> dict:
        return {
            "name": self.name,
            "status": self.status,
            "notes": self.notes,
            "checks": self.checks,
        }


def _load_system(name: str, cache: dict):
    if name not in cache:
        cache[name] = parse_system(read_fixture(name))
    return cache[name]


def _grid(spec) -> np.ndarray:
    a, b, n = spec
    return np.linspace(float(a), float(b), int(n))


def _box(spec) -> tuple[tuple[float, float], tuple[float, float]]:
    (x0, x1), (y0, y1) = spec
    return ((float(x0), float(x1)), (float(y0), float(y1)))


def _constants(spec: dict | None) -> dict[str, Fraction] | None:
    if not spec:
        return None
    return {k: Fraction(str(v)) for k, v in spec.items()}


def _field(variables, components: dict) -> VectorField:
    exprs = {v: parse_expression(s, variables) for v, s in components.items()}
    return VectorField.from_dict(variables, exprs)


def _run_check(check: dict, seed: int, cache: dict, inputs: dict[str, bytes]) -> dict:
    kind = check["type"]
    out: dict = {"type": kind}
    if "name" in check:
        out["name"] = check["name"]

    def note_input(fname: str):
        inputs[fname] = read_fixture(fname).encode("utf-8")

    if kind == "conditions":
        note_input(check["system"])
        sys = _load_system(check["system"], cache)
        samples = int(check.get("samples", 64))
        tol = float(check.get("tol", 1e-9))
        if sys.kind == "ode2":
            coeffs = lincheck.extract_ode_coeffs(sys, samples=samples, tol=tol, seed=seed)
            printed = lincheck.check_ode_conditions(coeffs, samples=samples, tol=tol, seed=seed)
        else:
            coeffs = lincheck.extract_pde_coeffs(sys, samples=samples, tol=tol, seed=seed)
            printed = lincheck.check_pde_conditions(coeffs, samples=samples, tol=tol, seed=seed)
        complex_ = lincheck.check_coefficients_scalar_lie(coeffs, samples=samples,
                                                          tol=tol, seed=seed)
        out["printed"] = reporting.condition_report(printed)
        out["complex"] = reporting.condition_report(complex_)
        verdict = complex_.overall
        agree = printed.overall == complex_.overall
        out["routes_agree"] = agree
        out["verdict"] = verdict
        out["ok"] = agree and verdict == check["expect"]
        return out

    if kind == "solution-residual":
        note_input(check["system"])
        note_input(check["solution"])
        sys = _load_system(check["system"], cache)
        sol = parse_solution(read_fixture(check["solution"]))
        tol = float(check.get("tol", 1e-8))
        constants = _constants(check.get("constants"))
        if sys.kind.startswith("ode"):
            rep = numverify.residual_ode(sys, sol, _grid(check["grid"]), tol=tol,
                                         constants=constants)
        else:
            rep = numverify.residual_pde(sys, sol, _box(check["box"]),
                                         resolution=int(check.get("resolution", 21)),
                                         tol=tol, constants=constants)
        out["report"] = reporting.residual_report(rep)
        out["ok"] = rep.passed == bool(check.get("expect_pass", True))
        return out

    if kind == "transform-ode":
        note_input(check["system"])
        note_input(check["map"])
        sys = _load_system(check["system"], cache)
        tmap = parse_transformation(read_fixture(check["map"]))
        target = check["target"]
        if target != "free":
            note_input(target)
            target = _load_system(target, cache)
        traj = numverify.rk4_integrate(sys, check["init"], tuple(check["interval"]),
                                       float(check["step"]))
        rep = numverify.verify_transformation_ode(
            sys, tmap, target, traj, tol=float(check.get("tol", 1e-6)),
            max_nodes=check.get("max_nodes"))
        out["report"] = reporting.transform_ode_report(rep)
        ok = rep.passed == bool(check.get("expect_pass", True))
        for metric, bound in check.get("metrics_max", {}).items():
            ok = ok and rep.metrics[metric] <= float(bound)
        for metric, bound in check.get("metrics_min", {}).items():
            ok = ok and rep.metrics[metric] >= float(bound)
        out["ok"] = ok
        return out

    if kind == "transform-pde":
        for key in ("system", "map", "target", "solution"):
            note_input(check[key])
        sys = _load_system(check["system"], cache)
        tmap = parse_transformation(read_fixture(check["map"]))
        target = _load_system(check["target"], cache)
        sol = parse_solution(read_fixture(check["solution"]))
        try:
            rep = numverify.verify_transformation_pde(
                sys, tmap, target, sol, _box(check["box"]),
                target_box=_box(check["target_box"]) if "target_box" in check else None,
                tol=float(check.get("tol", 1e-6)),
                source_tol=float(check.get("source_tol", 1e-8)),
                constants=_constants(check.get("constants")))
            out["report"] = reporting.transform_pde_report(rep)
            passed = rep.passed
        except numverify.NumVerifyError as exc:
            out["error"] = f"{type(exc).__name__}: {exc}"
            passed = False
        out["ok"] = passed == bool(check.get("expect_pass", True))
        return out

    if kind == "theorem2":
        variables = tuple(check["vars"])
        fields = {k: _field(variables, v) for k, v in check["fields"].items()}
        rep = check_theorem2(fields["X1"], fields["Y1"], fields["X2"], fields["Y2"],
                             seed=seed)
        out["report"] = reporting.theorem2_report(rep)
        expect = check["expect"]
        ok = rep.overall == expect["overall"]
        if "proportionality" in expect:
            ok = ok and rep.proportionality == expect["proportionality"]
        if "commutators_zero" in expect:
            comm = all(v.status == "zero" for v in rep.commutator_verdicts)
            ok = ok and comm == expect["commutators_zero"]
        out["ok"] = ok
        return out

    if kind == "bracket":
        variables = tuple(check["vars"])
        v = _field(variables, check["v"])
        w = _field(variables, check["w"])
        b = lie_bracket(v, w)
        want = _field(variables, check["equals"])
        diff = b - want
        ok = all(
            is_identically_zero(c, list(variables), seed=seed).is_zero
            for c in diff.components
        )
        out["bracket"] = str(b)
        out["ok"] = ok
        return out

    if kind == "discrepancy":
        rep = lincheck.derive_real_conditions(check["kind"])
        out["report"] = reporting.discrepancy_report(rep)
        n_mismatch = len(rep.mismatched_terms())
        scales = [str(c.scale) for c in rep.comparisons]
        ok = n_mismatch == int(check["expect_mismatches"])
        if "expect_scales" in check:
            ok = ok and scales == list(check["expect_scales"])
        out["ok"] = ok
        return out

    if kind == "candidates":
        results = []
        all_ok = True
        for sub in check["checks"]:
            r = _run_check(sub, seed, cache, inputs)
            results.append(r)
            all_ok = all_ok and r["ok"]
        out["candidates"] = results
        out["ok"] = all_ok
        return out

    raise ValueError(f"unknown check type {kind!r}")


def run_fixture(name: str, spec: dict, seed: int) -> FixtureResult:
    cache: dict = {}
    inputs: dict[str, bytes] = {}
    checks = []
    ok = True
    for check in spec["checks"]:
        try:
            r = _run_check(check, seed, cache, inputs)
        except Exception as exc:  # noqa: BLE001 - surfaced in the report
            r = {"type": check.get("type", "?"), "error": f"{type(exc).__name__}: {exc}",
                 "ok": False}
        checks.append(r)
        ok = ok and r["ok"]
    if not ok:
        status = "fail"
    elif spec.get("warn"):
        status = "warn"
    else:
        status = "pass"
    return FixtureResult(name=name, status=status, checks=checks,
                         notes=spec.get("notes", ""), inputs=inputs)


def run_corpus(subset: str = "all", seed: int = 0) -> list[FixtureResult]:
    manifest = load_manifest()
    fixtures = manifest["fixtures"]
    if subset != "all":
        if subset not in fixtures:
            raise KeyError(f"unknown fixture {subset!r}; known: {', '.join(sorted(fixtures))}")
        names = [subset]
    else:
        names = sorted(fixtures)
    return [run_fixture(n, fixtures[n], seed) for n in names]
