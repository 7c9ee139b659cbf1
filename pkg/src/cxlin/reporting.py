"""Machine-readable report assembly.

All reports serialize into one top-level JSON object with ``"schema": 1``.
Serialized output is deterministic for fixed inputs and seed: keys are
sorted, floats are rendered as decimal strings with %.17g (so locale and
float-repr quirks cannot leak in), and wall time is never part of the
payload (the CLI prints timing to stderr instead).
"""

from __future__ import annotations

import hashlib
import json
from typing import Any

from cxlin.lincheck import ConditionReport, DiscrepancyReport
from cxlin.numverify import ResidualReport, TransformOdeReport, TransformPdeReport
from cxlin.symexpr import to_str
from cxlin.symmetry import Theorem2Report

SCHEMA_VERSION = 1


def fnum(v: float | complex | None) -> str | None:
    """Decimal-string rendering used for every numeric field."""
    if v is None:
        return None
    if isinstance(v, complex):
        if v.imag == 0:
            return f"{v.real:.17g}"
        return f"{v.real:.17g}{v.imag:+.17g}i"
    return f"{float(v):.17g}"


def digest(data: bytes) -> str:
    return hashlib.sha256(data).hexdigest()


def _point(pt: dict | None) -> dict | None:
    if pt is None:
        return None
    return {k: fnum(v) for k, v in sorted(pt.items())}


def condition_report(rep: ConditionReport, include_residuals: bool = False) -> dict:
    out: dict[str, Any] = {
        "route": rep.route,
        "overall": rep.overall,
        "conditions": [
            {
                "name": e.name,
                "verdict": e.verdict.status,
                "max_magnitude": fnum(e.max_magnitude),
            }
            for e in rep.entries
        ],
    }
    if rep.variant:
        out["variant"] = rep.variant
    if rep.witness:
        out["witness"] = {
            "condition": rep.witness["condition"],
            "point": _point(rep.witness["point"]),
            "value": fnum(rep.witness["value"]),
        }
    if include_residuals:
        for entry, slot in zip(rep.entries, out["conditions"]):
            slot["residual"] = to_str(entry.residual)
    return out


def residual_report(rep: ResidualReport) -> dict:
    out: dict[str, Any] = {
        "grid": rep.grid,
        "tolerance": fnum(rep.tolerance),
        "passed": rep.passed,
        "equations": [{"name": n, "max_residual": fnum(v)} for n, v in rep.equations],
        "excluded_points": len(rep.excluded),
    }
    if rep.cr_max is not None:
        out["cauchy_riemann_max"] = fnum(rep.cr_max)
    return out


def transform_ode_report(rep: TransformOdeReport) -> dict:
    return {
        "target": rep.target_kind,
        "segments": len(rep.segments),
        "tolerance": fnum(rep.tolerance),
        "passed": rep.passed,
        "metrics": {k: fnum(v) for k, v in sorted(rep.metrics.items())},
    }


def transform_pde_report(rep: TransformPdeReport) -> dict:
    return {
        "source_residual": residual_report(rep.source_residual),
        "target_residual": residual_report(rep.target_residual),
        "spacing": fnum(rep.spacing),
        "truncation_estimate": fnum(rep.truncation_estimate),
        "tolerance": fnum(rep.tolerance),
        "passed": rep.passed,
    }


def theorem2_report(rep: Theorem2Report) -> dict:
    return {
        "proportionality": rep.proportionality,
        "rho1": to_str(rep.rho1) if rep.rho1 is not None else None,
        "rho2": to_str(rep.rho2) if rep.rho2 is not None else None,
        "nonconstant": rep.nonconstant,
        "inconsistency": rep.inconsistency,
        "commutator_verdicts": [v.status for v in rep.commutator_verdicts],
        "overall": rep.overall,
        "narrative": rep.narrative,
    }


def discrepancy_report(rep: DiscrepancyReport) -> dict:
    return {
        "kind": rep.kind,
        "variant": rep.variant,
        "all_agree": rep.all_agree,
        "conditions": [
            {
                "index": c.index + 1,
                "scale": str(c.scale) if c.scale is not None else None,
                "matched_terms": c.matched,
                "mismatches": [
                    {
                        "monomial": m.monomial,
                        "printed": str(m.printed),
                        "derived_scaled": str(m.derived_scaled),
                    }
                    for m in c.mismatches
                ],
            }
            for c in rep.comparisons
        ],
    }


def analysis_report(command: str, inputs: dict[str, bytes], seed: int,
                    options: dict, stages: list[dict], overall: str) -> dict:
    from cxlin import __version__

    return {
        "schema": SCHEMA_VERSION,
        "tool": f"cxlin {__version__}",
        "command": command,
        "inputs": {
            name: {"sha256": digest(data)} for name, data in sorted(inputs.items())
        },
        "seed": seed,
        "options": {k: options[k] for k in sorted(options)},
        "stages": stages,
        "overall": overall,
    }


def dump(report: dict) -> str:
    return json.dumps(report, sort_keys=True, indent=2, ensure_ascii=True) + "\n"
