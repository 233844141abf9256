"""Deterministic report rendering: CSV, JSON, and markdown summaries.

Same results and seeds must produce byte-identical files: keys are
sorted, floats use shortest round-trip repr, and no timestamps or
machine identifiers enter the output.
"""

from __future__ import annotations

import io
import json
import os

from .config import canonical_json, scenario_to_dict
from .errors import IoFailureError
from .experiments import ClassifyResult, ScanResult
from .walks import EnsembleReport

ENSEMBLE_COLUMNS = (
    "env_index",
    "walk_index",
    "final_site",
    "min_site",
    "max_site",
    "first_return_time",
)

VERDICT_COLUMNS = (
    "env_index",
    "env_seed",
    "label",
    "return_fraction",
    "right_fraction",
    "left_fraction",
    "late_return_fraction",
    "dp_return_prob",
    "dp_right_prob",
    "dp_left_prob",
    "dp_late_return_prob",
    "dp_label",
)


def _fmt(value) -> str:
    if value is None:
        return ""
    if isinstance(value, float):
        return repr(value)
    return str(value)


def ensemble_csv(report: EnsembleReport) -> str:
    """One row per walk; empty first_return_time means no return."""
    out = io.StringIO()
    out.write(",".join(ENSEMBLE_COLUMNS) + "\n")
    for summary in report.per_env:
        res = summary.result
        for w in range(len(res.final_sites)):
            frt = int(res.first_return_times[w])
            out.write(
                f"{summary.env_index},{w},{int(res.final_sites[w])},"
                f"{int(res.min_sites[w])},{int(res.max_sites[w])},"
                f"{frt if frt >= 0 else ''}\n"
            )
    return out.getvalue()


def verdicts_csv(result: ClassifyResult) -> str:
    out = io.StringIO()
    out.write(",".join(VERDICT_COLUMNS) + "\n")
    for v in result.verdicts:
        ev = v.evidence
        row = [
            v.env_index,
            v.env_seed,
            v.label,
            ev.get("return_fraction"),
            ev.get("right_fraction"),
            ev.get("left_fraction"),
            ev.get("late_return_fraction"),
            ev.get("dp_return_prob"),
            ev.get("dp_right_prob"),
            ev.get("dp_left_prob"),
            ev.get("dp_late_return_prob"),
            ev.get("dp_label"),
        ]
        out.write(",".join(_fmt(x) for x in row) + "\n")
    return out.getvalue()


def classify_payload(result: ClassifyResult) -> dict:
    """JSON-native verdict payload; parse(render(x)) round-trips."""
    return {
        "scenario": scenario_to_dict(result.config),
        "aggregate": result.aggregate,
        "dp_checked": result.dp_checked,
        "consistency_ok": result.consistency_ok,
        "mismatches": list(result.mismatches),
        "extras": result.extras,
        "verdicts": [
            {
                "env_index": v.env_index,
                "env_seed": v.env_seed,
                "label": v.label,
                "evidence": v.evidence,
            }
            for v in result.verdicts
        ],
    }


def scan_payload(scan: ScanResult) -> dict:
    payload = classify_payload(scan.classify_result)
    payload["scan"] = {
        "homogeneous": scan.homogeneous,
        "majority_label": scan.majority_label,
        "dissenters": scan.dissenters,
    }
    return payload


def markdown_summary(result: ClassifyResult, scan: ScanResult | None = None) -> str:
    config = result.config
    lines = [
        f"# Scenario: {config.name}",
        "",
        f"- kind: {config.kind}",
        f"- environments: {config.n_envs}, walks per environment: {config.n_walks}, "
        f"horizon: {config.horizon}",
        f"- divergence margin: {config.divergence_margin}, "
        f"return goal: {config.return_goal}",
        f"- master seed: {config.master_seed}",
        "",
        "## Aggregate labels",
        "",
    ]
    for label, frac in sorted(result.aggregate.items()):
        lines.append(f"- {label}: {_fmt(frac)}")
    lines.append("")

    extras = result.extras
    if "certificate" in extras:
        cert = extras["certificate"]
        direction = cert["direction"]
        direction_text = (
            "none" if direction is None else f"{'+' if direction > 0 else '-'}1"
        )
        lines += [
            "## Transience certificate",
            "",
            f"- certificate: {'holds' if cert['holds'] else 'fails'}, "
            f"direction {direction_text}",
            f"- inf_h: {_fmt(cert['inf_h'])}, threshold: {_fmt(cert['threshold'])}, "
            f"exact margin: {cert['exact_margin']}",
            "",
        ]
    if "solomon" in extras and extras["solomon"] is not None:
        sol = extras["solomon"]
        lines += [
            "## Solomon comparator",
            "",
            f"- expectation: {_fmt(sol['expectation'])} -> verdict: {sol['verdict']}",
            "",
        ]
    if "symmetry" in extras:
        sym = extras["symmetry"]
        lines += [
            "## Symmetry",
            "",
            f"- symmetric support: {sym['is_symmetric']}, "
            f"jump bound: {sym['jump_bound']}",
            "",
        ]
    if "hit_before" in extras:
        hb = extras["hit_before"]
        lines += [
            "## Exact split check",
            "",
            f"- P(hit {hb['targets'][1]} before {hb['targets'][0]}) = "
            f"{hb['probability']} = {_fmt(hb['probability_decimal'])}",
            "",
        ]
    if result.dp_checked:
        lines += [
            "## DP cross-checks",
            "",
            "| env | label | MC return | DP return | MC right | DP right |",
            "|----:|-------|----------:|----------:|---------:|---------:|",
        ]
        for v in result.verdicts:
            ev = v.evidence
            lines.append(
                f"| {v.env_index} | {v.label} | {_fmt(ev.get('return_fraction'))} "
                f"| {_fmt(ev.get('dp_return_prob'))} | {_fmt(ev.get('right_fraction'))} "
                f"| {_fmt(ev.get('dp_right_prob'))} |"
            )
        lines.append("")
    if scan is not None:
        lines += [
            "## Zero-one scan",
            "",
            f"- homogeneous: {scan.homogeneous}",
            f"- majority label: {scan.majority_label}",
            f"- dissenters: {len(scan.dissenters)}",
            "",
        ]
        for d in scan.dissenters:
            lines.append(
                f"  - env {d['env_index']} (seed {d['env_seed']}): {d['label']}"
            )
        if scan.dissenters:
            lines.append("")
    return "\n".join(lines)


def write_report(
    result: ClassifyResult,
    out_dir: str,
    formats: tuple[str, ...] = ("csv", "json", "markdown"),
    scan: ScanResult | None = None,
) -> dict[str, str]:
    """Render the requested formats into out_dir; returns paths by format."""
    try:
        os.makedirs(out_dir, exist_ok=True)
        name = result.config.name
        paths = {}
        if "csv" in formats:
            path = os.path.join(out_dir, f"{name}.verdicts.csv")
            with open(path, "w", encoding="utf-8", newline="") as fh:
                fh.write(verdicts_csv(result))
            paths["csv"] = path
        if "json" in formats:
            payload = scan_payload(scan) if scan is not None else classify_payload(result)
            path = os.path.join(out_dir, f"{name}.json")
            with open(path, "w", encoding="utf-8", newline="") as fh:
                fh.write(canonical_json(payload))
            paths["json"] = path
        if "markdown" in formats:
            path = os.path.join(out_dir, f"{name}.md")
            with open(path, "w", encoding="utf-8", newline="") as fh:
                fh.write(markdown_summary(result, scan))
            paths["markdown"] = path
        return paths
    except OSError as err:
        raise IoFailureError(f"cannot write report into {out_dir}: {err}") from err


def write_ensemble_csv(report: EnsembleReport, path: str) -> None:
    try:
        with open(path, "w", encoding="utf-8", newline="") as fh:
            fh.write(ensemble_csv(report))
    except OSError as err:
        raise IoFailureError(f"cannot write {path}: {err}") from err
