"""Deterministic JSON/CSV encoding of the library's value types.

Floats are written with 17 significant digits, enough to round-trip any
IEEE-754 double exactly; dictionaries keep insertion order.  Given equal
inputs the emitted bytes are therefore identical, which the benchmark's
reproducibility guarantees rely on.
"""

from __future__ import annotations

import io
import json
import math

import numpy as np

from .bench import AggregateReport, TimingStats, TrialSpec
from .geometry import BearingVector, Correspondence, P3pProblem, Pose, Solution
from .solver import SolverConfig

__all__ = [
    "dumps",
    "problem_to_json",
    "problem_from_json",
    "solutions_to_json",
    "report_to_dict",
    "report_to_json",
    "report_to_csv",
    "timing_to_dict",
    "timing_to_json",
    "timing_to_csv",
    "ablation_to_json",
    "ablation_to_csv",
]

# Table row order used by the CSV output and the "counts" JSON section.
CATEGORY_ROWS = (
    ("Valid", "valid"),
    ("Unique", "unique"),
    ("Duplicates", "duplicates"),
    ("Good", "good"),
    ("No solution", "no_solution"),
    ("Ground truth", "ground_truth"),
    ("Incorrect", "incorrect"),
)


def _write(obj, out: io.StringIO, indent: int | None, level: int) -> None:
    if obj is None:
        out.write("null")
    elif obj is True:
        out.write("true")
    elif obj is False:
        out.write("false")
    elif isinstance(obj, (int, np.integer)) and not isinstance(obj, bool):
        out.write(repr(int(obj)))
    elif isinstance(obj, (float, np.floating)):
        x = float(obj)
        if not math.isfinite(x):
            raise ValueError(f"non-finite number {x!r} has no JSON representation")
        out.write(format(x, ".17g"))
    elif isinstance(obj, str):
        out.write(json.dumps(obj))
    elif isinstance(obj, dict):
        _write_container(obj.items(), out, indent, level, "{", "}", dict_items=True)
    elif isinstance(obj, (list, tuple)):
        _write_container(obj, out, indent, level, "[", "]", dict_items=False)
    elif isinstance(obj, np.ndarray):
        _write(obj.tolist(), out, indent, level)
    else:
        raise TypeError(f"cannot encode {type(obj).__name__} as JSON")


def _write_container(items, out, indent, level, open_ch, close_ch, dict_items) -> None:
    items = list(items)
    if not items:
        out.write(open_ch + close_ch)
        return
    out.write(open_ch)
    pad = "" if indent is None else "\n" + " " * (indent * (level + 1))
    closing = "" if indent is None else "\n" + " " * (indent * level)
    for k, item in enumerate(items):
        if k:
            out.write("," if indent is None else ",")
        out.write(pad)
        if dict_items:
            key, value = item
            if not isinstance(key, str):
                raise TypeError("JSON object keys must be strings")
            out.write(json.dumps(key))
            out.write(": " if indent is not None else ":")
            _write(value, out, indent, level + 1)
        else:
            _write(item, out, indent, level + 1)
    out.write(closing)
    out.write(close_ch)


def dumps(obj, indent: int | None = 2) -> str:
    """Serialize ``obj`` deterministically; floats carry 17 significant digits."""
    out = io.StringIO()
    _write(obj, out, indent, 0)
    return out.getvalue()


def problem_to_dict(problem: P3pProblem) -> dict:
    return {
        "correspondences": [
            {"bearing": c.bearing.dir, "point": c.point} for c in problem.corr
        ]
    }


def problem_to_json(problem: P3pProblem, indent: int | None = 2) -> str:
    return dumps(problem_to_dict(problem), indent=indent)


def problem_from_json(text: str) -> P3pProblem:
    """Parse a problem document; bearings are normalized on load."""
    doc = json.loads(text)
    if not isinstance(doc, dict) or "correspondences" not in doc:
        raise ValueError('expected an object with a "correspondences" field')
    entries = doc["correspondences"]
    if not isinstance(entries, list) or len(entries) != 3:
        raise ValueError("correspondences must be an array of exactly 3 entries")
    corr = []
    for k, entry in enumerate(entries):
        if not isinstance(entry, dict) or "bearing" not in entry or "point" not in entry:
            raise ValueError(f'correspondence {k} needs "bearing" and "point" fields')
        corr.append(Correspondence(BearingVector(entry["bearing"]), entry["point"]))
    return P3pProblem(tuple(corr))


def solution_to_dict(solution: Solution) -> dict:
    return {
        "R": solution.pose.R,
        "t": solution.pose.t,
        "depths": solution.depths,
    }


def solutions_to_json(solutions, indent: int | None = 2) -> str:
    return dumps([solution_to_dict(s) for s in solutions], indent=indent)


def _spec_to_dict(spec: TrialSpec) -> dict:
    return {
        "seed": spec.seed,
        "depth_min": spec.depth_min,
        "depth_max": spec.depth_max,
        "image_range": spec.image_range,
    }


def _config_to_dict(config: SolverConfig) -> dict:
    return {
        "gn_iterations": config.gn_iterations,
        "denom_epsilon": config.denom_epsilon,
        "force_variant": config.force_variant,
        "reindex_enabled": config.reindex_enabled,
        "d3_source": config.d3_source,
    }


def timing_to_dict(stats: TimingStats) -> dict:
    return {
        "trials": stats.trials,
        "repeats": stats.repeats,
        "mean_ns": stats.mean_ns,
        "median_ns": stats.median_ns,
        "min_ns": stats.min_ns,
        "max_ns": stats.max_ns,
        "clock_overhead_ns": stats.clock_overhead_ns,
        "checksum": stats.checksum,
    }


def timing_to_json(stats: TimingStats, indent: int | None = 2) -> str:
    return dumps(timing_to_dict(stats), indent=indent)


def timing_to_csv(stats: TimingStats) -> str:
    d = timing_to_dict(stats)
    lines = ["stat,value"]
    for key, value in d.items():
        lines.append(f"{key},{dumps(value, indent=None)}")
    return "\n".join(lines) + "\n"


def report_to_dict(report: AggregateReport) -> dict:
    counts = {json_key: getattr(report, json_key) for _, json_key in CATEGORY_ROWS}
    doc = {
        "trials": report.trials,
        "generation": _spec_to_dict(report.spec),
        "config": _config_to_dict(report.config),
        "counts": counts,
        "reconciliation": {
            "incorrect_including_duplicates": report.incorrect_including_duplicates,
            "ground_truth_solutions": report.ground_truth_solutions,
            "degenerate_trials": report.degenerate_trials,
        },
        "pose_error": (
            None
            if report.mean_xi is None
            else {
                "mean": report.mean_xi,
                "median": report.median_xi,
                "max": report.max_xi,
                "trials": report.ground_truth,
            }
        ),
    }
    if report.timing is not None:
        doc["timing_ns"] = timing_to_dict(report.timing)
    return doc


def report_to_json(report: AggregateReport, indent: int | None = 2) -> str:
    return dumps(report_to_dict(report), indent=indent)


def report_to_csv(report: AggregateReport) -> str:
    lines = ["category,count"]
    for label, json_key in CATEGORY_ROWS:
        lines.append(f"{label},{getattr(report, json_key)}")
    return "\n".join(lines) + "\n"


def ablation_to_json(reports: dict[str, AggregateReport], indent: int | None = 2) -> str:
    doc = {
        "columns": [
            {"name": name, "report": report_to_dict(rep)} for name, rep in reports.items()
        ]
    }
    return dumps(doc, indent=indent)


def ablation_to_csv(reports: dict[str, AggregateReport]) -> str:
    names = list(reports)
    lines = ["category," + ",".join(names)]
    for label, json_key in CATEGORY_ROWS:
        values = ",".join(str(getattr(reports[name], json_key)) for name in names)
        lines.append(f"{label},{values}")
    return "\n".join(lines) + "\n"
