"""Evaluation reports: aggregation, JSON/CSV serialization, text tables."""

from __future__ import annotations

import csv
import json
from dataclasses import dataclass, field
from pathlib import Path

from ..errors import IncompatibleReports

OUTCOMES = ("win", "loss", "tie")
_EPS = 1e-9


@dataclass
class EvalReport:
    dimension: str
    cases: int = 0
    failures: int = 0
    metrics: dict[str, float] = field(default_factory=dict)
    tallies: dict[str, dict[str, int]] = field(default_factory=dict)

    def __post_init__(self) -> None:
        for name, value in self.metrics.items():
            if not -_EPS <= value <= 1 + _EPS:
                raise ValueError(f"metric {name} out of [0, 1]: {value}")
            self.metrics[name] = min(1.0, max(0.0, value))
        for dimension, tally in self.tallies.items():
            for outcome in tally:
                if outcome not in OUTCOMES:
                    raise ValueError(f"unknown outcome {outcome!r} in {dimension}")

    def to_dict(self) -> dict:
        return {
            "dimension": self.dimension,
            "cases": self.cases,
            "failures": self.failures,
            "metrics": dict(self.metrics),
            "tallies": {d: dict(t) for d, t in self.tallies.items()},
        }

    @classmethod
    def from_dict(cls, data: dict) -> "EvalReport":
        return cls(
            dimension=data["dimension"],
            cases=int(data["cases"]),
            failures=int(data.get("failures", 0)),
            metrics={k: float(v) for k, v in data.get("metrics", {}).items()},
            tallies={
                d: {o: int(n) for o, n in t.items()}
                for d, t in data.get("tallies", {}).items()
            },
        )


def aggregate_report(reports: list[EvalReport]) -> EvalReport:
    """Case-count-weighted metric means; tallies and counts summed."""
    if not reports:
        raise ValueError("need at least one report")
    keyed = [r for r in reports if r.metrics]
    key_sets = {tuple(sorted(r.metrics)) for r in keyed}
    if len(key_sets) > 1:
        raise IncompatibleReports(
            "metric key sets differ: " + " vs ".join(map(str, sorted(key_sets)))
        )
    metrics: dict[str, float] = {}
    weight = sum(r.cases for r in keyed)
    if keyed and weight > 0:
        for name in keyed[0].metrics:
            metrics[name] = sum(r.metrics[name] * r.cases for r in keyed) / weight
    tallies: dict[str, dict[str, int]] = {}
    for report in reports:
        for dimension, tally in report.tallies.items():
            slot = tallies.setdefault(dimension, {o: 0 for o in OUTCOMES})
            for outcome, count in tally.items():
                slot[outcome] += count
    dimensions = {r.dimension for r in reports}
    return EvalReport(
        dimension=dimensions.pop() if len(dimensions) == 1 else "combined",
        cases=sum(r.cases for r in reports),
        failures=sum(r.failures for r in reports),
        metrics=metrics,
        tallies=tallies,
    )


def format_table(report: EvalReport) -> str:
    rows = [
        ("dimension", report.dimension),
        ("cases", str(report.cases)),
        ("failures", str(report.failures)),
    ]
    for name in sorted(report.metrics):
        rows.append((name, f"{report.metrics[name]:.4f}"))
    for dimension in sorted(report.tallies):
        tally = report.tallies[dimension]
        rendered = "/".join(
            f"{tally.get(o, 0)}{o[0].upper()}" for o in OUTCOMES
        )
        rows.append((dimension, rendered))
    width = max(len(name) for name, _ in rows)
    return "\n".join(f"{name.ljust(width)}  {value}" for name, value in rows)


def write_report(report: EvalReport, out_dir: str | Path, figures: bool = True) -> list[Path]:
    """Write report.json, report.csv, and (optionally) figure PNGs; returns paths."""
    directory = Path(out_dir)
    directory.mkdir(parents=True, exist_ok=True)
    json_path = directory / "report.json"
    json_path.write_text(json.dumps(report.to_dict(), indent=2, sort_keys=True) + "\n", "utf-8")
    csv_path = directory / "report.csv"
    with open(csv_path, "w", encoding="utf-8", newline="") as fh:
        writer = csv.writer(fh)
        writer.writerow(["kind", "name", "value"])
        writer.writerow(["count", "cases", report.cases])
        writer.writerow(["count", "failures", report.failures])
        for name in sorted(report.metrics):
            writer.writerow(["metric", name, repr(report.metrics[name])])
        for dimension in sorted(report.tallies):
            for outcome in OUTCOMES:
                writer.writerow(
                    ["tally", f"{dimension}:{outcome}", report.tallies[dimension].get(outcome, 0)]
                )
    written = [json_path, csv_path]
    if figures:
        from .figures import render_figures

        written.extend(render_figures(report, directory))
    return written
