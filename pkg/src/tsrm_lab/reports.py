"""Deterministic experiment reports.

A report is a plain data bundle: config echo, reference constants,
estimates, test statistics, counters, named pass/fail checks, and
optional histograms.  Serialization is canonical (sorted keys, shortest
float round-trip, no timestamps or paths), so re-running the same
experiment with the same config yields byte-identical files.
"""

from __future__ import annotations

import csv
import json
import os
from dataclasses import dataclass, field

import numpy as np


@dataclass
class ExperimentReport:
    kind: str
    config: dict
    constants: dict = field(default_factory=dict)
    estimates: dict = field(default_factory=dict)
    tests: dict = field(default_factory=dict)
    counts: dict = field(default_factory=dict)
    checks: dict = field(default_factory=dict)
    histograms: dict = field(default_factory=dict)
    notes: list = field(default_factory=list)

    @property
    def passed(self) -> bool:
        return all(bool(v) for v in self.checks.values())

    def to_json_obj(self) -> dict:
        return {
            "kind": self.kind,
            "passed": self.passed,
            "config": self.config,
            "constants": self.constants,
            "estimates": self.estimates,
            "tests": self.tests,
            "counts": self.counts,
            "checks": self.checks,
            "histograms": self.histograms,
            "notes": self.notes,
        }

    def to_json_bytes(self) -> bytes:
        text = json.dumps(self.to_json_obj(), sort_keys=True, indent=1,
                          separators=(",", ": "))
        return (text + "\n").encode("ascii")

    def to_text(self) -> str:
        lines = [f"experiment: {self.kind}",
                 f"result: {'PASS' if self.passed else 'FAIL'}"]
        for section in ("config", "constants", "estimates", "tests",
                        "counts"):
            data = getattr(self, section)
            if not data:
                continue
            lines.append(f"{section}:")
            for key in sorted(data):
                lines.append(f"  {key}: {_fmt(data[key])}")
        if self.checks:
            lines.append("checks:")
            for key in sorted(self.checks):
                verdict = "pass" if self.checks[key] else "FAIL"
                lines.append(f"  {key}: {verdict}")
        for note in self.notes:
            lines.append(f"note: {note}")
        return "\n".join(lines) + "\n"

    def write(self, outdir, basename: str, json_out: bool = True,
              text_out: bool = True) -> list:
        """Write <basename>.json / <basename>.txt plus histogram CSVs.

        Returns the written paths in a fixed order.
        """
        os.makedirs(outdir, exist_ok=True)
        paths = []
        if json_out:
            jpath = os.path.join(outdir, basename + ".json")
            with open(jpath, "wb") as fh:
                fh.write(self.to_json_bytes())
            paths.append(jpath)
        if text_out:
            tpath = os.path.join(outdir, basename + ".txt")
            with open(tpath, "w") as fh:
                fh.write(self.to_text())
            paths.append(tpath)
        for name, rows in sorted(self.histograms.items()):
            cpath = os.path.join(outdir, f"{basename}_{name}.csv")
            write_histogram_csv(cpath, rows)
            paths.append(cpath)
        return paths


def _fmt(value) -> str:
    if isinstance(value, float):
        return repr(value)
    if isinstance(value, (list, tuple)):
        return "[" + ", ".join(_fmt(v) for v in value) + "]"
    if isinstance(value, dict):
        return "{" + ", ".join(f"{k}: {_fmt(v)}" for k, v in sorted(value.items())) + "}"
    return str(value)


def histogram_rows(values, bins: int, lo: float, hi: float) -> list:
    """Equal-width histogram as JSON-friendly [bin_lo, bin_hi, count] rows."""
    counts, edges = np.histogram(np.asarray(values, dtype=np.float64),
                                 bins=bins, range=(lo, hi))
    return [[float(edges[i]), float(edges[i + 1]), int(counts[i])]
            for i in range(len(counts))]


def write_histogram_csv(path, rows) -> None:
    with open(path, "w", newline="") as fh:
        w = csv.writer(fh)
        w.writerow(["bin_lo", "bin_hi", "count"])
        w.writerows(rows)
