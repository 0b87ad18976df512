"""Check reports and deterministic CSV / JSON emission.

Data files never contain timestamps; identical inputs produce byte-identical
CSV.  Numeric cells are printed with 20 significant digits, and log-space
columns are labeled ``log_...``.  Run metadata (including a timestamp) goes
into a separate JSON object.
"""

from __future__ import annotations

import csv
import datetime
import json
from dataclasses import dataclass, field
from pathlib import Path
from typing import Any, Sequence

from mpmath import mp, mpf

CSV_DIGITS = 20


def fmt(x) -> str:
    """Render a number with 20 significant digits (deterministic)."""
    if x is None:
        return ""
    if isinstance(x, bool):
        return "1" if x else "0"
    if isinstance(x, int):
        return str(x)
    if isinstance(x, mpf):
        return mp.nstr(x, CSV_DIGITS, strip_zeros=False)
    if isinstance(x, float):
        return repr(x)
    return str(x)


@dataclass
class LemmaCheckReport:
    """Outcome of one numerical lemma certification.

    ``violations`` empty  <=>  the check passed on the grid it ran on.
    ``rows`` optionally carries per-point data for CSV emission
    (columns: lemma_id, n, j_or_s, ratio, pass).
    """

    lemma_id: str
    n_grid: list[int]
    worst_ratio: mpf
    violations: list[tuple]
    empirical_threshold: int | None = None
    precision: int | None = None
    params: dict[str, Any] = field(default_factory=dict)
    rows: list[tuple] = field(default_factory=list)
    notes: str = ""

    @property
    def passed(self) -> bool:
        return not self.violations

    def summary(self) -> dict[str, Any]:
        return {
            "lemma_id": self.lemma_id,
            "passed": self.passed,
            "worst_ratio": fmt(self.worst_ratio),
            "n_violations": len(self.violations),
            "violations": [list(v) for v in self.violations[:100]],
            "empirical_threshold": self.empirical_threshold,
            "n_grid": self.n_grid if len(self.n_grid) <= 64 else
                      {"min": min(self.n_grid), "max": max(self.n_grid),
                       "count": len(self.n_grid)},
            "precision": self.precision,
            "params": {k: fmt(v) if isinstance(v, (mpf, float)) else v
                       for k, v in self.params.items()},
            "notes": self.notes,
        }


def report_rows_csv(reports: Sequence[LemmaCheckReport], path) -> None:
    """Write per-point rows of several reports as one deterministic CSV."""
    rows = []
    for r in reports:
        for row in r.rows:
            n, j_or_s, ratio, ok = row
            rows.append((r.lemma_id, n, j_or_s, ratio, ok))
    rows.sort(key=lambda t: (t[0], t[1], str(t[2])))
    write_csv(path, ["lemma_id", "n", "j_or_s", "ratio", "pass"], rows)


def write_csv(path, header: Sequence[str], rows: Sequence[Sequence]) -> None:
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    with open(path, "w", newline="") as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(header)
        for row in rows:
            w.writerow([fmt(x) for x in row])


def write_json(path, payload: dict, with_metadata: bool = True) -> None:
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    doc = dict(payload)
    if with_metadata:
        doc["metadata"] = {
            "generated_at": datetime.datetime.now(datetime.timezone.utc)
            .replace(microsecond=0)
            .isoformat(),
        }
    with open(path, "w") as fh:
        json.dump(doc, fh, indent=2, sort_keys=True, default=str)
        fh.write("\n")
