"""Statistic reports and their CSV / JSON / manifest serialization.

CSV is the canonical machine output.  Floats are written with 17 significant
digits so re-runs can be compared byte for byte; timestamps live only in the
run manifest, never in the CSV or the JSON mirror.
"""

from __future__ import annotations

import dataclasses
import json
import math
from dataclasses import dataclass, field
from typing import Any, Mapping

# Canonical column set shared by the interval-statistic subcommands.
CANONICAL_COLUMNS = ("statistic", "E", "scale", "N", "K_or_eta", "estimate", "stderr", "trials", "seed")


@dataclass(frozen=True)
class StatReport:
    """A named statistic evaluated on a grid of inputs.

    ``columns`` names the per-row fields; ``rows`` holds matching tuples.
    ``extra`` carries scalar summaries (fit slopes, flags, counters) that do
    not belong to any single row.
    """

    statistic: str
    columns: tuple[str, ...]
    rows: tuple[tuple, ...]
    trials: int
    seed: int
    extra: Mapping[str, Any] = field(default_factory=dict)

    def column(self, name: str) -> list:
        i = self.columns.index(name)
        return [row[i] for row in self.rows]


def format_value(v) -> str:
    if isinstance(v, bool):
        return "true" if v else "false"
    if isinstance(v, (int,)):
        return str(v)
    if isinstance(v, float):
        if math.isnan(v):
            return "nan"
        return f"{v:.17g}"
    return str(v)


def to_csv_text(report: StatReport) -> str:
    lines = [",".join(report.columns)]
    for row in report.rows:
        lines.append(",".join(format_value(v) for v in row))
    return "\n".join(lines) + "\n"


def write_csv(report: StatReport, path) -> None:
    with open(path, "w", newline="") as fh:
        fh.write(to_csv_text(report))


def _jsonable(v):
    if isinstance(v, float) and (math.isnan(v) or math.isinf(v)):
        return None if math.isnan(v) else ("inf" if v > 0 else "-inf")
    return v


def to_json_obj(report: StatReport) -> dict:
    return {
        "statistic": report.statistic,
        "trials": report.trials,
        "seed": report.seed,
        "columns": list(report.columns),
        "rows": [{c: _jsonable(v) for c, v in zip(report.columns, row)} for row in report.rows],
        "extra": {k: _jsonable(v) for k, v in sorted(report.extra.items())},
    }


def write_json(report: StatReport, path) -> None:
    with open(path, "w") as fh:
        json.dump(to_json_obj(report), fh, indent=2, sort_keys=True)
        fh.write("\n")


@dataclass
class RunManifest:
    """Everything needed to reproduce a run bit for bit, plus bookkeeping.

    The reproducibility contract: re-running the echoed config with the
    echoed seed reproduces every estimate exactly, independent of the worker
    count.  Timestamps and failure counters are informational.
    """

    subcommand: str
    config: dict
    tool_version: str
    master_seed: int
    trials: int
    jobs: int
    started_at: str = ""
    finished_at: str = ""
    failed_trials: int = 0
    effective_trials: int = 0
    outputs: dict = field(default_factory=dict)

    def write(self, path) -> None:
        with open(path, "w") as fh:
            json.dump(dataclasses.asdict(self), fh, indent=2, sort_keys=True)
            fh.write("\n")
