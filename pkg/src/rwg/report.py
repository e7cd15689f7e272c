"""Tabular and text artifacts for an analysed score tensor.

Per architecture ``a`` with label ``L`` (``:bias`` written as ``-bias``):

``a{a}_{L}_samples.csv``
    n, mean, variance, rank
``a{a}_{L}_histogram.csv``
    edge_lo, edge_hi, count
``a{a}_{L}_summary.csv``
    architecture, param_count, best_mean, percentile_999, threshold,
    solve_fraction, expected_waiting_time, runtime_seconds

Floats use the shortest round-trip representation.  ``expected_waiting_time``
is ``inf`` when no sample reached the threshold; ``runtime_seconds`` is empty
when the tensor carries no timing.  ``summary.json`` repeats the summary rows
for all architectures.
"""

from __future__ import annotations

import csv
import json
import os
from pathlib import Path

from .harness import ScoreTensor
from .plots import KINDS, PlotSpec, render_svg
from .tensorfile import OutputUnwritableError

SAMPLE_HEADER = ("n", "mean", "variance", "rank")
HISTOGRAM_HEADER = ("edge_lo", "edge_hi", "count")
SUMMARY_HEADER = (
    "architecture",
    "param_count",
    "best_mean",
    "percentile_999",
    "threshold",
    "solve_fraction",
    "expected_waiting_time",
    "runtime_seconds",
)


def fmt(x) -> str:
    return repr(float(x))


def file_stem(a: int, label: str) -> str:
    return f"a{a}_{label.replace(':', '-')}"


def summary_row(report, arch) -> dict:
    wait = report.expected_waiting_time
    return {
        "architecture": report.label,
        "param_count": arch.param_count,
        "best_mean": report.best_mean,
        "percentile_999": report.percentile_999,
        "threshold": report.threshold,
        "solve_fraction": report.solve_fraction,
        "expected_waiting_time": "inf" if wait is None else wait,
        "runtime_seconds": report.runtime_seconds,
    }


def _check(reports, tensor):
    if not reports:
        raise ValueError("nothing to emit: the report has no architectures")
    if len(reports) != len(tensor.architectures):
        raise ValueError("report and tensor disagree on the number of architectures")


def _outdir(destination) -> Path:
    out = Path(destination)
    try:
        out.mkdir(parents=True, exist_ok=True)
    except OSError as exc:
        raise OutputUnwritableError(exc.errno, f"cannot create {out}: {exc.strerror}") from exc
    return out


def _write_csv(path: Path, header, rows):
    try:
        with open(path, "w", newline="", encoding="utf-8") as fh:
            w = csv.writer(fh, lineterminator="\n")
            w.writerow(header)
            w.writerows(rows)
    except OSError as exc:
        raise OutputUnwritableError(exc.errno, f"cannot write {path}: {exc.strerror}") from exc


def emit_csv(reports, tensor: ScoreTensor, destination) -> list:
    """Write the three CSV files per architecture plus ``summary.json``; returns the paths."""
    _check(reports, tensor)
    out = _outdir(destination)
    written = []
    summaries = []
    for a, (rep, arch) in enumerate(zip(reports, tensor.architectures)):
        stem = file_stem(a, rep.label)
        st = rep.stats
        path = out / f"{stem}_samples.csv"
        _write_csv(path, SAMPLE_HEADER,
                   ((n, fmt(st.mean[n]), fmt(st.variance[n]), int(st.rank[n])) for n in range(st.mean.size)))
        written.append(path)
        h = rep.histogram
        path = out / f"{stem}_histogram.csv"
        _write_csv(path, HISTOGRAM_HEADER,
                   ((fmt(lo), fmt(hi), int(c)) for lo, hi, c in zip(h.edges[:-1], h.edges[1:], h.counts)))
        written.append(path)
        row = summary_row(rep, arch)
        summaries.append(row)
        cells = [v if isinstance(v, (str, int)) else ("" if v is None else fmt(v)) for v in row.values()]
        path = out / f"{stem}_summary.csv"
        _write_csv(path, SUMMARY_HEADER, [cells])
        written.append(path)
    doc = {
        "env": tensor.env_name,
        "n_samples": tensor.n_samples,
        "n_episodes": tensor.n_episodes,
        "master_seed": tensor.master_seed,
        "architectures": summaries,
    }
    path = out / "summary.json"
    try:
        path.write_text(json.dumps(doc, indent=2, sort_keys=True) + "\n", encoding="utf-8")
    except OSError as exc:
        raise OutputUnwritableError(exc.errno, f"cannot write {path}: {exc.strerror}") from exc
    written.append(path)
    return written


def emit_svgs(reports, tensor: ScoreTensor, destination, highlight_fraction: float = 0.001) -> list:
    _check(reports, tensor)
    out = _outdir(destination)
    written = []
    for a, rep in enumerate(reports):
        stem = file_stem(a, rep.label)
        for kind in KINDS:
            plot = PlotSpec(kind, highlight_fraction=highlight_fraction,
                            title=f"{tensor.env_name} {rep.label} ({kind})")
            path = out / f"{stem}_{kind}.svg"
            try:
                render_svg(tensor.scores[a], rep, plot, path)
            except OSError as exc:
                raise OutputUnwritableError(exc.errno, f"cannot write {path}: {exc.strerror}") from exc
            written.append(path)
    return written
