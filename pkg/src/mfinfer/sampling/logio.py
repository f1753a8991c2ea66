"""Sample logs and report files.

The sample log is line-delimited JSON: a header object on the first line
(tool version, config hash, seed) followed by one record per iteration
with fields {i, theta, w, m, mu, cost_lo, cost_hi_total, omega_lo,
omega_hi_list, g}.  Single-fidelity runs store their only weighting value
in omega_lo with m = 0 and mu = null.  CSV reports carry the same
provenance in a leading comment line.
"""

from __future__ import annotations

import csv
import json
from dataclasses import dataclass

import numpy as np

from .._version import __version__
from .types import SampleSet, WeightedSample

__all__ = [
    "LogParseError",
    "LogRecord",
    "make_header",
    "header_comment",
    "sample_to_record",
    "write_sample_log",
    "open_log_sink",
    "read_sample_log",
    "write_summary_csv",
    "write_nu_trace_csv",
    "read_nu_trace_csv",
]

TOOL = "mf-infer"


class LogParseError(ValueError):
    def __init__(self, path, line_no, message):
        self.path = path
        self.line_no = line_no
        super().__init__(f"{path}:{line_no}: {message}")


@dataclass
class LogRecord:
    i: int
    theta: np.ndarray
    w: float
    m: int
    mu: float | None
    cost_lo: float
    cost_hi_total: float
    omega_lo: float
    omega_hi_list: list[float]
    g: float

    @property
    def total_cost(self) -> float:
        return self.cost_lo + self.cost_hi_total


def make_header(seed: int, config_hash: str, kind: str) -> dict:
    return {
        "tool": TOOL,
        "version": __version__,
        "config_hash": config_hash,
        "seed": int(seed),
        "kind": kind,
    }


def header_comment(header: dict) -> str:
    return (
        f"# {header['tool']} {header['version']} "
        f"config_hash={header['config_hash']} seed={header['seed']}"
    )


def sample_to_record(sample: WeightedSample) -> dict:
    rec = sample.record
    if rec is None:
        return {
            "i": sample.index,
            "theta": [float(v) for v in sample.draw.theta],
            "w": sample.weight,
            "m": 0,
            "mu": None,
            "cost_lo": sample.total_cost,
            "cost_hi_total": 0.0,
            "omega_lo": sample.omega,
            "omega_hi_list": [],
            "g": sample.g_value,
        }
    return {
        "i": sample.index,
        "theta": [float(v) for v in sample.draw.theta],
        "w": sample.weight,
        "m": rec.m,
        "mu": rec.mu,
        "cost_lo": rec.cost_lo,
        "cost_hi_total": rec.cost_hi_total,
        "omega_lo": rec.omega_lo,
        "omega_hi_list": rec.omega_hi_list,
        "g": sample.g_value,
    }


def write_sample_log(path, header: dict, samples) -> None:
    sink, close = open_log_sink(path, header)
    try:
        it = samples.samples if isinstance(samples, SampleSet) else samples
        for s in it:
            sink(s)
    finally:
        close()


def open_log_sink(path, header: dict):
    """Streaming writer; returns (sink(sample), close())."""
    fh = open(path, "w", encoding="utf-8")
    fh.write(json.dumps({"header": header}) + "\n")

    def sink(sample: WeightedSample) -> None:
        fh.write(json.dumps(sample_to_record(sample)) + "\n")

    return sink, fh.close


def read_sample_log(path):
    """Parse a sample log; returns (header, records)."""
    records: list[LogRecord] = []
    header = None
    with open(path, "r", encoding="utf-8") as fh:
        for line_no, line in enumerate(fh, start=1):
            line = line.strip()
            if not line:
                continue
            try:
                doc = json.loads(line)
            except json.JSONDecodeError as exc:
                raise LogParseError(path, line_no, exc.msg) from None
            if line_no == 1:
                if not isinstance(doc, dict) or "header" not in doc:
                    raise LogParseError(path, line_no, "missing header object")
                header = doc["header"]
                continue
            try:
                records.append(
                    LogRecord(
                        i=int(doc["i"]),
                        theta=np.asarray(doc["theta"], dtype=np.float64),
                        w=float(doc["w"]),
                        m=int(doc["m"]),
                        mu=None if doc["mu"] is None else float(doc["mu"]),
                        cost_lo=float(doc["cost_lo"]),
                        cost_hi_total=float(doc["cost_hi_total"]),
                        omega_lo=float(doc["omega_lo"]),
                        omega_hi_list=[float(v) for v in doc["omega_hi_list"]],
                        g=float(doc["g"]),
                    )
                )
            except (KeyError, TypeError, ValueError) as exc:
                raise LogParseError(path, line_no, f"bad record: {exc}") from None
    if header is None:
        raise LogParseError(path, 0, "empty log")
    return header, records


def write_summary_csv(path, header: dict, report) -> None:
    with open(path, "w", encoding="utf-8", newline="") as fh:
        fh.write(header_comment(header) + "\n")
        writer = csv.writer(fh)
        writer.writerow(["n", "g_hat", "mse_hat", "j_hat", "total_cost"])
        writer.writerow(
            [
                report.n,
                repr(report.g_hat),
                repr(report.variance_estimate),
                repr(report.j_coefficient),
                repr(report.total_cost),
            ]
        )


def write_nu_trace_csv(path, header: dict, trace) -> None:
    """Trace rows (iteration, nu vector) flattened to (i, k, nu_k)."""
    with open(path, "w", encoding="utf-8", newline="") as fh:
        fh.write(header_comment(header) + "\n")
        writer = csv.writer(fh)
        writer.writerow(["i", "k", "nu_k"])
        for i, nu in trace:
            for k, value in enumerate(nu, start=1):
                writer.writerow([i, k, repr(float(value))])


def read_nu_trace_csv(path):
    """Inverse of write_nu_trace_csv; returns a list of (iteration, nu list)."""
    rows: list[tuple[int, list[float]]] = []
    with open(path, "r", encoding="utf-8", newline="") as fh:
        reader = csv.reader(fh)
        for line_no, row in enumerate(reader, start=1):
            if not row or row[0].startswith("#"):
                continue
            if row == ["i", "k", "nu_k"]:
                continue
            try:
                i, k, value = int(row[0]), int(row[1]), float(row[2])
            except (IndexError, ValueError):
                raise LogParseError(path, line_no, f"bad trace row: {row!r}") from None
            if not rows or rows[-1][0] != i:
                rows.append((i, []))
            nu = rows[-1][1]
            if k != len(nu) + 1:
                raise LogParseError(path, line_no, f"cell {k} out of order")
            nu.append(value)
    if not rows:
        raise LogParseError(path, 0, "empty trace")
    return rows
