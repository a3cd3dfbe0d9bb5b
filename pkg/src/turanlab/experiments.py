"""Run configuration, experiment records, extremal sweeps and plot data."""

from __future__ import annotations

import csv
import io
import json
import math
import os
import time
from dataclasses import asdict, dataclass, field
from datetime import datetime, timezone
from fractions import Fraction
from pathlib import Path
from typing import Sequence

from .errors import InputError
from .extremal import (
    DELETION,
    EXACT,
    EXACT_MAX_N,
    HEURISTIC,
    ExtremalRecord,
    deletion_record,
    exact_ex,
    heuristic_lower_bound,
)
from .io import atomic_write_text, write_graph
from .subdivision import PatternSpec

DEFAULT_SEED = 20_240_917
WORKERS_ENV = "TURANLAB_WORKERS"
CSV_COLUMNS = ("n", "lo", "hi", "method", "conjectured_bound", "ratio")
AUTO = "auto"


def resolve_workers(flag: int | None) -> int:
    """``--workers`` if given, else ``$TURANLAB_WORKERS``, else 1."""
    if flag is not None:
        value, source = flag, "--workers"
    else:
        raw = os.environ.get(WORKERS_ENV)
        if raw is None or not raw.strip():
            return 1
        try:
            value, source = int(raw), WORKERS_ENV
        except ValueError:
            raise InputError(f"{WORKERS_ENV} must be an integer, got {raw!r}") from None
    if value < 1:
        raise InputError(f"{source} must be >= 1, got {value}")
    return value


@dataclass(frozen=True)
class RunConfig:
    """Everything needed to replay a command."""

    command: str
    params: dict = field(default_factory=dict)
    inputs: dict = field(default_factory=dict)
    outputs: dict = field(default_factory=dict)
    seed: int = DEFAULT_SEED
    seed_is_default: bool = True
    workers: int = 1

    def snapshot(self) -> dict:
        return json.loads(json.dumps(asdict(self), default=str))


@dataclass
class ExperimentRecord:
    timestamp: str
    config: dict
    counts: dict
    outcome: str
    wall_time: float

    def to_dict(self) -> dict:
        return {"schema": 1, **asdict(self)}

    @classmethod
    def from_dict(cls, data: dict) -> "ExperimentRecord":
        try:
            return cls(data["timestamp"], data["config"], data["counts"], data["outcome"], data["wall_time"])
        except (KeyError, TypeError) as exc:
            raise InputError(f"malformed experiment record: {exc}") from exc

    def to_json_text(self) -> str:
        return json.dumps(self.to_dict(), sort_keys=True)

    @classmethod
    def from_json_text(cls, text: str) -> "ExperimentRecord":
        try:
            return cls.from_dict(json.loads(text))
        except json.JSONDecodeError as exc:
            raise InputError(f"malformed experiment record: {exc}") from exc


def now_stamp() -> str:
    return datetime.now(timezone.utc).isoformat(timespec="seconds")


def conjectured_bound(n: int, p: PatternSpec) -> float:
    return n ** float(p.conjectured_exponent)


def extremal_record(
    n: int,
    p: PatternSpec,
    mode: str = AUTO,
    restarts: int = 4,
    seed: int = DEFAULT_SEED,
    workers: int = 1,
    steps: int = 150,
    exact_max_n: int = EXACT_MAX_N,
    budget: int | None = None,
) -> ExtremalRecord:
    """One ex(n, p) record; ``auto`` is exact up to ``exact_max_n`` and heuristic beyond."""
    if mode == AUTO:
        mode = EXACT if n <= exact_max_n else HEURISTIC
    if mode == EXACT:
        return exact_ex(n, p, budget=budget, max_n=exact_max_n)
    if mode == HEURISTIC:
        return heuristic_lower_bound(n, p, restarts=restarts, seed=seed, steps=steps, workers=workers)
    if mode in (DELETION, "deletion"):
        return deletion_record(n, p)
    raise InputError(f"unknown mode {mode!r}; expected auto, exact, heuristic or deletion")


def _fmt(x) -> str:
    return str(x) if isinstance(x, int) else repr(float(x))


def records_to_csv(records: Sequence[ExtremalRecord]) -> str:
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(CSV_COLUMNS)
    for r in records:
        ref = conjectured_bound(r.n, r.pattern)
        w.writerow([r.n, _fmt(r.lo), _fmt(r.hi), r.method, repr(ref), repr(r.lo / ref)])
    return buf.getvalue()


def run_experiment(
    p: PatternSpec,
    n_min: int,
    n_max: int,
    out_csv: str | os.PathLike[str],
    mode: str = AUTO,
    restarts: int = 4,
    seed: int = DEFAULT_SEED,
    workers: int = 1,
    steps: int = 150,
    exact_max_n: int = EXACT_MAX_N,
    config: dict | None = None,
) -> tuple[list[ExtremalRecord], ExperimentRecord]:
    """Sweep ``n_min..n_max``; write the CSV and one witness edge list per row.

    Witnesses go next to the CSV as ``<stem>.n<N>.el``.
    """
    if n_min < 1 or n_max < n_min:
        raise InputError(f"need 1 <= n-min <= n-max, got {n_min}..{n_max}")
    start = time.perf_counter()
    out = Path(out_csv)
    records = []
    witnesses = {}
    for n in range(n_min, n_max + 1):
        rec = extremal_record(n, p, mode, restarts, seed, workers, steps, exact_max_n)
        records.append(rec)
        if rec.witness is not None:
            path = out.with_name(f"{out.stem}.n{n}.el")
            write_graph(path, rec.witness)
            witnesses[n] = str(path)
    atomic_write_text(out, records_to_csv(records))
    snap = config or {"pattern": p.to_json(), "n_min": n_min, "n_max": n_max, "mode": mode,
                      "restarts": restarts, "seed": seed, "workers": workers}
    counts = {"rows": len(records), "exact_rows": sum(r.method == EXACT for r in records), "witnesses": witnesses}
    rec = ExperimentRecord(now_stamp(), snap, counts, "ok", time.perf_counter() - start)
    return records, rec


@dataclass(frozen=True)
class PlotData:
    data: tuple[tuple[float, float], ...]  # (log n, log value)
    reference: tuple[tuple[float, float], ...]  # (log n, log reference)
    ns: tuple[int, ...]
    values: tuple[float, ...]
    reference_values: tuple[float, ...]

    def to_text(self) -> str:
        """Two gnuplot-style blocks separated by two blank lines."""
        lines = ["# data: ln(n) ln(value)"]
        lines += [f"{x!r} {y!r}" for x, y in self.data]
        lines += ["", "", "# reference: ln(n) ln(conjectured bound)"]
        lines += [f"{x!r} {y!r}" for x, y in self.reference]
        return "\n".join(lines) + "\n"


def _read_rows(path: str | os.PathLike[str]) -> list[dict]:
    try:
        text = Path(path).read_text()
    except OSError as exc:
        raise InputError(f"cannot read {path}: {exc}") from exc
    rows = list(csv.DictReader(io.StringIO(text)))
    if not rows:
        raise InputError(f"{path}: no data rows")
    missing = [c for c in ("n", "lo") if c not in rows[0]]
    if missing:
        raise InputError(f"{path}: missing columns {missing}")
    return rows


def emit_plot_data(
    csv_path: str | os.PathLike[str],
    out_path: str | os.PathLike[str] | None = None,
    s: int | None = None,
    k: int | None = None,
) -> PlotData:
    """Log-log series of ``lo`` against ``n`` plus the reference line.

    The reference is ``n^(1 + 1/k - 1/(sk))`` when ``s`` and ``k`` are given,
    otherwise the CSV's ``conjectured_bound`` column.
    """
    rows = _read_rows(csv_path)
    if (s is None) != (k is None):
        raise InputError("give both s and k, or neither")
    expo = None if s is None else 1 + Fraction(1, k) - Fraction(1, s * k)
    ns, vals, refs = [], [], []
    for i, row in enumerate(rows, start=2):
        try:
            n = int(row["n"])
            lo = float(row["lo"])
            ref = float(n ** expo) if expo is not None else float(row["conjectured_bound"])
        except (TypeError, ValueError, KeyError) as exc:
            raise InputError(f"{csv_path}:{i}: malformed row {row!r}") from exc
        if n <= 0 or lo <= 0 or ref <= 0:
            raise InputError(f"{csv_path}:{i}: n, lo and the reference must be positive for a log-log plot")
        ns.append(n)
        vals.append(lo)
        refs.append(ref)
    pd = PlotData(
        tuple((math.log(n), math.log(v)) for n, v in zip(ns, vals)),
        tuple((math.log(n), math.log(r)) for n, r in zip(ns, refs)),
        tuple(ns),
        tuple(vals),
        tuple(refs),
    )
    if out_path is not None:
        atomic_write_text(out_path, pd.to_text())
    return pd
