"""Command-line front end.

Exit status: 0 success, 1 domain failure (absent, failure report, invalid
certificate), 2 input or usage error.  Every JSON payload carries
``"schema": 1`` and a ``config`` snapshot; files are written atomically.
"""

from __future__ import annotations

import argparse
import json
import logging
import sys
from fractions import Fraction
from typing import Sequence

from .assembly import PipelineConfig, find_subdivision_pipeline
from .errors import InputError, PreconditionError, TuranLabError
from .experiments import (
    AUTO,
    DEFAULT_SEED,
    RunConfig,
    emit_plot_data,
    extremal_record,
    resolve_workers,
    run_experiment,
)
from .extremal import EXACT_MAX_N
from .io import json_default, atomic_write_json, read_graph
from .paths import count_critical_paths, critical_path_comparator, threshold_table
from .regularize import RegularizationParams, extract_almost_regular
from .spiders import greedy_disjoint_packing, strongness_threshold
from .subdivision import (
    AT_MOST,
    DEFAULT_BUDGET,
    EXACT,
    Embedding,
    PatternSpec,
    contains_subdivision,
    embedding_problems,
)

log = logging.getLogger("turanlab")

OK, FAILURE, USAGE = 0, 1, 2


def _fraction(text: str) -> Fraction:
    try:
        return Fraction(text)
    except (ValueError, ZeroDivisionError):
        raise argparse.ArgumentTypeError(f"not a rational number: {text!r}") from None


def _int_list(text: str) -> list[int]:
    try:
        return [int(x) for x in text.split(",") if x.strip()]
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected comma-separated integers, got {text!r}") from None


def _pattern_args(p: argparse.ArgumentParser, at_most: bool = True) -> None:
    p.add_argument("--s", type=int, required=True)
    p.add_argument("--t", type=int, required=True)
    p.add_argument("--k", type=int, required=True)
    if at_most:
        p.add_argument("--at-most-k", action="store_true", help="allow paths of length <= k")


def _seed_arg(p: argparse.ArgumentParser) -> None:
    p.add_argument("--seed", type=int, default=None, help=f"random seed (default {DEFAULT_SEED})")


def build_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(prog="turanlab", description="Search tools for subdivisions of K_{s,t}.")
    ap.add_argument("--log-level", default="WARNING", choices=["DEBUG", "INFO", "WARNING", "ERROR"])
    sub = ap.add_subparsers(dest="command", required=True)

    a = sub.add_parser("analyze", help="critical-path counts and their comparator bound")
    a.add_argument("--input", required=True)
    a.add_argument("--L", type=int, default=3)
    a.add_argument("--max-len", type=int, required=True)
    a.add_argument("--K", type=_fraction, default=None, help="almost-regularity constant for the comparator")
    a.add_argument("--sample", type=int, default=None, help="paths sampled per length (default: exhaustive)")
    _seed_arg(a)
    a.add_argument("--json")

    f = sub.add_parser("find", help="look for a K_{s,t}^k subdivision")
    f.add_argument("--input", required=True)
    _pattern_args(f)
    f.add_argument("--budget", type=int, default=DEFAULT_BUDGET, help="search-tree node limit")
    f.add_argument("--pipeline", action="store_true", help="use the constructive spider pipeline")
    f.add_argument("--L", type=int, default=3)
    f.add_argument("--enum-budget", type=int, default=PipelineConfig.enum_budget)
    f.add_argument("--retries", type=int, default=PipelineConfig.assemble_retries)
    _seed_arg(f)
    f.add_argument("--json")

    sp = sub.add_parser("spider", help="spider utilities")
    spsub = sp.add_subparsers(dest="spider_command", required=True)
    pk = spsub.add_parser("pack", help="greedy internally disjoint spider packing")
    pk.add_argument("--input", required=True)
    pk.add_argument("--leaves", type=_int_list, required=True)
    pk.add_argument("--lengths", type=_int_list, required=True)
    pk.add_argument("--L", type=int, default=3)
    pk.add_argument("--k", type=int, default=None, help="pattern k for the threshold (default: longest leg)")
    pk.add_argument("--limit", type=int, default=None)
    pk.add_argument("--restarts", type=int, default=0)
    _seed_arg(pk)
    pk.add_argument("--json")

    r = sub.add_parser("regularize", help="extract an almost-regular subgraph")
    r.add_argument("--input", required=True)
    r.add_argument("--epsilon", type=_fraction, required=True)
    r.add_argument("--c", type=_fraction, default=Fraction(1))
    r.add_argument("--json")

    e = sub.add_parser("ex", help="Turan number of the pattern on n vertices")
    e.add_argument("--n", type=int, required=True)
    _pattern_args(e)
    e.add_argument("--mode", choices=[AUTO, "exact", "heuristic", "deletion"], default="exact")
    e.add_argument("--restarts", type=int, default=4)
    e.add_argument("--steps", type=int, default=150)
    e.add_argument("--budget", type=int, default=None, help="graphs examined by exact search")
    e.add_argument("--max-n", type=int, default=EXACT_MAX_N)
    e.add_argument("--workers", type=int, default=None)
    _seed_arg(e)
    e.add_argument("--json")

    x = sub.add_parser("experiment", help="sweep ex(n) over a range and write a CSV")
    _pattern_args(x)
    x.add_argument("--n-min", type=int, required=True)
    x.add_argument("--n-max", type=int, required=True)
    x.add_argument("--mode", choices=[AUTO, "exact", "heuristic", "deletion"], default=AUTO)
    x.add_argument("--out", required=True)
    x.add_argument("--restarts", type=int, default=4)
    x.add_argument("--steps", type=int, default=150)
    x.add_argument("--max-n", type=int, default=EXACT_MAX_N)
    x.add_argument("--workers", type=int, default=None)
    _seed_arg(x)
    x.add_argument("--json", help="experiment record")

    v = sub.add_parser("verify", help="check an embedding certificate")
    v.add_argument("--input", required=True)
    v.add_argument("--embedding", required=True)
    _pattern_args(v)
    v.add_argument("--json")

    pd = sub.add_parser("plot-data", help="log-log series from an experiment CSV")
    pd.add_argument("--csv", required=True)
    pd.add_argument("--out", required=True)
    pd.add_argument("--s", type=int, default=None)
    pd.add_argument("--k", type=int, default=None)
    return ap


def _pattern(args) -> PatternSpec:
    return PatternSpec(args.s, args.t, args.k, AT_MOST if getattr(args, "at_most_k", False) else EXACT)


def _config(args, **extra) -> RunConfig:
    skip = {"command", "spider_command", "log_level", "seed", "workers", "json", "input", "out", "csv", "embedding"}
    params = {k: v for k, v in vars(args).items() if k not in skip}
    inputs = {k: getattr(args, k) for k in ("input", "embedding", "csv") if getattr(args, k, None)}
    outputs = {k: getattr(args, k) for k in ("json", "out") if getattr(args, k, None)}
    seed = getattr(args, "seed", None)
    name = args.command + (f" {args.spider_command}" if getattr(args, "spider_command", None) else "")
    return RunConfig(name, {**params, **extra}, inputs, outputs,
                     DEFAULT_SEED if seed is None else seed, seed is None, extra.get("workers", 1))


def _announce_seed(cfg: RunConfig) -> None:
    if cfg.seed_is_default:
        print(f"turanlab: seed={cfg.seed} (default)", file=sys.stderr)


def _emit(args, payload: dict, cfg: RunConfig) -> None:
    payload = {"schema": 1, **payload, "config": cfg.snapshot()}
    if getattr(args, "json", None):
        atomic_write_json(args.json, payload)
    else:
        json.dump(payload, sys.stdout, indent=2, default=json_default)
        sys.stdout.write("\n")


def cmd_analyze(args) -> int:
    g = read_graph(args.input)
    tt = threshold_table(args.L, max(args.max_len, 2))
    cfg = _config(args)
    if args.sample is not None:
        _announce_seed(cfg)
    counts = [count_critical_paths(g, ell, tt, args.sample, cfg.seed).to_json() for ell in range(2, args.max_len + 1)]
    comparators = []
    note = None
    if args.K is not None:
        try:
            comparators = [critical_path_comparator(g, ell, tt, args.K).to_json() for ell in range(2, args.max_len + 1)]
        except PreconditionError as exc:
            note = str(exc)
    payload = {"n": g.n, "edges": g.edge_count, "L": args.L, "critical": counts, "comparator": comparators}
    if note:
        payload["comparator_skipped"] = note
    _emit(args, payload, cfg)
    return OK


def cmd_find(args) -> int:
    g = read_graph(args.input)
    p = _pattern(args)
    cfg = _config(args)
    if args.pipeline:
        _announce_seed(cfg)
        pc = PipelineConfig(L=args.L, enum_budget=args.enum_budget, seed=cfg.seed, assemble_retries=args.retries)
        res = find_subdivision_pipeline(g, p, pc)
        _emit(args, {"method": "pipeline", **res.to_json(), "pipeline": pc.to_json()}, cfg)
        return OK if res.found else FAILURE
    if args.budget < 1:
        raise InputError("--budget must be >= 1")
    out = contains_subdivision(g, p, args.budget)
    _emit(args, {"method": "backtracking", **out.to_json()}, cfg)
    return OK if out.found else FAILURE


def cmd_spider(args) -> int:
    g = read_graph(args.input)
    if len(args.leaves) != len(args.lengths):
        raise InputError("--leaves and --lengths must have the same number of entries")
    k = args.k if args.k is not None else max(args.lengths, default=1)
    tt = threshold_table(args.L, max(k, 2))
    thr = strongness_threshold(len(args.leaves), k, args.lengths, tt)
    cfg = _config(args)
    if args.restarts:
        _announce_seed(cfg)
    cert = greedy_disjoint_packing(g, args.leaves, args.lengths, limit=args.limit, threshold=thr,
                                   restarts=args.restarts, seed=cfg.seed)
    _emit(args, {"certificate": cert.to_json(), "verified": cert.verify(g)}, cfg)
    return OK if cert.size else FAILURE


def cmd_regularize(args) -> int:
    g = read_graph(args.input)
    res = extract_almost_regular(g, RegularizationParams(args.epsilon, args.c))
    _emit(args, res.to_json(), _config(args))
    return OK


def cmd_ex(args) -> int:
    p = _pattern(args)
    workers = resolve_workers(args.workers)
    cfg = _config(args, workers=workers)
    if args.mode in ("heuristic", AUTO):
        _announce_seed(cfg)
    rec = extremal_record(args.n, p, args.mode, args.restarts, cfg.seed, workers, args.steps, args.max_n, args.budget)
    _emit(args, rec.to_json(), cfg)
    return OK


def cmd_experiment(args) -> int:
    p = _pattern(args)
    workers = resolve_workers(args.workers)
    cfg = _config(args, workers=workers)
    _announce_seed(cfg)
    records, rec = run_experiment(p, args.n_min, args.n_max, args.out, args.mode, args.restarts, cfg.seed,
                                  workers, args.steps, args.max_n, cfg.snapshot())
    if args.json:
        atomic_write_json(args.json, rec.to_dict())
    print(f"wrote {len(records)} rows to {args.out}", file=sys.stderr)
    return OK


def cmd_verify(args) -> int:
    g = read_graph(args.input)
    try:
        with open(args.embedding) as fh:
            data = json.load(fh)
    except (OSError, json.JSONDecodeError) as exc:
        raise InputError(f"cannot read embedding {args.embedding}: {exc}") from exc
    emb = Embedding.from_json(data)
    problems = embedding_problems(g, _pattern(args), emb)
    _emit(args, {"valid": not problems, "problems": problems}, _config(args))
    return FAILURE if problems else OK


def cmd_plot_data(args) -> int:
    pd = emit_plot_data(args.csv, args.out, args.s, args.k)
    print(f"wrote {len(pd.data)} data and {len(pd.reference)} reference points to {args.out}", file=sys.stderr)
    return OK


COMMANDS = {
    "analyze": cmd_analyze,
    "find": cmd_find,
    "spider": cmd_spider,
    "regularize": cmd_regularize,
    "ex": cmd_ex,
    "experiment": cmd_experiment,
    "verify": cmd_verify,
    "plot-data": cmd_plot_data,
}


def main(argv: Sequence[str] | None = None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return USAGE if exc.code not in (0, None) else OK
    logging.basicConfig(level=args.log_level, format="%(levelname)s %(name)s: %(message)s")
    try:
        return COMMANDS[args.command](args)
    except (InputError, ValueError) as exc:
        print(f"turanlab: error: {exc}", file=sys.stderr)
        return USAGE
    except TuranLabError as exc:
        print(f"turanlab: {exc}", file=sys.stderr)
        return FAILURE


if __name__ == "__main__":  # pragma: no cover
    sys.exit(main())
