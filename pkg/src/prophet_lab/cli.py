"""Command-line front end.

Every command emits rows with one fixed column order (see COLUMNS) as CSV or
JSON.  Exit status: 0 success, 1 invalid input data, 2 bad configuration.
"""
from __future__ import annotations

import argparse
import csv
import hashlib
import io
import json
import logging
import os
import sys
from dataclasses import replace
from importlib import resources
from pathlib import Path

from .bounds import DEFAULT_DELTA, READINGS, bound_sweep
from .dist_core import DistributionError, FiniteDist, max_power, resolve_dist, to_json_dict
from .engine import (GameSetting, batch_policy, noniid_demo, simulate, threshold_policy, window_algo_A,
                     window_algo_A_prime, window_vs_batch)
from .engine.policies import WindowMaxPolicy
from .hardsearch import BUDGETS, AlphaTable, alpha_estimate, save_witness
from .stopping_dp import batch_value, build_table, prophet_value

COLUMNS = ["command", "config_hash", "seed", "dist_id", "n", "mode", "param", "trials", "mean", "stderr",
           "exact_reference", "extra"]
POLICIES = ["threshold", "batch", "window-A", "window-A-prime", "window-max", "window-vs-batch"]
SEED_ENV = "PROPHET_LAB_SEED"


class ConfigError(Exception):
    pass


def shipped_witness_dir() -> Path:
    return Path(str(resources.files("prophet_lab") / "data" / "witnesses"))


def _hash(obj) -> str:
    return hashlib.sha256(json.dumps(obj, sort_keys=True).encode()).hexdigest()[:12]


def dist_id(d: FiniteDist) -> str:
    return "d-" + _hash(to_json_dict(d))


def _config_hash(args) -> str:
    skip = {"out", "format", "workers", "func", "verbose"}
    return _hash({k: (str(v) if isinstance(v, Path) else v) for k, v in vars(args).items() if k not in skip})


def _row(args, **fields) -> dict:
    row = {c: "" for c in COLUMNS}
    row.update(command=args.command, config_hash=_config_hash(args), seed=getattr(args, "seed", ""))
    for k, v in fields.items():
        row[k] = "" if v is None else v
    if isinstance(row["extra"], dict):
        row["extra"] = json.dumps(row["extra"], sort_keys=True)
    return row


def _emit(rows: list[dict], args) -> None:
    if args.format == "json":
        text = json.dumps([{c: r[c] for c in COLUMNS} for r in rows], indent=2) + "\n"
    else:
        buf = io.StringIO()
        w = csv.DictWriter(buf, fieldnames=COLUMNS, lineterminator="\n")
        w.writeheader()
        w.writerows(rows)
        text = buf.getvalue()
    if args.out:
        Path(args.out).write_text(text)
    else:
        sys.stdout.write(text)


def _load(spec: str) -> FiniteDist:
    if ":" not in spec and not Path(spec).exists():
        raise ConfigError(f"distribution file not found: {spec}")
    return resolve_dist(spec)


# -- commands -------------------------------------------------------------------

def cmd_ratio(args) -> list[dict]:
    d = _load(args.dist)
    table = build_table(d, args.n)
    extra = {"V": [table.V(i) for i in range(1, args.n + 1)], "E": [table.E(i) for i in range(1, args.n + 1)]}
    return [_row(args, dist_id=dist_id(d), n=args.n, mode="standard", param=1, mean=table.ratio,
                 stderr=0.0, exact_reference=table.ratio, extra=extra)]


def _need(args, name):
    val = getattr(args, name)
    if val is None:
        raise ConfigError(f"--{name} is required for policy {args.policy}")
    return val


def cmd_simulate(args) -> list[dict]:
    d = _load(args.dist)
    n, pol = args.n, args.policy
    prophet = prophet_value(d, n)
    common = dict(dist_id=dist_id(d), n=n, trials=args.trials)
    exact = None
    if pol == "window-vs-batch":
        k = _need(args, "k")
        rep = window_vs_batch(d, n, k, args.trials, args.seed, args.workers)
        extra = {"prophet": prophet, "batch_mean": rep.batch.mean, "batch_stderr": rep.batch.stderr,
                 "gap_mean": rep.gap.mean, "gap_stderr": rep.gap.stderr, "min_gap": rep.min_gap}
        return [_row(args, mode="windowed", param=n // k, mean=rep.window.mean, stderr=rep.window.stderr,
                     exact_reference=batch_value(d, n, n // k), extra=extra, **common)]
    if pol == "threshold":
        setting = GameSetting.standard(n)
        table = build_table(d, n)
        policy, exact = threshold_policy(table), table.V(n)
    elif pol == "batch":
        b = _need(args, "b")
        if n % b:
            raise ConfigError(f"batch size {b} must divide n={n}")
        setting = GameSetting.batched(n, b)
        table = build_table(max_power(d, b), n // b)
        policy, exact = batch_policy(table, b), table.V(n // b)
    elif pol in ("window-A", "window-A-prime"):
        k = _need(args, "k")
        if n % k:
            raise ConfigError(f"k={k} must divide n={n}")
        setting = GameSetting.windowed(n, n // k)
        if pol == "window-A":
            policy = window_algo_A(d, n, k)
        else:
            policy = window_algo_A_prime(d, n, k, args.eps3)
    else:
        w = _need(args, "w")
        setting = GameSetting.windowed(n, w)
        policy = WindowMaxPolicy()
    res = simulate(setting, policy, d, args.trials, args.seed, args.workers)
    est = res.estimate()
    return [_row(args, mode=setting.mode, param=setting.param, mean=est.mean, stderr=est.stderr,
                 exact_reference=exact, extra={"prophet": prophet, "ratio": est.mean / prophet}, **common)]


def _alpha_table(args) -> AlphaTable:
    if args.alpha_source == "paper-constant":
        return AlphaTable.paper_constant(range(1, max(args.k) + 1))
    path = args.hard_dir or shipped_witness_dir()
    if not Path(path).is_dir():
        raise ConfigError(f"witness directory not found: {path}")
    table = AlphaTable.from_dir(path)
    if not len(table):
        raise ConfigError(f"no witness files in {path}")
    return table


def cmd_bounds(args) -> list[dict]:
    table = _alpha_table(args)
    rows = []
    for rep in bound_sweep(args.k, table, delta=args.delta, reading=args.reading):
        extra = {"k": rep.k, "lower": rep.lower, "lower_provenance": rep.lower_provenance,
                 "clean_upper": rep.clean_bound, "clean_l": rep.clean_l, "tight_upper": rep.tight_bound,
                 "tight_l": rep.tight_l, "alpha_l": rep.alpha_l, "alpha_provenance": rep.alpha_provenance,
                 "delta_gap": rep.delta_gap, "vacuous": rep.vacuous}
        rows.append(_row(args, mode="bounds", param=rep.k, mean=rep.upper, exact_reference=rep.lower,
                         extra=extra))
    return rows


def cmd_hardsearch(args) -> list[dict]:
    entry = alpha_estimate(args.k, replace(BUDGETS[args.budget], seed=args.seed))
    if args.witness:
        save_witness(entry, args.witness)
    extra = {"support_size": entry.witness.size, "witness": str(args.witness) if args.witness else None}
    return [_row(args, dist_id=dist_id(entry.witness), n=args.k, mode="standard", param=1, mean=entry.alpha,
                 stderr=0.0, exact_reference=entry.alpha, extra=extra)]


def cmd_demo_noniid(args) -> list[dict]:
    rows = []
    for eps in args.eps:
        gambler, prophet = noniid_demo(eps, args.n, args.w)
        rows.append(_row(args, n=args.n, mode="windowed", param=args.w, mean=gambler / prophet, stderr=0.0,
                         exact_reference=1.0 / (2.0 - eps),
                         extra={"eps": eps, "gambler": gambler, "prophet": prophet}))
    return rows


# -- parser ---------------------------------------------------------------------

def _default_seed() -> int:
    raw = os.environ.get(SEED_ENV)
    if raw is None:
        return 0
    try:
        return int(raw)
    except ValueError:
        raise ConfigError(f"{SEED_ENV} must be an integer, got {raw!r}")


def build_parser(default_seed: int = 0) -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(prog="prophet-lab", description="Batched and windowed prophet inequality lab.")
    ap.add_argument("-v", "--verbose", action="store_true")
    sub = ap.add_subparsers(dest="command", required=True)

    def common(p, seeded=True):
        p.add_argument("--out", type=Path, help="write output here instead of stdout")
        p.add_argument("--format", choices=["csv", "json"], default="csv")
        if seeded:
            p.add_argument("--seed", type=int, default=default_seed)

    p = sub.add_parser("ratio", help="exact DP ratio with V and E tables")
    p.add_argument("--dist", required=True, help="distribution JSON file or inline 'v:p,v:p'")
    p.add_argument("--n", type=int, required=True)
    common(p, seeded=False)
    p.set_defaults(func=cmd_ratio)

    p = sub.add_parser("simulate", help="Monte Carlo run of one policy")
    p.add_argument("--dist", required=True)
    p.add_argument("--n", type=int, required=True)
    p.add_argument("--policy", choices=POLICIES, default="threshold")
    p.add_argument("--k", type=int, help="number of batches for window policies (window = n/k)")
    p.add_argument("--b", type=int, help="batch size")
    p.add_argument("--w", type=int, help="window size")
    p.add_argument("--eps3", type=float, default=0.01)
    p.add_argument("--trials", type=int, default=100_000)
    p.add_argument("--workers", type=int, default=1)
    common(p)
    p.set_defaults(func=cmd_simulate)

    p = sub.add_parser("bounds", help="lower and upper bounds for windows of size n/k")
    p.add_argument("--k", type=int, nargs="+", default=[100, 1000, 10000])
    p.add_argument("--alpha-source", choices=["witnesses", "paper-constant"], default="witnesses")
    p.add_argument("--hard-dir", type=Path, help="witness directory (default: shipped table)")
    p.add_argument("--delta", type=float, default=DEFAULT_DELTA)
    p.add_argument("--reading", choices=READINGS, default="threshold")
    common(p, seeded=False)
    p.set_defaults(func=cmd_bounds)

    p = sub.add_parser("hardsearch", help="search a hard distribution for k samples")
    p.add_argument("--k", type=int, required=True)
    p.add_argument("--budget", choices=sorted(BUDGETS), default="default")
    p.add_argument("--witness", type=Path, help="write the witness JSON here")
    common(p)
    p.set_defaults(func=cmd_hardsearch)

    p = sub.add_parser("demo-noniid", help="exact windowed ratio of the non-i.i.d. example")
    p.add_argument("--eps", type=float, nargs="+", default=[0.5, 0.1, 0.01])
    p.add_argument("--n", type=int, default=4)
    p.add_argument("--w", type=int, default=2)
    common(p, seeded=False)
    p.set_defaults(func=cmd_demo_noniid)
    return ap


def main(argv=None) -> int:
    try:
        parser = build_parser(_default_seed())
    except ConfigError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return int(exc.code or 0)
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING, stream=sys.stderr)
    try:
        if getattr(args, "trials", 2) < 2:
            raise ConfigError("--trials must be at least 2")
        rows = args.func(args)
    except ConfigError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    except (DistributionError, ValueError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1
    _emit(rows, args)
    return 0


if __name__ == "__main__":
    sys.exit(main())
