"""Command-line entry point: ``mcrec {stats,complete,evaluate,sweep}``.

Parameter precedence is command-line flag > ``--config`` JSON file >
``--preset`` dataset defaults > built-in defaults.
"""
from __future__ import annotations

import argparse
import csv
import hashlib
import io
import itertools
import json
import logging
import os
import sys
import tempfile
from pathlib import Path

import numpy as np

from . import __version__, baselines
from .data import FORMATS, DataError, dataset_stats, load_triplets, make_folds
from .evaluation import METHODS, run_cv_multi
from .recommend import export_rankings, rank_users, reconstruction_stats
from .solver import PRESETS, CapacityError, ConfigError, SolverConfig, complete

log = logging.getLogger("mcrec")

SOLVER_KEYS = ("mu0", "gamma", "tol", "max_iter")
METHOD_KEYS = {"logdet": SOLVER_KEYS, "puresvd": ("rank",), "itemknn": ("k",)}
DEFAULT_METHOD_PARAMS = {"puresvd": {"rank": 20}, "itemknn": {"k": 10}}


class UsageError(Exception):
    pass


# -- output helpers ----------------------------------------------------------

def atomic_write(path: Path, text: str):
    path.parent.mkdir(parents=True, exist_ok=True)
    fd, tmp = tempfile.mkstemp(dir=path.parent, prefix=f".{path.name}.")
    try:
        with os.fdopen(fd, "w", newline="") as fh:
            fh.write(text)
        os.replace(tmp, path)
    except BaseException:
        os.unlink(tmp)
        raise


def write_json(path: Path, obj):
    atomic_write(path, json.dumps(obj, indent=2, default=_jsonable) + "\n")


def _jsonable(o):
    if isinstance(o, np.generic):
        return o.item()
    if isinstance(o, np.ndarray):
        return o.tolist()
    raise TypeError(f"not JSON serialisable: {type(o).__name__}")


def csv_text(rows: list[dict]) -> str:
    buf = io.StringIO()
    w = csv.DictWriter(buf, fieldnames=list(rows[0]))
    w.writeheader()
    w.writerows(rows)
    return buf.getvalue()


def sha256(path: Path) -> str:
    h = hashlib.sha256()
    with open(path, "rb") as fh:
        for chunk in iter(lambda: fh.read(1 << 20), b""):
            h.update(chunk)
    return h.hexdigest()


def write_manifest(args, config: dict, out: Path):
    write_json(out / "manifest.json", {
        "command": args.command,
        "argv": args.argv,
        "config": config,
        "seed": args.seed,
        "version": __version__,
        "dataset": {"path": str(args.data), "format": args.format,
                    "sha256": sha256(Path(args.data))},
    })


# -- config resolution ---------------------------------------------------------

def resolve_params(args, method: str, list_valued: bool = False) -> dict:
    keys = METHOD_KEYS[method]
    params: dict = {}
    if method == "logdet":
        params.update(PRESETS.get(args.preset, {}) if args.preset else {})
    elif args.preset:
        table = baselines.PURESVD_PRESETS if method == "puresvd" else baselines.ITEMKNN_PRESETS
        key = keys[0]
        if args.preset in table:
            params[key] = table[args.preset]
    if not params and method in DEFAULT_METHOD_PARAMS:
        params.update(DEFAULT_METHOD_PARAMS[method])
    if args.config:
        with open(args.config) as fh:
            file_cfg = json.load(fh)
        params.update({k: v for k, v in file_cfg.items() if k in keys})
    for k in keys:
        v = getattr(args, k, None)
        if v is not None:
            params[k] = v
    if list_valued:
        return params
    if method == "logdet":
        SolverConfig(**params)  # validate
    return params


def _parse_list(kind):
    def parse(text: str):
        try:
            return [kind(t) for t in text.split(",") if t.strip()]
        except ValueError:
            raise argparse.ArgumentTypeError(f"invalid list {text!r}") from None
    return parse


# -- commands ------------------------------------------------------------------

def load(args):
    return load_triplets(args.data, args.format, args.delimiter)


def cmd_stats(args) -> int:
    m = load(args)
    row = dataset_stats(m).to_dict(name=args.name or Path(args.data).stem)
    print(json.dumps(row))
    if args.out:
        out = Path(args.out)
        write_json(out / "stats.json", row)
        atomic_write(out / "stats.csv", csv_text([row]))
    return 0


def cmd_complete(args) -> int:
    m = load(args)
    params = resolve_params(args, "logdet")
    cfg = SolverConfig(**params)
    out = Path(args.out)
    out.mkdir(parents=True, exist_ok=True)

    trace_lines: list[str] = []
    callback = None
    if args.trace:
        def callback(state, record):
            trace_lines.append(json.dumps(record))

    x_hat, report = complete(m, cfg, callback=callback)
    stats = reconstruction_stats(x_hat, m)
    summary = {
        "shape": list(m.shape),
        "observed": m.nnz,
        "rank": report.rank,
        "converged": report.converged,
        "iterations": report.iterations,
        **vars(stats),
    }
    write_json(out / "summary.json", summary)
    write_json(out / "report.json", report.to_dict())
    write_json(out / "id_mapping.json", m.id_mapping())
    if args.trace:
        atomic_write(out / "trace.jsonl", "\n".join(trace_lines) + "\n")
    if args.dump:
        hidden = ~m.mask()
        rows, cols = np.nonzero(hidden & (x_hat > args.dump_threshold))
        buf = io.StringIO()
        w = csv.writer(buf)
        w.writerow(["user_id", "item_id", "value"])
        for r, c in zip(rows, cols):
            w.writerow([m.user_ids[r], m.item_ids[c], repr(float(x_hat[r, c]))])
        atomic_write(out / "completed.csv", buf.getvalue())
    if args.N:
        buf = io.StringIO()
        export_rankings(rank_users(x_hat, m, range(m.num_users), args.N).values(), buf, m)
        atomic_write(out / "rankings.csv", buf.getvalue())
    write_manifest(args, params, out)
    print(json.dumps(summary))
    return 0


def cmd_evaluate(args) -> int:
    m = load(args)
    params = resolve_params(args, args.method)
    n_list = args.N or 10
    report = run_cv_multi(m, args.method, params, (n_list,), args.folds, args.seed, args.jobs)[n_list]
    out = Path(args.out)
    write_json(out / "eval.json", report.to_dict())
    atomic_write(out / "table.csv", csv_text([report.table_row()]))
    write_manifest(args, {"method": args.method, "params": params, "N": n_list,
                          "folds": args.folds}, out)
    print(json.dumps(report.table_row()))
    return 0


SWEEP_COLUMNS = ["method", "mu0", "gamma", "rank", "k", "N", "HR", "ARHR", "iterations", "wall_time"]


def cmd_sweep(args) -> int:
    grids = {k: getattr(args, k) for k in METHOD_KEYS[args.method]
             if isinstance(getattr(args, k), list)}
    n_values = args.N or []
    if any(len(v) == 0 for v in grids.values()) or (not grids and not n_values):
        raise UsageError("sweep needs a nonempty grid (e.g. --mu0 1e-3,6e-3 or --N 5,10,15)")
    if not n_values:
        n_values = [10]

    # fixed (non-swept) parameters still follow the usual precedence
    base = resolve_params(args, args.method, list_valued=True)
    keys = list(grids)
    points = [dict(zip(keys, combo)) for combo in itertools.product(*grids.values())] or [{}]
    out = Path(args.out)
    out.mkdir(parents=True, exist_ok=True)
    write_manifest(args, {"method": args.method, "base": base, "grid": grids,
                          "N": n_values, "folds": args.folds}, out)
    m = load(args)
    splits = make_folds(m, args.folds, args.seed)

    path = out / "sweep.csv"
    with open(path, "w", newline="") as fh:
        w = csv.DictWriter(fh, fieldnames=SWEEP_COLUMNS)
        w.writeheader()
        fh.flush()
        for point in points:
            params = {**base, **point}
            if args.method == "logdet":
                SolverConfig(**params)
            reports = run_cv_multi(m, args.method, params, n_values, splits=splits, jobs=args.jobs)
            for n in n_values:
                r = reports[n]
                w.writerow({
                    "method": args.method,
                    "mu0": params.get("mu0", ""), "gamma": params.get("gamma", ""),
                    "rank": params.get("rank", ""), "k": params.get("k", ""),
                    "N": n, "HR": r.mean_hr, "ARHR": r.mean_arhr,
                    "iterations": "" if r.mean_iterations is None else r.mean_iterations,
                    "wall_time": r.wall_time,
                })
            fh.flush()
            log.info("grid point %s done", point)
    print(str(path))
    return 0


COMMANDS = {"stats": cmd_stats, "complete": cmd_complete, "evaluate": cmd_evaluate, "sweep": cmd_sweep}


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--data", required=True, help="triplet file: user item [value ...]")
    common.add_argument("--format", choices=FORMATS, default="tsv-rating")
    common.add_argument("--delimiter", default=None, help="field separator (default: tab, comma or whitespace)")
    common.add_argument("--seed", type=int, default=42)
    common.add_argument("--out", default=None, help="output directory")
    common.add_argument("-v", "--verbose", action="store_true")

    model = argparse.ArgumentParser(add_help=False)
    model.add_argument("--preset", choices=sorted(PRESETS), help="dataset parameter preset")
    model.add_argument("--config", help="JSON file with method parameters")
    model.add_argument("--folds", type=int, default=5)
    model.add_argument("--jobs", type=int, default=1, help="folds evaluated concurrently")

    p = argparse.ArgumentParser(prog="mcrec", description=__doc__.splitlines()[0])
    p.add_argument("--version", action="version", version=f"mcrec {__version__}")
    sub = p.add_subparsers(dest="command", required=True)

    s = sub.add_parser("stats", parents=[common], help="dataset statistics")
    s.add_argument("--name", help="dataset name for the output row")

    c = sub.add_parser("complete", parents=[common, model], help="complete a rating matrix")
    _solver_flags(c, float, int)
    c.add_argument("--N", type=int, help="also write top-N rankings for every user")
    c.add_argument("--trace", action="store_true", help="write per-iteration trace.jsonl")
    c.add_argument("--dump", action="store_true", help="write completed.csv of filled-in entries")
    c.add_argument("--dump-threshold", type=float, default=1e-8)

    e = sub.add_parser("evaluate", parents=[common, model], help="cross-validated HR/ARHR")
    e.add_argument("--method", choices=sorted(METHODS), default="logdet")
    _solver_flags(e, float, int)
    e.add_argument("--rank", type=int, help="PureSVD rank")
    e.add_argument("--k", type=int, help="ItemKNN neighbours")
    e.add_argument("--N", type=int, default=10)

    w = sub.add_parser("sweep", parents=[common, model],
                       help="evaluate over a grid; comma-separated values define the grid")
    w.add_argument("--method", choices=sorted(METHODS), default="logdet")
    _solver_flags(w, _parse_list(float), _parse_list(int))
    w.add_argument("--rank", type=_parse_list(int))
    w.add_argument("--k", type=_parse_list(int))
    w.add_argument("--N", type=_parse_list(int))
    return p


def _solver_flags(p, real, integer):
    p.add_argument("--mu0", type=real, help="initial penalty")
    p.add_argument("--gamma", type=real, help="penalty growth factor (> 1)")
    p.add_argument("--tol", type=real)
    p.add_argument("--max-iter", dest="max_iter", type=integer)


def main(argv=None) -> int:
    argv = list(sys.argv[1:] if argv is None else argv)
    parser = build_parser()
    args = parser.parse_args(argv)
    args.argv = argv
    if args.out is None:
        args.out = f"mcrec-{args.command}" if args.command != "stats" else None
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING,
                        format="%(levelname)s %(name)s: %(message)s")
    if args.command == "sweep":
        for key in ("tol", "max_iter"):
            v = getattr(args, key)
            if isinstance(v, list) and len(v) == 1:
                setattr(args, key, v[0])
    if not Path(args.data).is_file():
        print(f"mcrec: error: file not found: {args.data}", file=sys.stderr)
        return 1
    try:
        return COMMANDS[args.command](args)
    except (UsageError, ConfigError) as exc:
        parser.print_usage(sys.stderr)
        print(f"mcrec: error: {exc}", file=sys.stderr)
        return 2
    except (DataError, CapacityError, OSError) as exc:
        print(f"mcrec: error: {exc}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
