"""Command-line front end.

Subcommands: count, search, prefixes, master, worker, oracle, aspl. Every
flag has an environment-variable mirror with the REGENUM_ prefix (flag
--split-level becomes REGENUM_SPLIT_LEVEL and so on); a flag given on the
command line wins over its variable.

Exit codes: 0 success, 1 job failure (diagnostic on stderr), 2 usage error.
"""

from __future__ import annotations

import argparse
import os
import sys
import time
from dataclasses import dataclass
from typing import Optional

from .codec import from_graph6
from .errors import RegenumError
from .filters import FilterSpec
from .generate import choose_split_level, count_oracle, count_prefixes, enumerate_prefixes
from .graphs import DegreeSpec, aspl
from .report import build_report, write_champions, write_histogram
from .scheduling import RunReport, run_local, run_master, run_mono, run_worker

ENV_PREFIX = "REGENUM_"


def _env(flag: str) -> Optional[str]:
    value = os.environ.get(ENV_PREFIX + flag.strip("-").replace("-", "_").upper())
    return value if value not in (None, "") else None


def _env_int(flag: str) -> Optional[int]:
    value = _env(flag)
    return int(value) if value is not None else None


def _env_float(flag: str) -> Optional[float]:
    value = _env(flag)
    return float(value) if value is not None else None


def _env_bool(flag: str) -> bool:
    value = _env(flag)
    return value is not None and value.lower() in ("1", "true", "yes", "on")


@dataclass
class JobConfig:
    """Everything one run needs, assembled from flags and environment."""

    spec: DegreeSpec
    mode: str                       # mono | local | master | worker
    split_level: int = 0
    worker_count: int = 1
    listen: Optional[str] = None
    master: Optional[str] = None
    filter: FilterSpec = FilterSpec()
    checkpoint: Optional[str] = None
    champions: Optional[str] = None
    histogram: Optional[str] = None
    task_timeout_secs: Optional[float] = None


def _add_spec_flags(p: argparse.ArgumentParser) -> None:
    n_env, k_env = _env_int("order"), _env_int("degree")
    p.add_argument("-n", "--order", type=int, default=n_env, required=n_env is None,
                   help="number of vertices")
    p.add_argument("-k", "--degree", type=int, default=k_env, required=k_env is None,
                   help="degree of every vertex")


def _add_run_flags(p: argparse.ArgumentParser, with_mode: bool = True) -> None:
    p.add_argument("--split-level", type=int, default=_env_int("split-level"),
                   help="edges per sub-task prefix (default: chosen per worker count)")
    if with_mode:
        p.add_argument("--mode", choices=("mono", "local"), default=_env("mode"),
                       help="mono: one walk; local: threaded task pool")
        p.add_argument("--workers", type=int, default=_env_int("workers") or 1,
                       help="local worker threads")
    p.add_argument("--checkpoint", metavar="PATH", default=_env("checkpoint"),
                   help="append-only progress file; rerun resumes from it")
    p.add_argument("--histogram", metavar="PATH", default=_env("histogram"),
                   help="write per-task count buckets as TSV plus a PNG sibling")


def _add_filter_flags(p: argparse.ArgumentParser) -> None:
    p.add_argument("--max-diameter", type=int, default=_env_int("max-diameter"),
                   help="keep only graphs with diameter at most this")
    p.add_argument("--min-aspl", action="store_true", default=_env_bool("min-aspl"),
                   help="track the minimum average shortest path length")
    p.add_argument("--champion-limit", type=int, default=_env_int("champion-limit"),
                   help="max minimum-ASPL graphs retained (default 16)")
    p.add_argument("--champions", metavar="PATH", default=_env("champions"),
                   help="write champion graph6 strings here instead of stdout")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="regenum",
        description="Enumerate connected k-regular graphs up to isomorphism, "
                    "count them, or search them for extremal path lengths.")
    sub = parser.add_subparsers(dest="command", required=True, metavar="COMMAND")

    p = sub.add_parser("count", help="count all graphs for an (order, degree) pair")
    _add_spec_flags(p)
    _add_run_flags(p)
    p.set_defaults(func=cmd_count)

    p = sub.add_parser("search", help="enumerate under filters, tracking champions")
    _add_spec_flags(p)
    _add_run_flags(p)
    _add_filter_flags(p)
    p.set_defaults(func=cmd_search)

    p = sub.add_parser("prefixes", help="list the sub-task prefixes at a split level")
    _add_spec_flags(p)
    p.add_argument("--split-level", type=int, default=_env_int("split-level"),
                   required=_env_int("split-level") is None,
                   help="edges per sub-task prefix")
    p.set_defaults(func=cmd_prefixes)

    p = sub.add_parser("master", help="serve sub-tasks to workers over TCP")
    _add_spec_flags(p)
    p.add_argument("--split-level", type=int, default=_env_int("split-level"),
                   required=_env_int("split-level") is None)
    p.add_argument("--listen", metavar="HOST:PORT", default=_env("listen") or "0.0.0.0:7071",
                   help="bind address (default 0.0.0.0:7071)")
    p.add_argument("--task-timeout-secs", type=float,
                   default=_env_float("task-timeout-secs"),
                   help="reassign a task after this long (default: adaptive)")
    p.add_argument("--checkpoint", metavar="PATH", default=_env("checkpoint"))
    p.add_argument("--histogram", metavar="PATH", default=_env("histogram"))
    _add_filter_flags(p)
    p.set_defaults(func=cmd_master)

    p = sub.add_parser("worker", help="pull and execute sub-tasks from a master")
    _add_spec_flags(p)
    p.add_argument("--split-level", type=int, default=_env_int("split-level"),
                   required=_env_int("split-level") is None)
    p.add_argument("--master", metavar="HOST:PORT", default=_env("master"),
                   required=_env("master") is None, help="master endpoint")
    _add_filter_flags(p)
    p.set_defaults(func=cmd_worker)

    p = sub.add_parser("oracle", help="recount by brute force (small orders only)")
    _add_spec_flags(p)
    p.set_defaults(func=cmd_oracle)

    p = sub.add_parser("aspl", help="average shortest path length of given graphs")
    p.add_argument("--graph6", metavar="STRING", default=_env("graph6"),
                   help="a graph6 string (default: read one per line from stdin)")
    p.set_defaults(func=cmd_aspl)
    return parser


def _make_filter(args: argparse.Namespace) -> FilterSpec:
    if not args.min_aspl:
        if args.champion_limit is not None:
            raise RegenumError("--champion-limit only applies with --min-aspl")
        return FilterSpec(max_diameter=args.max_diameter)
    limit = args.champion_limit if args.champion_limit is not None else 16
    return FilterSpec(max_diameter=args.max_diameter,
                      track_min_aspl=True,
                      champion_limit=limit)


def _make_config(args: argparse.Namespace, f: FilterSpec) -> JobConfig:
    spec = DegreeSpec(args.order, args.degree)
    workers = getattr(args, "workers", 1)
    if workers < 1:
        raise RegenumError("--workers must be at least 1")
    mode = getattr(args, "mode", None)
    if mode is None:
        mode = "local" if (workers > 1 or args.split_level is not None
                           or args.checkpoint) else "mono"
    split = args.split_level
    if mode != "mono" and split is None:
        split = choose_split_level(spec, workers)
    if mode == "mono" and args.checkpoint:
        raise RegenumError("checkpointing needs sub-tasks; drop --mode mono "
                           "or pass --workers/--split-level")
    return JobConfig(spec=spec, mode=mode, split_level=split or 0,
                     worker_count=workers, filter=f,
                     checkpoint=args.checkpoint,
                     champions=getattr(args, "champions", None),
                     histogram=args.histogram)


def _execute(cfg: JobConfig) -> RunReport:
    if cfg.mode == "mono":
        return run_mono(cfg.spec, cfg.filter)
    return run_local(cfg.spec, cfg.split_level, cfg.worker_count, cfg.filter,
                     checkpoint_path=cfg.checkpoint)


def _print_outcome(cfg: JobConfig, rep: RunReport, stats: bool = False) -> None:
    result = rep.result
    print(result.total_count)
    if cfg.histogram:
        write_histogram(cfg.histogram, result)
    champions_path = None
    if cfg.filter.track_min_aspl and cfg.champions:
        write_champions(cfg.champions, result.champions)
        champions_path = cfg.champions
    lines = build_report(result, rep.elapsed_secs,
                         split_level=cfg.split_level if cfg.mode != "mono" else None,
                         champions_path=champions_path,
                         histogram_path=cfg.histogram,
                         checkpoint_path=cfg.checkpoint,
                         resumed_tasks=rep.resumed_tasks,
                         stats=rep.stats if stats else None)
    for line in lines:
        print(line)
    if cfg.filter.track_min_aspl and not cfg.champions:
        for g6 in result.champions:
            print(f"champion {g6}")


def cmd_count(args: argparse.Namespace) -> int:
    cfg = _make_config(args, FilterSpec())
    rep = _execute(cfg)
    _print_outcome(cfg, rep)
    return 0


def cmd_search(args: argparse.Namespace) -> int:
    cfg = _make_config(args, _make_filter(args))
    rep = _execute(cfg)
    _print_outcome(cfg, rep)
    return 0


def cmd_prefixes(args: argparse.Namespace) -> int:
    spec = DegreeSpec(args.order, args.degree)
    for index, prefix in enumerate(enumerate_prefixes(spec, args.split_level)):
        edges = " ".join(f"{a}-{b}" for a, b in prefix.edges)
        print(f"{index}\t{edges}")
    return 0


def cmd_master(args: argparse.Namespace) -> int:
    spec = DegreeSpec(args.order, args.degree)
    f = _make_filter(args)
    cfg = JobConfig(spec=spec, mode="master", split_level=args.split_level,
                    listen=args.listen, filter=f, checkpoint=args.checkpoint,
                    histogram=args.histogram,
                    task_timeout_secs=args.task_timeout_secs)
    task_count = count_prefixes(spec, cfg.split_level)

    def announce(addr):
        print(f"serving {task_count} tasks on {addr[0]}:{addr[1]}", file=sys.stderr)

    rep = run_master(task_count, cfg.listen, cfg.checkpoint, spec=spec,
                     split_level=cfg.split_level, f=f,
                     task_timeout_secs=cfg.task_timeout_secs,
                     on_listening=announce)
    _print_outcome(cfg, rep, stats=True)
    return 0


def cmd_worker(args: argparse.Namespace) -> int:
    spec = DegreeSpec(args.order, args.degree)
    f = _make_filter(args)
    rep = run_worker(args.master, spec, args.split_level, f,
                     champions_path=args.champions)
    done = rep.stats["results"]
    print(f"worker done: {done} tasks, {rep.result.total_count} graphs, "
          f"{rep.elapsed_secs:.2f} s")
    if f.track_min_aspl and rep.result.best_aspl is not None:
        print(f"local best ASPL: {rep.result.best_aspl}"
              + (f" -> {args.champions}" if args.champions else ""))
    return 0


def cmd_oracle(args: argparse.Namespace) -> int:
    spec = DegreeSpec(args.order, args.degree)
    start = time.perf_counter()
    total = count_oracle(spec)
    print(total)
    print(f"{total:,} ({total}) connected {spec.k}-regular graphs on {spec.n} "
          f"vertices, {time.perf_counter() - start:.2f} s by exhaustive recount")
    return 0


def _print_aspl(g6: str) -> None:
    g = from_graph6(g6)
    value = aspl(g)
    pairs = g.n * (g.n - 1)
    total = value.numerator * pairs // value.denominator
    shown = str(int(value)) if value.denominator == 1 else f"{float(value):.6f}"
    print(f"{shown} ({total}/{pairs})")


def cmd_aspl(args: argparse.Namespace) -> int:
    if args.graph6 is not None:
        _print_aspl(args.graph6)
        return 0
    saw_any = False
    for line in sys.stdin:
        line = line.strip()
        if line:
            saw_any = True
            _print_aspl(line)
    if not saw_any:
        raise RegenumError("no graphs given: pass --graph6 or pipe lines to stdin")
    return 0


def main(argv: Optional[list[str]] = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except RegenumError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1
    except OSError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1
    except KeyboardInterrupt:
        print("interrupted", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
