"""``motif`` command line: count, find, randomize, discover, report.

Exit codes: 0 ok, 1 usage or motif parse error, 2 bad input data or
unwritable output, 3 time/memory budget exceeded, 4 no results.
"""
from __future__ import annotations

import argparse
import configparser
import json
import logging
import math
import os
import sys
import time
import warnings

from . import __version__
from . import _kernels
from .discovery import DiscoveryConfig, discover
from .dsl import MAX_MOTIF_SIZE, read_motif
from .engine import count_monomorphisms, enumerate_monomorphisms
from .errors import (
    AttributeTypeError,
    EnsembleFailure,
    GraphFormatError,
    MotifError,
    SearchTimeout,
    TooFewEdges,
)
from .graph import load_graph
from .nulls import DegenerateSwapWarning, SwapConfig, build_ensemble
from .rng import NAME as RNG_NAME, reference_outputs
from .stats import SignificanceCriteria, decode_z

log = logging.getLogger("motifscope")

EXIT_OK, EXIT_USAGE, EXIT_INPUT, EXIT_RESOURCE, EXIT_EMPTY = 0, 1, 2, 3, 4
CLI_TIMEOUT = 3600.0
_STEER = {"ff": "feed_forward", "rec": "recurrent", "none": None}


class UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        self.exit(EXIT_USAGE, f"{self.prog}: error: {message}\n")


def version_text() -> str:
    refs = " ".join(f"0x{x:016x}" for x in reference_outputs(0, 4))
    return f"motif {__version__} (rng {RNG_NAME}; seed 0 -> {refs}; kernels: {_kernels.backend()})"


class _VersionAction(argparse.Action):
    def __init__(self, option_strings, dest=argparse.SUPPRESS, default=argparse.SUPPRESS, help=None):
        super().__init__(option_strings, dest, nargs=0, default=default,
                         help="print version, RNG id and its seed-0 reference outputs")

    def __call__(self, parser, namespace, values, option_string=None):
        sys.stdout.write(version_text() + "\n")
        parser.exit(EXIT_OK)


def _workers(value) -> int:
    n = int(value)
    if n < 1:
        raise argparse.ArgumentTypeError("must be a positive integer")
    return n


def _graph_args(p):
    p.add_argument("--graph", required=True, help="edge-list CSV")
    p.add_argument("--vertex-attrs", help="vertex attribute CSV (id,key1,...)")
    p.add_argument("--edge-attrs", help="edge attribute CSV (src,dst,key1,...)")
    p.add_argument("--min-weight", type=float, help="drop edges whose weight is below W")


def build_parser() -> argparse.ArgumentParser:
    parser = _Parser(prog="motif", description=__doc__.splitlines()[0])
    parser.add_argument("--version", action=_VersionAction)
    parser.add_argument("--quiet", action="store_true", help="suppress info logs on stderr")
    parser.add_argument("--config", help="key = value file; explicit flags win")
    sub = parser.add_subparsers(dest="command", required=True, parser_class=_Parser)
    ncpu = os.cpu_count() or 1

    p = sub.add_parser("count", help="count motif mappings")
    _graph_args(p)
    p.add_argument("--motif", required=True, help=".motif file")
    p.add_argument("--workers", type=_workers, default=ncpu)
    p.add_argument("--induced", action="store_true")
    p.add_argument("--timeout", type=float, default=CLI_TIMEOUT, help="seconds")

    p = sub.add_parser("find", help="enumerate motif mappings as NDJSON")
    _graph_args(p)
    p.add_argument("--motif", required=True)
    p.add_argument("--workers", type=_workers, default=ncpu)
    p.add_argument("--induced", action="store_true")
    p.add_argument("--timeout", type=float, default=CLI_TIMEOUT)
    p.add_argument("--limit", type=int)
    p.add_argument("--out", help="write NDJSON here instead of stdout")

    p = sub.add_parser("randomize", help="write an X-swap null ensemble")
    _graph_args(p)
    p.add_argument("--samples", type=int, required=True)
    p.add_argument("--seed", type=int, required=True)
    p.add_argument("--swap-factor", type=float, default=10.0)
    p.add_argument("--workers", type=_workers, default=ncpu)
    p.add_argument("--out", required=True, help="output directory")

    p = sub.add_parser("discover", help="greedy motif discovery")
    _graph_args(p)
    p.add_argument("--size-min", type=int, default=3)
    p.add_argument("--size-max", type=int, default=5)
    p.add_argument("--target", type=int, default=10)
    p.add_argument("--nulls", type=int, default=100)
    p.add_argument("--z-min", type=float, default=2.0)
    p.add_argument("--p-max", type=float, default=0.05)
    p.add_argument("--min-count", type=int, default=5)
    p.add_argument("--steer", choices=sorted(_STEER), default="none")
    p.add_argument("--attr-keys", default="", help="comma-separated vertex attribute keys")
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--swap-factor", type=float, default=10.0)
    p.add_argument("--max-rounds", type=int, default=12)
    p.add_argument("--motif-timeout", type=float, default=60.0, help="per-motif budget, seconds")
    p.add_argument("--frontier-cap", type=int, default=1000)
    p.add_argument("--workers", type=_workers, default=ncpu)
    p.add_argument("--out", required=True, help="output directory")

    p = sub.add_parser("report", help="render a results.json")
    p.add_argument("--results", required=True)
    p.add_argument("--format", choices=("table", "markdown", "json"), default="table")
    return parser


def read_config(path) -> dict[str, str]:
    cp = configparser.ConfigParser(interpolation=None)
    with open(path, encoding="utf-8") as fh:
        text = fh.read()
    if not text.lstrip().startswith("["):
        text = "[run]\n" + text
    cp.read_string(text)
    out = {}
    for section in cp.sections():
        for k, v in cp.items(section):
            out[k.replace("-", "_")] = v.strip().strip('"')
    return out


def _apply_config(parser, argv, path):
    values = read_config(path)
    sub = next(a for a in parser._actions if isinstance(a, argparse._SubParsersAction))
    for name, sp in sub.choices.items():
        known = {a.dest: a for a in sp._actions}
        defaults = {}
        for k, v in values.items():
            act = known.get(k)
            if act is None:
                continue
            if isinstance(act, argparse._StoreTrueAction):
                defaults[k] = v.lower() in ("1", "true", "yes", "on")
            else:
                defaults[k] = v
                act.required = False
        sp.set_defaults(**defaults)
    return parser.parse_args(argv)


def _load(args):
    return load_graph(args.graph, args.vertex_attrs, args.edge_attrs, min_weight=args.min_weight)


def _motif(args):
    return read_motif(args.motif, induced=getattr(args, "induced", False))


def _emit_json(obj):
    sys.stdout.write(json.dumps(obj) + "\n")


# -- subcommands -------------------------------------------------------------------

def cmd_count(args) -> int:
    q = _motif(args)
    g = _load(args)
    t0 = time.perf_counter()
    try:
        res = count_monomorphisms(q, g, workers=args.workers, timeout=args.timeout)
    except SearchTimeout as exc:
        _emit_json({"count": exc.result.count, "truncated": True,
                    "elapsed_ms": round((time.perf_counter() - t0) * 1000, 3)})
        raise
    _emit_json({"count": res.count, "truncated": res.truncated,
                "elapsed_ms": round((time.perf_counter() - t0) * 1000, 3)})
    return EXIT_OK


def cmd_find(args) -> int:
    q = _motif(args)
    g = _load(args)
    try:
        fh = open(args.out, "w", encoding="utf-8") if args.out else sys.stdout
    except OSError as exc:
        raise GraphFormatError(f"cannot write {args.out}: {exc.strerror}") from exc
    try:
        try:
            res = enumerate_monomorphisms(q, g, limit=args.limit, workers=args.workers, timeout=args.timeout)
        except SearchTimeout as exc:
            exc.result.write_ndjson(fh)
            raise
        res.write_ndjson(fh)
    finally:
        if fh is not sys.stdout:
            fh.close()
    log.info("%d mappings%s", res.count, " (truncated)" if res.truncated else "")
    return EXIT_OK


def cmd_randomize(args) -> int:
    g = _load(args)
    if args.samples < 1:
        raise UsageError("--samples must be at least 1")
    cfg = SwapConfig(args.swap_factor, args.seed)
    ens = build_ensemble(g, cfg, args.samples, workers=args.workers)
    try:
        ens.write(args.out)
    except OSError as exc:
        raise GraphFormatError(f"cannot write {args.out}: {exc}") from exc
    log.info("wrote %d samples to %s", len(ens), args.out)
    return EXIT_OK


def _config_from_args(args) -> DiscoveryConfig:
    if not 2 <= args.size_min <= MAX_MOTIF_SIZE:
        raise UsageError(f"--size-min must be in [2, {MAX_MOTIF_SIZE}]")
    keys = tuple(k.strip() for k in args.attr_keys.split(",") if k.strip())
    try:
        return DiscoveryConfig(
            size_min=args.size_min, size_max=args.size_max,
            target_count=args.target,
            criteria=SignificanceCriteria(args.z_min, args.p_max, args.min_count),
            attribute_keys=keys, steer=_STEER[args.steer], seed=args.seed,
            n_samples=args.nulls, swap_factor=args.swap_factor, max_rounds=args.max_rounds,
            motif_timeout=args.motif_timeout, frontier_cap=args.frontier_cap, workers=args.workers)
    except ValueError as exc:
        raise UsageError(str(exc)) from exc


def cmd_discover(args) -> int:
    from .dsl import label_id

    cfg = _config_from_args(args)
    g = _load(args)
    try:
        os.makedirs(os.path.join(args.out, "discovered"), exist_ok=True)
    except OSError as exc:
        raise GraphFormatError(f"cannot write {args.out}: {exc}") from exc
    result = discover(g, cfg)
    rows = result.results()
    for row in rows:
        name = f"{row['rank']:03}_{label_id(row['label'].encode())}.motif"
        with open(os.path.join(args.out, "discovered", name), "w", encoding="utf-8") as fh:
            fh.write(row["motif"])
    with open(os.path.join(args.out, "results.json"), "w", encoding="utf-8") as fh:
        json.dump(rows, fh, indent=2)
        fh.write("\n")
    manifest = result.manifest()
    manifest["graph"] = {"edge_file": args.graph, "digest": result.ensemble.source_digest,
                         "vertices": g.n_vertices, "edges": g.n_edges}
    with open(os.path.join(args.out, "run_manifest.json"), "w", encoding="utf-8") as fh:
        json.dump(manifest, fh, indent=2)
        fh.write("\n")
    sys.stdout.write(render(rows, "table"))
    if not rows:
        log.warning("no significant motifs found")
        return EXIT_EMPTY
    return EXIT_OK


# -- report -------------------------------------------------------------------------

def _fmt_num(x):
    if isinstance(x, str):
        return x
    if isinstance(x, float):
        if math.isinf(x):
            return "+inf" if x > 0 else "-inf"
        return f"{x:.4g}"
    return str(x)


def _row_cells(r):
    motif = "; ".join(line for line in r["motif"].splitlines() if line.strip())
    depth = r.get("lineage_depth", len(r.get("lineage", [])) - 1 if r.get("lineage") else 0)
    return [str(r["rank"]), motif, str(r["observed"]), _fmt_num(decode_z(r["z"])),
            _fmt_num(float(r["p_empirical"])), r.get("topology", ""), str(depth)]


_HEAD = ["rank", "motif", "count", "z", "p", "topology", "depth"]


def render(rows: list[dict], fmt: str) -> str:
    if fmt == "json":
        return json.dumps(rows, indent=2, sort_keys=True) + "\n"
    if not rows:
        return "no motifs\n"
    cells = [_row_cells(r) for r in rows]
    if fmt == "markdown":
        lines = ["| " + " | ".join(_HEAD) + " |", "|" + "---|" * len(_HEAD)]
        lines += ["| " + " | ".join(c.replace("|", "\\|") for c in row) + " |" for row in cells]
        return "\n".join(lines) + "\n"
    widths = [max(len(h), *(len(row[i]) for row in cells)) for i, h in enumerate(_HEAD)]
    fmt_line = lambda row: "  ".join(c.ljust(w) for c, w in zip(row, widths)).rstrip()  # noqa: E731
    return "\n".join([fmt_line(_HEAD)] + [fmt_line(row) for row in cells]) + "\n"


def _validate_results(data):
    if not isinstance(data, list):
        raise ValueError("results must be a JSON array")
    for r in data:
        if not isinstance(r, dict):
            raise ValueError("each result must be an object")
        for key in ("rank", "motif", "observed", "z", "p_empirical"):
            if key not in r:
                raise ValueError(f"result missing {key!r}")
        decode_z(r["z"])
        float(r["p_empirical"])


def cmd_report(args) -> int:
    try:
        with open(args.results, encoding="utf-8") as fh:
            data = json.load(fh)
        _validate_results(data)
    except (ValueError, TypeError) as exc:
        raise GraphFormatError(f"malformed results file {args.results}: {exc}") from exc
    sys.stdout.write(render(data, args.format))
    return EXIT_OK


COMMANDS = {"count": cmd_count, "find": cmd_find, "randomize": cmd_randomize,
            "discover": cmd_discover, "report": cmd_report}


def main(argv=None) -> int:
    argv = sys.argv[1:] if argv is None else list(argv)
    parser = build_parser()
    pre = argparse.ArgumentParser(add_help=False)
    pre.add_argument("--config")
    pre.add_argument("--quiet", action="store_true")
    known, _ = pre.parse_known_args(argv)
    logging.basicConfig(level=logging.WARNING if known.quiet else logging.INFO,
                        stream=sys.stderr, format="%(levelname)s %(name)s: %(message)s", force=True)
    logging.captureWarnings(True)
    warnings.simplefilter("always", DegenerateSwapWarning)
    try:
        try:
            if known.config:
                args = _apply_config(parser, argv, known.config)
            else:
                args = parser.parse_args(argv)
        except SystemExit as exc:  # usage errors, --help and --version
            return EXIT_OK if exc.code in (0, None) else EXIT_USAGE
        return COMMANDS[args.command](args)
    except UsageError as exc:
        log.error("%s", exc)
        return EXIT_USAGE
    except MotifError as exc:
        log.error("motif: %s", exc)
        return EXIT_USAGE
    except (configparser.Error,) as exc:
        log.error("config: %s", exc)
        return EXIT_USAGE
    except SearchTimeout as exc:
        log.error("%s", exc)
        return EXIT_RESOURCE
    except MemoryError:
        log.error("out of memory")
        return EXIT_RESOURCE
    except (FileNotFoundError, IsADirectoryError) as exc:
        log.error("no such file: %s", exc.filename or exc)
        return EXIT_INPUT
    except (GraphFormatError, TooFewEdges, EnsembleFailure, AttributeTypeError, OSError,
            UnicodeDecodeError) as exc:
        log.error("%s", exc)
        return EXIT_INPUT


if __name__ == "__main__":  # pragma: no cover
    sys.exit(main())
