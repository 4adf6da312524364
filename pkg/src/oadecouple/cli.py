"""Command-line interface.

Subcommands cover array construction and verification, scheme
compilation and derived forms, the trace-distance and controlization
benchmarks, interaction-graph coloring, and resource estimation.

Exit codes are a stable contract: 0 success, 2 usage, 3 file or parse
trouble, 4 verification or guard failure.  Benchmark commands write a
CSV plus a JSON manifest echoing the resolved configuration, seed, and
timings next to it.

Benchmark configs are INI files (configparser dialect, version ini-v1)
with sections [hamiltonian], [scheme], and [run]:

    [hamiltonian]
    qubits = 8
    kind = sparse          ; sparse | dense_all | chain | zero
    terms = 40             ; sparse only
    seed = 1

    [scheme]
    array = 32.9.4.2       ; builtin name or path to an array file
    columns = 0,1,2,3,4,5,6,7

    [run]
    blocks = 1,2,4,8,16,32,64
    states = 10
    time = 1.0
    seed = 7
    variants = det-first,det-second,rand-first,rand-second,qdrift-full,qdrift-oa
    reps = 100             ; optional override for randomized variants

Every key has a default except [hamiltonian] qubits; `bench controlize`
reuses blocks as the Trotter-step sweep and defaults variants to the
two deterministic ones.
"""

from __future__ import annotations

import argparse
import json
import sys
import time
from configparser import ConfigParser, Error as ConfigError
from pathlib import Path

from . import __version__
from .errors import ParseError, VerificationError
from .gf import field_for_order
from .hamiltonian import (
    InteractionGraph,
    from_text,
    greedy_coloring,
    interaction_graph,
    random_chain,
    random_grid,
)
from .oa import (
    BUILTIN_ARRAYS,
    builtin_array,
    construct_rao_hamming,
    load,
    restrict_columns,
    to_text,
    verify,
)
from .protocols import (
    DEFAULT_VARIANTS,
    ExperimentConfig,
    estimate_resources,
    run_controlization_experiment,
    run_decoupling_experiment,
    write_csv,
)
from .schemes import (
    controlize,
    derive_time_reversal,
    load_text,
    save_text,
    scheme_from_oa,
    us_to_vs,
    weight_report,
)

CONFIG_DIALECT = "ini-v1"

_VARIANTS_BY_LABEL = {v.label: v for v in DEFAULT_VARIANTS}

_DETERMINISTIC_LABELS = ("det-first", "det-second")


class _UsageError(Exception):
    pass


def _int_list(text: str) -> tuple[int, ...]:
    try:
        return tuple(int(part) for part in text.split(",") if part.strip())
    except ValueError:
        raise argparse.ArgumentTypeError(f"not a comma-separated int list: {text!r}")


def _load_array_arg(name: str, levels: int, strength: int, transpose: bool = False):
    if name in BUILTIN_ARRAYS:
        return builtin_array(name)
    return load(Path(name).read_text(), levels, strength, transpose=transpose)


def _emit(text: str, out: str | None) -> None:
    if out is None:
        sys.stdout.write(text)
    else:
        Path(out).write_text(text)


# ---------------------------------------------------------------------------
# oa


def _cmd_oa_construct(args) -> int:
    field = field_for_order(args.s)
    arr = construct_rao_hamming(field, args.ell)
    report = verify(arr)
    if not report.ok:
        raise VerificationError(report.message())
    _emit(to_text(arr), args.out)
    print(f"{arr!r}: OK strength {arr.strength}, lambda {arr.multiplicity}")
    return 0


def _cmd_oa_verify(args) -> int:
    arr = _load_array_arg(args.file, args.s, args.t, transpose=args.transpose)
    print(f"{arr!r}: OK strength {arr.strength}, lambda {arr.multiplicity}")
    return 0


def _cmd_oa_restrict(args) -> int:
    arr = _load_array_arg(args.file, args.s, args.t, transpose=args.transpose)
    sub = restrict_columns(arr, args.columns)
    _emit(to_text(sub), args.out)
    print(f"{sub!r}: kept columns {','.join(map(str, args.columns))}")
    return 0


# ---------------------------------------------------------------------------
# scheme


def _cmd_scheme_compile(args) -> int:
    levels = args.d * args.d
    arr = _load_array_arg(args.oa, levels, args.strength)
    if args.columns is not None:
        arr = restrict_columns(arr, args.columns)
    scheme = scheme_from_oa(arr, args.d)
    _emit(save_text(scheme), args.out)
    print(f"compiled {len(scheme)}-step decoupling scheme on {scheme.n} qudits")
    return 0


def _cmd_scheme_controlize(args) -> int:
    scheme = controlize(load_text(Path(args.scheme).read_text()))
    _emit(save_text(scheme), args.out)
    print(f"controlization scheme with {len(scheme)} controlled steps")
    return 0


def _cmd_scheme_reverse(args) -> int:
    scheme = derive_time_reversal(load_text(Path(args.scheme).read_text()))
    _emit(save_text(scheme), args.out)
    print(
        f"time-reversal scheme with {len(scheme)} steps, "
        f"total duration {scheme.total_duration:g}"
    )
    return 0


def _cmd_scheme_export(args) -> int:
    scheme = load_text(Path(args.scheme).read_text())
    pulses = us_to_vs(scheme)
    lines = [
        "# interleaving pulses, applied between evolution slices",
        f"# kind={scheme.kind} n={scheme.n} d={scheme.d} pulses={len(pulses)}",
    ]
    lines.extend(str(v) for v in pulses)
    _emit("\n".join(lines) + "\n", args.out)
    print(f"exported {len(pulses)} pulses")
    return 0


def _cmd_scheme_weights(args) -> int:
    scheme = load_text(Path(args.scheme).read_text())
    report = weight_report(scheme)
    print("pulse weights:", " ".join(map(str, report.weights)))
    print(f"max={report.max_weight} mean={report.mean_weight:g}")
    return 0


# ---------------------------------------------------------------------------
# bench


def _section(cp: ConfigParser, name: str) -> dict:
    return dict(cp[name]) if cp.has_section(name) else {}


def _to_int(mapping: dict, key: str, default=None) -> int | None:
    if key not in mapping:
        if default is None and key == "qubits":
            raise ParseError("config is missing [hamiltonian] qubits")
        return default
    try:
        return int(mapping[key])
    except ValueError:
        raise ParseError(f"config key {key} is not an integer: {mapping[key]!r}")


def read_experiment_config(path: str, deterministic_only: bool = False) -> ExperimentConfig:
    text = Path(path).read_text()
    cp = ConfigParser()
    try:
        cp.read_string(text)
    except ConfigError as exc:
        raise ParseError(f"bad config: {exc}") from None
    ham = _section(cp, "hamiltonian")
    sch = _section(cp, "scheme")
    run = _section(cp, "run")

    blocks_text = run.get("blocks", "1,2,4,8,16,32,64")
    try:
        blocks = tuple(int(p) for p in blocks_text.split(",") if p.strip())
    except ValueError:
        raise ParseError(f"bad blocks list {blocks_text!r}")
    if not blocks:
        raise _UsageError("the blocks list is empty")

    default_labels = (
        ",".join(_DETERMINISTIC_LABELS)
        if deterministic_only
        else ",".join(v.label for v in DEFAULT_VARIANTS)
    )
    labels = [p.strip() for p in run.get("variants", default_labels).split(",") if p.strip()]
    unknown = [lb for lb in labels if lb not in _VARIANTS_BY_LABEL]
    if unknown:
        raise ParseError(
            f"unknown variants {unknown}; known: {sorted(_VARIANTS_BY_LABEL)}"
        )
    variants = tuple(_VARIANTS_BY_LABEL[lb] for lb in labels)

    columns = None
    if "columns" in sch:
        try:
            columns = tuple(int(p) for p in sch["columns"].split(",") if p.strip())
        except ValueError:
            raise ParseError(f"bad columns list {sch['columns']!r}")

    try:
        total_time = float(run.get("time", "1.0"))
    except ValueError:
        raise ParseError(f"bad time value {run.get('time')!r}")

    return ExperimentConfig(
        n_qubits=_to_int(ham, "qubits"),
        hamiltonian_kind=ham.get("kind", "sparse"),
        hamiltonian_terms=_to_int(ham, "terms", 40),
        hamiltonian_seed=_to_int(ham, "seed", 1),
        oa_name=sch.get("array", "32.9.4.2"),
        oa_columns=columns,
        variants=variants,
        block_counts=blocks,
        total_time=total_time,
        n_states=_to_int(run, "states", 10),
        reps_override=_to_int(run, "reps", None),
        master_seed=_to_int(run, "seed", 7),
    )


def _write_manifest(args, cfg: ExperimentConfig, kind: str, elapsed: float, n_rows: int):
    cp = ConfigParser()
    cp.read_string(Path(args.config).read_text())
    manifest = {
        "tool": "oadecouple",
        "version": __version__,
        "config_dialect": CONFIG_DIALECT,
        "command": f"bench {kind}",
        "config_file": str(args.config),
        "config": {name: dict(cp[name]) for name in cp.sections()},
        "master_seed": cfg.master_seed,
        "rows": n_rows,
        "output": str(args.out),
        "elapsed_seconds": elapsed,
    }
    path = Path(args.out).with_suffix(".manifest.json")
    path.write_text(json.dumps(manifest, indent=2, sort_keys=True) + "\n")


def _cmd_bench(args) -> int:
    deterministic_only = args.kind == "controlize"
    cfg = read_experiment_config(args.config, deterministic_only=deterministic_only)
    started = time.perf_counter()
    if args.kind == "decouple":
        rows = run_decoupling_experiment(cfg)
    else:
        rows = run_controlization_experiment(cfg)
    elapsed = time.perf_counter() - started
    write_csv(rows, args.out)
    _write_manifest(args, cfg, args.kind, elapsed, len(rows))
    print(f"wrote {len(rows)} rows to {args.out} in {elapsed:.1f}s")
    return 0


# ---------------------------------------------------------------------------
# color / estimate


def _cmd_color(args) -> int:
    chosen = [
        args.file is not None,
        args.chain is not None,
        args.grid is not None,
        args.complete is not None,
    ]
    if sum(chosen) != 1:
        raise _UsageError("pick exactly one of --file, --chain, --grid, --complete")
    if args.complete is not None:
        n = args.complete
        edges = frozenset((i, j) for i in range(n) for j in range(i + 1, n))
        graph = InteractionGraph(n, edges)
    else:
        if args.file is not None:
            h = from_text(Path(args.file).read_text())
        elif args.chain is not None:
            h = random_chain(args.chain, args.seed)
        else:
            rows, cols = args.grid
            h = random_grid(rows, cols, args.seed)
        graph = interaction_graph(h)
    coloring = greedy_coloring(graph)
    print("colors:", " ".join(map(str, coloring.assignment)))
    print(f"count: {coloring.count}")
    print(f"decoupling this interaction graph needs {coloring.count} array columns")
    return 0


def _grid_shape(text: str) -> tuple[int, int]:
    parts = text.lower().split("x")
    if len(parts) != 2:
        raise argparse.ArgumentTypeError(f"grid shape must look like 4x5, got {text!r}")
    try:
        return int(parts[0]), int(parts[1])
    except ValueError:
        raise argparse.ArgumentTypeError(f"grid shape must look like 4x5, got {text!r}")


def _cmd_estimate(args) -> int:
    est = estimate_resources(
        args.runs, args.time, args.norm, args.eps, args.order, args.c1, args.c2
    )
    print(f"trotter_steps={est.trotter_steps} controlled_ops={est.controlled_ops}")
    return 0


# ---------------------------------------------------------------------------
# parser


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="oadecouple",
        description="Orthogonal-array decoupling, controlization, and benchmarks.",
    )
    parser.add_argument("--version", action="version", version=__version__)
    sub = parser.add_subparsers(dest="command", required=True)

    oa_p = sub.add_parser("oa", help="construct, verify, or restrict arrays")
    oa_sub = oa_p.add_subparsers(dest="action", required=True)

    p = oa_sub.add_parser("construct", help="Rao-Hamming array for prime-power s")
    p.add_argument("--s", type=int, required=True, help="symbol count (prime power)")
    p.add_argument("--ell", type=int, required=True, help="exponent: N = s^ell runs")
    p.add_argument("--out", help="output file (stdout if omitted)")
    p.set_defaults(func=_cmd_oa_construct)

    p = oa_sub.add_parser("verify", help="exhaustively check strength and multiplicity")
    p.add_argument("--file", required=True)
    p.add_argument("--s", type=int, required=True, help="symbol count")
    p.add_argument("--t", type=int, required=True, help="strength to check")
    p.add_argument("--transpose", action="store_true", help="file stores columns as lines")
    p.set_defaults(func=_cmd_oa_verify)

    p = oa_sub.add_parser("restrict", help="keep a subset of columns")
    p.add_argument("--file", required=True)
    p.add_argument("--s", type=int, required=True)
    p.add_argument("--t", type=int, required=True)
    p.add_argument("--columns", type=_int_list, required=True, help="e.g. 0,1,4")
    p.add_argument("--transpose", action="store_true")
    p.add_argument("--out", help="output file (stdout if omitted)")
    p.set_defaults(func=_cmd_oa_restrict)

    sch_p = sub.add_parser("scheme", help="compile and transform schemes")
    sch_sub = sch_p.add_subparsers(dest="action", required=True)

    p = sch_sub.add_parser("compile", help="array to decoupling scheme")
    p.add_argument("--oa", required=True, help="builtin array name or file path")
    p.add_argument("--d", type=int, default=2, help="qudit dimension (default 2)")
    p.add_argument("--strength", type=int, default=2, help="strength of a file array")
    p.add_argument("--columns", type=_int_list, help="restrict before compiling")
    p.add_argument("--out", help="output file (stdout if omitted)")
    p.set_defaults(func=_cmd_scheme_compile)

    p = sch_sub.add_parser("controlize", help="mark every step controlled")
    p.add_argument("--scheme", required=True)
    p.add_argument("--out")
    p.set_defaults(func=_cmd_scheme_controlize)

    p = sch_sub.add_parser("reverse", help="derive the time-reversal scheme")
    p.add_argument("--scheme", required=True)
    p.add_argument("--out")
    p.set_defaults(func=_cmd_scheme_reverse)

    p = sch_sub.add_parser("export", help="write the interleaving pulse list")
    p.add_argument("--scheme", required=True)
    p.add_argument("--out")
    p.set_defaults(func=_cmd_scheme_export)

    p = sch_sub.add_parser("weights", help="pulse-weight report")
    p.add_argument("--scheme", required=True)
    p.set_defaults(func=_cmd_scheme_weights)

    bench_p = sub.add_parser("bench", help="run a benchmark from a config file")
    bench_p.add_argument("kind", choices=("decouple", "controlize"))
    bench_p.add_argument("--config", required=True, help="INI config file")
    bench_p.add_argument("--out", required=True, help="CSV output path")
    bench_p.set_defaults(func=_cmd_bench)

    color_p = sub.add_parser("color", help="interaction-graph coloring report")
    color_p.add_argument("--file", help="Hamiltonian text file")
    color_p.add_argument("--chain", type=int, help="nearest-neighbor chain length")
    color_p.add_argument("--grid", type=_grid_shape, help="grid shape, e.g. 4x5")
    color_p.add_argument("--complete", type=int, help="complete graph size")
    color_p.add_argument("--seed", type=int, default=0, help="generator seed")
    color_p.set_defaults(func=_cmd_color)

    est_p = sub.add_parser("estimate", help="Trotter-step and gate-count estimate")
    est_p.add_argument("--runs", type=int, required=True, help="array runs N")
    est_p.add_argument("--time", type=float, required=True)
    est_p.add_argument("--norm", type=float, required=True, help="spectral norm of H")
    est_p.add_argument("--eps", type=float, required=True)
    est_p.add_argument("--order", choices=("first", "second"), required=True)
    est_p.add_argument("--c1", type=float, default=1.0)
    est_p.add_argument("--c2", type=float, default=1.0)
    est_p.set_defaults(func=_cmd_estimate)

    return parser


def main(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return int(exc.code or 0)
    try:
        return args.func(args)
    except _UsageError as exc:
        print(f"usage error: {exc}", file=sys.stderr)
        return 2
    except (ParseError, OSError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 3
    except (VerificationError, ValueError) as exc:
        print(f"failed: {exc}", file=sys.stderr)
        return 4


if __name__ == "__main__":
    sys.exit(main())
