"""Command-line front end.

Subcommands: ``simulate`` (threshold-noise Monte-Carlo grids),
``benchmark`` (RSS / TOA method comparisons) and ``localize`` (file-based
measurement pipeline).  Every run writes result files plus a manifest
that fully determines the outputs (config echo + seed), written last.

Exit codes: 0 success, 1 config error, 2 input-file error, 3 numerical
failure (unreliable result).
"""

from __future__ import annotations

import argparse
import datetime
import json
import os
import sys
from dataclasses import asdict
from pathlib import Path

import numpy as np

from . import __version__
from .bench import (
    CSV_COLUMNS,
    ExperimentConfig,
    result_to_csv,
    result_to_json,
    rss_comparison_suite,
    run_benchmark,
    toa_comparison_suite,
)
from .core import ConfigError, InputError, OrdinalUnlocError, read_sensor_field
from .ingest import (
    DEFAULT_KEEP_FRACTION,
    measurement_signal_matrix,
    min_link_sample_count,
    parse_measurements,
    select_strong_links,
)
from .ordinal import tensor_from_signals
from .pipeline import localize_from_tensor
from .unfold import SolverOptions

DEFAULT_TOA_NOISE_GRID = tuple(float(v) for v in np.logspace(-2, 2, 7))

_EPILOG = (
    "results.csv columns: " + ",".join(CSV_COLUMNS) + ". "
    "positions.csv columns: target_id,sample,x,y[,z]."
)


class _Parser(argparse.ArgumentParser):
    # usage problems are config errors (exit code 1), not argparse's 2
    def error(self, message):
        raise ConfigError(message)


def _int_list(text: str) -> tuple[int, ...]:
    """Parse '5,10,20' or an inclusive range '5:20:5'."""
    text = text.strip()
    if ":" in text:
        parts = [int(p) for p in text.split(":")]
        if len(parts) == 2:
            start, stop, step = parts[0], parts[1], 1
        elif len(parts) == 3:
            start, stop, step = parts
        else:
            raise ConfigError(f"bad range {text!r}; expected start:stop[:step]")
        if step <= 0:
            raise ConfigError("range step must be positive")
        return tuple(range(start, stop + 1, step))
    try:
        return tuple(int(p) for p in text.split(",") if p.strip() != "")
    except ValueError:
        raise ConfigError(f"bad integer list {text!r}") from None


def _float_list(text: str) -> tuple[float, ...]:
    try:
        return tuple(float(p) for p in text.split(",") if p.strip() != "")
    except ValueError:
        raise ConfigError(f"bad number list {text!r}") from None


def _positive_int(text: str) -> int:
    try:
        value = int(text)
    except ValueError:
        raise ConfigError(f"expected an integer, got {text!r}") from None
    return value


def build_parser() -> argparse.ArgumentParser:
    parser = _Parser(prog="ordinal-unloc", epilog=_EPILOG)
    parser.add_argument("--version", action="version", version=__version__)
    sub = parser.add_subparsers(dest="command", required=True)

    def common(p):
        p.add_argument("--config", help="flat key=value config file; flags override")
        p.add_argument("--out", default="results", help="output directory")
        p.add_argument("--seed", type=_positive_int, default=None)
        p.add_argument("--threads", type=_positive_int, default=os.cpu_count() or 1)
        p.add_argument("--restarts", type=_positive_int, default=8)

    sim = sub.add_parser("simulate", help="ordinal-noise Monte-Carlo grid", epilog=_EPILOG)
    common(sim)
    sim.add_argument("--kind", default="ordinal", help="must be 'ordinal'")
    sim.add_argument("--anchors", type=_int_list, default=(5, 10, 15, 20))
    sim.add_argument("--sigma", type=_float_list, default=(0.0, 0.1, 0.3, 0.5))
    sim.add_argument("--targets", type=_positive_int, default=1)
    sim.add_argument("--field-side", type=float, default=1.0)
    sim.add_argument("--trials", type=_positive_int, default=2000)
    sim.set_defaults(func=cmd_simulate)

    ben = sub.add_parser("benchmark", help="RSS/TOA method comparison", epilog=_EPILOG)
    common(ben)
    ben.add_argument("--kind", default=None, help="'rss' or 'toa'")
    ben.add_argument("--anchors", type=_int_list, default=(5, 10, 15, 20))
    ben.add_argument("--noise", type=_float_list, default=None, help="c*sigma_T^2 grid (toa)")
    ben.add_argument("--targets", type=_positive_int, default=1)
    ben.add_argument("--field-side", type=float, default=None, help="default 10 (rss), 200 (toa)")
    ben.add_argument("--g-range", type=_float_list, default=(2.0, 6.0))
    ben.add_argument("--calibration-g", type=float, default=4.0)
    ben.add_argument("--propagation-speed", type=float, default=1.0)
    ben.add_argument("--trials", type=_positive_int, default=2000)
    ben.set_defaults(func=cmd_benchmark)

    loc = sub.add_parser("localize", help="file-based measurement pipeline", epilog=_EPILOG)
    common(loc)
    loc.add_argument("measurements", help="measurement file (roster, '---', records)")
    loc.add_argument("--field", default=None, help="sensor field CSV overriding the roster")
    loc.add_argument("--keep-fraction", type=float, default=DEFAULT_KEEP_FRACTION)
    loc.add_argument("--aggregator", default="sample", help="median, mean or sample")
    loc.set_defaults(func=cmd_localize)
    return parser


def _apply_config_file(args: argparse.Namespace, argv: list[str]) -> None:
    """Apply key=value file entries for flags not given on the command line."""
    if not args.config:
        return
    path = Path(args.config)
    if not path.exists():
        raise InputError(f"config file not found: {path}")
    explicit = {tok.split("=", 1)[0] for tok in argv if tok.startswith("--")}
    converters = {
        "anchors": _int_list,
        "sigma": _float_list,
        "noise": _float_list,
        "g_range": _float_list,
        "targets": _positive_int,
        "trials": _positive_int,
        "seed": _positive_int,
        "threads": _positive_int,
        "restarts": _positive_int,
        "field_side": float,
        "calibration_g": float,
        "propagation_speed": float,
        "keep_fraction": float,
    }
    for line_no, raw in enumerate(path.read_text(encoding="utf-8").splitlines(), 1):
        line = raw.strip()
        if not line or line.startswith("#"):
            continue
        if "=" not in line:
            raise ConfigError(f"{path}:{line_no}: expected key=value")
        key, value = (part.strip() for part in line.split("=", 1))
        dest = key.replace("-", "_")
        if not hasattr(args, dest):
            raise ConfigError(f"{path}:{line_no}: unknown key {key!r}")
        if f"--{dest.replace('_', '-')}" in explicit:
            continue
        convert = converters.get(dest, str)
        setattr(args, dest, convert(value))


def _resolve_seed(args) -> int:
    if args.seed is not None:
        return int(args.seed)
    return int(np.random.SeedSequence().entropy % (2**63))


def _write_outputs(out_dir: Path, files: dict[str, str], manifest: dict) -> list[Path]:
    out_dir.mkdir(parents=True, exist_ok=True)
    written = []
    for name, content in files.items():
        path = out_dir / name
        path.write_text(content, encoding="utf-8")
        written.append(path)
    manifest["outputs"] = [str(p) for p in written]
    manifest["finished"] = datetime.datetime.now(datetime.timezone.utc).isoformat()
    manifest_path = out_dir / "manifest.json"
    manifest_path.write_text(json.dumps(manifest, indent=2, sort_keys=True), encoding="utf-8")
    return written + [manifest_path]


def _manifest_stub(command: str, config: dict, seed: int) -> dict:
    return {
        "command": command,
        "version": __version__,
        "seed": seed,
        "config": config,
        "started": datetime.datetime.now(datetime.timezone.utc).isoformat(),
    }


def _experiment_config(args, kind, noise_grid, field_side) -> ExperimentConfig:
    g_range = tuple(args.g_range) if hasattr(args, "g_range") else (2.0, 6.0)
    if len(g_range) != 2:
        raise ConfigError(f"g-range needs exactly two values, got {g_range}")
    return ExperimentConfig(
        kind=kind,
        anchor_counts=tuple(args.anchors),
        n_targets=args.targets,
        field_side=field_side,
        noise_grid=noise_grid,
        trials=args.trials,
        seed=args.resolved_seed,
        exponent_low=g_range[0],
        exponent_high=g_range[1],
        calibration_exponent=getattr(args, "calibration_g", 4.0),
        propagation_speed=getattr(args, "propagation_speed", 1.0),
        solver=SolverOptions(restarts=args.restarts),
    )


def cmd_simulate(args) -> int:
    if args.kind != "ordinal":
        raise ConfigError(f"simulate supports kind 'ordinal', got {args.kind!r}")
    config = _experiment_config(args, "ordinal", tuple(args.sigma), args.field_side)
    manifest = _manifest_stub("simulate", asdict(config), config.seed)
    result = run_benchmark(config, threads=args.threads)
    _write_outputs(
        Path(args.out),
        {"results.csv": result_to_csv(result), "results.json": result_to_json(result)},
        manifest,
    )
    return 3 if result.unreliable.any() else 0


def cmd_benchmark(args) -> int:
    if args.kind not in ("rss", "toa"):
        raise ConfigError(f"benchmark kind must be 'rss' or 'toa', got {args.kind!r}")
    if args.kind == "rss":
        # room-scale field; sub-unit distances make the fixed-G bias vanish
        field_side = args.field_side if args.field_side is not None else 10.0
        config = _experiment_config(args, "rss", (), field_side)
        suite = rss_comparison_suite
    else:
        field_side = args.field_side if args.field_side is not None else 200.0
        noise = tuple(args.noise) if args.noise is not None else DEFAULT_TOA_NOISE_GRID
        config = _experiment_config(args, "toa", noise, field_side)
        suite = toa_comparison_suite
    manifest = _manifest_stub("benchmark", asdict(config), config.seed)
    result = suite(config, threads=args.threads)
    _write_outputs(
        Path(args.out),
        {"results.csv": result_to_csv(result), "results.json": result_to_json(result)},
        manifest,
    )
    return 3 if result.unreliable.any() else 0


def _positions_csv(field, estimates_per_target, labels) -> str:
    axes = ["x", "y", "z"][: field.dimension]
    lines = ["target_id," + "sample," + ",".join(axes)]
    for t, target_id in enumerate(field.target_ids):
        rows = estimates_per_target[t]
        for label, pos in zip(labels, rows):
            lines.append(f"{target_id},{label}," + ",".join(repr(float(c)) for c in pos))
        average = np.mean(np.array(rows), axis=0)
        lines.append(f"{target_id},average," + ",".join(repr(float(c)) for c in average))
    return "\n".join(lines) + "\n"


def cmd_localize(args) -> int:
    if args.aggregator not in ("median", "mean", "sample"):
        raise ConfigError(f"unknown aggregator {args.aggregator!r}")
    if not (0 < args.keep_fraction <= 1):
        raise ConfigError(f"keep-fraction must be in (0, 1], got {args.keep_fraction}")
    ms = parse_measurements(args.measurements)
    field = ms.field
    if args.field is not None:
        override = read_sensor_field(args.field)
        if set(override.anchor_ids) != set(field.anchor_ids):
            raise InputError("--field anchor ids do not match the measurement roster")
        field = override
    if field.m < 2:
        raise InputError(f"need at least 2 anchors, roster has {field.m}")
    ms = select_strong_links(ms, args.keep_fraction)
    seed = args.resolved_seed
    opts = SolverOptions(restarts=args.restarts, seed=seed)

    if args.aggregator == "sample":
        n_samples = min_link_sample_count(ms)
        if n_samples < 1:
            raise InputError("no retained measurements to localize from")
        matrices = [
            measurement_signal_matrix(ms, "sample", sample_index=k)
            for k in range(1, n_samples + 1)
        ]
        labels = [str(k) for k in range(1, n_samples + 1)]
    else:
        matrices = [measurement_signal_matrix(ms, args.aggregator)]
        labels = [args.aggregator]

    estimates_per_target = [[] for _ in range(field.n)]
    any_failed = False
    for sig in matrices:
        results, _ = localize_from_tensor(tensor_from_signals(sig), field.anchors, opts)
        for t, res in enumerate(results):
            if res is None:
                any_failed = True
                continue
            estimates_per_target[t].append(res.position)
    if any(len(rows) == 0 for rows in estimates_per_target):
        raise OrdinalUnlocError("localization failed for at least one target")

    config = {
        "measurements": str(args.measurements),
        "field": args.field,
        "keep_fraction": args.keep_fraction,
        "aggregator": args.aggregator,
        "restarts": args.restarts,
    }
    manifest = _manifest_stub("localize", config, seed)
    _write_outputs(
        Path(args.out),
        {"positions.csv": _positions_csv(field, estimates_per_target, labels)},
        manifest,
    )
    return 3 if any_failed else 0


def main(argv: list[str] | None = None) -> int:
    argv = list(sys.argv[1:] if argv is None else argv)
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
        _apply_config_file(args, argv)
        args.resolved_seed = _resolve_seed(args)
        return args.func(args)
    except ConfigError as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return 1
    except (InputError, OSError) as exc:
        print(f"input error: {exc}", file=sys.stderr)
        return 2
    except OrdinalUnlocError as exc:
        print(f"numerical failure: {exc}", file=sys.stderr)
        return 3


if __name__ == "__main__":
    raise SystemExit(main())
