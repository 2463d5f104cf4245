"""Command-line entry point.

Exit codes: 0 success, 1 one or more scenarios failed, 2 malformed or
unreadable input.
"""

from __future__ import annotations

import argparse
import csv
import io
import json
import sys
from pathlib import Path

import numpy as np

from . import __version__, dft_codec, entropy, scenarios
from .bits import BitstreamError

EXIT_OK = 0
EXIT_SCENARIO_FAILED = 1
EXIT_BAD_INPUT = 2


class InputError(Exception):
    pass


def read_signal_csv(path: Path) -> np.ndarray:
    try:
        rows = np.loadtxt(path, delimiter=",", ndmin=2, dtype=np.float64)
    except (OSError, ValueError) as exc:
        raise InputError(f"{path}: cannot read signal CSV: {exc}") from None
    if rows.shape[1] == 1:
        return rows[:, 0].astype(np.complex128)
    if rows.shape[1] != 2:
        raise InputError(f"{path}: expected rows of 're,im', got {rows.shape[1]} columns")
    return rows[:, 0] + 1j * rows[:, 1]


def write_signal_csv(signal: np.ndarray, path: Path | None) -> None:
    buf = io.StringIO()
    np.savetxt(buf, np.column_stack([signal.real, signal.imag]), delimiter=",", fmt="%.17g")
    if path is None:
        sys.stdout.write(buf.getvalue())
    else:
        path.write_text(buf.getvalue())


def _read_bytes(path: Path) -> bytes:
    try:
        return path.read_bytes()
    except OSError as exc:
        raise InputError(f"{path}: {exc.strerror}") from None


# --- codec ----------------------------------------------------------------------


def cmd_codec(args: argparse.Namespace) -> int:
    if args.action == "encode":
        signal = read_signal_csv(args.input)
        if args.R is not None or args.b is not None:
            if args.R is None or args.b is None:
                raise InputError("--R and --b go together; omit both to search with --epsilon")
            try:
                params = dft_codec.CodecParams(signal.size, args.R, args.b)
            except dft_codec.CodecError as exc:
                raise InputError(str(exc)) from None
            stream = dft_codec.encode(signal, params)
        else:
            try:
                stream = dft_codec.minimal_encoding(signal, args.epsilon)
            except dft_codec.CodecError as exc:
                raise InputError(str(exc)) from None
        out = args.out or args.input.with_suffix(".blc")
        out.write_bytes(stream.to_bytes())
        p = dft_codec.stream_params(stream)
        print(f"{out}: N={p.N} R={p.R} b={p.b} bit_length={stream.bit_length}", file=sys.stderr)
        return EXIT_OK

    data = _read_bytes(args.input)
    try:
        stream = dft_codec.CodeStream.from_bytes(data)
        signal = dft_codec.decode(stream, args.dim)
    except BitstreamError as exc:
        raise InputError(f"{args.input}: malformed stream: {exc}") from None
    write_signal_csv(signal.amplitudes, args.out)
    return EXIT_OK


# --- entropy --------------------------------------------------------------------


def cmd_entropy(args: argparse.Namespace) -> int:
    try:
        comp = entropy.get_compressor(args.compressor)
    except ValueError as exc:
        raise InputError(str(exc)) from None
    x = _read_bytes(args.x)
    y = _read_bytes(args.y) if args.y is not None else None
    rep = entropy.report(x, y, comp, args.mode)
    print(rep.to_json())
    return EXIT_OK


# --- run / report ---------------------------------------------------------------


def _manifest_entries(path: Path) -> tuple[list[Path], dict]:
    """A directory of configs, a manifest ({"scenarios": [...]}), or one scenario config."""
    if path.is_dir():
        return sorted(path.glob("*.json")), {}
    try:
        doc = json.loads(path.read_text())
    except OSError as exc:
        raise InputError(f"{path}: {exc.strerror}") from None
    except json.JSONDecodeError as exc:
        raise InputError(f"{path}: not valid JSON: {exc}") from None
    if isinstance(doc, dict) and "scenarios" in doc:
        entries = [(path.parent / p) for p in doc["scenarios"]]
        return entries, {k: doc[k] for k in ("out", "seed", "format") if k in doc}
    return [path], {}


def _summary_line(rep: dict) -> str:
    parts = []
    for name, m in rep["measures"].items():
        probs = ", ".join(f"{p:.4g}" for p in m["probabilities"])
        parts.append(f"{name}=({probs})")
    return f"{rep['scenario']:<24} " + "  ".join(parts)


def _report_rows(rep: dict) -> list[list]:
    rows = []
    for name, m in rep["measures"].items():
        freqs = rep["monte_carlo"].get(name, {}).get("frequencies", [None] * len(m["probabilities"]))
        for label, p, lw, f in zip(rep["labels"], m["probabilities"], m["log_weights"], freqs):
            rows.append([rep["scenario"], name, label, p, lw, f])
    return rows


CSV_HEADER = ["scenario", "measure", "continuer", "probability", "log2_weight", "mc_frequency"]


def _write_csv(rows: list[list], path: Path | None) -> None:
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(CSV_HEADER)
    w.writerows(rows)
    if path is None:
        sys.stdout.write(buf.getvalue())
    else:
        path.write_text(buf.getvalue())


def cmd_run(args: argparse.Namespace) -> int:
    configs = args.config or [scenarios.bundled_dir()]
    entries: list[Path] = []
    defaults: dict = {}
    for c in configs:
        e, d = _manifest_entries(c)
        entries += e
        defaults = {**d, **defaults}
    out_dir = args.out or Path(defaults.get("out", "reports"))
    seed = args.seed if args.seed is not None else defaults.get("seed")
    fmt = args.format or defaults.get("format", "json")
    try:
        out_dir.mkdir(parents=True, exist_ok=True)
    except OSError as exc:
        raise InputError(f"{out_dir}: cannot create output directory: {exc.strerror}") from None

    failures = 0
    for path in entries:
        try:
            sc = scenarios.load_scenario(path)
            if seed is not None:
                sc = scenarios.with_seed(sc, int(seed))
            rep = scenarios.compare(sc).to_dict(deterministic=args.deterministic)
        except Exception as exc:  # one bad scenario must not stop the batch
            failures += 1
            print(f"{path.name:<24} FAILED: {type(exc).__name__}: {exc}", file=sys.stderr)
            continue
        stem = out_dir / rep["scenario"]
        if fmt == "csv":
            _write_csv(_report_rows(rep), stem.with_suffix(".csv"))
        else:
            stem.with_suffix(".json").write_text(json.dumps(rep, indent=2, sort_keys=True) + "\n")
        print(_summary_line(rep))
    return EXIT_SCENARIO_FAILED if failures else EXIT_OK


def cmd_report(args: argparse.Namespace) -> int:
    paths: list[Path] = []
    for p in args.reports:
        paths += sorted(p.glob("*.json")) if p.is_dir() else [p]
    reports = []
    for p in paths:
        try:
            reports.append(json.loads(p.read_text()))
        except (OSError, json.JSONDecodeError) as exc:
            raise InputError(f"{p}: cannot read report: {exc}") from None
    if args.format == "csv":
        _write_csv([row for rep in reports for row in _report_rows(rep)], args.out)
        return EXIT_OK
    lines = [_summary_line(rep) for rep in reports]
    for rep in reports:
        if rep.get("spearman_abs_amplitude_vs_neg_delta_h") is not None:
            lines.append(
                f"{rep['scenario']:<24} spearman(|a|, -dH)={rep['spearman_abs_amplitude_vs_neg_delta_h']:.4f}"
                f"  tv(born, algorithmic)={rep['born_vs_algorithmic_tv']:.4f}"
            )
    text = "\n".join(lines) + "\n"
    if args.out is None:
        sys.stdout.write(text)
    else:
        args.out.write_text(text)
    return EXIT_OK


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="branchprob", description=__doc__.splitlines()[0])
    parser.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    sub = parser.add_subparsers(dest="command", required=True)

    codec = sub.add_parser("codec", help="encode a signal CSV or decode a BLC1 stream")
    codec.add_argument("action", choices=["encode", "decode"])
    codec.add_argument("input", type=Path)
    codec.add_argument("--out", type=Path)
    codec.add_argument("--R", type=int, help="retained frequencies (encode)")
    codec.add_argument("--b", type=int, help="bits per complex amplitude (encode)")
    codec.add_argument("--epsilon", type=float, default=dft_codec.DEFAULT_EPSILON,
                       help="distortion budget for the minimal encoding when --R/--b are omitted")
    codec.add_argument("--dim", type=int, help="decode to this many samples")
    codec.set_defaults(func=cmd_codec)

    ent = sub.add_parser("entropy", help="print an entropy report as JSON")
    ent.add_argument("x", type=Path)
    ent.add_argument("y", type=Path, nargs="?")
    ent.add_argument("--compressor", default="lz", choices=sorted(entropy.COMPRESSORS))
    ent.add_argument("--mode", default="concat", choices=["concat", "delta"])
    ent.set_defaults(func=cmd_entropy)

    run = sub.add_parser("run", help="run scenarios and write one report per scenario")
    run.add_argument("--config", type=Path, action="append",
                     help="scenario config, manifest, or directory (repeatable; default: bundled corpus)")
    run.add_argument("--out", type=Path)
    run.add_argument("--seed", type=int, help="override every scenario's seed")
    run.add_argument("--format", choices=["json", "csv"])
    run.add_argument("--deterministic", action="store_true", help="omit wall-clock fields")
    run.set_defaults(func=cmd_run)

    rep = sub.add_parser("report", help="summarize report files")
    rep.add_argument("reports", type=Path, nargs="+")
    rep.add_argument("--out", type=Path)
    rep.add_argument("--format", choices=["table", "csv"], default="table")
    rep.set_defaults(func=cmd_report)
    return parser


def main(argv: list[str] | None = None) -> int:
    args = build_parser().parse_args(argv)
    try:
        return args.func(args)
    except InputError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_BAD_INPUT


if __name__ == "__main__":
    sys.exit(main())
