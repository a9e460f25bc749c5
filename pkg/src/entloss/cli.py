"""Command-line entry point: ``entloss verify | fig2 | report``.

Exit codes: 0 all checks pass, 1 at least one bound fails, 2 bad arguments,
configuration or input files, 3 internal numerical inconsistency or a
failed channel-level final bound (flagged for manual review).
"""
from __future__ import annotations

import argparse
import csv
import io
import json
import sys
from pathlib import Path

import numpy as np

from . import cbnorm, channels, qcore, recovery
from .bounds import tally
from .errors import EntlossError, InternalConsistencyError, ParseError
from .suites import REVIEW_FAMILIES, SuiteConfig, run

EXIT_OK, EXIT_FAIL, EXIT_CONFIG, EXIT_INTERNAL = 0, 1, 2, 3


# ---------------------------------------------------------------------------
# parsing helpers


def parse_dims(text: str) -> tuple:
    """``"2x2,2x3"`` -> ((2, 2), (2, 3))."""
    out = []
    for part in text.split(","):
        part = part.strip().lower()
        try:
            a, b = part.split("x")
            out.append((int(a), int(b)))
        except ValueError as exc:
            raise ParseError(f"bad dimension pair {part!r}, expected e.g. 2x3") from exc
    return tuple(out)


def _number(text: str):
    try:
        return int(text)
    except ValueError:
        try:
            return float(text)
        except ValueError as exc:
            raise ParseError(f"not a number: {text!r}") from exc


def parse_channel(spec: str):
    """A Kraus/Choi JSON file, or ``name[:key=value,...]`` from the channel zoo.

    Returns ``(channel, descriptor)``.
    """
    path = Path(spec)
    if path.suffix == ".json" or path.is_file():
        try:
            data = json.loads(path.read_text())
        except (OSError, json.JSONDecodeError) as exc:
            raise ParseError(f"cannot read channel file {spec!r}: {exc}") from exc
        try:
            if "choi" in data:
                ch = channels.choi_to_kraus(channels.ChoiMatrix.from_dict(data))
            else:
                ch = channels.KrausChannel.from_dict(data)
        except (KeyError, TypeError, ValueError) as exc:
            raise ParseError(f"bad channel file {spec!r}: {exc}") from exc
        return ch, path.name
    name, _, rest = spec.partition(":")
    params = {}
    for item in filter(None, (s.strip() for s in rest.split(","))):
        key, eq, value = item.partition("=")
        if not eq:
            raise ParseError(f"bad channel parameter {item!r}, expected key=value")
        params[key.strip()] = _number(value.strip())
    return channels.channel_zoo(name, **params), spec


def parse_state(spec: str | None, dim: int):
    """``None``/``mixed``, ``diag:p0,p1,...``, or a JSON file holding a density matrix."""
    if spec is None or spec in ("mixed", "maximally_mixed"):
        return qcore.maximally_mixed(dim)
    if spec.startswith("diag:"):
        probs = [float(_number(x)) for x in spec[5:].split(",") if x.strip()]
        return qcore.as_density(np.diag(probs).astype(complex))
    path = Path(spec)
    try:
        data = json.loads(path.read_text())
    except (OSError, json.JSONDecodeError) as exc:
        raise ParseError(f"cannot read state {spec!r}: {exc}") from exc
    rows = data["rho"] if isinstance(data, dict) else data
    arr = np.asarray(rows, dtype=float)
    mat = arr[..., 0] + 1j * arr[..., 1] if arr.ndim == 3 else arr.astype(complex)
    return qcore.as_density(mat)


# ---------------------------------------------------------------------------
# output


def records_csv(records) -> str:
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(["name", "instance", "lhs", "rhs", "slack", "status", "certified"])
    for r in records:
        d = r.to_dict()
        w.writerow([r.name, r.instance] + ["" if d[k] is None else f"{d[k]:.12g}"
                                            for k in ("lhs", "rhs", "slack")]
                   + [r.status, int(r.certified)])
    return buf.getvalue()


def _write(text: str, out: str | None):
    if out in (None, "-"):
        sys.stdout.write(text)
    else:
        Path(out).write_text(text)


def _print_counts(counts: dict):
    for name, c in counts.items():
        print(f"{name:16s} pass={c['pass']:5d} fail={c['fail']:3d} "
              f"conditional={c['conditional']:3d} skipped={c['skipped']:5d}", file=sys.stderr)


def _exit_code(records) -> int:
    fails = [r for r in records if r.status == "fail"]
    if any(r.name in REVIEW_FAMILIES for r in fails):
        return EXIT_INTERNAL
    return EXIT_FAIL if fails else EXIT_OK


# ---------------------------------------------------------------------------
# commands


def build_config(args) -> SuiteConfig:
    data = {}
    if args.config:
        try:
            data = json.loads(Path(args.config).read_text())
        except (OSError, json.JSONDecodeError) as exc:
            raise ParseError(f"cannot read config {args.config!r}: {exc}") from exc
        if not isinstance(data, dict):
            raise ParseError("config file must hold a JSON object")
    return SuiteConfig.from_dict(
        data,
        seed=args.seed,
        dims=parse_dims(args.dims) if args.dims else None,
        instances_per_dim=args.instances,
        output_path=args.out,
        format=args.format,
        quick=True if args.quick else None,
    )


def cmd_verify(args) -> int:
    config = build_config(args)
    report = run(config)
    if config.format == "csv":
        text = records_csv(report.records)
    else:
        text = json.dumps(report.to_dict(), indent=1) + "\n"
    _write(text, config.output_path)
    _print_counts(report.counts)
    return report.exit_code()


def cmd_fig2(args) -> int:
    if args.grid < 2:
        raise ParseError("--grid must be at least 2")
    if args.out in (None, "-"):
        rows = recovery.fig2_curve(args.grid)
        w = csv.writer(sys.stdout, lineterminator="\n")
        w.writerow(["ef_norm", "bound_norm"])
        for x, y in rows:
            w.writerow([f"{x:.12f}", f"{y:.12f}"])
    else:
        recovery.write_fig2_csv(args.out, args.grid)
    print(f"threshold delta_f = {recovery.fig2_threshold():.6e}", file=sys.stderr)
    return EXIT_OK


def cmd_report(args) -> int:
    ch, descriptor = parse_channel(args.channel)
    state = None if args.state is None else parse_state(args.state, ch.dimA)
    config = cbnorm.ReportConfig(seed=args.seed, quick=args.quick)
    rep = cbnorm.channel_report(ch, descriptor, state, config)
    _write(rep.to_json() + "\n", args.out)
    _print_counts(tally(rep.bound_records))
    return _exit_code(rep.bound_records)


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="entloss", description=__doc__.splitlines()[0])
    sub = p.add_subparsers(dest="command", required=True)

    v = sub.add_parser("verify", help="run the seeded verification suites")
    v.add_argument("--seed", type=int, default=None)
    v.add_argument("--dims", default=None, help="dimension pairs, e.g. 2x2,2x3,3x3")
    v.add_argument("--instances", type=int, default=None, help="instances per dimension pair")
    v.add_argument("--out", default=None, help="report path (default stdout)")
    v.add_argument("--format", choices=("json", "csv"), default=None)
    v.add_argument("--quick", action="store_true",
                   help="cap restarts at 8 and instances at 50")
    v.add_argument("--config", default=None, help="JSON file with SuiteConfig fields")
    v.set_defaults(func=cmd_verify)

    f = sub.add_parser("fig2", help="emit the coherent-information lower-bound curve as CSV")
    f.add_argument("--grid", type=int, default=1001)
    f.add_argument("--out", default=None)
    f.set_defaults(func=cmd_fig2)

    r = sub.add_parser("report", help="single-channel report as JSON")
    r.add_argument("--channel", required=True,
                   help="Kraus/Choi JSON file or zoo spec such as depolarizing:p=1,d=2")
    r.add_argument("--state", default=None, help="mixed, diag:p0,p1,... or a JSON file")
    r.add_argument("--out", default=None)
    r.add_argument("--seed", type=int, default=0)
    r.add_argument("--quick", action="store_true")
    r.set_defaults(func=cmd_report)
    return p


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        return args.func(args)
    except InternalConsistencyError as exc:
        print(f"internal inconsistency: {exc}", file=sys.stderr)
        return EXIT_INTERNAL
    except (EntlossError, OSError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_CONFIG


if __name__ == "__main__":
    sys.exit(main())
