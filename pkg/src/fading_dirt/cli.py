"""Command-line entry point: ``fading-dirt {bounds,sweep,fig2,fig3,gap,verify}``.

Exit codes: 0 success, 1 failed assertion or verification, 2 bad arguments.
"""

from __future__ import annotations

import argparse
import math
import sys
import time

from . import sweep as sw
from .core import Binomial, ChannelParams, Uniform

# a delta typed with ~10 decimals of pi/2 lands a hair outside [0, pi/2]
DELTA_SNAP = 1e-9


class ConfigError(ValueError):
    pass


def _delta(text: str) -> float:
    d = float(text)
    if -DELTA_SNAP <= d < 0:
        d = 0.0
    elif math.pi / 2 < d <= math.pi / 2 + DELTA_SNAP:
        d = math.pi / 2
    if not 0 <= d <= math.pi / 2:
        raise argparse.ArgumentTypeError(f"delta must lie in [0, pi/2] radians, got {text}")
    return d


def _nonneg(text: str) -> float:
    v = float(text)
    if not (math.isfinite(v) and v >= 0):
        raise argparse.ArgumentTypeError(f"expected a finite nonnegative number, got {text}")
    return v


def _positive(text: str) -> float:
    v = _nonneg(text)
    if v == 0:
        raise argparse.ArgumentTypeError(f"expected a positive number, got {text}")
    return v


def read_config(path: str) -> list[str]:
    """Turn a ``key=value`` file into ``--key value`` tokens.

    Blank lines and lines starting with ``#`` are ignored.  Keys may use
    dashes or underscores.
    """
    tokens = []
    try:
        with open(path, encoding="utf-8") as fh:
            lines = fh.read().splitlines()
    except OSError as e:
        raise ConfigError(f"cannot read config {path}: {e}") from e
    for n, line in enumerate(lines, 1):
        line = line.strip()
        if not line or line.startswith("#"):
            continue
        if "=" not in line:
            raise ConfigError(f"{path}:{n}: expected key=value")
        k, v = (t.strip() for t in line.split("=", 1))
        if not k:
            raise ConfigError(f"{path}:{n}: empty key")
        tokens += ["--" + k.replace("_", "-"), v]
    return tokens


def build_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(prog="fading-dirt", description="Capacity bounds for dirty paper coding with phase fading.")
    sub = ap.add_subparsers(dest="command", required=True)

    def common(p):
        p.add_argument("--config", help="key=value file; command-line flags take precedence")
        p.add_argument("--workers", type=int, default=1, help="processes for grid evaluation")

    b = sub.add_parser("bounds", help="evaluate every applicable bound at one point")
    common(b)
    b.add_argument("--dist", choices=("binomial", "uniform"), required=True)
    b.add_argument("--p", type=_nonneg, required=True)
    b.add_argument("--q", type=_nonneg, required=True)
    b.add_argument("--delta", type=_delta, default=math.pi / 2, help="binomial phase in radians (default pi/2)")
    b.add_argument("--out", help="write CSV here instead of stdout")

    s = sub.add_parser("sweep", help="evaluate bounds along a power sweep")
    common(s)
    s.add_argument("--dist", choices=("binomial", "uniform"), required=True)
    s.add_argument("--delta", type=_delta, default=math.pi / 2)
    s.add_argument("--p-start", type=_positive, required=True)
    s.add_argument("--p-stop", type=_positive, required=True)
    s.add_argument("--p-steps", type=int, required=True)
    s.add_argument("--p-scale", choices=("linear", "log"), default="linear")
    q = s.add_mutually_exclusive_group(required=True)
    q.add_argument("--q-ratio", type=_positive, help="Q = ratio * P")
    q.add_argument("--q-fixed", type=_positive, help="Q fixed")
    s.add_argument("--bounds", help="comma-separated bound labels (default: all for the law)")
    s.add_argument("--out", required=True)

    for name, hlp in (("fig2", "binomial preset P=500..1500, Q=10P"),
                      ("fig3", "uniform preset P=500..1000, Q in {P/10, P, 10P}")):
        f = sub.add_parser(name, help=hlp)
        common(f)
        f.add_argument("--out", required=True)

    g = sub.add_parser("gap", help="outer-minus-inner gap over a grid, with a threshold")
    common(g)
    g.add_argument("--dist", choices=("binomial", "uniform"), required=True)
    g.add_argument("--assert-max", type=float, required=True)
    g.add_argument("--p", type=_positive, action="append", help="grid powers (repeatable; default preset grid)")
    g.add_argument("--q-ratio", type=_positive, action="append", help="grid Q/P ratios (repeatable)")
    g.add_argument("--delta", type=_delta, action="append", help="grid deltas, binomial only (repeatable)")
    g.add_argument("--out", help="write the per-point gaps as CSV")

    v = sub.add_parser("verify", help="run the oracle-equivalence checks")
    common(v)
    v.add_argument("--seed", type=int, default=0)
    v.add_argument("--samples", type=int, default=10**6)
    v.add_argument("--csv", help="also check inner <= outer on every point of this sweep CSV")
    return ap


def _expand_config(argv: list[str]) -> list[str]:
    """Insert config-file tokens right after the subcommand so later flags win."""
    if "--config" not in argv and not any(a.startswith("--config=") for a in argv):
        return argv
    path = None
    for i, a in enumerate(argv):
        if a == "--config" and i + 1 < len(argv):
            path = argv[i + 1]
        elif a.startswith("--config="):
            path = a.split("=", 1)[1]
    if path is None:
        return argv
    return argv[:1] + read_config(path) + argv[1:]


# --------------------------------------------------------------------------
# commands


def _emit(rows, out, comment=None):
    if out:
        sw.write_csv(rows, out, comment)
    else:
        sys.stdout.write(sw.format_csv(rows, comment))


def cmd_bounds(a) -> int:
    params = ChannelParams(a.p, a.q)
    if a.dist == "binomial":
        rows = sw.evaluate_binomial(params, a.delta)
    else:
        rows = sw.evaluate_uniform(params)
    _emit(sorted(rows, key=sw.Row.sort_key), a.out)
    return 0


def cmd_sweep(a) -> int:
    dist = Binomial(a.delta) if a.dist == "binomial" else Uniform()
    q_mode = ("ratio", a.q_ratio) if a.q_ratio is not None else ("fixed", a.q_fixed)
    spec = sw.SweepSpec(a.p_start, a.p_stop, a.p_steps, a.p_scale, q_mode, dist)
    bounds = tuple(b.strip() for b in a.bounds.split(",")) if a.bounds else None
    rows = sw.sweep(spec, bounds, a.workers)
    _emit(rows, a.out)
    return 0


def cmd_fig2(a) -> int:
    sw.write_csv(sw.fig2_rows(a.workers), a.out, sw.FIG2_NOTE)
    return 0


def cmd_fig3(a) -> int:
    sw.write_csv(sw.fig3_rows(a.workers), a.out, sw.FIG3_NOTE)
    return 0


def cmd_gap(a) -> int:
    points = None
    if a.p or a.q_ratio or a.delta:
        ps = a.p or ([1.0, 10.0, 100.0, 1000.0, 10000.0] if a.dist == "binomial" else
                     [float(p) for p in range(500, 1001, 100)])
        rs = a.q_ratio or [0.1, 1.0, 10.0]
        if a.dist == "binomial":
            ds = a.delta or [math.pi / 4, 3 * math.pi / 8, math.pi / 2]
            points = [(ChannelParams(p, p * r), d) for p in ps for r in rs for d in ds]
        else:
            points = [ChannelParams(p, p * r) for p in ps for r in rs]
    rep = sw.gap_report(a.dist, a.assert_max, points)
    if a.out:
        sw.write_csv(rep.per_point, a.out, f"gap report: threshold={a.assert_max:.9g}")
    p, q, d = rep.argmax_point
    where = f"P={p:.9g} Q={q:.9g}" + ("" if d is None else f" delta={d:.9g}")
    status = "PASS" if rep.passed else "FAIL"
    print(f"{status} max_gap={rep.max_gap:.9g} at {where} threshold={rep.threshold:.9g} points={len(rep.per_point)}")
    return 0 if rep.passed else 1


def cmd_verify(a) -> int:
    from . import verify

    if a.samples < 1000:
        raise ConfigError("--samples must be >= 1000")
    ok = True
    for name, passed, detail, secs in verify.run_all(a.seed, a.samples):
        ok &= passed
        print(f"{'PASS' if passed else 'FAIL'} {name}: {detail} ({secs:.2f}s)")
    if a.csv:
        t = time.perf_counter()
        rows = verify.read_rows(a.csv)
        bad = sw.soundness_violations(rows)
        ok &= not bad
        worst = max((i.value - o.value for i, o in bad), default=0.0)
        print(f"{'PASS' if not bad else 'FAIL'} csv_soundness: {len(bad)} inner>outer pairs, "
              f"worst excess {worst:.6g} ({time.perf_counter() - t:.2f}s)")
    return 0 if ok else 1


COMMANDS = {"bounds": cmd_bounds, "sweep": cmd_sweep, "fig2": cmd_fig2, "fig3": cmd_fig3,
            "gap": cmd_gap, "verify": cmd_verify}


def run_command(argv) -> int:
    ap = build_parser()
    argv = list(argv)
    try:
        argv = _expand_config(argv)
    except ConfigError as e:
        ap.print_usage(sys.stderr)
        print(f"fading-dirt: error: {e}", file=sys.stderr)
        return 2
    try:
        a = ap.parse_args(argv)
    except SystemExit as e:
        return int(e.code or 0)
    try:
        return COMMANDS[a.command](a)
    except (ValueError, ConfigError) as e:
        ap.print_usage(sys.stderr)
        print(f"fading-dirt: error: {e}", file=sys.stderr)
        return 2
    except OSError as e:
        print(f"fading-dirt: error: {e}", file=sys.stderr)
        return 1


def main() -> None:
    sys.exit(run_command(sys.argv[1:]))


if __name__ == "__main__":
    main()
