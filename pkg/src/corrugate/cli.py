"""Command line front end: ``corrugate cone|sweep|verify``.

Option values are resolved as flag > environment variable > config file >
default. Environment variables use the prefix ``CORRUGATE_`` followed by
the upper-cased option name with dashes as underscores, e.g.
``CORRUGATE_ETA=0.1`` or ``CORRUGATE_Y_RANGE=-0.05,0.05``. A config file
holds ``key = value`` lines with the same keys as the long flags.

Exit codes: 0 success, 1 verification failure, 2 invalid arguments,
3 parameters outside the subsolution region, 4 I/O failure.
"""
from __future__ import annotations

import argparse
import csv
import json
import logging
import os
import sys
from pathlib import Path

from corrugate import cone, mesh, verify
from corrugate.errors import OutOfSubsolution

ENV_PREFIX = "CORRUGATE_"

EXIT_OK = 0
EXIT_FAILED = 1
EXIT_USAGE = 2
EXIT_SUBSOLUTION = 3
EXIT_IO = 4

DEFAULTS = {
    "eta": "0.2",
    "eps": "0.5",
    "format": "obj",
    "seed": "0",
    "threads": "1",
    "y-range": "-0.1,0.1",
}

log = logging.getLogger("corrugate")


class UsageError(Exception):
    pass


def read_config(path) -> dict[str, str]:
    out = {}
    for raw in Path(path).read_text().splitlines():
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        if "=" not in line:
            raise UsageError(f"config line {raw!r} is not key = value")
        key, value = (part.strip() for part in line.split("=", 1))
        out[key.lstrip("-")] = value
    return out


class Options:
    def __init__(self, args: argparse.Namespace, config: dict[str, str]):
        self.args = args
        self.config = config

    def raw(self, name: str) -> str | None:
        value = getattr(self.args, name.replace("-", "_"), None)
        if value is not None:
            return value
        env = os.environ.get(ENV_PREFIX + name.upper().replace("-", "_"))
        if env is not None:
            return env
        if name in self.config:
            return self.config[name]
        return DEFAULTS.get(name)

    def get(self, name: str, parse, required: bool = False):
        value = self.raw(name)
        if value is None:
            if required:
                raise UsageError(f"--{name} is required")
            return None
        try:
            return parse(value)
        except (TypeError, ValueError) as exc:
            raise UsageError(f"invalid value {value!r} for --{name}: {exc}") from None


def positive_int(text: str) -> int:
    v = int(text)
    if v <= 0:
        raise ValueError("must be a positive integer")
    return v


def int_list(text: str) -> list[int]:
    items = [t for t in text.replace(" ", ",").split(",") if t]
    if not items:
        raise ValueError("needs at least one value")
    return [positive_int(t) for t in items]


def grid(text: str) -> tuple[int, int]:
    nx, sep, ny = text.lower().partition("x")
    if not sep:
        raise ValueError("expected <nx>x<ny>")
    return positive_int(nx), positive_int(ny)


def float_pair(text: str) -> tuple[float, float]:
    lo, hi = (float(t) for t in text.split(","))
    return lo, hi


def mesh_format(text: str) -> str:
    if text not in mesh.FORMATS:
        raise ValueError(f"expected one of {', '.join(mesh.FORMATS)}")
    return text


def _cone_config(opts: Options, N: int) -> cone.ConeConfig:
    try:
        return cone.ConeConfig(
            N=N,
            eta=opts.get("eta", float),
            eps=opts.get("eps", float),
            grid=opts.get("grid", grid),
            y_range=opts.get("y-range", float_pair),
            threads=opts.get("threads", positive_int),
        )
    except OutOfSubsolution:
        raise
    except ValueError as exc:
        raise UsageError(str(exc)) from None


def _write(path, text: str) -> None:
    with open(path, "w", newline="\n") as fh:
        fh.write(text)


def _build(cfg: cone.ConeConfig, out, report, fmt: str) -> cone.DefectReport:
    sample, rep = cone.build_cone_surface(cfg)
    if out is not None:
        mesh.write_mesh(mesh.grid_mesh(sample.values), out, fmt)
    if report is not None:
        _write(report, rep.to_json())
    return rep


def cmd_cone(opts: Options) -> int:
    cfg = _cone_config(opts, opts.get("N", positive_int, required=True))
    rep = _build(cfg, opts.get("out", str), opts.get("report", str), opts.get("format", mesh_format))
    print(rep.to_json(), end="")
    return EXIT_OK


def cmd_sweep(opts: Options) -> int:
    Ns = opts.get("N", int_list, required=True)
    out = Path(opts.get("out", str) or ".")
    fmt = opts.get("format", mesh_format)
    cfgs = [_cone_config(opts, N) for N in Ns]
    out.mkdir(parents=True, exist_ok=True)
    rows = []
    for cfg in cfgs:
        rep = _build(cfg, out / f"cone_N{cfg.N}.{fmt}", out / f"report_N{cfg.N}.json", fmt)
        rows.append(rep)
        log.info("N=%d c0_distance=%.6g", cfg.N, rep.c0_distance)
    with open(out / "sweep.csv", "w", newline="") as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(["N", "c0_distance", "max_e11", "max_e12", "max_e22", "min_immersion_margin"])
        for r in rows:
            w.writerow([r.N, repr(r.c0_distance), repr(r.max_e11), repr(r.max_e12), repr(r.max_e22), repr(r.min_immersion_margin)])
    print(out / "sweep.csv")
    return EXIT_OK


def cmd_verify(opts: Options) -> int:
    seed = opts.get("seed", int)
    summary = verify.run_all(seed=seed, fault=opts.args.inject_fault, quick=not opts.args.full)
    text = json.dumps(summary, indent=2, sort_keys=True) + "\n"
    report = opts.get("report", str)
    if report is not None:
        _write(report, text)
    print(text, end="")
    return EXIT_OK if summary["passed"] else EXIT_FAILED


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="corrugate", description="Corrugated desingularization of a cone.")
    parser.add_argument("-v", "--verbose", action="store_true")
    sub = parser.add_subparsers(dest="command", required=True)

    def common(p, n_help):
        p.add_argument("--config", help="file of key = value defaults")
        p.add_argument("--N", dest="N", help=n_help)
        p.add_argument("--eta", help="pattern width in (0, 1/2) (default 0.2)")
        p.add_argument("--eps", help="target defect bound, must exceed eta (default 0.5)")
        p.add_argument("--grid", help="<nx>x<ny>; default 40N x 100")
        p.add_argument("--y-range", dest="y_range", help="lo,hi of the cylinder height (default -0.1,0.1)")
        p.add_argument("--format", help="obj or ply (default obj)")
        p.add_argument("--threads", help="worker threads for grid rows (default 1)")

    p = sub.add_parser("cone", help="corrugate the cone once and write a mesh and defect report")
    common(p, "corrugation number (positive integer)")
    p.add_argument("--out", help="mesh path")
    p.add_argument("--report", help="JSON defect report path")
    p.set_defaults(func=cmd_cone)

    p = sub.add_parser("sweep", help="one mesh and report per N plus sweep.csv")
    common(p, "comma separated corrugation numbers, e.g. 6,12,24,48")
    p.add_argument("--out", help="output directory (default .)")
    p.set_defaults(func=cmd_sweep)

    p = sub.add_parser("verify", help="run the seeded property checks")
    p.add_argument("--config", help="file of key = value defaults")
    p.add_argument("--seed", help="RNG seed (default 0)")
    p.add_argument("--report", help="write the JSON summary here too")
    p.add_argument("--full", action="store_true", help="full-size sample counts")
    p.add_argument("--inject-fault", dest="inject_fault", choices=verify.FAULTS, help=argparse.SUPPRESS)
    p.add_argument("--threads", help="accepted for symmetry; checks run single threaded")
    p.set_defaults(func=cmd_verify)
    return parser


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING, format="%(levelname)s %(message)s")
    try:
        config = read_config(args.config) if args.config else {}
        return args.func(Options(args, config))
    except UsageError as exc:
        print(f"corrugate {args.command}: error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except OutOfSubsolution as exc:
        print(f"corrugate {args.command}: {exc}", file=sys.stderr)
        return EXIT_SUBSOLUTION
    except OSError as exc:
        print(f"corrugate {args.command}: I/O error: {exc}", file=sys.stderr)
        return EXIT_IO


if __name__ == "__main__":
    sys.exit(main())
