"""
Command-line entry point.

    twrlab region   --scheme adder-outer --eps-r 0.1 --eps-1 0.05 --eps-2 0.05
    twrlab simulate --scheme pnc --auto-regime --eps-r 0.1 --eps-1 0.2 --eps-2 0.05 --out r.json
    twrlab sweep    --scheme pnc --alpha 1 --eps-r 0.1 --rate-frac 0.8 --sweep n=8,12,16,20 --out s.csv
    twrlab replay   s.csv.manifest.json

Exit codes: 0 success, 2 usage or configuration error, 3 I/O error
(``replay`` returns 1 when the regenerated data differ).
Every file written with ``--out`` gets a ``<out>.manifest.json`` next to it.
"""

from __future__ import annotations

import argparse
import csv
import hashlib
import io
import json
import math
import os
import sys
import tempfile
from typing import Optional, Sequence

import numpy as np

from . import __version__
from .info import Kernel
from .regions import (
    BinaryAdderParams,
    RatePoint,
    RateRegion,
    SearchGrid,
    binary_adder_outer,
    cutset_outer_bound,
    df_region,
    hf_region,
    regime_alpha,
    shannon_inner_bound,
)
from .sim.protocol import SCHEMES as SIM_SCHEMES
from .sim.protocol import ProtocolConfig, anchor_rates, monte_carlo

EXIT_OK = 0
EXIT_MISMATCH = 1
EXIT_USAGE = 2
EXIT_IO = 3

REGION_SCHEMES = ("outer", "df", "hf", "shannon", "adder-outer", "regime")
SWEEP_KEYS = {"n": int, "rate-frac": float, "alpha": float, "eps-r": float, "trials": int, "seed": int}


class UsageError(Exception):
    pass


# ------------------------------------------------------------------------------
# output plumbing

def _sha256(text: str) -> str:
    return hashlib.sha256(text.encode()).hexdigest()


def _write(path: Optional[str], text: str) -> None:
    if path is None:
        sys.stdout.write(text)
        return
    with open(path, "w", newline="") as fh:
        fh.write(text)


def _write_manifest(out: str, argv: Sequence[str], config: dict, seed, canonical: str, written: str) -> None:
    manifest = {
        "command": ["twrlab", *argv],
        "config": config,
        "seed": seed,
        "version": __version__,
        "outputs": {
            os.path.basename(out): {
                "sha256": _sha256(written),
                # digest of the data with run-time fields removed; what replay compares
                "sha256_reproducible": _sha256(canonical),
            }
        },
    }
    _write(out + ".manifest.json", json.dumps(manifest, indent=2, sort_keys=True) + "\n")


def _emit(args, argv, text: str, canonical: str, config: dict, seed=None) -> None:
    _write(args.out, text)
    if args.out is not None:
        _write_manifest(args.out, argv, config, seed, canonical, text)


# ------------------------------------------------------------------------------
# channel arguments

def _add_channel(p: argparse.ArgumentParser, kernel_file: bool = False) -> None:
    p.add_argument("--eps-r", type=float, default=0.0, help="uplink crossover probability")
    p.add_argument("--eps-1", type=float, default=0.0, help="downlink crossover to node 1")
    p.add_argument("--eps-2", type=float, default=0.0, help="downlink crossover to node 2")
    if kernel_file:
        p.add_argument("--kernel-file", help="JSON with 'uplink', 'dl1', 'dl2' transition tables")
    p.add_argument("--out", help="output path (stdout when omitted)")


def _channel(args) -> BinaryAdderParams:
    for name in ("eps_r", "eps_1", "eps_2"):
        v = getattr(args, name)
        if not (0.0 <= v <= 0.5) or math.isnan(v):
            raise UsageError(f"--{name.replace('_', '-')} must be in [0, 0.5], got {v}")
    return BinaryAdderParams(args.eps_r, args.eps_1, args.eps_2)


def _kernels(args):
    if getattr(args, "kernel_file", None):
        with open(args.kernel_file) as fh:  # OSError propagates as an I/O error
            try:
                tables = json.load(fh)
                return tuple(Kernel(np.asarray(tables[k], dtype=float)) for k in ("uplink", "dl1", "dl2"))
            except (KeyError, TypeError, json.JSONDecodeError) as exc:
                raise UsageError(f"bad kernel file: {exc}") from None
    return _channel(args).kernels()


# ------------------------------------------------------------------------------
# region

def cmd_region(args, argv) -> int:
    if args.scheme in ("adder-outer", "regime"):
        ch = _channel(args)
        params = {"eps_r": ch.eps_r, "eps_1": ch.eps_1, "eps_2": ch.eps_2}
        if args.scheme == "adder-outer":
            o = binary_adder_outer(ch)
            region = RateRegion.from_points([(o.r12, o.r21)], "outer",
                                            time_sharing=False, params={**params, "method": "closed-form"})
        else:
            rp = regime_alpha(ch)
            region = RateRegion.from_points([(rp.rates.r12, rp.rates.r21)], "pnc", time_sharing=False,
                                            params={**params, "regime": rp.regime, "alpha": rp.alpha})
    else:
        uplink, dl1, dl2 = _kernels(args)
        grid = SearchGrid(steps=args.grid_steps, u_steps=args.u_steps)
        ts = not args.no_time_sharing
        if args.scheme == "outer":
            region = cutset_outer_bound(uplink, dl1, dl2, grid, ts)
        elif args.scheme == "df":
            region = df_region(uplink, dl1, dl2, grid, ts)
        elif args.scheme == "hf":
            region = hf_region(uplink, dl1, dl2, grid, ts)
        else:
            region = shannon_inner_bound(uplink, grid, ts)
    text = region.to_csv()
    config = {"scheme": args.scheme, "grid_steps": args.grid_steps, "u_steps": args.u_steps,
              "time_sharing": not args.no_time_sharing, "params": region.params,
              "eps": [args.eps_r, args.eps_1, args.eps_2], "kernel_file": args.kernel_file}
    _emit(args, argv, text, text, config)
    return EXIT_OK


# ------------------------------------------------------------------------------
# simulate / sweep

def _add_sim(p: argparse.ArgumentParser) -> None:
    p.add_argument("--scheme", choices=SIM_SCHEMES, default="pnc")
    p.add_argument("--n", type=int, default=16, help="block length")
    g = p.add_mutually_exclusive_group()
    g.add_argument("--alpha", type=float, help="time-share fraction (node-2 / common phase)")
    g.add_argument("--auto-regime", action="store_true", help="alpha (and pnc rates) from the relay regime")
    p.add_argument("--rate-frac", type=float, default=1.0, help="fraction of the anchor rates")
    p.add_argument("--r12", type=float, help="explicit rate, overrides --rate-frac")
    p.add_argument("--r21", type=float, help="explicit rate, overrides --rate-frac")
    p.add_argument("--trials", type=int, default=1000)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--code-seed", type=int, help="seed for codes, codebooks and hash (default --seed)")
    p.add_argument("--eps-typ", type=float, default=0.125, help="hf typicality tolerance")
    p.add_argument("--dl-mode", choices=("index", "full"), default="index", help="hf downlink model")
    p.add_argument("--dl-rates", help="hf downlink index rates 'RR1,RR2'")
    p.add_argument("--workers", type=int, help="worker processes (default $TWRLAB_THREADS or 1)")
    _add_channel(p)


def _sim_config(args, **override) -> ProtocolConfig:
    a = argparse.Namespace(**{**vars(args), **override})
    ch = _channel(a)
    dl = None
    if a.dl_rates:
        try:
            rr1, rr2 = (float(v) for v in a.dl_rates.split(","))
        except ValueError:
            raise UsageError(f"--dl-rates expects 'RR1,RR2', got {a.dl_rates!r}") from None
        dl = RatePoint(rr1, rr2)
    regime = None
    if a.auto_regime:
        rp = regime_alpha(ch)
        alpha, regime = rp.alpha, rp.regime
        anchor = rp.rates if a.scheme == "pnc" else anchor_rates(ch, a.scheme, dl)
    else:
        alpha = a.alpha
        if alpha is None:
            if a.scheme != "hf":
                raise UsageError(f"--scheme {a.scheme} needs --alpha or --auto-regime")
            alpha = 1.0
        anchor = anchor_rates(ch, a.scheme, dl)
    if (a.r12 is None) != (a.r21 is None):
        raise UsageError("give both --r12 and --r21, or neither")
    rates = RatePoint(a.r12, a.r21) if a.r12 is not None else anchor.scaled(a.rate_frac)
    return ProtocolConfig(a.n, alpha, rates, ch, seed=a.seed, trials=a.trials, code_seed=a.code_seed,
                          eps_typ=a.eps_typ, dl_rates=dl, hf_dl_mode=a.dl_mode, regime=regime)


def cmd_simulate(args, argv) -> int:
    cfg = _sim_config(args)
    report = monte_carlo(cfg, args.scheme, workers=args.workers)
    _emit(args, argv, report.to_json(), report.to_json(elapsed=False), report.config, cfg.seed)
    if args.out is not None:
        print(f"{args.scheme}: bler_node1={report.bler_node1:.4g} bler_node2={report.bler_node2:.4g} "
              f"bler_relay={report.bler_relay:.4g} ({report.trials} trials) -> {args.out}")
    return EXIT_OK


def parse_sweep(spec: str) -> tuple[str, list]:
    """``key=v1,v2,...`` or ``key=start:stop:step`` (inclusive)."""
    key, sep, values = spec.partition("=")
    key = key.strip()
    if not sep or key not in SWEEP_KEYS:
        raise UsageError(f"sweep spec must be one of {sorted(SWEEP_KEYS)} '=values', got {spec!r}")
    cast = SWEEP_KEYS[key]
    try:
        if ":" in values:
            start, stop, step = (float(v) for v in values.split(":"))
            if step <= 0 or stop < start:
                raise ValueError("need start <= stop and step > 0")
            count = int(math.floor((stop - start) / step + 1e-9)) + 1
            out = [cast(round(start + t * step, 12)) for t in range(count)]
        else:
            out = [cast(v) for v in values.split(",") if v.strip()]
    except ValueError as exc:
        raise UsageError(f"malformed sweep values {values!r}: {exc}") from None
    if not out:
        raise UsageError("empty sweep list")
    return key, out


def cmd_sweep(args, argv) -> int:
    key, values = parse_sweep(args.sweep)
    rows = []
    for v in values:
        report = monte_carlo(_sim_config(args, **{key.replace("-", "_"): v}), args.scheme, workers=args.workers)
        rows.append({"sweep": v, **report.scalar_fields()})

    def render(fields):
        buf = io.StringIO()
        w = csv.DictWriter(buf, fieldnames=fields, lineterminator="\n", extrasaction="ignore")
        w.writeheader()
        w.writerows(rows)
        return buf.getvalue()

    fields = list(rows[0])
    text = render(fields)
    canonical = render([f for f in fields if f != "elapsed_s"])
    config = {"sweep": args.sweep, "base": _sim_config(args, **{key.replace("-", "_"): values[0]}).to_dict()}
    _emit(args, argv, text, canonical, config, args.seed)
    return EXIT_OK


# ------------------------------------------------------------------------------
# replay

def cmd_replay(args, argv) -> int:
    with open(args.manifest) as fh:
        manifest = json.load(fh)
    command = list(manifest["command"][1:])
    if "--out" not in command:
        raise UsageError("manifest has no --out target")
    pos = command.index("--out") + 1
    name = os.path.basename(command[pos])
    expected = manifest["outputs"][name]["sha256_reproducible"]
    with tempfile.TemporaryDirectory() as tmp:
        command[pos] = os.path.join(tmp, name)
        code = main(command)
        if code != EXIT_OK:
            return code
        with open(command[pos] + ".manifest.json") as fh:
            got = json.load(fh)["outputs"][name]["sha256_reproducible"]
    ok = got == expected
    print(f"replay {'reproduced' if ok else 'MISMATCH'}: {name}")
    return EXIT_OK if ok else EXIT_MISMATCH


# ------------------------------------------------------------------------------

def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="twrlab", description="Two-way relay rate regions and simulations.")
    parser.add_argument("--version", action="version", version=f"twrlab {__version__}")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("region", help="compute a rate region or bound as CSV")
    p.add_argument("--scheme", choices=REGION_SCHEMES, required=True)
    p.add_argument("--grid-steps", type=int, default=64)
    p.add_argument("--u-steps", type=int, default=8)
    p.add_argument("--no-time-sharing", action="store_true")
    _add_channel(p, kernel_file=True)
    p.set_defaults(func=cmd_region)

    p = sub.add_parser("simulate", help="Monte Carlo block error rates as JSON")
    _add_sim(p)
    p.set_defaults(func=cmd_simulate)

    p = sub.add_parser("sweep", help="simulate over one swept variable, CSV rows")
    _add_sim(p)
    p.add_argument("--sweep", required=True, help="e.g. n=8,12,16,20 or rate-frac=0.6:1.4:0.1")
    p.set_defaults(func=cmd_sweep)

    p = sub.add_parser("replay", help="re-run a manifest and compare outputs")
    p.add_argument("manifest")
    p.set_defaults(func=cmd_replay)
    return parser


def main(argv: Optional[Sequence[str]] = None) -> int:
    argv = list(sys.argv[1:] if argv is None else argv)
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return EXIT_OK if exc.code == 0 else EXIT_USAGE
    try:
        return args.func(args, argv)
    except OSError as exc:
        print(f"twrlab: I/O error: {exc}", file=sys.stderr)
        return EXIT_IO
    except (UsageError, ValueError, KeyError) as exc:
        print(f"twrlab: error: {exc}", file=sys.stderr)
        return EXIT_USAGE


if __name__ == "__main__":
    sys.exit(main())
