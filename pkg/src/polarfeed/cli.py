"""Command line front end: ``polarfeed sweep`` runs a budget grid to CSV.

Options resolve in three layers: built-in defaults, then a flat
``key = value`` config file, then explicit flags.  Exit status is 0 on
success, 1 on a runtime or validation error, 2 on bad usage.
"""

import argparse
import sys

from .channel import ChannelModel
from .harness import SweepSpec, run_sweep, write_csv
from .svgplot import render_sweep

_INT_KEYS = ("n", "k", "t0", "batch", "max_tx", "crc_width", "trials", "seed", "workers")
_FLOAT_KEYS = ("amp", "noise_var", "design_z")
_LIST_KEYS = ("schemes", "budgets")
_KNOWN_KEYS = _INT_KEYS + _FLOAT_KEYS + _LIST_KEYS

_DEFAULTS = {
    "n": 1024,
    "k": 512,
    "amp": 0.5,
    "noise_var": 1.0,
    "schemes": "baseline,fixed,variable",
    "budgets": "2048,3072,4096",
    "t0": None,
    "batch": 16,
    "max_tx": None,
    "crc_width": 16,
    "trials": 1000,
    "seed": 2024,
    "design_z": None,
    "workers": 1,
}


def parse_config(path):
    """Read a flat ``key = value`` file; ``#`` starts a comment.

    Returns the raw string values keyed by option name.  Unknown keys are an
    error rather than silently ignored.
    """
    out = {}
    with open(path) as fh:
        for lineno, raw in enumerate(fh, start=1):
            line = raw.split("#", 1)[0].strip()
            if not line:
                continue
            if "=" not in line:
                raise ValueError(f"{path}:{lineno}: expected 'key = value', got {raw!r}")
            key, _, value = line.partition("=")
            key = key.strip()
            value = value.strip()
            if key not in _KNOWN_KEYS:
                raise ValueError(f"{path}:{lineno}: unknown option {key!r}")
            if not value:
                raise ValueError(f"{path}:{lineno}: empty value for {key!r}")
            out[key] = value
    return out


def _coerce(key, value):
    if value is None or not isinstance(value, str):
        return value
    if key in _INT_KEYS:
        return int(value)
    if key in _FLOAT_KEYS:
        return float(value)
    return value


def _resolve(args):
    merged = dict(_DEFAULTS)
    if args.config is not None:
        merged.update(parse_config(args.config))
    for key in _KNOWN_KEYS:
        flag = getattr(args, key)
        if flag is not None:
            merged[key] = flag
    return {k: _coerce(k, v) for k, v in merged.items()}


def _build(opts):
    schemes = tuple(s.strip() for s in str(opts["schemes"]).split(",") if s.strip())
    budgets = tuple(int(b) for b in str(opts["budgets"]).split(",") if str(b).strip())
    spec = SweepSpec(
        code_n=opts["n"],
        code_k=opts["k"],
        amplitude=opts["amp"],
        noise_var=opts["noise_var"],
        schemes=schemes,
        budgets=budgets,
        t0=opts["t0"],
        batch=opts["batch"],
        max_tx=opts["max_tx"],
        crc_width=opts["crc_width"],
        trials=opts["trials"],
        master_seed=opts["seed"],
        design_leaf_z=opts["design_z"],
        workers=opts["workers"],
    )
    ch = ChannelModel(amplitude=spec.amplitude, noise_var=spec.noise_var)
    return spec, ch


def _add_sweep_parser(subparsers):
    p = subparsers.add_parser("sweep", help="run a Monte Carlo budget sweep")
    p.add_argument("--config", help="flat 'key = value' option file")
    p.add_argument("--n", type=int, help="block length (power of 2)")
    p.add_argument("--k", type=int, help="information positions")
    p.add_argument("--amp", type=float, help="signal amplitude")
    p.add_argument("--noise-var", dest="noise_var", type=float, help="noise variance")
    p.add_argument("--schemes", help="comma list from: baseline, fixed, variable")
    p.add_argument("--budgets", help="comma list of transmission budgets")
    p.add_argument("--t0", type=int, help="round-robin stage length (default: n)")
    p.add_argument("--batch", type=int, help="variable-length recheck batch size")
    p.add_argument("--max-tx", dest="max_tx", type=int,
                   help="variable-length transmission cap (default: 8n)")
    p.add_argument("--crc-width", dest="crc_width", type=int, help="CRC bits")
    p.add_argument("--trials", type=int, help="Monte Carlo trials per point")
    p.add_argument("--seed", type=int, help="master seed")
    p.add_argument("--design-z", dest="design_z", type=float,
                   help="fixed design leaf reliability (default: per-point)")
    p.add_argument("--workers", type=int, help="worker processes")
    p.add_argument("--out", default="sweep.csv", help="CSV output path")
    p.add_argument("--svg", help="optional SVG output path")
    p.add_argument("--dry-run", action="store_true",
                   help="print the resolved grid and exit")
    return p


def _cmd_sweep(args):
    opts = _resolve(args)
    spec, ch = _build(opts)
    if args.dry_run:
        print(f"n={spec.code_n} k={spec.code_k} amp={spec.amplitude} "
              f"noise_var={spec.noise_var} trials={spec.trials} "
              f"seed={spec.master_seed} workers={spec.workers}")
        for budget in spec.budgets:
            for scheme in spec.schemes:
                print(f"  point: scheme={scheme} budget={budget}")
        return 0
    points = run_sweep(spec)
    text = write_csv(points, ch, args.out)
    sys.stdout.write(text)
    print(f"wrote {args.out}")
    if args.svg:
        render_sweep(points, ch, args.svg)
        print(f"wrote {args.svg}")
    return 0


def main(argv=None):
    parser = argparse.ArgumentParser(prog="polarfeed")
    subparsers = parser.add_subparsers(dest="command", required=True)
    _add_sweep_parser(subparsers)
    args = parser.parse_args(argv)
    try:
        if args.command == "sweep":
            return _cmd_sweep(args)
    except (ValueError, OSError) as exc:
        print(f"polarfeed: {exc}", file=sys.stderr)
        return 1
    return 0


if __name__ == "__main__":
    sys.exit(main())
