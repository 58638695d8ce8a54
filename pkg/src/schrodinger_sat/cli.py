"""Command-line entry point: ``schrodinger-sat --preset NAME [options]``.

Exit codes: 0 success, 2 configuration error, 3 numerical instability.
"""

from __future__ import annotations

import argparse
import logging
import sys
from pathlib import Path

from .core import ConfigurationError, NonFiniteStateError, RepresentationError
from .harness import PRESETS, Overrides, read_config, run_preset
from .integrate import InstabilityError

EXIT_OK = 0
EXIT_CONFIG = 2
EXIT_UNSTABLE = 3

log = logging.getLogger("schrodinger_sat")


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(
        prog="schrodinger-sat",
        description="Run an interface-scheme experiment preset and write CSV outputs.",
    )
    p.add_argument("--preset", help="preset name (see --list)")
    p.add_argument("--list", action="store_true", help="list presets and exit")
    p.add_argument("--config", type=Path,
                   help="key = value file (a manifest works); flags override it")
    p.add_argument("--n", type=int, help="intervals of the first run; other grids scale along")
    p.add_argument("--order", type=int, choices=(2, 4, 6, 8), help="SBP interior order")
    p.add_argument("--integrator", choices=("rk4", "imex"))
    p.add_argument("--l-coeff", type=float, help="L = coeff * dx^-exponent")
    p.add_argument("--l-exponent", type=int, choices=(2, 3))
    p.add_argument("--l-explicit-bound", action="store_true",
                   help="L = 1/(sigma_0 dx^2)")
    p.add_argument("--epsilon", type=float, help="dissipation strength")
    p.add_argument("--t-final", type=float)
    p.add_argument("--cfl", type=float, help="dt = cfl * dx^2")
    p.add_argument("--samples", type=int, help="number of output intervals")
    p.add_argument("--out-dir", type=Path, default=None,
                   help="output directory (default: ./runs/<preset>)")
    p.add_argument("--jobs", type=int, default=1, help="runs executed in parallel")
    p.add_argument("-v", "--verbose", action="store_true")
    return p


def _merge(args: argparse.Namespace) -> tuple[str, Overrides]:
    preset, base = (None, Overrides())
    if args.config is not None:
        preset, base = read_config(args.config)
    values = base.as_dict()
    for key in ("n", "order", "integrator", "l_coeff", "l_exponent", "epsilon",
                "t_final", "cfl", "samples"):
        value = getattr(args, key)
        if value is not None:
            values[key] = value
    if args.l_explicit_bound:
        values["l_explicit_bound"] = True
        values.pop("l_coeff", None)
        values.pop("l_exponent", None)
    elif args.l_coeff is not None or args.l_exponent is not None:
        values.pop("l_explicit_bound", None)
    preset = args.preset or preset
    if preset is None:
        raise ConfigurationError("no preset given (use --preset or a config file)")
    return preset, Overrides.from_mapping(values)


def main(argv: list[str] | None = None) -> int:
    args = build_parser().parse_args(argv)
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING,
                        format="%(levelname)s %(message)s")
    if args.list:
        for name, p in sorted(PRESETS.items()):
            print(f"{name:24s} {p.description}")
        return EXIT_OK
    try:
        preset, overrides = _merge(args)
        out_dir = args.out_dir if args.out_dir is not None else Path("runs") / preset
        log.info("running %s into %s", preset, out_dir)
        result = run_preset(preset, overrides, out_dir=out_dir, jobs=args.jobs)
    except (ConfigurationError, RepresentationError) as exc:
        print(f"configuration error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    except (InstabilityError, NonFiniteStateError) as exc:
        print(f"numerical instability: {exc}", file=sys.stderr)
        return EXIT_UNSTABLE
    for key, value in result.summary.items():
        print(f"{key} = {value!r}")
    return EXIT_OK


if __name__ == "__main__":
    raise SystemExit(main())
