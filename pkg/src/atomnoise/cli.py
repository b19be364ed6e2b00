"""Command-line scan driver.

    scan --config experiment.json [--out spectra.csv] [--workers N]
    scan --preset fig3 [--out outdir] [--decompose]

Exit codes: 0 success, 1 configuration/usage error, 2 partial failure
(some rows are NaN; see the manifest for details).
"""

from __future__ import annotations

import argparse
import sys
from pathlib import Path

from .engine import ConfigError, run_scan, validate_config
from .presets import PRESETS, preset_configs

__all__ = ["main"]


def _build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="scan",
        description="Quadrature noise spectra of light transmitted through a "
        "multilevel atomic medium.",
    )
    source = parser.add_mutually_exclusive_group()
    source.add_argument("--config", type=Path, help="JSON scan configuration file")
    source.add_argument("--preset", choices=sorted(PRESETS), help="bundled benchmark preset")
    parser.add_argument(
        "--out",
        type=Path,
        help="output CSV path (single scan) or output directory (preset)",
    )
    parser.add_argument("--workers", type=int, help="worker threads (default: all cores)")
    parser.add_argument(
        "--decompose",
        action="store_true",
        help="emit semiclassical/quantum contributions as extra columns",
    )
    parser.add_argument("--list-presets", action="store_true", help="list presets and exit")
    return parser


def _run_one(cfg_dict: dict, csv_path: Path, workers, decompose: bool) -> bool:
    if decompose:
        cfg_dict = dict(cfg_dict)
        cfg_dict["decompose"] = True
    config = validate_config(cfg_dict)
    result = run_scan(config, workers=workers, csv_path=csv_path)
    failed = sum(1 for r in result.rows if r.status == "failed")
    note = "" if failed == 0 else f"  ({failed} failed rows -> NaN)"
    print(f"wrote {csv_path}  [{len(result.rows)} rows]{note}")
    return failed == 0


def main(argv=None) -> int:
    parser = _build_parser()
    args = parser.parse_args(argv)

    if args.list_presets:
        for name in sorted(PRESETS):
            members = ", ".join(label for label, _ in PRESETS[name])
            print(f"{name}: {members}")
        return 0

    if args.config is None and args.preset is None:
        parser.print_usage(sys.stderr)
        print("scan: error: one of --config or --preset is required", file=sys.stderr)
        return 1

    try:
        if args.config is not None:
            if not args.config.exists():
                print(f"scan: error: no such config file: {args.config}", file=sys.stderr)
                return 1
            config = validate_config(args.config.read_text())
            if args.decompose and not config.decompose:
                cfg_dict = dict(config.raw)
                cfg_dict["decompose"] = True
                config = validate_config(cfg_dict)
            csv_path = args.out or config.csv_path
            if csv_path is None:
                csv_path = args.config.with_suffix(".csv")
            result = run_scan(config, workers=args.workers, csv_path=csv_path)
            failed = sum(1 for r in result.rows if r.status == "failed")
            note = "" if failed == 0 else f"  ({failed} failed rows -> NaN)"
            print(f"wrote {csv_path}  [{len(result.rows)} rows]{note}")
            return 0 if failed == 0 else 2

        out_dir = args.out or Path(".")
        out_dir.mkdir(parents=True, exist_ok=True)
        all_ok = True
        for label, cfg_dict in preset_configs(args.preset):
            csv_path = out_dir / f"{args.preset}_{label}.csv"
            all_ok &= _run_one(cfg_dict, csv_path, args.workers, args.decompose)
        return 0 if all_ok else 2
    except ConfigError as exc:
        print(f"scan: {exc}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
