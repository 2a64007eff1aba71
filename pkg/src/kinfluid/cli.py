"""Command line entry point: `simulate <config-file> [--override k=v ...]`."""

import argparse
import sys
from pathlib import Path

from .config import parse_config
from .errors import ConfigurationError, SolverError
from .runner import OUTPUT_ENV, run


def main(argv=None):
    parser = argparse.ArgumentParser(
        prog="simulate",
        description="Run a coupled kinetic/fluid scenario from a flat "
                    "key=value config file.",
        epilog=f"Output directory precedence: ${OUTPUT_ENV}, then the "
               "output_dir config key, then the working directory.")
    parser.add_argument("config", help="path to the config file")
    parser.add_argument(
        "--override", action="append", default=[], metavar="KEY=VALUE",
        help="replace a config value; repeatable")
    args = parser.parse_args(argv)

    try:
        text = Path(args.config).read_text()
    except OSError as exc:
        print(f"cannot read config: {exc}", file=sys.stderr)
        return 1
    try:
        config = parse_config(text, overrides=args.override)
        files = run(config)
    except ConfigurationError as exc:
        print(f"configuration error: {exc}", file=sys.stderr)
        return 1
    except SolverError as exc:
        print(f"solver failure: {exc}", file=sys.stderr)
        return 2
    print(f"wrote {len(files)} files to {files[0].parent}")
    return 0


if __name__ == "__main__":
    sys.exit(main())
