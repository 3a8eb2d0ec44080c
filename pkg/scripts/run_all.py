"""Run every CLI analysis with one config into a single output directory.

    python3 scripts/run_all.py [--config cfg.json] [--out results]
"""

import argparse
import sys

from kneexo import cli


def main():
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--config")
    ap.add_argument("--out", default="results")
    args = ap.parse_args()
    extra = ["--config", args.config] if args.config else []
    for cmd in cli.SUBCOMMANDS:
        code = cli.main([cmd, "--out", args.out, *extra])
        if code:
            sys.exit(code)


if __name__ == "__main__":
    main()
