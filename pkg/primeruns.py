#!/usr/bin/env python3

# primeruns.py
#
# Command-line wrapper around the primeruns package. Run with --help, or see
# README.md for the subcommands.

import sys

from primeruns.cli import main

if __name__ == "__main__":
    sys.exit(main())
