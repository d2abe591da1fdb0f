#!/usr/bin/env python3
"""Recovery of lp-ball draws (outside the coded class) across n, plus the
report-only smooth-fit battery. Writes results/mismatch.
"""
import sys

from mcpursuit.cli import main

argv = ["mismatch", *sys.argv[1:]]
if "--out" not in sys.argv:
    argv += ["--out", "results/mismatch"]
sys.exit(main(argv))
