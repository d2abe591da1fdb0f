#!/usr/bin/env python3
"""Exact recovery of grid-valued sparse signals at n=1024, 500 trials.
The longest run of the four (a few minutes). Writes results/corollary.
"""
import sys

from mcpursuit.cli import main

argv = ["corollary", *sys.argv[1:]]
if "--out" not in sys.argv:
    argv += ["--out", "results/corollary"]
sys.exit(main(argv))
