#!/usr/bin/env python3
"""Monte Carlo checks of the two concentration bounds (chi-square lower
tail, sigma_max upper tail) at full trial counts. Writes results/lemmas.
"""
import sys

from mcpursuit.cli import main

argv = ["lemmas", *sys.argv[1:]]
if "--out" not in sys.argv:
    argv += ["--out", "results/lemmas"]
sys.exit(main(argv))
