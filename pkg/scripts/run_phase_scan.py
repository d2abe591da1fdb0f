#!/usr/bin/env python3
"""Sparse recovery rate vs measurement count, full d sweep.

Writes scan.csv + scan_manifest.json under results/scan (override with
--out). All scan flags pass through, e.g. --trials 50 for a quick look.
"""
import sys

from mcpursuit.cli import main

argv = ["scan", *sys.argv[1:]]
if "--out" not in sys.argv:
    argv += ["--out", "results/scan"]
sys.exit(main(argv))
