#!/usr/bin/env python3
"""Render both figure batches (the degree-three polynomial maps and the
bounded-rotation maps) as SVG + CSV into out/figures/."""

import sys
from pathlib import Path

sys.path.insert(0, str(Path(__file__).resolve().parents[1] / "src"))

from harmap.cli import main

if __name__ == "__main__":
    out = Path(__file__).resolve().parents[1] / "out" / "figures"
    rc = main(["render", "--figure", "fig1-all", "--out", str(out)])
    rc |= main(["render", "--figure", "fig2-all", "--out", str(out)])
    sys.exit(rc)
