#!/usr/bin/env python3
"""Bisection-probe the three sharpness conjectures and print the brackets.

The reported bracket is (largest scale with no failure, smallest scale with
a failure) for the dilatation scale; the conjectured constant is printed
alongside for comparison.  Heavier settings than the test defaults; expect
a few minutes per family.
"""

import json
import sys
import time
from pathlib import Path

sys.path.insert(0, str(Path(__file__).resolve().parents[1] / "src"))

from harmap.probe import ProbeSettings, conjecture_probe, conjectured_scale

FAMILIES = [
    ("cor1", {"n": 1}),
    ("cor1", {"n": 2}),
    ("cor2", {"delta": 1.0}),
    ("cor3", {"alpha": 1.5}),
]


def main():
    out = Path(__file__).resolve().parents[1] / "out" / "probes"
    out.mkdir(parents=True, exist_ok=True)
    rows = []
    for conjecture, params in FAMILIES:
        tag = f"{conjecture}-" + "-".join(f"{k}{v:g}" for k, v in params.items())
        settings = ProbeSettings(
            h_instances=10,
            theta_count=8,
            bisection_steps=14,
            kaplan_n=1024,
            with_injectivity=False,
            log_path=str(out / f"{tag}.jsonl"),
        )
        t0 = time.time()
        result = conjecture_probe(conjecture, params, settings, seed=42)
        row = result.to_json()
        row["conjectured_scale"] = conjectured_scale(conjecture, params)
        row["params"] = params
        row["seconds"] = round(time.time() - t0, 1)
        rows.append(row)
        print(
            f"{tag}: bracket [{result.bracket[0]:.5f}, {result.bracket[1]:.5f}] "
            f"conjectured {row['conjectured_scale']:.5f} ({row['seconds']}s)"
        )
    (out / "summary.json").write_text(json.dumps(rows, indent=2) + "\n")
    print(f"wrote {out / 'summary.json'}")


if __name__ == "__main__":
    main()
