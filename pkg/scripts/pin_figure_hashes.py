#!/usr/bin/env python3
"""Regenerate the pinned figure-hash manifest used by the regression tests.

Run after an intentional change to the rendering pipeline; hashes are tied
to the floating-point environment they were produced in.
"""

import json
import sys
import tempfile
from pathlib import Path

sys.path.insert(0, str(Path(__file__).resolve().parents[1] / "src"))

from harmap.families import builtin
from harmap.render import (
    FIGURE_ONE_LAMBDAS,
    FIGURE_TWO_PARAMS,
    emit_svg,
    sample_curves,
    svg_hash,
    vertex_hash,
)
from harmap.suite import HASH_MANIFEST


def main():
    manifest = {}
    jobs = [(f"fig1-{chr(97 + i)}", builtin("f1", lam=lam)) for i, lam in enumerate(FIGURE_ONE_LAMBDAS)]
    jobs += [
        (f"fig2-{chr(97 + i)}", builtin("fKdelta", K=k, delta=d))
        for i, (k, d) in enumerate(FIGURE_TWO_PARAMS)
    ]
    with tempfile.TemporaryDirectory() as tmp:
        for name, fmap in jobs:
            curves = sample_curves(fmap)
            svg = emit_svg(curves, Path(tmp) / f"{name}.svg")
            manifest[name] = {"vertices": vertex_hash(curves), "svg": svg_hash(svg)}
            print(f"{name}: {manifest[name]['svg'][:16]}...")
    HASH_MANIFEST.parent.mkdir(parents=True, exist_ok=True)
    HASH_MANIFEST.write_text(json.dumps(manifest, indent=2) + "\n")
    print(f"wrote {HASH_MANIFEST}")


if __name__ == "__main__":
    main()
