import json
import re

import numpy as np
import pytest

from harmap.families import builtin, identity_map
from harmap.render import (
    FIGURE_ONE_LAMBDAS,
    FIGURE_TWO_PARAMS,
    CurveFamily,
    emit_csv,
    emit_svg,
    sample_curves,
    svg_hash,
    vertex_hash,
)
from harmap.suite import HASH_MANIFEST


@pytest.fixture(scope="module")
def identity_curves():
    return sample_curves(identity_map(), ray_count=8, circle_count=4, max_r=0.9, pts_per_curve=50)


class TestSampling:
    def test_vertex_count_exact(self, identity_curves):
        assert identity_curves.vertex_count == (8 + 4) * 50

    def test_rays_start_at_origin(self, identity_curves):
        for ray in identity_curves.rays:
            assert ray[0] == pytest.approx(0.0)

    def test_identity_geometry(self, identity_curves):
        # rays are straight segments, circles stay circles
        for ray in identity_curves.rays:
            direction = ray[-1] / abs(ray[-1])
            assert np.allclose(ray, np.abs(ray) * direction, atol=1e-14)
        for j, circle in enumerate(identity_curves.circles):
            assert np.allclose(np.abs(circle), (j + 1) * 0.9 / 4, atol=1e-14)

    def test_identity_bounds(self, identity_curves):
        x0, y0, x1, y1 = identity_curves.bounds
        assert x0 == pytest.approx(-0.9, abs=1e-2)
        assert x1 == pytest.approx(0.9, abs=1e-12)
        assert y1 == pytest.approx(0.9, abs=1e-2)

    def test_figure_parameter_sets(self):
        assert len(FIGURE_ONE_LAMBDAS) == 4
        assert len(FIGURE_TWO_PARAMS) == 8
        assert FIGURE_ONE_LAMBDAS[2] == pytest.approx(5 / 9)


class TestEmission:
    def test_svg_bytes_deterministic(self, identity_curves, tmp_path):
        p1 = emit_svg(identity_curves, tmp_path / "a.svg")
        p2 = emit_svg(identity_curves, tmp_path / "b.svg")
        assert p1.read_bytes() == p2.read_bytes()

    def test_empty_family_valid(self, tmp_path):
        empty = CurveFamily((), (), (), ())
        path = emit_svg(empty, tmp_path / "empty.svg")
        text = path.read_text()
        assert text.startswith("<?xml")
        assert "<path" not in text
        assert "</svg>" in text

    def test_path_boxes_match_bounds(self, identity_curves, tmp_path):
        path = emit_svg(identity_curves, tmp_path / "c.svg", width_px=800)
        text = path.read_text()
        coords = []
        for d in re.findall(r'd="([^"]+)"', text):
            pts = re.findall(r"(-?\d+\.\d+) (-?\d+\.\d+)", d)
            coords.extend((float(x), float(y)) for x, y in pts)
        xs = [c[0] for c in coords]
        ys = [c[1] for c in coords]
        x0, y0, x1, y1 = identity_curves.bounds
        margin = 0.05 * max(x1 - x0, y1 - y0)
        scale = 800.0 / ((x1 - x0) + 2 * margin)
        assert min(xs) == pytest.approx(margin * scale, abs=1.0)
        assert max(xs) == pytest.approx(800.0 - margin * scale, abs=1.0)
        assert max(ys) - min(ys) == pytest.approx((y1 - y0) * scale, abs=1.0)

    def test_csv_row_count(self, identity_curves, tmp_path):
        path = emit_csv(identity_curves, tmp_path / "a.csv")
        lines = path.read_text().strip().split("\n")
        assert lines[0] == "curve_id,t,re,im"
        assert len(lines) == identity_curves.vertex_count + 1

    def test_vertex_hash_stable(self):
        a = sample_curves(builtin("f1", lam=0.2), 6, 3, 0.9, 40)
        b = sample_curves(builtin("f1", lam=0.2), 6, 3, 0.9, 40)
        assert vertex_hash(a) == vertex_hash(b)


class TestRegressionManifest:
    def test_manifest_present_and_complete(self):
        manifest = json.loads(HASH_MANIFEST.read_text())
        names = {f"fig1-{chr(97 + i)}" for i in range(4)}
        names |= {f"fig2-{chr(97 + i)}" for i in range(8)}
        assert set(manifest) == names
        assert all({"vertices", "svg"} == set(v) for v in manifest.values())

    def test_first_figure_matches_manifest(self, tmp_path):
        manifest = json.loads(HASH_MANIFEST.read_text())
        curves = sample_curves(builtin("f1", lam=FIGURE_ONE_LAMBDAS[0]))
        assert vertex_hash(curves) == manifest["fig1-a"]["vertices"]
        svg = emit_svg(curves, tmp_path / "fig1-a.svg")
        assert svg_hash(svg) == manifest["fig1-a"]["svg"]
