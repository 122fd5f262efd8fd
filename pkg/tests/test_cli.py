import json

import pytest

from harmap.cli import main
from harmap.families import convex_order_derivative, to_descriptor


@pytest.fixture()
def outdir(tmp_path):
    return tmp_path / "out"


def run(args, outdir):
    return main(list(args) + ["--out", str(outdir)])


class TestEval:
    def test_builtin_f1(self, capsys, outdir):
        code = run(["eval", "--builtin", "f1", "--lam", "0.5", "--z", "0.5"], outdir)
        assert code == 0
        doc = json.loads(capsys.readouterr().out)
        assert doc["f"]["re"] == pytest.approx(0.4166666667, abs=1e-9)
        assert doc["f"]["im"] == pytest.approx(0.0, abs=1e-12)
        assert (outdir / "eval.json").exists()

    def test_radius_error_exit(self, outdir):
        assert run(["eval", "--builtin", "h0", "--z", "0.9999999"], outdir) == 3

    def test_missing_map_usage_error(self, outdir):
        assert run(["eval", "--z", "0.5"], outdir) == 2


class TestCheck:
    def test_kaplan_pass(self, capsys, outdir):
        code = run(["check", "--name", "kaplan", "--builtin", "h0", "--r", "0.9"], outdir)
        assert code == 0
        doc = json.loads(capsys.readouterr().out)
        assert doc["pass"] is True
        assert doc["margin"] > 0
        assert set(doc) == {"name", "margin", "r", "grid_n", "witness", "gamma", "pass"}

    def test_harmonic_fail_exit(self, capsys, outdir):
        code = run(
            ["check", "--name", "harmonic", "--builtin", "f1", "--lam", "0.9"], outdir
        )
        assert code == 1

    def test_starlike_with_descriptor(self, capsys, outdir, tmp_path):
        doc = to_descriptor(convex_order_derivative(0.0, [(0.0, 1.0)]))
        path = tmp_path / "halfplane.json"
        path.write_text(json.dumps(doc))
        code = run(["check", "--name", "starlike", "--map", str(path), "--r", "0.9"], outdir)
        assert code == 0

    def test_covering(self, capsys, outdir):
        code = run(
            ["check", "--name", "covering", "--builtin", "gK", "--K", "3",
             "--r", "0.999", "--target-radius", "0.3"],
            outdir,
        )
        assert code == 0


class TestMeans:
    def test_h0_csv_row(self, capsys, outdir):
        code = run(
            ["means", "--builtin", "h0", "--beta", "0.3333333333", "--r", "0.9"], outdir
        )
        assert code == 0
        lines = capsys.readouterr().out.strip().split("\n")
        assert lines[0] == "beta,r,value,bound,slack"
        fields = [float(tok) for tok in lines[1].split(",")]
        assert fields[2] == pytest.approx(1.81, abs=1e-6)
        assert fields[3] == pytest.approx(2.0, abs=1e-6)
        assert (outdir / "means.csv").exists()


class TestAlexander:
    def test_descriptor_with_dilatation(self, capsys, outdir, tmp_path):
        doc = to_descriptor(convex_order_derivative(0.0, [(0.0, 1.0)]))
        doc["dilatation"] = {"variant": "scaled_rotation", "params": {"c": 0.5, "theta": 0.0}}
        path = tmp_path / "map.json"
        path.write_text(json.dumps(doc))
        code = run(
            ["alexander", "--map", str(path), "--lam", "1", "--coefficients", "10"], outdir
        )
        assert code == 0
        payload = json.loads(capsys.readouterr().out)
        assert payload["pass"] is True
        assert len(payload["H_coefficients"]) == 10
        H1 = payload["H_coefficients"][0]
        assert H1[0] == pytest.approx(1.0, abs=1e-8)


class TestProbe:
    def test_tiny_probe(self, capsys, outdir):
        code = run(
            ["probe", "--conjecture", "cor2", "--delta", "2", "--K", "2",
             "--instances", "2", "--steps", "3", "--theta-count", "2",
             "--no-injectivity", "--grid-n", "512"],
            outdir,
        )
        assert code == 0
        payload = json.loads(capsys.readouterr().out)
        assert payload["bracket"] == [1.0, 1.0]
        assert payload["conjectured_scale"] == pytest.approx(1.0)
        assert (outdir / "probe.jsonl").exists()


class TestRender:
    def test_single_figure(self, capsys, outdir):
        code = run(
            ["render", "--figure", "fig1", "--lam", "0.5", "--points", "40",
             "--rays", "6", "--circles", "3"],
            outdir,
        )
        assert code == 0
        assert (outdir / "fig1-lam0.5.svg").exists()
        assert (outdir / "fig1-lam0.5.csv").exists()

    def test_fig2_requires_params(self, outdir):
        assert run(["render", "--figure", "fig2"], outdir) == 2


class TestConfig:
    def test_config_defaults(self, capsys, outdir, tmp_path):
        cfg = tmp_path / "cfg.json"
        cfg.write_text(json.dumps({"builtin": "h0", "r": 0.9}))
        code = run(["check", "--config", str(cfg), "--name", "kaplan"], outdir)
        assert code == 0
        doc = json.loads(capsys.readouterr().out)
        assert doc["r"] == pytest.approx(0.9)

    def test_unknown_config_key_rejected(self, outdir, tmp_path):
        cfg = tmp_path / "cfg.json"
        cfg.write_text(json.dumps({"no_such_key": 1}))
        assert run(["check", "--config", str(cfg), "--name", "kaplan", "--builtin", "h0"], outdir) == 2

    def test_flag_overrides_config(self, capsys, outdir, tmp_path):
        cfg = tmp_path / "cfg.json"
        cfg.write_text(json.dumps({"builtin": "h0", "r": 0.5}))
        code = run(["check", "--config", str(cfg), "--name", "kaplan", "--r", "0.9"], outdir)
        assert code == 0
        doc = json.loads(capsys.readouterr().out)
        assert doc["r"] == pytest.approx(0.9)
