import math

import numpy as np
import pytest

from harmap.errors import CurveDistanceError
from harmap.families import builtin, identity_map
from harmap.probe import (
    ProbeSettings,
    _candidate_pairs,
    _probe_family,
    _trial_failures,
    conjecture_probe,
    conjectured_scale,
    grid_injectivity,
    winding_count,
)


class TestWinding:
    def test_target_outside(self):
        assert winding_count(identity_map(), 0.9, 2.0) == 0

    def test_target_inside(self):
        assert winding_count(identity_map(), 0.5, 0.0) == 1

    def test_doubling_invariance(self):
        f = builtin("f1", lam=0.9)
        w1 = winding_count(f, 0.99, 0.1 + 0.05j, n=4096)
        w2 = winding_count(f, 0.99, 0.1 + 0.05j, n=8192)
        assert w1 == w2

    def test_curve_through_target(self):
        with pytest.raises(CurveDistanceError):
            winding_count(identity_map(), 0.9, 0.9)


class TestCandidatePairs:
    def test_against_brute_force(self):
        # small polar grid on a folding map; the spatial hash must find
        # exactly the pairs a quadratic scan finds
        f = builtin("f1", lam=0.9)
        radii = 0.995 * (1.0 + np.arange(48)) / 48
        angles = 2 * np.pi * np.arange(160) / 160
        z = (radii[:, None] * np.exp(1j * angles)[None, :]).reshape(-1)
        w = f.f(z)
        diam = math.hypot(
            float(np.ptp(w.real)), float(np.ptp(w.imag))
        )
        tol = 1e-4 * diam
        gap = 4.0 * max(0.995 / 48, 0.995 * 2 * np.pi / 160)
        pairs = _candidate_pairs(z, w, tol, gap)
        got = {tuple(sorted(p)) for p in pairs.tolist()}

        expect = set()
        for i in range(len(z)):
            close = np.abs(w - w[i]) < tol
            apart = np.abs(z - z[i]) > gap
            for j in np.nonzero(close & apart)[0]:
                if j > i:
                    expect.add((i, int(j)))
        assert got == expect


class TestGridInjectivity:
    def test_identity_clean(self):
        rep = grid_injectivity(identity_map(), radial_m=64, angular_m=256)
        assert not rep.found
        assert rep.candidate_count == 0

    def test_fold_is_certified(self):
        rep = grid_injectivity(builtin("f1", lam=0.9))
        assert rep.found
        assert rep.status == "certificate"
        assert rep.winding is not None and rep.winding >= 2
        z1, z2, dist = rep.pair
        assert abs(z1 - z2) > 4.0 * max(0.995 / 256, 0.995 * 2 * np.pi / 1024)

    def test_certified_pair_image_close(self):
        f = builtin("f1", lam=0.9)
        rep = grid_injectivity(f)
        z1, z2, dist = rep.pair
        assert abs(f.f(z1) - f.f(z2)) == pytest.approx(dist, abs=1e-12)

    def test_winding_two_near_collision_image(self):
        f = builtin("f1", lam=0.9)
        rep = grid_injectivity(f)
        z1, z2, dist = rep.pair
        mid = 0.5 * (f.f(z1) + f.f(z2))
        assert winding_count(f, 0.995, mid + 2.0 * dist) >= 2

    def test_univalent_parameters_unconfirmed(self):
        for lam in (0.2, 0.5):
            rep = grid_injectivity(builtin("f1", lam=lam))
            assert not rep.found

    def test_json_shape(self):
        rep = grid_injectivity(identity_map(), radial_m=32, angular_m=64)
        doc = rep.to_json()
        assert set(doc) >= {"found", "pair", "grid", "r", "status"}


class TestConjectureProbes:
    def test_trivial_regime_never_fails(self):
        settings = ProbeSettings(
            h_instances=2, theta_count=2, bisection_steps=4, kaplan_n=512,
            eps_count=8, with_injectivity=False,
        )
        probe = conjecture_probe("cor2", {"delta": 2.0, "k": 2.0}, settings, seed=3)
        assert probe.bracket == (1.0, 1.0)

    def test_monomial_bracket(self):
        settings = ProbeSettings(
            h_instances=3, theta_count=4, bisection_steps=8, kaplan_n=512,
            eps_count=16, with_injectivity=False,
        )
        probe = conjecture_probe("cor1", {"n": 1}, settings, seed=3)
        lo, hi = probe.bracket
        assert lo >= 0.5
        assert hi <= 0.9
        assert probe.parameter_name == "lambda_modulus"

    @pytest.mark.parametrize(
        "conjecture,params",
        [("cor1", {"n": 1}), ("cor1", {"n": 3}), ("cor2", {"delta": 1.0}), ("cor3", {"alpha": 1.5})],
    )
    def test_guaranteed_regime_zero_failures(self, conjecture, params):
        rng = np.random.default_rng(11)
        instances = _probe_family(conjecture, params, 4, rng)
        settings = ProbeSettings(theta_count=4, kaplan_n=512, eps_count=16, with_injectivity=False)
        scale = conjectured_scale(conjecture, params) - 1e-3
        assert _trial_failures(instances, conjecture, params, scale, settings, None) == 0

    def test_conjectured_scales(self):
        assert conjectured_scale("cor1", {"n": 1}) == pytest.approx(0.5)
        assert conjectured_scale("cor2", {"delta": 2.0}) == pytest.approx(1.0)
        assert conjectured_scale("cor3", {"alpha": 1.95}) == pytest.approx(
            math.sin(0.025 * math.pi), abs=1e-12
        )

    def test_high_alpha_guarantee(self):
        # close to the degenerate end the safe scale is tiny but still safe
        rng = np.random.default_rng(13)
        instances = _probe_family("cor3", {"alpha": 1.95}, 3, rng)
        settings = ProbeSettings(theta_count=4, kaplan_n=512, eps_count=16, with_injectivity=False)
        scale = math.sin(0.025 * math.pi) - 1e-3
        assert _trial_failures(instances, "cor3", {"alpha": 1.95}, scale, settings, None) == 0

    def test_jsonl_log(self, tmp_path):
        log = tmp_path / "probe.jsonl"
        settings = ProbeSettings(
            h_instances=1, theta_count=2, bisection_steps=2, kaplan_n=256,
            eps_count=8, with_injectivity=False, log_path=str(log),
        )
        conjecture_probe("cor1", {"n": 1}, settings, seed=5)
        import json

        lines = [json.loads(line) for line in log.read_text().splitlines()]
        assert lines
        assert all({"scale", "instance", "theta", "margin", "pass"} <= set(row) for row in lines)
