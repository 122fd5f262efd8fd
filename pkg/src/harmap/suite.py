"""Acceptance battery: one function per criterion, each returning a record
with a pass flag, a human-readable detail line, and its runtime.

The same registry backs the ``suite`` CLI subcommand and the acceptance
test module, so the criteria and their tolerances live in exactly one
place.
"""

from __future__ import annotations

import json
import math
import tempfile
import time
from dataclasses import dataclass
from pathlib import Path
from typing import Callable, List

import numpy as np
from numpy.polynomial.legendre import leggauss

from .alexander import alexander_ctc_check, alexander_transform, taylor_coefficients
from .checks import boundary_rotation, covering_check, harmonic_ctc_sweep
from .families import (
    HarmonicMap,
    Monomial,
    Rotation,
    ScaledRotation,
    builtin,
    capped_convexity_derivative,
    convex_order_derivative,
    half_plane_map,
    random_bounded_rotation,
    random_capped_convexity,
    random_concave,
    random_convex_order,
)
from .means import integral_mean, integral_mean_bound
from .parallel import work_map
from .probe import grid_injectivity
from .render import (
    FIGURE_ONE_LAMBDAS,
    FIGURE_TWO_PARAMS,
    emit_svg,
    sample_curves,
    svg_hash,
    vertex_hash,
)

HASH_MANIFEST = Path(__file__).parent / "data" / "figure_hashes.json"


@dataclass
class CriterionResult:
    cid: str
    description: str
    passed: bool
    detail: str
    seconds: float


def _result(cid, description, passed, detail, t0):
    return CriterionResult(cid, description, bool(passed), detail, time.perf_counter() - t0)


def beta_quadrature_oracle(a, b):
    """B(a, b) by direct quadrature, independent of the log-Gamma route.

    Splits at 1/2 and substitutes t = s^2 on each half, which removes the
    endpoint singularity whenever the exponent is >= -1/2.
    """
    edge = math.sqrt(0.5)

    def half(p, q):
        prev = None
        n = 64
        while n <= 4096:
            x, w = leggauss(n)
            s = (x + 1.0) * (edge / 2.0)
            vals = 2.0 * s ** (2.0 * p - 1.0) * (1.0 - s * s) ** (q - 1.0)
            val = float((w * (edge / 2.0)) @ vals)
            if prev is not None and abs(val - prev) <= 1e-13 * (1.0 + abs(val)):
                return val
            prev, n = val, n * 2
        return prev

    return half(a, b) + half(b, a)


# ---------------------------------------------------------------------------

def criterion_means_identity(seed=42):
    t0 = time.perf_counter()
    h0 = builtin("h0")
    worst = 0.0
    for r in (0.3, 0.6, 0.9):
        worst = max(worst, abs(integral_mean(h0, 1.0 / 3.0, r, 2048) - (1.0 + r * r)))
    elapsed = time.perf_counter() - t0
    ok = worst <= 1e-10 and elapsed < 1.0
    return _result(
        "C01",
        "exponent-1/3 mean of h0 equals 1 + r^2 (1e-10; < 1 s)",
        ok,
        f"max deviation {worst:.2e}, {elapsed:.2f}s",
        t0,
    )


def criterion_bound_values(seed=42):
    t0 = time.perf_counter()
    b13, b12 = integral_mean_bound(1.0 / 3.0), integral_mean_bound(0.5)
    d13 = abs(b13 - 2.0)
    d12 = abs(b12 - 32.0 / (3.0 * math.pi))
    q13 = abs(b13 - (2.0 ** 2.0 / math.pi) * beta_quadrature_oracle(1.5, 0.5))
    q12 = abs(b12 - (2.0 ** 3.0 / math.pi) * beta_quadrature_oracle(2.0, 0.5))
    ok = d13 <= 1e-12 and d12 <= 1e-12 and q13 <= 1e-9 and q12 <= 1e-9
    return _result(
        "C02",
        "mean bound at 1/3 and 1/2 matches closed forms (1e-12) and quadrature oracle (1e-9)",
        ok,
        f"closed-form diffs {d13:.1e}/{d12:.1e}; oracle diffs {q13:.1e}/{q12:.1e}",
        t0,
    )


def criterion_sharpness(seed=42):
    t0 = time.perf_counter()
    v = integral_mean(builtin("h0"), 1.0 / 3.0, 0.999)
    slack = integral_mean_bound(1.0 / 3.0) - v
    ok = v >= 1.998 and slack <= 0.002
    return _result(
        "C03",
        "h0 mean at r = 0.999 within 0.002 of the bound",
        ok,
        f"value {v:.6f}, slack {slack:.6f}",
        t0,
    )


def criterion_means_sweep(seed=42):
    t0 = time.perf_counter()
    rng = np.random.default_rng(seed)
    violations = 0
    min_slack = np.inf
    for _ in range(200):
        h = random_convex_order(-0.5, rng, int(rng.integers(1, 7)))
        for beta in (0.25, 1.0 / 3.0, 0.5, 1.0):
            bound = integral_mean_bound(beta)
            for r in (0.5, 0.9, 0.99):
                v = integral_mean(h, beta, r)
                if v > bound + 1e-9:
                    violations += 1
                min_slack = min(min_slack, bound - v)
    elapsed = time.perf_counter() - t0
    ok = violations == 0 and elapsed < 60.0
    return _result(
        "C04",
        "200 seeded instances x 4 exponents x 3 radii: mean <= bound + 1e-9 (< 60 s)",
        ok,
        f"{violations} violations, min slack {min_slack:.2e}, {elapsed:.1f}s",
        t0,
    )


def _sweep_margins(maps):
    """Kaplan sweep margins of prepared harmonic maps, HARMAP_THREADS-aware."""
    return work_map(lambda f: harmonic_ctc_sweep(f, 32, 0.99, 2048).margin, maps)


def criterion_rotation_sweep(seed=42):
    t0 = time.perf_counter()
    rng = np.random.default_rng(seed + 1)
    thetas = 2.0 * math.pi * np.arange(8) / 8.0
    maps = [
        HarmonicMap(h, Rotation(float(theta)))
        for h in [random_convex_order(-0.5, rng) for _ in range(50)]
        for theta in thetas
    ]
    margins = _sweep_margins(maps)
    failures = sum(1 for m in margins if not m > 0.0)
    return _result(
        "C05",
        "50 order -1/2 instances x 8 rotation dilatations: sweep margin > 0",
        failures == 0,
        f"{failures} failures, worst margin {min(margins):.4f}",
        t0,
    )


def criterion_scaled_rotation_sweep(seed=42):
    t0 = time.perf_counter()
    rng = np.random.default_rng(seed + 2)
    maps = []
    for beta in (-0.4, -0.25, -0.1, 0.0):
        c = math.cos(beta * math.pi) - 1e-3
        for _ in range(50):
            h = random_convex_order(beta, rng)
            maps.append(HarmonicMap(h, ScaledRotation(c, float(rng.uniform(0.0, 2.0 * math.pi)))))
    margins = _sweep_margins(maps)
    failures = sum(1 for m in margins if not m > 0.0)
    return _result(
        "C06",
        "convex order beta in {-0.4,-0.25,-0.1,0} with scale cos(beta pi) - 1e-3: zero failures",
        failures == 0,
        f"{failures} failures, worst margin {min(margins):.4f}",
        t0,
    )


def criterion_family_sweeps(seed=42):
    t0 = time.perf_counter()
    rng = np.random.default_rng(seed + 3)
    maps = []
    # bounded rotation K = 4 - delta with scale sin(delta pi / 4) - 1e-3
    for delta in (0.5, 1.0, 1.5):
        k = 4.0 - delta
        c = math.sin(delta * math.pi / 4.0) - 1e-3
        for _ in range(50):
            h = random_bounded_rotation(k, rng)
            maps.append(HarmonicMap(h, ScaledRotation(c, float(rng.uniform(0.0, 2.0 * math.pi)))))
    # capped convexity with monomial dilatation at modulus 1/(n+1)
    for npow in (1, 2, 3):
        for _ in range(50):
            h = random_capped_convexity(rng)
            lam = np.exp(1j * float(rng.uniform(0.0, 2.0 * math.pi))) / (npow + 1.0)
            maps.append(HarmonicMap(h, Monomial(lam, npow)))
    # concave alpha with scale sin((2 - alpha) pi / 2) - 1e-3
    for alpha in (1.25, 1.5, 1.75):
        c = math.sin((2.0 - alpha) * math.pi / 2.0) - 1e-3
        for _ in range(50):
            h = random_concave(alpha, rng)
            maps.append(HarmonicMap(h, ScaledRotation(c, float(rng.uniform(0.0, 2.0 * math.pi)))))
    margins = _sweep_margins(maps)
    failures = sum(1 for m in margins if not m > 0.0)
    worst = min(margins)
    br = boundary_rotation(builtin("gK", K=3.0), 0.99, 2048)
    br_ok = 2.9 * math.pi <= br <= 3.0 * math.pi + 0.01
    ok = failures == 0 and br_ok
    return _result(
        "C07",
        "bounded-rotation / capped / concave sweeps below their constants: zero failures; "
        "rotation integral of gK(3) at 0.99 in [2.9 pi, 3 pi + 0.01]",
        ok,
        f"{failures} failures, worst margin {worst:.4f}, rotation integral {br / math.pi:.4f} pi",
        t0,
    )


def criterion_covering(seed=42):
    t0 = time.perf_counter()
    outcomes = {k: covering_check(builtin("gK", K=k), 0.999, 0.95 / k, 16) for k in (2.5, 3.0, 3.5)}
    ok = all(outcomes.values())
    return _result(
        "C08",
        "image of gK covers the disk of radius 0.95/K (16 probes, winding 1)",
        ok,
        ", ".join(f"K={k}: {v}" for k, v in outcomes.items()),
        t0,
    )


def criterion_collisions(seed=42):
    t0 = time.perf_counter()
    reports = {lam: grid_injectivity(builtin("f1", lam=lam)) for lam in FIGURE_ONE_LAMBDAS}
    fifth, half, fiven, nine = (reports[lam] for lam in FIGURE_ONE_LAMBDAS)
    sub = {
        "collision at 5/9 certified": fiven.found and (fiven.winding or 0) >= 2,
        "collision at 9/10 certified": nine.found and (nine.winding or 0) >= 2,
        "no collision at 1/5": not fifth.found,
        "no collision at 1/2": not half.found,
    }
    elapsed = time.perf_counter() - t0
    ok = all(sub.values()) and elapsed < 30.0
    detail = "; ".join(f"{k}: {v}" for k, v in sub.items()) + f"; {elapsed:.1f}s"
    return _result(
        "C09",
        "degree-3 polynomial map: certified collisions at 5/9 and 9/10, none at 1/5 and 1/2",
        ok,
        detail,
        t0,
    )


def criterion_alexander(seed=42):
    t0 = time.perf_counter()
    hp = half_plane_map()
    series = taylor_coefficients(hp.value_fn, 50, rho=0.9)
    H, _ = alexander_transform(series, series)
    coeff_err = float(np.max(np.abs(H.coefficients - 1.0 / np.arange(1, 51))))

    ex1 = alexander_ctc_check(HarmonicMap(hp, ScaledRotation(0.5, 0.0)), 1.0)
    ex2 = alexander_ctc_check(HarmonicMap(hp, ScaledRotation(0.5, 0.0)), 0.0)
    h_neg = convex_order_derivative(-0.35, [(0.0, 1.0)])
    c = math.cos(0.25 * math.pi) - 1e-3
    ex3 = alexander_ctc_check(
        HarmonicMap(h_neg, ScaledRotation(c, 0.0)), 1.0, starlike_floor=-0.25
    )
    ok = (
        coeff_err <= 1e-10
        and ex1.margin > 0.0
        and ex2.margin > 0.0
        and ex3.margin > 0.0
    )
    return _result(
        "C10",
        "index-division transform of z/(1-z) matches 1/k (1e-10); three transform checks pass",
        ok,
        f"coeff err {coeff_err:.1e}; margins {ex1.margin:.3f}/{ex2.margin:.3f}/{ex3.margin:.3f}",
        t0,
    )


def criterion_oracles(seed=42):
    t0 = time.perf_counter()
    rng = np.random.default_rng(seed + 4)
    instances = []
    for _ in range(5):
        instances.append(random_convex_order(float(rng.uniform(-0.5, 0.9)), rng))
        instances.append(random_bounded_rotation(float(rng.uniform(2.0, 4.0)), rng))
        instances.append(random_concave(float(rng.uniform(1.05, 1.95)), rng))
        instances.append(random_capped_convexity(rng))
    step = 1e-5
    worst_fd = 0.0
    for h in instances:
        pts = 0.9 * np.sqrt(rng.uniform(0.0, 1.0, 50)) * np.exp(
            1j * rng.uniform(0.0, 2.0 * math.pi, 50)
        )
        fd = np.log(h.derivative(pts + step) / h.derivative(pts - step)) / (2.0 * step)
        worst_fd = max(worst_fd, float(np.max(np.abs(fd - h.pre_schwarzian(pts)))))

    pairs = [
        (convex_order_derivative(-0.5, [(0.0, 1.0)]), builtin("h0")),
        (convex_order_derivative(0.0, [(0.0, 1.0)]), half_plane_map()),
        (capped_convexity_derivative([(0.0, 1.0)]), None),
    ]
    zs = 0.9 * np.exp(1j * np.linspace(0.0, 2.0 * math.pi, 17))
    worst_ad = 0.0
    for pd, closed in pairs:
        ref = closed.value(zs) if closed is not None else zs - 0.5 * zs * zs
        worst_ad = max(worst_ad, float(np.max(np.abs(pd.value(zs) - ref))))
    ok = worst_fd <= 1e-6 and worst_ad <= 1e-10
    return _result(
        "C11",
        "log-derivative finite differences (1e-6) and segment quadrature vs closed forms (1e-10)",
        ok,
        f"fd err {worst_fd:.1e}; antiderivative err {worst_ad:.1e}",
        t0,
    )


def criterion_figures(seed=42, out_dir=None):
    t0 = time.perf_counter()
    manifest = {}
    if HASH_MANIFEST.exists():
        manifest = json.loads(HASH_MANIFEST.read_text())
    problems = []
    computed = {}
    with tempfile.TemporaryDirectory() as tmp:
        jobs = [(f"fig1-{chr(97 + i)}", builtin("f1", lam=lam)) for i, lam in enumerate(FIGURE_ONE_LAMBDAS)]
        jobs += [
            (f"fig2-{chr(97 + i)}", builtin("fKdelta", K=k, delta=d))
            for i, (k, d) in enumerate(FIGURE_TWO_PARAMS)
        ]
        for name, fmap in jobs:
            curves = sample_curves(fmap)
            p1 = emit_svg(curves, Path(tmp) / f"{name}-1.svg")
            p2 = emit_svg(curves, Path(tmp) / f"{name}-2.svg")
            if p1.read_bytes() != p2.read_bytes():
                problems.append(f"{name}: emission not byte-deterministic")
            computed[name] = {"vertices": vertex_hash(curves), "svg": svg_hash(p1)}
            if out_dir is not None:
                emit_svg(curves, Path(out_dir) / f"{name}.svg")
            if name in manifest and manifest[name] != computed[name]:
                problems.append(f"{name}: hash drifted from the pinned manifest")
    if not manifest:
        problems.append("hash manifest missing; run scripts/pin_figure_hashes.py")
    ok = not problems
    return _result(
        "C12",
        "figure batches render byte-deterministically and match pinned hashes",
        ok,
        "; ".join(problems) if problems else f"{len(computed)} figures stable",
        t0,
    )


CRITERIA: List[Callable] = [
    criterion_means_identity,
    criterion_bound_values,
    criterion_sharpness,
    criterion_means_sweep,
    criterion_rotation_sweep,
    criterion_scaled_rotation_sweep,
    criterion_family_sweeps,
    criterion_covering,
    criterion_collisions,
    criterion_alexander,
    criterion_oracles,
    criterion_figures,
]


def run_suite(seed=42, out_dir=None) -> List[CriterionResult]:
    results = []
    for fn in CRITERIA:
        if fn is criterion_figures:
            results.append(fn(seed, out_dir=out_dir))
        else:
            results.append(fn(seed))
    return results


def format_table(results) -> str:
    lines = []
    for res in results:
        status = "PASS" if res.passed else "FAIL"
        lines.append(f"{res.cid}  {status}  {res.seconds:7.2f}s  {res.description}")
        lines.append(f"      {res.detail}")
    npass = sum(r.passed for r in results)
    lines.append(f"{npass}/{len(results)} criteria passed")
    return "\n".join(lines)
