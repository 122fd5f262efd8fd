"""Non-univalence detection and sharpness probing.

A winding number >= 2 of the boundary image about a target point certifies
that a sense-preserving map is not injective; absence of collisions on a
grid is only evidence of univalence.  Collision reports therefore carry an
explicit certificate/evidence status, and ``found`` is set only for pairs
confirmed by a winding count.
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass
from typing import Optional, Tuple

import numpy as np

from .checks import harmonic_ctc_sweep, winding_increments
from .errors import (
    AmbiguousWindingError,
    CurveDistanceError,
    DegenerateValueError,
    PreconditionError,
)
from .families import (
    HarmonicMap,
    Monomial,
    ScaledRotation,
    builtin,
    capped_convexity_derivative,
    concave_derivative,
    map_values,
    random_bounded_rotation,
    random_capped_convexity,
    random_concave,
)
from .numerics import TWO_PI, circle_grid
from .parallel import work_map

DEFAULT_SCAN_R = 0.995
DEFAULT_RADIAL = 256
DEFAULT_ANGULAR = 1024


def winding_count(obj, r, target, n=4096, max_n=1 << 18) -> int:
    """Winding number of the boundary image curve about ``target``.

    For sense-preserving maps this counts preimages of the target inside
    |z| < r.  The curve is resampled (doubling n) until the target is at
    least ten local chord lengths from every sample; the accumulated
    argument must land within 0.1 of an integer multiple of 2*pi.
    """
    target = complex(target)
    m = int(n)
    if isinstance(obj, HarmonicMap):
        sup = obj.omega.sup_norm
        if sup > 1.0:
            raise PreconditionError("map is not sense-preserving")
    while True:
        curve = np.asarray(map_values(obj, circle_grid(r, m)), dtype=complex)
        dist = np.abs(curve - target)
        if float(np.min(dist)) < 1e-9:
            raise CurveDistanceError("curve passes through the winding target")
        chord = np.abs(np.roll(curve, -1) - curve)
        local = np.maximum(chord, np.roll(chord, 1))
        if float(np.min(dist - 10.0 * local)) <= 0.0:
            if m >= max_n:
                raise CurveDistanceError(
                    f"target within ten chord lengths of the curve at {max_n} samples"
                )
            m *= 2
            continue
        total = float(np.sum(winding_increments(curve, target))) / TWO_PI
        residual = abs(total - round(total))
        if residual >= 0.1:
            if m >= max_n:
                raise AmbiguousWindingError(f"winding residual {residual:g} at {max_n} samples")
            m *= 2
            continue
        return int(round(total))


@dataclass(frozen=True)
class CollisionReport:
    """Result of a polar-grid collision scan.

    ``found`` is True only for a collision confirmed by a winding count
    >= 2 near the collision image (status "certificate"); unconfirmed
    candidate pairs are reported as evidence, not failures.
    """

    found: bool
    pair: Optional[Tuple[complex, complex, float]]
    grid: Tuple[int, int]
    r: float
    status: str = "none"
    candidate_count: int = 0
    winding: Optional[int] = None

    def to_json(self):
        pair = None
        if self.pair is not None:
            z1, z2, d = self.pair
            pair = {
                "z1": {"re": z1.real, "im": z1.imag},
                "z2": {"re": z2.real, "im": z2.imag},
                "image_distance": d,
            }
        return {
            "found": self.found,
            "pair": pair,
            "grid": list(self.grid),
            "r": self.r,
            "status": self.status,
            "candidate_count": self.candidate_count,
            "winding": self.winding,
        }


def _candidate_pairs(z, w, image_tol, preimage_gap):
    """Spatial-hash pass: pairs with image distance < image_tol and preimage
    distance > preimage_gap.  Buckets have side image_tol, so any close pair
    lies in the same or an adjacent cell."""
    ix = np.floor(w.real / image_tol).astype(np.int64)
    iy = np.floor(w.imag / image_tol).astype(np.int64)
    # collapse 2-D cells to sortable scalar keys; 2^31 offset keeps them positive
    shift = np.int64(1) << np.int64(32)
    key = (ix + (1 << 30)) * shift + (iy + (1 << 30))
    order = np.argsort(key, kind="stable")
    sk = key[order]

    pairs = []
    npts = len(w)
    for a, b in ((0, 0), (1, 0), (0, 1), (1, 1), (1, -1)):
        tgt = (ix + a + (1 << 30)) * shift + (iy + b + (1 << 30))
        lo = np.searchsorted(sk, tgt, side="left")
        hi = np.searchsorted(sk, tgt, side="right")
        counts = hi - lo
        total = int(np.sum(counts))
        if total == 0:
            continue
        src = np.repeat(np.arange(npts), counts)
        starts = np.repeat(lo, counts)
        offsets = np.arange(total) - np.repeat(np.cumsum(counts) - counts, counts)
        dst = order[starts + offsets]
        if a == 0 and b == 0:
            keep = src < dst
        else:
            keep = src != dst
        src, dst = src[keep], dst[keep]
        close = np.abs(w[src] - w[dst]) < image_tol
        apart = np.abs(z[src] - z[dst]) > preimage_gap
        sel = close & apart
        pairs.append(np.stack([src[sel], dst[sel]], axis=1))
    if not pairs:
        return np.empty((0, 2), dtype=int)
    allp = np.concatenate(pairs, axis=0)
    if len(allp):
        # offsets (1,0)/(0,1)/(1,±1) can produce each unordered pair once from
        # either side; normalize and deduplicate
        allp = np.sort(allp, axis=1)
        allp = np.unique(allp, axis=0)
    return allp


def grid_injectivity(
    obj,
    r=DEFAULT_SCAN_R,
    radial_m=DEFAULT_RADIAL,
    angular_m=DEFAULT_ANGULAR,
    confirm=True,
    max_confirm=16,
) -> CollisionReport:
    """Scan a polar grid for image collisions between well-separated points.

    Candidate pairs have image distance below 1e-4 times the image diameter
    and preimage distance above four grid spacings.  With ``confirm`` the
    candidates are certified by a winding count >= 2 near the collision
    image; only certified collisions set ``found``.
    """
    radii = r * (1.0 + np.arange(radial_m)) / radial_m
    angles = TWO_PI * np.arange(angular_m) / angular_m
    z = (radii[:, None] * np.exp(1j * angles)[None, :]).reshape(-1)
    w = np.asarray(map_values(obj, z), dtype=complex)

    diam = math.hypot(
        float(np.max(w.real) - np.min(w.real)), float(np.max(w.imag) - np.min(w.imag))
    )
    if diam == 0.0:
        return CollisionReport(False, None, (radial_m, angular_m), r)
    image_tol = 1e-4 * diam
    spacing = max(r / radial_m, r * TWO_PI / angular_m)
    pairs = _candidate_pairs(z, w, image_tol, 4.0 * spacing)

    if len(pairs) == 0:
        return CollisionReport(False, None, (radial_m, angular_m), r, "no-candidates", 0)

    sep = np.abs(z[pairs[:, 0]] - z[pairs[:, 1]])
    ranking = np.argsort(-sep, kind="stable")
    pairs = pairs[ranking]

    if not confirm:
        i, j = pairs[0]
        d = float(abs(w[i] - w[j]))
        return CollisionReport(
            False,
            (complex(z[i]), complex(z[j]), d),
            (radial_m, angular_m),
            r,
            "unconfirmed",
            len(pairs),
        )

    for i, j in pairs[:max_confirm]:
        mid = 0.5 * (w[i] + w[j])
        probes = [
            mid,
            mid + 2.0 * image_tol,
            mid - 2.0 * image_tol,
            mid + 2j * image_tol,
            mid - 2j * image_tol,
        ]
        for t in probes:
            try:
                wn = winding_count(obj, r, t)
            except (CurveDistanceError, AmbiguousWindingError, DegenerateValueError):
                continue
            if wn >= 2:
                d = float(abs(w[i] - w[j]))
                return CollisionReport(
                    True,
                    (complex(z[i]), complex(z[j]), d),
                    (radial_m, angular_m),
                    r,
                    "certificate",
                    len(pairs),
                    wn,
                )
    i, j = pairs[0]
    d = float(abs(w[i] - w[j]))
    return CollisionReport(
        False,
        (complex(z[i]), complex(z[j]), d),
        (radial_m, angular_m),
        r,
        "unconfirmed",
        len(pairs),
    )


# ---------------------------------------------------------------------------
# sharpness probes

@dataclass(frozen=True)
class ConjectureProbe:
    conjecture: str
    parameter_name: str
    critical_estimate: float
    bracket: Tuple[float, float]  # (largest passing scale, smallest failing scale)
    method: str

    def to_json(self):
        return {
            "conjecture": self.conjecture,
            "parameter_name": self.parameter_name,
            "critical_estimate": self.critical_estimate,
            "bracket": list(self.bracket),
            "method": self.method,
        }


@dataclass
class ProbeSettings:
    h_instances: int = 20
    theta_count: int = 16
    bisection_steps: int = 20
    r: float = 0.99
    kaplan_n: int = 1024
    eps_count: int = 32
    with_injectivity: bool = True
    scan_radial: int = 96
    scan_angular: int = 384
    log_path: Optional[str] = None


def _probe_family(conjecture, params, count, rng):
    """Named extremal candidate plus seeded random class members."""
    if conjecture == "cor1":
        named = [capped_convexity_derivative([(0.0, 1.0)], name="h1")]
        rand = [random_capped_convexity(rng) for _ in range(max(0, count - 1))]
        return named + rand
    if conjecture == "cor2":
        k = 4.0 - params["delta"] if "k" not in params else params["k"]
        named = [builtin("gK", K=k)]
        rand = [random_bounded_rotation(k, rng) for _ in range(max(0, count - 1))]
        return named + rand
    if conjecture == "cor3":
        alpha = params["alpha"]
        named = [concave_derivative(alpha, [(math.pi, alpha - 1.0)], name="single_atom")]
        rand = [random_concave(alpha, rng) for _ in range(max(0, count - 1))]
        return named + rand
    raise PreconditionError(f"unknown conjecture family {conjecture!r}")


def _probe_dilatation(conjecture, params, scale, theta):
    if conjecture == "cor1":
        return Monomial(scale * np.exp(1j * theta), int(params.get("n", 1)))
    return ScaledRotation(scale, theta)


def conjectured_scale(conjecture, params) -> float:
    """The scale the source results assert to be safe (and conjecture sharp)."""
    if conjecture == "cor1":
        return 1.0 / (int(params.get("n", 1)) + 1)
    if conjecture == "cor2":
        return math.sin(params["delta"] * math.pi / 4.0)
    if conjecture == "cor3":
        return math.sin((2.0 - params["alpha"]) * math.pi / 2.0)
    raise PreconditionError(f"unknown conjecture family {conjecture!r}")


def _trial_failures(instances, conjecture, params, scale, settings, log):
    """Count close-to-convexity sweep failures (and certified collisions)
    across instances and a theta sweep at one dilatation scale.

    Instances are independent work units; rows are logged in instance order
    regardless of the schedule, so the aggregate is schedule-independent.
    """
    thetas = TWO_PI * np.arange(settings.theta_count) / settings.theta_count

    def run_instance(item):
        idx, h = item
        rows = []
        fails = 0
        for theta in thetas:
            om = _probe_dilatation(conjecture, params, scale, float(theta))
            fmap = HarmonicMap(h, om, f"probe[{idx}]")
            rep = harmonic_ctc_sweep(
                fmap, settings.eps_count, settings.r, settings.kaplan_n
            )
            fail = not rep.passed()
            certified = False
            if not fail and settings.with_injectivity:
                col = grid_injectivity(
                    fmap,
                    settings.r,
                    settings.scan_radial,
                    settings.scan_angular,
                )
                certified = col.found
                fail = certified
            rows.append(
                {
                    "scale": scale,
                    "instance": idx,
                    "theta": float(theta),
                    "margin": rep.margin,
                    "collision": certified,
                    "pass": not fail,
                }
            )
            if fail:
                fails += 1
        return rows, fails

    outcomes = work_map(run_instance, list(enumerate(instances)))
    if log is not None:
        for rows, _ in outcomes:
            for row in rows:
                log.write(json.dumps(row) + "\n")
    return sum(fails for _, fails in outcomes)


def conjecture_probe(
    conjecture: str,
    params: Optional[dict] = None,
    settings: Optional[ProbeSettings] = None,
    seed: int = 42,
) -> ConjectureProbe:
    """Bisect the dilatation scale for the first sweep failure.

    At each scale the close-to-convexity sweep (and optionally a collision
    scan) runs over the seeded instance set and a theta sweep; the returned
    bracket is (largest scale with no failure, smallest scale with one), the
    latter 1.0 when nothing failed.  The bracket is empirical only; it is
    not asserted to straddle the conjectured constant.
    """
    params = dict(params or {})
    settings = settings or ProbeSettings()
    rng = np.random.default_rng(seed)
    instances = _probe_family(conjecture, params, settings.h_instances, rng)
    parameter_name = "lambda_modulus" if conjecture == "cor1" else "dilatation_scale"

    log = open(settings.log_path, "w") if settings.log_path else None
    try:
        lo, hi = 0.0, None
        if _trial_failures(instances, conjecture, params, 1.0, settings, log) == 0:
            return ConjectureProbe(conjecture, parameter_name, 1.0, (1.0, 1.0), "bisection")
        hi = 1.0
        for _ in range(settings.bisection_steps):
            mid = 0.5 * (lo + hi)
            if mid <= 0.0 or mid == lo or mid == hi:
                break
            if _trial_failures(instances, conjecture, params, mid, settings, log) == 0:
                lo = mid
            else:
                hi = mid
    finally:
        if log is not None:
            log.close()
    return ConjectureProbe(
        conjecture, parameter_name, 0.5 * (lo + hi), (lo, hi), "bisection"
    )
