"""Geometric checks on the circle |z| = r.

Margins are signed distances from the relevant critical threshold; positive
means the property holds on the sampled grid.  Sub-arc integrals of
Re(1 + z F''/F') are evaluated exactly through the identity

    d/dtheta [theta + Im log F'(r e^{i theta})] = Re(1 + z F''/F'),

so the Kaplan functional reduces to prefix sums of phase increments of F'
over a doubled array; only the restriction to grid node pairs is a
discretization (which can only overestimate the true minimum).
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Callable, Optional, Tuple

import numpy as np

from .errors import DegenerateValueError, CurveDistanceError, PreconditionError
from .families import (
    BoundedRotation,
    ConvexOrder,
    Dilatation,
    HarmonicMap,
    HPrimeRep,
    ProductDerivative,
    map_values,
)
from .numerics import TWO_PI, circle_grid, wrap_to_pi

PASS_TOLERANCE = -1e-6
DEFAULT_R = 0.99
DEFAULT_N = 2048
STRICT_RADII = (0.9, 0.99, 0.999)


@dataclass(frozen=True)
class CheckReport:
    """Outcome of one grid check; ``margin > 0`` means the property held."""

    name: str
    margin: float
    r: float
    grid_n: int
    witness: Optional[complex] = None
    gamma: Optional[float] = None

    def passed(self, threshold=PASS_TOLERANCE) -> bool:
        return self.margin > threshold

    def to_json(self):
        return {
            "name": self.name,
            "margin": self.margin,
            "r": self.r,
            "grid_n": self.grid_n,
            "witness": None
            if self.witness is None
            else {"re": self.witness.real, "im": self.witness.imag},
            "gamma": self.gamma,
            "pass": bool(self.passed()),
        }


@dataclass(frozen=True)
class EpsSlice:
    """Analytic slice F = h + eps*g of a harmonic map (g' = omega h')."""

    base: HarmonicMap
    eps: complex = 1.0

    def derivative(self, z):
        om = np.asarray(self.base.omega.value(z), dtype=complex)
        return self.base.h.derivative(z) * (1.0 + self.eps * om)

    def pre_schwarzian(self, z):
        om = np.asarray(self.base.omega.value(z), dtype=complex)
        dom = np.asarray(self.base.omega.derivative(z), dtype=complex)
        return self.base.h.pre_schwarzian(z) + self.eps * dom / (1.0 + self.eps * om)


# ---------------------------------------------------------------------------
# pointwise functionals

def convexity_order(h: HPrimeRep, r=DEFAULT_R, n=DEFAULT_N, mode="min") -> CheckReport:
    """Extremum over the grid of Re(1 + z h''/h').

    mode="min": margin is the minimum, minus beta when the input carries a
    convex-order label (so that a positive margin certifies membership).
    mode="max": margin is the raw maximum (used for the capped family).
    """
    z = circle_grid(r, n)
    vals = np.real(1.0 + z * h.pre_schwarzian(z))
    if mode == "min":
        j = int(np.argmin(vals))
        margin = float(vals[j])
        if isinstance(h.label, ConvexOrder):
            margin -= h.label.beta
    elif mode == "max":
        j = int(np.argmax(vals))
        margin = float(vals[j])
    else:
        raise ValueError("mode must be 'min' or 'max'")
    return CheckReport(f"convexity_order[{mode}]", margin, r, n, complex(z[j]))


def starlike_order(h, r=DEFAULT_R, n=DEFAULT_N) -> CheckReport:
    """Minimum over the grid of Re(z h'/h); h evaluated by closed form or quadrature."""
    z = circle_grid(r, n)
    hv = np.asarray(h.value(z), dtype=complex)
    if float(np.min(np.abs(hv))) < 1e-12:
        raise DegenerateValueError("h vanishes on the check grid away from the origin")
    vals = np.real(z * h.derivative(z) / hv)
    j = int(np.argmin(vals))
    return CheckReport("starlike_order", float(vals[j]), r, n, complex(z[j]))


def boundary_rotation(h: HPrimeRep, r=DEFAULT_R, n=DEFAULT_N) -> float:
    """Trapezoid value of the total variation integral |Re(1 + z h''/h')| dtheta."""
    z = circle_grid(r, n)
    vals = np.abs(np.real(1.0 + z * h.pre_schwarzian(z)))
    return float(vals.mean() * TWO_PI)


# ---------------------------------------------------------------------------
# Kaplan sub-arc machinery

def _sliding_max(a, win):
    """m[i] = max(a[max(0, i-win+1) : i+1]) for a 1-D array, in O(n)."""
    n = a.shape[0]
    pad = (-n) % win
    b = np.concatenate([a, np.full(pad, -np.inf)]) if pad else a
    blocks = b.reshape(-1, win)
    left = np.maximum.accumulate(blocks, axis=1).reshape(-1)[:n]
    right = np.maximum.accumulate(blocks[:, ::-1], axis=1)[:, ::-1].reshape(-1)[:n]
    out = left.copy()
    idx = np.arange(n)
    start = idx - win + 1
    m = start > 0
    out[m] = np.maximum(right[start[m]], left[idx[m]])
    return out


def _subarc_minima(steps):
    """Minimum over node pairs (j1 < j2 <= j1+n) of the summed increments.

    ``steps`` has shape (rows, n); returns (min_sums, j1, j2) per row, using
    prefix sums over a doubled array and a sliding-window maximum.
    """
    rows, n = steps.shape
    mins = np.empty(rows)
    j1s = np.empty(rows, dtype=int)
    j2s = np.empty(rows, dtype=int)
    for i in range(rows):
        w = np.concatenate([steps[i], steps[i]])
        W = np.concatenate([[0.0], np.cumsum(w)])  # W[j], j = 0..2n
        run_max = _sliding_max(W[:-1], n)  # max over window ending at j2-1
        sums = W[1:] - run_max
        j2 = int(np.argmin(sums)) + 1
        lo = max(0, j2 - n)
        j1 = lo + int(np.argmax(W[lo:j2]))
        mins[i] = float(sums[j2 - 1])
        j1s[i] = j1
        j2s[i] = j2
    return mins, j1s, j2s


def _kaplan_scan(fprime_rows: Callable, r, n, max_n=65536):
    """Shared Kaplan driver.

    ``fprime_rows(z)`` returns F' sampled on the grid for one or more analytic
    functions, shape (rows, len(z)).  The grid is refined (doubled) until every
    per-segment phase increment is safely below pi, so the unwrapped phase is
    unambiguous.

    The summed increments around the whole circle equal 2*pi*(1 + N) with N
    the number of zeros of F' inside |z| < r; N > 0 breaks the local
    univalence hypothesis of the criterion, so each such zero subtracts a
    full turn from the reported margin, making it decisively negative.

    Returns (margins, witnesses, effective_n).
    """
    m = int(n)
    while True:
        z = circle_grid(r, m)
        rows = np.atleast_2d(np.asarray(fprime_rows(z), dtype=complex))
        if float(np.min(np.abs(rows))) <= 1e-12:
            raise DegenerateValueError("F' vanishes on the check grid")
        ph = np.angle(rows)
        dph = wrap_to_pi(np.diff(ph, axis=1, append=ph[:, :1]))
        if float(np.max(np.abs(dph))) > 2.5 and m < max_n:
            m *= 2
            continue
        steps = TWO_PI / m + dph  # exact segment integrals of Re(1 + zF''/F')
        zero_counts = np.rint(np.sum(steps, axis=1) / TWO_PI).astype(int) - 1
        mins, j1s, _ = _subarc_minima(steps)
        margins = math.pi + mins - TWO_PI * np.maximum(zero_counts, 0)
        witnesses = z[j1s % m]
        return margins, witnesses, m


def kaplan_margin(F, r=DEFAULT_R, n=DEFAULT_N) -> CheckReport:
    """pi plus the minimal sub-arc integral of Re(1 + z F''/F') at |z| = r.

    Positive for every r < 1 exactly when F is close-to-convex (Kaplan's
    criterion for locally univalent analytic functions).  F needs only a
    ``derivative`` method.
    """
    margins, witnesses, m = _kaplan_scan(lambda z: F.derivative(z)[None, :], r, n)
    return CheckReport("kaplan_margin", float(margins[0]), r, m, complex(witnesses[0]))


def harmonic_ctc_sweep(f: HarmonicMap, eps_count=32, r=DEFAULT_R, n=DEFAULT_N) -> CheckReport:
    """Minimum Kaplan margin of h + eps*g over eps on the unit circle.

    A positive value for every eps is the sufficient condition for the
    harmonic map itself to be close-to-convex; finite eps sampling makes
    this a numerical surrogate, reported as such.
    """
    if abs(complex(np.asarray(f.omega.value(0.0 + 0.0j), dtype=complex))) >= 1.0:
        raise PreconditionError("requires |g'(0)| < |h'(0)|")
    eps = np.exp(1j * TWO_PI * np.arange(eps_count) / eps_count)

    def rows(z):
        hp = f.h.derivative(z)
        om = np.asarray(f.omega.value(z), dtype=complex)
        return hp[None, :] * (1.0 + eps[:, None] * om[None, :])

    margins, witnesses, m = _kaplan_scan(rows, r, n)
    j = int(np.argmin(margins))
    return CheckReport(
        f"harmonic_ctc[{f.name}]", float(margins[j]), r, m, complex(witnesses[j])
    )


# ---------------------------------------------------------------------------
# close-to-convexity certificates against an explicit starlike comparison

@dataclass(frozen=True)
class StarlikeComparison:
    """A starlike function S used as the denominator of a certificate.

    Product kinds store S(z) = z * prod (1 - conj(y_k) z)^{-s_k}; the
    "perturbed_identity" kind stores W(z) = z (1 + eps*omega(z)).
    """

    kind: str
    angles: Tuple[float, ...] = ()
    exponents: Tuple[float, ...] = ()
    omega: Optional[Dilatation] = None
    eps: complex = 1.0

    def value(self, z):
        arr = np.asarray(z, dtype=complex)
        if self.kind == "perturbed_identity":
            om = np.asarray(self.omega.value(arr), dtype=complex)
            return arr * (1.0 + self.eps * om)
        conj_atoms = np.exp(-1j * np.asarray(self.angles))[:, None]
        s = np.asarray(self.exponents)
        flat = arr.reshape(-1)
        out = flat * np.exp(-(s @ np.log(1.0 - conj_atoms * flat[None, :])))
        return out.reshape(arr.shape)

    def starlike_functional(self, z):
        """Re of this is > 0 on the grid iff S is starlike there: z S'/S."""
        arr = np.asarray(z, dtype=complex)
        if self.kind == "perturbed_identity":
            om = np.asarray(self.omega.value(arr), dtype=complex)
            dom = np.asarray(self.omega.derivative(arr), dtype=complex)
            return 1.0 + self.eps * arr * dom / (1.0 + self.eps * om)
        conj_atoms = np.exp(-1j * np.asarray(self.angles))[:, None]
        s = np.asarray(self.exponents)[:, None]
        flat = arr.reshape(-1)
        w = conj_atoms * flat[None, :]
        out = 1.0 + np.sum(s * w / (1.0 - w), axis=0)
        return out.reshape(arr.shape)


def koebe_comparison() -> StarlikeComparison:
    """S(z) = z/(1-z)^2."""
    return StarlikeComparison("koebe", (0.0,), (2.0,))


def comparison_from_convex_order(pd: ProductDerivative) -> StarlikeComparison:
    """S(z) = z * prod (1 - conj(x_k) z)^{-2 t_k} sharing the atoms of h'."""
    if not isinstance(pd.label, ConvexOrder):
        raise PreconditionError("expected a convex-order product derivative")
    beta = pd.label.beta
    angles = tuple(f.atom.angle for f in pd.factors)
    exps = tuple(-f.exponent / (1.0 - beta) for f in pd.factors)  # 2 t_k
    return StarlikeComparison("from_convex_order", angles, exps)


def comparison_from_bounded_rotation(pd: ProductDerivative) -> StarlikeComparison:
    """S(z) = z / prod (1 - conj(y_k) z)^{t_k} with t_k >= 0 summing to 2.

    The numerator mass of h' is absorbed into the denominator capacities
    greedily, which always succeeds because the sums differ by exactly 2.
    """
    if not isinstance(pd.label, BoundedRotation):
        raise PreconditionError("expected a bounded-rotation product derivative")
    den = [(f.atom.angle, -f.exponent) for f in pd.factors if f.exponent < 0.0]
    spend = sum(f.exponent for f in pd.factors if f.exponent > 0.0)
    t = []
    for angle, cap in den:
        take = min(cap, spend)
        spend -= take
        t.append((angle, cap - take))
    angles = tuple(a for a, tk in t if tk > 1e-15)
    exps = tuple(tk for _, tk in t if tk > 1e-15)
    return StarlikeComparison("from_bounded_rotation", angles, exps)


def comparison_from_capped(omega: Dilatation, eps=1.0) -> StarlikeComparison:
    """W(z) = z (1 + eps*omega(z)), starlike under the capped-family hypotheses."""
    return StarlikeComparison("perturbed_identity", omega=omega, eps=complex(eps))


_GOLDEN = (math.sqrt(5.0) - 1.0) / 2.0


def strict_report(check, *args, radii=STRICT_RADII, **kwargs) -> CheckReport:
    """Run a margin check over the escalating radius schedule and return the
    report with the smallest margin (radii approach 1, where every
    hypothesis is tightest)."""
    reports = [check(*args, r=r, **kwargs) for r in radii]
    return min(reports, key=lambda rep: rep.margin)


def ctc_certificate(F, S: StarlikeComparison, r=DEFAULT_R, n=DEFAULT_N, iters=200) -> CheckReport:
    """Maximize over gamma the minimum of Re(e^{i gamma} z F'/S) on the grid.

    A positive margin together with starlikeness of S certifies that F is
    close-to-convex.  gamma is seeded at minus the argument of the grid mean
    of A = z F'/S and refined by golden-section search (the objective is
    concave in gamma wherever it is positive).
    """
    z = circle_grid(r, n)
    sv = np.asarray(S.value(z), dtype=complex)
    if float(np.min(np.abs(sv))) < 1e-12:
        raise DegenerateValueError("comparison function vanishes on the grid")
    star = float(np.min(np.real(S.starlike_functional(z))))
    if star < -1e-6:
        raise PreconditionError(f"comparison is not starlike on the grid (min {star:g})")
    A = z * np.asarray(F.derivative(z), dtype=complex) / sv

    gamma0 = -float(np.angle(np.mean(A)))

    def objective(g):
        return float(np.min(np.real(np.exp(1j * g) * A)))

    lo, hi = gamma0 - math.pi, gamma0 + math.pi
    x1 = hi - _GOLDEN * (hi - lo)
    x2 = lo + _GOLDEN * (hi - lo)
    f1v, f2v = objective(x1), objective(x2)
    for _ in range(iters):
        if f1v < f2v:
            lo, x1, f1v = x1, x2, f2v
            x2 = lo + _GOLDEN * (hi - lo)
            f2v = objective(x2)
        else:
            hi, x2, f2v = x2, x1, f1v
            x1 = hi - _GOLDEN * (hi - lo)
            f1v = objective(x1)
    gamma = 0.5 * (lo + hi)
    vals = np.real(np.exp(1j * gamma) * A)
    j = int(np.argmin(vals))
    gamma = float(wrap_to_pi(gamma))
    return CheckReport("ctc_certificate", float(vals[j]), r, n, complex(z[j]), gamma)


# ---------------------------------------------------------------------------
# covering by winding numbers

def winding_increments(points, target):
    """Per-segment argument increments of a sampled closed curve about target."""
    v = np.asarray(points, dtype=complex) - target
    return np.angle(np.roll(v, -1) / v)


def covering_check(obj, r, target_radius, probe_count=16, n=4096, max_n=1 << 18) -> bool:
    """True iff the image of |z| <= r winds exactly once around every probe
    point on the circle of radius ``target_radius``.

    The boundary curve is resampled (doubling n) until every probe point is
    at least ten local chord lengths away from the curve and the accumulated
    winding residual is below 0.1.
    """
    targets = target_radius * np.exp(1j * TWO_PI * np.arange(probe_count) / probe_count)
    m = int(n)
    while True:
        curve = np.asarray(map_values(obj, circle_grid(r, m)), dtype=complex)
        chord = np.abs(np.roll(curve, -1) - curve)
        local = np.maximum(chord, np.roll(chord, 1))
        ok = True
        windings = []
        for t in targets:
            dist = np.abs(curve - t)
            if float(np.min(dist)) < 1e-9:
                raise CurveDistanceError("boundary curve passes through a probe point")
            if float(np.min(dist - 10.0 * local)) <= 0.0:
                ok = False
                break
            total = float(np.sum(winding_increments(curve, t))) / TWO_PI
            if abs(total - round(total)) >= 0.1:
                ok = False
                break
            windings.append(int(round(total)))
        if ok:
            return all(w == 1 for w in windings)
        if m >= max_n:
            raise CurveDistanceError(
                f"could not separate curve from probe points within {max_n} samples"
            )
        m *= 2
