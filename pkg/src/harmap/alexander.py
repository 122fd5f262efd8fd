"""Taylor coefficients and the Alexander-type transform zH' = h, zG' = -g.

Coefficient extraction uses the Cauchy formula on a circle |z| = rho,
discretized by FFT with aliasing controlled by doubling the sample count.
The transform itself acts term-wise (division by the index); for grid
checks the transformed derivatives are evaluated directly as H' = h(z)/z
and G' = -g(z)/z, which is the defining relation and avoids truncation
error near the boundary.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .checks import CheckReport, _kaplan_scan, starlike_order
from .errors import ConvergenceError, DomainError, PreconditionError
from .families import HarmonicMap
from .numerics import TWO_PI


@dataclass(frozen=True)
class TaylorSeries:
    """Coefficients a_1..a_N of a function vanishing at 0 (a_0 = 0 implicit)."""

    coefficients: np.ndarray
    sample_radius: float

    @property
    def order(self) -> int:
        return len(self.coefficients)

    def evaluate(self, z):
        arr = np.asarray(z, dtype=complex)
        out = np.zeros(arr.shape, dtype=complex)
        for c in self.coefficients[::-1]:
            out = (out + c) * arr
        return out

    def evaluate_derivative(self, z):
        arr = np.asarray(z, dtype=complex)
        k = np.arange(1, self.order + 1)
        coeffs = (k * self.coefficients)[::-1]
        out = np.zeros(arr.shape, dtype=complex)
        for c in coeffs[:-1]:
            out = (out + c) * arr
        return out + coeffs[-1]

    def tail_estimate(self, radius=0.99, window=16) -> float:
        """Geometric estimate of sum_{k>N} |a_k| radius^k from the last
        ``window`` coefficients."""
        mags = np.abs(self.coefficients[-window:])
        k0 = self.order - len(mags) + 1
        terms = mags * radius ** np.arange(k0, self.order + 1)
        nz = terms[terms > 0]
        if len(nz) < 2:
            return 0.0
        ratio = float(np.exp(np.mean(np.diff(np.log(nz)))))
        last = float(terms[-1])
        if ratio >= 1.0:
            return float("inf")
        return last * ratio / (1.0 - ratio)

    def to_json(self):
        return [[c.real, c.imag] for c in self.coefficients]


def taylor_coefficients(fun, N, rho=0.7, tol=1e-10) -> TaylorSeries:
    """a_k = (1/m) sum_j fun(rho w^j) w^{-jk} / rho^k on m >= 8N samples,
    doubling m until a_1..a_N stabilize to ``tol``; two failed doublings
    raise ConvergenceError.

    The default rho balances aliasing decay rho^m against the rho^{-k}
    amplification of rounding error; large N calls should pass rho
    closer to 1.
    """
    N = int(N)
    if not (1 <= N <= 512):
        raise DomainError("coefficient count must lie in 1..512")
    if not (0.0 < rho < 1.0):
        raise DomainError("extraction radius must lie in (0, 1)")

    def extract(m):
        w = rho * np.exp(1j * TWO_PI * np.arange(m) / m)
        c = np.fft.fft(np.asarray(fun(w), dtype=complex)) / m
        k = np.arange(1, N + 1)
        return c[1 : N + 1] / rho ** k

    # start with enough samples that a unit-coefficient tail already aliases
    # below tolerance; the doubling check then absorbs coefficient growth
    m = max(8 * N, int(math.ceil(math.log(1e-12) / math.log(rho))))
    prev = extract(m)
    for _ in range(2):
        m *= 2
        cur = extract(m)
        scale = 1.0 + float(np.max(np.abs(cur)))
        if float(np.max(np.abs(cur - prev))) <= tol * scale:
            return TaylorSeries(cur, rho)
        prev = cur
    raise ConvergenceError(
        f"coefficient extraction did not stabilize to {tol:g}; "
        "consider a larger extraction radius"
    )


def _divide_by_index(series: TaylorSeries, sign=1.0) -> TaylorSeries:
    k = np.arange(1, series.order + 1)
    return TaylorSeries(sign * series.coefficients / k, series.sample_radius)


def alexander_transform(h_series: TaylorSeries, g_series: TaylorSeries):
    """(H, G) with H_k = h_k / k and G_k = -g_k / k."""
    return _divide_by_index(h_series), _divide_by_index(g_series, sign=-1.0)


@dataclass(frozen=True)
class AlexanderLift:
    """The analytic function H with z H' = h, evaluated directly from h.

    H' = h(z)/z and H''/H' = h'/h - 1/z, so convexity and Kaplan checks can
    run on H without series truncation.
    """

    h: object
    name: str = "alexander_lift"
    label: object = None

    def derivative(self, z):
        arr = np.asarray(z, dtype=complex)
        return np.asarray(self.h.value(arr), dtype=complex) / arr

    def pre_schwarzian(self, z):
        arr = np.asarray(z, dtype=complex)
        hv = np.asarray(self.h.value(arr), dtype=complex)
        return np.asarray(self.h.derivative(arr), dtype=complex) / hv - 1.0 / arr


def alexander_ctc_check(
    f: HarmonicMap, lam, r=0.99, n=2048, eps_count=32, starlike_floor=0.0
) -> CheckReport:
    """Close-to-convexity surrogate for F = H + lam * conj(G) built from f.

    Requires the analytic part of f to have starlike order above
    ``starlike_floor`` on the precondition grid (0 for plainly starlike h;
    a negative order down to -1/2 when paired with a correspondingly small
    dilatation).  Verifies sense preservation |lam G'| < |H'| on the grid
    and sweeps eps over the unit circle through the Kaplan margin of
    H' + eps lam G'.  The reported margin is the smaller of the sweep
    margin and the sense-preservation margin.
    """
    lam = complex(lam)
    if abs(lam) > 1.0 + 1e-15:
        raise DomainError("transform factor requires |lam| <= 1")
    if not -0.5 < starlike_floor <= 0.0:
        raise DomainError("starlike floor must lie in (-1/2, 0]")
    star = starlike_order(f.h, 0.99, 2048)
    if not star.margin > starlike_floor:
        raise PreconditionError(
            f"analytic part misses starlike order {starlike_floor:g} "
            f"on the grid (margin {star.margin:g})"
        )

    eps = np.exp(1j * TWO_PI * np.arange(eps_count) / eps_count)
    if lam == 0:
        eps = eps[:1]
    state = {}

    def rows(z):
        hp = np.asarray(f.h.value(z), dtype=complex) / z  # H'
        gp = -np.asarray(f.g(z), dtype=complex) / z  # G'
        state["sense"] = float(np.min(np.abs(hp) - np.abs(lam) * np.abs(gp)))
        return hp[None, :] + (eps * lam)[:, None] * gp[None, :]

    margins, witnesses, m = _kaplan_scan(rows, r, n)
    j = int(np.argmin(margins))
    margin = min(float(margins[j]), state["sense"])
    return CheckReport("alexander_ctc", margin, r, m, complex(witnesses[j]))
