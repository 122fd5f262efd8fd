"""Circle averages of |h'|^(-2 beta) and their Euler-Beta upper bound."""

from __future__ import annotations

from dataclasses import dataclass
from typing import List, Sequence

import numpy as np

from .errors import DomainError, RadiusError
from .families import builtin
from .numerics import RADIUS_CAP, beta_function, circle_grid

# The integrand's Fourier decay slows as the atoms approach the contour,
# so radii beyond 0.99 get a denser default grid.
DEFAULT_N_INNER = 1024
DEFAULT_N_OUTER = 8192
BETA_CAP = 4.0


def _default_n(r, n):
    if n is not None:
        return int(n)
    return DEFAULT_N_INNER if r <= 0.99 else DEFAULT_N_OUTER


@dataclass(frozen=True)
class MeansResult:
    beta: float
    r: float
    value: float
    bound: float

    @property
    def slack(self) -> float:
        return self.bound - self.value

    def csv_row(self) -> str:
        return "%.15g,%.15g,%.15g,%.15g,%.15g" % (
            self.beta,
            self.r,
            self.value,
            self.bound,
            self.slack,
        )


CSV_HEADER = "beta,r,value,bound,slack"


def integral_mean(h, beta, r, n=None) -> float:
    """Average of |h'(r e^{i theta})|^(-2 beta) over the circle of radius r."""
    beta = float(beta)
    if not (0.0 < beta <= BETA_CAP):
        raise DomainError(f"integral mean exponent must lie in (0, {BETA_CAP:g}]")
    if r > RADIUS_CAP:
        raise RadiusError(f"radius must stay <= {RADIUS_CAP!r}")
    n = _default_n(r, n)
    z = circle_grid(r, n)
    vals = np.abs(h.derivative(z)) ** (-2.0 * beta)
    return float(np.mean(vals))


def integral_mean_bound(beta) -> float:
    """Upper bound 2^(6 beta)/pi * B((6 beta + 1)/2, 1/2), valid for every
    member of the convex-order -1/2 family and sharp along h0."""
    beta = float(beta)
    if beta <= 0.0:
        raise DomainError("bound requires beta > 0")
    return 2.0 ** (6.0 * beta) / np.pi * beta_function((6.0 * beta + 1.0) / 2.0, 0.5)


def sharpness_scan(beta, radii: Sequence[float], n=None) -> List[MeansResult]:
    """Means of h0 along increasing radii; values climb toward the bound."""
    radii = [float(r) for r in radii]
    if any(b > a for a, b in zip(radii[1:], radii)):
        raise DomainError("radii must be non-decreasing")
    h0 = builtin("h0")
    bound = integral_mean_bound(beta)
    return [MeansResult(float(beta), r, integral_mean(h0, beta, r, n), bound) for r in radii]


def means_csv(results: Sequence[MeansResult]) -> str:
    return "\n".join([CSV_HEADER] + [res.csv_row() for res in results]) + "\n"
