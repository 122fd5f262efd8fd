"""Families of analytic derivatives and the harmonic maps built on them.

The analytic part h of every map is represented through its derivative

    h'(z) = prod_k (1 - conj(x_k) z)^{e_k},        |x_k| = 1,

with the atoms x_k stored as angles so that |x_k| = 1 holds exactly.  Four
families are supported through builders that validate and renormalize the
atom weights:

* convex order beta   -- exponents -2(1-beta) t_k, weights t_k summing to 1;
* bounded rotation k  -- quotient with positive weights summing to k/2 - 1
                         and negative weights summing to k/2 + 1;
* concave alpha       -- a mandatory pole factor (1-z)^{-(alpha+1)} plus
                         numerator weights summing to alpha - 1;
* capped convexity    -- exponents in [0, 1] summing to 1.

Closed-form maps used throughout (h0, gK, the harmonic Koebe map, the
degree-three polynomial map f1, and the bounded-rotation harmonic map
fKdelta) are available through :func:`builtin`.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from functools import cached_property
from typing import Callable, Optional, Tuple, Union

import numpy as np

from .errors import DomainError, RadiusError, UnknownBuiltinError, WeightError
from .numerics import (
    RADIUS_CAP,
    TWO_PI,
    antiderivative_on_segment,
    as_complex_array,
    principal_power,
    require_finite,
)

WEIGHT_TOL = 1e-12
EXPONENT_CAP = 8.0


def _checked_points(z):
    arr, scalar = as_complex_array(z)
    require_finite(arr, "evaluation point")
    if arr.size and float(np.max(np.abs(arr))) > RADIUS_CAP:
        raise RadiusError(f"evaluation requires |z| <= {RADIUS_CAP!r}")
    return arr, scalar


def _ret(out, scalar):
    return complex(out) if scalar else out


@dataclass(frozen=True)
class UnitPoint:
    """A point on the unit circle, stored as its angle in [0, 2*pi)."""

    angle: float

    def __post_init__(self):
        if not math.isfinite(self.angle):
            raise DomainError("unit point angle must be finite")
        reduced = float(self.angle) % TWO_PI
        if reduced >= TWO_PI:  # (-tiny) % 2*pi can round up to exactly 2*pi
            reduced = 0.0
        object.__setattr__(self, "angle", reduced)

    @property
    def value(self) -> complex:
        return complex(math.cos(self.angle), math.sin(self.angle))

    @classmethod
    def from_complex(cls, x) -> "UnitPoint":
        x = complex(x)
        if x == 0:
            raise DomainError("cannot place an atom at the origin")
        return cls(math.atan2(x.imag, x.real))


@dataclass(frozen=True)
class ProductFactor:
    """One factor (1 - conj(atom) z)^exponent of a product derivative."""

    atom: UnitPoint
    exponent: float

    def __post_init__(self):
        if not math.isfinite(self.exponent):
            raise DomainError("factor exponent must be finite")
        if abs(self.exponent) > EXPONENT_CAP:
            raise DomainError(f"|exponent| must not exceed {EXPONENT_CAP}")


@dataclass(frozen=True)
class ConvexOrder:
    beta: float


@dataclass(frozen=True)
class BoundedRotation:
    k: float


@dataclass(frozen=True)
class Concave:
    alpha: float


@dataclass(frozen=True)
class CappedConvexity:
    pass


Label = Union[ConvexOrder, BoundedRotation, Concave, CappedConvexity, None]


@dataclass(frozen=True)
class ProductDerivative:
    """h' as a finite product of circle-atom factors; h'(0) = 1 automatically."""

    factors: Tuple[ProductFactor, ...]
    label: Label = None
    name: str = "product"

    @cached_property
    def _conj_atoms(self):
        return np.array([np.exp(-1j * f.atom.angle) for f in self.factors])

    @cached_property
    def _exponents(self):
        return np.array([f.exponent for f in self.factors])

    def derivative(self, z):
        """h'(z)."""
        arr, scalar = _checked_points(z)
        flat = arr.reshape(-1)
        if self.factors:
            logs = np.log(1.0 - self._conj_atoms[:, None] * flat[None, :])
            out = np.exp(self._exponents @ logs).reshape(arr.shape)
        else:
            out = np.ones(arr.shape, dtype=complex)
        return _ret(out, scalar)

    def pre_schwarzian(self, z):
        """h''(z)/h'(z) = sum_k e_k (-conj(x_k)) / (1 - conj(x_k) z)."""
        arr, scalar = _checked_points(z)
        flat = arr.reshape(-1)
        if self.factors:
            num = (-self._conj_atoms * self._exponents)[:, None]
            out = np.sum(num / (1.0 - self._conj_atoms[:, None] * flat[None, :]), axis=0)
            out = out.reshape(arr.shape)
        else:
            out = np.zeros(arr.shape, dtype=complex)
        return _ret(out, scalar)

    def value(self, z, tol=1e-11):
        """h(z) by quadrature of h' along [0, z]."""
        arr, scalar = _checked_points(z)
        out = antiderivative_on_segment(self._derivative_unchecked, arr, tol=tol)
        return _ret(out, scalar)

    def _derivative_unchecked(self, pts):
        flat = np.asarray(pts, dtype=complex).reshape(-1)
        if not self.factors:
            return np.ones(np.shape(pts), dtype=complex)
        logs = np.log(1.0 - self._conj_atoms[:, None] * flat[None, :])
        return np.exp(self._exponents @ logs).reshape(np.shape(pts))


@dataclass(frozen=True)
class ClosedForm:
    """An analytic function given by explicit formulas."""

    name: str
    value_fn: Callable
    derivative_fn: Callable
    pre_schwarzian_fn: Callable
    label: Label = None

    def value(self, z, tol=None):
        # tol accepted for parity with the quadrature-backed representation
        arr, scalar = _checked_points(z)
        return _ret(np.asarray(self.value_fn(arr), dtype=complex), scalar)

    def derivative(self, z):
        arr, scalar = _checked_points(z)
        return _ret(np.asarray(self.derivative_fn(arr), dtype=complex), scalar)

    def pre_schwarzian(self, z):
        arr, scalar = _checked_points(z)
        return _ret(np.asarray(self.pre_schwarzian_fn(arr), dtype=complex), scalar)


HPrimeRep = Union[ProductDerivative, ClosedForm]


# ---------------------------------------------------------------------------
# dilatations


@dataclass(frozen=True)
class Rotation:
    """omega(z) = exp(i theta) z; sup-norm 1."""

    theta: float

    @property
    def sup_norm(self) -> float:
        return 1.0

    def value(self, z):
        return np.exp(1j * self.theta) * np.asarray(z, dtype=complex)

    def derivative(self, z):
        return np.full(np.shape(z), np.exp(1j * self.theta), dtype=complex)


@dataclass(frozen=True)
class ScaledRotation:
    """omega(z) = c exp(i theta) z with 0 < c <= 1; sup-norm c."""

    c: float
    theta: float

    def __post_init__(self):
        if not (0.0 < self.c <= 1.0):
            raise DomainError("scaled rotation requires 0 < c <= 1")

    @property
    def sup_norm(self) -> float:
        return self.c

    def value(self, z):
        return self.c * np.exp(1j * self.theta) * np.asarray(z, dtype=complex)

    def derivative(self, z):
        return np.full(np.shape(z), self.c * np.exp(1j * self.theta), dtype=complex)


@dataclass(frozen=True)
class Monomial:
    """omega(z) = lam z^n; sup-norm |lam|.  lam = 0 gives the zero dilatation."""

    lam: complex
    n: int

    def __post_init__(self):
        object.__setattr__(self, "lam", complex(self.lam))
        if self.n < 1:
            raise DomainError("monomial dilatation requires n >= 1")
        if abs(self.lam) > 1.0 + 1e-15:
            raise DomainError("monomial dilatation requires |lam| <= 1")

    @property
    def sup_norm(self) -> float:
        return abs(self.lam)

    def value(self, z):
        return self.lam * np.asarray(z, dtype=complex) ** self.n

    def derivative(self, z):
        arr = np.asarray(z, dtype=complex)
        if self.n == 1:
            return np.full(arr.shape, self.lam, dtype=complex)
        return self.n * self.lam * arr ** (self.n - 1)


Dilatation = Union[Rotation, ScaledRotation, Monomial]


@dataclass(frozen=True)
class HarmonicMap:
    """f = h + conj(g) with g' = omega * h', g(0) = 0, h(0) = 0, h'(0) = 1."""

    h: HPrimeRep
    omega: Dilatation
    name: str = "harmonic_map"
    g_closed: Optional[Callable] = None

    def hprime(self, z):
        return self.h.derivative(z)

    def gprime(self, z):
        arr, scalar = _checked_points(z)
        out = np.asarray(self.omega.value(arr), dtype=complex) * self.h.derivative(arr)
        return _ret(np.asarray(out, dtype=complex), scalar)

    def g(self, z, tol=1e-11):
        arr, scalar = _checked_points(z)
        if self.g_closed is not None:
            return _ret(np.asarray(self.g_closed(arr), dtype=complex), scalar)

        def gp(pts):
            if isinstance(self.h, ProductDerivative):
                hp = self.h._derivative_unchecked(pts)
            else:
                hp = np.asarray(self.h.derivative_fn(np.asarray(pts, dtype=complex)), dtype=complex)
            return np.asarray(self.omega.value(pts), dtype=complex) * hp

        return _ret(antiderivative_on_segment(gp, arr, tol=tol), scalar)

    def f(self, z):
        arr, scalar = _checked_points(z)
        out = self.h.value(arr) + np.conj(self.g(arr))
        return _ret(np.asarray(out, dtype=complex), scalar)

    def jacobian(self, z):
        """|h'|^2 - |g'|^2 = |h'|^2 (1 - |omega|^2); positive iff sense-preserving."""
        arr, scalar = _checked_points(z)
        hp = np.abs(self.h.derivative(arr))
        om = np.abs(np.asarray(self.omega.value(arr), dtype=complex))
        out = hp * hp * (1.0 - om * om)
        return float(out) if scalar else out


def map_values(obj, z):
    """Image points of either a harmonic map or a bare analytic function."""
    if isinstance(obj, HarmonicMap):
        return obj.f(z)
    return obj.value(z)


# ---------------------------------------------------------------------------
# builders

def _coerce_atoms(atoms):
    out = []
    for atom, weight in atoms:
        if not isinstance(atom, UnitPoint):
            atom = UnitPoint(float(atom))
        out.append((atom, float(weight)))
    return out


def _validated_weights(weights, target, what, low=0.0, high=1.0, strict_low=False):
    """Check weights lie in [low, high] and sum to ``target`` within WEIGHT_TOL,
    then renormalize exactly so downstream class checks hold by construction."""
    w = np.asarray(weights, dtype=float)
    require_finite(w, f"{what} weights")
    if w.size == 0:
        if abs(target) > WEIGHT_TOL:
            raise WeightError(f"{what}: no atoms but weight sum {target:g} required")
        return w
    lo_ok = np.all(w > low) if strict_low else np.all(w >= low - WEIGHT_TOL)
    if not (lo_ok and np.all(w <= high + WEIGHT_TOL)):
        raise WeightError(f"{what}: weights must lie in [{low:g}, {high:g}]")
    total = float(np.sum(w))
    if abs(total - target) > WEIGHT_TOL:
        raise WeightError(f"{what}: weight sum {total!r} differs from {target!r}")
    return w * (target / total)


def convex_order_derivative(beta, atoms, name=None):
    """h' = prod (1 - conj(x_k) z)^{-2(1-beta) t_k}, weights t_k summing to 1."""
    beta = float(beta)
    if not (-0.5 <= beta < 1.0):
        raise DomainError("convex order requires beta in [-1/2, 1)")
    pairs = _coerce_atoms(atoms)
    t = _validated_weights([w for _, w in pairs], 1.0, "convex order")
    factors = tuple(
        ProductFactor(a, -2.0 * (1.0 - beta) * tk) for (a, _), tk in zip(pairs, t)
    )
    return ProductDerivative(factors, ConvexOrder(beta), name or f"convex_order({beta:g})")


def bounded_rotation_derivative(k, pos_atoms, neg_atoms, name=None):
    """Quotient representation for boundary rotation at most k*pi, 2 <= k <= 4.

    Positive weights sum to k/2 - 1, negative weights to k/2 + 1, each in
    [0, 1]; atoms may repeat so the unit cap can always be met.
    """
    k = float(k)
    if not (2.0 <= k <= 4.0):
        raise DomainError("bounded rotation requires 2 <= k <= 4")
    pos = _coerce_atoms(pos_atoms)
    neg = _coerce_atoms(neg_atoms)
    alpha = _validated_weights([w for _, w in pos], k / 2.0 - 1.0, "bounded rotation numerator")
    betaw = _validated_weights([w for _, w in neg], k / 2.0 + 1.0, "bounded rotation denominator")
    factors = tuple(ProductFactor(a, ak) for (a, _), ak in zip(pos, alpha)) + tuple(
        ProductFactor(a, -bk) for (a, _), bk in zip(neg, betaw)
    )
    return ProductDerivative(factors, BoundedRotation(k), name or f"bounded_rotation({k:g})")


def concave_derivative(alpha, atoms, name=None):
    """h' = prod (1 - conj(x_k) z)^{beta_k} / (1 - z)^{alpha+1}, atoms away from 1."""
    alpha = float(alpha)
    if not (1.0 < alpha < 2.0):
        raise DomainError("concave family requires alpha in (1, 2)")
    pairs = _coerce_atoms(atoms)
    for a, _ in pairs:
        if a.angle == 0.0:
            raise DomainError("concave numerator atoms must avoid the point 1")
    betaw = _validated_weights(
        [w for _, w in pairs], alpha - 1.0, "concave numerator", strict_low=True
    )
    factors = tuple(ProductFactor(a, bk) for (a, _), bk in zip(pairs, betaw))
    factors += (ProductFactor(UnitPoint(0.0), -(alpha + 1.0)),)
    return ProductDerivative(factors, Concave(alpha), name or f"concave({alpha:g})")


def capped_convexity_derivative(atoms, name=None):
    """h' = prod (1 - conj(x_k) z)^{a_k} with a_k in [0, 1] summing to 1."""
    pairs = _coerce_atoms(atoms)
    a = _validated_weights([w for _, w in pairs], 1.0, "capped convexity")
    factors = tuple(ProductFactor(atom, ak) for (atom, _), ak in zip(pairs, a))
    return ProductDerivative(factors, CappedConvexity(), name or "capped_convexity")


# ---------------------------------------------------------------------------
# closed forms

def half_plane_map():
    """h(z) = z/(1-z), the convex half-plane map."""
    return ClosedForm(
        "half_plane",
        lambda z: z / (1.0 - z),
        lambda z: (1.0 - z) ** -2.0,
        lambda z: 2.0 / (1.0 - z),
        ConvexOrder(0.0),
    )


def identity_map():
    return ClosedForm(
        "identity",
        lambda z: z,
        lambda z: np.ones(np.shape(z), dtype=complex),
        lambda z: np.zeros(np.shape(z), dtype=complex),
    )


def _h0_closed():
    return ClosedForm(
        "h0",
        lambda z: (z - 0.5 * z * z) / (1.0 - z) ** 2,
        lambda z: (1.0 - z) ** -3.0,
        lambda z: 3.0 / (1.0 - z),
        ConvexOrder(-0.5),
    )


def _h1_closed():
    return ClosedForm(
        "h1",
        lambda z: z - 0.5 * z * z,
        lambda z: 1.0 - z,
        lambda z: -1.0 / (1.0 - z),
        CappedConvexity(),
    )


def _gk_closed(k):
    k = float(k)
    if not (2.0 <= k <= 4.0):
        raise DomainError("gK requires 2 <= K <= 4")
    half = k / 2.0

    def value(z):
        return (principal_power((1.0 + z) / (1.0 - z), half) - 1.0) / k

    def deriv(z):
        return principal_power(1.0 + z, half - 1.0) * principal_power(1.0 - z, -half - 1.0)

    def psch(z):
        return (half - 1.0) / (1.0 + z) + (half + 1.0) / (1.0 - z)

    return ClosedForm(f"gK({k:g})", value, deriv, psch, BoundedRotation(k))


def _koebe_harmonic():
    h = ClosedForm(
        "koebe_analytic",
        lambda z: (z - 0.5 * z * z + z ** 3 / 6.0) / (1.0 - z) ** 3,
        lambda z: (1.0 + z) / (1.0 - z) ** 4,
        lambda z: 1.0 / (1.0 + z) + 4.0 / (1.0 - z),
    )
    g_closed = lambda z: (0.5 * z * z + z ** 3 / 6.0) / (1.0 - z) ** 3
    return HarmonicMap(h, Rotation(0.0), "koebe_harmonic", g_closed)


def builtin(name, **params):
    """Closed-form named functions and maps.

    Names: ``h0``; ``gK`` (K); ``koebe_harmonic``; ``f1`` (lam);
    ``fKdelta`` (K, delta).
    """
    if name == "h0":
        return _h0_closed()
    if name == "gK":
        return _gk_closed(params.pop("K"))
    if name == "koebe_harmonic":
        return _koebe_harmonic()
    if name == "f1":
        lam = complex(params.pop("lam"))
        g_closed = lambda z: lam * (0.5 * z * z - z ** 3 / 3.0)
        return HarmonicMap(_h1_closed(), Monomial(lam, 1), "f1", g_closed)
    if name == "fKdelta":
        k = float(params.pop("K"))
        delta = float(params.pop("delta"))
        if not (0.0 <= delta <= 2.0 and 2.0 <= k <= 4.0 - delta):
            raise DomainError("fKdelta requires 0 <= delta <= 2 and 2 <= K <= 4 - delta")
        scale = math.sin(delta * math.pi / 4.0)
        omega = ScaledRotation(scale, 0.0) if scale > 0.0 else Monomial(0.0, 1)
        return HarmonicMap(_gk_closed(k), omega, f"fKdelta({k:g},{delta:g})")
    raise UnknownBuiltinError(name)


# ---------------------------------------------------------------------------
# seeded random instances for sweeps and property tests

def random_convex_order(beta, rng, n_atoms=None):
    n = int(n_atoms) if n_atoms else int(rng.integers(1, 7))
    angles = rng.uniform(0.0, TWO_PI, n)
    t = rng.dirichlet(np.ones(n))
    return convex_order_derivative(beta, list(zip(angles, t)))


def random_capped_convexity(rng, n_atoms=None):
    n = int(n_atoms) if n_atoms else int(rng.integers(1, 7))
    angles = rng.uniform(0.0, TWO_PI, n)
    a = rng.dirichlet(np.ones(n))
    return capped_convexity_derivative(list(zip(angles, a)))


def random_concave(alpha, rng, n_atoms=None):
    n = int(n_atoms) if n_atoms else int(rng.integers(1, 5))
    angles = rng.uniform(0.05, TWO_PI - 0.05, n)
    w = (alpha - 1.0) * rng.dirichlet(np.ones(n))
    return concave_derivative(alpha, list(zip(angles, w)))


def random_bounded_rotation(k, rng, n_atoms=None):
    """Random quotient instance; denominator weights drawn by rejection so
    each stays <= 1 (the sum k/2 + 1 can reach 3)."""
    n_num = int(n_atoms) if n_atoms else int(rng.integers(1, 5))
    n_den = max(4, n_num + 2)
    target = k / 2.0 + 1.0
    betaw = None
    for _ in range(200):
        cand = target * rng.dirichlet(np.ones(n_den))
        if np.all(cand <= 1.0):
            betaw = cand
            break
    if betaw is None:
        betaw = np.full(n_den, target / n_den)
    neg_angles = rng.uniform(0.0, TWO_PI, n_den)
    pos = []
    if k > 2.0:
        alpha = (k / 2.0 - 1.0) * rng.dirichlet(np.ones(n_num))
        pos_angles = rng.uniform(0.0, TWO_PI, n_num)
        pos = list(zip(pos_angles, alpha))
    return bounded_rotation_derivative(k, pos, list(zip(neg_angles, betaw)))


# ---------------------------------------------------------------------------
# JSON descriptors

_CLASS_TAGS = {
    ConvexOrder: "convex_order",
    BoundedRotation: "bounded_rotation",
    Concave: "concave",
    CappedConvexity: "capped_convexity",
}


def _dilatation_descriptor(om):
    if isinstance(om, Rotation):
        return {"variant": "rotation", "params": {"theta": om.theta}}
    if isinstance(om, ScaledRotation):
        return {"variant": "scaled_rotation", "params": {"c": om.c, "theta": om.theta}}
    if isinstance(om, Monomial):
        return {"variant": "monomial", "params": {"re": om.lam.real, "im": om.lam.imag, "n": om.n}}
    raise DomainError(f"unknown dilatation {om!r}")


def _dilatation_from(doc):
    variant, params = doc["variant"], doc["params"]
    if variant == "rotation":
        return Rotation(float(params["theta"]))
    if variant == "scaled_rotation":
        return ScaledRotation(float(params["c"]), float(params["theta"]))
    if variant == "monomial":
        return Monomial(complex(params["re"], params["im"]), int(params["n"]))
    raise DomainError(f"unknown dilatation variant {variant!r}")


def _product_descriptor(pd: ProductDerivative):
    label = pd.label
    tag = _CLASS_TAGS.get(type(label))
    if tag is None:
        raise DomainError("only labeled product derivatives serialize")
    if isinstance(label, ConvexOrder):
        params = {"beta": label.beta}
        atoms = [
            {"angle": f.atom.angle, "weight": -f.exponent / (2.0 * (1.0 - label.beta))}
            for f in pd.factors
        ]
    elif isinstance(label, BoundedRotation):
        params = {"k": label.k}
        atoms = [{"angle": f.atom.angle, "weight": f.exponent} for f in pd.factors]
    elif isinstance(label, Concave):
        params = {"alpha": label.alpha}
        atoms = [
            {"angle": f.atom.angle, "weight": f.exponent}
            for f in pd.factors
            if f.exponent > 0.0
        ]
    else:
        params = {}
        atoms = [{"angle": f.atom.angle, "weight": f.exponent} for f in pd.factors]
    return {"class": tag, "parameters": params, "atoms": atoms, "dilatation": None}


def to_descriptor(obj):
    """Serialize a product derivative or harmonic map to the JSON document
    {class, parameters, atoms, dilatation}."""
    if isinstance(obj, ProductDerivative):
        return _product_descriptor(obj)
    if isinstance(obj, HarmonicMap):
        if isinstance(obj.h, ProductDerivative):
            doc = _product_descriptor(obj.h)
        else:
            doc = {
                "class": "builtin",
                "parameters": {"name": obj.name},
                "atoms": [],
                "dilatation": None,
            }
        doc["dilatation"] = _dilatation_descriptor(obj.omega)
        return doc
    if isinstance(obj, ClosedForm):
        return {"class": "builtin", "parameters": {"name": obj.name}, "atoms": [], "dilatation": None}
    raise DomainError(f"cannot serialize {type(obj).__name__}")


def from_descriptor(doc):
    """Inverse of :func:`to_descriptor` for the four families (plus builtins
    expressed with explicit parameters)."""
    tag = doc["class"]
    params = doc.get("parameters", {})
    atoms = [(float(a["angle"]), float(a["weight"])) for a in doc.get("atoms", [])]
    if tag == "convex_order":
        pd = convex_order_derivative(params["beta"], atoms)
    elif tag == "bounded_rotation":
        pos = [(a, w) for a, w in atoms if w > 0]
        neg = [(a, -w) for a, w in atoms if w < 0]
        pd = bounded_rotation_derivative(params["k"], pos, neg)
    elif tag == "concave":
        pd = concave_derivative(params["alpha"], atoms)
    elif tag == "capped_convexity":
        pd = capped_convexity_derivative(atoms)
    elif tag == "builtin":
        kwargs = {k: v for k, v in params.items() if k != "name"}
        obj = builtin(params["name"], **kwargs)
        if doc.get("dilatation"):
            h = obj.h if isinstance(obj, HarmonicMap) else obj
            return HarmonicMap(h, _dilatation_from(doc["dilatation"]), params["name"])
        return obj
    else:
        raise DomainError(f"unknown descriptor class {tag!r}")
    if doc.get("dilatation"):
        return HarmonicMap(pd, _dilatation_from(doc["dilatation"]), pd.name)
    return pd
