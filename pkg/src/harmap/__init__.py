"""Harmonic mappings of the unit disk built from finite circle-atom data.

Construction of product representations of h', closed-form extremal maps,
geometric verification (convexity and starlikeness orders, boundary
rotation, Kaplan arcs, close-to-convexity certificates), integral means
with their Euler-Beta bound, index-division coefficient transforms,
univalence probing, and SVG rendering of disk images.
"""

from .families import (
    BoundedRotation,
    CappedConvexity,
    ClosedForm,
    Concave,
    ConvexOrder,
    HarmonicMap,
    Monomial,
    ProductDerivative,
    ProductFactor,
    Rotation,
    ScaledRotation,
    UnitPoint,
    bounded_rotation_derivative,
    builtin,
    capped_convexity_derivative,
    concave_derivative,
    convex_order_derivative,
    from_descriptor,
    half_plane_map,
    identity_map,
    to_descriptor,
)
from .numerics import (
    RADIUS_CAP,
    antiderivative_on_segment,
    beta_function,
    circle_mean,
    principal_power,
)

__all__ = [
    "BoundedRotation",
    "CappedConvexity",
    "ClosedForm",
    "Concave",
    "ConvexOrder",
    "HarmonicMap",
    "Monomial",
    "ProductDerivative",
    "ProductFactor",
    "RADIUS_CAP",
    "Rotation",
    "ScaledRotation",
    "UnitPoint",
    "antiderivative_on_segment",
    "beta_function",
    "bounded_rotation_derivative",
    "builtin",
    "capped_convexity_derivative",
    "circle_mean",
    "concave_derivative",
    "convex_order_derivative",
    "from_descriptor",
    "half_plane_map",
    "identity_map",
    "principal_power",
    "to_descriptor",
]
