import json
import math

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from harmap.errors import DomainError, RadiusError, UnknownBuiltinError, WeightError
from harmap.families import (
    HarmonicMap,
    Monomial,
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
    random_bounded_rotation,
    random_capped_convexity,
    random_concave,
    random_convex_order,
    to_descriptor,
)


def sample_points(rng, count, radius):
    return radius * np.sqrt(rng.uniform(0, 1, count)) * np.exp(
        2j * np.pi * rng.uniform(0, 1, count)
    )


def all_random_families(rng):
    return [
        random_convex_order(float(rng.uniform(-0.5, 0.9)), rng),
        random_bounded_rotation(float(rng.uniform(2.0, 4.0)), rng),
        random_concave(float(rng.uniform(1.05, 1.95)), rng),
        random_capped_convexity(rng),
    ]


class TestUnitPoint:
    @settings(max_examples=100, deadline=None)
    @given(angle=st.floats(-50.0, 50.0))
    def test_angle_normalized(self, angle):
        p = UnitPoint(angle)
        assert 0.0 <= p.angle < 2 * math.pi
        assert abs(p.value) == pytest.approx(1.0, abs=1e-15)

    def test_from_complex(self):
        p = UnitPoint.from_complex(1j)
        assert p.angle == pytest.approx(math.pi / 2)

    def test_origin_rejected(self):
        with pytest.raises(DomainError):
            UnitPoint.from_complex(0)


class TestBuilders:
    def test_order_minus_half_single_atom_is_cube_pole(self):
        pd = convex_order_derivative(-0.5, [(0.0, 1.0)])
        z = np.array([0.3, -0.5, 0.2 + 0.4j])
        assert np.allclose(pd.derivative(z), (1 - z) ** -3.0, atol=1e-13)

    def test_order_zero_single_atom_is_half_plane(self):
        pd = convex_order_derivative(0.0, [(0.0, 1.0)])
        assert pd.derivative(0.5) == pytest.approx((1 - 0.5) ** -2.0)

    def test_two_atom_value(self):
        pd = convex_order_derivative(-0.5, [(0.0, 0.5), (math.pi, 0.5)])
        assert pd.derivative(0.5) == pytest.approx((0.5 ** -1.5) * (1.5 ** -1.5), rel=1e-12)

    def test_weight_sum_enforced(self):
        with pytest.raises(WeightError):
            convex_order_derivative(-0.5, [(0.0, 0.7), (1.0, 0.4)])

    def test_weight_range_enforced(self):
        with pytest.raises(WeightError):
            convex_order_derivative(-0.5, [(0.0, 1.4), (1.0, -0.4)])

    def test_beta_range(self):
        with pytest.raises(DomainError):
            convex_order_derivative(1.0, [(0.0, 1.0)])

    def test_bounded_rotation_matches_extremal(self):
        pd = bounded_rotation_derivative(
            3.0, [(math.pi, 0.5)], [(0.0, 1.0), (0.0, 1.0), (0.0, 0.5)]
        )
        gk = builtin("gK", K=3.0)
        z = np.array([0.4, -0.3 + 0.2j, 0.6j])
        assert np.allclose(pd.derivative(z), gk.derivative(z), rtol=1e-12)

    def test_bounded_rotation_normalization(self):
        rng = np.random.default_rng(5)
        for _ in range(5):
            pd = random_bounded_rotation(float(rng.uniform(2, 4)), rng)
            assert pd.derivative(0.0) == pytest.approx(1.0, abs=1e-14)

    def test_convex_case_empty_numerator(self):
        pd = bounded_rotation_derivative(2.0, [], [(0.0, 1.0), (0.0, 1.0)])
        assert pd.derivative(0.5) == pytest.approx(0.5 ** -2.0)

    def test_bounded_rotation_sum_errors(self):
        with pytest.raises(WeightError):
            bounded_rotation_derivative(3.0, [(math.pi, 0.5)], [(0.0, 1.0), (0.0, 0.5)])

    def test_concave_single_atom(self):
        pd = concave_derivative(1.5, [(math.pi, 0.5)])
        assert pd.derivative(0.5) == pytest.approx((1.5 ** 0.5) * (0.5 ** -2.5), rel=1e-12)
        assert pd.derivative(0.0) == pytest.approx(1.0)

    def test_concave_atom_at_one_rejected(self):
        with pytest.raises(DomainError):
            concave_derivative(1.5, [(0.0, 0.5)])

    def test_concave_alpha_range(self):
        for alpha in (1.0, 2.0, 2.5):
            with pytest.raises(DomainError):
                concave_derivative(alpha, [(math.pi, alpha - 1.0)])

    def test_capped_single_atom_is_h1(self):
        pd = capped_convexity_derivative([(0.0, 1.0)])
        z = np.array([0.2, 0.5, -0.7j])
        assert np.allclose(pd.derivative(z), 1 - z, atol=1e-14)

    def test_capped_two_atoms(self):
        pd = capped_convexity_derivative([(0.0, 0.5), (math.pi, 0.5)])
        assert pd.derivative(0.6) == pytest.approx((1 - 0.36) ** 0.5, rel=1e-13)

    def test_exponent_cap(self):
        with pytest.raises(DomainError):
            ProductFactor(UnitPoint(0.0), 9.0)


class TestBuiltins:
    def test_h0_value(self):
        assert builtin("h0").value(0.5) == pytest.approx(1.5)

    def test_gk_normalized(self):
        for k in (2.0, 2.5, 3.0, 4.0):
            assert builtin("gK", K=k).derivative(0.0) == pytest.approx(1.0)

    def test_koebe_normalized(self):
        kh = builtin("koebe_harmonic")
        assert kh.f(0.0) == pytest.approx(0.0)
        assert kh.hprime(0.0) == pytest.approx(1.0)

    def test_koebe_dilatation_is_z(self):
        kh = builtin("koebe_harmonic")
        z = np.array([0.3, -0.2 + 0.4j])
        assert np.allclose(kh.gprime(z), z * kh.hprime(z), rtol=1e-12)

    def test_fkdelta_dilatation(self):
        fk = builtin("fKdelta", K=3.0, delta=0.5)
        z = 0.3 + 0.1j
        expected = math.sin(0.5 * math.pi / 4) * z * fk.hprime(z)
        assert fk.gprime(z) == pytest.approx(expected, rel=1e-12)

    def test_unknown_name(self):
        with pytest.raises(UnknownBuiltinError):
            builtin("nope")


class TestHarmonicMap:
    def test_f1_at_half(self):
        f = builtin("f1", lam=0.5)
        assert f.f(0.5) == pytest.approx(0.5 - 0.125 + 0.5 * (0.125 - 0.5 ** 3 / 3), abs=1e-14)
        assert f.f(0.5) == pytest.approx(0.4166666667, abs=1e-9)

    def test_origin_normalization(self):
        for fmap in (builtin("f1", lam=0.3), builtin("fKdelta", K=2.5, delta=1.0)):
            assert fmap.f(0.0) == pytest.approx(0.0)
            assert fmap.jacobian(0.0) == pytest.approx(1.0)

    def test_jacobian_value(self):
        f = builtin("f1", lam=0.9)
        assert f.jacobian(0.9) == pytest.approx((0.1 ** 2) * (1 - 0.81 ** 2), rel=1e-12)

    def test_jacobian_positive_when_contractive(self):
        rng = np.random.default_rng(3)
        f = HarmonicMap(random_convex_order(-0.5, rng), ScaledRotation(0.9, 1.0))
        pts = sample_points(rng, 100, 0.99)
        assert np.all(f.jacobian(pts) > 0)

    def test_radius_guard(self):
        with pytest.raises(RadiusError):
            builtin("f1", lam=0.5).f(0.9999995)

    def test_g_quadrature_matches_closed_form(self):
        lam = 0.37
        f_closed = builtin("f1", lam=lam)
        f_quad = HarmonicMap(f_closed.h, Monomial(lam, 1))  # no closed g attached
        z = np.array([0.1, 0.5, -0.6 + 0.2j])
        assert np.allclose(f_quad.g(z), f_closed.g(z), atol=1e-11)


class TestDerivativeOracles:
    def test_pre_schwarzian_closed_forms(self):
        h0 = builtin("h0")
        assert h0.pre_schwarzian(0.0) == pytest.approx(3.0)
        h1 = capped_convexity_derivative([(0.0, 1.0)])
        assert h1.pre_schwarzian(0.0) == pytest.approx(-1.0)

    def test_pre_schwarzian_at_origin_formula(self):
        rng = np.random.default_rng(9)
        for pd in all_random_families(rng):
            expected = sum(-f.exponent * np.conj(f.atom.value) for f in pd.factors)
            assert pd.pre_schwarzian(0.0) == pytest.approx(expected, abs=1e-13)

    def test_pre_schwarzian_against_finite_differences(self):
        rng = np.random.default_rng(17)
        step = 1e-5
        for _ in range(5):
            for pd in all_random_families(rng):
                pts = sample_points(rng, 50, 0.9)
                fd = np.log(pd.derivative(pts + step) / pd.derivative(pts - step)) / (2 * step)
                assert np.max(np.abs(fd - pd.pre_schwarzian(pts))) < 1e-6

    def test_gprime_against_finite_differences(self):
        # fourth-order stencil; small step keeps the truncation below 1e-9
        rng = np.random.default_rng(23)
        h = 3e-4
        for pd in all_random_families(rng):
            fmap = HarmonicMap(pd, ScaledRotation(0.8, 0.7))
            pts = sample_points(rng, 50, 0.4)
            fd = (
                -fmap.g(pts + 2 * h)
                + 8 * fmap.g(pts + h)
                - 8 * fmap.g(pts - h)
                + fmap.g(pts - 2 * h)
            ) / (12 * h)
            assert np.max(np.abs(fd - fmap.gprime(pts))) < 1e-9


class TestClassMembershipGrids:
    def test_convex_order_certified(self):
        rng = np.random.default_rng(31)
        from harmap.checks import convexity_order

        for beta in (-0.5, -0.2, 0.0, 0.5):
            pd = random_convex_order(beta, rng)
            rep = convexity_order(pd, 0.99, 1024)
            assert rep.margin >= -1e-6  # margin already has beta subtracted

    def test_capped_convexity_certified(self):
        rng = np.random.default_rng(37)
        from harmap.checks import convexity_order

        for _ in range(5):
            pd = random_capped_convexity(rng)
            rep = convexity_order(pd, 0.99, 1024, mode="max")
            assert rep.margin <= 1.5 + 1e-6


class TestDescriptors:
    def test_field_names_fixed(self):
        doc = to_descriptor(convex_order_derivative(-0.5, [(0.0, 1.0)]))
        assert set(doc) == {"class", "parameters", "atoms", "dilatation"}
        assert all(set(a) == {"angle", "weight"} for a in doc["atoms"])

    def test_round_trip_all_families(self):
        rng = np.random.default_rng(41)
        pts = sample_points(rng, 20, 0.9)
        dilatations = [Rotation(0.4), ScaledRotation(0.6, 1.0), Monomial(0.25j, 2)]
        for pd, dil in zip(all_random_families(rng), dilatations + [None]):
            obj = HarmonicMap(pd, dil) if dil is not None else pd
            doc = json.loads(json.dumps(to_descriptor(obj)))
            back = from_descriptor(doc)
            h1 = pd.derivative(pts)
            h2 = (back.h if isinstance(back, HarmonicMap) else back).derivative(pts)
            assert np.max(np.abs(h1 - h2)) < 1e-12
            if dil is not None:
                assert np.max(np.abs(obj.gprime(pts) - back.gprime(pts))) < 1e-12

    def test_builtin_descriptor(self):
        doc = to_descriptor(builtin("h0"))
        assert doc["class"] == "builtin"
        back = from_descriptor(doc)
        assert back.value(0.5) == pytest.approx(1.5)


class TestRandomGenerators:
    def test_constraints_hold(self):
        rng = np.random.default_rng(43)
        for _ in range(10):
            k = float(rng.uniform(2, 4))
            pd = random_bounded_rotation(k, rng)
            pos = sum(f.exponent for f in pd.factors if f.exponent > 0)
            neg = -sum(f.exponent for f in pd.factors if f.exponent < 0)
            assert pos == pytest.approx(k / 2 - 1, abs=1e-12)
            assert neg == pytest.approx(k / 2 + 1, abs=1e-12)
            assert all(abs(f.exponent) <= 1 + 1e-12 for f in pd.factors)

    def test_seed_reproducibility(self):
        a = random_convex_order(-0.5, np.random.default_rng(77))
        b = random_convex_order(-0.5, np.random.default_rng(77))
        assert a == b


def test_fkdelta_zero_delta_is_analytic():
    fk = builtin("fKdelta", K=3.0, delta=0.0)
    z = np.array([0.3, -0.2 + 0.1j])
    assert np.allclose(fk.gprime(z), 0.0)
    assert np.allclose(fk.f(z), fk.h.value(z))


def test_dilatation_sup_norms():
    assert Rotation(0.3).sup_norm == 1.0
    assert ScaledRotation(0.6, 0.1).sup_norm == pytest.approx(0.6)
    assert Monomial(0.25j, 3).sup_norm == pytest.approx(0.25)
    assert np.asarray(Rotation(0.3).value(0.0)) == pytest.approx(0.0)
    assert np.asarray(Monomial(0.5, 2).value(0.0)) == pytest.approx(0.0)
