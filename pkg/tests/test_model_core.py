from __future__ import annotations

import math

import numpy as np
import pytest

from kinkmanifold.errors import DomainError, SingularChartError, ValidationError
from kinkmanifold.model_core import (
    CartesianPoint,
    EllipticPoint,
    ModelParams,
    Regime,
    SignChoice,
    cartesian_to_elliptic,
    check_range,
    classify_regime,
    elliptic_to_cartesian,
    is_regime_boundary,
    metric_array,
    metric_coefficients,
    potential_cartesian,
    potential_elliptic,
    potential_gradient_cartesian,
    potential_mstb3_cartesian,
)
from kinkmanifold.vacua import enumerate_vacua


def random_ball(rng, n, radius=0.95):
    v = rng.normal(size=(n, 3))
    v /= np.linalg.norm(v, axis=1)[:, None]
    return v * radius * rng.random(n)[:, None] ** (1 / 3)


def random_box(rng, n, p):
    a2, a3 = p.sigma2_bar_sq, p.sigma3_bar_sq
    u = rng.uniform(0.01, 0.99, size=(n, 3))
    return np.column_stack([u[:, 0] * a3, a3 + u[:, 1] * (a2 - a3), a2 + u[:, 2] * (1 - a2)])


class TestParams:
    def test_derived_quantities(self):
        p = ModelParams(0.25, 0.5, 0.6)
        assert p.sigma2_bar_sq == 0.75 and p.sigma3_bar_sq == 0.5
        assert p.alpha_sq == pytest.approx(0.4)
        np.testing.assert_allclose(p.c, [0.6, 0.75, 0.5, 0.0])
        np.testing.assert_allclose(p.s, [math.sqrt(0.4), 0.5, math.sqrt(0.5), 1.0])

    @pytest.mark.parametrize("args", [(0.0, 0.5, 0.6), (0.5, 0.25, 0.6), (0.25, 1.0, 0.6), (0.25, 0.5, math.nan), (0.3, 0.3, 0.5)])
    def test_invalid(self, args):
        with pytest.raises(ValidationError):
            ModelParams(*args)

    def test_alpha_nan_above_one(self):
        assert math.isnan(ModelParams(0.25, 0.5, 2.0).alpha)


class TestRegime:
    @pytest.mark.parametrize(
        "ab, regime",
        [
            (0.6, Regime.H1),
            (2.0, Regime.E1),
            (1.0, Regime.H2PRIME),
            (0.3, Regime.E2),
            (0.9, Regime.H2),
            (0.0, Regime.E1),
            (0.5, Regime.E1),
            (0.75, Regime.E1),
            (-0.5, Regime.E2),
        ],
    )
    def test_classify(self, ab, regime):
        assert classify_regime(ModelParams(0.25, 0.5, ab)) is regime

    def test_interval_labels(self):
        assert Regime.H1.interval == "L2" and Regime.H2PRIME.interval == "{1}"

    def test_boundary_flag(self):
        assert is_regime_boundary(ModelParams(0.25, 0.5, 0.5))
        assert not is_regime_boundary(ModelParams(0.25, 0.5, 0.6))


class TestCoordinates:
    def test_vacuum_maps_to_v(self, p_h1):
        lam = cartesian_to_elliptic(CartesianPoint(1.0, 0.0, 0.0), p_h1)
        np.testing.assert_allclose(lam.as_array(), [0.0, 0.5, 0.75], atol=1e-12)

    def test_v3_point(self, p_h1):
        phi = CartesianPoint(2 / math.sqrt(5), 0.0, 1 / math.sqrt(10))
        lam = cartesian_to_elliptic(phi, p_h1)
        np.testing.assert_allclose(lam.as_array(), [0.0, 0.6, 0.75], atol=1e-12)
        back = elliptic_to_cartesian(EllipticPoint(0.0, 0.6, 0.75), SignChoice(), p_h1)
        np.testing.assert_allclose(back.as_array(), [0.894427191, 0.0, 0.316227766], atol=1e-9)

    def test_v2_point(self, p_h1):
        # (a3, abar^2, a2) sits on both phi2 = 0 and phi3 = 0.
        back = elliptic_to_cartesian(EllipticPoint(0.5, 0.6, 0.75), SignChoice(), p_h1)
        np.testing.assert_allclose(back.as_array(), [math.sqrt(0.4), 0.0, 0.0], atol=1e-12)

    def test_round_trip(self, p_h1):
        rng = np.random.default_rng(1)
        for phi in random_ball(rng, 1000):
            lam = cartesian_to_elliptic(CartesianPoint.from_array(phi), p_h1)
            back = elliptic_to_cartesian(lam, SignChoice.of(phi), p_h1).as_array()
            assert np.max(np.abs(back - phi)) < 1e-10

    def test_range_closure(self, p_h1):
        rng = np.random.default_rng(2)
        for phi in random_ball(rng, 300, radius=1.5):
            check_range(cartesian_to_elliptic(CartesianPoint.from_array(phi), p_h1), p_h1)

    def test_face_kills_phi3(self, p_h1):
        lam = EllipticPoint(0.5, 0.55, 0.8)
        for s3 in (1, -1):
            assert elliptic_to_cartesian(lam, SignChoice(1, 1, s3), p_h1).phi3 == 0.0

    def test_bad_radicand(self, p_h1):
        with pytest.raises(DomainError):
            elliptic_to_cartesian(EllipticPoint(0.7, 0.6, 0.8), SignChoice(), p_h1)


class TestMetric:
    def test_positive_interior(self, p_h1):
        g = metric_array(random_box(np.random.default_rng(3), 500, p_h1), p_h1)
        assert np.all(g > 0)

    def test_direct_formula(self, p_h1):
        lam = np.array([0.25, 0.6, 0.9])
        a2, a3 = 0.75, 0.5
        direct = []
        for j in range(3):
            others = [lam[k] for k in range(3) if k != j]
            f = (others[0] - lam[j]) * (others[1] - lam[j])
            direct.append(f / (4 * (1 - lam[j]) * (lam[j] - a2) * (lam[j] - a3)))
        g = metric_coefficients(EllipticPoint(*lam), p_h1)
        np.testing.assert_allclose(g, np.abs(direct), rtol=1e-14)

    def test_coincident_is_singular(self, p_h1):
        with pytest.raises(SingularChartError):
            metric_coefficients(EllipticPoint(0.5, 0.5, 0.8), p_h1)


class TestPotential:
    def test_mstb3_examples(self, p_h1):
        assert potential_mstb3_cartesian(CartesianPoint(1, 0, 0), p_h1) == pytest.approx(0.0, abs=1e-15)
        assert potential_mstb3_cartesian(CartesianPoint(-1, 0, 0), p_h1) == pytest.approx(0.0, abs=1e-15)
        assert potential_mstb3_cartesian(CartesianPoint(0, 0, 0), p_h1) == pytest.approx(0.5)

    def test_zero_at_vacua(self, p_h1):
        for v in enumerate_vacua(p_h1).vacua:
            assert abs(potential_elliptic(v.elliptic, p_h1)) < 1e-12
            for q in v.cartesian_orbit:
                assert abs(potential_cartesian(q, p_h1)) < 1e-12

    def test_positive_interior(self, p_h1):
        u = potential_elliptic(random_box(np.random.default_rng(4), 1000, p_h1), p_h1)
        assert np.all(u > 0)

    def test_eq8_matches_mstb3(self, p_h1):
        rng = np.random.default_rng(5)
        for phi in random_ball(rng, 200):
            lam = cartesian_to_elliptic(CartesianPoint.from_array(phi), p_h1)
            a = potential_elliptic(lam, p_h1, alpha_factor=False)
            b = potential_mstb3_cartesian(phi, p_h1)
            assert abs(a - b) <= 1e-10 * max(1.0, abs(b))

    def test_gradient_matches_fd(self, p_h1):
        rng = np.random.default_rng(6)
        phi = random_ball(rng, 50)
        g = potential_gradient_cartesian(phi, p_h1)
        h = 1e-6
        for k in range(3):
            e = np.zeros(3)
            e[k] = h
            fd = (potential_cartesian(phi + e, p_h1) - potential_cartesian(phi - e, p_h1)) / (2 * h)
            np.testing.assert_allclose(g[:, k], fd, atol=1e-7)

    def test_face_values_finite(self, p_h1):
        # On a face the limiting value is taken analytically.
        for lam in ([0.0, 0.55, 0.8], [0.5, 0.55, 0.8], [0.3, 0.75, 0.8], [0.3, 0.6, 1.0]):
            assert math.isfinite(float(potential_elliptic(np.array(lam), p_h1)))
