"""Tests for the scaled-energy quantities against independent closed forms."""

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from cylscale import (
    ConstantProfile,
    CylinderSpec,
    DivergentIntegralError,
    ExponentialWeighted,
    GaussianBump,
    PowerLawProfile,
    QuadratureConfig,
    RadiusError,
    SelfSimilarProfile,
    SteadyShearProfile,
    SupportError,
    azimuthal_unit,
    closed_form_m_power_law,
    cylinder_gradsq_integral,
    cylinder_power_integral,
    derive,
    energy_quantities,
    inequality_ratios,
    local_energy_residual,
    m_quantity,
    quantity_report,
    sample,
    sup_weighted_mass,
)

FOUR_PI_3 = 4.0 * np.pi / 3.0


class TestConstantClosedForms:
    """Every quantity of a constant field has a hand-computed value."""

    prof = ConstantProfile((2.0, 0.0, 0.0))

    @given(st.floats(0.1, 4.0))
    @settings(max_examples=25, deadline=None)
    def test_sup_mass(self, r):
        # r^-1 * int_{B(r)} |c|^2 = r^-1 * 4 * (4 pi/3) r^3
        assert sup_weighted_mass(self.prof, r, 1.0) == pytest.approx(
            4.0 * FOUR_PI_3 * r**2, rel=1e-12)

    @given(st.floats(0.1, 4.0))
    @settings(max_examples=25, deadline=None)
    def test_cubic_term(self, r):
        # r^-2 * |c|^3 * (4 pi/3) r^3 * r^2
        got = cylinder_power_integral(self.prof, "speed", 3.0, r, 2.0)
        assert got == pytest.approx(8.0 * FOUR_PI_3 * r**3, rel=1e-12)

    def test_gradient_and_pressure_vanish(self):
        assert cylinder_gradsq_integral(self.prof, 1.0, 1.0) == 0.0
        assert cylinder_power_integral(self.prof, "pressure", 1.5, 1.0, 2.0) == 0.0

    def test_mixed_norm(self):
        # M = R^-kappa * T * (4 pi/3 R^3 |c|^s)^{l/s} with T = R^2
        s, l = 2.8, 2.8
        M, Matt = m_quantity(self.prof, 1.0, s, l, 0.9)
        want = (FOUR_PI_3 * 2.0**s) ** (l / s)
        assert M == pytest.approx(want, rel=1e-12)
        assert Matt == pytest.approx(want, rel=1e-12)  # R = 1


class TestPowerLawClosedForms:
    prof = PowerLawProfile(c=1.3, alpha_p=0.5, gamma_p=1.1)

    def ball_integral(self, p, r, t):
        a = self.prof.radial_power
        b = self.prof.time_power
        return 4 * np.pi * self.prof.c**p * r ** (3 + a * p) / (3 + a * p) * (-t) ** (b * p)

    def test_cubic_term_exact_route(self):
        r = 0.7
        a, b = self.prof.radial_power, self.prof.time_power
        spatial = 4 * np.pi * self.prof.c**3 * r ** (3 + 3 * a) / (3 + 3 * a)
        time = (r**2) ** (3 * b + 1) / (3 * b + 1)
        want = r**-2.0 * spatial * time
        got = cylinder_power_integral(self.prof, "speed", 3.0, r, 2.0)
        assert got == pytest.approx(want, rel=1e-12)

    def test_graded_route_matches_exact(self):
        cfg = QuadratureConfig(n_radial=64, graded_levels=80,
                               radial_rule="graded", time_rule="graded")
        r = 0.7
        exact = cylinder_power_integral(self.prof, "speed", 3.0, r, 2.0)
        graded = cylinder_power_integral(self.prof, "speed", 3.0, r, 2.0, cfg)
        assert graded == pytest.approx(exact, rel=1e-3)

    def test_sup_mass_uses_latest_sample(self):
        """For a profile singular at t = 0 the discrete sup sits at the sample
        closest to the singular time."""
        r, cfg = 0.5, QuadratureConfig(n_time=8)
        t_last = -(r**2) * 0.5 / 8
        want = r**-1.0 * self.ball_integral(2.0, r, t_last)
        assert sup_weighted_mass(self.prof, r, 1.0, cfg) == pytest.approx(want, rel=1e-12)

    def test_pressure_uses_doubled_exponents(self):
        r = 0.6
        a, b = self.prof.radial_power, self.prof.time_power
        pc = self.prof.pressure_coeff
        spatial = 4 * np.pi * (pc * self.prof.c**2) ** 1.5 * r ** (3 + 3 * a) / (3 + 3 * a)
        time = (r**2) ** (3 * b + 1) / (3 * b + 1)
        got = cylinder_power_integral(self.prof, "pressure", 1.5, r, 2.0)
        assert got == pytest.approx(r**-2.0 * spatial * time, rel=1e-12)

    def test_divergent_exponent_raises(self):
        # gamma_p large enough that |v|^3 is not integrable in space
        bad = PowerLawProfile(c=1.0, alpha_p=1.0, gamma_p=1.05)
        with pytest.raises(DivergentIntegralError):
            cylinder_power_integral(bad, "speed", 3.0, 1.0, 2.0)


class TestMixedNormClosedForm:
    def test_certificate_zero_makes_value_radius_independent(self):
        from fractions import Fraction
        from cylscale import construct_profile_exponents

        con = construct_profile_exponents(Fraction(9, 10), Fraction(1, 2))
        s, l = float(con.s), float(con.l)
        vals = [closed_form_m_power_law(1.0, 0.5, float(con.gamma), s, l, 0.9, R)
                for R in (1.0, 0.5, 0.25)]
        for v, e in vals:
            assert abs(e) < 1e-12
            assert v == pytest.approx(vals[0][0], rel=1e-12)

    def test_quadrature_agrees(self):
        from fractions import Fraction
        from cylscale import construct_profile_exponents

        con = construct_profile_exponents(Fraction(9, 10), Fraction(1, 2))
        prof = PowerLawProfile(c=1.0, alpha_p=0.5, gamma_p=float(con.gamma))
        s, l = float(con.s), float(con.l)
        want, _ = closed_form_m_power_law(1.0, 0.5, float(con.gamma), s, l, 0.9, 1.0)
        cfg = QuadratureConfig(n_radial=64, radial_rule="graded", time_rule="graded")
        _, got = m_quantity(prof, 1.0, s, l, 0.9, cfg)
        assert got == pytest.approx(want, rel=1e-2)

    def test_divergence_guard(self):
        with pytest.raises(DivergentIntegralError):
            closed_form_m_power_law(1.0, 1.0, 1.2, 3.0, 3.0, 0.9, 1.0)


class TestGridQuantities:
    def test_grid_matches_closed_form_constant(self):
        prof = ConstantProfile((1.0, 0.0, 0.0))
        f = sample(prof, CylinderSpec(1.0), 48, 8)
        got = sup_weighted_mass(f, 1.0, 1.0)
        # Riemann cell sum over the ball at N=48 is ~N^-2 accurate
        assert got == pytest.approx(FOUR_PI_3, rel=5e-3)

    def test_radius_guard(self):
        f = sample(ConstantProfile(), CylinderSpec(1.0), 8, 2)
        with pytest.raises(RadiusError):
            sup_weighted_mass(f, 2.0, 1.0)
        with pytest.raises(RadiusError):
            sup_weighted_mass(f, -1.0, 1.0)


class TestReports:
    params = derive(2.8, 2.8, 0.9)

    def test_report_row_consistency(self):
        prof = ConstantProfile((1.0, 0.0, 0.0))
        row = energy_quantities(prof, 1.0, self.params)
        assert row.A == pytest.approx(FOUR_PI_3, rel=1e-12)
        assert row.E == 0.0
        assert row.calE == row.A + row.E + row.D

    def test_report_type1_sup_monotone(self):
        prof = ConstantProfile((1.0, 0.0, 0.0))
        rep = quantity_report(prof, [0.5, 1.0, 2.0], self.params)
        assert rep.type1_sup == max(max(r.A, r.E, r.C) for r in rep.rows)
        assert [r.r for r in rep.rows] == [0.5, 1.0, 2.0]

    def test_inequality_ratios_scale_invariant(self):
        """The diagnostic ratios of the power-law profile are invariant under
        the viscous rescaling r -> lam r (every ingredient rescales equally)."""
        from cylscale import ScalingSpec, rescale

        prof = PowerLawProfile(c=1.1, alpha_p=0.4, gamma_p=1.05)
        lam = 0.5
        scaled = rescale(prof, ScalingSpec("navier-stokes", lam))
        r1 = inequality_ratios(prof, lam * 0.25, lam * 0.5, self.params)
        r2 = inequality_ratios(scaled, 0.25, 0.5, self.params)
        for name in ("multiplicative_weighted", "multiplicative",
                     "pressure_decay", "energy_local"):
            assert getattr(r1, name) == pytest.approx(getattr(r2, name), rel=1e-9)

    def test_ratio_zero_guard(self):
        from cylscale import InequalityStructureError

        zero = ConstantProfile((0.0, 0.0, 0.0))
        row = inequality_ratios(zero, 0.25, 0.5, self.params)
        assert row.multiplicative == 0.0
        from cylscale.quantities import _ratio

        assert _ratio(0.0, 0.0) == 0.0
        with pytest.raises(InequalityStructureError):
            _ratio(1.0, 0.0)


class TestTestFunctions:
    bump = GaussianBump(center=(0.1, -0.2, 0.3), t_center=-0.5,
                        sigma=0.4, sigma_t=0.08)

    def test_derivatives_match_finite_differences(self):
        y = np.array([0.3, 0.1, 0.2])
        tau = -0.45
        h = 1e-6
        for j in range(3):
            e = np.zeros(3)
            e[j] = h
            fd = (self.bump.value(y + e, tau) - self.bump.value(y - e, tau)) / (2 * h)
            assert self.bump.grad(y, tau)[j] == pytest.approx(fd, rel=1e-6)
        fd_t = (self.bump.value(y, tau + h) - self.bump.value(y, tau - h)) / (2 * h)
        assert self.bump.dt(y, tau) == pytest.approx(fd_t, rel=1e-6)
        lap = sum(
            (self.bump.value(y + e, tau) - 2 * self.bump.value(y, tau)
             + self.bump.value(y - e, tau)) / h**2
            for e in (np.array([h, 0, 0]), np.array([0, h, 0]), np.array([0, 0, h]))
        ) / h * h  # noqa: arithmetic kept explicit
        assert self.bump.laplacian(y, tau) == pytest.approx(lap, rel=1e-3)

    def test_exponential_weighting_chain_rule(self):
        w = ExponentialWeighted(self.bump, rate=0.7)
        y = np.array([0.0, 0.0, 0.1])
        tau = -0.5
        h = 1e-6
        fd_t = (w.value(y, tau + h) - w.value(y, tau - h)) / (2 * h)
        assert w.dt(y, tau) == pytest.approx(fd_t, rel=1e-6)


class TestLocalEnergy:
    shear = SteadyShearProfile(amplitude=1.0, wavenumber=2.0)
    bump = GaussianBump(center=(0.0, 0.0, 0.0), t_center=-0.5,
                        sigma=0.35, sigma_t=0.05)

    def test_shear_euler_limit_residual_small(self):
        cfg = QuadratureConfig(n_space=64)
        lhs, rhs, res = local_energy_residual(self.shear, self.bump, -0.4,
                                              "euler-limit", cfg)
        assert abs(res) <= 1e-6
        assert lhs > 0  # non-degenerate balance

    def test_support_guards(self):
        late = GaussianBump(t_center=-0.01, sigma_t=0.05)
        prof = PowerLawProfile(c=1.0, alpha_p=0.5, gamma_p=1.1)
        with pytest.raises(SupportError):
            local_energy_residual(prof, late, -0.005, "euler-limit")
        with pytest.raises(SupportError):
            local_energy_residual(prof, self.bump, -0.4, "euler-limit")  # x=0 inside

    def test_substitution_identity(self):
        """The weighted balance with phi = psi * exp(rate*tau) coincides with
        the zeroth-order-term form with psi, term by term."""
        U = lambda y: np.exp(-np.einsum("...i,...i->...", y, y))[..., None] * azimuthal_unit(y)
        prof = SelfSimilarProfile(alpha=1.4, U=U)
        rate = (3.0 - 2.0 * prof.alpha) / (1.0 + prof.alpha)
        psi = self.bump
        phi = ExponentialWeighted(psi, rate)
        cfg = QuadratureConfig(n_space=24)
        l1, r1, d1 = local_energy_residual(prof, psi, -0.4, "selfsimilar", cfg)
        l2, r2, d2 = local_energy_residual(prof, phi, -0.4, "selfsimilar-weighted", cfg)
        assert l1 == pytest.approx(l2, rel=1e-9)
        assert r1 == pytest.approx(r2, rel=1e-9, abs=1e-12)
        assert d1 == pytest.approx(d2, rel=1e-9, abs=1e-12)
