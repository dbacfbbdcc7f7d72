import math

import numpy as np
import pytest

from conftest import rot2
from crownlab.errors import DomainExitError
from crownlab.growth import fit_power_law
from crownlab.iwasawa import decompose_path
from crownlab.liegroup import PElement, random_sl
from crownlab.prinseries import (
    ModeVector,
    SeriesParams,
    action_norm_sq,
    boundary_pairing,
    extended_norm_sq,
    growth_exponent,
    orbit_derivative_norm,
    real_time_norm_sq,
    sl2_iwasawa_closed,
    smooth_test_vector,
    unitary_axis_re,
    unitary_params,
)

PI = math.pi
XS = PI / 2
V_MIX = ModeVector({0: 1.0, 2: 0.5, -2: 0.5})
P_AXIS = unitary_params(0.4)
P_OFF = SeriesParams(s=2.8 + 0.3j, rho_shift=True)


def flow(tau, x_scale=XS):
    h = tau * x_scale / 2
    return np.diag([math.exp(h), math.exp(-h)])


class TestModeVector:
    def test_rejects_odd_modes(self):
        with pytest.raises(ValueError, match="even"):
            ModeVector({1: 1.0})

    def test_norm_sq(self):
        assert V_MIX.norm_sq == pytest.approx(1.5)

    def test_smooth_vector_decay(self):
        w = smooth_test_vector()
        assert max(abs(m) for m in w.modes) == 40
        assert w.modes[40] == pytest.approx((1 + 40) ** -8.0)


class TestClosedForm:
    def test_zero_time(self):
        c = sl2_iwasawa_closed(XS, 0.7, 0.0)
        assert c.alpha1 == pytest.approx(1.0)
        assert c.zeta == pytest.approx(0.7)
        assert c.nu == pytest.approx(0.0)

    def test_axis_angle_keeps_unit_modulus(self):
        for t in (0.3, 0.8, 0.999):
            c = sl2_iwasawa_closed(XS, 0.0, t)
            w = math.cos(t * PI / 2) - 1j * math.sin(t * PI / 2)
            assert abs(c.alpha1**2 - w) < 1e-13
            assert abs(abs(c.alpha1) - 1.0) < 1e-13

    def test_corner_domain_exit(self):
        with pytest.raises(DomainExitError):
            sl2_iwasawa_closed(XS, PI / 4, 1.0)

    def test_x_scale_validation(self):
        with pytest.raises(ValueError):
            sl2_iwasawa_closed(2.0, 0.1, 0.5)

    def test_reconstruction(self, rng):
        for _ in range(20):
            xs = rng.uniform(0.1, XS)
            theta, t = rng.uniform(0, 2 * PI), rng.uniform(0, 0.99)
            c = sl2_iwasawa_closed(xs, theta, t)
            g = np.diag(
                [np.exp(-1j * t * xs / 2), np.exp(1j * t * xs / 2)]
            ) @ rot2(theta)
            assert np.linalg.norm(c.reconstruct() - g) < 1e-10

    def test_consistent_with_decompose_path(self, rng):
        x = PElement(np.diag([PI / 4, -PI / 4]))
        for _ in range(15):
            theta, t = rng.uniform(0, 2 * PI), rng.uniform(0, 0.995)
            c = sl2_iwasawa_closed(XS, theta, t)
            f = decompose_path(x, rot2(theta), t)
            assert abs(np.exp(f.H[0]) - c.alpha1) < 1e-10
            assert abs(f.eta[0, 1] - c.nu) < 1e-10
            assert np.max(np.abs(f.kappa - c.kappa())) < 1e-10


class TestExtendedNorm:
    def test_zero_time_is_mode_norm(self):
        assert extended_norm_sq(V_MIX, P_AXIS, XS, 0.0, 256) == pytest.approx(
            V_MIX.norm_sq, abs=1e-12
        )

    def test_quadrature_self_consistency(self):
        for t in (0.5, 0.9, 0.99):
            a = extended_norm_sq(V_MIX, P_AXIS, XS, t, 4096)
            b = extended_norm_sq(V_MIX, P_AXIS, XS, t, 8192)
            assert abs(a - b) < 1e-10
            # off-axis values grow to ~1e5 where the absolute floor is
            # summation noise; doubling must still agree in relative terms
            a = extended_norm_sq(V_MIX, P_OFF, XS, t, 4096)
            b = extended_norm_sq(V_MIX, P_OFF, XS, t, 8192)
            assert abs(a - b) < 1e-12 * max(1.0, abs(b))

    def test_rejects_few_points(self):
        with pytest.raises(ValueError):
            extended_norm_sq(V_MIX, P_AXIS, XS, 0.5, 32)

    def test_real_time_two_code_paths(self, rng):
        for _ in range(8):
            tau = rng.uniform(0.0, 1.5)
            a = real_time_norm_sq(V_MIX, P_OFF, XS, tau, 8192)
            b = action_norm_sq(V_MIX, P_OFF, [flow(tau)], 8192)
            assert abs(a - b) < 1e-9 * max(1.0, abs(b))

    def test_monotone_on_sampled_grid(self):
        spherical = ModeVector({0: 1.0})
        for v in (spherical, V_MIX):
            vals = [extended_norm_sq(v, P_AXIS, XS, t, 512) for t in (0.5, 0.7, 0.9, 0.97)]
            assert all(b >= a for a, b in zip(vals, vals[1:]))


class TestUnitaryAxis:
    @pytest.mark.parametrize("shift,re_s", [(True, 2.0), (False, 1.0)])
    def test_isometry_on_axis(self, shift, re_s, rng):
        assert unitary_axis_re(shift) == re_s
        p = SeriesParams(s=complex(re_s, 0.7), rho_shift=shift)
        for _ in range(10):
            g = random_sl(2, rng)
            nsq = action_norm_sq(V_MIX, p, [g], 4096)
            assert abs(nsq - V_MIX.norm_sq) < 1e-8

    def test_off_axis_is_not_isometric(self, rng):
        p = SeriesParams(s=2.5 + 0.7j, rho_shift=True)
        g = flow(1.0)
        assert abs(action_norm_sq(V_MIX, p, [g], 4096) - V_MIX.norm_sq) > 1e-3


class TestGroupLaw:
    def test_real_time_composition(self):
        for tau1, tau2 in ((0.4, 0.7), (0.2, 1.1)):
            a = real_time_norm_sq(V_MIX, P_OFF, XS, tau1 + tau2, 8192)
            b = action_norm_sq(V_MIX, P_OFF, [flow(tau1), flow(tau2)], 8192)
            assert abs(a - b) < 1e-8 * max(1.0, b)

    def test_general_composition(self, rng):
        for _ in range(5):
            g1, g2 = random_sl(2, rng), random_sl(2, rng)
            a = action_norm_sq(V_MIX, P_OFF, [g1, g2], 8192)
            b = action_norm_sq(V_MIX, P_OFF, [g1 @ g2], 8192)
            assert abs(a - b) < 1e-8 * max(1.0, b)

    def test_action_validates_determinant(self):
        with pytest.raises(ValueError, match="det"):
            action_norm_sq(V_MIX, P_OFF, [2.0 * np.eye(2)], 256)


class TestGrowthExponent:
    def test_synthetic_power_law_recovery(self):
        ts = [1 - 2.0**-j for j in range(4, 13)]
        fit = fit_power_law(ts, [5.0 * (1 - t) ** -1.5 for t in ts])
        assert fit.n_hat == pytest.approx(1.5, abs=1e-6)
        assert fit.log_c_hat == pytest.approx(math.log(5.0), abs=1e-6)

    def test_mode_pair_blowup_is_clean(self):
        ts = [1 - 2.0**-j for j in range(4, 12)]
        fit = growth_exponent(ModeVector({2: 1.0, -2: 1.0}), P_AXIS, ts, 256)
        assert fit.r_squared > 0.999
        assert fit.n_hat == pytest.approx(1.0, abs=0.05)

    def test_spherical_axis_orbit_measured_behavior(self):
        # sqrt-log truth: small finite exponent, fit quality below a clean
        # power law (measured 0.982 on this grid) but stable
        ts = [1 - 2.0**-j for j in range(4, 13)]
        fit = growth_exponent(ModeVector({0: 1.0}), P_AXIS, ts, 256)
        assert math.isfinite(fit.n_hat)
        assert 0.0 < fit.n_hat < 0.3
        assert fit.r_squared > 0.97

    def test_zero_vector_rejected(self):
        with pytest.raises(ValueError, match="zero"):
            growth_exponent(ModeVector({}), P_AXIS, [0.5, 0.75, 0.9, 0.95], 256)

    def test_grid_validation(self):
        with pytest.raises(ValueError):
            growth_exponent(V_MIX, P_AXIS, [0.2, 0.5, 0.9, 0.95], 256)


class TestBoundaryPairing:
    def test_value_at_zero_time(self):
        v = ModeVector({0: 1.0})
        rep = boundary_pairing(v, v, P_AXIS, [0.0, 0.5, 0.75], 256)
        assert rep.values[0] == pytest.approx(1.0, abs=1e-12)

    def test_cauchy_structure_at_unit_scale(self):
        ts = [1 - 2.0**-j for j in range(4, 15)]
        rep = boundary_pairing(V_MIX, smooth_test_vector(), P_AXIS, ts, 1024)
        assert rep.decreasing
        ratios = [b / a for a, b in zip(rep.diffs, rep.diffs[1:])]
        assert all(0.4 < r < 0.6 for r in ratios[2:])

    def test_scaled_probe_reaches_cauchy_verdict(self):
        ts = [1 - 2.0**-j for j in range(4, 15)]
        w = smooth_test_vector()
        w_small = ModeVector({m: 0.01 * c for m, c in w.modes.items()})
        rep = boundary_pairing(V_MIX, w_small, P_AXIS, ts, 1024)
        assert rep.cauchy
        assert rep.final_diff < 1e-6

    def test_rejects_fat_tail_test_vector(self):
        fat = ModeVector({m: 1.0 for m in range(-20, 21, 2)})
        with pytest.raises(ValueError, match="decay"):
            boundary_pairing(V_MIX, fat, P_AXIS, [0.5, 0.75, 0.9], 256)

    def test_derivative_bump(self):
        ts = [1 - 2.0**-j for j in range(4, 12)]
        norms = [math.sqrt(extended_norm_sq(V_MIX, P_AXIS, XS, t, 256)) for t in ts]
        dnorms = [orbit_derivative_norm(V_MIX, P_AXIS, XS, t, 256) for t in ts]
        bump = fit_power_law(ts, dnorms).n_hat - fit_power_law(ts, norms).n_hat
        assert bump == pytest.approx(1.0, abs=0.1)
