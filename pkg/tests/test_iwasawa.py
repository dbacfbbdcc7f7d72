import math

import numpy as np
import pytest

from conftest import rot2
from crownlab.errors import BranchAmbiguityError, DomainExitError
from crownlab.iwasawa import (
    PathConfig,
    check_H_range,
    continue_factors,
    decompose_path,
    decompose_real,
    domain_test,
)
from crownlab.liegroup import PElement, haar_so, random_sl
from crownlab.numkernel import group_exp
from crownlab.prinseries import sl2_iwasawa_closed

PI = math.pi
X2 = PElement(np.diag([PI / 4, -PI / 4]))


def crown_point(x: PElement, k: np.ndarray, t: float) -> np.ndarray:
    return group_exp(x.matrix, -1j * t) @ k


def random_diag_direction(n, rng, scale=(0.3, 1.0)):
    d = rng.standard_normal(n)
    d -= d.mean()
    d *= rng.uniform(*scale) * (PI / 2) / (d.max() - d.min())
    return PElement(np.diag(d))


class TestDecomposeReal:
    def test_shear(self):
        f = decompose_real([[1.0, 0.0], [1.0, 1.0]])
        r = 1 / math.sqrt(2)
        assert np.allclose(f.kappa, [[r, -r], [r, r]])
        assert np.allclose(f.alpha, [math.sqrt(2), r])
        assert np.allclose(f.eta, [[1.0, 0.5], [0.0, 1.0]])

    def test_identity(self):
        f = decompose_real(np.eye(3))
        assert np.allclose(f.kappa, np.eye(3))
        assert np.allclose(f.H, np.zeros(3))
        assert np.allclose(f.eta, np.eye(3))

    def test_already_diagonal(self):
        f = decompose_real(np.diag([2.0, 0.5]))
        assert np.allclose(f.kappa, np.eye(2))
        assert np.allclose(f.H, [math.log(2), -math.log(2)])
        assert np.allclose(f.eta, np.eye(2))

    def test_rejects_non_sl(self):
        with pytest.raises(ValueError, match="SL"):
            decompose_real(2.0 * np.eye(2))

    def test_reconstruction_sweep(self, rng):
        for _ in range(100):
            n = int(rng.integers(2, 7))
            g = random_sl(n, rng)
            f = decompose_real(g)
            assert np.linalg.norm(f.reconstruct().real - g) < 1e-10 * np.linalg.norm(g)
            assert np.linalg.norm(f.kappa.T @ f.kappa - np.eye(n)) < 1e-9
            assert abs(np.sum(f.H)) < 1e-10


class TestDomainTest:
    def test_real_sl_always_inside(self, rng):
        for _ in range(50):
            ok, _ = domain_test(random_sl(int(rng.integers(2, 6)), rng))
            assert ok

    def test_known_singular_point(self):
        ok, smallest = domain_test([[1.0, 0.0], [1j, 1.0]])
        assert not ok
        assert smallest == pytest.approx(0.0, abs=1e-15)

    def test_identity(self):
        ok, smallest = domain_test(np.eye(4))
        assert ok
        assert smallest == pytest.approx(1.0)


class TestDecomposePath:
    def test_zero_time(self):
        k = haar_so(3, 5)
        f = decompose_path(PElement(np.diag([1.0, 0.0, -1.0])), k, 0.0)
        assert np.allclose(f.kappa, k)
        assert np.allclose(f.H, np.zeros(3))
        assert np.allclose(f.eta, np.eye(3))

    def test_sl2_alpha_branch(self):
        # exp(H1)^2 = cos(t pi/2) - i sin(t pi/2) cos(2 theta), branch from +1
        for theta, t in [(0.3, 0.4), (1.2, 0.8), (PI / 4, 0.97)]:
            f = decompose_path(X2, rot2(theta), t)
            w = math.cos(t * PI / 2) - 1j * math.sin(t * PI / 2) * math.cos(2 * theta)
            assert abs(np.exp(2 * f.H[0]) - w) < 1e-12

    def test_domain_exit_at_singular_corner(self):
        with pytest.raises(DomainExitError) as err:
            decompose_path(X2, rot2(PI / 4), 1.0)
        assert err.value.last_good_t > 0.999
        assert err.value.t_fail == pytest.approx(1.0, abs=1e-4)

    def test_dual_oracle_against_closed_form(self, rng):
        for _ in range(40):
            theta = rng.uniform(0, 2 * PI)
            t = rng.uniform(0, 0.999)
            f = decompose_path(X2, rot2(theta), t)
            c = sl2_iwasawa_closed(PI / 2, theta, t)
            assert abs(np.exp(f.H[0]) - c.alpha1) < 1e-8
            assert abs(f.eta[0, 1] - c.nu) < 1e-8
            assert np.max(np.abs(f.kappa - c.kappa())) < 1e-8

    def test_reconstruction_and_complex_orthogonality(self, rng):
        for _ in range(25):
            n = int(rng.integers(2, 5))
            x = random_diag_direction(n, rng)
            k = haar_so(n, rng)
            t = rng.uniform(0, 0.99)
            f = decompose_path(x, k, t)
            g = crown_point(x, k, t)
            assert np.linalg.norm(f.reconstruct() - g) < 1e-9 * np.linalg.norm(g)
            assert np.linalg.norm(f.kappa.T @ f.kappa - np.eye(n)) < 1e-9
            assert abs(np.sum(f.H)) < 1e-10

    def test_refinement_consistency(self):
        k = haar_so(2, 4)
        f32 = decompose_path(X2, k, 0.93, PathConfig(initial_steps=32))
        f64 = decompose_path(X2, k, 0.93, PathConfig(initial_steps=64))
        assert np.max(np.abs(f32.H - f64.H)) < 1e-10

    def test_holomorphy_probe(self):
        # centered Cauchy-Riemann check of z -> H(z) off the real path axis
        k = haar_so(2, 11)
        t0, eps = 0.6, 1e-4
        fd_re = (continue_factors(X2, k, t0 + eps).H - continue_factors(X2, k, t0 - eps).H) / (
            2 * eps
        )
        fd_im = (
            continue_factors(X2, k, complex(t0, eps)).H
            - continue_factors(X2, k, complex(t0, -eps)).H
        ) / (2j * eps)
        assert np.max(np.abs(fd_re - fd_im)) < 1e-5 * np.max(np.abs(fd_re))

    def test_branch_guard_escalates(self):
        cfg = PathConfig(initial_steps=1, max_refinement_depth=0, max_arg_jump=0.05)
        with pytest.raises(BranchAmbiguityError):
            decompose_path(X2, rot2(1.1), 0.9, cfg)

    def test_imaginary_parameter_reaches_real_group(self, rng):
        # z = -i tau puts exp(-i z x) k = exp(-tau x) k back in SL(n,R), so
        # the continuation must land on the real KAN factors
        for _ in range(10):
            n = int(rng.integers(2, 5))
            x = random_diag_direction(n, rng)
            k = haar_so(n, rng)
            tau = rng.uniform(0.1, 1.5)
            cont = continue_factors(x, k, complex(0.0, -tau))
            real = decompose_real(group_exp(x.matrix, -tau).real @ k)
            assert np.max(np.abs(cont.H - real.H)) < 1e-10
            assert np.max(np.abs(cont.kappa - real.kappa)) < 1e-10
            assert np.max(np.abs(cont.eta - real.eta)) < 1e-10

    def test_deep_time_refinement_survives(self):
        t = 1.0 - 2.0**-20
        f = decompose_path(X2, rot2(math.pi / 4), t)
        g = crown_point(X2, rot2(math.pi / 4), t)
        assert np.linalg.norm(f.reconstruct() - g) < 1e-9 * np.linalg.norm(g)
        assert f.min_minor_magnitude < 1e-5

    def test_rejects_negative_time(self):
        with pytest.raises(ValueError):
            decompose_path(X2, np.eye(2), -0.5)

    def test_rejects_non_orthogonal_k(self):
        with pytest.raises(ValueError, match="orthogonal"):
            decompose_path(X2, [[1.0, 0.5], [0.0, 1.0]], 0.5)


class TestPathConfig:
    def test_rejects_large_arg_jump(self):
        with pytest.raises(ValueError):
            PathConfig(max_arg_jump=PI / 2)

    def test_rejects_bad_steps(self):
        with pytest.raises(ValueError):
            PathConfig(initial_steps=0)


class TestHRange:
    def test_zero_time_trivial(self):
        f = decompose_path(X2, rot2(0.4), 0.0)
        ok, violation = check_H_range(f, X2, 0.0)
        assert ok
        assert violation == pytest.approx(0.0, abs=1e-14)

    def test_sl2_closed_form_band(self, rng):
        # Im H1 = -(1/2) arg(a^2 + c^2) stays inside [-t pi/4, t pi/4]
        for _ in range(30):
            theta, t = rng.uniform(0, 2 * PI), rng.uniform(0, 0.99)
            f = decompose_path(X2, rot2(theta), t)
            w = math.cos(t * PI / 2) - 1j * math.sin(t * PI / 2) * math.cos(2 * theta)
            assert f.H[0].imag == pytest.approx(0.5 * np.angle(w), abs=1e-10)
            assert abs(f.H[0].imag) <= t * PI / 4 + 1e-12
            ok, _ = check_H_range(f, X2, t)
            assert ok

    def test_random_n3_containment(self, rng):
        for _ in range(20):
            x = random_diag_direction(3, rng)
            k = haar_so(3, rng)
            t = rng.uniform(0.1, 0.99)
            try:
                f = decompose_path(x, k, t)
            except DomainExitError:
                continue
            ok, violation = check_H_range(f, x, t, tol=1e-8)
            assert ok, violation

    def test_rejects_non_diagonal_direction(self, rng):
        x = random_diag_direction(3, rng)
        f = decompose_path(x, haar_so(3, rng), 0.5)
        off = PElement(np.array([[0.0, 0.3, 0], [0.3, 0, 0], [0, 0, 0]]))
        with pytest.raises(ValueError, match="diagonal"):
            check_H_range(f, off, 0.5)
