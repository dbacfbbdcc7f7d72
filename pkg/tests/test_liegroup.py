import math

import numpy as np
import pytest

from crownlab.errors import SingularInputError, SymmetryError
from crownlab.liegroup import (
    PElement,
    boundary_direction,
    crown_contains,
    haar_so,
    lie_structure,
    random_p_element,
    random_sl,
    rho,
    s_max,
)

PI = math.pi


class TestStructure:
    @pytest.mark.parametrize("n", [2, 3, 4, 5])
    def test_root_count_and_weyl_order(self, n):
        ls = lie_structure(n)
        assert len(ls.restricted_roots) == n * (n - 1)
        assert len(ls.weyl_group) == math.factorial(n)

    def test_large_n_weyl_lazy(self):
        assert lie_structure(7).weyl_group is None

    def test_rejects_small_n(self):
        with pytest.raises(ValueError):
            lie_structure(1)


class TestPElement:
    def test_caches_eigenvalues(self):
        x = PElement(np.diag([1.0, 0.0, -1.0]))
        assert np.allclose(x.eigenvalues, [-1.0, 0.0, 1.0])

    def test_rejects_trace(self):
        with pytest.raises(ValueError, match="traceless"):
            PElement(np.eye(2))

    def test_rejects_asymmetric(self):
        with pytest.raises(SymmetryError):
            PElement([[0.0, 1.0], [0.0, 0.0]])


class TestRho:
    def test_zero(self):
        assert rho(PElement(np.zeros((3, 3)))) == 0.0

    def test_sl2_boundary_point(self):
        assert rho(PElement(np.diag([PI / 4, -PI / 4]))) == pytest.approx(PI / 2)

    def test_sl3_spread(self):
        assert rho(PElement(np.diag([1.0, 0.0, -1.0]))) == pytest.approx(2.0)

    def test_ad_k_invariance(self, rng):
        for _ in range(30):
            n = int(rng.integers(2, 6))
            x = random_p_element(n, rng)
            k = haar_so(n, rng)
            assert abs(rho(PElement(k @ x.matrix @ k.T)) - rho(x)) < 1e-11


class TestCrown:
    def test_origin_inside(self):
        assert crown_contains(PElement(np.zeros((2, 2))), 0.0)

    def test_boundary_point_excluded(self):
        assert not crown_contains(PElement(np.diag([PI / 4, -PI / 4])), 0.0)

    def test_interior_point(self):
        assert crown_contains(PElement(0.9 * np.diag([PI / 4, -PI / 4])), 0.0)

    def test_margin_validation(self):
        with pytest.raises(ValueError):
            crown_contains(PElement(np.zeros((2, 2))), -0.1)


class TestBoundaryDirection:
    def test_sl2(self):
        b = boundary_direction(PElement(np.diag([1.0, -1.0])))
        assert np.allclose(b.matrix, np.diag([PI / 4, -PI / 4]))

    def test_fixed_point(self):
        x = PElement(np.diag([PI / 4, -PI / 4]))
        assert np.allclose(boundary_direction(x).matrix, x.matrix)

    def test_sl3(self):
        b = boundary_direction(PElement(np.diag([2.0, -1.0, -1.0])))
        assert np.allclose(b.matrix, (PI / 6) * np.diag([2.0, -1.0, -1.0]))

    def test_rho_is_half_pi(self, rng):
        for _ in range(25):
            b = boundary_direction(random_p_element(int(rng.integers(2, 7)), rng))
            assert abs(rho(b) - PI / 2) < 1e-13

    def test_zero_rejected(self):
        with pytest.raises(ValueError):
            boundary_direction(PElement(np.zeros((2, 2))))


class TestHaar:
    @pytest.mark.parametrize("n", [2, 3, 5])
    def test_special_orthogonal(self, n):
        q = haar_so(n, 42)
        assert np.linalg.norm(q.T @ q - np.eye(n)) < 1e-12
        assert np.linalg.det(q) == pytest.approx(1.0, abs=1e-12)

    def test_deterministic(self):
        assert np.array_equal(haar_so(4, 7), haar_so(4, 7))
        assert not np.array_equal(haar_so(4, 7), haar_so(4, 8))

    def test_entry_square_mean_is_one_over_n(self):
        # any orthogonal matrix has entry-square mean exactly 1/n; the
        # distributional content is in a single entry over many draws
        n, draws = 3, 10_000
        samples = np.array([haar_so(n, [99, i])[0, 0] ** 2 for i in range(draws)])
        var = 3.0 / (n * (n + 2)) - 1.0 / n**2
        assert abs(samples.mean() - 1.0 / n) < 3.0 * math.sqrt(var / draws)

    def test_rejects_degenerate_n(self):
        with pytest.raises(ValueError):
            haar_so(1, 0)


class TestSMax:
    def test_unitary_is_one(self, rng):
        for n in (2, 4):
            assert s_max(haar_so(n, rng)) == pytest.approx(1.0, abs=1e-12)

    def test_diagonal_case_pins_identification(self):
        # diag(2, 1/2) = exp(X) with X = diag(ln 2, -ln 2): e^{rho(X)} = 4
        assert s_max(np.diag([2.0, 0.5])) == pytest.approx(4.0, rel=1e-12)
        assert s_max(np.diag([3.0, 1.0, 1.0 / 3.0])) == pytest.approx(9.0, rel=1e-12)

    def test_singular_rejected(self):
        with pytest.raises(SingularInputError):
            s_max(np.diag([1.0, 0.0]))

    def test_axioms_sampled(self, rng):
        for _ in range(200):
            n = int(rng.integers(2, 5))
            g, h = random_sl(n, rng), random_sl(n, rng)
            sg, sh = s_max(g), s_max(h)
            assert s_max(g @ h) <= sg * sh * (1 + 1e-10)
            assert abs(s_max(np.linalg.inv(g)) - sg) <= 1e-10 * sg * max(1.0, sg)
            u, v = haar_so(n, rng), haar_so(n, rng)
            assert abs(s_max(u @ g @ v) - sg) <= 1e-10 * sg


def test_random_sl_has_unit_determinant(rng):
    for n in (2, 3, 6):
        g = random_sl(n, rng)
        assert abs(np.linalg.det(g) - 1.0) < 1e-10
