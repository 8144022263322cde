import numpy as np
import pytest

from shpfc import SpectralGrid

from conftest import mean_zero, random_field


class TestGridConstruction:
    def test_symbol_mode_1_0_unit_domain(self):
        g = SpectralGrid(4, 2.0 * np.pi)
        assert g.lap_symbol[1, 0] == pytest.approx(-1.0, abs=1e-15)

    def test_symbol_zero_mode_exact(self):
        g = SpectralGrid(4, 2.0 * np.pi)
        assert g.lap_symbol[0, 0] == 0.0

    def test_symbol_mode_2_1(self):
        # direct formula -(2*pi/32)^2 * (2^2 + 1^2), hand-checked two ways
        g = SpectralGrid(8, 32.0)
        assert g.lap_symbol[2, 1] == pytest.approx(-0.19276571095877654, abs=1e-15)

    def test_symbol_nonpositive_and_symmetric(self):
        g = SpectralGrid(16, 7.0)
        assert g.lap_symbol.max() <= 0.0
        assert np.count_nonzero(g.lap_symbol == 0.0) == 1
        neg = (-np.arange(16)) % 16
        assert np.array_equal(g.lap_symbol, g.lap_symbol[np.ix_(neg, neg)])

    @pytest.mark.parametrize("M", [3, 5, 2, 0, -4])
    def test_rejects_bad_M(self, M):
        with pytest.raises(ValueError):
            SpectralGrid(M, 1.0)

    @pytest.mark.parametrize("L", [0.0, -1.0])
    def test_rejects_bad_L(self, L):
        with pytest.raises(ValueError):
            SpectralGrid(8, L)


class TestTransforms:
    def test_constant_field_single_mode(self, grid32):
        c = 3.25
        coeffs = grid32.to_fourier(np.full((32, 32), c))
        assert coeffs[0, 0] == pytest.approx(c, abs=1e-14)
        coeffs[0, 0] = 0.0
        assert np.abs(coeffs).max() < 1e-14

    def test_cosine_two_conjugate_modes(self, grid_2pi):
        g = grid_2pi
        f = np.cos(g.x)
        coeffs = g.to_fourier(f)
        assert coeffs[1, 0] == pytest.approx(0.5, abs=1e-14)
        assert coeffs[-1, 0] == pytest.approx(0.5, abs=1e-14)
        coeffs[1, 0] = coeffs[-1, 0] = 0.0
        assert np.abs(coeffs).max() < 1e-13

    def test_round_trip(self, rng):
        for M, L in ((16, 2 * np.pi), (32, 32.0), (64, 100.0)):
            g = SpectralGrid(M, L)
            f = random_field(rng, M)
            back = g.to_physical(g.to_fourier(f))
            assert np.abs(back - f).max() <= 1e-12 * max(1.0, np.abs(f).max())

    def test_to_physical_rejects_asymmetric_coeffs(self, grid32):
        coeffs = np.zeros((32, 32), dtype=complex)
        coeffs[1, 0] = 1.0  # missing the conjugate partner
        with pytest.raises(ValueError, match="imaginary residue"):
            grid32.to_physical(coeffs)


class TestApplySymbol:
    def test_identity_symbol(self, grid32, rng):
        f = random_field(rng, 32)
        out = grid32.apply_symbol(f, np.ones((32, 32)))
        assert np.abs(out - f).max() < 1e-13

    def test_laplacian_eigenfunction(self, grid_2pi):
        g = grid_2pi
        f = np.cos(g.x)
        out = g.apply_symbol(f, g.lap_symbol)
        assert np.abs(out + f).max() < 1e-13

    def test_composition_equals_squared_symbol(self, grid32, rng):
        g = grid32
        f = random_field(rng, 32)
        twice = g.apply_symbol(g.apply_symbol(f, g.lap_symbol), g.lap_symbol)
        squared = g.apply_symbol(f, g.lap_symbol**2)
        scale = max(1.0, np.abs(squared).max())
        assert np.abs(twice - squared).max() <= 1e-11 * scale

    def test_linearity(self, grid32, rng):
        g = grid32
        u, v = random_field(rng, 32), random_field(rng, 32)
        a, b = 0.37, -2.11
        lhs = g.apply_symbol(a * u + b * v, g.lap_symbol)
        rhs = a * g.apply_symbol(u, g.lap_symbol) + b * g.apply_symbol(v, g.lap_symbol)
        assert np.abs(lhs - rhs).max() <= 1e-12 * max(1.0, np.abs(rhs).max())

    def test_rejects_asymmetric_symbol(self, grid32):
        sym = np.zeros((32, 32))
        sym[1, 0] = 1.0  # (m,n) -> (-m,-n) partner missing
        with pytest.raises(ValueError, match="symmetry"):
            grid32.apply_symbol(np.ones((32, 32)), sym)


class TestInnerProductsAndNorms:
    def test_inner_of_constants(self, grid32):
        ones = np.ones((32, 32))
        assert grid32.inner(ones, ones) == pytest.approx(32.0**2, rel=1e-14)

    def test_norm_of_cosine(self, grid_2pi):
        g = grid_2pi
        want = np.sqrt(g.L**2 / 2.0)  # Parseval for a single mode
        assert g.norm_l2(np.cos(g.x)) == pytest.approx(want, rel=1e-14)

    def test_parseval(self, grid32, rng):
        g = grid32
        f = random_field(rng, 32)
        coeffs = g.to_fourier(f)
        spectral = g.L**2 * np.sum(np.abs(coeffs) ** 2)
        assert g.norm_l2(f) ** 2 == pytest.approx(spectral, rel=1e-12)

    def test_green_identity_gradient(self, grid32, rng):
        g = grid32
        for _ in range(100):
            v, w = random_field(rng, 32), random_field(rng, 32)
            lhs = g.inner(g.apply_symbol(v, -g.lap_symbol), w)
            rhs = g.inner_grad(v, w)
            assert abs(lhs - rhs) <= 1e-11 * max(1.0, abs(rhs))

    def test_green_identity_bilaplacian(self, grid32, rng):
        g = grid32
        for _ in range(100):
            v, w = random_field(rng, 32), random_field(rng, 32)
            lhs = g.inner(g.apply_symbol(v, g.lap_symbol**2), w)
            rhs = g.inner(g.apply_symbol(v, g.lap_symbol),
                          g.apply_symbol(w, g.lap_symbol))
            assert abs(lhs - rhs) <= 1e-11 * max(1.0, abs(rhs))

    def test_seminorm_h2_matches_operator_route(self, grid32, rng):
        g = grid32
        u = random_field(rng, 32)
        direct = g.norm_l2(g.apply_symbol(u, 1.0 + g.lap_symbol))
        assert g.seminorm_h2(u) == pytest.approx(direct, rel=1e-12)

    def test_hm1_single_mode(self, grid_2pi):
        # (-Lap)^{-1} cos(x) = cos(x), so the norm equals the L2 norm here
        g = grid_2pi
        v = np.cos(g.x)
        assert g.norm_hm1(v) == pytest.approx(4.442882938158366, rel=1e-13)

    def test_hm1_requires_mean_zero(self, grid32):
        with pytest.raises(ValueError, match="mean-zero"):
            grid32.norm_hm1(np.ones((32, 32)))

    def test_generalized_cauchy_schwarz(self, grid32, rng):
        g = grid32
        for _ in range(25):
            v = mean_zero(g, random_field(rng, 32))
            w = mean_zero(g, random_field(rng, 32))
            assert g.inner(v, w) <= g.norm_grad(v) * g.norm_hm1(w) + 1e-11
