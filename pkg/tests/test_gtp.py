import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from gtpbounds import gtp
from gtpbounds.errors import CapabilityError, ValidationError

W1 = np.array([[1.0], [2.0], [5.0]])
W2 = np.array([[1.0, 0.0], [0.0, 1.0], [1.0, -2.0], [2.0, 1.0]])


def complex_oracle(model, X):
    """f(x) = sum_w c_w exp(-i w.x) with c_0 = a0/2, c_{+-w} = (a +- i b)/2, built from scratch."""
    X = np.atleast_2d(X)
    out = np.full(X.shape[0], model.a0 / 2, dtype=complex)
    for w, a, b in zip(model.omega_plus, model.a, model.b):
        ph = X @ w
        out += (a + 1j * b) / 2 * np.exp(-1j * ph) + (a - 1j * b) / 2 * np.exp(1j * ph)
    assert np.max(np.abs(out.imag)) < 1e-12
    return out.real


class TestEvaluate:
    def test_zero_model(self):
        m = gtp.GTPModel.from_coefficients(W1, np.zeros(7), 1.0)
        np.testing.assert_array_equal(m(np.random.default_rng(0).uniform(0, 6, (5, 1))), 0)

    def test_constant(self):
        m = gtp.GTPModel.from_coefficients(np.zeros((0, 1)), [2.0], 2.0)
        assert m([0.3]) == 1.0

    @pytest.mark.parametrize("W", [W1, W2])
    def test_complex_form(self, W):
        rng = np.random.default_rng(1)
        m = gtp.random_model(W, 2.0, 3)
        X = rng.uniform(0, 2 * np.pi, (100, W.shape[1]))
        np.testing.assert_allclose(m(X), complex_oracle(m, X), atol=1e-10)
        c = gtp.to_complex_coefficients(m)
        np.testing.assert_allclose(gtp.evaluate_complex(c, X), m(X), atol=1e-10)

    def test_single_point_returns_scalar(self):
        m = gtp.random_model(W2, 1.0, 0)
        v = m(np.array([0.1, 0.2]))
        assert np.ndim(v) == 0

    def test_linearity(self):
        rng = np.random.default_rng(2)
        X = rng.uniform(0, 2 * np.pi, (20, 1))
        c1, c2 = rng.standard_normal(7) * 0.2, rng.standard_normal(7) * 0.2
        t = 0.3
        f = lambda c: gtp.GTPModel.from_coefficients(W1, c, 10.0)(X)  # noqa: E731
        np.testing.assert_allclose(f(t * c1 + (1 - t) * c2), t * f(c1) + (1 - t) * f(c2), atol=1e-12)

    def test_norm_constraint(self):
        with pytest.raises(ValidationError):
            gtp.GTPModel.from_coefficients(W1, np.ones(7), 1.0)
        m = gtp.GTPModel.from_coefficients(W1, np.ones(7), 1.0, project=True)
        assert np.linalg.norm(m.coefficients) == pytest.approx(1.0)

    def test_dimension_mismatch(self):
        m = gtp.random_model(W2, 1.0, 0)
        with pytest.raises(ValidationError):
            m(np.zeros((3, 3)))


class TestFeatureMap:
    def test_at_zero(self):
        np.testing.assert_array_equal(gtp.feature_map(W1, [0.0]), [0.5, 1, 1, 1, 0, 0, 0])

    def test_empty(self):
        np.testing.assert_array_equal(gtp.feature_map(np.zeros((0, 1)), [1.3]), [0.5])

    def test_inner_product(self):
        rng = np.random.default_rng(5)
        m = gtp.random_model(W2, 1.5, 9)
        X = rng.uniform(0, 2 * np.pi, (30, 2))
        np.testing.assert_allclose(gtp.feature_map(W2, X) @ m.coefficients, complex_oracle(m, X), atol=1e-12)


class TestConversions:
    def test_constant(self):
        a0, a, b = gtp.to_real_coefficients({(0,): 1.0}, W1[:1])
        assert a0 == 2 and a[0] == 0 and b[0] == 0

    def test_cosine(self):
        a0, a, b = gtp.to_real_coefficients({(1,): 0.5, (-1,): 0.5}, W1[:1])
        assert (a0, a[0], b[0]) == (0, 1, 0)

    def test_sine(self):
        a0, a, b = gtp.to_real_coefficients({(1,): -0.5j, (-1,): 0.5j}, W1[:1])
        assert a[0] == pytest.approx(0) and b[0] == pytest.approx(-1)

    def test_symmetry_violation(self):
        with pytest.raises(ValidationError):
            gtp.to_real_coefficients({(1,): 0.5, (-1,): 0.2}, W1[:1])
        with pytest.raises(ValidationError):
            gtp.to_real_coefficients({(0,): 1j}, W1[:1])

    @settings(max_examples=30, deadline=None)
    @given(st.integers(0, 10_000))
    def test_roundtrip(self, seed):
        m = gtp.random_model(W2, 2.0, seed)
        a0, a, b = gtp.to_real_coefficients(gtp.to_complex_coefficients(m), W2)
        np.testing.assert_allclose(np.concatenate([[a0], a, b]), m.coefficients, atol=1e-14)


class TestNorms:
    def test_values(self):
        assert gtp.coefficient_norm(np.zeros(3)) == 0
        assert gtp.coefficient_norm([3.0, 4.0]) == 5
        assert gtp.coefficient_norm([1, -2, 0.5], np.inf) == 2

    @pytest.mark.parametrize("seed", range(5))
    def test_coefficient_identities(self, seed):
        """||coeffs||^2 = 2||c||^2 + 2 c_0^2, so ||coeffs|| <= 2||c||; 2||c|| matches the L2 norm of f."""
        m = gtp.random_model(W2, 2.0, seed)
        c = gtp.to_complex_coefficients(m)
        cn = np.sqrt(sum(abs(v) ** 2 for v in c.values()))
        c0 = m.a0 / 2
        assert np.linalg.norm(m.coefficients) ** 2 == pytest.approx(2 * cn**2 + 2 * c0**2, rel=1e-12)
        assert np.linalg.norm(m.coefficients) <= 2 * cn + 1e-12
        # rectangle rule is exact for trigonometric polynomials on a fine enough grid
        g = 16
        ax = np.arange(g) * 2 * np.pi / g
        X = np.stack([a.ravel() for a in np.meshgrid(ax, ax, indexing="ij")], axis=1)
        l2 = np.sqrt(np.sum(m(X) ** 2) * (2 * np.pi / g) ** 2)
        assert 2 * cn == pytest.approx(2 / (2 * np.pi) ** (2 / 2) * l2, abs=1e-6)

    def test_sup_bound(self):
        for seed in range(5):
            m = gtp.random_model(W1, 2.0, seed, mode="sphere")
            c = gtp.to_complex_coefficients(m)
            cn = np.sqrt(sum(abs(v) ** 2 for v in c.values()))
            # 2||c||_2 = (2/sqrt(2pi)) ||f||_2 <= 2 ||f||_inf
            assert 2 * cn <= 2 * gtp.grid_sup_norm(m) + 1e-9

    def test_project(self):
        v = np.array([1.0, 0.0])
        np.testing.assert_array_equal(gtp.project_to_ball(v, 2.0), v)
        np.testing.assert_allclose(gtp.project_to_ball([4.0, 0.0], 2.0), [2.0, 0.0])
        p = gtp.project_to_ball([3.0, 4.0, 1.0], 2.0)
        np.testing.assert_array_equal(gtp.project_to_ball(p, 2.0), p)
        with pytest.raises(CapabilityError):
            gtp.project_to_ball(v, 1.0, p=1)


class TestBudget:
    def test_integer(self):
        assert gtp.btilde_for_integer_spectrum(1.0).value == 2
        assert gtp.btilde_for_integer_spectrum(0.5).value == 1

    def test_conjectural(self):
        bt = gtp.btilde_for_integer_spectrum(1.0, n_omega=9)
        assert bt.conjectural == pytest.approx(6.0)
        assert "unproven" in bt.conjectural_requires


class TestRandomModel:
    def test_deterministic(self):
        a, b = gtp.random_model(W1, 1.0, 42), gtp.random_model(W1, 1.0, 42)
        np.testing.assert_array_equal(a.coefficients, b.coefficients)

    def test_sphere(self):
        m = gtp.random_model(W1, 1.7, 1, mode="sphere")
        assert abs(np.linalg.norm(m.coefficients) - 1.7) <= 1e-12

    def test_ball(self):
        rng = np.random.default_rng(0)
        c = gtp.random_ball_coefficients(10_000, 7, 1.3, rng)
        assert np.linalg.norm(c, axis=1).max() <= 1.3

    def test_json_roundtrip(self):
        m = gtp.random_model(W2, 1.0, 7)
        back = gtp.GTPModel.from_json(m.to_json())
        np.testing.assert_array_equal(back.coefficients, m.coefficients)
        np.testing.assert_array_equal(back.omega_plus, m.omega_plus)

    def test_frequency_reach(self):
        assert gtp.frequency_reach(W2) == 4.0
        assert gtp.frequency_reach(np.zeros((0, 2))) == 0.0

    def test_empty_frequencies_keep_dimension(self):
        m = gtp.GTPModel.from_coefficients(np.zeros((0, 3)), [1.0], 1.0)
        assert m.d == 3
        assert m(np.zeros(3)) == 0.5
