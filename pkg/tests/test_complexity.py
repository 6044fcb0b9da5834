import math

import numpy as np
import pytest
from scipy.optimize import minimize_scalar

from gtpbounds import complexity as cx
from gtpbounds.errors import ResourceError, ValidationError
from gtpbounds.gtp import feature_map, nyquist_grid


def fibonacci_sphere(n):
    """Deterministic near-uniform points on S^2, with their angular spacing."""
    i = np.arange(n) + 0.5
    phi = np.arccos(1 - 2 * i / n)
    theta = np.pi * (1 + 5**0.5) * i
    pts = np.stack([np.cos(theta) * np.sin(phi), np.sin(theta) * np.sin(phi), np.cos(phi)], axis=1)
    return pts, math.sqrt(4 * math.pi / n)


def dudley_oracle(B, B_tilde, n_omega, m, n_quad=20001):
    """Independent chaining value: geometric-grid trapezoid per cutoff, bounded scalar search over the cutoff."""
    c = math.log(3 * B_tilde) + 0.5 * math.log(n_omega)

    def objective(e):
        beta = np.geomspace(max(e, 1e-14), B, n_quad)
        f = np.sqrt(n_omega * np.maximum(c + np.log(2 / beta), 0))
        return 4 * e + 12 / math.sqrt(m) * float(np.sum(0.5 * (f[1:] + f[:-1]) * np.diff(beta)))

    inner = minimize_scalar(objective, bounds=(0.0, B / 2), method="bounded", options={"xatol": 1e-10})
    return min(inner.fun, objective(B / 2), objective(0.0))


class TestClosedForm:
    def test_constant_class(self):
        v = cx.rademacher_sup_closed_form(np.zeros((0, 1)), 1.0, np.array([[0.4]]), [1.0])
        assert v == pytest.approx(0.5)

    def test_sign_symmetry(self):
        rng = np.random.default_rng(0)
        X = rng.uniform(0, 2 * np.pi, (30, 1))
        s = rng.choice([-1.0, 1.0], 30)
        w = [[1], [3]]
        assert cx.rademacher_sup_closed_form(w, 2.0, X, s) == cx.rademacher_sup_closed_form(w, 2.0, X, -s)

    def test_brute_force(self):
        rng = np.random.default_rng(1)
        w = np.array([[2.0]])
        X = rng.uniform(0, 2 * np.pi, (25, 1))
        pts, res = fibonacci_sphere(100_000)
        phi = feature_map(w, X)
        for _ in range(5):
            s = rng.choice([-1.0, 1.0], 25)
            brute = np.max(pts @ (s @ phi)) / 25
            exact = cx.rademacher_sup_closed_form(w, 1.0, X, s)
            assert brute <= exact + 1e-12
            assert exact - brute <= 2 * res * exact


class TestMonteCarlo:
    def test_constant_class_exact(self):
        e = cx.rademacher_mc(np.zeros((0, 1)), 1.6, np.array([[1.0]]), 500, seed=3)
        assert e.mean == pytest.approx(0.8)
        assert e.std_error == 0

    def test_seed_consistency(self):
        rng = np.random.default_rng(2)
        X = rng.uniform(0, 2 * np.pi, (40, 1))
        a = cx.rademacher_mc([[1], [2]], 1.0, X, 4000, seed=1)
        b = cx.rademacher_mc([[1], [2]], 1.0, X, 4000, seed=2)
        assert abs(a.mean - b.mean) <= 3 * math.hypot(a.std_error, b.std_error)

    def test_deterministic(self):
        X = np.linspace(0, 6, 17)[:, None]
        a = cx.rademacher_mc([[1]], 1.0, X, 3000, seed=5)
        b = cx.rademacher_mc([[1]], 1.0, X, 3000, seed=5)
        assert a == b

    def test_below_bounds(self):
        rng = np.random.default_rng(3)
        for _ in range(10):
            P = int(rng.integers(1, 10))
            m = int(rng.integers(5, 100))
            w = rng.integers(1, 8, size=(P, 1)).astype(float)
            X = rng.uniform(0, 2 * np.pi, (m, 1))
            e = cx.rademacher_mc(w, 1.0, X, 2000, seed=0)
            n = 2 * P + 1
            K = float(w.max())
            assert e.mean <= cx.rademacher_bound_min(K, 1.0, n, 1, m) + 3 * e.std_error


class TestAnalytic:
    def test_v1_value(self):
        expected = 2 * math.pi * math.sqrt(2 * math.log(2)) + math.pi
        assert cx.rademacher_bound_v1(1, 1, 1, 1, 1) == pytest.approx(expected, rel=1e-14)

    def test_v1_shape(self):
        base = cx.rademacher_bound_v1(3, 1.0, 4, 2, 10)
        assert cx.rademacher_bound_v1(3, 1.0, 4, 2, 40) == pytest.approx(base / 2)
        assert cx.rademacher_bound_v1(4, 1.0, 4, 2, 10) >= base
        assert cx.rademacher_bound_v1(3, 2.0, 4, 2, 10) >= base
        assert cx.rademacher_bound_v1(3, 1.0, 5, 2, 10) >= base

    def test_v2_value(self):
        expected = 1 + 2 * math.sqrt(3) * math.sqrt(2 * math.log(3))
        assert cx.rademacher_bound_v2(1, 3, 1) == pytest.approx(expected, rel=1e-14)
        assert cx.rademacher_bound_v2(2, 3, 1) == pytest.approx(2 * expected)
        assert cx.rademacher_bound_v2(1, 3, 4) == pytest.approx(expected / 2)

    def test_v2_needs_two_frequencies(self):
        with pytest.raises(ValidationError):
            cx.rademacher_bound_v2(1, 1, 10)

    def test_min(self):
        # v1 wins once log|Omega| outgrows the constant in front of v1
        v1 = cx.rademacher_bound_v1(1, 1.0, 100, 1, 10)
        v2 = cx.rademacher_bound_v2(1.0, 201, 10)
        assert v1 < v2
        assert cx.rademacher_bound_min(1, 1.0, 201, 1, 10) == v1
        d = 10**6
        v1 = cx.rademacher_bound_v1(40, 1.0, 1, d, 10)
        v2 = cx.rademacher_bound_v2(1.0, 3, 10)
        assert cx.rademacher_bound_min(40, 1.0, 3, d, 10) == v2 < v1

    def test_massart(self):
        assert cx.massart_bound(3.0, 1, 10) == 0
        m, n = 50, 7
        assert cx.massart_bound(math.sqrt(m), n, m) == pytest.approx(math.sqrt(2 * math.log(n)) / math.sqrt(m))
        assert cx.massart_bound(2.0, 5, 9) == pytest.approx(2 * cx.massart_bound(1.0, 5, 9))

    def test_pnorm(self):
        assert cx.rademacher_bound_pnorm(1.0, 4, 16, 2, log_factor=False) == pytest.approx(0.5)

    def test_monotone_in_m(self):
        vals = [cx.rademacher_bound_min(5, 1.0, 11, 1, m) for m in (10, 20, 40)]
        assert vals[0] >= vals[1] >= vals[2]


class TestCovering:
    def test_bound_values(self):
        b = cx.covering_number_bound(1.0, 1, 6.0)
        assert b.value == pytest.approx(1.0)
        b1 = cx.covering_number_bound(1.5, 5, 0.4)
        b2 = cx.covering_number_bound(1.5, 5, 0.2)
        assert b2.value / b1.value == pytest.approx(2**5)
        assert b1.log2_value == pytest.approx(5 * math.log2(6 * 1.5 * math.sqrt(5) / 0.4))
        assert b1.inner_ball_net == pytest.approx(b1.value / 2**5)

    def test_entropy_shape(self):
        for Bt in (0.5, 1, 4):
            for n in (3, 9, 27):
                for eps in (0.01, 0.1):
                    b = cx.covering_number_bound(Bt, n, eps)
                    ref = n * (math.log2(max(Bt, 2)) + math.log2(n) + math.log2(1 / eps))
                    assert b.log2_value / ref <= 3

    def test_constant_class_exhaustive(self):
        net = cx.construct_cover(np.zeros((0, 1)), 1.0, 0.25)
        # constants a0/2 with |a0| <= 1; check every point of a fine 1-d grid
        a0 = np.linspace(-1, 1, 20001)
        centres = net.coefficients[:, 0]
        dist = np.min(np.abs(a0[:, None] - centres[None, :]), axis=1) / 2
        assert dist.max() <= 0.25

    def test_sampled_radius(self):
        net = cx.construct_cover(np.array([[1.0]]), 1.0, 0.3)
        radius, dists = cx.verify_cover(net, 1000, seed=0)
        assert radius <= 0.3
        assert len(dists) == 1000

    def test_independent_distance_check(self):
        net = cx.construct_cover(np.array([[1.0]]), 1.0, 0.5)
        rng = np.random.default_rng(9)
        grid = nyquist_grid([1.0], 16)
        phi = feature_map(np.array([[1.0]]), grid)
        fn = net.coefficients @ phi.T
        for _ in range(200):
            c = rng.standard_normal(3)
            c *= rng.random() ** (1 / 3) / np.linalg.norm(c)
            f = phi @ c
            assert np.min(np.max(np.abs(fn - f), axis=1)) <= 0.5

    def test_single_member(self):
        net = cx.construct_cover(np.array([[1.0]]), 1.0, 2 * math.sqrt(3))
        assert len(net) == 1

    def test_cap(self):
        with pytest.raises(ResourceError):
            cx.construct_cover(np.array([[1.0], [2.0]]), 1.0, 0.01, cap=1000)


class TestDudley:
    def test_oracle(self):
        ours = cx.dudley_rademacher_bound(1.0, 1.0, 1, 1)
        assert ours == pytest.approx(dudley_oracle(1.0, 1.0, 1, 1), abs=1e-4)

    @pytest.mark.parametrize("args", [(1.0, 1.0, 7, 100), (2.0, 2.0, 21, 50), (0.5, 1.0, 3, 1000)])
    def test_oracle_general(self, args):
        assert cx.dudley_rademacher_bound(*args) == pytest.approx(dudley_oracle(*args), abs=1e-4)

    def test_min_not_above_zero_cutoff(self):
        r = cx.dudley_rademacher_bound(1.0, 1.0, 5, 30, detail=True)
        assert r.value <= r.integral_from_zero + 1e-12

    def test_integral_term_scaling(self):
        a = cx.dudley_rademacher_bound(1.0, 1.0, 5, 30, detail=True)
        b = cx.dudley_rademacher_bound(1.0, 1.0, 5, 120, detail=True)
        assert b.integral_from_zero == pytest.approx(a.integral_from_zero / 2)

    def test_monotone(self):
        assert cx.dudley_rademacher_bound(1, 1, 9, 50) >= cx.dudley_rademacher_bound(1, 1, 5, 50)
        assert cx.dudley_rademacher_bound(1, 2, 5, 50) >= cx.dudley_rademacher_bound(1, 1, 5, 50)

    def test_erf_diagnostic(self):
        assert math.isnan(cx.dudley_erf_diagnostic(1.0, 2.0, 5, 10))

    def test_ball_sup(self):
        assert cx.ball_sup_bound(2.0, 1) == pytest.approx(1.0)
