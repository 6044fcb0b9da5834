"""Rademacher complexity and covering numbers of the GTP norm-ball class.

The class supremum has a closed form: for coefficients in the 2-norm ball of
radius B_tilde,

    sup_f (1/m) sum_i s_i f(x_i) = (B_tilde/m) * || sum_i s_i phi(x_i) ||_2

by Cauchy-Schwarz, where phi is the feature map. Monte Carlo estimates
average this over Rademacher signs; the analytic bounds come with their
explicit constants.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from math import log, pi, sqrt

import numpy as np
from scipy import integrate, special

from .errors import NumericError, ResourceError, ValidationError
from .gtp import GTPModel, _as_omega_plus, feature_map, nyquist_grid, random_ball_coefficients

MC_BLOCK = 1024
DEFAULT_COVER_CAP = 10**6


@dataclass(frozen=True)
class RademacherEstimate:
    mean: float
    std_error: float
    n_sigma_samples: int
    seed: int


def rademacher_sup_closed_form(omega_plus, B_tilde, X, sigma) -> float:
    """Exact sup over the ball of (1/m) sum_i sigma_i f(x_i)."""
    X = np.asarray(X, dtype=float)
    sigma = np.asarray(sigma, dtype=float)
    if X.ndim == 1:
        X = X[:, None]
    if sigma.shape != (X.shape[0],) or X.shape[0] < 1:
        raise ValidationError("sigma and X must have the same nonzero length")
    phi = feature_map(omega_plus, X)
    return float(B_tilde * np.linalg.norm(sigma @ phi) / X.shape[0])


def _sigma_block(seed: int, block: int, size: int, m: int) -> np.ndarray:
    # one independent stream per (seed, block) keeps results schedule-free
    rng = np.random.default_rng([int(seed), int(block)])
    return rng.integers(0, 2, size=(size, m), dtype=np.int8) * 2.0 - 1.0


def rademacher_mc(omega_plus, B_tilde, X, n_samples: int, seed: int = 0) -> RademacherEstimate:
    if n_samples < 1:
        raise ValidationError("n_samples must be >= 1")
    X = np.asarray(X, dtype=float)
    if X.ndim == 1:
        X = X[:, None]
    m = X.shape[0]
    phi = feature_map(omega_plus, X)
    vals = np.empty(n_samples)
    for blk, start in enumerate(range(0, n_samples, MC_BLOCK)):
        size = min(MC_BLOCK, n_samples - start)
        sig = _sigma_block(seed, blk, size, m)
        vals[start : start + size] = B_tilde * np.linalg.norm(sig @ phi, axis=1) / m
    se = float(np.std(vals, ddof=1) / sqrt(n_samples)) if n_samples > 1 else 0.0
    return RademacherEstimate(float(np.mean(vals)), se, n_samples, seed)


def rademacher_bound_v1(K, B_tilde, n_omega_plus, d, m) -> float:
    """Sine-network embedding bound with its explicit constants."""
    if d < 1 or m < 1:
        raise ValidationError("d and m must be >= 1")
    w1 = max(K, B_tilde * sqrt(n_omega_plus))
    return (2 * pi * w1 * sqrt(2 * log(2 * d)) + max(pi, B_tilde)) / sqrt(m)


def rademacher_bound_v2(B_tilde, n_omega, m) -> float:
    """Monomial-dictionary bound (Massart step); needs |Omega| >= 2."""
    if n_omega < 2:
        raise ValidationError("v2 bound needs |Omega| >= 2 (log |Omega| > 0)")
    return B_tilde / sqrt(m) + 2 * B_tilde * sqrt(n_omega) * sqrt(2 * log(n_omega)) / sqrt(m)


def rademacher_bound_min(K, B_tilde, n_omega, d, m) -> float:
    v1 = rademacher_bound_v1(K, B_tilde, (n_omega - 1) / 2, d, m)
    if n_omega < 2:
        return v1
    return min(v1, rademacher_bound_v2(B_tilde, n_omega, m))


def rademacher_bound_pnorm(B_tilde, n_omega, m, p, log_factor=True) -> float:
    """Reporting-only bound B_tilde |Omega|^(1/q) / sqrt(m) for a p-norm budget.

    ``log_factor`` multiplies by sqrt(2 log |Omega|), the factor the O-tilde hides.
    """
    if p < 1:
        raise ValidationError("p must be >= 1")
    inv_q = 1.0 - 1.0 / p if np.isfinite(p) else 1.0
    val = B_tilde * n_omega**inv_q / sqrt(m)
    if log_factor and n_omega >= 2:
        val *= sqrt(2 * log(n_omega))
    return val


def massart_bound(r, set_size, N) -> float:
    if r < 0 or set_size < 1 or N < 1:
        raise ValidationError("need r >= 0, set_size >= 1, N >= 1")
    return r * sqrt(2 * log(set_size)) / N


@dataclass(frozen=True)
class CoveringBound:
    value: float
    log2_value: float
    inner_ball_net: float
    log2_inner_ball_net: float


def covering_number_bound(B_tilde, n_omega, epsilon) -> CoveringBound:
    """Volumetric sup-norm covering bound (6 B_tilde sqrt|Omega| / eps)^|Omega|.

    ``inner_ball_net`` is the size of the coefficient-ball net at radius
    eps/sqrt|Omega|, i.e. (3 B_tilde sqrt|Omega| / eps)^|Omega|.
    """
    if epsilon <= 0:
        raise ValidationError("epsilon must be positive")
    base = 6 * B_tilde * sqrt(n_omega) / epsilon
    inner = 3 * B_tilde * sqrt(n_omega) / epsilon
    lg, lgi = n_omega * np.log2(base), n_omega * np.log2(inner)
    return CoveringBound(float(2.0**lg) if lg < 1000 else float("inf"), float(lg),
                         float(2.0**lgi) if lgi < 1000 else float("inf"), float(lgi))


@dataclass(frozen=True, eq=False)
class CoverNet:
    omega_plus: np.ndarray
    coefficients: np.ndarray
    B_tilde: float
    epsilon: float
    coefficient_radius: float
    norm: str = "sup_grid"
    members: list = field(default_factory=list, repr=False)

    def __len__(self):
        return self.coefficients.shape[0]

    def model(self, i) -> GTPModel:
        return GTPModel.from_coefficients(self.omega_plus, self.coefficients[i], self.B_tilde, project=True)


def construct_cover(omega_plus, B_tilde, epsilon, cap: int = DEFAULT_COVER_CAP, materialize=False) -> CoverNet:
    """Grid net of the coefficient ball lifted to a sup-norm net of the class.

    The coefficient radius is eps/sqrt(n) with n = |Omega| = 2|Omega_+|+1.
    A centred cubic grid with spacing 2 r/sqrt(n) covers every point of the
    cube within r; grid points farther than B_tilde + r from the origin are
    dropped and the rest projected onto the ball (a nonexpansive map, so
    coverage of the ball is kept).
    """
    w = _as_omega_plus(omega_plus)
    n = 2 * w.shape[0] + 1
    if epsilon <= 0 or B_tilde <= 0:
        raise ValidationError("epsilon and B_tilde must be positive")
    r = epsilon / sqrt(n)
    if r >= B_tilde:
        coeffs = np.zeros((1, n))
    else:
        h = 2 * r / sqrt(n)
        half = int(np.ceil(B_tilde / h - 0.5))
        per_axis = 2 * half + 1
        required = per_axis**n
        if required > cap:
            raise ResourceError(
                f"cover grid needs {required} points, cap is {cap}", required=required, cap=cap
            )
        axis = np.arange(-half, half + 1) * h
        mesh = np.meshgrid(*([axis] * n), indexing="ij")
        pts = np.stack([mm.ravel() for mm in mesh], axis=1)
        norms = np.linalg.norm(pts, axis=1)
        pts = pts[norms <= B_tilde + r]
        norms = norms[norms <= B_tilde + r]
        scale = np.where(norms > B_tilde, B_tilde / np.maximum(norms, 1e-300), 1.0)
        coeffs = pts * scale[:, None]
    coeffs.setflags(write=False)
    net = CoverNet(w, coeffs, float(B_tilde), float(epsilon), float(r))
    if materialize:
        net.members.extend(net.model(i) for i in range(len(net)))
    return net


def verify_cover(net: CoverNet, n_samples: int = 1000, seed: int = 0, oversample: int = 4):
    """Largest sup-grid distance from sampled class members to the net.

    Returns ``(max_radius, distances)``; sup norms are taken on an equispaced
    grid with oversample*K_i+1 points per axis.
    """
    w = net.omega_plus
    rng = np.random.default_rng(seed)
    dim = net.coefficients.shape[1]
    samples = random_ball_coefficients(n_samples, dim, net.B_tilde, rng)
    K = np.max(np.abs(w), axis=0) if w.shape[0] else np.zeros(w.shape[1])
    grid = nyquist_grid(K, oversample)
    phi = feature_map(w, grid)
    fs = samples @ phi.T
    fn = net.coefficients @ phi.T
    dists = np.empty(n_samples)
    step = max(1, 4_000_000 // max(1, fn.size))
    for s in range(0, n_samples, step):
        blk = fs[s : s + step]
        dists[s : s + step] = np.min(np.max(np.abs(blk[:, None, :] - fn[None, :, :]), axis=2), axis=1)
    return float(dists.max()), dists


def ball_sup_bound(B_tilde, n_omega) -> float:
    """Largest sup norm in the coefficient ball: B_tilde * ||phi||_2 = B_tilde sqrt(|Omega_+| + 1/4)."""
    return float(B_tilde * sqrt((n_omega - 1) / 2 + 0.25))


def _dudley_integrand(beta, n_omega, log_const):
    if beta <= 0:
        return np.inf
    val = log_const + log(2.0 / beta)
    return sqrt(n_omega * max(val, 0.0))


def _segment_integral(a, b, n_omega, log_const, epsrel):
    if b <= a:
        return 0.0
    # the log singularity sits at 0; quad handles it with an endpoint hint
    val, err = integrate.quad(
        _dudley_integrand, a, b, args=(n_omega, log_const), epsrel=epsrel, epsabs=0.0, limit=200
    )
    if not np.isfinite(val) or err > max(epsrel * abs(val), 1e-12) * 10:
        raise NumericError(f"Dudley quadrature did not converge (estimate {val}, error {err})", err)
    return val


@dataclass(frozen=True)
class DudleyResult:
    value: float
    cutoff: float
    integral_from_zero: float


def dudley_rademacher_bound(B, B_tilde, n_omega, m, n_grid: int = 64, epsrel: float = 1e-8,
                            detail: bool = False):
    """Chaining bound min_e 4e + (12/sqrt m) int_e^B sqrt(log N(beta)) dbeta.

    log N(beta) = |Omega| (log(3 B_tilde) + log(|Omega|)/2 + log(2/beta)),
    clipped at 0 because a covering number is at least 1. The cutoff is
    searched over an equispaced grid on [0, B/2] together with the
    stationary point of the (convex) objective.
    """
    if B <= 0 or B_tilde <= 0 or n_omega < 1 or m < 1:
        raise ValidationError("need B, B_tilde > 0, n_omega >= 1, m >= 1")
    log_const = log(3 * B_tilde) + 0.5 * log(n_omega)
    pref = 12.0 / sqrt(m)
    # the infimum over [0, B/2) is attained in the limit e -> B/2 when the
    # objective is still decreasing there, so the endpoint is a valid candidate
    grid = list(np.linspace(0.0, B / 2, n_grid + 1))

    # stationary point: integrand(e) = sqrt(m)/3, i.e. log(2/e) = m/(9|Omega|) - log_const
    log_star = log(2.0) + log_const - m / (9.0 * n_omega)
    if log_star > -700 and np.exp(log_star) < B / 2:
        grid.append(float(np.exp(log_star)))
    cuts = np.array(sorted(set(grid)))
    pts = np.concatenate([cuts, [B]])
    segs = [_segment_integral(pts[i], pts[i + 1], n_omega, log_const, epsrel) for i in range(len(cuts))]
    tail = np.cumsum(segs[::-1])[::-1]  # tail[i] = int_{cuts[i]}^B
    obj = 4 * cuts + pref * tail
    i = int(np.argmin(obj))
    if detail:
        return DudleyResult(float(obj[i]), float(cuts[i]), float(pref * tail[0]))
    return float(obj[i])


def dudley_erf_diagnostic(B, B_tilde, n_omega, m) -> float:
    """erf closed form of the chaining integral; NaN where it is undefined.

    The expression takes sqrt(log(1/B_tilde)), so it is only real for
    B_tilde <= 1. Diagnostic only.
    """
    if B_tilde > 1:
        return float("nan")
    s = sqrt(log(1.0 / B_tilde))
    inner = B * sqrt(log(3 * B_tilde) + 0.5 * log(n_omega)) if log(3 * B_tilde) + 0.5 * log(n_omega) >= 0 else float("nan")
    return float(12 / sqrt(m) * sqrt(n_omega) * (inner + B * s - sqrt(pi) / 2 * special.erf(s)))
