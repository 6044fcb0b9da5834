"""Risks, norm-constrained regression and structural risk minimization."""

from __future__ import annotations

import csv
import io
import math
from dataclasses import dataclass, field
from pathlib import Path
from typing import Callable, Optional, Sequence

import numpy as np
from scipy.optimize import brentq

from . import complexity, genbounds
from .encoding import EncodingStrategy, omega_total
from .errors import GTPBoundsError, NumericError, ValidationError
from .genbounds import LossSpec
from .gtp import GTPModel, _as_omega_plus, evaluate, feature_map, frequency_reach

TWO_PI = 2.0 * np.pi
NORM_TOL = 1e-8


@dataclass(frozen=True, eq=False)
class DataSet:
    """Labelled points x in [0, 2pi)^d with real targets y."""

    X: np.ndarray
    y: np.ndarray

    def __post_init__(self):
        X = np.asarray(self.X, dtype=float)
        if X.ndim == 1:
            X = X[:, None]
        y = np.asarray(self.y, dtype=float).reshape(-1)
        if X.shape[0] != y.shape[0]:
            raise ValidationError(f"{X.shape[0]} points but {y.shape[0]} labels")
        if not (np.all(np.isfinite(X)) and np.all(np.isfinite(y))):
            raise ValidationError("data contains non-finite values")
        if X.size and (X.min() < 0 or X.max() >= TWO_PI + 1e-12):
            raise ValidationError("points must lie in [0, 2pi)^d")
        X.setflags(write=False)
        y.setflags(write=False)
        object.__setattr__(self, "X", X)
        object.__setattr__(self, "y", y)

    @property
    def d(self) -> int:
        return self.X.shape[1]

    def __len__(self):
        return self.X.shape[0]

    def to_csv(self, path=None) -> str:
        buf = io.StringIO()
        w = csv.writer(buf, lineterminator="\n")
        w.writerow([f"x{i + 1}" for i in range(self.d)] + ["y"])
        for xi, yi in zip(self.X, self.y):
            w.writerow([repr(float(v)) for v in xi] + [repr(float(yi))])
        text = buf.getvalue()
        if path is not None:
            Path(path).write_text(text)
        return text

    @classmethod
    def from_csv(cls, path_or_text) -> "DataSet":
        p = Path(path_or_text) if not str(path_or_text).lstrip().startswith("x1") else None
        text = p.read_text() if p is not None else str(path_or_text)
        rows = list(csv.reader(io.StringIO(text)))
        if not rows:
            raise ValidationError("empty CSV")
        header = [h.strip() for h in rows[0]]
        d = len(header) - 1
        if d < 1 or header != [f"x{i + 1}" for i in range(d)] + ["y"]:
            raise ValidationError(f"CSV header must be x1,...,xd,y; got {header}")
        try:
            data = np.array([[float(v) for v in r] for r in rows[1:] if r], dtype=float).reshape(-1, d + 1)
        except ValueError as exc:
            raise ValidationError(f"malformed CSV value: {exc}") from None
        return cls(data[:, :d], data[:, d])


def _require_nonempty(S: DataSet):
    if len(S) == 0:
        raise ValidationError("data set is empty")


def empirical_risk(model: GTPModel, S: DataSet, loss: LossSpec) -> float:
    _require_nonempty(S)
    return float(np.mean(loss(S.y, evaluate(model, S.X))))


# samplers return (X, y) for a generator and a count


@dataclass(frozen=True)
class UniformSampler:
    """Fresh draws x ~ U[0, 2pi)^d with y = target(x) + N(0, sigma^2)."""

    target: Callable
    d: int = 1
    noise_sigma: float = 0.0

    def __call__(self, rng, n):
        X = rng.uniform(0.0, TWO_PI, size=(n, self.d))
        y = np.asarray(self.target(X), dtype=float).reshape(-1)
        if self.noise_sigma > 0:
            y = y + rng.normal(0.0, self.noise_sigma, size=n)
        return X, y


@dataclass(frozen=True)
class TrainingSampler:
    """Replays the training set in order, cycling when n exceeds its size."""

    S: DataSet

    def __call__(self, rng, n):
        idx = np.arange(n) % len(self.S)
        return self.S.X[idx], self.S.y[idx]


def estimate_true_risk(model: GTPModel, sampler, n_eval: int, seed, loss: LossSpec):
    """Monte Carlo risk estimate; returns (mean, standard error)."""
    if n_eval < 2:
        raise ValidationError("n_eval must be >= 2")
    rng = np.random.default_rng(seed)
    X, y = sampler(rng, n_eval)
    vals = loss(y, evaluate(model, X))
    return float(np.mean(vals)), float(np.std(vals, ddof=1) / math.sqrt(n_eval))


def generalization_gap(model: GTPModel, S: DataSet, sampler, n_eval: int, seed, loss: LossSpec) -> float:
    mean, _ = estimate_true_risk(model, sampler, n_eval, seed, loss)
    return mean - empirical_risk(model, S, loss)


def _ridge_coeffs(U, s, Vt, y, lam):
    return Vt.T @ ((s / (s * s + lam)) * (U.T @ y))


def fit_gtp(omega_plus, B_tilde: float, S: DataSet, loss_for_reporting: Optional[LossSpec] = None,
            rcond: float = 1e-12) -> GTPModel:
    """Least-squares GTP fit inside the coefficient ball of radius B_tilde.

    The minimum-norm least-squares solution comes from a thin SVD of the
    feature matrix. If it lies outside the ball, the ridge multiplier is
    found by root-finding so that the solution sits on the sphere.
    """
    _require_nonempty(S)
    w = _as_omega_plus(omega_plus, S.d)
    if w.shape[0] and w.shape[1] != S.d:
        raise ValidationError(f"frequencies have dimension {w.shape[1]}, data has {S.d}")
    if B_tilde <= 0:
        raise ValidationError("B_tilde must be positive")
    Phi = feature_map(w, S.X)
    U, s, Vt = np.linalg.svd(Phi, full_matrices=False)
    if not np.all(np.isfinite(s)):
        raise NumericError("SVD of the feature matrix failed")
    keep = s > rcond * s[0]
    U, s, Vt = U[:, keep], s[keep], Vt[keep]
    proj = U.T @ S.y
    coeffs = Vt.T @ (proj / s)
    n0 = np.linalg.norm(coeffs)
    if n0 > B_tilde * (1 + 1e-12):
        hi = s[0] * np.linalg.norm(proj) / B_tilde

        def gap(lam):
            return np.linalg.norm(_ridge_coeffs(U, s, Vt, S.y, lam)) - B_tilde

        lam = brentq(gap, 0.0, hi, xtol=1e-300, rtol=4 * np.finfo(float).eps, maxiter=500)
        coeffs = _ridge_coeffs(U, s, Vt, S.y, lam)
        n1 = np.linalg.norm(coeffs)
        if abs(n1 - B_tilde) > NORM_TOL * max(1.0, B_tilde):
            raise NumericError(f"ridge path missed the norm target by {n1 - B_tilde:.3e}", residual=n1 - B_tilde)
        if n1 > B_tilde:
            coeffs = coeffs * (B_tilde / n1)
    return GTPModel.from_coefficients(w, coeffs, B_tilde)


def least_squares_residual(model: GTPModel, S: DataSet) -> float:
    """Mean squared residual, the objective :func:`fit_gtp` minimizes."""
    r = evaluate(model, S.X) - S.y
    return float(np.mean(r * r))


def synth_data(target, noise_sigma: float, m: int, seed, x_distribution: str = "uniform", d: Optional[int] = None) -> DataSet:
    """Samples y = target(x) + noise.

    ``grid`` places m = g^d points on the equispaced grid with g points per
    axis, so noiseless data is exactly determined once g >= 2K + 1.
    """
    if m < 1:
        raise ValidationError("m must be >= 1")
    if noise_sigma < 0:
        raise ValidationError("noise_sigma must be nonnegative")
    d = d if d is not None else target.d
    rng = np.random.default_rng(seed)
    if x_distribution == "uniform":
        X = rng.uniform(0.0, TWO_PI, size=(m, d))
    elif x_distribution == "grid":
        g = round(m ** (1.0 / d))
        if g**d != m:
            raise ValidationError(f"grid sampling needs m to be a perfect {d}-th power, got {m}")
        axes = np.arange(g) * (TWO_PI / g)
        X = np.stack([a.ravel() for a in np.meshgrid(*([axes] * d), indexing="ij")], axis=1)
    else:
        raise ValidationError(f"unknown x_distribution {x_distribution!r}")
    y = np.asarray(target(X), dtype=float).reshape(-1)
    if noise_sigma > 0:
        y = y + rng.normal(0.0, noise_sigma, size=m)
    return DataSet(X, y)


# structural risk minimization


@dataclass(frozen=True)
class Candidate:
    k: object
    omega_plus: np.ndarray
    B_tilde: float

    @property
    def n_omega(self) -> int:
        return 2 * _as_omega_plus(self.omega_plus).shape[0] + 1

    @property
    def K(self) -> float:
        return frequency_reach(self.omega_plus)


@dataclass
class SRMRow:
    k: object
    empirical_risk: float
    bound_value: float
    total: float
    n_omega: int
    failed: bool = False
    error: str = ""


@dataclass
class SRMResult:
    rows: list
    k_opt: object
    model: Optional[GTPModel]
    delta: float
    m: int
    extras: dict = field(default_factory=dict)

    @property
    def selected(self) -> SRMRow:
        return next(r for r in self.rows if r.k == self.k_opt and not r.failed)

    def to_dict(self) -> dict:
        return {
            "k_opt": _plain(self.k_opt),
            "delta": self.delta,
            "m": self.m,
            "rows": [
                {**r.__dict__, "k": _plain(r.k)} for r in self.rows
            ],
            "model": self.model.to_dict() if self.model is not None else None,
            **self.extras,
        }

    def to_csv(self) -> str:
        buf = io.StringIO()
        w = csv.writer(buf, lineterminator="\n")
        w.writerow(["k", "empirical_risk", "bound_value", "total", "n_omega", "failed", "error", "selected"])
        for r in self.rows:
            w.writerow([_plain(r.k), r.empirical_risk, r.bound_value, r.total, r.n_omega, r.failed, r.error,
                        (r.k == self.k_opt) and not r.failed])
        return buf.getvalue()


def _plain(k):
    return list(k) if isinstance(k, tuple) else k


def _as_candidate(c) -> Candidate:
    return c if isinstance(c, Candidate) else Candidate(c[0], _as_omega_plus(c[1]), float(c[2]))


def candidate_bound(cand: Candidate, m: int, delta: float, loss: LossSpec, route: str = "rademacher", d: int = 1) -> float:
    """g(k, m, delta) for one candidate class.

    The covering route needs a sup-norm bound B. A fitted model only lives
    in the B_tilde ball, and Cauchy-Schwarz against the feature vector gives
    |f| <= B_tilde * sqrt(|Omega_+| + 1/4), which is used as B.
    """
    B = complexity.ball_sup_bound(cand.B_tilde, cand.n_omega)
    params = dict(K=cand.K, B=B, B_tilde=cand.B_tilde, n_omega=cand.n_omega, d=d, loss=loss)
    return genbounds.route_bound(route, params, m, delta)


def _select(rows, fits):
    ok = [r for r in rows if not r.failed]
    if not ok:
        return None, None
    best = min(r.total for r in ok)
    row = next(r for r in ok if r.total == best)
    return row.k, fits[id(row)]


def srm_select(candidates, S: DataSet, delta: float, loss: LossSpec, bound_route: str = "rademacher",
               g: Optional[Callable] = None) -> SRMResult:
    """Fit every candidate class and pick argmin of risk plus bound.

    ``g(candidate, m, delta)`` overrides the bound evaluation. Ties go to the
    earliest candidate, so pass candidates ordered by increasing k.
    """
    cands = [_as_candidate(c) for c in candidates]
    if not cands:
        raise ValidationError("need at least one candidate")
    _require_nonempty(S)
    m = len(S)
    rows, fits = [], {}
    for cand in cands:
        try:
            model = fit_gtp(cand.omega_plus, cand.B_tilde, S, loss)
            risk = empirical_risk(model, S, loss)
            bound = g(cand, m, delta) if g is not None else candidate_bound(cand, m, delta, loss, bound_route, S.d)
            row = SRMRow(cand.k, risk, float(bound), risk + float(bound), cand.n_omega)
            fits[id(row)] = model
        except GTPBoundsError as exc:
            row = SRMRow(cand.k, math.nan, math.nan, math.nan, cand.n_omega, failed=True, error=str(exc))
        rows.append(row)
    k_opt, model = _select(rows, fits)
    if k_opt is None:
        raise GTPBoundsError("every SRM candidate failed: " + "; ".join(r.error for r in rows))
    return SRMResult(rows, k_opt, model, delta, m)


def srm_multi(candidates, g1: Callable, g2: Callable, S: DataSet, delta: float, loss: LossSpec) -> SRMResult:
    """SRM over two bound families combined by a union bound.

    Each g_i(candidate, m, delta') is evaluated at delta/2 and the smaller
    value is used as the candidate's bound.
    """
    half = delta / 2.0

    def combined(cand, m, _delta):
        return min(g1(cand, m, half), g2(cand, m, half))

    res = srm_select(candidates, S, delta, loss, g=combined)
    res.extras["combined_at"] = half
    return res


def pauli_candidates(k_values: Sequence[int], B_tilde: float, label: str = "Z") -> list:
    """Nested 1-d classes: k Pauli encodings give positive frequencies {2, 4, ..., 2k}."""
    out = []
    for k in k_values:
        fs = omega_total(EncodingStrategy.pauli([k], label))
        out.append(Candidate(int(k), fs.omega_plus, float(B_tilde)))
    return out
