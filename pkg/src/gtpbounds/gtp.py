"""Generalized trigonometric polynomials with a coefficient-norm budget.

A model is

    f(x) = a0/2 + sum_{w in Omega_+} (a_w cos(w.x) + b_w sin(w.x))

with ||(a0, a, b)||_2 <= B_tilde. Coefficients are stacked as
``(a0, a_1..a_P, b_1..b_P)`` to match :func:`feature_map`.
"""

from __future__ import annotations

import json
from dataclasses import dataclass
from typing import Mapping

import numpy as np

from .errors import CapabilityError, ValidationError

NORM_SLACK = 1e-9


def _as_omega_plus(omega_plus, d=None) -> np.ndarray:
    w = np.asarray(omega_plus, dtype=float)
    if w.size == 0:
        if d is None:
            d = w.shape[1] if w.ndim == 2 and w.shape[1] > 0 else 1
        return np.zeros((0, d))
    if w.ndim == 1:
        w = w[:, None]
    return w


def feature_map(omega_plus, x) -> np.ndarray:
    """Features (1/2, cos(w.x)..., sin(w.x)...) for one point or a batch.

    ``x`` of shape (d,) gives a vector, (m, d) gives an (m, 2P+1) matrix.
    """
    w = _as_omega_plus(omega_plus)
    xa = np.asarray(x, dtype=float)
    single = xa.ndim <= 1
    xa = xa.reshape(1, -1) if single else xa
    if w.shape[0] and xa.shape[1] != w.shape[1]:
        raise ValidationError(f"x has dimension {xa.shape[1]}, frequencies have {w.shape[1]}")
    phase = xa @ w.T
    out = np.hstack([np.full((xa.shape[0], 1), 0.5), np.cos(phase), np.sin(phase)])
    return out[0] if single else out


@dataclass(frozen=True, eq=False)
class GTPModel:
    omega_plus: np.ndarray
    a0: float
    a: np.ndarray
    b: np.ndarray
    B_tilde: float

    def __post_init__(self):
        w = _as_omega_plus(self.omega_plus)
        a = np.asarray(self.a, dtype=float).reshape(-1)
        b = np.asarray(self.b, dtype=float).reshape(-1)
        if not (len(a) == len(b) == w.shape[0]):
            raise ValidationError("a, b and omega_plus must have the same length")
        if self.B_tilde <= 0:
            raise ValidationError("B_tilde must be positive")
        for arr in (w, a, b):
            arr.setflags(write=False)
        object.__setattr__(self, "omega_plus", w)
        object.__setattr__(self, "a", a)
        object.__setattr__(self, "b", b)
        object.__setattr__(self, "a0", float(self.a0))
        object.__setattr__(self, "B_tilde", float(self.B_tilde))
        n = np.linalg.norm(self.coefficients)
        if n > self.B_tilde * (1 + NORM_SLACK) + NORM_SLACK:
            raise ValidationError(f"coefficient norm {n:.6g} exceeds B_tilde {self.B_tilde:.6g}")

    @classmethod
    def from_coefficients(cls, omega_plus, coeffs, B_tilde, project=False) -> "GTPModel":
        w = _as_omega_plus(omega_plus)
        c = np.asarray(coeffs, dtype=float)
        if c.shape != (2 * w.shape[0] + 1,):
            raise ValidationError(f"expected {2 * w.shape[0] + 1} coefficients, got {c.shape}")
        if project:
            c = project_to_ball(c, B_tilde)
        P = w.shape[0]
        return cls(w, c[0], c[1 : P + 1], c[P + 1 :], B_tilde)

    @property
    def d(self) -> int:
        return self.omega_plus.shape[1]

    @property
    def coefficients(self) -> np.ndarray:
        return np.concatenate([[self.a0], self.a, self.b])

    def __call__(self, x):
        return evaluate(self, x)

    def to_dict(self) -> dict:
        w = self.omega_plus
        wl = w.astype(int).tolist() if np.all(w == np.rint(w)) else w.tolist()
        return {
            "d": self.d,
            "omega_plus": wl,
            "a0": self.a0,
            "a": self.a.tolist(),
            "b": self.b.tolist(),
            "B_tilde": self.B_tilde,
        }

    def to_json(self) -> str:
        return json.dumps(self.to_dict())

    @classmethod
    def from_dict(cls, obj: Mapping) -> "GTPModel":
        d = int(obj["d"])
        w = np.asarray(obj["omega_plus"], dtype=float).reshape(-1, d)
        return cls(w, obj["a0"], obj["a"], obj["b"], obj["B_tilde"])

    @classmethod
    def from_json(cls, text: str) -> "GTPModel":
        return cls.from_dict(json.loads(text))


def evaluate(model: GTPModel, x):
    """Model value at one point (scalar) or at a batch of points (vector)."""
    phi = feature_map(model.omega_plus, x)
    return phi @ model.coefficients


def to_real_coefficients(c: Mapping, omega_plus, sym_tol: float = 1e-8):
    """Complex coefficients {w: c_w} to (a0, a, b) on ``omega_plus``.

    Uses a_w = c_w + c_{-w} and b_w = (c_w - c_{-w}) / i. Missing keys count
    as zero.
    """
    w = _as_omega_plus(omega_plus)
    d = w.shape[1]
    table = {tuple(float(v) for v in np.atleast_1d(k)): complex(v) for k, v in c.items()}

    def get(vec):
        return table.get(tuple(float(v) for v in vec), 0j)

    zero = (0.0,) * d
    c0 = table.get(zero, 0j)
    if abs(c0.imag) > sym_tol:
        raise ValidationError(f"c_0 must be real, imaginary part {c0.imag:.3e}")
    for key, val in table.items():
        mirror = table.get(tuple(-v + 0.0 for v in key), 0j)
        if abs(val - mirror.conjugate()) > sym_tol:
            raise ValidationError(f"Hermitian symmetry violated at {key}")
    a = np.empty(w.shape[0])
    b = np.empty(w.shape[0])
    for j, vec in enumerate(w):
        cp, cm = get(vec), get(-vec + 0.0)
        a[j] = (cp + cm).real
        b[j] = ((cp - cm) / 1j).real
    return 2.0 * c0.real, a, b


def to_complex_coefficients(model: GTPModel) -> dict:
    """Inverse of :func:`to_real_coefficients`: c_0 = a0/2, c_{+-w} = (a +- i b)/2."""
    d = model.d
    out = {(0.0,) * d: complex(model.a0 / 2.0)}
    for vec, a, b in zip(model.omega_plus, model.a, model.b):
        out[tuple(float(v) for v in vec)] = complex(a, b) / 2.0
        out[tuple(-float(v) + 0.0 for v in vec)] = complex(a, -b) / 2.0
    return out


def evaluate_complex(coeffs: Mapping, x) -> np.ndarray:
    """sum_w c_w exp(-i w.x), real part kept; x of shape (m, d) or (d,)."""
    xa = np.atleast_2d(np.asarray(x, dtype=float))
    keys = np.array([np.atleast_1d(k) for k in coeffs.keys()], dtype=float)
    vals = np.array(list(coeffs.values()), dtype=complex)
    return (np.exp(-1j * xa @ keys.T) @ vals).real


def coefficient_norm(model_or_coeffs, p: float = 2) -> float:
    c = model_or_coeffs.coefficients if isinstance(model_or_coeffs, GTPModel) else np.asarray(model_or_coeffs, float)
    if not (p >= 1):
        raise ValidationError("p must lie in [1, inf]")
    if c.size == 0:
        return 0.0
    return float(np.linalg.norm(c, ord=np.inf if np.isinf(p) else p))


def project_to_ball(coeffs, B_tilde: float, p: float = 2) -> np.ndarray:
    if p != 2:
        raise CapabilityError("only p = 2 projection is supported")
    if B_tilde <= 0:
        raise ValidationError("B_tilde must be positive")
    c = np.asarray(coeffs, dtype=float)
    n = np.linalg.norm(c)
    if n <= B_tilde:
        return c.copy()
    return c * (B_tilde / n)


@dataclass(frozen=True)
class BTilde:
    value: float
    conjectural: float
    conjectural_requires: str = "coefficient sup-norm inclusion (unproven for non-integer spectra)"


def btilde_for_integer_spectrum(B: float, n_omega: int = None) -> BTilde:
    """Coefficient budget 2B valid for integer spectra.

    The second field is the conditional budget 2*sqrt(|Omega|)*B that would
    hold for general spectra if every coefficient were bounded by B.
    """
    if B <= 0:
        raise ValidationError("B must be positive")
    conj = 2.0 * np.sqrt(n_omega) * B if n_omega is not None else float("nan")
    return BTilde(2.0 * B, float(conj))


def random_model(omega_plus, B_tilde: float, seed, mode: str = "ball") -> GTPModel:
    """Coefficients uniform on the B_tilde sphere or in the B_tilde ball."""
    w = _as_omega_plus(omega_plus)
    rng = np.random.default_rng(seed)
    dim = 2 * w.shape[0] + 1
    g = rng.standard_normal(dim)
    g /= np.linalg.norm(g)
    if mode == "sphere":
        r = B_tilde
    elif mode == "ball":
        r = B_tilde * rng.random() ** (1.0 / dim)
    else:
        raise ValidationError(f"unknown mode {mode!r}")
    return GTPModel.from_coefficients(w, g * r, B_tilde, project=True)


def random_ball_coefficients(n: int, dim: int, B_tilde: float, rng) -> np.ndarray:
    g = rng.standard_normal((n, dim))
    g /= np.linalg.norm(g, axis=1, keepdims=True)
    r = B_tilde * rng.random(n) ** (1.0 / dim)
    return g * r[:, None]


def frequency_reach(omega_plus) -> float:
    """K = sum_i max_w |w_i| over the positive half-set (0 when empty)."""
    w = _as_omega_plus(omega_plus)
    return float(np.sum(np.max(np.abs(w), axis=0))) if w.shape[0] else 0.0


def nyquist_grid(K_per_coordinate, oversample: int = 4):
    """Equispaced grid on [0, 2pi)^d with at least oversample*K_i + 1 points per axis."""
    axes = [
        np.arange(n) * (2 * np.pi / n)
        for n in (int(oversample * int(np.ceil(k))) + 1 for k in K_per_coordinate)
    ]
    mesh = np.meshgrid(*axes, indexing="ij")
    return np.stack([m.ravel() for m in mesh], axis=1)


def grid_sup_norm(model: GTPModel, oversample: int = 4) -> float:
    K = np.max(np.abs(model.omega_plus), axis=0) if model.omega_plus.shape[0] else np.zeros(model.d)
    x = nyquist_grid(K, oversample)
    return float(np.max(np.abs(evaluate(model, x))))
