"""Statevector simulation of data re-uploading circuits.

Circuits are lists of layers acting on an ``n_qubits`` register (qubit 0 is
the most significant bit). Encoding layers apply exp(-i x_j H); their
eigen-decompositions are computed once and re-phased per data point, so a
whole evaluation grid is simulated as one batch.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Optional, Sequence, Union

import numpy as np

from .encoding import EncodingStrategy, FrequencySet, omega_total
from .errors import CapabilityError, ValidationError
from .operators import HermitianOperator, PAULI, eigh, make_pauli_string, operator_norm

UNITARY_TOL = 1e-10
SUPPORT_TOL = 1e-9


def embed_matrix(mat, qubits: Sequence[int], n_qubits: int) -> np.ndarray:
    """Full-register matrix of ``mat`` acting on ``qubits`` (in that order)."""
    k = len(qubits)
    mat = np.asarray(mat, dtype=complex)
    if mat.shape != (2**k, 2**k):
        raise ValidationError(f"matrix shape {mat.shape} does not fit {k} qubits")
    dim = 2**n_qubits
    eye = np.eye(dim, dtype=complex).reshape((dim,) + (2,) * n_qubits)
    out = _apply(eye, mat[None], list(qubits), n_qubits)
    return out.reshape(dim, dim).T


def _apply(states, gates, qubits, n_qubits):
    """Apply per-sample ``gates`` (G or 1, 2^k, 2^k) to ``states`` (G, 2,...,2)."""
    k = len(qubits)
    axes = [q + 1 for q in qubits]
    psi = np.moveaxis(states, axes, list(range(n_qubits + 1 - k, n_qubits + 1)))
    shp = psi.shape
    psi = psi.reshape(shp[0], -1, 2**k)
    psi = np.einsum("grk,gjk->grj", psi, gates) if gates.shape[0] > 1 else psi @ gates[0].T
    psi = psi.reshape(shp)
    return np.moveaxis(psi, list(range(n_qubits + 1 - k, n_qubits + 1)), axes)


@dataclass(frozen=True, eq=False)
class Trainable:
    """Fixed unitary on ``qubits``."""

    qubits: tuple
    unitary: np.ndarray

    def __post_init__(self):
        u = np.asarray(self.unitary, dtype=complex)
        object.__setattr__(self, "qubits", tuple(int(q) for q in self.qubits))
        if u.shape != (2 ** len(self.qubits),) * 2:
            raise ValidationError("unitary shape does not match its qubit support")
        err = np.linalg.norm(u.conj().T @ u - np.eye(u.shape[0]))
        if err > UNITARY_TOL:
            raise ValidationError(f"matrix is not unitary (||U^dag U - I||_F = {err:.2e})")
        object.__setattr__(self, "unitary", u)


@dataclass(frozen=True)
class Rotation:
    """exp(-i theta[param] P / 2) for a Pauli axis P on one qubit."""

    axis: str
    qubit: int
    param: int

    def matrix(self, theta) -> np.ndarray:
        t = float(theta[self.param])
        return np.cos(t / 2) * np.eye(2) - 1j * np.sin(t / 2) * PAULI[self.axis.upper()]


@dataclass(frozen=True, eq=False)
class Encoding:
    """exp(-i x[coordinate] H) on ``qubits``; coordinate is 1-based."""

    coordinate: int
    H: HermitianOperator
    qubits: tuple
    _eig: tuple = field(default=None, repr=False, compare=False)

    def __post_init__(self):
        object.__setattr__(self, "qubits", tuple(int(q) for q in self.qubits))
        if self.H.dim != 2 ** len(self.qubits):
            raise ValidationError("encoding Hamiltonian dimension does not match its support")
        w, v = eigh(self.H)
        object.__setattr__(self, "_eig", (w, v))

    def matrices(self, xs) -> np.ndarray:
        w, v = self._eig
        phases = np.exp(-1j * np.outer(xs, w))
        return np.einsum("ij,gj,kj->gik", v, phases, v.conj())


Layer = Union[Trainable, Rotation, Encoding]


@dataclass(frozen=True, eq=False)
class CircuitSpec:
    n_qubits: int
    layers: tuple
    observable: HermitianOperator
    d: int = 1

    def __post_init__(self):
        object.__setattr__(self, "layers", tuple(self.layers))
        if self.n_qubits < 1:
            raise ValidationError("need at least one qubit")
        if self.observable.dim != 2**self.n_qubits:
            raise ValidationError("observable dimension does not match the register")
        for layer in self.layers:
            qs = (layer.qubit,) if isinstance(layer, Rotation) else layer.qubits
            if any(q < 0 or q >= self.n_qubits for q in qs) or len(set(qs)) != len(qs):
                raise ValidationError(f"layer support {qs} invalid for {self.n_qubits} qubits")
            if isinstance(layer, Encoding) and not 1 <= layer.coordinate <= self.d:
                raise ValidationError(f"encoding coordinate {layer.coordinate} outside 1..{self.d}")

    @property
    def n_params(self) -> int:
        idx = [layer.param for layer in self.layers if isinstance(layer, Rotation)]
        return max(idx) + 1 if idx else 0

    def encoding_strategy(self) -> EncodingStrategy:
        per = [[] for _ in range(self.d)]
        for layer in self.layers:
            if isinstance(layer, Encoding):
                per[layer.coordinate - 1].append(layer.H)
        return EncodingStrategy(tuple(tuple(p) for p in per))


def _check_inputs(circuit, theta, X):
    theta = np.asarray(theta if theta is not None else [], dtype=float)
    if theta.size < circuit.n_params:
        raise ValidationError(f"theta needs {circuit.n_params} entries, got {theta.size}")
    X = np.asarray(X, dtype=float)
    if X.ndim == 0:
        X = X.reshape(1, 1)
    elif X.ndim == 1:
        X = X.reshape(1, -1) if X.size == circuit.d else X.reshape(-1, 1)
    if X.shape[1] != circuit.d:
        raise ValidationError(f"x has dimension {X.shape[1]}, circuit expects {circuit.d}")
    return theta, X


def statevectors(circuit: CircuitSpec, theta, X) -> np.ndarray:
    """States for a batch of points X (G, d); returns (G, 2^n)."""
    theta, X = _check_inputs(circuit, theta, X)
    n = circuit.n_qubits
    G = X.shape[0]
    psi = np.zeros((G,) + (2,) * n, dtype=complex)
    psi[(slice(None),) + (0,) * n] = 1.0
    for layer in circuit.layers:
        if isinstance(layer, Trainable):
            psi = _apply(psi, layer.unitary[None], list(layer.qubits), n)
        elif isinstance(layer, Rotation):
            psi = _apply(psi, layer.matrix(theta)[None], [layer.qubit], n)
        else:
            psi = _apply(psi, layer.matrices(X[:, layer.coordinate - 1]), list(layer.qubits), n)
    return psi.reshape(G, -1)


def statevector(circuit: CircuitSpec, theta, x) -> np.ndarray:
    x = np.atleast_1d(np.asarray(x, dtype=float)).reshape(1, -1)
    return statevectors(circuit, theta, x)[0]


def expectations(circuit: CircuitSpec, theta, X, return_imag=False):
    psi = statevectors(circuit, theta, X)
    vals = np.einsum("gi,ij,gj->g", psi.conj(), circuit.observable.entries, psi)
    return (vals.real, vals.imag) if return_imag else vals.real


def expectation(circuit: CircuitSpec, theta, x) -> float:
    x = np.atleast_1d(np.asarray(x, dtype=float)).reshape(1, -1)
    return float(expectations(circuit, theta, x)[0])


def derived_omega(circuit: CircuitSpec, tol: float = 1e-9) -> FrequencySet:
    return omega_total(circuit.encoding_strategy(), tol)


@dataclass(frozen=True)
class FourierExtraction:
    coefficients: dict
    grid_sizes: tuple
    max_offgrid_leakage: float
    symmetry_residual: float
    grid_sup: float
    support: list

    def as_dict(self) -> dict:
        return {
            "grid_sizes": list(self.grid_sizes),
            "max_offgrid_leakage": self.max_offgrid_leakage,
            "symmetry_residual": self.symmetry_residual,
            "grid_sup": self.grid_sup,
            "coefficients": [
                {"omega": list(k), "re": v.real, "im": v.imag} for k, v in self.coefficients.items()
            ],
        }


def fourier_grid(grid_sizes):
    axes = [np.arange(g) * (2 * np.pi / g) for g in grid_sizes]
    mesh = np.meshgrid(*axes, indexing="ij")
    return np.stack([m.ravel() for m in mesh], axis=1)


def extract_fourier(circuit: CircuitSpec, theta, grid_sizes: Optional[Sequence[int]] = None,
                    omega: Optional[FrequencySet] = None) -> FourierExtraction:
    """Fourier coefficients of x -> <M>(x) from samples on an equispaced grid.

    With f(x) = sum_w c_w exp(-i w.x), c_w is the inverse DFT of the samples at
    index w mod g. Defaults to the minimal alias-free grid 2K_i + 1.
    """
    omega = omega if omega is not None else derived_omega(circuit)
    if not omega.is_integer:
        raise CapabilityError("Fourier extraction needs an integer frequency spectrum")
    K = [int(k) for k in omega.K_per_coordinate]
    if grid_sizes is None:
        grid_sizes = [2 * k + 1 for k in K]
    grid_sizes = tuple(int(g) for g in grid_sizes)
    if len(grid_sizes) != circuit.d:
        raise ValidationError("one grid size per coordinate required")
    for g, k in zip(grid_sizes, K):
        if g < 2 * k + 1:
            raise ValidationError(f"grid size {g} below the Nyquist minimum {2 * k + 1}")
    X = fourier_grid(grid_sizes)
    f = expectations(circuit, theta, X).reshape(grid_sizes)
    spec = np.fft.ifftn(f)
    idx = np.stack(np.meshgrid(*[np.arange(g) for g in grid_sizes], indexing="ij"), axis=-1).reshape(-1, circuit.d)
    freqs = np.where(idx <= np.array(grid_sizes) // 2, idx, idx - np.array(grid_sizes))
    flat = spec.reshape(-1)
    allowed = {tuple(r) for r in omega.keys.tolist()}
    coeffs, leak = {}, 0.0
    for w, c in zip(map(tuple, freqs.tolist()), flat):
        if w in allowed:
            coeffs[w] = complex(c)
        else:
            leak = max(leak, abs(c))
    sym = max(abs(c - coeffs.get(tuple(-x for x in w), 0j).conjugate()) for w, c in coeffs.items())
    support = sorted(w for w, c in coeffs.items() if abs(c) > SUPPORT_TOL)
    return FourierExtraction(coeffs, grid_sizes, float(leak), float(sym), float(np.max(np.abs(f))), support)


def reconstruct(extraction: FourierExtraction, X) -> np.ndarray:
    X = np.atleast_2d(np.asarray(X, dtype=float))
    keys = np.array(list(extraction.coefficients.keys()), dtype=float)
    vals = np.array(list(extraction.coefficients.values()))
    return (np.exp(-1j * X @ keys.T) @ vals).real


# random circuits


def haar_unitary(dim: int, rng) -> np.ndarray:
    z = (rng.standard_normal((dim, dim)) + 1j * rng.standard_normal((dim, dim))) / np.sqrt(2)
    q, r = np.linalg.qr(z)
    ph = np.diag(r) / np.abs(np.diag(r))
    return q * ph


def random_pauli_label(n: int, rng, allow_identity=False) -> str:
    while True:
        lab = "".join(rng.choice(list("IXYZ"), size=n))
        if allow_identity or set(lab) != {"I"}:
            return lab


def random_circuit(n_qubits: int, n_encodings: int, rng, d: int = 1, observable: Optional[HermitianOperator] = None,
                   encoding_locality: Optional[int] = None) -> CircuitSpec:
    """Haar unitaries on the full register interleaved with Pauli-string encodings."""
    dim = 2**n_qubits
    layers = [Trainable(tuple(range(n_qubits)), haar_unitary(dim, rng))]
    for _ in range(n_encodings):
        k = encoding_locality or int(rng.integers(1, n_qubits + 1))
        qubits = tuple(sorted(rng.choice(n_qubits, size=k, replace=False).tolist()))
        H = make_pauli_string(random_pauli_label(k, rng))
        coord = int(rng.integers(1, d + 1))
        layers.append(Encoding(coord, H, qubits))
        layers.append(Trainable(tuple(range(n_qubits)), haar_unitary(dim, rng)))
    if observable is None:
        observable = make_pauli_string(random_pauli_label(n_qubits, rng))
    return CircuitSpec(n_qubits, layers, observable, d)


def conjecture_probe(circuit_family_cfg: Optional[dict] = None, n_trials: int = 100, seed: int = 0) -> dict:
    """Largest |c_w| / ||M||_inf over random circuits; ratios above 1 + 1e-6 are recorded.

    ``circuit_family_cfg`` keys: ``n_qubits`` (list of choices, default [1, 2]),
    ``max_encodings`` (default 3), ``d`` (default 1), ``observable`` ("pauli"
    or "random_hermitian").
    """
    cfg = {"n_qubits": [1, 2], "max_encodings": 3, "d": 1, "observable": "pauli"}
    cfg.update(circuit_family_cfg or {})
    if n_trials < 1:
        raise ValidationError("n_trials must be >= 1")
    rng = np.random.default_rng(seed)
    ratios, violations = [], []
    for trial in range(n_trials):
        n = int(rng.choice(cfg["n_qubits"]))
        n_enc = int(rng.integers(1, cfg["max_encodings"] + 1))
        if cfg["observable"] == "random_hermitian":
            z = rng.standard_normal((2**n, 2**n)) + 1j * rng.standard_normal((2**n, 2**n))
            M = HermitianOperator((z + z.conj().T) / 2)
        else:
            M = make_pauli_string(random_pauli_label(n, rng))
        circ = random_circuit(n, n_enc, rng, d=cfg["d"], observable=M)
        ext = extract_fourier(circ, [], None)
        r = max(abs(c) for c in ext.coefficients.values()) / operator_norm(M)
        ratios.append(float(r))
        if r > 1 + 1e-6:
            violations.append({"trial": trial, "ratio": float(r), "n_qubits": n, "n_encodings": n_enc})
    return {
        "max_ratio": max(ratios),
        "mean_ratio": float(np.mean(ratios)),
        "n_trials": n_trials,
        "seed": seed,
        "violations": violations,
        "config": cfg,
    }
