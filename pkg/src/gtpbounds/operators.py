"""Hermitian operators, their spectra and eigenvalue-difference sets.

Eigenvalues are computed with a cyclic Jacobi sweep using complex Givens
rotations, so the module has no LAPACK dependency on the hot path. Operators
whose spectrum is known in closed form (Pauli strings, integer diagonals)
carry it along exactly, and difference sets of such spectra are computed in
integer arithmetic.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from functools import reduce
from typing import Optional, Sequence

import numpy as np

from .errors import NumericError, ValidationError

HERMITIAN_TOL = 1e-12
DEFAULT_DEDUP_TOL = 1e-9

PAULI = {
    "I": np.eye(2, dtype=complex),
    "X": np.array([[0, 1], [1, 0]], dtype=complex),
    "Y": np.array([[0, -1j], [1j, 0]], dtype=complex),
    "Z": np.array([[1, 0], [0, -1]], dtype=complex),
}


@dataclass(frozen=True, eq=False)
class HermitianOperator:
    """Dense Hermitian matrix.

    ``exact_spectrum`` holds the integer eigenvalues (with multiplicity,
    ascending) when they are known exactly; it switches downstream frequency
    computations onto the exact-integer path.
    """

    entries: np.ndarray
    exact_spectrum: Optional[tuple] = None
    label: Optional[str] = None

    def __post_init__(self):
        m = np.array(self.entries, dtype=complex)
        if m.ndim != 2 or m.shape[0] != m.shape[1] or m.shape[0] < 1:
            raise ValidationError(f"operator must be a nonempty square matrix, got shape {m.shape}")
        scale = max(1.0, float(np.max(np.abs(m))))
        asym = float(np.max(np.abs(m - m.conj().T)))
        if asym > HERMITIAN_TOL * scale:
            raise ValidationError(f"operator is not Hermitian (max |H - H^dagger| = {asym:.3e})")
        m = 0.5 * (m + m.conj().T)
        m.setflags(write=False)
        object.__setattr__(self, "entries", m)
        if self.exact_spectrum is not None:
            spec = tuple(sorted(int(v) for v in self.exact_spectrum))
            if len(spec) != m.shape[0]:
                raise ValidationError("exact spectrum length does not match dimension")
            object.__setattr__(self, "exact_spectrum", spec)

    @property
    def dim(self) -> int:
        return self.entries.shape[0]

    @property
    def integer_spectrum(self) -> bool:
        return self.exact_spectrum is not None

    def embed(self, qubits: Sequence[int], n_qubits: int) -> "HermitianOperator":
        """Lift an operator on ``qubits`` to the full ``n_qubits`` register."""
        from .qsim import embed_matrix  # local: qsim depends on this module

        full = embed_matrix(self.entries, qubits, n_qubits)
        spec = None
        if self.exact_spectrum is not None:
            reps = 2 ** (n_qubits - len(qubits))
            spec = tuple(v for v in self.exact_spectrum for _ in range(reps))
        return HermitianOperator(full, exact_spectrum=spec, label=self.label)


@dataclass(frozen=True)
class Spectrum:
    values: tuple
    integer_values: Optional[tuple] = None

    def __len__(self):
        return len(self.values)

    @property
    def is_integer(self) -> bool:
        return self.integer_values is not None


@dataclass(frozen=True)
class DifferenceSet:
    values: tuple
    tolerance: float = DEFAULT_DEDUP_TOL
    exact: bool = False

    @property
    def positive_count(self) -> int:
        return (len(self.values) - 1) // 2

    def __len__(self):
        return len(self.values)


def make_pauli_string(labels) -> HermitianOperator:
    """Tensor product of Pauli matrices, e.g. ``"ZZI"`` or ``["Z", "X"]``."""
    labels = [str(c).upper() for c in labels]
    if not labels:
        raise ValidationError("Pauli string must be nonempty")
    bad = [c for c in labels if c not in PAULI]
    if bad:
        raise ValidationError(f"unknown Pauli labels {bad}")
    mat = reduce(np.kron, [PAULI[c] for c in labels])
    n = len(labels)
    if all(c == "I" for c in labels):
        spec = (1,) * 2**n
    else:
        half = 2 ** (n - 1)
        spec = (-1,) * half + (1,) * half
    return HermitianOperator(mat, exact_spectrum=spec, label="".join(labels))


def make_diagonal(values) -> HermitianOperator:
    vals = np.asarray(values, dtype=float)
    if vals.ndim != 1 or vals.size == 0:
        raise ValidationError("diagonal needs a nonempty 1-d sequence")
    spec = None
    if all(float(v).is_integer() for v in vals):
        spec = tuple(int(v) for v in vals)
    return HermitianOperator(np.diag(vals).astype(complex), exact_spectrum=spec)


def _off_norm(a):
    # sum the off-diagonal entries directly; ||a||^2 - ||diag||^2 cancels below sqrt(eps) ||a||
    return float(np.linalg.norm(a - np.diag(np.diag(a))))


def jacobi_eigh(matrix, rel_tol=1e-12, max_sweeps=100):
    """Eigen-decomposition of a Hermitian matrix by cyclic complex Jacobi.

    Returns ``(w, V)`` with ascending real ``w`` and unitary ``V`` such that
    ``matrix = V diag(w) V^dagger``. Raises NumericError if the off-diagonal
    mass does not drop below ``rel_tol * ||matrix||_F`` in ``max_sweeps``.
    """
    a = np.array(matrix, dtype=complex)
    n = a.shape[0]
    v = np.eye(n, dtype=complex)
    fro = np.linalg.norm(a)
    threshold = rel_tol * fro if fro > 0 else 0.0
    for _ in range(max_sweeps):
        off = _off_norm(a)
        if off <= threshold:
            break
        for p in range(n - 1):
            for q in range(p + 1, n):
                h = a[p, q]
                mag = abs(h)
                if mag <= 1e-300:
                    continue
                phase = h / mag
                tau = (a[q, q].real - a[p, p].real) / (2.0 * mag)
                t = (1.0 if tau >= 0 else -1.0) / (abs(tau) + np.hypot(1.0, tau))
                c = 1.0 / np.sqrt(1.0 + t * t)
                s = t * c
                g = np.array([[c, s], [-s * phase.conjugate(), c * phase.conjugate()]])
                idx = [p, q]
                a[:, idx] = a[:, idx] @ g
                a[idx, :] = g.conj().T @ a[idx, :]
                a[p, q] = a[q, p] = 0.0
                v[:, idx] = v[:, idx] @ g
    else:
        off = _off_norm(a)
        if off > threshold:
            raise NumericError(
                f"Jacobi iteration did not converge in {max_sweeps} sweeps", residual=off
            )
    w = np.diag(a).real.copy()
    order = np.argsort(w, kind="stable")
    return w[order], v[:, order]


def eigh(op: HermitianOperator, tol: float = 1e-9):
    """Eigenvalues and eigenvectors with a reconstruction check at ``tol``."""
    w, v = jacobi_eigh(op.entries)
    fro = np.linalg.norm(op.entries)
    resid = np.linalg.norm(op.entries - (v * w) @ v.conj().T)
    if resid > tol * max(fro, 1.0):
        raise NumericError(f"eigen-decomposition residual {resid:.3e} exceeds tolerance", resid)
    if op.exact_spectrum is not None:
        w = np.array(op.exact_spectrum, dtype=float)
    return w, v


def eigenvalues(op: HermitianOperator, tol: float = 1e-9) -> Spectrum:
    if op.exact_spectrum is not None:
        return Spectrum(tuple(float(v) for v in op.exact_spectrum), op.exact_spectrum)
    w, _ = eigh(op, tol)
    return Spectrum(tuple(float(x) for x in w))


def spectrum_from_values(values) -> Spectrum:
    """Spectrum from user-given eigenvalues; integer-valued input goes exact."""
    vals = sorted(float(v) for v in values)
    if vals and all(v.is_integer() for v in vals):
        return Spectrum(tuple(vals), tuple(int(v) for v in vals))
    return Spectrum(tuple(vals))


def difference_set(s: Spectrum, tol: float = DEFAULT_DEDUP_TOL) -> DifferenceSet:
    """All pairwise eigenvalue differences, deduplicated.

    Integer spectra are handled exactly. Otherwise positive differences are
    clustered greedily (a cluster spans at most ``tol``) and replaced by the
    cluster mean; the negative half is the mirror image, so the result is
    symmetric by construction.
    """
    if tol <= 0:
        raise ValidationError("tol must be positive")
    if s.is_integer:
        ints = sorted(set(s.integer_values))
        diffs = sorted({a - b for a in ints for b in ints})
        return DifferenceSet(tuple(diffs), tol, exact=True)
    vals = np.array(sorted(set(s.values)))
    d = (vals[:, None] - vals[None, :]).ravel()
    pos = np.sort(d[d > tol])
    reps = []
    start = 0
    for i in range(1, len(pos) + 1):
        if i == len(pos) or pos[i] - pos[start] > tol:
            reps.append(float(np.mean(pos[start:i])))
            start = i
    out = [-r for r in reversed(reps)] + [0.0] + reps
    return DifferenceSet(tuple(out), tol, exact=False)


def difference_set_from_values(values, tol: float = DEFAULT_DEDUP_TOL) -> DifferenceSet:
    """Close an arbitrary collection of differences under negation and add 0.

    Useful for abstract encodings that are specified by their frequencies
    rather than by a Hamiltonian.
    """
    vals = [float(v) for v in values]
    if all(v.is_integer() for v in vals):
        ints = {int(v) for v in vals}
        ints |= {-v for v in ints} | {0}
        return DifferenceSet(tuple(sorted(ints)), tol, exact=True)
    pos = sorted({abs(v) for v in vals if abs(v) > tol})
    reps = []
    for v in pos:
        if reps and v - reps[-1][0] <= tol:
            reps[-1].append(v)
        else:
            reps.append([v])
    means = [float(np.mean(r)) for r in reps]
    return DifferenceSet(tuple([-m for m in reversed(means)] + [0.0] + means), tol, exact=False)


@dataclass(frozen=True)
class DifferenceCount:
    tight: int
    one_sided: int = field(default=0)


def max_distinct_differences(num_distinct_eigenvalues: int) -> DifferenceCount:
    """Largest possible |Delta| for ``D`` distinct eigenvalues.

    ``tight`` counts both signs of every difference plus 0, D(D-1)+1, and is
    attained by geometric spectra such as {3^j}. ``one_sided`` is the
    count D(D-1)/2+1, which only counts one sign.
    """
    D = int(num_distinct_eigenvalues)
    if D < 1:
        raise ValidationError("need at least one eigenvalue")
    return DifferenceCount(tight=D * (D - 1) + 1, one_sided=D * (D - 1) // 2 + 1)


def saturating_spectrum(num_distinct: int) -> tuple:
    """Geometric spectrum {3^j : j < D} with all differences distinct."""
    return tuple(3**j for j in range(num_distinct))


def operator_norm(op: HermitianOperator) -> float:
    s = eigenvalues(op)
    return max(abs(s.values[0]), abs(s.values[-1]))
