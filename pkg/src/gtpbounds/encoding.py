"""Encoding strategies, frequency spectra and cardinality bounds.

Frequencies are stored as integer keys on a per-coordinate grid: coordinates
whose spectra are declared integer use the exact grid (scale 1), the others
use a grid of spacing ``tol``. Sumsets are then exact integer operations on
the keys, which keeps negation symmetry and set algebra free of rounding
drift.
"""

from __future__ import annotations

from dataclasses import dataclass
from math import comb, log
from typing import Callable, Optional, Sequence, Union

import numpy as np

from .errors import ResourceError, ValidationError
from .operators import (
    DEFAULT_DEDUP_TOL,
    DifferenceSet,
    HermitianOperator,
    difference_set,
    eigenvalues,
    make_pauli_string,
)

DEFAULT_CAP = 10**7

Generator = Union[HermitianOperator, DifferenceSet]


@dataclass(frozen=True)
class EncodingStrategy:
    """Per-coordinate lists of encoding generators.

    A generator is normally a HermitianOperator; a DifferenceSet may stand in
    for an encoding described only by its frequencies.
    """

    per_coordinate: tuple

    def __post_init__(self):
        coords = tuple(tuple(c) for c in self.per_coordinate)
        if not coords:
            raise ValidationError("strategy needs at least one coordinate")
        for i, gens in enumerate(coords):
            for g in gens:
                if not isinstance(g, (HermitianOperator, DifferenceSet)):
                    raise ValidationError(f"coordinate {i + 1}: unsupported generator {type(g)!r}")
        object.__setattr__(self, "per_coordinate", coords)

    @property
    def d(self) -> int:
        return len(self.per_coordinate)

    @property
    def n_per_coordinate(self) -> tuple:
        return tuple(len(c) for c in self.per_coordinate)

    @property
    def N(self) -> int:
        return sum(self.n_per_coordinate)

    @property
    def integer_declared(self) -> tuple:
        return tuple(all(_is_integer_generator(g) for g in c) for c in self.per_coordinate)

    @classmethod
    def repeated(cls, generator: Generator, n_per_coordinate: Sequence[int]) -> "EncodingStrategy":
        return cls(tuple((generator,) * int(n) for n in n_per_coordinate))

    @classmethod
    def pauli(cls, n_per_coordinate: Sequence[int], label: str = "Z") -> "EncodingStrategy":
        return cls.repeated(make_pauli_string(label), n_per_coordinate)


def _is_integer_generator(g) -> bool:
    if isinstance(g, DifferenceSet):
        return g.exact
    return g.integer_spectrum


def _deltas(g: Generator, tol: float) -> DifferenceSet:
    if isinstance(g, DifferenceSet):
        return g
    return difference_set(eigenvalues(g), tol)


def _lex_sort_unique(keys: np.ndarray) -> np.ndarray:
    if keys.shape[0] == 0:
        return keys
    return np.unique(keys, axis=0)


@dataclass(frozen=True, eq=False)
class FrequencySet:
    """Finite, negation-closed set of d-dimensional frequency vectors.

    ``keys`` are int64 grid indices (lexicographically sorted, unique) and
    ``scales[i]`` is the grid spacing of coordinate ``i`` (1.0 on the exact
    integer path).
    """

    keys: np.ndarray
    scales: tuple

    def __post_init__(self):
        k = np.asarray(self.keys, dtype=np.int64)
        if k.ndim != 2:
            raise ValidationError("frequency keys must be a 2-d array")
        k = _lex_sort_unique(k)
        k.setflags(write=False)
        object.__setattr__(self, "keys", k)
        object.__setattr__(self, "scales", tuple(float(s) for s in self.scales))
        if len(self.scales) != k.shape[1]:
            raise ValidationError("one scale per coordinate required")

    # construction helpers
    @classmethod
    def zero(cls, d: int) -> "FrequencySet":
        return cls(np.zeros((1, d), dtype=np.int64), (1.0,) * d)

    @classmethod
    def from_vectors(cls, vectors, tol: float = DEFAULT_DEDUP_TOL) -> "FrequencySet":
        """Build from explicit vectors, closing under negation and adding 0."""
        v = np.atleast_2d(np.asarray(vectors, dtype=float))
        d = v.shape[1]
        scales = []
        keys = np.empty(v.shape, dtype=np.int64)
        for i in range(d):
            col = v[:, i]
            if np.all(col == np.rint(col)):
                scales.append(1.0)
                keys[:, i] = np.rint(col).astype(np.int64)
            else:
                scales.append(tol)
                keys[:, i] = np.rint(col / tol).astype(np.int64)
        keys = np.vstack([keys, -keys, np.zeros((1, d), dtype=np.int64)])
        return cls(keys, tuple(scales))

    # views
    @property
    def d(self) -> int:
        return self.keys.shape[1]

    @property
    def is_integer(self) -> bool:
        return all(s == 1.0 for s in self.scales)

    @property
    def vectors(self) -> np.ndarray:
        if self.is_integer:
            return self.keys
        return self.keys * np.asarray(self.scales)

    def __len__(self):
        return self.keys.shape[0]

    @property
    def cardinality(self) -> int:
        return len(self)

    @property
    def K_per_coordinate(self) -> tuple:
        return tuple(float(x) for x in np.max(np.abs(self.vectors), axis=0))

    @property
    def K(self) -> float:
        return float(sum(self.K_per_coordinate))

    @property
    def omega_plus_keys(self) -> np.ndarray:
        k = self.keys
        nz = k != 0
        has = nz.any(axis=1)
        first = np.argmax(nz, axis=1)
        lead = k[np.arange(len(k)), first]
        return k[has & (lead > 0)]

    @property
    def omega_plus(self) -> np.ndarray:
        """Lexicographically positive half, in lexicographic order."""
        kp = self.omega_plus_keys
        if self.is_integer:
            return kp.copy()
        return kp * np.asarray(self.scales)

    def contains(self, vector) -> bool:
        v = np.asarray(vector, dtype=float)
        key = np.rint(v / np.asarray(self.scales)).astype(np.int64)
        return bool(np.any(np.all(self.keys == key, axis=1)))

    def is_symmetric(self) -> bool:
        a = {tuple(r) for r in self.keys.tolist()}
        return all(tuple(-x for x in r) in a for r in a) and (0,) * self.d in a

    def as_tuples(self) -> list:
        return [tuple(r) for r in self.vectors.tolist()]


def _align(a: FrequencySet, b: FrequencySet, tol: float):
    """Bring two sets onto a common per-coordinate grid."""
    ka, kb = a.keys, b.keys
    scales = []
    for i, (sa, sb) in enumerate(zip(a.scales, b.scales)):
        if sa == sb:
            scales.append(sa)
            continue
        s = min(sa, sb, tol)
        if sa != s:
            ka = ka.copy()
            ka[:, i] = np.rint(ka[:, i] * sa / s).astype(np.int64)
        if sb != s:
            kb = kb.copy()
            kb[:, i] = np.rint(kb[:, i] * sb / s).astype(np.int64)
        scales.append(s)
    return ka, kb, tuple(scales)


def minkowski_sum(
    a: FrequencySet, b: FrequencySet, tol: float = DEFAULT_DEDUP_TOL, cap: int = DEFAULT_CAP
) -> FrequencySet:
    """Sumset {x + y : x in a, y in b}."""
    if a.d != b.d:
        raise ValidationError(f"dimension mismatch: {a.d} vs {b.d}")
    ka, kb, scales = _align(a, b, tol)
    out = np.empty((0, a.d), dtype=np.int64)
    # chunk over a so the pairwise block stays bounded
    step = max(1, 2_000_000 // max(1, len(kb)))
    for start in range(0, len(ka), step):
        block = (ka[start : start + step, None, :] + kb[None, :, :]).reshape(-1, a.d)
        out = _lex_sort_unique(np.vstack([out, block]))
        if len(out) > cap:
            raise ResourceError(
                f"sumset exceeds the cap of {cap} vectors", required=len(out), cap=cap
            )
    return FrequencySet(out, scales)


def omega_of_hamiltonian(
    H: Generator, coordinate: int, d: int, tol: float = DEFAULT_DEDUP_TOL
) -> FrequencySet:
    """Frequencies {delta * e_coordinate} of one encoding gate (1-based coordinate)."""
    if not 1 <= coordinate <= d:
        raise ValidationError(f"coordinate {coordinate} outside 1..{d}")
    ds = _deltas(H, tol)
    return _axis_set(ds, coordinate - 1, d, tol)


def _axis_set(ds: DifferenceSet, axis: int, d: int, tol: float) -> FrequencySet:
    vals = np.asarray(ds.values, dtype=float)
    keys = np.zeros((len(vals), d), dtype=np.int64)
    scales = [1.0] * d
    if ds.exact:
        keys[:, axis] = np.asarray(ds.values, dtype=np.int64)
    else:
        keys[:, axis] = np.rint(vals / tol).astype(np.int64)
        scales[axis] = tol
    return FrequencySet(keys, tuple(scales))


def _coordinate_keys(gens, tol: float, cap: int, coordinate: int):
    """1-d sumset of one coordinate's generators as (sorted keys, scale)."""
    exact = all(_is_integer_generator(g) for g in gens)
    scale = 1.0 if exact else tol
    acc = np.zeros(1, dtype=np.int64)
    for g in gens:
        ds = _deltas(g, tol)
        if exact:
            step = np.asarray(ds.values, dtype=np.int64)
        else:
            step = np.rint(np.asarray(ds.values, dtype=float) / tol).astype(np.int64)
        acc = np.unique((acc[:, None] + step[None, :]).ravel())
        if len(acc) > cap:
            raise ResourceError(
                f"coordinate {coordinate}: |Omega^(i)| exceeds the cap of {cap}",
                required=len(acc),
                cap=cap,
                coordinate=coordinate,
            )
    return acc, scale


def coordinate_cardinalities(
    strategy: EncodingStrategy, tol: float = DEFAULT_DEDUP_TOL, cap: int = DEFAULT_CAP
) -> tuple:
    return tuple(
        len(_coordinate_keys(g, tol, cap, i + 1)[0]) for i, g in enumerate(strategy.per_coordinate)
    )


def omega_total(
    strategy: EncodingStrategy, tol: float = DEFAULT_DEDUP_TOL, cap: int = DEFAULT_CAP
) -> FrequencySet:
    """Full spectrum Omega(D) as the product of per-coordinate sumsets.

    Frequencies of different coordinates live on different axes, so the
    iterated Minkowski sum factorizes into a Cartesian product; the product
    cardinality is checked against the cap before anything is materialized.
    """
    per = []
    total = 1
    for i, gens in enumerate(strategy.per_coordinate):
        keys, scale = _coordinate_keys(gens, tol, cap, i + 1)
        total *= len(keys)
        if total > cap:
            raise ResourceError(
                f"coordinate {i + 1}: |Omega| would reach {total}, above the cap of {cap}",
                required=total,
                cap=cap,
                coordinate=i + 1,
            )
        per.append((keys, scale))
    grids = np.meshgrid(*[k for k, _ in per], indexing="ij")
    keys = np.stack([g.ravel() for g in grids], axis=1)
    fs = FrequencySet(keys, tuple(s for _, s in per))
    assert len(fs) == total
    return fs


def omega_cardinality(
    strategy: EncodingStrategy, tol: float = DEFAULT_DEDUP_TOL, cap: int = DEFAULT_CAP
) -> int:
    """|Omega(D)| without materializing the product set."""
    out = 1
    for c in coordinate_cardinalities(strategy, tol, cap):
        out *= c
    return out


# closed-form bounds


def weak_composition_count(N: int, T: int) -> int:
    if N < 0 or T < 1:
        raise ValidationError("need N >= 0 and T >= 1")
    return comb(N + T - 1, N)


def bound_pauli(N_i: int) -> int:
    if N_i < 0:
        raise ValidationError("N_i must be nonnegative")
    return 2 * N_i + 1


def bound_repeated(N_i: int, T: int, exact: bool = False):
    """binom(N+T-1, N) * (2N/T + 1)^T for N repetitions of one encoding with 2T+1 frequencies.

    With ``exact=True`` and 2N divisible by T the value is returned as an int.
    """
    if N_i < 1 or T < 1:
        raise ValidationError("need N_i >= 1 and T >= 1")
    w = weak_composition_count(N_i, T)
    if exact and (2 * N_i) % T == 0:
        return w * (2 * N_i // T + 1) ** T
    return float(w) * (2.0 * N_i / T + 1.0) ** T


def bound_klocal_worstcase(N_i: int, kappa: int, corrected: bool = True):
    """Worst case |Omega^(i)| for N_i (possibly different) kappa-local encodings.

    ``corrected=False`` uses the one-sided per-gate count
    2^k(2^k-1)/2 + 1; ``corrected=True`` uses 2^k(2^k-1) + 1, which also
    counts negative differences.
    """
    if N_i < 0 or kappa < 1:
        raise ValidationError("need N_i >= 0 and kappa >= 1")
    D = 2**kappa
    per_gate = D * (D - 1) + 1 if corrected else D * (D - 1) // 2 + 1
    return per_gate**N_i


def max_positive_differences(kappa: int, corrected: bool = True) -> int:
    """Largest T for a kappa-local Hamiltonian (2^k distinct eigenvalues)."""
    D = 2**kappa
    if corrected:
        return D * (D - 1) // 2
    # one-sided value T <= 2^(k-2)(2^k - 1), not an integer for k = 1
    return (2 ** (kappa - 2)) * (D - 1) if kappa >= 2 else 0


def bound_total_amgm(per_coordinate_bounds: Sequence[float], d: int) -> float:
    b = [float(x) for x in per_coordinate_bounds]
    if len(b) != d:
        raise ValidationError("need one bound per coordinate")
    if any(x < 1 for x in b):
        raise ValidationError("per-coordinate bounds must be >= 1")
    return (sum(b) / d) ** d


def scaling_exponent_fit(
    strategy_family: Callable[[int], Union[EncodingStrategy, FrequencySet]],
    N_values: Sequence[int],
    tol: float = DEFAULT_DEDUP_TOL,
    cap: int = DEFAULT_CAP,
) -> float:
    """Least-squares slope of log|Omega| against log N over a family."""
    Ns = [int(n) for n in N_values]
    if len(Ns) < 3:
        raise ValidationError("need at least three N values")
    sizes = []
    for n in Ns:
        obj = strategy_family(n)
        if isinstance(obj, FrequencySet):
            sizes.append(len(obj))
        else:
            sizes.append(omega_cardinality(obj, tol, cap))
    x = np.log(np.asarray(Ns, dtype=float))
    y = np.log(np.asarray(sizes, dtype=float))
    slope = np.polyfit(x, y, 1)[0]
    return float(slope)


def table1_exponent(kind: str, T: Optional[int] = None, kappa: Optional[int] = None) -> float:
    """Growth exponent of |Omega^(i)| in N^(i) for the polynomial families."""
    if kind == "pauli":
        return 1.0
    if kind == "same_T":
        return 2.0 * T - 1.0
    if kind == "same_klocal":
        return 2.0 ** (kappa + 1) - 1.0
    raise ValidationError(f"no polynomial exponent for kind {kind!r}")


def log_klocal_worstcase(N_i: int, kappa: int, corrected: bool = True) -> float:
    D = 2**kappa
    per_gate = D * (D - 1) + 1 if corrected else D * (D - 1) // 2 + 1
    return N_i * log(per_gate)
