"""Generalization-gap bounds with explicit constants.

Both routes plug a bound on the empirical Rademacher complexity of the
hypothesis class into the standard uniform deviation bound

    R(f) - R_S(f) <= 2 L Rad + 3 c sqrt(log(2/delta) / (2m)).

The Rademacher route uses the sine-network / Massart bounds, the covering
route uses the chaining integral over the volumetric covering number.
"""

from __future__ import annotations

import csv
import io
import json
import math
from dataclasses import asdict, dataclass, field
from typing import Callable, Optional, Sequence

import numpy as np

from . import complexity
from .encoding import (
    EncodingStrategy,
    bound_klocal_worstcase,
    bound_pauli,
    bound_repeated,
    bound_total_amgm,
    max_positive_differences,
    omega_total,
)
from .errors import CapabilityError, GTPBoundsError, ValidationError


@dataclass(frozen=True)
class LossSpec:
    """Bounded Lipschitz loss l(y, z) with values in [0, c]."""

    kind: str = "clipped_absolute"
    c: float = 1.0
    L: Optional[float] = None

    def __post_init__(self):
        if self.kind not in ("clipped_absolute", "clipped_squared"):
            raise ValidationError(f"unknown loss kind {self.kind!r}")
        if self.c <= 0:
            raise ValidationError("loss bound c must be positive")
        exact = 1.0 if self.kind == "clipped_absolute" else 2.0 * math.sqrt(self.c)
        if self.L is None:
            object.__setattr__(self, "L", exact)
        elif self.L < exact - 1e-12:
            raise ValidationError(f"L = {self.L} is below the loss's Lipschitz constant {exact}")

    def __call__(self, y, z):
        r = np.abs(np.asarray(y, dtype=float) - np.asarray(z, dtype=float))
        if self.kind == "clipped_absolute":
            return np.minimum(r, self.c)
        return np.minimum(r * r, self.c)


def _check(m, delta):
    if not (0 < delta < 1):
        raise ValidationError(f"delta must lie in (0, 1), got {delta}")
    if m < 1:
        raise ValidationError("m must be >= 1")


def confidence_term(c, m, delta) -> float:
    _check(m, delta)
    return 3.0 * c * math.sqrt(math.log(2.0 / delta) / (2.0 * m))


def gen_gap_bound_rademacher(rad, loss: LossSpec, m, delta) -> float:
    if rad < 0:
        raise ValidationError("Rademacher complexity must be nonnegative")
    return 2.0 * loss.L * rad + confidence_term(loss.c, m, delta)


def gen_gap_bound_covering(B, B_tilde, n_omega, loss: LossSpec, m, delta) -> float:
    _check(m, delta)
    rad = complexity.dudley_rademacher_bound(B, B_tilde, n_omega, m)
    return 2.0 * loss.L * rad + confidence_term(loss.c, m, delta)


def route_bound(route: str, params: dict, m: int, delta: float) -> float:
    """Evaluate one route at sample size m.

    ``params`` holds ``loss`` plus, per route, ``K, B_tilde, n_omega, d``
    (rademacher) or ``B, B_tilde, n_omega`` (covering).
    """
    loss = params["loss"]
    if route == "rademacher":
        rad = complexity.rademacher_bound_min(
            params.get("K", math.inf), params["B_tilde"], params["n_omega"], params.get("d", 1), m
        )
        return gen_gap_bound_rademacher(rad, loss, m, delta)
    if route == "covering":
        return gen_gap_bound_covering(params["B"], params["B_tilde"], params["n_omega"], loss, m, delta)
    if route == "min":
        return min(route_bound("rademacher", params, m, delta), route_bound("covering", params, m, delta))
    raise ValidationError(f"unknown route {route!r}")


def sample_size_for_gap(epsilon, delta, bound_fn_params: dict, route: str = "rademacher",
                        g: Optional[Callable[[int], float]] = None) -> int:
    """Smallest m with g(m) <= epsilon (exponential then binary search).

    ``g`` overrides the route evaluation, mainly for testing.
    """
    if not (0 < epsilon < 1) or not (0 < delta < 1):
        raise ValidationError("epsilon and delta must lie in (0, 1)")
    if g is None:
        g = lambda mm: route_bound(route, bound_fn_params, mm, delta)  # noqa: E731
    if g(1) <= epsilon:
        return 1
    lo, hi = 1, 2
    prev = g(1)
    while True:
        cur = g(hi)
        if cur > prev * (1 + 1e-12):
            raise GTPBoundsError(f"bound is not monotone in m ({prev} at {lo}, {cur} at {hi})")
        if cur <= epsilon:
            break
        lo, prev = hi, cur
        hi *= 2
        if hi > 2**62:
            raise GTPBoundsError("sample size search diverged")
    while hi - lo > 1:
        mid = (lo + hi) // 2
        if g(mid) <= epsilon:
            hi = mid
        else:
            lo = mid
    return hi


@dataclass
class BoundReport:
    inputs: dict
    n_omega: float
    K: float
    B: float
    B_tilde: float
    rademacher_route: float
    covering_route: float
    chosen: float
    chosen_route: str
    flags: list = field(default_factory=list)
    notes: list = field(default_factory=list)
    extras: dict = field(default_factory=dict)

    def to_dict(self) -> dict:
        return json.loads(json.dumps(asdict(self), default=_jsonable))

    def to_json(self, **kw) -> str:
        return json.dumps(self.to_dict(), **kw)

    CSV_FIELDS = ("n_omega", "K", "B", "B_tilde", "rademacher_route", "covering_route", "chosen", "chosen_route")

    def csv_row(self) -> dict:
        row = {k: v for k, v in self.inputs.items() if not isinstance(v, (dict, list))}
        row.update({k: getattr(self, k) for k in self.CSV_FIELDS})
        return row


def _jsonable(o):
    if isinstance(o, (np.integer,)):
        return int(o)
    if isinstance(o, (np.floating,)):
        return float(o)
    if isinstance(o, np.ndarray):
        return o.tolist()
    if isinstance(o, LossSpec):
        return asdict(o)
    return str(o)


def reports_to_csv(reports: Sequence[BoundReport]) -> str:
    rows = [r.csv_row() for r in reports]
    keys = []
    for r in rows:
        keys.extend(k for k in r if k not in keys)
    buf = io.StringIO()
    w = csv.DictWriter(buf, fieldnames=keys, lineterminator="\n")
    w.writeheader()
    w.writerows(rows)
    return buf.getvalue()


def _split_N(N, d):
    if isinstance(N, (list, tuple)):
        if len(N) != d:
            raise ValidationError("per-coordinate N must have length d")
        return [int(n) for n in N]
    N = int(N)
    base, extra = divmod(N, d)
    return [base + (1 if i < extra else 0) for i in range(d)]


EXPONENTIAL_LOG_THRESHOLD = math.log(1e6)


def encoding_bound_report(kind, N, d=1, T=None, kappa=None, M_norm=1.0, loss: Optional[LossSpec] = None,
                          m=1000, delta=0.05, use_exact_omega=True, strategy: Optional[EncodingStrategy] = None,
                          delta_max=None, integer_spectrum=True, conjecture_opt_in=False,
                          corrected=True) -> BoundReport:
    """Both bound routes for a PQC encoding family.

    |Omega| comes from exact enumeration when ``strategy`` is given (or the
    family is Pauli) and ``use_exact_omega`` is set, otherwise from the
    closed-form per-coordinate bounds multiplied over coordinates.
    """
    if kind not in ("pauli", "same_T", "same_klocal", "diff_klocal"):
        raise ValidationError(f"unknown strategy kind {kind!r}")
    loss = loss or LossSpec("clipped_absolute", c=2.0 * M_norm)
    _check(m, delta)
    Ns = _split_N(N, d)
    flags, notes = [], ["explicit constants; the asymptotic statement hides them"]

    if kind == "pauli":
        per = [bound_pauli(n) for n in Ns]
        dmax = 2.0
    elif kind == "same_T":
        if T is None:
            raise ValidationError("same_T needs T")
        per = [bound_repeated(n, T) if n >= 1 else 1 for n in Ns]
        dmax = delta_max
    elif kind == "same_klocal":
        if kappa is None:
            raise ValidationError("same_klocal needs kappa")
        Tk = max_positive_differences(kappa, corrected=corrected)
        per = [bound_repeated(n, max(Tk, 1)) if n >= 1 else 1 for n in Ns]
        dmax = delta_max
    else:
        if kappa is None:
            raise ValidationError("diff_klocal needs kappa")
        per = [bound_klocal_worstcase(n, kappa, corrected=corrected) for n in Ns]
        dmax = delta_max
        flags.append("exponential_regime")
    log_bound = sum(math.log(p) for p in per)
    closed_form = 1
    for p in per:
        closed_form *= p
    if log_bound >= 700:
        closed_form = math.inf

    if strategy is None and kind == "pauli" and use_exact_omega:
        strategy = EncodingStrategy.pauli(Ns)
    exact_omega = None
    K = None
    if strategy is not None and use_exact_omega:
        fs = omega_total(strategy)
        exact_omega = len(fs)
        K = fs.K
        integer_spectrum = fs.is_integer
    if K is None:
        K = math.inf if dmax is None else float(dmax) * sum(Ns)

    if exact_omega is not None:
        n_omega = exact_omega
    elif isinstance(closed_form, int):
        n_omega = closed_form
    else:
        # |Omega| is an integer below the bound; the slack absorbs float rounding
        n_omega = math.floor(closed_form * (1 + 1e-12)) if math.isfinite(closed_form) else math.inf
    if log_bound > EXPONENTIAL_LOG_THRESHOLD and "exponential_regime" not in flags:
        flags.append("exponential_regime")

    B = float(M_norm)
    if integer_spectrum:
        B_tilde = 2.0 * B
    elif conjecture_opt_in:
        B_tilde = 2.0 * math.sqrt(n_omega) * B
        flags.append("conditional_on_coefficient_conjecture")
    else:
        raise CapabilityError(
            "B_tilde = 2B is only justified for integer frequency spectra; a general spectrum "
            "needs the unproven bound max|c_w| <= B (giving B_tilde = 2 sqrt(|Omega|) B). "
            "Pass conjecture_opt_in=True to use it."
        )
    params = dict(K=K, B=B, B_tilde=B_tilde, n_omega=n_omega, d=d, loss=loss)
    rad_route = route_bound("rademacher", params, m, delta)
    if n_omega > 1e12:
        cov_route = math.inf
        notes.append("covering route skipped: |Omega| too large for quadrature")
    else:
        cov_route = route_bound("covering", params, m, delta)
    chosen_route = "rademacher" if rad_route <= cov_route else "covering"
    extras = {
        "per_coordinate_bound": per,
        "omega_bound_product": closed_form,
        "omega_bound_amgm": bound_total_amgm([float(p) for p in per], d) if log_bound < 700 else math.inf,
        "omega_exact": exact_omega,
        "N_per_coordinate": Ns,
        "confidence_term": confidence_term(loss.c, m, delta),
    }
    inputs = dict(kind=kind, N=N, d=d, T=T, kappa=kappa, M_norm=M_norm, m=m, delta=delta,
                  loss=asdict(loss), use_exact_omega=use_exact_omega, corrected=corrected)
    return BoundReport(inputs, n_omega, K, B, B_tilde, rad_route, cov_route,
                       min(rad_route, cov_route), chosen_route, flags, notes, extras)


def union_bound_combine(bounds):
    """Smallest of several bounds, each already evaluated at delta/len(bounds)."""
    bounds = list(bounds)
    if not bounds:
        raise ValidationError("need at least one bound")
    label, value = min(bounds, key=lambda lv: lv[1])
    return label, float(value)


def combine_at_confidence(families, delta):
    """Evaluate callables g(delta') at delta' = delta/n and take the minimum.

    ``families`` is a sequence of (label, g) pairs.
    """
    families = list(families)
    if not families:
        raise ValidationError("need at least one bound family")
    share = delta / len(families)
    return union_bound_combine((label, g(share)) for label, g in families)
