"""``gtpb`` command-line entry point.

Every command reads a JSON config, validates it against a strict schema,
fills in defaults, runs, and writes a report that embeds the resolved
config. Exit codes: 0 success, 2 validation, 3 resource cap, 4 numeric.
"""

from __future__ import annotations

import argparse
import copy
import csv
import io
import json
import math
import sys
from datetime import datetime, timezone
from pathlib import Path

import jsonschema
import numpy as np

from . import complexity, encoding, genbounds, gtp, learn, operators, qsim
from .errors import CapabilityError, GTPBoundsError, NumericError, ResourceError, ValidationError

EXIT_OK, EXIT_VALIDATION, EXIT_RESOURCE, EXIT_NUMERIC = 0, 2, 3, 4

# schemas

_num = {"type": "number"}
_pos = {"type": "number", "exclusiveMinimum": 0}
_int1 = {"type": "integer", "minimum": 1}
_prob = {"type": "number", "exclusiveMinimum": 0, "exclusiveMaximum": 1}
_matrix = {
    "type": "object",
    "properties": {
        "re": {"type": "array", "items": {"type": "array", "items": _num}},
        "im": {"type": "array", "items": {"type": "array", "items": _num}},
    },
    "required": ["re"],
    "additionalProperties": False,
}
_generator = {
    "type": "object",
    "properties": {
        "pauli": {"type": "string", "pattern": "^[IXYZixyz]+$"},
        "spectrum": {"type": "array", "items": _num, "minItems": 1},
        "differences": {"type": "array", "items": _num, "minItems": 1},
        "matrix": _matrix,
    },
    "minProperties": 1,
    "maxProperties": 1,
    "additionalProperties": False,
}
_n_spec = {"oneOf": [{"type": "integer", "minimum": 0}, {"type": "array", "items": {"type": "integer", "minimum": 0}, "minItems": 1}]}
_strategy = {
    "type": "object",
    "properties": {
        "family": {"enum": ["pauli", "repeated", "custom"]},
        "N": _n_spec,
        "d": _int1,
        "label": {"type": "string", "pattern": "^[IXYZixyz]+$"},
        "generator": _generator,
        "per_coordinate": {"type": "array", "items": {"type": "array", "items": _generator}, "minItems": 1},
    },
    "required": ["family"],
    "additionalProperties": False,
}
_loss = {
    "type": "object",
    "properties": {"kind": {"enum": ["clipped_absolute", "clipped_squared"]}, "c": _pos, "L": _pos},
    "additionalProperties": False,
}
_omega_plus = {"type": "array", "items": {"oneOf": [_num, {"type": "array", "items": _num, "minItems": 1}]}}
_global = {
    "seed": {"type": "integer", "minimum": 0},
    "format": {"enum": ["json", "csv"]},
    "tolerance": _pos,
}


def _schema(props, required=()):
    return {
        "type": "object",
        "properties": {**_global, **props},
        "required": list(required),
        "additionalProperties": False,
    }


_layer = {
    "type": "object",
    "properties": {
        "type": {"enum": ["trainable", "rotation", "encoding"]},
        "qubits": {"type": "array", "items": {"type": "integer", "minimum": 0}, "minItems": 1},
        "qubit": {"type": "integer", "minimum": 0},
        "matrix": _matrix,
        "haar": {"type": "boolean"},
        "axis": {"enum": ["X", "Y", "Z", "x", "y", "z"]},
        "param": {"type": "integer", "minimum": 0},
        "coordinate": _int1,
        "pauli": {"type": "string", "pattern": "^[IXYZixyz]+$"},
        "spectrum": {"type": "array", "items": _num, "minItems": 1},
    },
    "required": ["type"],
    "additionalProperties": False,
}

SCHEMAS = {
    "omega": _schema({
        "strategy": _strategy,
        "cap": _int1,
        "kappa": _int1,
        "emit_limit": {"type": "integer", "minimum": 0},
    }, ["strategy"]),
    "bounds": _schema({
        "kind": {"enum": ["pauli", "same_T", "same_klocal", "diff_klocal"]},
        "N": _n_spec,
        "d": _int1,
        "T": _int1,
        "kappa": _int1,
        "M_norm": _pos,
        "loss": _loss,
        "m": _int1,
        "delta": _prob,
        "epsilons": {"type": "array", "items": _prob},
        "use_exact_omega": {"type": "boolean"},
        "delta_max": _pos,
        "integer_spectrum": {"type": "boolean"},
        "conjecture_opt_in": {"type": "boolean"},
        "corrected": {"type": "boolean"},
    }, ["kind", "N"]),
    "rademacher": _schema({
        "omega_plus": _omega_plus,
        "d": _int1,
        "B_tilde": _pos,
        "m": _int1,
        "n_sigma_samples": {"type": "integer", "minimum": 2},
        "x_distribution": {"enum": ["uniform", "grid"]},
    }),
    "cover-check": _schema({
        "omega_plus": _omega_plus,
        "d": _int1,
        "B_tilde": _pos,
        "epsilon": _pos,
        "n_samples": _int1,
        "cap": _int1,
        "oversample": _int1,
    }),
    "simulate": _schema({
        "n_qubits": _int1,
        "d": _int1,
        "observable": _generator,
        "layers": {"type": "array", "items": _layer},
        "theta": {"type": "array", "items": _num},
        "grid_sizes": {"type": "array", "items": _int1},
        "n_check_points": {"type": "integer", "minimum": 0},
        "probe": {
            "type": "object",
            "properties": {
                "n_trials": _int1,
                "n_qubits": {"type": "array", "items": _int1, "minItems": 1},
                "max_encodings": _int1,
                "observable": {"enum": ["pauli", "random_hermitian"]},
            },
            "additionalProperties": False,
        },
    }),
    "srm": _schema({
        "candidates": {
            "oneOf": [
                {
                    "type": "object",
                    "properties": {"family": {"const": "pauli"}, "k": {"type": "array", "items": _int1, "minItems": 1},
                                   "B_tilde": _pos},
                    "required": ["family", "k"],
                    "additionalProperties": False,
                },
                {
                    "type": "array",
                    "minItems": 1,
                    "items": {
                        "type": "object",
                        "properties": {"k": {"type": "integer"}, "omega_plus": _omega_plus, "B_tilde": _pos},
                        "required": ["k", "omega_plus"],
                        "additionalProperties": False,
                    },
                },
            ]
        },
        "B_tilde": _pos,
        "data": {
            "type": "object",
            "properties": {
                "csv": {"type": "string"},
                "synth": {
                    "type": "object",
                    "properties": {
                        "target": {
                            "type": "object",
                            "properties": {"d": _int1, "omega_plus": _omega_plus, "a0": _num,
                                           "a": {"type": "array", "items": _num},
                                           "b": {"type": "array", "items": _num}, "B_tilde": _pos},
                            "additionalProperties": False,
                        },
                        "pauli_k": _int1,
                        "noise_sigma": {"type": "number", "minimum": 0},
                        "m": _int1,
                        "x_distribution": {"enum": ["uniform", "grid"]},
                    },
                    "additionalProperties": False,
                },
            },
            "additionalProperties": False,
            "maxProperties": 1,
        },
        "delta": _prob,
        "loss": _loss,
        "bound_route": {"enum": ["rademacher", "covering", "min"]},
        "coverage": {
            "type": "object",
            "properties": {"trials": {"type": "integer", "minimum": 0}, "n_eval": {"type": "integer", "minimum": 2}},
            "additionalProperties": False,
        },
    }),
    "table1": _schema({
        "families": {
            "type": "array",
            "minItems": 1,
            "items": {
                "type": "object",
                "properties": {
                    "name": {"type": "string"},
                    "kind": {"enum": ["pauli", "repeated", "constant"]},
                    "generator": _generator,
                    "N_values": {"type": "array", "items": _int1, "minItems": 3},
                    "exponent": {"type": "number", "minimum": 0},
                    "two_sided": {"type": "boolean"},
                },
                "required": ["kind", "N_values"],
                "additionalProperties": False,
            },
        },
        "slack": {"type": "number", "minimum": 0},
        "cap": _int1,
    }),
}

DEFAULTS = {
    "omega": {"cap": encoding.DEFAULT_CAP, "emit_limit": 10000},
    "bounds": {"d": 1, "M_norm": 1.0, "m": 1000, "delta": 0.05, "epsilons": [], "use_exact_omega": True,
               "integer_spectrum": True, "conjecture_opt_in": False, "corrected": True},
    "rademacher": {"omega_plus": [1, 2, 3], "d": 1, "B_tilde": 2.0, "m": 100, "n_sigma_samples": 10000,
                   "x_distribution": "uniform"},
    "cover-check": {"omega_plus": [1], "d": 1, "B_tilde": 1.0, "epsilon": 0.3, "n_samples": 1000,
                    "cap": complexity.DEFAULT_COVER_CAP, "oversample": 4},
    "simulate": {
        "n_qubits": 1,
        "d": 1,
        "observable": {"pauli": "Z"},
        "layers": [
            {"type": "trainable", "qubits": [0], "haar": True},
            {"type": "encoding", "coordinate": 1, "qubits": [0], "pauli": "Z"},
            {"type": "trainable", "qubits": [0], "haar": True},
            {"type": "encoding", "coordinate": 1, "qubits": [0], "pauli": "Z"},
            {"type": "trainable", "qubits": [0], "haar": True},
            {"type": "encoding", "coordinate": 1, "qubits": [0], "pauli": "Z"},
            {"type": "trainable", "qubits": [0], "haar": True},
        ],
        "theta": [],
        "n_check_points": 50,
    },
    "srm": {
        "candidates": {"family": "pauli", "k": [1, 2, 3, 4, 5, 6]},
        "B_tilde": 2.0,
        "data": {"synth": {
            "target": {"omega_plus": [2, 4, 6], "a0": 0.0, "a": [0.0, 0.0, 0.0], "b": [0.0, 0.0, 1.9]},
            "noise_sigma": 0.0, "m": 500, "x_distribution": "uniform",
        }},
        "delta": 0.05,
        "loss": {"kind": "clipped_absolute", "c": 2.0},
        "bound_route": "rademacher",
        "coverage": {"trials": 0, "n_eval": 2000},
    },
    "table1": {
        "families": [
            {"name": "pauli", "kind": "pauli", "N_values": [2, 4, 8], "two_sided": True},
            {"name": "repeated_T2", "kind": "repeated", "generator": {"differences": [0, 1, -1, 3, -3]},
             "N_values": [2, 3, 4, 5, 6]},
            {"name": "repeated_T3", "kind": "repeated", "generator": {"spectrum": [0, 1, 3]},
             "N_values": [2, 3, 4, 5, 6]},
            {"name": "constant", "kind": "constant", "N_values": [1, 2, 4, 8]},
        ],
        "slack": 0.15,
        "cap": encoding.DEFAULT_CAP,
    },
}


def resolve_config(command: str, raw: dict, seed=None) -> dict:
    """Validate ``raw`` and merge it over the command defaults."""
    if command not in SCHEMAS:
        raise ValidationError(f"unknown command {command!r}")
    try:
        jsonschema.validate(raw, SCHEMAS[command])
    except jsonschema.ValidationError as exc:
        where = "/".join(str(p) for p in exc.absolute_path) or "<root>"
        raise ValidationError(f"config invalid at {where}: {exc.message}") from None
    cfg = copy.deepcopy(DEFAULTS[command])
    for k, v in raw.items():
        if isinstance(v, dict) and isinstance(cfg.get(k), dict) and k not in ("data", "candidates", "observable"):
            cfg[k] = {**cfg[k], **v}
        else:
            cfg[k] = copy.deepcopy(v)
    cfg.setdefault("seed", 0)
    cfg.setdefault("format", "json")
    cfg.setdefault("tolerance", operators.DEFAULT_DEDUP_TOL)
    if seed is not None:
        cfg["seed"] = int(seed)
    return cfg


# config object builders


def build_matrix(desc) -> np.ndarray:
    re = np.asarray(desc["re"], dtype=float)
    im = np.asarray(desc.get("im", np.zeros_like(re)), dtype=float)
    if re.ndim != 2 or re.shape != im.shape:
        raise ValidationError("matrix re/im parts must be equal-shaped 2-d arrays")
    return re + 1j * im


def build_generator(desc):
    if "pauli" in desc:
        return operators.make_pauli_string(desc["pauli"])
    if "spectrum" in desc:
        return operators.make_diagonal(desc["spectrum"])
    if "differences" in desc:
        return operators.difference_set_from_values(desc["differences"])
    return operators.HermitianOperator(build_matrix(desc["matrix"]))


def build_strategy(desc) -> encoding.EncodingStrategy:
    fam = desc["family"]
    if fam == "custom":
        if "per_coordinate" not in desc:
            raise ValidationError("custom strategy needs per_coordinate")
        return encoding.EncodingStrategy(tuple(tuple(build_generator(g) for g in c) for c in desc["per_coordinate"]))
    N = desc.get("N", 0)
    d = int(desc.get("d", len(N) if isinstance(N, list) else 1))
    Ns = genbounds._split_N(N, d)
    if fam == "pauli":
        return encoding.EncodingStrategy.pauli(Ns, desc.get("label", "Z"))
    if "generator" not in desc:
        raise ValidationError("repeated strategy needs a generator")
    return encoding.EncodingStrategy.repeated(build_generator(desc["generator"]), Ns)


def build_omega_plus(values, d) -> np.ndarray:
    w = np.asarray(values, dtype=float)
    if w.size == 0:
        return np.zeros((0, d))
    w = w.reshape(-1, d) if w.ndim == 1 else w
    if w.shape[1] != d:
        raise ValidationError(f"omega_plus rows must have length d = {d}")
    return w


def build_circuit(cfg, rng) -> qsim.CircuitSpec:
    n = cfg["n_qubits"]
    layers = []
    for i, L in enumerate(cfg["layers"]):
        t = L["type"]
        if t == "trainable":
            qubits = tuple(L.get("qubits", range(n)))
            if "matrix" in L:
                U = build_matrix(L["matrix"])
            elif L.get("haar", False):
                U = qsim.haar_unitary(2 ** len(qubits), rng)
            else:
                raise ValidationError(f"layer {i}: trainable needs a matrix or haar: true")
            layers.append(qsim.Trainable(qubits, U))
        elif t == "rotation":
            if "axis" not in L or "qubit" not in L or "param" not in L:
                raise ValidationError(f"layer {i}: rotation needs axis, qubit and param")
            layers.append(qsim.Rotation(L["axis"], L["qubit"], L["param"]))
        else:
            if "qubits" not in L or "coordinate" not in L:
                raise ValidationError(f"layer {i}: encoding needs qubits and coordinate")
            gen = {k: L[k] for k in ("pauli", "spectrum", "matrix") if k in L}
            if len(gen) != 1:
                raise ValidationError(f"layer {i}: encoding needs exactly one of pauli/spectrum/matrix")
            layers.append(qsim.Encoding(L["coordinate"], build_generator(gen), tuple(L["qubits"])))
    M = build_generator(cfg["observable"])
    if not isinstance(M, operators.HermitianOperator):
        raise ValidationError("observable must be an operator")
    return qsim.CircuitSpec(n, layers, M, cfg["d"])


# commands return (report dict, csv rows)


def cmd_omega(cfg):
    strat = build_strategy(cfg["strategy"])
    tol, cap = cfg["tolerance"], cfg["cap"]
    per_card = encoding.coordinate_cardinalities(strat, tol, cap)
    total = int(np.prod([int(c) for c in per_card], dtype=object))
    out = {"omega_cardinality": total, "per_coordinate_cardinality": list(per_card),
           "N_per_coordinate": list(strat.n_per_coordinate)}
    rows = []
    try:
        fs = encoding.omega_total(strat, tol, cap)
        out["K_per_coordinate"] = list(fs.K_per_coordinate)
        out["K"] = fs.K
        out["integer_spectrum"] = fs.is_integer
        out["capped"] = False
        if len(fs) <= cfg["emit_limit"]:
            vecs = fs.vectors
            out["omega"] = (vecs.astype(int) if fs.is_integer else vecs).tolist()
            rows = [{f"w{i + 1}": v for i, v in enumerate(r)} for r in out["omega"]]
    except ResourceError as exc:
        out["capped"] = True
        out["note"] = str(exc)
    out["bounds"] = _closed_form_bounds(strat, cfg, tol)
    if not rows:
        rows = [{"coordinate": i + 1, "cardinality": c} for i, c in enumerate(per_card)]
    return out, rows


def _closed_form_bounds(strat, cfg, tol):
    per_rep, per_kl = [], []
    kappa = cfg.get("kappa")
    for gens in strat.per_coordinate:
        n = len(gens)
        if n == 0:
            per_rep.append(1)
            per_kl.append(1)
            continue
        deltas = {tuple(np.round(np.asarray(encoding._deltas(g, tol).values, dtype=float) / tol).astype(np.int64))
                  for g in gens}
        if len(deltas) == 1:
            T = (len(next(iter(deltas))) - 1) // 2
            per_rep.append(encoding.bound_repeated(n, T) if T >= 1 else 1)
        else:
            per_rep.append(None)
        k = kappa
        if k is None:
            dims = [g.dim for g in gens if isinstance(g, operators.HermitianOperator)]
            k = int(round(math.log2(max(dims)))) if len(dims) == n else None
        per_kl.append(encoding.bound_klocal_worstcase(n, k, corrected=True) if k else None)
    out = {}
    for name, per in (("repeated", per_rep), ("klocal_worstcase_corrected", per_kl)):
        if all(p is not None for p in per):
            out[name] = {
                "per_coordinate": [float(p) for p in per],
                "product": float(np.prod([float(p) for p in per])),
                "amgm": encoding.bound_total_amgm(per, strat.d),
            }
    return out


def cmd_bounds(cfg):
    loss = genbounds.LossSpec(**cfg["loss"]) if "loss" in cfg else None
    rep = genbounds.encoding_bound_report(
        cfg["kind"], cfg["N"], d=cfg["d"], T=cfg.get("T"), kappa=cfg.get("kappa"), M_norm=cfg["M_norm"],
        loss=loss, m=cfg["m"], delta=cfg["delta"], use_exact_omega=cfg["use_exact_omega"],
        delta_max=cfg.get("delta_max"), integer_spectrum=cfg["integer_spectrum"],
        conjecture_opt_in=cfg["conjecture_opt_in"], corrected=cfg["corrected"],
    )
    params = dict(K=rep.K, B=rep.B, B_tilde=rep.B_tilde, n_omega=rep.n_omega, d=cfg["d"],
                  loss=loss or genbounds.LossSpec("clipped_absolute", c=2.0 * cfg["M_norm"]))
    inversions = []
    for eps in cfg["epsilons"]:
        for route, val in (("rademacher", rep.rademacher_route), ("covering", rep.covering_route)):
            if not math.isfinite(val):
                inversions.append({"epsilon": eps, "route": route, "m_required": None})
                continue
            m_req = genbounds.sample_size_for_gap(eps, cfg["delta"], params, route)
            inversions.append({"epsilon": eps, "route": route, "m_required": m_req})
    out = rep.to_dict()
    out["sample_size_inversions"] = inversions
    base = rep.csv_row()
    rows = [{**base, **inv} for inv in inversions] or [base]
    return out, rows


def cmd_rademacher(cfg):
    d = cfg["d"]
    w = build_omega_plus(cfg["omega_plus"], d)
    B_tilde, m = cfg["B_tilde"], cfg["m"]
    rng = np.random.default_rng([cfg["seed"], 1])
    if cfg["x_distribution"] == "uniform":
        X = rng.uniform(0, 2 * np.pi, size=(m, d))
    else:
        if d != 1:
            raise CapabilityError("grid inputs are only supported for d = 1")
        X = (np.arange(m) * (2 * np.pi / m))[:, None]
    est = complexity.rademacher_mc(w, B_tilde, X, cfg["n_sigma_samples"], cfg["seed"])
    sigma = rng.choice([-1.0, 1.0], size=m)
    n_omega = 2 * w.shape[0] + 1
    K = gtp.frequency_reach(w)
    v1 = complexity.rademacher_bound_v1(K, B_tilde, w.shape[0], d, m)
    v2 = complexity.rademacher_bound_v2(B_tilde, n_omega, m) if n_omega >= 2 else None
    bmin = complexity.rademacher_bound_min(K, B_tilde, n_omega, d, m)
    dud = complexity.dudley_rademacher_bound(complexity.ball_sup_bound(B_tilde, n_omega), B_tilde, n_omega, m)
    out = {
        "mc_mean": est.mean,
        "mc_std_error": est.std_error,
        "n_sigma_samples": est.n_sigma_samples,
        "closed_form_sample": complexity.rademacher_sup_closed_form(w, B_tilde, X, sigma),
        "n_omega": n_omega,
        "K": K,
        "bound_v1": v1,
        "bound_v2": v2,
        "bound_min": bmin,
        "bound_chaining": dud,
        "sound": bool(est.mean <= bmin + 3 * est.std_error and est.mean <= dud + 3 * est.std_error),
    }
    return out, [out]


def cmd_cover_check(cfg):
    d = cfg["d"]
    w = build_omega_plus(cfg["omega_plus"], d)
    B_tilde, eps = cfg["B_tilde"], cfg["epsilon"]
    net = complexity.construct_cover(w, B_tilde, eps, cap=cfg["cap"])
    radius, _ = complexity.verify_cover(net, cfg["n_samples"], cfg["seed"], cfg["oversample"])
    n_omega = 2 * w.shape[0] + 1
    cb = complexity.covering_number_bound(B_tilde, n_omega, eps)
    out = {
        "n_omega": n_omega,
        "net_size": len(net),
        "coefficient_radius": net.coefficient_radius,
        "covering_bound": cb.value,
        "log2_covering_bound": cb.log2_value,
        "inner_ball_net_bound": cb.inner_ball_net,
        "bound_at_least_net_size": bool(cb.log2_value >= math.log2(len(net))),
        "empirical_radius": radius,
        "radius_within_epsilon": bool(radius <= eps),
    }
    return out, [out]


def cmd_simulate(cfg):
    rng = np.random.default_rng(cfg["seed"])
    circ = build_circuit(cfg, rng)
    theta = np.asarray(cfg["theta"], dtype=float)
    if theta.size < circ.n_params:
        theta = np.concatenate([theta, rng.uniform(0, 2 * np.pi, circ.n_params - theta.size)])
    omega = qsim.derived_omega(circ, cfg["tolerance"])
    ext = qsim.extract_fourier(circ, theta, cfg.get("grid_sizes"), omega)
    X = rng.uniform(0, 2 * np.pi, size=(cfg["n_check_points"], circ.d))
    recon = float(np.max(np.abs(qsim.reconstruct(ext, X) - qsim.expectations(circ, theta, X)))) if len(X) else 0.0
    M_norm = operators.operator_norm(circ.observable)
    allowed = {tuple(r) for r in omega.keys.tolist()}
    out = {
        "omega_cardinality": len(omega),
        "omega": omega.keys.tolist(),
        "support": [list(s) for s in ext.support],
        "support_within_omega": all(s in allowed for s in ext.support),
        "max_offgrid_leakage": ext.max_offgrid_leakage,
        "symmetry_residual": ext.symmetry_residual,
        "grid_sup": ext.grid_sup,
        "M_norm": M_norm,
        "sup_within_M_norm": bool(ext.grid_sup <= M_norm + 1e-9),
        "reconstruction_error": recon,
        "theta": theta.tolist(),
        "grid_sizes": list(ext.grid_sizes),
        "coefficients": ext.as_dict()["coefficients"],
    }
    if "probe" in cfg:
        p = dict(cfg["probe"])
        n_trials = p.pop("n_trials", 100)
        out["conjecture_probe"] = qsim.conjecture_probe(p, n_trials, cfg["seed"])
    rows = [{"omega": ";".join(str(v) for v in c["omega"]), "re": c["re"], "im": c["im"]}
            for c in out["coefficients"]]
    return out, rows


def _srm_candidates(cfg):
    spec = cfg["candidates"]
    if isinstance(spec, dict):
        return learn.pauli_candidates(spec["k"], spec.get("B_tilde", cfg["B_tilde"]))
    out = []
    for c in spec:
        w = np.asarray(c["omega_plus"], dtype=float)
        w = w[:, None] if w.ndim == 1 else w.reshape(-1, 1) if w.size == 0 else w
        out.append(learn.Candidate(c["k"], w, float(c.get("B_tilde", cfg["B_tilde"]))))
    return out


def _srm_target(synth, B_tilde, seed):
    if "target" in synth:
        return gtp.GTPModel.from_dict({"B_tilde": B_tilde, "d": 1, **synth["target"]})
    k = synth.get("pauli_k", 3)
    w = learn.pauli_candidates([k], B_tilde)[0].omega_plus
    return gtp.random_model(w, B_tilde, [seed, 7], mode="ball")


def cmd_srm(cfg):
    loss = genbounds.LossSpec(**cfg["loss"])
    cands = _srm_candidates(cfg)
    data = cfg["data"]
    target = None
    if "csv" in data:
        S = learn.DataSet.from_csv(data["csv"])
    else:
        synth = {"noise_sigma": 0.0, "m": 500, "x_distribution": "uniform", **data.get("synth", {})}
        if "target" not in synth and "pauli_k" not in synth:
            raise ValidationError("synthetic data needs a target or pauli_k")
        target = _srm_target(synth, cfg["B_tilde"], cfg["seed"])
        S = learn.synth_data(target, synth["noise_sigma"], synth["m"], [cfg["seed"], 0], synth["x_distribution"])
    res = learn.srm_select(cands, S, cfg["delta"], loss, cfg["bound_route"])
    out = res.to_dict()
    cov = cfg["coverage"]
    if cov["trials"] > 0:
        if target is None:
            raise ValidationError("coverage trials need a synthetic data source")
        sampler = learn.UniformSampler(target, S.d, synth["noise_sigma"])
        hits, gaps = 0, []
        for t in range(cov["trials"]):
            St = learn.synth_data(target, synth["noise_sigma"], synth["m"], [cfg["seed"], 100 + t], synth["x_distribution"])
            rt = learn.srm_select(cands, St, cfg["delta"], loss, cfg["bound_route"])
            gap = learn.generalization_gap(rt.model, St, sampler, cov["n_eval"], [cfg["seed"], 10_000 + t], loss)
            gaps.append(gap)
            hits += gap <= rt.selected.bound_value
        out["coverage"] = {"trials": cov["trials"], "fraction_within_bound": hits / cov["trials"],
                           "max_gap": max(gaps), "mean_gap": float(np.mean(gaps))}
    rows = list(csv.DictReader(io.StringIO(res.to_csv())))
    return out, rows


def cmd_table1(cfg):
    rows = []
    slack = cfg["slack"]
    for fam in cfg["families"]:
        kind = fam["kind"]
        if kind == "pauli":
            family = lambda n: encoding.EncodingStrategy.pauli([n])  # noqa: E731
            expo = 1.0
        elif kind == "constant":
            ident = operators.difference_set_from_values([0])
            family = lambda n, g=ident: encoding.EncodingStrategy.repeated(g, [n])  # noqa: E731
            expo = 0.0
        else:
            if "generator" not in fam:
                raise ValidationError("repeated family needs a generator")
            gen = build_generator(fam["generator"])
            T = encoding._deltas(gen, cfg["tolerance"]).positive_count
            family = lambda n, g=gen: encoding.EncodingStrategy.repeated(g, [n])  # noqa: E731
            expo = encoding.table1_exponent("same_T", T=T)
        expo = fam.get("exponent", expo)
        sizes = [encoding.omega_cardinality(family(n), cfg["tolerance"], cfg["cap"]) for n in fam["N_values"]]
        slope = encoding.scaling_exponent_fit(family, fam["N_values"], cfg["tolerance"], cfg["cap"])
        ok = slope <= expo + slack and (not fam.get("two_sided", False) or slope >= expo - slack)
        rows.append({"name": fam.get("name", kind), "kind": kind, "slope": slope, "exponent": expo,
                     "passed": bool(ok), "N_values": fam["N_values"], "cardinalities": sizes})
    return {"families": rows, "slack": slack, "all_passed": all(r["passed"] for r in rows)}, rows


COMMANDS = {
    "omega": cmd_omega,
    "bounds": cmd_bounds,
    "rademacher": cmd_rademacher,
    "cover-check": cmd_cover_check,
    "simulate": cmd_simulate,
    "srm": cmd_srm,
    "table1": cmd_table1,
}


def _json_default(o):
    if isinstance(o, np.integer):
        return int(o)
    if isinstance(o, np.floating):
        return float(o)
    if isinstance(o, np.bool_):
        return bool(o)
    if isinstance(o, np.ndarray):
        return o.tolist()
    return str(o)


def _finite(o):
    # JSON has no inf/nan; emit them as strings so output stays standard
    if isinstance(o, float) and not math.isfinite(o):
        return "inf" if o > 0 else "-inf" if o < 0 else "nan"
    if isinstance(o, dict):
        return {k: _finite(v) for k, v in o.items()}
    if isinstance(o, (list, tuple)):
        return [_finite(v) for v in o]
    return o


def run(command: str, raw_config: dict, seed=None, fmt=None):
    """Run one command; returns the rendered report text."""
    cfg = resolve_config(command, raw_config, seed)
    if fmt is not None:
        cfg["format"] = fmt
    result, rows = COMMANDS[command](cfg)
    stamp = datetime.now(timezone.utc).isoformat()
    if cfg["format"] == "csv":
        buf = io.StringIO()
        buf.write(f"# command: {command}\n# timestamp: {stamp}\n")
        buf.write("# config: " + json.dumps(cfg, sort_keys=True) + "\n")
        keys = []
        for r in rows:
            keys.extend(k for k in r if k not in keys)
        w = csv.DictWriter(buf, fieldnames=keys, lineterminator="\n")
        w.writeheader()
        for r in rows:
            w.writerow({k: json.dumps(v, default=_json_default) if isinstance(v, (list, dict)) else v for k, v in r.items()})
        return buf.getvalue()
    report = {"command": command, "timestamp": stamp, "config": cfg, "result": result}
    report = json.loads(json.dumps(report, default=_json_default))
    return json.dumps(_finite(report), indent=2, sort_keys=True, allow_nan=False) + "\n"


def _exit_code(exc) -> int:
    if isinstance(exc, ResourceError):
        return EXIT_RESOURCE
    if isinstance(exc, NumericError):
        return EXIT_NUMERIC
    if isinstance(exc, (ValidationError, CapabilityError)):
        return EXIT_VALIDATION
    return 1


def main(argv=None) -> int:
    parser = argparse.ArgumentParser(prog="gtpb", description="Generalization bounds for trigonometric-polynomial models.")
    parser.add_argument("command", choices=sorted(COMMANDS))
    parser.add_argument("--config", required=True, help="JSON config file")
    parser.add_argument("--out", help="output path (default: stdout)")
    parser.add_argument("--seed", type=int, help="overrides the config seed")
    parser.add_argument("--format", choices=["json", "csv"], help="overrides the config format")
    args = parser.parse_args(argv)
    try:
        try:
            raw = json.loads(Path(args.config).read_text())
        except (OSError, json.JSONDecodeError) as exc:
            raise ValidationError(f"cannot read config {args.config}: {exc}") from None
        if not isinstance(raw, dict):
            raise ValidationError("config must be a JSON object")
        text = run(args.command, raw, args.seed, args.format)
    except GTPBoundsError as exc:
        print(f"gtpb {args.command}: {exc}", file=sys.stderr)
        return _exit_code(exc)
    if args.out:
        Path(args.out).write_text(text)
    else:
        sys.stdout.write(text)
    return EXIT_OK


if __name__ == "__main__":
    sys.exit(main())
