"""Config-driven experiments: constructions, counterexamples, property battery.

Reports are plain dicts serialized to JSON. Everything that goes into a
report is a function of the config and seed only, so identical configs
produce byte-identical report files; wall-clock timings are kept apart in
a ``.timings.json`` sidecar.
"""

from __future__ import annotations

import csv
import json
import logging
import math
import os
import time
from concurrent.futures import ThreadPoolExecutor
from contextlib import contextmanager
from dataclasses import dataclass, field
from pathlib import Path

import jsonschema
import numpy as np

from . import counterexamples as cx
from . import frames
from . import operators as ops
from . import riesz
from . import sampling
from .errors import ConfigError, MvFrameError
from .group import MAX_GROUP_SIZE, GroupSpec, scalar_onb
from .space import MAX_MATRIX_SIDE, MatFn, SpaceSpec, frob_norm, mat_inner, trace_inner

log = logging.getLogger(__name__)

CONSTRUCTIONS = (
    "identity", "i_plus_t", "neumann", "sqrt_chain", "jordan_parts", "unitary_parts",
    "cartesian_unitaries", "polar", "holub_forward", "holub_converse", "counterexamples",
)

DEFAULT_TOLERANCES = {
    "adjoint": 1e-10,
    "frame": 1e-8,
    "reconstruction": 1e-8,
    "unitary": 1e-8,
    "holub": 1e-8,
    "sqrt_chain_bounds": 1e-7,
}

EXIT_OK, EXIT_CONFIG, EXIT_NUMERIC = 0, 2, 3

CONFIG_SCHEMA = {
    "type": "object",
    "required": ["group", "s", "r", "construction"],
    "additionalProperties": False,
    "properties": {
        "group": {"type": "array", "minItems": 1, "items": {"type": "integer", "minimum": 1}},
        "s": {"type": "integer", "minimum": 1, "maximum": MAX_MATRIX_SIDE},
        "r": {"type": "integer", "minimum": 1, "maximum": MAX_MATRIX_SIDE},
        "construction": {"enum": list(CONSTRUCTIONS)},
        "params": {"type": "object"},
        "seed": {"type": "integer", "minimum": 0, "maximum": 2 ** 64 - 1},
        "tolerances": {
            "type": "object",
            "additionalProperties": {"type": "number", "exclusiveMinimum": 0},
        },
        "output": {"type": "string", "minLength": 1},
    },
}

PARAM_SCHEMAS = {
    "i_plus_t": {"n": {"type": "integer", "minimum": 1}, "with_s": {"type": "boolean"}},
    "neumann": {"norm": {"type": "number", "exclusiveMinimum": 0, "exclusiveMaximum": 1},
                "n_max": {"type": "integer", "minimum": 0}},
    "sqrt_chain": {"n": {"type": "integer", "minimum": 1}, "n_max": {"type": "integer", "minimum": 1},
                   "norm": {"type": "number", "exclusiveMinimum": 0},
                   "min_eig": {"type": "number", "exclusiveMinimum": 0}},
    "counterexamples": {},
}


@dataclass
class ExperimentConfig:
    group: tuple
    s: int
    r: int
    construction: str
    params: dict = field(default_factory=dict)
    seed: int = 0
    tolerances: dict = field(default_factory=dict)
    output: str | None = None

    @property
    def space(self) -> SpaceSpec:
        return SpaceSpec(GroupSpec(tuple(self.group)), self.s, self.r)

    def tol(self, name: str) -> float:
        return float(self.tolerances.get(name, DEFAULT_TOLERANCES[name]))

    def to_dict(self) -> dict:
        """Echo for reports; the output prefix is left out so reports do not depend on location."""
        return {"group": list(self.group), "s": self.s, "r": self.r,
                "construction": self.construction, "params": dict(self.params),
                "seed": self.seed, "tolerances": {**DEFAULT_TOLERANCES, **self.tolerances}}


def _path(parts) -> str:
    out = "$"
    for p in parts:
        out += f"[{p}]" if isinstance(p, int) else f".{p}"
    return out


def parse_config(data) -> ExperimentConfig:
    """Validate a decoded JSON config; raises ConfigError listing (path, message) pairs."""
    validator = jsonschema.Draft202012Validator(CONFIG_SCHEMA)
    errors = [(_path(e.absolute_path), e.message)
              for e in sorted(validator.iter_errors(data), key=lambda e: list(e.absolute_path))]
    if not errors:
        extra = PARAM_SCHEMAS.get(data["construction"])
        if extra is not None:
            schema = {"type": "object", "properties": extra, "additionalProperties": False}
            for e in jsonschema.Draft202012Validator(schema).iter_errors(data.get("params", {})):
                errors.append((_path(["params", *e.absolute_path]), e.message))
    if not errors:
        size = math.prod(data["group"])
        if size > MAX_GROUP_SIZE:
            errors.append(("$.group", f"|G| = {size} exceeds {MAX_GROUP_SIZE}"))
        if data["construction"] == "counterexamples":
            if (data["s"], data["r"]) != (2, 2):
                errors.append(("$.s", "counterexamples are defined for s = r = 2"))
        elif data["r"] % data["s"]:
            errors.append(("$.r", f"orthonormal basis construction needs s | r (s={data['s']}, r={data['r']})"))
        unknown = set(data.get("tolerances", {})) - set(DEFAULT_TOLERANCES)
        for k in sorted(unknown):
            errors.append((f"$.tolerances.{k}", f"unknown tolerance; known: {sorted(DEFAULT_TOLERANCES)}"))
    if errors:
        raise ConfigError("invalid config: " + "; ".join(f"{p}: {m}" for p, m in errors), errors)
    return ExperimentConfig(
        group=tuple(data["group"]), s=data["s"], r=data["r"], construction=data["construction"],
        params=dict(data.get("params", {})), seed=int(data.get("seed", 0)),
        tolerances=dict(data.get("tolerances", {})), output=data.get("output"),
    )


def load_config(path) -> ExperimentConfig:
    try:
        data = json.loads(Path(path).read_text(encoding="utf-8"))
    except json.JSONDecodeError as exc:
        raise ConfigError(f"{path}: not valid JSON ({exc})", [("$", str(exc))]) from exc
    except OSError as exc:
        raise ConfigError(f"cannot read {path}: {exc}", [("$", str(exc))]) from exc
    return parse_config(data)


# report assembly ---------------------------------------------------------------

class RunReport:
    """Accumulates frame/operator reports, verdicts and metrics for one run."""

    def __init__(self, config: dict):
        self.config = config
        self.frame_reports: dict = {}
        self.op_reports: dict = {}
        self.verdicts: dict = {}
        self.metrics: dict = {}
        self.sections: dict = {}
        self.errors: list = []
        self.table: list | None = None
        self.table_columns: list | None = None
        self.timings: dict = {}

    @contextmanager
    def timed(self, name: str):
        t0 = time.perf_counter()
        try:
            yield
        finally:
            self.timings[name] = self.timings.get(name, 0.0) + time.perf_counter() - t0

    def verdict(self, name: str, ok) -> bool:
        self.verdicts[name] = bool(ok)
        return bool(ok)

    def metric(self, name: str, value) -> None:
        self.metrics[name] = value if isinstance(value, (int, str, bool)) else float(value)

    def frame(self, name: str, rb, tol: float, recon_tol: float, seed: int):
        rep = frames.verify_riesz(rb, tol=tol, seed=seed, recon_tol=recon_tol)
        self.frame_reports[name] = rep
        self.verdict(f"{name}.riesz", rep.passed)
        return rep

    def op(self, name: str, U, tol: float):
        rep = ops.op_report(U, tol)
        self.op_reports[name] = rep
        return rep

    @property
    def passed(self) -> bool:
        return not self.errors and all(self.verdicts.values())

    def to_dict(self) -> dict:
        out = {
            "config": self.config,
            "passed": self.passed,
            "verdicts": dict(self.verdicts),
            "metrics": dict(self.metrics),
            "frame_reports": {k: v.to_dict() for k, v in self.frame_reports.items()},
            "op_reports": {k: v.to_dict() for k, v in self.op_reports.items()},
        }
        if self.sections:
            out["sections"] = self.sections
        if self.table is not None:
            out["table"] = {"columns": self.table_columns, "rows": self.table}
        if self.errors:
            out["errors"] = self.errors
        return out

    def write(self, prefix) -> list:
        prefix = str(prefix)
        Path(prefix).parent.mkdir(parents=True, exist_ok=True)
        written = []
        path = f"{prefix}.report.json"
        with open(path, "w", encoding="utf-8", newline="\n") as fh:
            json.dump(self.to_dict(), fh, indent=2)
            fh.write("\n")
        written.append(path)
        if self.table is not None:
            path = f"{prefix}.table.csv"
            write_csv(path, self.table_columns, self.table)
            written.append(path)
        path = f"{prefix}.timings.json"
        with open(path, "w", encoding="utf-8") as fh:
            json.dump({k: round(v, 6) for k, v in self.timings.items()}, fh, indent=2)
        written.append(path)
        return written


def fmt_float(x) -> str:
    """17 significant digits, round-trip exact."""
    if isinstance(x, (int, np.integer)) and not isinstance(x, bool):
        return str(int(x))
    return format(float(x), ".17g")


def write_csv(path, columns, rows) -> None:
    with open(path, "w", encoding="utf-8", newline="") as fh:
        w = csv.writer(fh, lineterminator="\r\n")
        w.writerow(columns)
        for row in rows:
            w.writerow([fmt_float(v) for v in row])


# constructions -----------------------------------------------------------------

def _frame(rep: RunReport, cfg: ExperimentConfig, name: str, U, onb):
    rep.op(name, U, cfg.tol("adjoint"))
    rb = riesz.apply_generator(U, onb, cfg.tol("adjoint"))
    return rb, rep.frame(name, rb, cfg.tol("frame"), cfg.tol("reconstruction"), cfg.seed)


def _c_identity(cfg, rep, rng, onb):
    _, fr = _frame(rep, cfg, "U", ops.identity(cfg.space), onb)
    rep.verdict("parseval", fr.parseval_distance <= cfg.tol("unitary"))


def _c_i_plus_t(cfg, rep, rng, onb):
    spec = cfg.space
    n = int(cfg.params.get("n", 3))
    Q = sampling.random_unitary(rng, spec.row_dim)
    T = sampling.random_psd_module_map(spec, rng, eigvecs=Q)
    S = sampling.random_psd_module_map(spec, rng, eigvecs=Q) if cfg.params.get("with_s", True) else None
    gens = riesz.build_positive_classes(T, S, n=n, tol=cfg.tol("adjoint"))
    for name, U in gens.items():
        _frame(rep, cfg, name, U, onb)
        rep.verdict(f"{name}.min_singular_value>=1", ops.singular_values(U)[-1] >= 1 - 1e-10)
    if S is not None:
        rep.verdict("T+S positive", ops.is_positive(T + S)[0])
        rep.verdict("TS positive (commuting)", ops.is_positive(T @ S)[0])


def _c_neumann(cfg, rep, rng, onb):
    spec = cfg.space
    norm = float(cfg.params.get("norm", 0.9))
    T = sampling.random_contraction(spec, rng, norm)
    limit = riesz.build_neumann(T, cfg.tol("adjoint"))
    _frame(rep, cfg, "(I-T)^-1", limit, onb)
    n_max = int(cfg.params.get("n_max", 20))
    nrm = ops.op_norm(T)
    rows, ok = [], True
    for n in range(n_max + 1):
        gap = ops.distance(riesz.neumann_partial_sum(T, n), limit)
        bound = nrm ** (n + 1) / (1 - nrm)
        ok &= gap <= bound * (1 + 1e-9) + 1e-12
        rows.append([n, gap, bound])
    rep.verdict("partial sums within geometric tail bound", ok)
    rep.table_columns, rep.table = ["n", "gap", "tail_bound"], rows


def _c_sqrt_chain(cfg, rep, rng, onb):
    spec = cfg.space
    norm = float(cfg.params.get("norm", 4.0))
    min_eig = float(cfg.params.get("min_eig", 1.0))
    T = sampling.random_psd_module_map(spec, rng, eig_range=(min_eig, norm), norm=norm)
    sv = ops.singular_values(T)
    sweep = "n_max" in cfg.params
    ns = range(1, int(cfg.params["n_max"]) + 1) if sweep else [int(cfg.params.get("n", 3))]
    tol = cfg.tol("sqrt_chain_bounds")
    rows, prev = [], math.inf
    for n in ns:
        W = riesz.build_sqrt_chain(T, n, cfg.tol("adjoint"))
        _, fr = _frame(rep, cfg, f"T^(1/2^{n})", W, onb)
        e = 1.0 / 2 ** (n - 1)
        rep.verdict(f"n={n}.bounds", abs(fr.lower_bound - sv[-1] ** e) <= tol
                    and abs(fr.upper_bound - sv[0] ** e) <= tol)
        rep.verdict(f"n={n}.norm_law", abs(ops.op_norm(W) - sv[0] ** (e / 2)) <= 1e-8)
        if sweep and n > 1:
            rep.verdict(f"n={n}.parseval_decreasing", fr.parseval_distance < prev)
        prev = fr.parseval_distance
        rows.append([n, fr.lower_bound, fr.upper_bound])
    root, iters = ops.denman_beavers(T.matrix)
    rep.metric("denman_beavers_iterations", iters)
    rep.verdict("iterative_sqrt_agrees", np.linalg.norm(root - ops.sqrt_psd(T).matrix, 2) <= 1e-8)
    if sweep:
        rep.table_columns, rep.table = ["n", "lower", "upper"], rows


def _c_jordan_parts(cfg, rep, rng, onb):
    T = sampling.random_self_adjoint_module_map(cfg.space, rng)
    P1, P2 = riesz.jordan_decomposition(T)
    rep.metric("||P1 P2||", ops.op_norm(P1 @ P2))
    rep.verdict("P1 P2 = 0", ops.op_norm(P1 @ P2) <= 1e-9 * max(1.0, ops.op_norm(T)) ** 2)
    for name, U in zip(("I+P1", "I+P2"), riesz.build_jordan_parts(T)):
        _frame(rep, cfg, name, U, onb)


def _unitary_verdicts(cfg, rep, name, U, onb):
    _, fr = _frame(rep, cfg, name, U, onb)
    rep.verdict(f"{name}.unitary", ops.is_unitary(U, cfg.tol("unitary")))
    rep.verdict(f"{name}.parseval", fr.parseval_distance <= cfg.tol("unitary"))


def _c_unitary_parts(cfg, rep, rng, onb):
    T = sampling.random_self_adjoint_module_map(cfg.space, rng)
    Vp, Vm = riesz.build_unitary_parts(T)
    for name, U in (("V+", Vp), ("V-", Vm)):
        _unitary_verdicts(cfg, rep, name, U, onb)
    avg = ops.distance(0.5 * (Vp + Vm), (1.0 / ops.op_norm(T)) * T)
    rep.metric("||avg - T/||T|| ||", avg)
    rep.verdict("average = T/||T||", avg <= 1e-10)


def _c_cartesian_unitaries(cfg, rep, rng, onb):
    T = sampling.random_module_map(cfg.space, rng)
    for i, U in enumerate(riesz.build_cartesian_unitaries(T), start=1):
        rep.verdict(f"Omega{i}.available", U is not None)
        if U is not None:
            _unitary_verdicts(cfg, rep, f"Omega{i}", U, onb)


def _c_polar(cfg, rep, rng, onb):
    U = sampling.random_module_map(cfg.space, rng)
    W, P = ops.polar(U)
    recon = ops.distance(W @ P, U)
    unit = ops.distance(W.H @ W, ops.identity(U.spec))
    rep.metric("||WP - U||/||U||", recon / ops.op_norm(U))
    rep.metric("||W*W - I||", unit)
    rep.verdict("WP = U", recon <= 1e-8 * ops.op_norm(U))
    rep.verdict("W unitary", unit <= 1e-8)
    _frame(rep, cfg, "W", W, onb)
    _frame(rep, cfg, "P", P, onb)


def _c_holub_forward(cfg, rep, rng, onb):
    U = sampling.random_module_map(cfg.space, rng)
    rb, _ = _frame(rep, cfg, "U", U, onb)
    T = riesz.holub_map(rb, cfg.tol("holub"))
    chk = riesz.holub_forward_check(T, rb, cfg.tol("holub"))
    rep.sections["holub_forward"] = chk.to_dict()
    rep.verdict("T maps f_k to g_k and is positive", chk.passed)
    scaled = chk.min_eigenvalue * ops.op_norm(U) ** 2
    rep.metric("min_eig(T) * ||U||^2", scaled)
    rep.verdict("min_eig(T) * ||U||^2 >= 1 - 1e-6", scaled >= 1 - 1e-6)


def _c_holub_converse(cfg, rep, rng, onb):
    T = sampling.random_psd_module_map(cfg.space, rng)
    rb, h = riesz.holub_basis_for_positive(T, onb, cfg.tol("holub"))
    resid = riesz.holub_residual(T, rb)
    rep.metric("max_k ||T q_k - h_k||", resid)
    rep.verdict("T q_k = h_k", resid <= cfg.tol("holub") * ops.op_norm(T))
    rep.op("q-generator", rb.generator, cfg.tol("adjoint"))
    rep.frame("q", rb, cfg.tol("frame"), cfg.tol("reconstruction"), cfg.seed)


def _c_counterexamples(cfg, rep, rng, onb):
    counterexample_sections(cfg.space, rep, rng)


_CONSTRUCTORS = {
    "identity": _c_identity, "i_plus_t": _c_i_plus_t, "neumann": _c_neumann,
    "sqrt_chain": _c_sqrt_chain, "jordan_parts": _c_jordan_parts,
    "unitary_parts": _c_unitary_parts, "cartesian_unitaries": _c_cartesian_unitaries,
    "polar": _c_polar, "holub_forward": _c_holub_forward, "holub_converse": _c_holub_converse,
    "counterexamples": _c_counterexamples,
}


def run_experiment(cfg: ExperimentConfig, write: bool = True) -> RunReport:
    """Run one construction; writes ``<output>.report.json`` (and a CSV for sweeps)."""
    rep = RunReport(cfg.to_dict())
    rng = np.random.default_rng(cfg.seed)
    with rep.timed("total"):
        try:
            onb = None if cfg.construction == "counterexamples" else riesz.canonical_onb(cfg.space)
            _CONSTRUCTORS[cfg.construction](cfg, rep, rng, onb)
        except (MvFrameError, np.linalg.LinAlgError) as exc:
            log.error("numerical failure in %s: %s", cfg.construction, exc)
            rep.errors.append({"type": type(exc).__name__, "message": str(exc)})
    if write and cfg.output:
        rep.write(cfg.output)
    return rep


# counterexamples -----------------------------------------------------------------

def counterexample_sections(spec: SpaceSpec, rep: RunReport, rng=None) -> RunReport:
    if (spec.s, spec.r) != (2, 2):
        raise ConfigError("counterexamples need s = r = 2", [("$.s", "must be 2"), ("$.r", "must be 2")])
    rng = np.random.default_rng(0) if rng is None else rng
    onb = riesz.canonical_onb(spec)
    e0 = scalar_onb(spec.group)[0]

    # (a) entry swap: self-adjoint for the trace form, not matrix-adjointable
    with rep.timed("a"):
        U = cx.entry_swap(spec)
        adj, witness = ops.is_matrix_adjointable(U)
        f, g = MatFn.random(spec, rng), MatFn.random(spec, rng)
        trace_gap = abs(trace_inner(ops.apply(U, f), g) - trace_inner(f, ops.apply(ops.trace_adjoint(U), g)))
        sec = {
            "is_matrix_adjointable": adj,
            "trace_adjoint_equals_U": bool(np.array_equal(ops.trace_adjoint(U).matrix, U.matrix)),
            "check_module_map": ops.check_module_map(U),
            "trace_adjoint_identity_gap": trace_gap,
        }
        if witness is not None:
            wf, wg = witness
            lhs = mat_inner(ops.apply(U, wf), wg)
            rhs = mat_inner(wf, ops.apply(ops.trace_adjoint(U), wg))
            sec["witness"] = [wf.to_dict(), wg.to_dict()]
            sec["witness_gap"] = float(np.abs(lhs - rhs).max())
        rep.sections["a_entry_swap"] = sec
        rep.verdict("a.not_adjointable", not adj and witness is not None)
        rep.verdict("a.trace_adjoint_is_U", sec["trace_adjoint_equals_U"])
        rep.verdict("a.not_module_map", not sec["check_module_map"])
        rep.verdict("a.trace_identity_holds", trace_gap <= 1e-10)

    # (b) the entry-swapped diagonal basis is not a frame
    with rep.timed("b"):
        fam = [ops.apply(U, E) for E in onb]
        fr = frames.frame_report(fam)
        w = cx.lower_left_witness(spec, e0)
        energy = frames.coefficient_energy(w, fam)
        rep.frame_reports["b_swapped_basis"] = fr
        rep.sections["b_swapped_basis"] = {"witness": w.to_dict(), "witness_energy": energy,
                                           "witness_norm": frob_norm(w)}
        rep.verdict("b.lower_bound_zero", fr.lower_bound <= 1e-10)
        rep.verdict("b.incomplete", fr.completeness_defect >= 1)
        rep.verdict("b.witness_energy_zero", energy <= 1e-20)

    # (c) pointwise transpose maps the diagonal basis to itself but is not positive
    with rep.timed("c"):
        V = cx.pointwise_transpose(spec)
        fixes = max(frob_norm(ops.apply(V, E) - E) for E in onb)
        wf = cx.transpose_witness(spec, e0)
        value = trace_inner(ops.apply(V, wf), wf)
        h_norm2 = float(np.sum(np.abs(e0) ** 2))
        pos, lam = ops.is_positive(V)
        rb = riesz.apply_generator(ops.identity(spec), onb)
        chk = riesz.holub_forward_check(V, rb)
        rep.sections["c_transpose"] = {
            "max_k ||V f_k - f_k||": fixes, "trace_inner(Vf, f)": [value.real, value.imag],
            "h_norm_squared": h_norm2, "is_positive": pos, "min_eigenvalue": lam,
            "is_matrix_adjointable": chk.is_matrix_adjointable, "witness": wf.to_dict(),
        }
        rep.verdict("c.maps_basis_to_dual", fixes <= 1e-12)
        rep.verdict("c.negative_on_witness", abs(value - (-h_norm2)) <= 1e-10)
        rep.verdict("c.not_positive", not pos)
    return rep


def suite_counterexamples(group=(4,), output: str | None = None) -> RunReport:
    spec = SpaceSpec(GroupSpec(tuple(group)), 2, 2)
    rep = RunReport({"suite": "counterexamples", "group": list(spec.group.orders), "s": 2, "r": 2})
    counterexample_sections(spec, rep)
    if output:
        rep.write(output)
    return rep


# property battery ----------------------------------------------------------------

PROPERTY_TOLERANCES = {
    "closure_adjointable": 1e-10,
    "sqrt_residual": 1e-10,
    "sqrt_agreement": 1e-8,
    "sqrt_norm_law": 1e-8,
    "sqrt_adjointable": 1e-10,
    "frame_bounds_relative": 1e-8,
    "holub_forward_deficit": 1e-6,
    "holub_converse_residual": 1e-8,
    "reconstruction": 1e-8,
    "trace_domination": 1e-10,
    "biorthogonality": 1e-8,
}


def property_trial(seed: int, trial: int, max_dim: int = 256, inject: str | None = None) -> dict:
    """One trial of the property battery; residuals keyed as in PROPERTY_TOLERANCES.

    Each residual is normalized so that the property holds iff residual <= tolerance.
    """
    rng = np.random.default_rng([seed, trial])
    spec = sampling.random_space(rng, max_dim, _SHAPE_OK.get(inject))
    onb = riesz.canonical_onb(spec)
    U = sampling.random_module_map(spec, rng)
    V = sampling.random_module_map(spec, rng)
    T = sampling.random_psd_module_map(spec, rng)
    res = {}

    closure = [U + V, U @ V, ops.invert(U)]
    res["closure_adjointable"] = max(ops.matrix_adjointness_defect(X)[0] / (1 + np.abs(X.matrix).max())
                                     for X in closure)

    nT = ops.op_norm(T)
    R = ops.sqrt_psd(T)
    res["sqrt_residual"] = ops.distance(R @ R, T) / nT
    res["sqrt_agreement"] = ops.distance(ops.sqrt_iterative(T), R)
    res["sqrt_norm_law"] = abs(ops.op_norm(R) - math.sqrt(nT)) / (1 + nT)
    res["sqrt_adjointable"] = ops.matrix_adjointness_defect(R)[0] / (1 + np.abs(R.matrix).max())

    fam = [ops.apply(U, E) for E in onb]
    lo, hi = frames.optimal_frame_bounds(fam)
    sv = ops.singular_values(U)
    res["frame_bounds_relative"] = max(abs(lo - sv[-1] ** 2) / sv[-1] ** 2, abs(hi - sv[0] ** 2) / sv[0] ** 2)

    rb = riesz.apply_generator(U, onb)
    res["biorthogonality"] = riesz.biorthogonality_defect(rb)
    _, err = frames.reconstruct(MatFn.random(spec, rng), rb)
    res["reconstruction"] = err

    H = riesz.holub_map(rb) if inject is None else _injected(spec, inject)
    chk = riesz.holub_forward_check(H, rb)
    deficit = max(0.0, 1.0 - chk.min_eigenvalue * sv[0] ** 2)
    # a map that misses the dual or is not adjointable counts as a full unit of deficit
    res["holub_forward_deficit"] = deficit + (0.0 if chk.maps_to_dual and chk.is_matrix_adjointable else 1.0)
    rbq, _ = riesz.holub_basis_for_positive(T, onb)
    res["holub_converse_residual"] = riesz.holub_residual(T, rbq) / nT

    Omega = riesz.build_dominating(T, T + sampling.random_psd_module_map(spec, rng, eig_range=(0.0, 1.0)))
    # Omega >= T >= lambda_min(T) I, so {Omega E_k} has lower bound >= lambda_min(T)^2
    lo_omega, _ = frames.optimal_frame_bounds([ops.apply(Omega, E) for E in onb])
    gap = ops.hermitian_eigvals(T)[0] ** 2 - lo_omega
    res["trace_domination"] = max(0.0, gap) / nT ** 2

    out = {"trial": trial, "space": [list(spec.group.orders), spec.s, spec.r],
           "residuals": {k: float(v) for k, v in res.items()}}
    if not chk.passed or chk.witness is not None:
        out["holub_witness"] = chk.witness.to_dict() if chk.witness is not None else None
    return out


_SHAPE_OK = {
    "entry_swap": lambda s, r: r >= 2,
    "transpose": lambda s, r: s == r,
}


def _injected(spec: SpaceSpec, kind: str):
    if kind == "entry_swap":
        return cx.entry_swap(spec)
    if kind == "transpose":
        return cx.pointwise_transpose(spec)
    raise ValueError(f"unknown injection {kind!r}")


def _threads() -> int:
    try:
        return max(1, int(os.environ.get("MVFRAME_THREADS", "1")))
    except ValueError:
        return 1


def suite_random_properties(seed: int = 0, trials: int = 100, max_dim: int = 256,
                            inject: str | None = None, output: str | None = None) -> RunReport:
    """Property battery over seeded random module maps; one RNG stream per trial."""
    if trials < 1:
        raise ConfigError("trials must be >= 1", [("trials", "must be >= 1")])
    if inject is not None and inject not in _SHAPE_OK:
        raise ConfigError(f"unknown injection {inject!r}", [("inject", f"one of {sorted(_SHAPE_OK)}")])
    cfg = {"suite": "properties", "seed": seed, "trials": trials, "max_dim": max_dim, "inject": inject}
    rep = RunReport(cfg)
    with rep.timed("total"), ThreadPoolExecutor(max_workers=_threads()) as pool:
        results = list(pool.map(lambda t: property_trial(seed, t, max_dim, inject), range(trials)))
    failures = []
    for name, tol in PROPERTY_TOLERANCES.items():
        vals = [r["residuals"][name] for r in results]
        worst = int(np.argmax(vals))
        rep.metric(f"max.{name}", vals[worst])
        ok = rep.verdict(name, vals[worst] <= tol)
        if not ok:
            bad = results[worst]
            failures.append({"property": name, "seed": seed, "trial": bad["trial"],
                             "space": bad["space"], "residual": vals[worst], "tolerance": tol,
                             "witness": bad.get("holub_witness")})
    rep.sections["tolerances"] = dict(PROPERTY_TOLERANCES)
    if failures:
        rep.sections["failures"] = failures
    if output:
        rep.write(output)
    return rep


def sweep_sqrt_chain(group=(4,), s: int = 2, r: int = 2, n_max: int = 8, seed: int = 0,
                     norm: float = 4.0, min_eig: float = 1.0, output: str | None = None) -> RunReport:
    cfg = parse_config({"group": list(group), "s": s, "r": r, "construction": "sqrt_chain",
                        "params": {"n_max": n_max, "norm": norm, "min_eig": min_eig},
                        "seed": seed, **({"output": output} if output else {})})
    return run_experiment(cfg)
