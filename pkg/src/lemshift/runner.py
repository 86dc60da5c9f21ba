"""Scenario execution: measure -> basis -> diagnostics -> report files.

Each diagnostic op consumes the shared run context (measure, basis,
Hessenberg section, scenario polynomial and level) plus its own params and
emits flat named quantities for expectation checks, labeled sequences
(written as CSV and plot data), and optional matrices (plot data only).
A diagnostic that raises is captured into the report and fails the run.

Output layout under the chosen directory:

    report.json                    everything except bulk arrays
    csv/<id>.<label>.csv           one file per emitted sequence
    plotdata/<id>.<label>.tsv      two-column plot data
    plotdata/<id>.<label>.meta.json   axis/provenance sidecar

report.json is deterministic for a fixed scenario and seed apart from the
"timings" block.
"""

from __future__ import annotations

import json
import re
import sys
import time
from dataclasses import dataclass, field

import numpy as np

from . import asymptotics as asy
from . import operators as ops
from .boundary import LemniscateSpec
from .measures import MeasurePart, assemble_measure, hull_distance
from .orthopoly import orthogonalize, orthonormality_residual
from .scenarios import Scenario, ScenarioError, load_scenario

__all__ = ["DiagnosticResult", "RunReport", "run_scenario", "describe", "known_ops"]


@dataclass
class RunContext:
    scenario: Scenario
    mu: object
    basis: object
    section: object

    @property
    def poly(self):
        return self.scenario.poly

    @property
    def level(self):
        return self.scenario.level


@dataclass
class DiagnosticResult:
    id: str
    op: str
    params: dict
    quantities: dict = field(default_factory=dict)
    values: dict = field(default_factory=dict)
    sequences: list = field(default_factory=list)
    matrices: dict = field(default_factory=dict)
    error: str = None


@dataclass
class RunReport:
    scenario_name: str
    passed: bool
    report: dict
    out_dir: object


def _cpx(v, fieldname="value"):
    if isinstance(v, (list, tuple)) and len(v) == 2:
        return complex(float(v[0]), float(v[1]))
    if isinstance(v, (int, float)):
        return complex(v)
    raise ValueError(f"{fieldname} must be a number or [re, im] pair")


def _seq_quantity_suffix(s: float) -> str:
    return f"{s:g}"


def _diag_orthonormality(ctx, params):
    res = DiagnosticResult(id="", op="", params=params)
    res.quantities["residual"] = orthonormality_residual(ctx.basis, ctx.mu)
    return res


def _diag_disk_closed_forms(ctx, params):
    poly, level = ctx.poly, ctx.level
    if poly.degree != 1 or abs(poly.roots[0]) > 1e-12 or abs(level - 1.0) > 1e-12:
        raise ValueError("disk_closed_forms applies only to P = z at level 1")
    res = DiagnosticResult(id="", op="", params=params)
    H = ctx.section.entries
    N = ctx.section.size
    n = np.arange(1, N)
    sub = ctx.section.subdiagonal()
    res.quantities["subdiag_dev"] = float(np.abs(sub - np.sqrt(n / (n + 1))).max())
    kap = ctx.basis.kappa
    ns = np.arange(N + 1)
    res.quantities["kappa_dev"] = float(
        np.abs(kap - np.sqrt((ns + 1) / np.pi)).max()
    )
    off = H.copy()
    off[n, n - 1] = 0.0
    res.quantities["offband_max"] = float(np.abs(off).max())
    return res


def _diag_shift_residual(ctx, params):
    early_lo, early_hi = params.get("early", [5, 20])
    tail_count = int(params.get("tail", 15))
    profile = ops.shift_residual_profile(
        ctx.section, ctx.poly, ctx.level, ctx.basis, ctx.mu
    )
    res = DiagnosticResult(id="", op="", params=params)
    n = np.array([p.n for p in profile])
    norms = np.array([p.matrix_norm for p in profile])
    gaps = np.array([abs(p.matrix_sq - p.measure_sq) for p in profile])
    res.sequences.append(asy.make_report("residual_norm", n, norms, extrapolate=False))
    res.sequences.append(asy.make_report("identity_gap", n, gaps, extrapolate=False))
    early = norms[(n >= early_lo) & (n <= early_hi)]
    tail = norms[-tail_count:]
    res.quantities["max_identity_gap"] = float(gaps.max())
    res.quantities["early_median"] = float(np.median(early)) if early.size else np.nan
    res.quantities["tail_median"] = float(np.median(tail))
    res.quantities["tail_ratio"] = (
        float(np.median(tail) / np.median(early)) if early.size else np.nan
    )
    res.quantities["final"] = float(norms[-1])
    return res


def _diag_trace_window(ctx, params):
    q = int(params.get("q", ctx.poly.degree))
    tail_count = int(params.get("tail", 15))
    N = ctx.section.size
    n = np.arange(0, N - q + 1)
    vals = np.array([ops.trace_window(ctx.section, q, int(k)) for k in n])
    res = DiagnosticResult(id="", op="", params=params)
    res.sequences.append(asy.make_report("trace_window", n, vals, extrapolate=False))
    alpha = ctx.poly.alpha
    res.values["alpha"] = [alpha.real, alpha.imag]
    res.quantities["tail_max_dev"] = float(np.abs(vals[-tail_count:] - alpha).max())
    return res


def _diag_right_limit(ctx, params):
    s = int(params.get("s", 0))
    m = int(params.get("m", 4))
    tol = float(params.get("tol", 0.05))
    rl = ops.right_limit(
        ctx.section, ctx.poly.degree, s, m, tol, poly=ctx.poly, level=ctx.level
    )
    res = DiagnosticResult(id="", op="", params=params)
    res.quantities["converged"] = bool(rl.converged)
    res.quantities["last_diff"] = float(rl.diffs[-1])
    res.quantities["poly_relation_dev"] = float(rl.poly_relation_dev)
    res.quantities["periodicity_dev"] = float(rl.periodicity_dev)
    res.values["centers"] = rl.subsequence.tolist()
    res.sequences.append(
        asy.make_report(
            "window_diffs", rl.subsequence[1:], rl.diffs, extrapolate=False
        )
    )
    res.matrices["window"] = rl.window
    return res


def _diag_block_toeplitz(ctx, params):
    m = int(params.get("m", 4))
    tol = float(params.get("tol", 0.05))
    bt = ops.block_toeplitz_diagnostic(ctx.section, ctx.poly.degree, m, tol)
    res = DiagnosticResult(id="", op="", params=params)
    res.quantities["verdict"] = bool(bt.verdict)
    res.quantities["max_class_diff"] = float(bt.class_last_diffs.max())
    res.quantities["max_shift_dev"] = float(bt.shift_devs.max())
    res.quantities["max_periodicity_dev"] = float(bt.periodicity_devs.max())
    res.values["class_last_diffs"] = bt.class_last_diffs.tolist()
    res.values["class_converged"] = bt.class_converged.tolist()
    return res


def _diag_char_poly(ctx, params):
    n = int(params.get("n", 15))
    points = [_cpx(p, "params.points") for p in params.get("points", [[2.5, 0.5]])]
    for z in points:
        if not hull_distance(ctx.mu, z) > 0:
            raise ValueError(f"test point {z} must lie outside the support hull")
    res = DiagnosticResult(id="", op="", params=params)
    res.quantities["max_rel_err"] = ops.char_poly_check(
        ctx.section, ctx.basis, n, points
    )
    return res


def _diag_operator_measure(ctx, params):
    k = int(params.get("k", 1))
    n = int(params.get("n", 0))
    matrix_sq, measure_sq = ops.operator_measure_identity(
        ctx.section, ctx.basis, ctx.mu, ctx.poly, k, n
    )
    res = DiagnosticResult(id="", op="", params=params)
    res.quantities["matrix_sq"] = matrix_sq
    res.quantities["measure_sq"] = measure_sq
    res.quantities["gap"] = abs(matrix_sq - measure_sq)
    res.quantities["rel_gap"] = abs(matrix_sq - measure_sq) / max(
        matrix_sq, measure_sq, 1e-300
    )
    return res


def _diag_christoffel_lambda(ctx, params):
    points = [_cpx(p, "params.points") for p in params.get("points", [[0.0, 0.0]])]
    res = DiagnosticResult(id="", op="", params=params)
    for i, z in enumerate(points):
        res.quantities[f"lambda{i}"] = asy.christoffel_lambda(ctx.basis, z)
        res.values[f"point{i}"] = [z.real, z.imag]
    return res


def _diag_kbound(ctx, params):
    N = int(params.get("N", min(ctx.scenario.N, 100)))
    margin = float(params.get("margin", 0.2))
    kb = asy.kbound_scan(
        ctx.mu, ctx.poly, ctx.level, N, margin, seed=ctx.scenario.seed
    )
    res = DiagnosticResult(id="", op="", params=params)
    res.quantities["n_grid"] = kb.meta["n_grid"]
    res.quantities["n_flagged"] = kb.meta["n_flagged"]
    res.quantities["max_S"] = float(kb.partial_sums[:, -1].max())
    return res


def _diag_weak_concentration(ctx, params):
    s_values = [float(s) for s in params.get("s_values", [])]
    if not s_values:
        raise ValueError("params.s_values must list at least one level")
    stride_tol = float(params.get("stride_tol", 1e-9))
    reports = asy.weak_concentration(ctx.basis, ctx.mu, ctx.poly, ctx.level, s_values)
    res = DiagnosticResult(id="", op="", params=params)
    q = ctx.poly.degree
    for s, rep in zip(s_values, reports):
        key = _seq_quantity_suffix(s)
        v = rep.values.real
        res.sequences.append(rep)
        res.quantities[f"final[{key}]"] = float(v[-1])
        res.quantities[f"max_tail[{key}]"] = float(v[-20:].max())
        res.quantities[f"stride_monotone[{key}]"] = bool(
            np.all(v[q:] <= v[:-q] + stride_tol)
        )
    return res


def _diag_kappa_ratio(ctx, params):
    q = int(params.get("q", ctx.poly.degree))
    rep = asy.kappa_ratio(ctx.basis, q)
    res = DiagnosticResult(id="", op="", params=params)
    res.sequences.append(rep)
    res.quantities["extrapolated"] = float(np.real(rep.extrapolated))
    res.quantities["last"] = float(np.real(rep.values[-1]))
    res.values["method"] = rep.method
    return res


def _diag_residue_kappa_ratio(ctx, params):
    q = int(params.get("q", ctx.poly.degree))
    s = int(params["s"])
    rep = asy.residue_kappa_ratio(ctx.basis, q, s)
    res = DiagnosticResult(id="", op="", params=params)
    res.sequences.append(rep)
    res.quantities["extrapolated"] = float(np.real(rep.extrapolated))
    res.quantities["last"] = float(np.real(rep.values[-1]))
    res.values["method"] = rep.method
    return res


def _diag_ratio_asymptotics(ctx, params):
    z = _cpx(params.get("z", [2.0, 0.0]), "params.z")
    mode = params.get("mode", "corollary")
    s = int(params.get("s", 0))
    rep = asy.ratio_asymptotics(
        ctx.basis, ctx.mu, ctx.poly, ctx.level, z, mode, s=s
    )
    res = DiagnosticResult(id="", op="", params=params)
    res.sequences.append(rep)
    ex = complex(rep.extrapolated)
    res.quantities["extrapolated_re"] = ex.real
    res.quantities["extrapolated_im"] = ex.imag
    res.quantities["extrapolated_abs"] = abs(ex)
    res.values["method"] = rep.method
    return res


def _diag_christoffel_shift(ctx, params):
    points = [_cpx(p, "params.points") for p in params.get("points", [])]
    if not points:
        raise ValueError("params.points must list at least one chain point")
    N = int(params.get("N", max(ctx.scenario.N - 10, 8)))
    reports = asy.christoffel_shift_check(ctx.mu, points, N)
    res = DiagnosticResult(id="", op="", params=params)
    devs = []
    for i, rep in enumerate(reports):
        res.sequences.append(rep)
        ex = float(np.real(rep.extrapolated))
        res.quantities[f"step{i}_extrapolated"] = ex
        res.quantities[f"step{i}_tail_dev"] = float(
            np.abs(rep.values[-10:] - 1.0).max()
        )
        devs.append(abs(ex - 1.0))
    res.quantities["max_step_dev"] = float(max(devs))
    return res


def _diag_atom_decay(ctx, params):
    tail_count = int(params.get("tail", 20))
    if not ctx.mu.atoms:
        raise ValueError("measure has no atoms to track")
    res = DiagnosticResult(id="", op="", params=params)
    n = np.arange(ctx.basis.degree + 1)
    worst = 0.0
    for i, (a, mass) in enumerate(ctx.mu.atoms):
        idx = ctx.mu.nodes.size + i
        terms = mass * np.abs(ctx.basis.values[:, idx]) ** 2
        res.sequences.append(
            asy.make_report(f"atom_decay{i}", n, terms, extrapolate=False)
        )
        t = float(terms[-tail_count:].max())
        res.quantities[f"atom{i}_max_tail"] = t
        res.values[f"atom{i}_location"] = [a.real, a.imag]
        worst = max(worst, t)
    res.quantities["max_tail"] = worst
    return res


def _diag_exterior_kappa(ctx, params):
    locations = [_cpx(p, "params.locations") for p in params.get("locations", [])]
    if not locations:
        raise ValueError("params.locations must list the exterior points")
    N = int(params.get("N", ctx.basis.degree))
    rep = asy.exterior_kappa_check(
        ctx.mu, ctx.basis, locations, ctx.poly.degree, ctx.level, N
    )
    res = DiagnosticResult(id="", op="", params=params)
    res.sequences.append(rep)
    target = ctx.level ** (len(locations) / ctx.poly.degree)
    ex = float(np.real(rep.extrapolated))
    res.quantities["extrapolated"] = ex
    res.quantities["target"] = target
    res.quantities["dev"] = abs(ex - target)
    res.values["method"] = rep.method
    return res


def _diag_region_mass(ctx, params):
    from .measures import region_mass

    s_values = [float(s) for s in params.get("s_values", [])]
    if not s_values:
        raise ValueError("params.s_values must list at least one level")
    lem = LemniscateSpec(ctx.poly, ctx.level)
    res = DiagnosticResult(id="", op="", params=params)
    for s in s_values:
        res.quantities[f"mass[{_seq_quantity_suffix(s)}]"] = region_mass(
            ctx.mu, lem, s
        )
    return res


DIAGNOSTICS = {
    "orthonormality": (
        _diag_orthonormality,
        "Recompute the Gram matrix of phi_0..phi_N over the measure and "
        "report max |<phi_m, phi_n> - delta_mn|. Emits: residual.",
    ),
    "disk_closed_forms": (
        _diag_disk_closed_forms,
        "Unit-disk oracle (P = z, level 1 only): compare the subdiagonal "
        "against sqrt(n/(n+1)), kappa_n against sqrt((n+1)/pi), and bound "
        "every entry off the subdiagonal/diagonal band. Emits: subdiag_dev, "
        "kappa_dev, offband_max.",
    ),
    "shift_residual": (
        _diag_shift_residual,
        "||(P(M) - r R^q) e_n|| at every admissible n by the matrix route, "
        "cross-checked against the exact measure-side identity "
        "||P phi_{n-1}||^2 + r^2 - 2 r kappa_{n-1}/kappa_{n+q-1}. Decay of "
        "this residual is the operator-side signature of the lemniscate. "
        "Emits: max_identity_gap, early_median, tail_median, tail_ratio, "
        "final; sequences residual_norm and identity_gap.",
    ),
    "trace_window": (
        _diag_trace_window,
        "Length-q diagonal sums sum_{j=1..q} H[n+j, n+j], which converge to "
        "alpha = sum of roots of P. Emits: tail_max_dev.",
    ),
    "right_limit": (
        _diag_right_limit,
        "Entrywise limit of (2m+1)-windows along centers n = s (mod q), with "
        "Cauchy differences, the P(X) = r R^q relation on the uncontaminated "
        "sub-window, and q-periodicity along diagonals. Emits: converged, "
        "last_diff, poly_relation_dev, periodicity_dev; matrix window.",
    ),
    "block_toeplitz": (
        _diag_block_toeplitz,
        "Per-residue-class window convergence plus cross-class gluing; the "
        "verdict is whether the section is asymptotically q-block Toeplitz. "
        "Emits: verdict, max_class_diff, max_shift_dev, max_periodicity_dev.",
    ),
    "char_poly_check": (
        _diag_char_poly,
        "Monic Phi_n(z) against det(zI - H_n) computed by LU factorization "
        "(an independent determinant route). Emits: max_rel_err.",
    ),
    "operator_measure_identity": (
        _diag_operator_measure,
        "||P(M)^k e_{n+1}||^2 against integral |P|^{2k} |phi_n|^2 dmu, the "
        "moment dictionary linking operator powers to the measure. Emits: "
        "matrix_sq, measure_sq, gap, rel_gap.",
    ),
    "christoffel_lambda": (
        _diag_christoffel_lambda,
        "Christoffel-function upper bound (sum_{n<=N} |phi_n(z)|^2)^{-1} at "
        "chosen points. Emits: lambda0, lambda1, ...",
    ),
    "kbound_scan": (
        _diag_kbound,
        "Reproducing-kernel partial sums for |P|^2 mu on an interior grid; "
        "flags points whose last decade of degrees contributes over 5%. "
        "Emits: n_grid, n_flagged, max_S.",
    ),
    "weak_concentration": (
        _diag_weak_concentration,
        "eta_n(s) = mass of |phi_n|^2 dmu inside {|P| <= s}; decay for "
        "s < level and totality at s = level witness concentration of the "
        "weak asymptotic measures on the level set. Emits per s: final[s], "
        "max_tail[s], stride_monotone[s].",
    ),
    "kappa_ratio": (
        _diag_kappa_ratio,
        "kappa_n / kappa_{n+q} with Aitken extrapolation; the limit equals "
        "the level r. Emits: extrapolated, last.",
    ),
    "residue_kappa_ratio": (
        _diag_residue_kappa_ratio,
        "kappa_{nq+s} / kappa_{nq+s+1} along residue class s; limits are 1 "
        "for s < q-1 and r for s = q-1. Emits: extrapolated, last.",
    ),
    "ratio_asymptotics": (
        _diag_ratio_asymptotics,
        "Polynomial ratio sequences at an external point z: corollary mode "
        "P(z) phi_n / (r phi_{n+q}) -> 1, monic mode Phi_{n+q}/Phi_n -> "
        "P(z), residue mode the stride ratio Phi_{nq+s}/Phi_{nq+s+1}. "
        "Emits: extrapolated_re, extrapolated_im, extrapolated_abs.",
    ),
    "christoffel_shift_check": (
        _diag_christoffel_shift,
        "Christoffel transform chain mu_{m+1} = |z - x_{m+1}|^2 mu_m; step "
        "ratios kappa_n(mu_{m+1})/kappa_{n+1}(mu_m) tend to 1. Emits: "
        "step{i}_extrapolated, step{i}_tail_dev, max_step_dev.",
    ),
    "atom_decay": (
        _diag_atom_decay,
        "Atom terms mass * |phi_n(location)|^2 per atom; square-summability "
        "at points of positive Christoffel function forces decay. Emits: "
        "atom{i}_max_tail, max_tail.",
    ),
    "exterior_kappa": (
        _diag_exterior_kappa,
        "For exterior points z_j carrying positive mu-mass, the capacity-"
        "normalized weighted measure nu = prod |z-z_j|^2 / r^{2/q} dmu "
        "satisfies kappa_{n-K}(nu) / kappa_n(mu) -> r^{K/q}. Emits: "
        "extrapolated, target, dev.",
    ),
    "region_mass": (
        _diag_region_mass,
        "mu({|P| <= s}) for chosen sublevels s. Emits: mass[s].",
    ),
}


def known_ops():
    return sorted(DIAGNOSTICS)


def describe(op_name: str) -> str:
    """One-paragraph mathematical description of a diagnostic op."""
    if op_name not in DIAGNOSTICS:
        raise KeyError(
            f"unknown op {op_name!r}; known ops: {', '.join(known_ops())}"
        )
    return DIAGNOSTICS[op_name][1]


def _slug(text: str) -> str:
    return re.sub(r"[^A-Za-z0-9._-]+", "_", text).strip("_") or "seq"


def _build_measure(scenario: Scenario):
    parts = [
        MeasurePart(
            lemniscate=LemniscateSpec(p["poly"], p["level"]),
            kind=p["kind"],
            density=p["density"],
            scale=p["scale"],
            label=p["label"],
        )
        for p in scenario.parts
    ]
    return assemble_measure(parts, scenario.atoms, scenario.quadrature)


def _json_default(obj):
    if isinstance(obj, (np.floating, np.integer)):
        return obj.item()
    if isinstance(obj, np.bool_):
        return bool(obj)
    if isinstance(obj, complex):
        return [obj.real, obj.imag]
    if isinstance(obj, np.ndarray):
        return obj.tolist()
    raise TypeError(f"not JSON-serializable: {type(obj)}")


def _clean_float(x):
    if isinstance(x, float) and not np.isfinite(x):
        return None
    return x


def _write_sequence_files(out_dir, ident, rep):
    import csv

    name = f"{ident}.{_slug(rep.label)}"
    csv_dir = out_dir / "csv"
    plot_dir = out_dir / "plotdata"
    csv_dir.mkdir(parents=True, exist_ok=True)
    plot_dir.mkdir(parents=True, exist_ok=True)
    is_complex = np.iscomplexobj(rep.values)
    with open(csv_dir / f"{name}.csv", "w", newline="", encoding="utf-8") as fh:
        wr = csv.writer(fh)
        if is_complex:
            wr.writerow(["n", "re", "im"])
            for n, v in zip(rep.n_values, rep.values):
                wr.writerow([int(n), repr(float(v.real)), repr(float(v.imag))])
        else:
            wr.writerow(["n", "value"])
            for n, v in zip(rep.n_values, rep.values):
                wr.writerow([int(n), repr(float(v))])
    with open(plot_dir / f"{name}.tsv", "w", encoding="utf-8") as fh:
        for n, v in zip(rep.n_values, rep.values):
            y = abs(v) if is_complex else float(v)
            fh.write(f"{int(n)}\t{y!r}\n")
    meta = {
        "x": "n",
        "y": rep.label + (" (modulus)" if is_complex else ""),
        "diagnostic": ident,
        "extrapolated": _json_default(complex(rep.extrapolated))
        if isinstance(rep.extrapolated, complex)
        else rep.extrapolated,
        "method": rep.method,
    }
    (plot_dir / f"{name}.meta.json").write_text(
        json.dumps(meta, sort_keys=True, indent=1), encoding="utf-8"
    )


def _write_matrix_files(out_dir, ident, name, mat):
    plot_dir = out_dir / "plotdata"
    plot_dir.mkdir(parents=True, exist_ok=True)
    base = f"{ident}.{_slug(name)}"
    with open(plot_dir / f"{base}.tsv", "w", encoding="utf-8") as fh:
        for row in np.asarray(mat):
            fh.write(
                "\t".join(
                    repr(float(v.real)) if abs(v.imag) < 1e-300 else repr(complex(v))
                    for v in row
                )
                + "\n"
            )
    meta = {"kind": "matrix", "shape": list(np.asarray(mat).shape), "diagnostic": ident}
    (plot_dir / f"{base}.meta.json").write_text(
        json.dumps(meta, sort_keys=True, indent=1), encoding="utf-8"
    )


def _eval_expectation(exp, quantities):
    entry = {
        "quantity": exp.quantity,
        "kind": exp.kind,
        "target": exp.target,
        "tolerance": exp.tolerance,
    }
    if exp.quantity not in quantities:
        entry["passed"] = False
        entry["measured"] = None
        entry["note"] = "quantity was not emitted"
        return entry
    measured = quantities[exp.quantity]
    entry["measured"] = _clean_float(measured)
    if exp.kind == "abs":
        ok = (
            measured is not None
            and np.isfinite(measured)
            and abs(measured - exp.target) <= exp.tolerance
        )
    elif exp.kind == "le":
        ok = np.isfinite(measured) and measured <= exp.target
    elif exp.kind == "ge":
        ok = np.isfinite(measured) and measured >= exp.target
    else:
        ok = bool(measured) == bool(exp.target)
    entry["passed"] = bool(ok)
    return entry


def run_scenario(source, out_dir, depth: int = None, degree: int = None) -> RunReport:
    """Execute a scenario end to end and write report files.

    source is a path, shipped scenario name, or dict; out_dir receives
    report.json, csv/, and plotdata/. depth and degree override the
    scenario's cell_depth and N. Deterministic for fixed scenario + seed
    apart from the timings block.
    """
    from pathlib import Path

    scenario = load_scenario(source)
    scenario = scenario.with_overrides(depth=depth, degree=degree)
    for req in scenario.diagnostics:
        if req.op not in DIAGNOSTICS:
            raise ScenarioError(
                f"diagnostics: unknown op {req.op!r}; known: {', '.join(known_ops())}"
            )
    out_dir = Path(out_dir)
    out_dir.mkdir(parents=True, exist_ok=True)

    timings = {}
    t0 = time.perf_counter()
    mu = _build_measure(scenario)
    timings["measure"] = time.perf_counter() - t0

    t0 = time.perf_counter()
    basis, section = orthogonalize(mu, scenario.N)
    timings["orthogonalize"] = time.perf_counter() - t0

    ctx = RunContext(scenario=scenario, mu=mu, basis=basis, section=section)
    results = []
    quantities = {}
    diag_errors = 0
    for req in scenario.diagnostics:
        fn = DIAGNOSTICS[req.op][0]
        t0 = time.perf_counter()
        try:
            res = fn(ctx, req.params)
            res.id, res.op, res.params = req.id, req.op, dict(req.params)
        except Exception as exc:
            res = DiagnosticResult(
                id=req.id, op=req.op, params=dict(req.params), error=f"{exc}"
            )
            diag_errors += 1
        timings[f"diagnostic.{req.id}"] = time.perf_counter() - t0
        results.append(res)
        for key, val in res.quantities.items():
            quantities[f"{req.id}.{key}"] = val
        for rep in res.sequences:
            _write_sequence_files(out_dir, req.id, rep)
        for name, mat in res.matrices.items():
            _write_matrix_files(out_dir, req.id, name, mat)

    expectation_entries = [
        _eval_expectation(exp, quantities) for exp in scenario.expectations
    ]
    passed = diag_errors == 0 and all(e["passed"] for e in expectation_entries)

    report = {
        "scenario": scenario.raw,
        "name": scenario.name,
        "environment": {
            "float": "float64",
            "python": sys.version.split()[0],
            "numpy": np.__version__,
            "n_nodes": int(mu.nodes.size),
            "n_atoms": len(mu.atoms),
            "total_mass": mu.total_mass,
            "cell_depth": scenario.quadrature.cell_depth,
            "boundary_nodes": scenario.quadrature.boundary_nodes,
            "target_degree": scenario.quadrature.target_degree,
            "N": scenario.N,
            "seed": scenario.seed,
            "measure_notes": mu.meta.get("notes", []),
        },
        "diagnostics": [
            {
                "id": r.id,
                "op": r.op,
                "params": r.params,
                "quantities": {k: _clean_float(v) for k, v in r.quantities.items()},
                "values": r.values,
                "sequences": [rep.label for rep in r.sequences],
                "error": r.error,
            }
            for r in results
        ],
        "expectations": expectation_entries,
        "passed": passed,
        "timings": timings,
    }
    (out_dir / "report.json").write_text(
        json.dumps(report, sort_keys=True, indent=2, default=_json_default),
        encoding="utf-8",
    )
    return RunReport(
        scenario_name=scenario.name, passed=passed, report=report, out_dir=out_dir
    )
