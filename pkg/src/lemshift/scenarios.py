"""Scenario files: JSON descriptions of a measure, a degree budget, and
the diagnostics to run, with optional pass/fail expectations.

Top-level schema:

    {
      "name": "two_ovals",
      "polynomial": [[-1, 0], [0, 0], [1, 0]],      # ascending, [re, im]
      "level": 0.5,
      "N": 120,
      "seed": 7,
      "measure": {
        "parts": [{"kind": "area", "scale": 1.0}],  # optional per-part
                                                    # "polynomial"/"level"/"density"
        "atoms": [{"location": [0.9, 0.0], "mass": 0.05}],
        "quadrature": {"cell_depth": 10, ...}       # QuadratureConfig fields
      },
      "diagnostics": [{"op": "kappa_ratio", "id": "kr", "params": {"q": 2}}],
      "expectations": [{"quantity": "kr.extrapolated", "kind": "abs",
                        "target": 0.5, "tolerance": 0.02}]
    }

Densities: {"type": "const", "value": c} or
{"type": "offset_abs2", "offset": c, "coeffs": [[re, im], ...]} meaning
c + |Q(z)|^2. Expectation kinds: "abs" (|measured - target| <= tolerance),
"le", "ge" (inequalities against target), "bool" (exact match).

Scenario polynomials must be exactly monic; shipped scenarios live in the
package data directory and can be addressed by bare name.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field, replace
from importlib import resources
from pathlib import Path

import numpy as np

from .measures import QuadratureConfig
from .polynomials import PolynomialSpec, make_polynomial

__all__ = [
    "Scenario",
    "ScenarioError",
    "DiagnosticRequest",
    "Expectation",
    "load_scenario",
    "parse_scenario",
    "shipped_scenarios",
    "shipped_scenario_path",
]

_EXPECTATION_KINDS = ("abs", "le", "ge", "bool")


class ScenarioError(ValueError):
    """A scenario file failed validation; the message names the field."""


@dataclass(frozen=True, eq=False)
class DiagnosticRequest:
    id: str
    op: str
    params: dict = field(default_factory=dict)


@dataclass(frozen=True, eq=False)
class Expectation:
    quantity: str
    kind: str
    target: object
    tolerance: float = None


@dataclass(frozen=True, eq=False)
class Scenario:
    name: str
    poly: PolynomialSpec
    level: float
    N: int
    seed: int
    quadrature: QuadratureConfig
    parts: tuple
    atoms: tuple
    diagnostics: tuple
    expectations: tuple
    raw: dict

    def with_overrides(self, depth: int = None, degree: int = None) -> "Scenario":
        """Apply CLI overrides for cell depth and degree budget."""
        out = self
        if depth is not None:
            out = replace(out, quadrature=replace(out.quadrature, cell_depth=depth))
        if degree is not None:
            _check(degree >= 4 * out.poly.degree, "N", "must be at least 4*deg P")
            out = replace(out, N=degree)
        return out


def _check(cond, fieldname, msg):
    if not cond:
        raise ScenarioError(f"{fieldname}: {msg}")


def _complex_pair(v, fieldname):
    _check(
        isinstance(v, (list, tuple)) and len(v) == 2,
        fieldname,
        "must be a [re, im] pair",
    )
    try:
        return complex(float(v[0]), float(v[1]))
    except (TypeError, ValueError):
        raise ScenarioError(f"{fieldname}: entries must be numbers") from None


def _parse_poly(spec, fieldname) -> PolynomialSpec:
    _check(isinstance(spec, list) and len(spec) >= 2, fieldname, "needs degree >= 1")
    coeffs = [_complex_pair(c, f"{fieldname}[{i}]") for i, c in enumerate(spec)]
    _check(
        abs(coeffs[-1] - 1.0) <= 1e-12,
        fieldname,
        f"leading coefficient must be 1 (monic), got {coeffs[-1]}",
    )
    return make_polynomial(coeffs)


def _parse_density(spec, fieldname):
    if spec is None:
        return None
    _check(isinstance(spec, dict) and "type" in spec, fieldname, "must name a type")
    if spec["type"] == "const":
        c = float(spec.get("value", 1.0))
        _check(c > 0, fieldname, "const density must be positive")
        return lambda z, c=c: np.full(np.shape(z), c, dtype=float)
    if spec["type"] == "offset_abs2":
        off = float(spec.get("offset", 0.0))
        _check(off > 0, fieldname, "offset must be positive")
        coeffs = [
            _complex_pair(c, f"{fieldname}.coeffs[{i}]")
            for i, c in enumerate(spec.get("coeffs", []))
        ]
        _check(len(coeffs) >= 1, fieldname, "offset_abs2 needs coefficients")
        rev = np.array(coeffs[::-1])
        return lambda z, rev=rev, off=off: off + np.abs(np.polyval(rev, z)) ** 2
    raise ScenarioError(f"{fieldname}: unknown density type {spec['type']!r}")


def parse_scenario(data: dict, name_hint: str = "") -> Scenario:
    """Validate a scenario dictionary; error messages name the field."""
    _check(isinstance(data, dict), "scenario", "must be a JSON object")
    name = data.get("name", name_hint)
    _check(isinstance(name, str) and name, "name", "must be a nonempty string")

    poly = _parse_poly(data.get("polynomial"), "polynomial")
    try:
        level = float(data.get("level"))
    except (TypeError, ValueError):
        raise ScenarioError("level: must be a positive number") from None
    _check(level > 0, "level", "must be positive")

    try:
        N = int(data.get("N"))
    except (TypeError, ValueError):
        raise ScenarioError("N: must be an integer") from None
    _check(N >= 4 * poly.degree, "N", f"must be at least 4*deg P = {4 * poly.degree}")
    seed = int(data.get("seed", 0))

    measure = data.get("measure", {})
    _check(isinstance(measure, dict), "measure", "must be an object")
    quad_raw = measure.get("quadrature", {})
    _check(isinstance(quad_raw, dict), "measure.quadrature", "must be an object")
    known = set(QuadratureConfig.__dataclass_fields__)
    for key in quad_raw:
        _check(key in known, f"measure.quadrature.{key}", "unknown field")
    if "radial_breaks" in quad_raw:
        quad_raw = dict(quad_raw, radial_breaks=tuple(quad_raw["radial_breaks"]))
    try:
        quadrature = QuadratureConfig(**quad_raw)
    except ValueError as exc:
        raise ScenarioError(f"measure.quadrature: {exc}") from None

    parts = []
    raw_parts = measure.get("parts", [])
    _check(isinstance(raw_parts, list), "measure.parts", "must be a list")
    for i, p in enumerate(raw_parts):
        f = f"measure.parts[{i}]"
        _check(isinstance(p, dict), f, "must be an object")
        kind = p.get("kind")
        _check(kind in ("area", "boundary"), f"{f}.kind", "must be 'area' or 'boundary'")
        part_poly = (
            _parse_poly(p["polynomial"], f"{f}.polynomial")
            if "polynomial" in p
            else poly
        )
        part_level = float(p.get("level", level))
        _check(part_level > 0, f"{f}.level", "must be positive")
        scale = float(p.get("scale", 1.0))
        _check(scale > 0, f"{f}.scale", "must be positive")
        parts.append(
            {
                "kind": kind,
                "poly": part_poly,
                "level": part_level,
                "scale": scale,
                "density": _parse_density(p.get("density"), f"{f}.density"),
                "label": p.get("label", f"{kind}{i}"),
            }
        )

    atoms = []
    raw_atoms = measure.get("atoms", [])
    _check(isinstance(raw_atoms, list), "measure.atoms", "must be a list")
    for i, a in enumerate(raw_atoms):
        f = f"measure.atoms[{i}]"
        _check(isinstance(a, dict), f, "must be an object")
        loc = _complex_pair(a.get("location"), f"{f}.location")
        mass = float(a.get("mass", 0.0))
        _check(mass > 0, f"{f}.mass", "must be positive")
        atoms.append((loc, mass))
    _check(parts or atoms, "measure", "needs at least one part or atom")

    diagnostics = []
    seen = set()
    raw_diag = data.get("diagnostics", [])
    _check(isinstance(raw_diag, list), "diagnostics", "must be a list")
    for i, d in enumerate(raw_diag):
        f = f"diagnostics[{i}]"
        _check(isinstance(d, dict), f, "must be an object")
        op = d.get("op")
        _check(isinstance(op, str) and op, f"{f}.op", "must be a nonempty string")
        ident = d.get("id", op)
        _check(isinstance(ident, str) and ident, f"{f}.id", "must be a nonempty string")
        _check(ident not in seen, f"{f}.id", f"duplicate id {ident!r}")
        seen.add(ident)
        params = d.get("params", {})
        _check(isinstance(params, dict), f"{f}.params", "must be an object")
        diagnostics.append(DiagnosticRequest(id=ident, op=op, params=params))

    expectations = []
    raw_exp = data.get("expectations", [])
    _check(isinstance(raw_exp, list), "expectations", "must be a list")
    for i, e in enumerate(raw_exp):
        f = f"expectations[{i}]"
        _check(isinstance(e, dict), f, "must be an object")
        quantity = e.get("quantity")
        _check(
            isinstance(quantity, str) and "." in quantity,
            f"{f}.quantity",
            "must be '<diagnostic id>.<field>'",
        )
        _check(
            quantity.split(".", 1)[0] in seen,
            f"{f}.quantity",
            f"references unknown diagnostic id {quantity.split('.', 1)[0]!r}",
        )
        kind = e.get("kind", "abs")
        _check(kind in _EXPECTATION_KINDS, f"{f}.kind", f"must be one of {_EXPECTATION_KINDS}")
        _check("target" in e, f"{f}.target", "is required")
        tol = e.get("tolerance")
        if kind == "abs":
            _check(
                isinstance(tol, (int, float)) and tol >= 0,
                f"{f}.tolerance",
                "must be a nonnegative number for kind 'abs'",
            )
        expectations.append(
            Expectation(quantity=quantity, kind=kind, target=e["target"], tolerance=tol)
        )

    return Scenario(
        name=name,
        poly=poly,
        level=level,
        N=N,
        seed=seed,
        quadrature=quadrature,
        parts=tuple(parts),
        atoms=tuple(atoms),
        diagnostics=tuple(diagnostics),
        expectations=tuple(expectations),
        raw=data,
    )


def shipped_scenarios():
    """Names of scenario files shipped inside the package."""
    root = resources.files("lemshift") / "data"
    return sorted(p.name[:-5] for p in root.iterdir() if p.name.endswith(".json"))


def shipped_scenario_path(name: str) -> Path:
    root = resources.files("lemshift") / "data"
    p = root / f"{name}.json"
    if not p.is_file():
        raise ScenarioError(
            f"scenario: no shipped scenario named {name!r}; "
            f"available: {', '.join(shipped_scenarios())}"
        )
    return Path(str(p))


def load_scenario(source) -> Scenario:
    """Load a scenario from a path, shipped name, or dict."""
    if isinstance(source, dict):
        return parse_scenario(source)
    path = Path(source)
    if not path.is_file() and not str(source).endswith(".json"):
        path = shipped_scenario_path(str(source))
    if not path.is_file():
        raise ScenarioError(f"scenario: file not found: {source}")
    try:
        data = json.loads(path.read_text(encoding="utf-8"))
    except json.JSONDecodeError as exc:
        raise ScenarioError(
            f"scenario: invalid JSON in {path} at line {exc.lineno}: {exc.msg}"
        ) from None
    return parse_scenario(data, name_hint=path.stem)
