"""Discretized measures on lemniscate regions, curves, and point masses.

A DiscretizedMeasure is a frozen node/weight list (plus atoms) that stands
in for a positive measure mu: inner products are weighted sums over the
support. Two quadrature routes build area parts:

* a polar Gauss-Legendre x equispaced-angle rule for disks (deg P = 1),
  exact for integrands z^a conj(z)^b up to a configured total degree;
* a certified dyadic subdivision for general {|P| < r}: each square cell is
  classified inside/outside/straddling using the disk bound
  |P(z) - P(c)| <= L * rho with L an explicit bound for |P'| on the cell,
  so acceptance and rejection are rigorous and only straddling cells at the
  deepest level are resolved by midpoint subsampling. The total straddling
  area is recorded as an accuracy bound.

Boundary parts ride on trace_boundary arc weights; densities and scales
multiply weights pointwise and must stay positive.
"""

from __future__ import annotations

import warnings
from dataclasses import dataclass, field
from typing import Callable, Optional

import numpy as np
import shapely
from numpy.polynomial.legendre import leggauss

from .boundary import LemniscateSpec, trace_boundary
from .polynomials import PolynomialSpec

__all__ = [
    "QuadratureConfig",
    "MeasurePart",
    "DiscretizedMeasure",
    "discretize_area",
    "assemble_measure",
    "apply_polynomial_weight",
    "scale_measure",
    "region_mass",
    "hull_distance",
]


@dataclass(frozen=True)
class QuadratureConfig:
    """Knobs for measure discretization.

    cell_depth: dyadic refinement levels below the root bounding square.
    boundary_nodes: trace nodes per phase turn for boundary parts.
    target_degree: highest monomial degree z^a conj(z)^b (a + b) the disk
        rule must integrate exactly; inner products of a degree-N basis
        need 2N + 2 or more.
    refinement_tol: tolerated straddling-cell area relative to total mass
        before an accuracy warning is recorded.
    subsample: straddling cells at the deepest level are split into a
        subsample x subsample midpoint grid.
    radial_breaks: radii strictly inside (0, level) where the disk rule's
        radial Gauss panel is split, so sublevel masses {|P| <= s} at
        those s are themselves quadrature-exact.
    """

    cell_depth: int = 10
    boundary_nodes: int = 2048
    target_degree: int = 242
    refinement_tol: float = 0.02
    subsample: int = 3
    radial_breaks: tuple = ()

    def __post_init__(self):
        if self.cell_depth < 1 or self.cell_depth > 14:
            raise ValueError("cell_depth must be in 1..14")
        if self.boundary_nodes < 16:
            raise ValueError("boundary_nodes must be at least 16")
        if self.target_degree < 2:
            raise ValueError("target_degree must be at least 2")
        if not (0 < self.refinement_tol < 1):
            raise ValueError("refinement_tol must be in (0, 1)")
        if self.subsample < 1:
            raise ValueError("subsample must be at least 1")
        if any(not (b > 0) for b in self.radial_breaks):
            raise ValueError("radial_breaks must be positive")


@dataclass(frozen=True, eq=False)
class MeasurePart:
    """One piece of a composite measure: an area or boundary part."""

    lemniscate: LemniscateSpec
    kind: str
    density: Optional[Callable] = None
    scale: float = 1.0
    label: str = ""

    def __post_init__(self):
        if self.kind not in ("area", "boundary"):
            raise ValueError("kind must be 'area' or 'boundary'")
        if not (self.scale > 0):
            raise ValueError("scale must be positive")


@dataclass(frozen=True, eq=False)
class DiscretizedMeasure:
    """Nodes, weights, atoms, and support geometry of a discretized measure.

    Immutable; transforms return new instances. The hull is the convex hull
    of all support points (shapely geometry), used for locating evaluation
    points relative to the support.
    """

    nodes: np.ndarray
    weights: np.ndarray
    atoms: tuple
    tags: np.ndarray
    total_mass: float
    hull: object
    meta: dict = field(default_factory=dict)

    @property
    def n_support(self) -> int:
        return self.nodes.size + len(self.atoms)

    def support_points(self) -> np.ndarray:
        if not self.atoms:
            return self.nodes
        return np.concatenate([self.nodes, np.array([a for a, _ in self.atoms])])

    def support_weights(self) -> np.ndarray:
        if not self.atoms:
            return self.weights
        return np.concatenate([self.weights, np.array([m for _, m in self.atoms])])


def _hull_of(points: np.ndarray):
    coords = np.column_stack([points.real, points.imag])
    return shapely.MultiPoint(coords).convex_hull


def _finish(nodes, weights, atoms, tags, meta) -> DiscretizedMeasure:
    atoms = tuple((complex(a), float(m)) for a, m in atoms)
    total = float(weights.sum() + sum(m for _, m in atoms))
    if not (total > 0):
        raise ValueError("measure has no mass")
    support = nodes
    if atoms:
        support = np.concatenate([nodes, np.array([a for a, _ in atoms])])
    return DiscretizedMeasure(
        nodes=nodes,
        weights=weights,
        atoms=atoms,
        tags=tags,
        total_mass=total,
        hull=_hull_of(support),
        meta=meta,
    )


def _polar_disk_rule(lem: LemniscateSpec, cfg: QuadratureConfig):
    """Area rule for deg P = 1, where {|P| < r} is a disk.

    The radial Gauss panel is split at any configured radial_breaks so the
    mass of each subdisk {|P| <= break} is integrated exactly too.
    """
    center = lem.poly.roots[0]
    radius = lem.level
    breaks = sorted(b for b in cfg.radial_breaks if b < radius)
    edges = [0.0] + breaks + [radius]
    m_r = int(np.ceil((cfg.target_degree + 2) / 2))
    m_t = cfg.target_degree + 1
    x, u = leggauss(m_r)
    rho_panels, w_panels = [], []
    for a, b in zip(edges[:-1], edges[1:]):
        rho_panels.append((b - a) * (x + 1.0) / 2.0 + a)
        w_panels.append(u * (b - a) / 2.0)
    rho = np.concatenate(rho_panels)
    w_r = np.concatenate(w_panels)
    theta = 2.0 * np.pi * np.arange(m_t) / m_t
    nodes = (center + rho[:, None] * np.exp(1j * theta)[None, :]).ravel()
    weights = np.broadcast_to(
        (w_r * rho * (2.0 * np.pi / m_t))[:, None], (rho.size, m_t)
    ).ravel().copy()
    meta = {"rule": "polar", "radial_nodes": rho.size, "angular_nodes": m_t}
    return nodes, weights, meta


def _dyadic_area_rule(lem: LemniscateSpec, cfg: QuadratureConfig):
    """Certified dyadic cell rule for {|P| < r} with deg P >= 1."""
    poly, r = lem.poly, lem.level
    margin = 1.05 * r ** (1.0 / poly.degree)
    xmin = poly.roots.real.min() - margin
    xmax = poly.roots.real.max() + margin
    ymin = poly.roots.imag.min() - margin
    ymax = poly.roots.imag.max() + margin
    half0 = max(xmax - xmin, ymax - ymin) / 2.0
    root_center = complex((xmin + xmax) / 2.0, (ymin + ymax) / 2.0)

    nodes = []
    weights = []
    centers = np.array([root_center])
    half = half0
    n_interior = 0
    for depth in range(cfg.cell_depth + 1):
        rho = half * np.sqrt(2.0)
        pc = np.abs(poly(centers))
        lip = poly.deriv_bound(centers, rho)
        inside = pc + lip * rho <= r
        outside = pc - lip * rho > r
        straddle = ~(inside | outside)
        if inside.any():
            nodes.append(centers[inside])
            weights.append(np.full(int(inside.sum()), (2.0 * half) ** 2))
            n_interior += int(inside.sum())
        centers = centers[straddle]
        if depth == cfg.cell_depth or centers.size == 0:
            break
        h = half / 2.0
        shifts = np.array([-h - 1j * h, h - 1j * h, -h + 1j * h, h + 1j * h])
        centers = (centers[:, None] + shifts[None, :]).ravel()
        half = h

    n_straddle_cells = centers.size
    straddle_area = n_straddle_cells * (2.0 * half) ** 2
    n_straddle_nodes = 0
    if n_straddle_cells:
        s = cfg.subsample
        offs = (2.0 * half) * ((np.arange(s) + 0.5) / s - 0.5)
        grid = (offs[:, None] + 1j * offs[None, :]).ravel()
        sub = (centers[:, None] + grid[None, :]).ravel()
        keep = np.abs(poly(sub)) <= r
        sub = sub[keep]
        n_straddle_nodes = sub.size
        nodes.append(sub)
        weights.append(np.full(sub.size, (2.0 * half / s) ** 2))

    nodes = np.concatenate(nodes) if nodes else np.empty(0, dtype=complex)
    weights = np.concatenate(weights) if weights else np.empty(0)
    meta = {
        "rule": "dyadic",
        "depth": cfg.cell_depth,
        "n_interior_cells": n_interior,
        "n_straddle_cells": n_straddle_cells,
        "n_straddle_nodes": n_straddle_nodes,
        "straddle_area": straddle_area,
        "area_estimate": float(weights.sum()),
    }
    return nodes, weights, meta


def discretize_area(lem: LemniscateSpec, cfg: QuadratureConfig):
    """Nodes, weights, and metadata for area measure on {|P| < level}."""
    if lem.poly.degree == 1:
        return _polar_disk_rule(lem, cfg)
    return _dyadic_area_rule(lem, cfg)


def assemble_measure(parts, atoms=(), config: QuadratureConfig = None) -> DiscretizedMeasure:
    """Compose area parts, boundary parts, and atoms into one measure.

    Boundary parts get arc weights from trace_boundary; densities (callable
    of z) and scales multiply weights and must stay positive. Atoms are
    (location, mass) pairs with positive mass at distinct points; an atom
    with |P| > level for every part is noted as exterior in the metadata.
    """
    cfg = config or QuadratureConfig()
    parts = list(parts)
    atoms = [(complex(a), float(m)) for a, m in atoms]
    if not parts and not atoms:
        raise ValueError("measure needs at least one part or atom")

    all_nodes, all_weights, all_tags = [], [], []
    meta = {"parts": [], "notes": []}
    for i, part in enumerate(parts):
        if not isinstance(part, MeasurePart):
            part = MeasurePart(*part)
        label = part.label or f"{part.kind}{i}"
        if part.kind == "area":
            nodes, weights, part_meta = discretize_area(part.lemniscate, cfg)
            if part_meta.get("rule") == "dyadic":
                rel = part_meta["straddle_area"] / max(weights.sum(), 1e-300)
                part_meta["straddle_relative"] = rel
                if rel > cfg.refinement_tol:
                    note = (
                        f"part {label}: straddling-cell area fraction "
                        f"{rel:.3e} exceeds refinement_tol {cfg.refinement_tol}"
                    )
                    meta["notes"].append(note)
                    warnings.warn(note, stacklevel=2)
        else:
            bd = trace_boundary(part.lemniscate, cfg.boundary_nodes)
            nodes = np.concatenate([c.nodes for c in bd.components])
            weights = np.concatenate([c.arc_weights for c in bd.components])
            part_meta = {
                "rule": "boundary",
                "n_components": len(bd.components),
                "turns": [c.turns for c in bd.components],
                "lengths": [c.length for c in bd.components],
                "closure_errors": [c.closure_error for c in bd.components],
            }
        if part.density is not None:
            dens = np.asarray(part.density(nodes), dtype=float)
            if not (dens > 0).all():
                raise ValueError(f"part {label}: density must be positive on nodes")
            weights = weights * dens
        weights = weights * part.scale
        part_meta["label"] = label
        meta["parts"].append(part_meta)
        all_nodes.append(nodes)
        all_weights.append(weights)
        all_tags.append(np.full(nodes.size, label, dtype="<U32"))

    for a, m in atoms:
        if not (m > 0):
            raise ValueError(f"atom at {a} has nonpositive mass {m}")
        exterior = parts and all(
            abs(p.lemniscate.poly(a)) > p.lemniscate.level * (1 + 1e-12)
            for p in parts
            if isinstance(p, MeasurePart)
        )
        if exterior:
            meta["notes"].append(f"exterior atom at {a}")
    locs = np.array([a for a, _ in atoms])
    if len(atoms) > 1:
        d = np.abs(locs[:, None] - locs[None, :])
        np.fill_diagonal(d, np.inf)
        if d.min() < 1e-12 * (1.0 + np.abs(locs).max()):
            raise ValueError("atoms must sit at distinct points")

    nodes = np.concatenate(all_nodes) if all_nodes else np.empty(0, dtype=complex)
    weights = np.concatenate(all_weights) if all_weights else np.empty(0)
    tags = (
        np.concatenate(all_tags) if all_tags else np.empty(0, dtype="<U32")
    )
    if nodes.size and not (weights > 0).all():
        raise ValueError("nonpositive node weight in assembled measure")
    return _finish(nodes, weights, atoms, tags, meta)


def apply_polynomial_weight(mu: DiscretizedMeasure, w_poly: PolynomialSpec) -> DiscretizedMeasure:
    """The measure |W(z)|^2 dmu for a polynomial W.

    Support points where W vanishes get zero weight and are dropped with a
    note; component tags become "weight-modified".
    """
    factor = np.abs(w_poly(mu.nodes)) ** 2
    keep = factor > 0
    dropped = int(mu.nodes.size - keep.sum())
    nodes = mu.nodes[keep]
    weights = mu.weights[keep] * factor[keep]
    atoms = []
    for a, m in mu.atoms:
        f = abs(w_poly(a)) ** 2
        if f > 0:
            atoms.append((a, m * f))
        else:
            dropped += 1
    meta = dict(mu.meta)
    notes = list(meta.get("notes", []))
    notes.append(f"polynomial weight |W|^2 applied; {dropped} support points dropped")
    meta["notes"] = notes
    tags = np.full(nodes.size, "weight-modified", dtype="<U32")
    return _finish(nodes, weights, atoms, tags, meta)


def scale_measure(mu: DiscretizedMeasure, c: float) -> DiscretizedMeasure:
    """The measure c * mu for a constant c > 0 (same support, same hull)."""
    if not (c > 0):
        raise ValueError("scale must be positive")
    return DiscretizedMeasure(
        nodes=mu.nodes,
        weights=mu.weights * c,
        atoms=tuple((a, m * c) for a, m in mu.atoms),
        tags=mu.tags,
        total_mass=mu.total_mass * c,
        hull=mu.hull,
        meta=dict(mu.meta),
    )


def region_mass(mu: DiscretizedMeasure, lem: LemniscateSpec, s: float) -> float:
    """mu({z : |P(z)| <= s}) for s up to the lemniscate level."""
    if not (0 <= s <= lem.level * (1 + 1e-12)):
        raise ValueError("s must lie in [0, level]")
    cut = s * (1 + 1e-9)
    mass = float(mu.weights[np.abs(lem.poly(mu.nodes)) <= cut].sum())
    for a, m in mu.atoms:
        if abs(lem.poly(a)) <= cut:
            mass += m
    return mass


def hull_distance(mu: DiscretizedMeasure, z: complex) -> float:
    """Distance from z to the convex hull of the support (0 if inside)."""
    return float(mu.hull.distance(shapely.Point(complex(z).real, complex(z).imag)))
