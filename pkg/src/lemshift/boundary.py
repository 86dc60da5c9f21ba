"""Lemniscate level curves {|P(z)| = r} traced by phase continuation.

The curve is parametrized through the phase of P: points solve
P(z(t)) = r * exp(i*t). An Euler predictor along z'(t) = i*r*exp(i*t)/P'(z)
is followed by Newton correction onto the exact phase target at each step.
Each connected component of the level set covers the circle |w| = r a whole
number of times; tracing continues past t = 2*pi until the seed recurs, and
seeds reached mid-trace are absorbed into the same component. The total
number of turns across all components equals deg P.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .polynomials import PolynomialSpec

__all__ = [
    "LemniscateSpec",
    "BoundaryComponent",
    "BoundaryDiscretization",
    "SingularLevelError",
    "TracingError",
    "trace_boundary",
]


class SingularLevelError(ValueError):
    """The level passes through (or too near) a critical value of P."""


class TracingError(RuntimeError):
    """Phase continuation failed to follow or close the curve."""


@dataclass(frozen=True, eq=False)
class LemniscateSpec:
    """A sublevel region {z : |P(z)| < level} and its boundary curve."""

    poly: PolynomialSpec
    level: float

    def __post_init__(self):
        if not (self.level > 0):
            raise ValueError("level must be positive")


@dataclass(frozen=True, eq=False)
class BoundaryComponent:
    nodes: np.ndarray
    arc_weights: np.ndarray
    tangents: np.ndarray
    turns: int
    length: float
    closure_error: float


@dataclass(frozen=True, eq=False)
class BoundaryDiscretization:
    lemniscate: LemniscateSpec
    components: tuple
    nodes_per_turn: int

    @property
    def total_turns(self) -> int:
        return sum(c.turns for c in self.components)


def _check_regular_level(lem: LemniscateSpec) -> None:
    poly, r = lem.poly, lem.level
    if poly.degree < 2:
        return
    crit = np.roots(np.polyder(poly.coeffs[::-1]))
    if crit.size == 0:
        return
    gap = np.abs(np.abs(poly(crit)) - r).min()
    if gap <= 1e-8 * max(1.0, r):
        raise SingularLevelError(
            f"level {r} is within {gap:.3e} of a critical value of P"
        )


def trace_boundary(lem: LemniscateSpec, nodes_per_turn: int = 2048) -> BoundaryDiscretization:
    """Discretize {|P| = level} into closed components with arc weights.

    Arc weights are periodic-trapezoid weights for the phase parameter,
    dt * |z'(t)| with |z'(t)| = level / |P'(z)|, so summing a component's
    weights gives its length and weighted sums approximate arc-length
    integrals. nodes_per_turn points are placed per phase turn, so a
    component making k turns carries k * nodes_per_turn nodes.
    """
    if nodes_per_turn < 16:
        raise ValueError("nodes_per_turn must be at least 16")
    _check_regular_level(lem)
    poly, r = lem.poly, lem.level
    q = poly.degree

    seeds = poly.shifted(r).roots
    scale = 1.0 + np.abs(seeds).max()
    if q > 1:
        diffs = np.abs(seeds[:, None] - seeds[None, :])
        sep = diffs[diffs > 0].min()
        seed_tol = min(sep / 4.0, 1e-6 * scale)
    else:
        seed_tol = 1e-6 * scale

    dt = 2.0 * np.pi / nodes_per_turn
    newton_tol = 1e-13 * max(r, 1e-300)
    dmin = 1e-12 * (1.0 + np.abs(poly.coeffs).max())

    visited = np.zeros(q, dtype=bool)
    components = []
    for i in range(q):
        if visited[i]:
            continue
        visited[i] = True
        start = seeds[i]
        pts = [start]
        z = start
        turns = 0
        while True:
            for k in range(1, nodes_per_turn + 1):
                t = 2.0 * np.pi * turns + k * dt
                w_prev = r * np.exp(1j * (t - dt))
                target = r * np.exp(1j * t)
                d = poly.deriv(z)
                if abs(d) < dmin:
                    raise SingularLevelError(
                        "trace passed through a near-critical point of P"
                    )
                z = z + dt * 1j * w_prev / d
                for _ in range(12):
                    err = poly(z) - target
                    if abs(err) <= newton_tol:
                        break
                    d = poly.deriv(z)
                    if abs(d) < dmin:
                        raise SingularLevelError(
                            "trace passed through a near-critical point of P"
                        )
                    z = z - err / d
                else:
                    raise TracingError(
                        f"Newton correction stalled at t = {t:.6f}"
                    )
                if k < nodes_per_turn:
                    pts.append(z)
            turns += 1
            dist = np.abs(z - seeds)
            j = int(dist.argmin())
            if dist[j] > seed_tol:
                raise TracingError(
                    "full phase turn did not land on a seed point "
                    f"(offset {dist[j]:.3e})"
                )
            if j == i:
                closure_error = float(abs(z - start))
                break
            if visited[j]:
                raise TracingError("component collided with a visited seed")
            visited[j] = True
            pts.append(z)
            if turns > q:
                raise TracingError("component failed to close within deg P turns")

        nodes = np.asarray(pts)
        dp = poly.deriv(nodes)
        t_k = 2.0 * np.pi * np.arange(nodes.size) / nodes_per_turn
        velocity = 1j * r * np.exp(1j * t_k) / dp
        speed = np.abs(velocity)
        components.append(
            BoundaryComponent(
                nodes=nodes,
                arc_weights=dt * speed,
                tangents=velocity / speed,
                turns=turns,
                length=float(dt * speed.sum()),
                closure_error=closure_error,
            )
        )
    return BoundaryDiscretization(
        lemniscate=lem, components=tuple(components), nodes_per_turn=nodes_per_turn
    )
