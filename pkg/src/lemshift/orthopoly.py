"""Orthonormal polynomials and the shift operator's Hessenberg section.

Polynomials are represented by their values on the measure's support, and
the Gram-Schmidt recursion is driven by multiplication by z on those value
vectors (no coefficient arithmetic, so high degrees stay stable). Classical
Gram-Schmidt with one full reorthogonalization pass keeps the basis
orthonormal to near machine precision; the projection coefficients are
exactly the entries of the shift operator's Hessenberg matrix

    H[j, k] = <z phi_{k-1}, phi_{j-1}>   (1-based j, k; H[j, k] = 0, j > k+1)

and the subdiagonal entries are the positive residual norms, which also
drive the leading-coefficient recursion kappa_{n+1} = kappa_n / H[n+2, n+1].
"""

from __future__ import annotations

import hashlib
from dataclasses import dataclass

import numpy as np

from .measures import DiscretizedMeasure

__all__ = [
    "OrthoBasis",
    "HessenbergSection",
    "DegenerateMeasureError",
    "orthogonalize",
    "evaluate_phi",
    "orthonormality_residual",
]

_DEGEN_TOL = 1e-13


class DegenerateMeasureError(RuntimeError):
    """The measure supports only finitely many independent polynomials."""

    def __init__(self, degree_reached: int):
        self.degree_reached = degree_reached
        super().__init__(
            f"measure is degenerate: z * phi_{degree_reached} is numerically "
            f"dependent on degrees <= {degree_reached}"
        )


@dataclass(frozen=True, eq=False)
class HessenbergSection:
    """Leading size x size section of the shift matrix (upper Hessenberg).

    entries[j, k] holds the 1-based H[j+1, k+1]; all subdiagonal entries
    are real positive and anything below them is exactly zero.
    """

    entries: np.ndarray
    size: int
    measure_ref: str

    def __post_init__(self):
        if self.entries.shape != (self.size, self.size):
            raise ValueError("entries must be size x size")

    def subdiagonal(self) -> np.ndarray:
        return np.diag(self.entries, -1).real


@dataclass(frozen=True, eq=False)
class OrthoBasis:
    """Orthonormal basis phi_0..phi_N as values on the measure support.

    values[n] are phi_n at the support points (nodes then atoms); kappa[n]
    is the positive leading coefficient. recurrence is the associated
    Hessenberg section, usable to evaluate phi_n off the support.
    """

    values: np.ndarray
    kappa: np.ndarray
    degree: int
    recurrence: HessenbergSection
    measure_ref: str


def measure_fingerprint(mu: DiscretizedMeasure) -> str:
    h = hashlib.sha256()
    h.update(np.ascontiguousarray(mu.nodes).tobytes())
    h.update(np.ascontiguousarray(mu.weights).tobytes())
    for a, m in mu.atoms:
        h.update(np.complex128(a).tobytes())
        h.update(np.float64(m).tobytes())
    return h.hexdigest()[:16]


def orthogonalize(mu: DiscretizedMeasure, N: int):
    """Build phi_0..phi_N and the N x N Hessenberg section over mu.

    Returns (OrthoBasis, HessenbergSection). Raises DegenerateMeasureError
    (carrying the reached degree) when the residual of z*phi_n drops below
    1e-13 of its norm, i.e. the support cannot tell degree n+1 apart from
    lower degrees. Requires more support points than N.
    """
    if N < 1:
        raise ValueError("N must be at least 1")
    if mu.n_support <= N:
        raise DegenerateMeasureError(degree_reached=mu.n_support - 1)
    pts = mu.support_points()
    w = mu.support_weights()

    values = np.empty((N + 1, pts.size), dtype=complex)
    kappa = np.empty(N + 1)
    entries = np.zeros((N, N), dtype=complex)

    kappa[0] = 1.0 / np.sqrt(mu.total_mass)
    values[0] = kappa[0]
    for n in range(N):
        v = pts * values[n]
        vnorm = np.sqrt((w * np.abs(v) ** 2).sum())
        h = np.zeros(n + 1, dtype=complex)
        for _ in range(2):
            proj = np.conj(values[: n + 1] @ (w * np.conj(v)))
            v = v - proj @ values[: n + 1]
            h += proj
        beta = np.sqrt((w * np.abs(v) ** 2).sum())
        if beta <= _DEGEN_TOL * vnorm:
            raise DegenerateMeasureError(degree_reached=n)
        values[n + 1] = v / beta
        kappa[n + 1] = kappa[n] / beta
        entries[: n + 1, n] = h
        if n + 1 < N:
            entries[n + 1, n] = beta
    ref = measure_fingerprint(mu)
    section = HessenbergSection(entries=entries, size=N, measure_ref=ref)
    basis = OrthoBasis(
        values=values, kappa=kappa, degree=N, recurrence=section, measure_ref=ref
    )
    return basis, section


def evaluate_phi(section: HessenbergSection, kappa0: float, z, upto: int) -> np.ndarray:
    """Evaluate phi_0..phi_upto at z (scalar or array) from the recurrence.

    phi_{k+1}(z) = (z phi_k(z) - sum_{j<=k+1} H[j, k+1] phi_{j-1}(z)) / H[k+2, k+1],
    so upto can be at most section.size - 1.
    """
    if not (0 <= upto <= section.size - 1):
        raise ValueError("upto must be in 0..size-1")
    zz = np.asarray(z, dtype=complex)
    phi = np.empty((upto + 1,) + zz.shape, dtype=complex)
    phi[0] = kappa0
    H = section.entries
    for k in range(upto):
        acc = zz * phi[k] - np.tensordot(H[: k + 1, k], phi[: k + 1], axes=1)
        phi[k + 1] = acc / H[k + 1, k].real
    return phi


def orthonormality_residual(basis: OrthoBasis, mu: DiscretizedMeasure) -> float:
    """max |<phi_j, phi_k> - delta_jk| over the computed basis."""
    w = mu.support_weights()
    if w.size != basis.values.shape[1]:
        raise ValueError("basis and measure have different support sizes")
    gram = (basis.values * w) @ basis.values.conj().T
    gram[np.diag_indices_from(gram)] -= 1.0
    return float(np.abs(gram).max())
