"""Monic complex polynomials with certified roots.

Coefficients are stored in ascending order: coeffs[k] multiplies z**k and
coeffs[degree] == 1 exactly. Roots come from the companion matrix and are
polished with one Newton step, then certified by a residual bound; a spec
that fails certification is rejected rather than silently accepted.
"""

from __future__ import annotations

import warnings
from dataclasses import dataclass, field

import numpy as np

__all__ = ["PolynomialSpec", "make_polynomial", "polynomial_from_roots"]

_LEAD_TOL = 1e-12


@dataclass(frozen=True, eq=False)
class PolynomialSpec:
    """A monic polynomial P of degree q >= 1.

    alpha is the sum of the roots, equal to -coeffs[q-1].
    """

    coeffs: np.ndarray
    degree: int
    roots: np.ndarray
    alpha: complex = field(init=False)

    def __post_init__(self):
        object.__setattr__(self, "alpha", complex(-self.coeffs[self.degree - 1]))

    def __call__(self, z):
        return np.polyval(self.coeffs[::-1], z)

    def deriv(self, z):
        """P'(z), evaluated by Horner on the differentiated coefficients."""
        return np.polyval(np.polyder(self.coeffs[::-1]), z)

    def deriv_bound(self, centers, rho):
        """Upper bound for |P'| on closed disks |z - c| <= rho.

        Uses P'(z) = sum_j prod_{k != j} (z - x_k) and the triangle
        inequality, so the bound is sum_j prod_{k != j} (|c - x_k| + rho).
        Valid for every z in the disk; rho must be >= 0.
        """
        c = np.asarray(centers, dtype=complex)
        d = np.abs(c[..., None] - self.roots) + rho
        prod_all = d.prod(axis=-1)
        return (prod_all[..., None] / d).sum(axis=-1)

    def shifted(self, delta: complex) -> "PolynomialSpec":
        """The monic polynomial P(z) - delta (same degree, shifted roots)."""
        c = self.coeffs.copy()
        c[0] -= delta
        return make_polynomial(c)


def make_polynomial(coeffs) -> PolynomialSpec:
    """Build a PolynomialSpec from ascending coefficients.

    The leading coefficient must be within 1e-12 of 1; otherwise the input
    is normalized with a warning (a zero leading coefficient is an error).
    Roots are companion-matrix eigenvalues polished by one Newton step and
    certified: max |P(root)| <= 1e-10 * (1 + max |coeff|), or the input is
    rejected.
    """
    c = np.asarray(coeffs, dtype=complex).ravel()
    if c.size < 2:
        raise ValueError("polynomial must have degree >= 1")
    lead = c[-1]
    if lead == 0:
        raise ValueError("leading coefficient is zero")
    if abs(lead - 1.0) > _LEAD_TOL:
        warnings.warn(
            f"leading coefficient {lead} normalized to 1", stacklevel=2
        )
        c = c / lead
    else:
        c = c.copy()
    c[-1] = 1.0
    q = c.size - 1

    roots = np.roots(c[::-1])
    dcoef = np.polyder(c[::-1])
    pv = np.polyval(c[::-1], roots)
    dv = np.polyval(dcoef, roots)
    safe = np.abs(dv) > 0
    roots = roots - np.where(safe, pv / np.where(safe, dv, 1.0), 0.0)

    scale = 1.0 + np.abs(c).max()
    resid = np.abs(np.polyval(c[::-1], roots))
    if resid.max() > 1e-10 * scale:
        raise ValueError(
            f"root certification failed: residual {resid.max():.3e} "
            f"exceeds {1e-10 * scale:.3e}"
        )
    order = np.lexsort((roots.imag, roots.real))
    return PolynomialSpec(coeffs=c, degree=q, roots=roots[order])


def polynomial_from_roots(roots) -> PolynomialSpec:
    """Monic polynomial with the given roots (exact by construction)."""
    r = np.asarray(roots, dtype=complex).ravel()
    if r.size == 0:
        raise ValueError("need at least one root")
    c = np.atleast_1d(np.poly(r))[::-1].astype(complex)
    c[-1] = 1.0
    order = np.lexsort((r.imag, r.real))
    return PolynomialSpec(coeffs=c, degree=r.size, roots=r[order])
