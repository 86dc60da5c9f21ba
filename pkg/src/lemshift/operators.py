"""Finite-section diagnostics for the shift operator.

Everything here runs on the N x N Hessenberg section H of the shift. A
polynomial P of the section is computed by matrix Horner; because H is
Hessenberg and the infinite matrix is banded below, columns 1..N - deg P
of P(H) coincide exactly with the corresponding columns of the infinite
operator's matrix, and entries below the deg P subdiagonal vanish exactly.
All asymptotic statements are probed inside those exact windows.

The reference shift R acts by R e_n = e_{n+1}, so R^q has ones on the q-th
subdiagonal; the comparison object for P(H) columns is r * R^q.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .measures import DiscretizedMeasure
from .orthopoly import HessenbergSection, OrthoBasis, evaluate_phi
from .polynomials import PolynomialSpec

__all__ = [
    "FiniteSection",
    "ShiftResidual",
    "RightLimitWindow",
    "BlockToeplitzReport",
    "poly_of_section",
    "shift_residual",
    "shift_residual_profile",
    "trace_window",
    "right_limit",
    "block_toeplitz_diagnostic",
    "char_poly_check",
    "operator_measure_identity",
]


@dataclass(frozen=True, eq=False)
class FiniteSection:
    """P(H) for a Hessenberg section H, with its exact-column window.

    Columns 1..exact_cols agree exactly with the infinite operator.
    """

    entries: np.ndarray
    exact_cols: int
    provenance: str


def poly_of_section(section: HessenbergSection, poly: PolynomialSpec) -> FiniteSection:
    """Evaluate P(H) by matrix Horner; records exact_cols = N - deg P."""
    N = section.size
    d = poly.degree
    if not d < N:
        raise ValueError("deg P must be smaller than the section size")
    eye = np.eye(N, dtype=complex)
    A = poly.coeffs[-1] * eye
    for c in poly.coeffs[-2::-1]:
        A = A @ section.entries + c * eye
    return FiniteSection(
        entries=A,
        exact_cols=N - d,
        provenance=f"degree-{d} matrix Horner of a {N}x{N} Hessenberg section",
    )


@dataclass(frozen=True)
class ShiftResidual:
    """Both routes to ||(P(M) - r R^q) e_n||^2 at one index n (1-based)."""

    n: int
    matrix_norm: float
    matrix_sq: float
    measure_sq: float


def _measure_side(basis: OrthoBasis, mu: DiscretizedMeasure, poly, r, n, q) -> float:
    w = mu.support_weights()
    pv2 = np.abs(poly(mu.support_points())) ** 2
    p_phi_sq = float((w * pv2 * np.abs(basis.values[n - 1]) ** 2).sum())
    return p_phi_sq + r * r - 2.0 * r * basis.kappa[n - 1] / basis.kappa[n + q - 1]


def shift_residual(
    section: HessenbergSection,
    poly: PolynomialSpec,
    r: float,
    n: int,
    basis: OrthoBasis,
    mu: DiscretizedMeasure,
    pmat: FiniteSection = None,
) -> ShiftResidual:
    """||(P(M) - r R^q) e_n|| by two independent routes.

    Matrix route: the norm of column n of P(H) with r subtracted at row
    n + q, valid while n + q <= exact_cols. Measure route: the identity
    ||P phi_{n-1}||^2 + r^2 - 2 r kappa_{n-1} / kappa_{n+q-1}, evaluated
    by quadrature. The two squares agree to roundoff on any discretized
    measure; the agreement is the cross-check.
    """
    q = poly.degree
    A = pmat if pmat is not None else poly_of_section(section, poly)
    if not (1 <= n and n + q <= A.exact_cols):
        raise ValueError(f"n + q must be at most exact_cols = {A.exact_cols}")
    col = A.entries[:, n - 1].copy()
    col[n + q - 1] -= r
    matrix_sq = float((np.abs(col) ** 2).sum())
    measure_sq = _measure_side(basis, mu, poly, r, n, q)
    return ShiftResidual(
        n=n,
        matrix_norm=float(np.sqrt(matrix_sq)),
        matrix_sq=matrix_sq,
        measure_sq=measure_sq,
    )


def shift_residual_profile(
    section: HessenbergSection,
    poly: PolynomialSpec,
    r: float,
    basis: OrthoBasis,
    mu: DiscretizedMeasure,
):
    """shift_residual at every admissible n (1 .. exact_cols - deg P)."""
    pmat = poly_of_section(section, poly)
    q = poly.degree
    return [
        shift_residual(section, poly, r, n, basis, mu, pmat=pmat)
        for n in range(1, pmat.exact_cols - q + 1)
    ]


def trace_window(section: HessenbergSection, q: int, n: int) -> complex:
    """sum_{j=1}^q H[n+j, n+j] (1-based), the length-q diagonal window at n."""
    if q < 1 or n < 0 or n + q > section.size:
        raise ValueError("need 0 <= n and n + q <= section size")
    idx = np.arange(n, n + q)
    return complex(section.entries[idx, idx].sum())


def _window_centers(section: HessenbergSection, q: int, s: int, m: int) -> np.ndarray:
    N = section.size
    lo = m + q
    hi = N - q - m
    first = lo + ((s - lo) % q)
    centers = np.arange(first, hi + 1, q)
    if centers.size < 4:
        raise ValueError(
            "fewer than 4 admissible windows; reduce m or increase the section"
        )
    return centers


def _window_at(section: HessenbergSection, n: int, m: int) -> np.ndarray:
    c = n - 1
    return section.entries[c - m : c + m + 1, c - m : c + m + 1]


@dataclass(frozen=True, eq=False)
class RightLimitWindow:
    """Entrywise limit of (2m+1)-windows along centers n = s (mod q)."""

    center_residue: int
    half_width: int
    window: np.ndarray
    subsequence: np.ndarray
    diffs: np.ndarray
    converged: bool
    tol: float
    poly_relation_dev: float
    periodicity_dev: float


def right_limit(
    section: HessenbergSection,
    q: int,
    s: int,
    m: int,
    tol: float,
    poly: PolynomialSpec = None,
    level: float = None,
) -> RightLimitWindow:
    """Track windows H[n-m..n+m, n-m..n+m] along n = s (mod q).

    Windows live in rows/cols [q, N-q] (1-based) and follow the largest
    available run of centers; converged means the last two windows differ
    by at most tol in sup norm. When poly and level are given, the final
    window X is also checked against P(X) = level * R^q on the sub-window
    that a degree-d product cannot contaminate from the window edge, and
    against q-periodicity along its diagonals.
    """
    if not (q >= 1 and 0 <= s < q and m >= 1 and tol > 0):
        raise ValueError("need q >= 1, 0 <= s < q, m >= 1, tol > 0")
    centers = _window_centers(section, q, s, m)
    windows = [_window_at(section, int(n), m) for n in centers]
    diffs = np.array(
        [np.abs(b - a).max() for a, b in zip(windows[:-1], windows[1:])]
    )
    X = windows[-1]
    dim = 2 * m + 1

    poly_dev = np.nan
    if poly is not None:
        if level is None:
            raise ValueError("level is required alongside poly")
        d = poly.degree
        if dim - 2 * d >= 1:
            eye = np.eye(dim, dtype=complex)
            PX = poly.coeffs[-1] * eye
            for c in poly.coeffs[-2::-1]:
                PX = PX @ X + c * eye
            target = level * np.eye(dim, k=-q)
            inner = slice(d, dim - d)
            poly_dev = float(np.abs((PX - target)[inner, inner]).max())

    a = np.arange(dim - q)
    periodicity_dev = float(
        np.abs(X[a[:, None], a[None, :]] - X[a[:, None] + q, a[None, :] + q]).max()
    )
    return RightLimitWindow(
        center_residue=s,
        half_width=m,
        window=X,
        subsequence=centers,
        diffs=diffs,
        converged=bool(diffs[-1] <= tol),
        tol=tol,
        poly_relation_dev=poly_dev,
        periodicity_dev=periodicity_dev,
    )


@dataclass(frozen=True, eq=False)
class BlockToeplitzReport:
    """Per-residue-class window convergence and the cross-class gluing."""

    q: int
    half_width: int
    tol: float
    class_last_diffs: np.ndarray
    class_converged: np.ndarray
    shift_devs: np.ndarray
    periodicity_devs: np.ndarray
    verdict: bool
    windows: tuple


def block_toeplitz_diagnostic(
    section: HessenbergSection, q: int, m: int, tol: float = 0.05
) -> BlockToeplitzReport:
    """Asymptotically-block-Toeplitz verdict from stride-q window runs.

    Each residue class s gets its own window sequence (centers n = s mod q)
    with sup-norm successive differences. The verdict is true when every
    class converges (last difference <= tol), every limit window is
    q-periodic along its diagonals, and consecutive classes glue onto one
    another: the class s+1 window must be the class s window shifted one
    step down the diagonal (wrapping s = q-1 back to class 0), all within
    the same tol.
    """
    limits = []
    last_diffs = np.empty(q)
    per_devs = np.empty(q)
    for s in range(q):
        rl = right_limit(section, q, s, m, tol)
        limits.append(rl.window)
        last_diffs[s] = rl.diffs[-1]
        per_devs[s] = rl.periodicity_dev
    shift_devs = np.empty(q)
    for s in range(q):
        A = limits[(s + 1) % q]
        B = limits[s]
        shift_devs[s] = np.abs(A[:-1, :-1] - B[1:, 1:]).max()
    converged = last_diffs <= tol
    verdict = bool(
        converged.all() and shift_devs.max() <= tol and per_devs.max() <= tol
    )
    return BlockToeplitzReport(
        q=q,
        half_width=m,
        tol=tol,
        class_last_diffs=last_diffs,
        class_converged=converged,
        shift_devs=shift_devs,
        periodicity_devs=per_devs,
        verdict=verdict,
        windows=tuple(limits),
    )


def char_poly_check(
    section: HessenbergSection, basis: OrthoBasis, n: int, test_points
) -> float:
    """max relative gap between det(zI - H_n) and the monic Phi_n(z).

    The determinant route uses a dense LU factorization per test point and
    never touches the recurrence; Phi_n(z) = phi_n(z) / kappa_n comes from
    evaluate_phi. Test points should lie away from the support (zeros of
    Phi_n live inside the hull). Points where the LU factors are exactly
    singular are skipped; n is capped at min(size - 1, 25) to keep the
    determinant well conditioned.
    """
    if not (1 <= n <= min(section.size - 1, 25)):
        raise ValueError("n must be in 1..min(size-1, 25)")
    pts = np.asarray(test_points, dtype=complex).ravel()
    if pts.size == 0:
        raise ValueError("need at least one test point")
    phi = evaluate_phi(section, basis.kappa[0], pts, n)
    monic = phi[n] / basis.kappa[n]
    Hn = section.entries[:n, :n]
    worst = -1.0
    skipped = 0
    for z, target in zip(pts, monic):
        sign, logabs = np.linalg.slogdet(z * np.eye(n) - Hn)
        if sign == 0:
            skipped += 1
            continue
        det = sign * np.exp(logabs)
        rel = abs(det - target) / max(abs(target), abs(det), 1e-300)
        worst = max(worst, rel)
    if worst < 0:
        raise ValueError("all test points hit singular sections")
    return worst


def operator_measure_identity(
    section: HessenbergSection,
    basis: OrthoBasis,
    mu: DiscretizedMeasure,
    poly: PolynomialSpec,
    k: int,
    n: int,
):
    """||P(M)^k e_{n+1}||^2 against integral |P|^{2k} |phi_n|^2 dmu.

    The matrix route powers the finite section, so columns are trusted only
    for n + 1 <= N - k deg P; outside that window the call is rejected.
    Returns (matrix_sq, measure_sq); the caller asserts agreement.
    """
    if k < 0 or n < 0:
        raise ValueError("need k >= 0 and n >= 0")
    N = section.size
    if n + 1 > N - k * poly.degree:
        raise ValueError(f"n + 1 must be at most {N - k * poly.degree}")
    A = poly_of_section(section, poly).entries
    B = np.linalg.matrix_power(A, k)
    matrix_sq = float((np.abs(B[:, n]) ** 2).sum())
    w = mu.support_weights()
    pv = np.abs(poly(mu.support_points())) ** (2 * k)
    measure_sq = float((w * pv * np.abs(basis.values[n]) ** 2).sum())
    return matrix_sq, measure_sq
