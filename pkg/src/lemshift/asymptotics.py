"""Sequence asymptotics: kappa ratios, concentration, kernels, references.

Every diagnostic here emits SequenceReport objects: a labeled sequence
indexed by degree plus an optional extrapolated limit. Extrapolation is
iterated Aitken delta-squared on the tail third of the sequence: sweeps
repeat while they keep contracting the tail, denominators below 1e-12
stop the sweep, and if the very first sweep is rejected the raw last
value ships with method "raw-last". No rate assumptions are made.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Optional, Union

import numpy as np

from .measures import (
    DiscretizedMeasure,
    apply_polynomial_weight,
    hull_distance,
    scale_measure,
)
from .orthopoly import OrthoBasis, evaluate_phi, orthogonalize
from .polynomials import PolynomialSpec, polynomial_from_roots

__all__ = [
    "SequenceReport",
    "KboundReport",
    "aitken_limit",
    "make_report",
    "christoffel_lambda",
    "kbound_scan",
    "weak_concentration",
    "kappa_ratio",
    "residue_kappa_ratio",
    "ratio_asymptotics",
    "christoffel_shift_check",
    "exterior_kappa_check",
    "islands_reference",
]

_AITKEN_GUARD = 1e-12


@dataclass(frozen=True, eq=False)
class SequenceReport:
    """A degree-indexed diagnostic sequence with optional extrapolation.

    n_values is strictly increasing; extrapolated is present only when the
    sequence has at least 6 entries, and method records how it was made
    ("aitken" or "raw-last").
    """

    label: str
    n_values: np.ndarray
    values: np.ndarray
    extrapolated: Optional[Union[float, complex]]
    method: Optional[str]

    def __post_init__(self):
        if self.n_values.size != self.values.size:
            raise ValueError("n_values and values must have equal length")
        if self.n_values.size > 1 and not (np.diff(self.n_values) > 0).all():
            raise ValueError("n_values must be strictly increasing")


def aitken_limit(values):
    """Iterated Aitken delta-squared limit of a sequence tail.

    Returns (limit, method). Sweeps run until a denominator d2 - d1 falls
    below 1e-12 or fewer than 3 terms remain; among all sweeps (including
    the untouched sequence) the one whose own tail is most contracted
    supplies the limit. If no sweep could run, the raw last value ships
    with method "raw-last".
    """
    s = np.asarray(values)
    if s.size == 0:
        raise ValueError("empty sequence")
    cur = s.astype(complex) if np.iscomplexobj(s) else s.astype(float)
    tail = lambda a: abs(a[-1] - a[-2]) if a.size > 1 else np.inf
    candidates = [(tail(cur), 0, cur[-1])]
    sweep = 0
    while cur.size >= 3:
        d1 = cur[1:-1] - cur[:-2]
        d2 = cur[2:] - cur[1:-1]
        den = d2 - d1
        if np.any(np.abs(den) < _AITKEN_GUARD):
            break
        nxt = cur[2:] - d2 * d2 / den
        if not np.all(np.isfinite(nxt)):
            break
        cur = nxt
        sweep += 1
        candidates.append((tail(cur), sweep, cur[-1]))
    _, picked, best = min(candidates, key=lambda c: c[0])
    method = "aitken" if picked > 0 else "raw-last"
    if np.iscomplexobj(s):
        return complex(best), method
    return float(best), method


def make_report(label, n_values, values, extrapolate: bool = True) -> SequenceReport:
    """Package a sequence; Aitken runs on the tail third when long enough."""
    n_values = np.asarray(n_values)
    values = np.asarray(values)
    extrapolated = None
    method = None
    if extrapolate and values.size >= 6:
        tail = values[-max(values.size // 3, 6):]
        extrapolated, method = aitken_limit(tail)
    return SequenceReport(
        label=label,
        n_values=n_values,
        values=values,
        extrapolated=extrapolated,
        method=method,
    )


def _phi_at(basis: OrthoBasis, z) -> np.ndarray:
    """phi_0..phi_N at arbitrary z from the stored recurrence.

    The square section provides phi_0..phi_{N-1}; the top degree comes from
    the last stored column together with the subdiagonal entry recovered as
    kappa_{N-1} / kappa_N.
    """
    sec = basis.recurrence
    N = basis.degree
    zz = np.asarray(z, dtype=complex)
    phi = evaluate_phi(sec, basis.kappa[0], zz, N - 1)
    H = sec.entries
    beta_N = basis.kappa[N - 1] / basis.kappa[N]
    top = (zz * phi[N - 1] - np.tensordot(H[:, N - 1], phi, axes=1)) / beta_N
    return np.concatenate([phi, top[None, ...]], axis=0)


def christoffel_lambda(basis: OrthoBasis, z) -> float:
    """Christoffel-function upper bound (sum_{n<=N} |phi_n(z)|^2)^{-1}.

    The true lambda(z) is an infimum over all degrees, so this degree-N
    truncation bounds it from above and is nonincreasing in N.
    """
    phi = _phi_at(basis, complex(z))
    return float(1.0 / (np.abs(phi) ** 2).sum())


@dataclass(frozen=True, eq=False)
class KboundReport:
    """Reproducing-kernel partial sums on an interior grid for |P|^2 mu."""

    grid: np.ndarray
    N: int
    margin: float
    partial_sums: np.ndarray
    growth_flags: np.ndarray
    meta: dict


def kbound_scan(
    mu: DiscretizedMeasure,
    poly: PolynomialSpec,
    r: float,
    N: int,
    margin: float,
    seed: int = 0,
    max_grid: int = 200,
) -> KboundReport:
    """Kernel partial sums S_n(z) = sum_{j<=n} |phi_j(z; |P|^2 mu)|^2.

    The grid is the nodes with |P(z)| <= (1-margin) r, subsampled to at
    most max_grid points (seeded, deterministic). A point is flagged when
    the last decade of degrees (n in (0.9 N, N]) contributes more than 5%
    of S_N, suggesting the kernel is not staying bounded there.
    """
    if not (0 < margin < 1):
        raise ValueError("margin must be in (0, 1)")
    mu_q = apply_polynomial_weight(mu, poly)
    inside = np.abs(poly(mu_q.nodes)) <= (1.0 - margin) * r
    idx = np.flatnonzero(inside)
    if idx.size == 0:
        raise ValueError(
            f"no nodes satisfy |P(z)| <= {(1 - margin) * r:.6g}; "
            "decrease margin or refine the measure"
        )
    if idx.size > max_grid:
        rng = np.random.default_rng(seed)
        idx = np.sort(rng.choice(idx, size=max_grid, replace=False))
    basis_q, _ = orthogonalize(mu_q, N)
    vals = basis_q.values[:, idx]
    partial = np.cumsum(np.abs(vals) ** 2, axis=0).T
    S_N = partial[:, -1]
    n0 = int(np.floor(0.9 * N))
    growth = (S_N - partial[:, n0]) > 0.05 * S_N
    return KboundReport(
        grid=mu_q.nodes[idx],
        N=N,
        margin=margin,
        partial_sums=partial,
        growth_flags=growth,
        meta={"n_grid": int(idx.size), "n_flagged": int(growth.sum())},
    )


def weak_concentration(
    basis: OrthoBasis,
    mu: DiscretizedMeasure,
    poly: PolynomialSpec,
    level: float,
    s_values,
):
    """eta_n(s) = integral over {|P| <= s} of |phi_n|^2 dmu, per s.

    Each s must lie in (0, level]. Returns one SequenceReport per s with
    n = 0..N; values sit in [0, 1] up to roundoff by normalization.
    """
    s_values = [float(s) for s in s_values]
    for s in s_values:
        if not (0 < s <= level * (1 + 1e-12)):
            raise ValueError(f"s = {s} must lie in (0, level]")
    pts = mu.support_points()
    w = mu.support_weights()
    if w.size != basis.values.shape[1]:
        raise ValueError("basis and measure have different support sizes")
    pv = np.abs(poly(pts))
    n_values = np.arange(basis.degree + 1)
    reports = []
    for s in s_values:
        mask = pv <= s * (1 + 1e-9)
        eta = (np.abs(basis.values[:, mask]) ** 2 * w[mask]).sum(axis=1)
        reports.append(make_report(f"eta(s={s:g})", n_values, eta))
    return reports


def kappa_ratio(basis: OrthoBasis, q: int) -> SequenceReport:
    """The sequence kappa_n / kappa_{n+q} with Aitken-extrapolated limit."""
    if not (1 <= q <= basis.degree / 4):
        raise ValueError("need 1 <= q <= N/4")
    k = basis.kappa
    n_values = np.arange(basis.degree - q + 1)
    return make_report(f"kappa_ratio(q={q})", n_values, k[:-q] / k[q:])


def residue_kappa_ratio(basis: OrthoBasis, q: int, s: int) -> SequenceReport:
    """kappa_{nq+s} / kappa_{nq+s+1} along one residue class."""
    if not (1 <= q <= basis.degree / 4):
        raise ValueError("need 1 <= q <= N/4")
    if not (0 <= s < q):
        raise ValueError("need 0 <= s < q")
    k = basis.kappa
    idx = np.arange(s, basis.degree, q)
    return make_report(
        f"residue_kappa_ratio(q={q},s={s})", np.arange(idx.size), k[idx] / k[idx + 1]
    )


def ratio_asymptotics(
    basis: OrthoBasis,
    mu: DiscretizedMeasure,
    poly: PolynomialSpec,
    level: float,
    z: complex,
    mode: str,
    s: int = 0,
) -> SequenceReport:
    """Pointwise polynomial ratio sequences at an external point z.

    mode "corollary": rho_n = P(z) phi_n(z) / (level * phi_{n+q}(z)),
    expected -> 1. mode "monic": Phi_{n+q}(z) / Phi_n(z), expected -> P(z).
    mode "residue": the within-class monic stride ratio
    Phi_{nq+s}(z) / Phi_{nq+s+1}(z) whose limits the islands closed forms
    describe. Every mode requires z strictly outside the support hull.
    Indices where the denominator polynomial vanishes numerically are
    dropped.
    """
    z = complex(z)
    q = poly.degree
    if mode not in ("corollary", "monic", "residue"):
        raise ValueError(f"unknown mode {mode!r}")
    if not hull_distance(mu, z) > 0:
        raise ValueError("z must lie strictly outside the support hull")

    phi = _phi_at(basis, z)
    k = basis.kappa
    N = basis.degree
    tiny = 1e-280 * max(np.abs(phi).max(), 1.0)
    if mode == "corollary":
        num = poly(z) * phi[: N - q + 1]
        den = level * phi[q:]
        n_values = np.arange(N - q + 1)
        label = f"ratio_corollary(z={z:g})"
    elif mode == "monic":
        num = phi[q:] * k[: N - q + 1]
        den = phi[: N - q + 1] * k[q:]
        n_values = np.arange(N - q + 1)
        label = f"ratio_monic(z={z:g})"
    else:
        if not (0 <= s < q):
            raise ValueError("need 0 <= s < q")
        idx = np.arange(s, N, q)
        num = phi[idx] * k[idx + 1]
        den = phi[idx + 1] * k[idx]
        n_values = np.arange(idx.size)
        label = f"ratio_residue(z={z:g},s={s})"
    keep = np.abs(den) > tiny
    vals = num[keep] / den[keep]
    return make_report(label, n_values[keep], vals)


def christoffel_shift_check(mu: DiscretizedMeasure, roots, N: int):
    """kappa_n(mu_{m+1}) / kappa_{n+1}(mu_m) along a Christoffel chain.

    mu_0 = mu and mu_{m+1} = |z - x_{m+1}|^2 mu_m. Each x must lie in the
    support hull (interior transform); the step ratios tend to 1. Returns
    one SequenceReport per chain step.
    """
    roots = [complex(x) for x in roots]
    if not roots:
        raise ValueError("need at least one chain point")
    for x in roots:
        if hull_distance(mu, x) > 0:
            raise ValueError(f"chain point {x} lies outside the support hull")
    reports = []
    cur = mu
    basis_cur, _ = orthogonalize(cur, N)
    for m, x in enumerate(roots):
        nxt = apply_polynomial_weight(cur, polynomial_from_roots([x]))
        basis_nxt, _ = orthogonalize(nxt, N)
        ratios = basis_nxt.kappa[:N] / basis_cur.kappa[1 : N + 1]
        reports.append(
            make_report(f"christoffel_step{m}", np.arange(N), ratios)
        )
        cur, basis_cur = nxt, basis_nxt
    return reports


def exterior_kappa_check(
    mu: DiscretizedMeasure,
    basis: OrthoBasis,
    locations,
    q: int,
    r: float,
    N: int = None,
) -> SequenceReport:
    """kappa_{n-K}(nu) / kappa_n(mu) for nu = prod |z - z_j|^2 / r^{2/q} dmu.

    The z_j are K points exterior to {|P| <= r} that carry positive
    mu-mass (atoms of mu); that mass forces phi_n(z_j) -> 0, which is what
    makes the weighted extremal problem match a plain degree shift. The
    normalization divides each factor by the capacity squared and the
    ratio sequence then tends to r^{K/q}. Atoms of mu sitting exactly at
    the z_j acquire zero weight and drop out of nu. If mu does not charge
    the z_j the sequence still converges, but to a different, weight-
    dependent limit.
    """
    locations = [complex(x) for x in locations]
    K = len(locations)
    if K == 0:
        raise ValueError("need at least one exterior point")
    N = basis.degree if N is None else N
    if N > basis.degree:
        raise ValueError("N cannot exceed the basis degree")
    Q = polynomial_from_roots(locations)
    nu = scale_measure(apply_polynomial_weight(mu, Q), r ** (-2.0 * K / q))
    basis_nu, _ = orthogonalize(nu, N - K)
    n_values = np.arange(K, N + 1)
    vals = basis_nu.kappa[: N - K + 1] / basis.kappa[K : N + 1]
    return make_report("exterior_kappa", n_values, vals)


def islands_reference(q: int, r: float, z: complex, s: int) -> complex:
    """Closed-form limit of Phi_{nq+s}/Phi_{nq+s+1} for {|z^q - 1| < r}.

    For r < 1 and |z| >= 2 the argument of (z^q - 1 + r^2)/(z^q - 1) stays
    in (-pi, pi) and principal powers are safe. Classes s <= q-2 share one
    limit; the class s = q-1 closing a block has the other. The product of
    the q class limits telescopes to 1/P(z) = 1/(z^q - 1).
    """
    if not (0 < r < 1):
        raise ValueError("need 0 < r < 1")
    if not abs(z) >= 2:
        raise ValueError("need |z| >= 2 for principal-branch safety")
    if not (q >= 1 and 0 <= s <= q - 1):
        raise ValueError("need q >= 1 and 0 <= s <= q-1")
    z = complex(z)
    w = z**q - 1.0
    base = (w + r * r) / w
    if s <= q - 2:
        return (1.0 / z) * base ** (1.0 / q)
    return z ** (q - 1) / w * base ** ((1.0 - q) / q)
