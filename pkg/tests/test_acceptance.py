"""Acceptance gate: one test per numbered criterion, one verdict line each.

Every test computes its measurements, records an "acceptance NN name:
PASS/FAIL" line (echoed in the terminal summary), and then asserts. The
tolerances are frozen; loosening them to make a run green defeats the
point of the gate.
"""

import time

import numpy as np

from lemshift import (
    LemniscateSpec,
    MeasurePart,
    QuadratureConfig,
    assemble_measure,
    block_toeplitz_diagnostic,
    char_poly_check,
    christoffel_shift_check,
    evaluate_phi,
    exterior_kappa_check,
    islands_reference,
    kappa_ratio,
    make_polynomial,
    orthogonalize,
    orthonormality_residual,
    poly_of_section,
    ratio_asymptotics,
    residue_kappa_ratio,
    right_limit,
    scale_measure,
    shift_residual_profile,
    trace_window,
    weak_concentration,
)

Z_EXT = 2.5 + 0.5j
Z_ORACLE = 2.2 + 0.4j


def _verdict(log, num, name, ok, detail):
    line = f"acceptance {num:02d} {name}: {'PASS' if ok else 'FAIL'} ({detail})"
    log.append(line)
    print(line)
    return line


def _moment_monic(mu, n, z):
    """Monic Phi_n(z) from raw moment determinants, no recurrence involved."""
    pts = mu.support_points()
    w = mu.support_weights()
    K = np.empty((n + 1, n + 1), dtype=complex)
    for j in range(n):
        for k in range(n + 1):
            K[j, k] = np.sum(w * pts**k * np.conj(pts) ** j)
    K[n] = [z**k for k in range(n + 1)]
    den = np.linalg.det(K[:n, :n]) if n else 1.0
    return np.linalg.det(K) / den


def _monic_at(bundle, n, z):
    phi = evaluate_phi(bundle.section, bundle.basis.kappa[0], z, n)
    return phi[n] / bundle.basis.kappa[n]


def test_criterion_01_disk_oracle(acceptance_log):
    t0 = time.perf_counter()
    poly = make_polynomial([0.0, 1.0])
    part = MeasurePart(lemniscate=LemniscateSpec(poly, 1.0), kind="area")
    mu = assemble_measure([part], (), QuadratureConfig())
    basis, section = orthogonalize(mu, 60)
    elapsed = time.perf_counter() - t0

    n = np.arange(1, 60)
    sub_dev = np.abs(section.subdiagonal() - np.sqrt(n / (n + 1))).max()
    ns = np.arange(61)
    kap_dev = np.abs(basis.kappa - np.sqrt((ns + 1) / np.pi)).max()
    off = section.entries.copy()
    off[n, n - 1] = 0.0
    off_max = np.abs(off).max()

    ok = sub_dev <= 1e-10 and kap_dev <= 1e-10 and off_max < 1e-10 and elapsed < 10
    line = _verdict(
        acceptance_log,
        1,
        "disk-oracle",
        ok,
        f"subdiag {sub_dev:.2e}, kappa {kap_dev:.2e}, offband {off_max:.2e}, "
        f"{elapsed:.1f}s",
    )
    assert ok, line


def test_criterion_02_char_poly(all_bundles, acceptance_log):
    worst_det = 0.0
    worst_mom = 0.0
    for bundle in all_bundles.values():
        worst_det = max(
            worst_det, char_poly_check(bundle.section, bundle.basis, 15, [Z_EXT])
        )
        for n in range(7):
            mono = _monic_at(bundle, n, Z_ORACLE)
            oracle = _moment_monic(bundle.mu, n, Z_ORACLE)
            rel = abs(mono - oracle) / max(1.0, abs(mono))
            worst_mom = max(worst_mom, rel)
    ok = worst_det < 1e-7 and worst_mom <= 1e-6
    line = _verdict(
        acceptance_log,
        2,
        "char-poly-vs-determinants",
        ok,
        f"det route {worst_det:.2e}, moment oracle {worst_mom:.2e}",
    )
    assert ok, line


def test_criterion_03_residual_identity(all_bundles, acceptance_log):
    worst = 0.0
    for bundle in all_bundles.values():
        profile = shift_residual_profile(
            bundle.section, bundle.poly, bundle.level, bundle.basis, bundle.mu
        )
        assert len(profile) > 0
        worst = max(
            worst, max(abs(p.matrix_sq - p.measure_sq) for p in profile)
        )
    ok = worst <= 1e-8
    line = _verdict(
        acceptance_log,
        3,
        "matrix-measure-identity",
        ok,
        f"max gap {worst:.2e} over all scenarios and admissible n",
    )
    assert ok, line


def test_criterion_04_two_ovals_kappa(two_ovals_bundle, acceptance_log):
    t0 = time.perf_counter()
    b = two_ovals_bundle
    rep = kappa_ratio(b.basis, 2)
    extrap = float(np.real(rep.extrapolated))
    profile = shift_residual_profile(b.section, b.poly, b.level, b.basis, b.mu)
    n = np.array([p.n for p in profile])
    norms = np.array([p.matrix_norm for p in profile])
    early = np.median(norms[(n >= 5) & (n <= 20)])
    tail = np.median(norms[-15:])
    elapsed = time.perf_counter() - t0
    ok = abs(extrap - 0.5) <= 0.02 and tail < 0.5 * early and elapsed < 300
    line = _verdict(
        acceptance_log,
        4,
        "two-ovals-kappa-ratio",
        ok,
        f"extrap {extrap:.4f}, tail/early medians {tail:.3e}/{early:.3e}",
    )
    assert ok, line


def test_criterion_05_islands(islands_bundle, acceptance_log):
    b = islands_bundle
    targets = (1.0, 1.0, 0.7)
    residue_ok = True
    extraps = []
    for s in range(3):
        ex = float(np.real(residue_kappa_ratio(b.basis, 3, s).extrapolated))
        extraps.append(ex)
        residue_ok = residue_ok and abs(ex - targets[s]) <= 0.05

    quoted = {1: 0.51131, 2: 0.54589}
    ratio_ok = True
    ratio_vals = []
    for s in (1, 2):
        ref = islands_reference(3, 0.7, 2.0, s)
        rep = ratio_asymptotics(b.basis, b.mu, b.poly, b.level, 2.0, "residue", s=s)
        ex = complex(rep.extrapolated)
        ratio_vals.append(ex.real)
        ratio_ok = (
            ratio_ok
            and abs(ex - ref) <= 0.02
            and abs(ex.real - quoted[s]) <= 0.02
        )

    bt = block_toeplitz_diagnostic(b.section, 3, 4, 0.05)
    ok = residue_ok and ratio_ok and bt.verdict
    line = _verdict(
        acceptance_log,
        5,
        "islands-residue-limits",
        ok,
        f"residue kappas {np.round(extraps, 4).tolist()}, "
        f"ratios {np.round(ratio_vals, 5).tolist()}, toeplitz {bt.verdict}",
    )
    assert ok, line


def test_criterion_06_weak_concentration(
    disk_bundle, two_ovals_bundle, acceptance_log
):
    d = disk_bundle
    (rep,) = weak_concentration(d.basis, d.mu, d.poly, d.level, [0.5])
    eta = rep.values.real
    n = np.arange(11)
    disk_dev = np.abs(eta[:11] - 0.5 ** (2 * n + 2)).max()

    t = two_ovals_bundle
    (rep2,) = weak_concentration(t.basis, t.mu, t.poly, t.level, [0.4])
    v = rep2.values.real
    decreasing = bool(np.all(v[2:] <= v[:-2] + 1e-4))
    final = float(v[-1])

    ok = disk_dev <= 1e-6 and decreasing and final < 0.05
    line = _verdict(
        acceptance_log,
        6,
        "weak-concentration",
        ok,
        f"disk closed-form dev {disk_dev:.2e}, two_ovals final {final:.2e}, "
        f"stride-decreasing {decreasing}",
    )
    assert ok, line


def test_criterion_07_christoffel_shift(
    disk_bundle, two_ovals_bundle, acceptance_log
):
    (disk_rep,) = christoffel_shift_check(disk_bundle.mu, [0.0], 60)
    disk_dev = np.abs(disk_rep.values - 1.0).max()

    reports = christoffel_shift_check(two_ovals_bundle.mu, [1.0, -1.0], 110)
    chain_dev = max(np.abs(rep.values[-10:] - 1.0).max() for rep in reports)

    ok = disk_dev <= 1e-10 and chain_dev <= 0.02
    line = _verdict(
        acceptance_log,
        7,
        "christoffel-shift",
        ok,
        f"disk x=0 dev {disk_dev:.2e}, two_ovals tail dev {chain_dev:.2e}",
    )
    assert ok, line


def test_criterion_08_right_limits(disk_bundle, two_ovals_bundle, acceptance_log):
    d = disk_bundle
    rl = right_limit(d.section, 1, 0, 4, 0.02, poly=d.poly, level=d.level)
    shift_pattern = np.eye(9, k=-1)
    disk_dev = np.abs(rl.window - shift_pattern).max()

    t = two_ovals_bundle
    rl2 = right_limit(t.section, 2, 0, 4, 0.05, poly=t.poly, level=t.level)
    ok = (
        disk_dev <= 0.02
        and rl2.converged
        and rl2.poly_relation_dev <= 0.05
        and rl2.periodicity_dev <= 0.05
    )
    line = _verdict(
        acceptance_log,
        8,
        "right-limits",
        ok,
        f"disk window vs shift {disk_dev:.2e}, two_ovals P(X) "
        f"{rl2.poly_relation_dev:.2e} / periodicity {rl2.periodicity_dev:.2e}",
    )
    assert ok, line


def test_criterion_09_trace_windows(
    two_ovals_bundle, islands_bundle, acceptance_log
):
    devs = {}
    for name, b, q in (
        ("two_ovals", two_ovals_bundle, 2),
        ("islands", islands_bundle, 3),
    ):
        vals = np.array(
            [trace_window(b.section, q, n) for n in range(b.N - q - 15, b.N - q + 1)]
        )
        devs[name] = np.abs(vals).max()
    ok = all(v <= 0.05 for v in devs.values())
    line = _verdict(
        acceptance_log,
        9,
        "trace-windows",
        ok,
        f"two_ovals {devs['two_ovals']:.2e}, islands {devs['islands']:.2e} vs alpha=0",
    )
    assert ok, line


def test_criterion_10_exterior_atoms(exterior_atoms_bundle, acceptance_log):
    b = exterior_atoms_bundle
    atom_tail = 0.0
    for i, (a, mass) in enumerate(b.mu.atoms):
        col = b.mu.nodes.size + i
        terms = mass * np.abs(b.basis.values[:, col]) ** 2
        atom_tail = max(atom_tail, float(terms[-20:].max()))

    extrap = float(np.real(kappa_ratio(b.basis, 2).extrapolated))
    seq = exterior_kappa_check(b.mu, b.basis, [1.6, 0.2j], 2, 0.5)
    emitted = seq.values.size >= 50 and np.isfinite(seq.values).all()

    ok = atom_tail < 1e-3 and abs(extrap - 0.5) <= 0.05 and emitted
    line = _verdict(
        acceptance_log,
        10,
        "exterior-atoms",
        ok,
        f"atom tail {atom_tail:.2e}, kappa extrap {extrap:.4f}, "
        f"weighted sequence length {seq.values.size}",
    )
    assert ok, line


def test_criterion_11_property_suite(all_bundles, acceptance_log):
    checks = {}

    worst_orth = max(
        orthonormality_residual(b.basis, b.mu) for b in all_bundles.values()
    )
    checks["orthonormality"] = worst_orth < 1e-9

    band_ok = True
    for b in all_bundles.values():
        H = b.section.entries
        below = np.tril(H, k=-2)
        sub = b.section.subdiagonal()
        band_ok = band_ok and np.abs(below).max() == 0.0
        band_ok = band_ok and np.abs(sub.imag).max() == 0.0 and (sub.real > 0).all()
        pm = poly_of_section(b.section, b.poly)
        band_ok = band_ok and np.abs(
            np.tril(pm.entries, k=-(b.poly.degree + 1))
        ).max() == 0.0
    checks["band structure"] = band_ok

    t = all_bundles["two_ovals"]
    b60, s60 = orthogonalize(t.mu, 60)
    b65, s65 = orthogonalize(t.mu, 65)
    p60 = poly_of_section(s60, t.poly).entries
    p65 = poly_of_section(s65, t.poly).entries
    cols = poly_of_section(s60, t.poly).exact_cols
    checks["window exactness"] = (
        np.abs(p60[:, :cols] - p65[:60, :cols]).max() <= 1e-12
    )

    ba = all_bundles["boundary_atoms"]
    scaled = scale_measure(ba.mu, 4.0)
    basis_s, section_s = orthogonalize(scaled, 40)
    kap_cov = np.abs(
        basis_s.kappa * 2.0 / ba.basis.kappa[:41] - 1.0
    ).max()
    h_cov = np.abs(section_s.entries - ba.section.entries[:40, :40]).max()
    checks["scaling covariance"] = kap_cov <= 1e-12 and h_cov <= 1e-12

    rng = np.random.default_rng(42)
    z0 = 0.3 + 0.2j
    extremal_ok = True
    for b in all_bundles.values():
        phi = evaluate_phi(b.section, b.basis.kappa[0], z0, 10)
        lam = 1.0 / (np.abs(phi) ** 2).sum()
        pts = b.mu.support_points()
        w = b.mu.support_weights()
        for _ in range(20):
            c = rng.standard_normal(11) + 1j * rng.standard_normal(11)
            c = c / np.polyval(c, z0)
            mass = float((w * np.abs(np.polyval(c, pts)) ** 2).sum())
            extremal_ok = extremal_ok and mass >= lam * (1 - 1e-10)
    checks["extremal bound"] = extremal_ok

    ok = all(checks.values())
    detail = ", ".join(f"{k} {'ok' if v else 'BAD'}" for k, v in checks.items())
    line = _verdict(acceptance_log, 11, "property-suite", ok, detail)
    assert ok, line
