import numpy as np
import pytest

from lemshift import (
    LemniscateSpec,
    MeasurePart,
    QuadratureConfig,
    SequenceReport,
    assemble_measure,
    christoffel_lambda,
    christoffel_shift_check,
    exterior_kappa_check,
    islands_reference,
    kappa_ratio,
    kbound_scan,
    make_polynomial,
    orthogonalize,
    ratio_asymptotics,
    residue_kappa_ratio,
    weak_concentration,
)
from lemshift.asymptotics import aitken_limit, make_report


def test_aitken_geometric():
    n = np.arange(30)
    seq = 2.0 + 0.6**n
    limit, method = aitken_limit(seq)
    assert method == "aitken"
    assert abs(limit - 2.0) < 1e-10


def test_aitken_alternating():
    n = np.arange(25)
    seq = 1.0 + (-0.5) ** n
    limit, _ = aitken_limit(seq)
    assert abs(limit - 1.0) < 1e-10


def test_aitken_constant_falls_back():
    limit, method = aitken_limit(np.full(10, 3.25))
    assert limit == 3.25
    assert method == "raw-last"


def test_aitken_power_law():
    n = np.arange(1, 120)
    limit, _ = aitken_limit(5.0 + 1.0 / n**2)
    assert abs(limit - 5.0) < 1e-4


def test_make_report_validation():
    with pytest.raises(ValueError):
        SequenceReport("x", np.arange(3), np.arange(4.0), None, None)
    with pytest.raises(ValueError):
        make_report("x", np.array([0, 2, 1]), np.zeros(3))
    rep = make_report("short", np.arange(4), np.ones(4))
    assert rep.extrapolated is None and rep.method is None


def test_christoffel_lambda_disk(small_disk_bundle):
    b = small_disk_bundle
    assert abs(christoffel_lambda(b.basis, 0.0) - np.pi) < 1e-10


def test_christoffel_lambda_decreasing_in_degree(small_disk_bundle, disk_bundle):
    small = christoffel_lambda(small_disk_bundle.basis, 0.3 + 0.1j)
    big = christoffel_lambda(disk_bundle.basis, 0.3 + 0.1j)
    assert big <= small * (1 + 1e-12)


def test_kappa_ratio_guards(small_disk_bundle):
    b = small_disk_bundle
    with pytest.raises(ValueError):
        kappa_ratio(b.basis, 0)
    with pytest.raises(ValueError):
        kappa_ratio(b.basis, b.N)
    rep = kappa_ratio(b.basis, 2)
    assert rep.values.size == b.N - 1
    with pytest.raises(ValueError):
        residue_kappa_ratio(b.basis, 2, 2)


def test_weak_concentration_bounds(two_ovals_bundle):
    b = two_ovals_bundle
    reports = weak_concentration(b.basis, b.mu, b.poly, b.level, [0.3, 0.5])
    for rep in reports:
        v = rep.values.real
        assert v.min() >= -1e-10
        assert v.max() <= 1 + 1e-10
    assert np.abs(reports[1].values - 1.0).max() < 1e-10
    with pytest.raises(ValueError):
        weak_concentration(b.basis, b.mu, b.poly, b.level, [0.6])
    with pytest.raises(ValueError):
        weak_concentration(b.basis, b.mu, b.poly, b.level, [0.0])


def test_kbound_scan_deterministic(two_ovals_bundle):
    b = two_ovals_bundle
    r1 = kbound_scan(b.mu, b.poly, b.level, 40, 0.2, seed=9, max_grid=50)
    r2 = kbound_scan(b.mu, b.poly, b.level, 40, 0.2, seed=9, max_grid=50)
    assert np.array_equal(r1.grid, r2.grid)
    assert np.array_equal(r1.partial_sums, r2.partial_sums)
    assert (np.diff(r1.partial_sums, axis=1) >= -1e-15).all()
    assert r1.meta["n_grid"] == 50
    with pytest.raises(ValueError):
        kbound_scan(b.mu, b.poly, b.level, 40, 1.5)


def test_kbound_scan_needs_interior_nodes():
    lem = LemniscateSpec(make_polynomial([0.0, 1.0]), 1.0)
    cfg = QuadratureConfig(boundary_nodes=64)
    mu = assemble_measure([MeasurePart(lemniscate=lem, kind="boundary")], (), cfg)
    with pytest.raises(ValueError):
        kbound_scan(mu, lem.poly, 1.0, 10, 0.2)


def test_ratio_asymptotics_guards(small_disk_bundle):
    b = small_disk_bundle
    with pytest.raises(ValueError):
        ratio_asymptotics(b.basis, b.mu, b.poly, 1.0, 0.1, "corollary")
    with pytest.raises(ValueError):
        ratio_asymptotics(b.basis, b.mu, b.poly, 1.0, 2.0, "nope")
    rep = ratio_asymptotics(b.basis, b.mu, b.poly, 1.0, 2.0, "monic")
    assert abs(complex(rep.extrapolated) - 2.0) < 0.01


def test_christoffel_shift_rejects_exterior_point(small_disk_bundle):
    with pytest.raises(ValueError):
        christoffel_shift_check(small_disk_bundle.mu, [5.0], 10)


def test_exterior_kappa_guards(small_disk_bundle):
    b = small_disk_bundle
    with pytest.raises(ValueError):
        exterior_kappa_check(b.mu, b.basis, [], 1, 1.0)
    with pytest.raises(ValueError):
        exterior_kappa_check(b.mu, b.basis, [2.0], 1, 1.0, N=b.N + 5)


def test_exterior_kappa_needs_charged_points():
    # the r^{K/q} limit relies on mu giving mass to each z_j; with an atom
    # at 2 the disk ratio locks to 1, without it the limit drops to 1/|z0|
    poly = make_polynomial([0.0, 1.0])
    part = MeasurePart(lemniscate=LemniscateSpec(poly, 1.0), kind="area")
    cfg = QuadratureConfig(target_degree=80)
    charged = assemble_measure([part], [(2.0, 0.05)], cfg)
    basis, _ = orthogonalize(charged, 30)
    rep = exterior_kappa_check(charged, basis, [2.0], 1, 1.0, N=30)
    assert abs(float(np.real(rep.extrapolated)) - 1.0) < 1e-10

    plain = assemble_measure([part], (), cfg)
    basis_p, _ = orthogonalize(plain, 30)
    rep_p = exterior_kappa_check(plain, basis_p, [2.0], 1, 1.0, N=30)
    assert abs(float(np.real(rep_p.extrapolated)) - 0.5) < 0.02


def test_islands_reference_values_and_product():
    v1 = islands_reference(3, 0.7, 2.0, 1)
    v2 = islands_reference(3, 0.7, 2.0, 2)
    assert abs(v1 - 0.5114046) < 1e-6
    assert abs(v2 - 0.5462270) < 1e-6
    for q, r, z in [(2, 0.5, 2.0), (3, 0.7, 2.0 + 1.0j), (4, 0.9, -2.5)]:
        prod = np.prod([islands_reference(q, r, z, s) for s in range(q)])
        assert abs(prod - 1.0 / (z**q - 1)) < 1e-12
    with pytest.raises(ValueError):
        islands_reference(3, 1.2, 2.0, 0)
    with pytest.raises(ValueError):
        islands_reference(3, 0.7, 1.0, 0)
    with pytest.raises(ValueError):
        islands_reference(3, 0.7, 2.0, 3)
