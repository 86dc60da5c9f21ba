import numpy as np
import pytest

from lemshift import (
    block_toeplitz_diagnostic,
    char_poly_check,
    make_polynomial,
    operator_measure_identity,
    orthogonalize,
    poly_of_section,
    right_limit,
    shift_residual,
    shift_residual_profile,
    trace_window,
)


def test_disk_residual_closed_form(small_disk_bundle):
    b = small_disk_bundle
    profile = shift_residual_profile(b.section, b.poly, 1.0, b.basis, b.mu)
    n = np.array([p.n for p in profile])
    expect = 1.0 - np.sqrt(n / (n + 1))
    got = np.array([p.matrix_norm for p in profile])
    assert np.abs(got - expect).max() < 1e-12


def test_residual_identity_routes_independent(two_ovals_bundle):
    b = two_ovals_bundle
    res = shift_residual(b.section, b.poly, b.level, 7, b.basis, b.mu)
    assert abs(res.matrix_sq - res.measure_sq) < 1e-12
    assert abs(res.matrix_norm**2 - res.matrix_sq) < 1e-12


def test_residual_rejects_out_of_window(small_disk_bundle):
    b = small_disk_bundle
    with pytest.raises(ValueError):
        shift_residual(b.section, b.poly, 1.0, b.N, b.basis, b.mu)


def test_poly_of_section_window_exactness(two_ovals_bundle):
    mu = two_ovals_bundle.mu
    poly = two_ovals_bundle.poly
    _, s1 = orthogonalize(mu, 40)
    _, s2 = orthogonalize(mu, 45)
    a = poly_of_section(s1, poly)
    b = poly_of_section(s2, poly)
    assert a.exact_cols == 40 - 2
    assert np.abs(a.entries[:, : a.exact_cols] - b.entries[:40, : a.exact_cols]).max() < 1e-12
    tail = np.abs(a.entries[:, a.exact_cols :] - b.entries[:40, a.exact_cols : 40]).max()
    assert tail > 1e-6


def test_poly_of_section_rejects_large_degree(small_disk_bundle):
    big = make_polynomial([0.0] * 31 + [1.0])
    with pytest.raises(ValueError):
        poly_of_section(small_disk_bundle.section, big)


def test_trace_window_literal_sum(two_ovals_bundle):
    H = two_ovals_bundle.section.entries
    got = trace_window(two_ovals_bundle.section, 2, 5)
    assert np.isclose(got, H[5, 5] + H[6, 6])
    with pytest.raises(ValueError):
        trace_window(two_ovals_bundle.section, 2, two_ovals_bundle.N - 1)


def test_right_limit_window_structure(two_ovals_bundle):
    b = two_ovals_bundle
    rl = right_limit(b.section, 2, 1, 3, 0.05, poly=b.poly, level=b.level)
    assert rl.window.shape == (7, 7)
    assert rl.center_residue == 1
    assert (rl.subsequence % 2 == 1).all()
    assert rl.converged
    assert rl.diffs.size == rl.subsequence.size - 1


def test_right_limit_needs_enough_windows(small_disk_bundle):
    with pytest.raises(ValueError):
        right_limit(small_disk_bundle.section, 1, 0, 14, 0.05)


def test_block_toeplitz_on_disk(small_disk_bundle):
    rep = block_toeplitz_diagnostic(small_disk_bundle.section, 1, 3, 0.05)
    assert rep.verdict
    assert rep.class_last_diffs.shape == (1,)


def test_operator_measure_identity_guard(small_disk_bundle):
    b = small_disk_bundle
    matrix_sq, measure_sq = operator_measure_identity(
        b.section, b.basis, b.mu, b.poly, 3, 2
    )
    assert abs(matrix_sq - measure_sq) < 1e-12
    with pytest.raises(ValueError):
        operator_measure_identity(b.section, b.basis, b.mu, b.poly, 3, b.N - 1)


def test_char_poly_check_validates_inputs(small_disk_bundle):
    b = small_disk_bundle
    assert char_poly_check(b.section, b.basis, 10, [2.0 + 1.0j]) < 1e-10
    with pytest.raises(ValueError):
        char_poly_check(b.section, b.basis, 0, [2.0])
    with pytest.raises(ValueError):
        char_poly_check(b.section, b.basis, 5, [])
