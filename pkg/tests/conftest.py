"""Shared fixtures: the five reference measures, orthogonalized once."""

from types import SimpleNamespace

import pytest

from lemshift import (
    LemniscateSpec,
    MeasurePart,
    QuadratureConfig,
    assemble_measure,
    make_polynomial,
    orthogonalize,
)

ACCEPTANCE_LINES = []


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for line in ACCEPTANCE_LINES:
            terminalreporter.write_line(line)


@pytest.fixture(scope="session")
def acceptance_log():
    return ACCEPTANCE_LINES


def _bundle(coeffs, level, kind, cfg, atoms=(), N=120):
    poly = make_polynomial(coeffs)
    part = MeasurePart(lemniscate=LemniscateSpec(poly, level), kind=kind)
    mu = assemble_measure([part], atoms, cfg)
    basis, section = orthogonalize(mu, N)
    return SimpleNamespace(
        poly=poly, level=level, mu=mu, basis=basis, section=section, N=N
    )


@pytest.fixture(scope="session")
def disk_bundle():
    cfg = QuadratureConfig(target_degree=246, radial_breaks=(0.5,))
    return _bundle([0.0, 1.0], 1.0, "area", cfg, N=120)


@pytest.fixture(scope="session")
def two_ovals_bundle():
    cfg = QuadratureConfig(cell_depth=10, refinement_tol=0.5)
    return _bundle([-1.0, 0.0, 1.0], 0.5, "area", cfg, N=120)


@pytest.fixture(scope="session")
def islands_bundle():
    cfg = QuadratureConfig(cell_depth=11, refinement_tol=0.5)
    return _bundle([-1.0, 0.0, 0.0, 1.0], 0.7, "area", cfg, N=150)


@pytest.fixture(scope="session")
def boundary_atoms_bundle():
    cfg = QuadratureConfig(boundary_nodes=2048)
    atoms = ((0.9 + 0.0j, 0.05), (-1.1 + 0.0j, 0.03))
    return _bundle([-1.0, 0.0, 1.0], 0.5, "boundary", cfg, atoms=atoms, N=100)


@pytest.fixture(scope="session")
def exterior_atoms_bundle():
    cfg = QuadratureConfig(boundary_nodes=2048)
    atoms = ((1.6 + 0.0j, 0.04), (0.2j, 0.02))
    return _bundle([-1.0, 0.0, 1.0], 0.5, "boundary", cfg, atoms=atoms, N=100)


@pytest.fixture(scope="session")
def all_bundles(
    disk_bundle,
    two_ovals_bundle,
    islands_bundle,
    boundary_atoms_bundle,
    exterior_atoms_bundle,
):
    return {
        "disk": disk_bundle,
        "two_ovals": two_ovals_bundle,
        "islands_q3": islands_bundle,
        "boundary_atoms": boundary_atoms_bundle,
        "exterior_atoms": exterior_atoms_bundle,
    }


@pytest.fixture(scope="session")
def small_disk_bundle():
    cfg = QuadratureConfig(target_degree=80)
    return _bundle([0.0, 1.0], 1.0, "area", cfg, N=30)
