import numpy as np
import pytest

from lemshift import (
    LemniscateSpec,
    SingularLevelError,
    make_polynomial,
    trace_boundary,
)


def test_level_must_be_positive():
    p = make_polynomial([0.0, 1.0])
    with pytest.raises(ValueError):
        LemniscateSpec(p, 0.0)
    with pytest.raises(ValueError):
        LemniscateSpec(p, -1.0)


def test_unit_circle_geometry():
    lem = LemniscateSpec(make_polynomial([0.0, 1.0]), 1.0)
    bd = trace_boundary(lem, nodes_per_turn=512)
    assert len(bd.components) == 1
    comp = bd.components[0]
    assert comp.turns == 1
    assert abs(comp.length - 2 * np.pi) < 1e-9
    assert abs(comp.arc_weights.sum() - 2 * np.pi) < 1e-9
    assert np.abs(np.abs(comp.nodes) - 1.0).max() < 1e-10
    assert comp.closure_error < 1e-9


def test_two_ovals_split_components():
    lem = LemniscateSpec(make_polynomial([-1.0, 0.0, 1.0]), 0.5)
    bd = trace_boundary(lem, nodes_per_turn=256)
    assert len(bd.components) == 2
    assert all(c.turns == 1 for c in bd.components)
    assert bd.total_turns == 2
    for c in bd.components:
        assert np.abs(np.abs(c.nodes**2 - 1) - 0.5).max() < 1e-10
    centers = sorted(np.mean(c.nodes).real for c in bd.components)
    assert centers[0] < -0.9 and centers[1] > 0.9


def test_connected_level_is_one_two_turn_component():
    lem = LemniscateSpec(make_polynomial([-1.0, 0.0, 1.0]), 1.5)
    bd = trace_boundary(lem, nodes_per_turn=256)
    assert len(bd.components) == 1
    assert bd.components[0].turns == 2
    assert np.abs(np.abs(bd.components[0].nodes ** 2 - 1) - 1.5).max() < 1e-9


def test_singular_level_rejected():
    lem = LemniscateSpec(make_polynomial([-1.0, 0.0, 1.0]), 1.0)
    with pytest.raises(SingularLevelError):
        trace_boundary(lem)


def test_node_count_scales_with_turns():
    lem = LemniscateSpec(make_polynomial([-1.0, 0.0, 1.0]), 1.5)
    bd = trace_boundary(lem, nodes_per_turn=128)
    assert bd.components[0].nodes.size == 2 * 128
