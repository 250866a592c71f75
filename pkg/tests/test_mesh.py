import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

import helmbem.mesh as meshmod
from helmbem.bench import gen_box
from helmbem.mesh import (Element, Mesh, MeshError, Node, build_mesh, element_diameter_stats,
                          point_set_diameter, signed_volume, validate)


def _tetra():
    nodes = [Node(10, (0, 0, 0)), Node(20, (1, 0, 0)), Node(30, (0, 1, 0)), Node(40, (0, 0, 1))]
    elems = [Element(1, (10, 30, 20)), Element(2, (10, 20, 40)), Element(3, (20, 30, 40)),
             Element(4, (30, 10, 40))]
    return build_mesh(nodes, elems)


def test_build_mesh_with_gapped_ids():
    m = _tetra()
    assert m.n_elements == 4 and len(m.points) == 4
    assert np.allclose(m.areas[0], 0.5)
    assert np.allclose(m.normals[0], [0, 0, -1])
    assert np.allclose(m.midpoints[0], [1 / 3, 1 / 3, 0])


def test_closed_tetra_validates_clean():
    rep = validate(_tetra())
    assert rep.closed and not rep.duplicate_elements and not rep.orientation_warnings
    assert rep.warnings == []
    assert signed_volume(_tetra()) == pytest.approx(1 / 6)


def test_unknown_node_and_duplicate_ids_rejected():
    nodes = [Node(1, (0, 0, 0)), Node(2, (1, 0, 0)), Node(3, (0, 1, 0))]
    with pytest.raises(MeshError):
        build_mesh(nodes, [Element(1, (1, 2, 9))])
    with pytest.raises(MeshError):
        build_mesh(nodes + [Node(1, (5, 5, 5))], [Element(1, (1, 2, 3))])
    with pytest.raises(MeshError):
        build_mesh(nodes, [Element(1, (1, 2, 3)), Element(1, (1, 3, 2))])


def test_degenerate_and_warped_elements_rejected():
    nodes = [Node(1, (0, 0, 0)), Node(2, (1, 0, 0)), Node(3, (2, 0, 0)), Node(4, (0, 1, 0.2))]
    with pytest.raises(MeshError, match="degenerate"):
        build_mesh(nodes, [Element(1, (1, 2, 3))])
    quad = [Node(1, (0, 0, 0)), Node(2, (1, 0, 0)), Node(3, (1, 1, 0.1)), Node(4, (0, 1, 0))]
    with pytest.raises(MeshError, match="non-planar"):
        build_mesh(quad, [Element(1, (1, 2, 3, 4))])


def test_open_duplicate_and_flipped_reported(box_small):
    m = box_small
    open_m = m.subset(np.arange(1, m.n_elements))
    assert not validate(open_m).closed
    dup = Mesh(m.node_ids, m.points, np.arange(m.n_elements + 1), np.vstack([m.conn, m.conn[:1]]))
    assert validate(dup).duplicate_elements == [0]
    conn = m.conn.copy()
    conn[0] = conn[0, ::-1]
    flipped = Mesh(m.node_ids, m.points, m.element_ids, conn)
    rep = validate(flipped)
    assert rep.orientation_warnings and any("orientation" in w for w in rep.warnings)


def test_inward_normals_warn(box_small):
    m = box_small
    inv = Mesh(m.node_ids, m.points, m.element_ids, m.conn[:, ::-1])
    assert any("inward" in w for w in validate(inv).warnings)


def test_wavelength_rule(box_small):
    rep = validate(box_small, 340.0, 2000.0)
    assert rep.avg_edge == pytest.approx(0.2)
    assert rep.f_max_6 == pytest.approx(340 / 1.2)
    assert rep.f_max_8 == pytest.approx(340 / 1.6)
    assert any("six-elements" in w for w in rep.warnings)
    assert not any("six-elements" in w for w in validate(box_small, 340.0, 100.0).warnings)


def test_validate_does_not_modify(box_small):
    before = box_small.points.copy()
    validate(box_small)
    assert np.array_equal(before, box_small.points)
    with pytest.raises(ValueError):
        box_small.points[0, 0] = 1.0


def test_evaluation_elements_excluded_from_boundary():
    m = _tetra()
    kinds = np.array([0, 0, 0, 2])
    m2 = Mesh(m.node_ids, m.points, m.element_ids, m.conn, kinds)
    assert m2.boundary().n_elements == 3
    assert list(m2.evaluation_index) == [3]


@settings(max_examples=30, deadline=None)
@given(n=st.integers(2, 300), seed=st.integers(0, 10_000))
def test_diameter_matches_brute_force(n, seed):
    p = np.random.default_rng(seed).normal(size=(n, 3))
    brute = np.sqrt(((p[:, None] - p[None]) ** 2).sum(-1).max())
    assert point_set_diameter(p) == pytest.approx(brute, rel=1e-14)


def test_diameter_direction_search_is_tight(monkeypatch, rng):
    p = rng.normal(size=(3000, 3))
    p /= np.linalg.norm(p, axis=1)[:, None]
    exact = point_set_diameter(p)
    monkeypatch.setattr(meshmod, "EXACT_DIAMETER_POINTS", 100)
    approx = point_set_diameter(p)
    assert exact * (1 - 5e-4) <= approx <= exact


def test_element_stats_box():
    mn, avg, mx, d = element_diameter_stats(gen_box((2.0, 1.0, 1.0), (2, 1, 1)))
    assert mn == mx == avg == pytest.approx(1.0)
    assert d == pytest.approx(np.sqrt(6.0))
