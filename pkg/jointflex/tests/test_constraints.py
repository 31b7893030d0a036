import math

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from jointflex import structures
from jointflex.constraints.pairs import ConstraintPair, PairKind, orient_pair
from jointflex.constraints.rows import (
    averaged_normal_row,
    edge_vertex_rows,
    gradient_row,
    pair_terms,
)
from jointflex.constraints.selection import select_pairs
from jointflex.constraints.system import AuxiliaryRows, assemble
from jointflex.geometry.polygon import Polygon
from jointflex.geometry.proximity import ProximityCandidate
from jointflex.geometry.scene import Body, Pose, Scene
from jointflex.lp.flex import Displacement, DisplacementBounds, Objective, solve_flex
from jointflex.stepper import apply_displacement

TRIANGLE = Polygon.from_vertices([(-0.4, -0.3), (0.6, -0.2), (0.1, 0.7)])
SQUARE = structures.square(centered=True)


def _all_pair_terms(a: Body, b: Body):
    """Distances and analytic gradients of every edge of ``a`` against every vertex of ``b``."""
    ne, nv = a.polygon.n_vertices, b.polygon.n_vertices
    e = np.repeat(np.arange(ne), nv)
    v = np.tile(np.arange(nv), ne)
    m = len(e)
    return edge_vertex_rows(
        a.world_normals[e],
        a.world_vertices[e],
        np.repeat([[a.pose.x, a.pose.y]], m, axis=0),
        b.world_vertices[v],
        np.repeat([[b.pose.x, b.pose.y]], m, axis=0),
    ), e, v


def _distances(a: Body, b: Body, e, v) -> np.ndarray:
    rel = b.world_vertices[v] - a.world_vertices[e]
    return np.einsum("ij,ij->i", a.world_normals[e], rel)


def _finite_difference(a: Body, b: Body, e, v, h=1e-6):
    grads = []
    for which in (0, 1):
        for k in range(3):
            step = np.zeros(3)
            step[k] = h
            bodies = [a, b]
            plus, minus = list(bodies), list(bodies)
            pose = bodies[which].pose
            plus[which] = bodies[which].with_pose(Pose(*(np.add(pose.as_tuple(), step))))
            minus[which] = bodies[which].with_pose(Pose(*(np.subtract(pose.as_tuple(), step))))
            grads.append((_distances(*plus, e, v) - _distances(*minus, e, v)) / (2 * h))
    fd = np.column_stack(grads)
    return fd[:, :3], fd[:, 3:]


def test_gradients_match_central_differences_on_random_configurations():
    rng = np.random.default_rng(7)
    for _ in range(1000):
        pa = rng.uniform([-2, -2, -math.pi], [2, 2, math.pi])
        pb = rng.uniform([-2, -2, -math.pi], [2, 2, math.pi])
        a = Body(TRIANGLE, Pose(*pa))
        b = Body(SQUARE, Pose(*pb))
        terms, e, v = _all_pair_terms(a, b)
        fd_edge, fd_vertex = _finite_difference(a, b, e, v)
        np.testing.assert_allclose(terms.edge_gradient, fd_edge, rtol=1e-6, atol=1e-6)
        np.testing.assert_allclose(terms.vertex_gradient, fd_vertex, rtol=1e-6, atol=1e-6)


poses = st.tuples(
    st.floats(-3, 3), st.floats(-3, 3), st.floats(-math.pi, math.pi)
)


@given(poses, poses)
def test_gradient_property(pa, pb):
    a = Body(SQUARE, Pose(*pa))
    b = Body(TRIANGLE, Pose(*pb))
    terms, e, v = _all_pair_terms(a, b)
    fd_edge, fd_vertex = _finite_difference(a, b, e, v)
    np.testing.assert_allclose(terms.edge_gradient, fd_edge, rtol=1e-6, atol=1e-6)
    np.testing.assert_allclose(terms.vertex_gradient, fd_vertex, rtol=1e-6, atol=1e-6)


def test_one_r_arm_boundary_values():
    system = structures.one_r_arm_system(math.pi / 4)
    assert system.labels == ("bottom", "right", "top", "left")
    np.testing.assert_allclose(
        system.boundary_values(), [-0.2929, -0.4142, 0.4142, 0.2929], atol=1e-3
    )
    np.testing.assert_allclose(
        system.jacobian.toarray()[:, 0], [math.sqrt(2), math.sqrt(2), -math.sqrt(2), -math.sqrt(2)]
    )


@pytest.mark.parametrize("sign, expected", [(1.0, 0.2929), (-1.0, -0.2929)])
def test_one_r_arm_lp_reaches_nearest_wall(sign, expected):
    system = structures.one_r_arm_system(math.pi / 4)
    bounds = DisplacementBounds(np.array([-1.0]), np.array([1.0]))
    result = solve_flex(system, Objective(np.array([sign])), bounds)
    assert result.optimal
    assert result.displacement.values[0] == pytest.approx(expected, abs=1e-3)


def test_selection_is_deterministic_and_sorted(two_squares):
    first = select_pairs(two_squares)
    second = select_pairs(two_squares)
    assert [p.key for p in first] == [p.key for p in second]
    assert [p.sort_key for p in first] == sorted(p.sort_key for p in first)
    assert len({p.key for p in first}) == len(first)


def test_plain_pairs_between_facing_edges(two_squares):
    pairs = select_pairs(two_squares)
    plain = {(p.edge_body, p.edge_index, p.vertex_body, p.vertex_index) for p in pairs if p.kind is PairKind.PLAIN}
    # A's right edge against B's left vertices and B's left edge against A's right vertices.
    assert {(0, 1, 1, 0), (0, 1, 1, 3), (1, 3, 0, 1), (1, 3, 0, 2)} <= plain


def test_convex_corners_get_one_averaged_pair(corner_scene):
    pairs = select_pairs(corner_scene)
    assert len(pairs) == 1
    pair = pairs[0]
    assert pair.kind is PairKind.AVERAGED_NORMAL
    assert (pair.edge_body, pair.corner_index, pair.vertex_body, pair.vertex_index) == (0, 2, 1, 0)
    row = averaged_normal_row(corner_scene, pair)
    assert row.distance == pytest.approx(math.sqrt(2) * 0.01)
    assert row.values[:2] == pytest.approx((1 / math.sqrt(2), 1 / math.sqrt(2)))


def test_averaged_row_rejects_plain_pair(two_squares):
    pair = select_pairs(two_squares, corner_mode="plain")[0]
    with pytest.raises(ValueError):
        averaged_normal_row(two_squares, pair)


def test_averaged_normal_relaxes_extended_edge_rows(corner_scene):
    # Slide B up and left past A's right edge line while staying clear of A.
    dq = np.array([-0.02, 0.5, 0.0])
    averaged = assemble(corner_scene, corner_mode="averaged")
    plain = assemble(corner_scene, corner_mode="plain")
    assert averaged.residuals(dq).min() >= 0.0
    assert plain.residuals(dq).min() < 0.0


def test_concave_vertex_swaps_roles():
    notch = Body(structures.l_shape(), Pose(0, 0, 0), fixed=True, name="L")
    # Convex corner of the block sits just past the end of A's notch edge.
    block = Body(structures.square(0.5), Pose(1.05, 1.1, 0), name="blk")
    scene = Scene((notch, block), epsilon=0.2)
    candidate = ProximityCandidate(
        edge_body=1, edge_index=3, vertex_body=0, vertex_index=3,
        distance=0.05, projection=0.6, edge_length=0.5,
    )
    pair = orient_pair(scene, candidate)
    assert pair.edge_body == 0 and pair.vertex_body == 1
    assert pair.edge_index in (2, 3)
    assert pair.vertex_index == 0


def test_plain_corner_mode_never_averages(corner_scene):
    assert all(p.kind is PairKind.PLAIN for p in select_pairs(corner_scene, corner_mode="plain"))


def test_pair_validation():
    with pytest.raises(ValueError):
        ConstraintPair(0, 0, 0, 1)
    with pytest.raises(ValueError):
        ConstraintPair(0, 0, 1, 1, kind=PairKind.AVERAGED_NORMAL)


def test_gradient_row_drops_fixed_columns(two_squares):
    pair = select_pairs(two_squares)[0]
    row = gradient_row(two_squares, pair)
    assert row.columns == (0, 1, 2)


def test_puzzle_grid_sparsity():
    scene = structures.puzzle_grid(36)
    system = assemble(scene)
    assert system.n_dof == 105
    per_row = np.diff(system.jacobian.indptr)
    fixed_rows = np.array([scene.bodies[p.edge_body].fixed or scene.bodies[p.vertex_body].fixed for p in system.pairs])
    assert system.n_rows > 0
    assert np.all(per_row[fixed_rows] == 3)
    assert np.all(per_row[~fixed_rows] == 6)
    assert system.stats()["max_row_nnz"] == 6
    assert np.all(system.d0 >= 0.0)


def test_with_rows_appends_labels(two_squares):
    system = assemble(two_squares)
    extra = AuxiliaryRows(
        np.array([1.0]),
        system.jacobian[:1].copy(),
        ("extra",),
    )
    grown = system.with_rows(extra)
    assert grown.n_rows == system.n_rows + 1
    assert grown.labels[-1] == "extra"
    with pytest.raises(ValueError):
        structures.one_r_arm_system().with_rows(extra)


def test_clamp_band_snaps_tiny_negative_distances():
    gap = -5e-10
    scene = Scene(
        (
            Body(structures.square(), Pose(0, 0, 0), fixed=True),
            Body(structures.square(), Pose(1 + gap, 0, 0)),
        )
    )
    system = assemble(scene)
    assert system.d0.min() == 0.0


def _named(scene, pairs):
    return {
        (scene.names[p.edge_body], p.edge_index, scene.names[p.vertex_body], p.vertex_index, p.kind)
        for p in pairs
    }


def test_selection_survives_body_reordering():
    scene = structures.block_in_cavity(0.05)
    reordered = Scene(tuple(reversed(scene.bodies)), epsilon=scene.epsilon)
    first = select_pairs(scene, corner_mode="plain")
    second = select_pairs(reordered, corner_mode="plain")
    assert first
    assert _named(scene, first) == _named(reordered, second)


def test_translation_columns_are_exact():
    scene = structures.square_ring(n_side=3)
    system = assemble(scene)
    rng = np.random.default_rng(7)
    dq = np.zeros(scene.n_dof)
    dq[0::3] = rng.uniform(-0.3, 0.3, scene.n_free)
    dq[1::3] = rng.uniform(-0.3, 0.3, scene.n_free)

    moved = apply_displacement(scene, Displacement(dq), 1.0)
    pairs = list(system.pairs)
    change = pair_terms(moved, pairs).distance - pair_terms(scene, pairs).distance
    np.testing.assert_allclose(system.jacobian @ dq, change, atol=1e-12)


def test_assembly_is_bit_identical():
    first = assemble(structures.puzzle_grid(9))
    second = assemble(structures.puzzle_grid(9))
    assert np.array_equal(first.d0, second.d0)
    assert np.array_equal(first.jacobian.indptr, second.jacobian.indptr)
    assert np.array_equal(first.jacobian.indices, second.jacobian.indices)
    assert np.array_equal(first.jacobian.data, second.jacobian.data)
    assert first.labels == second.labels
