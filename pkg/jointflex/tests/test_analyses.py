import math

import numpy as np
import pytest
from pydantic import ValidationError

from jointflex import structures
from jointflex.analyses import (
    Camera,
    FlockSpec,
    ToleranceQuery,
    check_flock_spec,
    cone_violation,
    flock_constraints,
    run_flock,
    suggest_cross_beam,
    tolerance_search,
    x_spread,
)
from jointflex.analyses.flock import (
    cone_distances,
    leader_sides,
    nearest_neighbors,
    side_rows,
    side_violation,
)
from jointflex.analyses.objectives import (
    direction_objective,
    leader_x_objective,
    make_objective,
    radial_objective,
)
from jointflex.analyses.tolerance import resolve_track_body
from jointflex.constraints.system import assemble
from jointflex.errors import EmptyVisibilityError, InfeasibleFlockSpecError, InvalidObjectiveError
from jointflex.geometry.overlap import overlap_depth
from jointflex.geometry.scene import Body, BoxLimits, Pose, Scene
from jointflex.geometry.visibility import mutually_visible_pairs
from jointflex.lp.flex import Displacement, DisplacementBounds, Objective, solve_flex
from jointflex.stepper import StepParams, TerminalReason, apply_displacement


# Objectives


def test_radial_objective_on_symmetric_ring_cancels():
    scene = structures.square_ring()
    objective = radial_objective(scene)
    per_body = objective.weights.reshape(-1, 3)
    assert per_body[:, :2].sum(axis=0) == pytest.approx([0.0, 0.0], abs=1e-12)
    assert np.hypot(per_body[:, 0], per_body[:, 1]) == pytest.approx(np.ones(len(per_body)))
    assert not per_body[:, 2].any()
    assert objective.provenance == "radial"


def test_direction_objective_rejects_fixed_body(two_squares):
    with pytest.raises(InvalidObjectiveError):
        direction_objective(two_squares, (1.0, 0.0), [1])


def test_make_objective_dispatch(two_squares):
    objective = make_objective(two_squares, "direction", direction=(0.0, 2.0), bodies=[0])
    assert list(objective.weights) == [0.0, 2.0, 0.0]
    with pytest.raises(InvalidObjectiveError, match="Unknown objective kind"):
        make_objective(two_squares, "spiral")
    with pytest.raises(InvalidObjectiveError, match="needs option"):
        make_objective(two_squares, "direction", direction=(1.0, 0.0))


def test_leader_x_objective_points_at_leader():
    scene, spec = structures.flock_formation(rows=2)
    weights = leader_x_objective(scene, spec.leader).weights.reshape(-1, 3)
    # row 1 sits at x = -2, 0, 2
    assert weights[1:, 0].tolist() == [1.0, 0.0, -1.0]
    assert weights[0, 0] == 0.0


# Tolerance search


def _cavity_query(threshold: float, t_max: float) -> tuple[Scene, ToleranceQuery]:
    scene = structures.block_in_cavity(0.05, bounds=BoxLimits(1.0, 0.0))
    query = ToleranceQuery(
        t_max=t_max,
        threshold=threshold,
        track_body=0,
        objective=direction_objective(scene, (1.0, 0.0), [0]),
        step_params=StepParams(max_iters=10),
    )
    return scene, query


def test_tolerance_search_finds_threshold_crossing():
    scene, query = _cavity_query(threshold=0.15, t_max=0.18)
    result = tolerance_search(scene, query)
    # travel is gap + inset, so the crossing is at 0.15 - 0.05
    assert result.t_star == pytest.approx(0.1, abs=2e-4)
    assert result.t_star <= 0.1 + 1e-9
    assert result.monotone
    samples = dict(result.samples)
    assert samples[0.0] == pytest.approx(0.05, abs=1e-6)
    assert samples[0.18] == pytest.approx(0.23, abs=1e-6)


def test_tolerance_search_endpoints():
    scene, query = _cavity_query(threshold=0.01, t_max=0.1)
    assert tolerance_search(scene, query).t_star == 0.0
    scene, query = _cavity_query(threshold=0.5, t_max=0.1)
    result = tolerance_search(scene, query)
    assert result.t_star == 0.1
    assert len(result.samples) == 2


def test_tolerance_query_validation(two_squares):
    with pytest.raises(ValidationError):
        ToleranceQuery(t_max=0.1, threshold=0.1, track_body=0, objective=[1.0, 0.0, 0.0])
    with pytest.raises(ValidationError):
        ToleranceQuery(
            t_max=-1.0, threshold=0.1, track_body=0, objective=Objective(np.ones(3))
        )


def test_resolve_track_body(two_squares):
    assert resolve_track_body(two_squares, None) == 0
    assert resolve_track_body(two_squares, "B") == 1
    with pytest.raises(KeyError):
        resolve_track_body(two_squares, "C")


# Cross beam


def test_cross_beam_of_rigid_motion_is_zero(two_squares):
    suggestion = suggest_cross_beam(two_squares, two_squares)
    assert suggestion.change == 0.0


def test_cross_beam_picks_largest_change(two_squares):
    flexed = apply_displacement(two_squares, Displacement([0.05, 0.0, 0.0]), 1.0)
    suggestion = suggest_cross_beam(two_squares, flexed)
    assert suggestion.change == pytest.approx(0.05)
    assert suggestion.flexed_length == pytest.approx(suggestion.initial_length - 0.05)
    assert {suggestion.pair.body_a, suggestion.pair.body_b} == {0, 1}


def test_cross_beam_errors(two_squares):
    single = Scene((Body(structures.square()),))
    with pytest.raises(EmptyVisibilityError):
        suggest_cross_beam(single, single)
    with pytest.raises(ValueError):
        suggest_cross_beam(two_squares, single)


# Flock


def _leader_follower(follower_x: float = 0.0) -> tuple[Scene, FlockSpec]:
    bodies = (
        Body(structures.square(centered=True), Pose(0.0, 0.0, 0.0), fixed=True, name="leader"),
        Body(structures.square(centered=True), Pose(follower_x, -3.0, 0.0), name="follower"),
    )
    scene = Scene(bodies, epsilon=0.25, bounds=BoxLimits(5.0, 0.5))
    spec = FlockSpec(
        leader=0,
        predecessors={1: 0},
        cameras={1: Camera(half_angle=math.pi / 4)},
        markers={0: (0.0, -0.5)},
        neighbors=1,
        theta_cap=1e-6,
    )
    return scene, spec


def test_cone_rows_limit_sideways_travel():
    scene, spec = _leader_follower()
    check_flock_spec(spec, scene)
    system = assemble(scene).with_rows(flock_constraints(spec, scene))
    bounds = DisplacementBounds(np.array([-5.0, 0.0, -1e-6]), np.array([5.0, 0.0, 1e-6]))
    result = solve_flex(system, Objective(np.array([1.0, 0.0, 0.0])), bounds)
    assert result.optimal
    # marker 2 above the apex, half-angle 45 degrees
    assert result.displacement.values[0] == pytest.approx(2.0, abs=1e-4)


def test_cone_distances_at_the_edge():
    scene, spec = _leader_follower(2.0)
    distances = cone_distances(spec, scene)
    assert distances[0] == pytest.approx(0.0, abs=1e-12)
    assert distances[1] == pytest.approx(2.0 * math.sqrt(2.0))
    assert cone_violation(spec, scene) <= 1e-12


def test_flock_constraint_labels():
    scene, spec = _leader_follower()
    rows = flock_constraints(spec, scene)
    assert sum(label.startswith("cone:") for label in rows.labels) == 2
    assert sum(label.startswith("cap:") for label in rows.labels) == 2
    assert not any(label.startswith("box:") for label in rows.labels)
    assert nearest_neighbors(spec, scene) == [(0, 1)]


@pytest.mark.parametrize(
    "change",
    [
        {"cameras": {1: Camera(half_angle=2.0)}},
        {"predecessors": {1: 1}},
        {"predecessors": {0: 1, 1: 0}},
        {"neighbors": 0},
        {"markers": {}},
    ],
)
def test_check_flock_spec_rejects(change):
    scene, spec = _leader_follower()
    fields = dict(
        leader=spec.leader,
        predecessors=spec.predecessors,
        cameras=spec.cameras,
        markers=spec.markers,
        neighbors=spec.neighbors,
        theta_cap=spec.theta_cap,
    )
    fields.update(change)
    with pytest.raises(InfeasibleFlockSpecError):
        check_flock_spec(FlockSpec(**fields), scene)


def test_check_flock_spec_rejects_marker_out_of_view():
    scene, spec = _leader_follower(5.0)
    with pytest.raises(InfeasibleFlockSpecError, match="outside the view cone"):
        check_flock_spec(spec, scene)


def test_flock_formation_shape():
    scene, spec = structures.flock_formation()
    assert len(scene.bodies) == 64
    assert len(spec.followers) == 63
    check_flock_spec(spec, scene)


@pytest.mark.slow
def test_flock_compresses_toward_leader():
    scene, spec = structures.flock_formation()
    params = StepParams(max_iters=30)
    trace = run_flock(scene, spec, params)

    assert x_spread(spec, trace.final) <= 0.8 * x_spread(spec, scene)
    assert all(rec.violation <= params.eta for rec in trace.iterations)
    assert overlap_depth(trace.final) <= params.eta
    assert cone_violation(spec, trace.final) <= params.eta


@pytest.mark.parametrize("follower_x", [0.0, 1.0])
def test_standing_still_satisfies_flock_rows(follower_x):
    scene, spec = _leader_follower(follower_x)
    assert flock_constraints(spec, scene).d0.min() >= 0.0


def test_standing_still_satisfies_formation_rows():
    scene, spec = structures.flock_formation()
    rows = flock_constraints(spec, scene)
    assert rows.n_rows > 0
    assert rows.d0.min() >= 0.0
    assert np.all(rows.jacobian @ np.zeros(scene.n_dof) + rows.d0 >= 0.0)


def test_cross_beam_matches_exhaustive_search():
    scene = structures.square_ring(n_side=3)
    rng = np.random.default_rng(11)
    values = rng.uniform(-0.05, 0.05, scene.n_dof)
    flexed = apply_displacement(scene, Displacement(values), 1.0)

    def length(s, body, vertex, other, other_vertex):
        gap = s.bodies[body].world_vertices[vertex] - s.bodies[other].world_vertices[other_vertex]
        return float(np.hypot(*gap))

    changes = [
        abs(
            length(flexed, p.body_a, p.vertex_a, p.body_b, p.vertex_b)
            - length(scene, p.body_a, p.vertex_a, p.body_b, p.vertex_b)
        )
        for p in mutually_visible_pairs(scene)
    ]
    suggestion = suggest_cross_beam(scene, flexed)
    assert suggestion.change == pytest.approx(max(changes), abs=1e-12)
    assert all(change <= suggestion.change + 1e-12 for change in changes)


def test_track_body_needs_a_free_body():
    fixed = Scene((Body(structures.square(), Pose(), fixed=True),))
    with pytest.raises(InvalidObjectiveError):
        resolve_track_body(fixed, None)


def test_flock_follower_stops_at_leader_x():
    scene, spec = _leader_follower(1.0)
    trace = run_flock(scene, spec, StepParams(max_iters=5))

    assert trace.terminal is TerminalReason.CONVERGED
    assert trace.final.bodies[1].pose.x == pytest.approx(0.0, abs=1e-6)
    assert side_violation(spec, trace.final, leader_sides(spec, scene)) <= 1e-9
    assert cone_violation(spec, trace.final) <= 1e-3


def test_side_rows_track_the_starting_side():
    scene, spec = structures.flock_formation(rows=3)
    sides = leader_sides(spec, scene)
    middle = [r for r in spec.followers if scene.bodies[r].pose.x == 0.0]
    assert middle and not set(middle) & set(sides)
    rows = side_rows(spec, scene, sides)
    assert rows.n_rows == len(sides)
    assert rows.d0.min() > 0.0
    assert all(label.startswith("side:") for label in rows.labels)
