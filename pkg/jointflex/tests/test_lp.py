import numpy as np
import pytest

from jointflex import structures
from jointflex.adapters import HighsAdapter, LPStatus, SolverRegistry
from jointflex.analyses.objectives import direction_objective
from jointflex.constraints.system import assemble
from jointflex.errors import InvalidObjectiveError
from jointflex.geometry.overlap import min_clearance
from jointflex.geometry.scene import Body, BoxLimits, Scene
from jointflex.lp.flex import (
    Displacement,
    DisplacementBounds,
    Objective,
    classify_separability,
    default_bounds,
    separation_rows,
    solve_flex,
    solve_separation,
)
from jointflex.stepper import apply_displacement


@pytest.mark.parametrize("delta", [0.01, 0.05, 0.1])
def test_translation_is_affine_exact_in_cavity(delta):
    scene = structures.block_in_cavity(delta)
    system = assemble(scene)
    objective = direction_objective(scene, (1.0, 0.0), [0])
    result = solve_flex(system, objective, default_bounds(scene))
    assert result.optimal
    assert result.displacement.values[0] == pytest.approx(delta, abs=1e-9)
    assert np.all(system.residuals(result.displacement.values) >= -1e-9)


def test_default_bounds_follow_epsilon_and_scene_limits(two_squares):
    scene = Scene((Body(structures.square()),), epsilon=0.2)
    bounds = default_bounds(scene)
    np.testing.assert_allclose(bounds.upper, [2.0, 2.0, 0.5])
    np.testing.assert_allclose(bounds.lower, [-2.0, -2.0, -0.5])
    limited = default_bounds(two_squares)
    np.testing.assert_allclose(limited.upper, [1.0, 1.0, 0.0])


def test_bounds_scale_cap():
    bounds = DisplacementBounds(np.array([-1.0, -1.0]), np.array([1.0, 2.0]))
    assert bounds.max_scale(np.array([0.5, -0.25])) == pytest.approx(2.0)
    assert bounds.shrunk(0.5).upper == pytest.approx([0.5, 1.0])
    assert bounds.max_scale(np.zeros(2)) == np.inf


def test_objective_validation():
    with pytest.raises(InvalidObjectiveError):
        Objective(np.zeros(3))
    with pytest.raises(InvalidObjectiveError):
        Objective(np.array([1.0, np.nan]))
    with pytest.raises(InvalidObjectiveError):
        Objective(np.ones(2)).check_size(3)


def test_displacement_helpers():
    dq = Displacement(np.arange(6.0))
    assert dq.per_body().shape == (2, 3)
    assert dq.scaled(2.0).values[-1] == 10.0
    assert Displacement.zeros(3).norm() == 0.0


def test_isolated_body_without_bounds_is_unbounded():
    scene = Scene((Body(structures.square()),))
    system = assemble(scene)
    result = solve_flex(system, Objective(np.array([1.0, 0.0, 0.0])), DisplacementBounds.unbounded(3))
    assert result.status is LPStatus.UNBOUNDED
    assert result.displacement is None


def test_bounded_isolated_body_hits_box():
    scene = Scene((Body(structures.square()),), epsilon=0.1)
    result = solve_flex(assemble(scene), Objective(np.array([1.0, -1.0, 0.0])), default_bounds(scene))
    assert result.displacement.values[:2] == pytest.approx([1.0, -1.0])


def test_separation_rows_shape():
    rows, d0 = separation_rows(("x", "y", "theta"), 5.0, -1)
    np.testing.assert_allclose(rows.toarray(), [[-1, -1, 0], [1, 1, 0]])
    np.testing.assert_allclose(d0, [-5.0, 10.0])
    with pytest.raises(ValueError):
        solve_separation(assemble(structures.two_squares()), sign=0)


def test_free_block_beside_fixed_block_is_separable(two_squares):
    verdict = classify_separability(two_squares)
    assert verdict.separable
    assert verdict.caveat
    direction = verdict.direction
    assert np.linalg.norm(direction) == pytest.approx(1.0)
    before = min_clearance(two_squares, 0)
    moved = apply_displacement(two_squares, Displacement(direction), 0.1)
    assert min_clearance(moved, 0) > before


def test_enclosed_block_is_inseparable():
    scene = structures.block_in_cavity(0.05)
    verdict = classify_separability(scene)
    assert not verdict.separable
    assert verdict.direction is None
    system = assemble(scene)
    for sign in (1, -1):
        assert not solve_separation(system, sign=sign).optimal


def test_solver_registry():
    assert {"highs", "highs-ds", "highs-ipm"} <= set(SolverRegistry.list_solvers())
    adapter = SolverRegistry.get_adapter("highs-ds")
    assert isinstance(adapter, HighsAdapter)
    assert adapter.method == "highs-ds"
    with pytest.raises(ValueError, match="Unknown LP solver"):
        SolverRegistry.get_adapter("simplex-by-hand")


@pytest.mark.parametrize("solver", ["highs", "highs-ds", "highs-ipm"])
def test_backends_agree_on_cavity(solver):
    scene = structures.block_in_cavity(0.05, bounds=BoxLimits(1.0, 0.0))
    result = solve_flex(
        assemble(scene), direction_objective(scene, (1.0, 0.0), [0]), default_bounds(scene), solver=solver
    )
    assert result.objective_value == pytest.approx(0.05, abs=1e-7)
