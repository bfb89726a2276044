import math

import numpy as np
import pytest

from sfrrt.container import ContainerSpec, max_tilt_angle
from sfrrt.errors import InfeasibleQuery, InvalidConfig, NoPathFound
from sfrrt.planner import Path, PlannerConfig, distance, path_cost, plan, prune
from sfrrt.sampling import SamplerMode
from sfrrt.scene import ContainerBody, Scene, Sphere, segment_free
from sfrrt.scenes import GATE_CONTAINER, build_scene, empty_scene, tilt_gate_scene
from sfrrt.se3 import Pose, quat_from_axis_angle, slerp, slerp_max_tilt, tilt_of

CAP30 = math.radians(30.0)


def validate_path(path, scene, container, cfg, theta_cap=None):
    """Independent re-check: collision at 2x finer resolution, tilt on the
    exact continuum bound of every edge, endpoints on the query."""
    body = ContainerBody.from_spec(container)
    cap = theta_cap
    if cap is None:
        cap = max_tilt_angle(container).theta_max if cfg.theta_cap is None else cfg.theta_cap
    for a, b in zip(path.poses, path.poses[1:]):
        assert segment_free(a, b, body, scene, cfg.edge_resolution / 2)
        m = float(slerp_max_tilt(a.orientation[None], b.orientation[None])[0])
        assert m <= cap + 1e-7
    start, goal = scene.start, scene.goal
    assert np.allclose(path.poses[0].position, start.position, atol=1e-12)
    end = path.poses[-1]
    assert np.linalg.norm(end.position - goal.position) <= scene.goal_pos_tol + 1e-12
    assert abs(tilt_of(end) - tilt_of(goal)) <= scene.goal_tilt_tol + 1e-12


class TestDistance:
    def test_identical_poses(self):
        p = Pose([0.3, -0.2, 0.5], quat_from_axis_angle([0, 1, 0], 0.4))
        assert distance(p, p, 0.3) == 0.0

    def test_pure_translation(self):
        a = Pose([0, 0, 0])
        b = Pose([1, 0, 0])
        assert distance(a, b, 0.3) == pytest.approx(1.0, abs=1e-12)

    def test_pure_rotation_90deg(self):
        a = Pose([0, 0, 0])
        b = Pose([0, 0, 0], quat_from_axis_angle([1, 0, 0], math.pi / 2))
        assert distance(a, b, 0.3) == pytest.approx(0.3 * math.pi / 2, abs=1e-9)

    def test_symmetric(self):
        rng = np.random.default_rng(4)
        for _ in range(20):
            a = Pose(rng.uniform(-1, 1, 3), rng.normal(size=4))
            b = Pose(rng.uniform(-1, 1, 3), rng.normal(size=4))
            assert distance(a, b, 0.3) == pytest.approx(distance(b, a, 0.3), abs=1e-12)

    def test_triangle_inequality(self):
        rng = np.random.default_rng(5)
        for _ in range(50):
            a, b, c = (Pose(rng.uniform(-1, 1, 3), rng.normal(size=4)) for _ in range(3))
            assert distance(a, c, 0.3) <= distance(a, b, 0.3) + distance(b, c, 0.3) + 1e-9

    def test_rejects_nonpositive_weight(self):
        a, b = Pose([0, 0, 0]), Pose([1, 0, 0])
        with pytest.raises(InvalidConfig):
            distance(a, b, 0.0)


class TestConfig:
    def test_defaults(self):
        cfg = PlannerConfig()
        assert cfg.max_iterations == 5000
        assert cfg.step == pytest.approx(0.10)
        assert cfg.w_rot == pytest.approx(0.3)
        assert cfg.goal_bias == pytest.approx(0.05)
        assert cfg.edge_resolution == pytest.approx(0.01)
        # rewiring radius at n=1000 is about three steps
        radius = cfg.gamma * (math.log(1000) / 1000) ** (1.0 / 6.0)
        assert radius == pytest.approx(3 * cfg.step, rel=1e-9)

    @pytest.mark.parametrize(
        "kwargs",
        [
            {"max_iterations": 0},
            {"max_iterations": 10.5},
            {"step": 0.0},
            {"step": -1.0},
            {"w_rot": 0.0},
            {"gamma": -0.1},
            {"edge_resolution": 0.0},
            {"goal_bias": 1.0},
            {"goal_bias": -0.01},
            {"theta_cap": -0.1},
            {"theta_cap": math.pi},
            {"sampler_mode": "informed"},
        ],
    )
    def test_rejects_bad_values(self, kwargs):
        with pytest.raises(InvalidConfig):
            PlannerConfig(**kwargs)

    def test_path_needs_two_poses(self):
        with pytest.raises(InvalidConfig):
            Path((Pose([0, 0, 0]),), 0.0)


class TestPlanEmptyScene:
    def test_near_straight_line_cost(self):
        scene = empty_scene()
        cfg = PlannerConfig(max_iterations=5000, theta_cap=CAP30, seed=0)
        path = plan(scene, GATE_CONTAINER, cfg)
        assert path.cost <= 1.05
        assert path.cost == pytest.approx(path_cost(path.poses, cfg.w_rot), abs=1e-9)
        validate_path(path, scene, GATE_CONTAINER, cfg)

    def test_uniform_sampler_mode_also_plans(self):
        scene = empty_scene()
        cfg = PlannerConfig(
            max_iterations=4000, theta_cap=CAP30, seed=0, sampler_mode=SamplerMode.UNIFORM
        )
        path = plan(scene, GATE_CONTAINER, cfg, stop_on_first=True)
        validate_path(path, scene, GATE_CONTAINER, cfg)

    def test_start_in_goal_region_trivial(self):
        scene = empty_scene(length=0.03)
        cfg = PlannerConfig(max_iterations=10, seed=0)
        path = plan(scene, GATE_CONTAINER, cfg)
        assert path.cost == 0.0


class TestInfeasible:
    def test_goal_inside_obstacle(self):
        base = empty_scene()
        scene = Scene(
            bounds=base.bounds,
            obstacles=(Sphere(base.goal.position + [0.0, 0.0, 0.05], 0.15),),
            start=base.start,
            goal=base.goal,
        )
        with pytest.raises(InfeasibleQuery):
            plan(scene, GATE_CONTAINER, PlannerConfig(max_iterations=10))

    def test_start_over_tilt_cap(self):
        base = empty_scene(start_tilt=math.radians(40))
        with pytest.raises(InfeasibleQuery):
            plan(base, GATE_CONTAINER, PlannerConfig(max_iterations=10, theta_cap=CAP30))

    def test_cap_defaults_to_container_limit(self):
        cap = max_tilt_angle(GATE_CONTAINER).theta_max
        base = empty_scene(start_tilt=cap + 0.05)
        with pytest.raises(InfeasibleQuery):
            plan(base, GATE_CONTAINER, PlannerConfig(max_iterations=10))


class TestTiltGate:
    def test_wide_cap_passes_gate(self):
        scene = tilt_gate_scene()
        cfg = PlannerConfig(max_iterations=20000, theta_cap=math.radians(45), seed=0)
        path = plan(scene, GATE_CONTAINER, cfg, stop_on_first=True)
        validate_path(path, scene, GATE_CONTAINER, cfg, theta_cap=math.radians(45))
        # the path must actually tilt to fit the slot
        assert max(tilt_of(p) for p in path.poses) > math.radians(20)

    def test_narrow_cap_blocked(self):
        scene = tilt_gate_scene()
        cfg = PlannerConfig(max_iterations=4000, theta_cap=math.radians(15), seed=0)
        with pytest.raises(NoPathFound):
            plan(scene, GATE_CONTAINER, cfg, stop_on_first=True)


class TestAnytimeAndDeterminism:
    def test_progress_costs_non_increasing(self):
        scene = empty_scene()
        cfg = PlannerConfig(max_iterations=5000, theta_cap=CAP30, seed=1)
        seen = []
        path = plan(scene, GATE_CONTAINER, cfg, progress=lambda it, c: seen.append((it, c)))
        assert seen, "no progress reports"
        its = [it for it, _ in seen]
        costs = [c for _, c in seen]
        assert its == sorted(its)
        assert all(b <= a + 1e-12 for a, b in zip(costs, costs[1:]))
        assert path.cost <= costs[-1] + 1e-12

    def test_same_seed_same_path(self):
        scene = build_scene("gate")
        cfg = PlannerConfig(max_iterations=20000, theta_cap=math.radians(45), seed=3)
        p1 = plan(scene, GATE_CONTAINER, cfg, stop_on_first=True)
        p2 = plan(scene, GATE_CONTAINER, cfg, stop_on_first=True)
        assert p1.cost == p2.cost
        assert len(p1.poses) == len(p2.poses)
        for a, b in zip(p1.poses, p2.poses):
            assert np.array_equal(a.position, b.position)
            assert np.array_equal(a.orientation, b.orientation)

    def test_different_seeds_explore_differently(self):
        scene = empty_scene()
        p1 = plan(scene, GATE_CONTAINER, PlannerConfig(max_iterations=800, theta_cap=CAP30, seed=0), stop_on_first=True)
        p2 = plan(scene, GATE_CONTAINER, PlannerConfig(max_iterations=800, theta_cap=CAP30, seed=1), stop_on_first=True)
        assert p1.cost != p2.cost


class TestPrune:
    def test_two_waypoints_unchanged(self):
        scene = empty_scene()
        cfg = PlannerConfig()
        p = Path((scene.start, scene.goal), distance(scene.start, scene.goal, cfg.w_rot))
        out = prune(p, scene, GATE_CONTAINER, cfg)
        assert len(out.poses) == 2
        assert out.cost == pytest.approx(p.cost, abs=1e-12)

    def test_collinear_chain_collapses(self):
        scene = empty_scene()
        cfg = PlannerConfig()
        xs = np.linspace(0.0, 1.0, 10)
        poses = tuple(Pose([x, 0.0, 0.25]) for x in xs)
        p = Path(poses, path_cost(poses, cfg.w_rot))
        out = prune(p, scene, GATE_CONTAINER, cfg)
        assert len(out.poses) == 2
        assert out.cost <= p.cost + 1e-12

    def test_pruned_path_still_valid(self):
        scene = build_scene("clutter")
        cfg = PlannerConfig(max_iterations=3000, seed=2)
        p = plan(scene, GATE_CONTAINER, cfg, stop_on_first=True)
        out = prune(p, scene, GATE_CONTAINER, cfg)
        assert out.cost <= p.cost + 1e-12
        assert out.poses[0].isclose(p.poses[0])
        assert out.poses[-1].isclose(p.poses[-1])
        validate_path(out, scene, GATE_CONTAINER, cfg)


class TestSceneLibrary:
    @pytest.mark.parametrize("name", ["empty", "gate", "shelf", "clutter"])
    def test_builders_produce_plannable_scenes(self, name):
        scene = build_scene(name)
        cap = math.radians(45) if name == "gate" else None
        cfg = PlannerConfig(max_iterations=20000, theta_cap=cap, seed=0)
        path = plan(scene, GATE_CONTAINER, cfg, stop_on_first=True)
        validate_path(path, scene, GATE_CONTAINER, cfg, theta_cap=cap)

    def test_unknown_name_rejected(self):
        with pytest.raises(InvalidConfig):
            build_scene("nonexistent")
