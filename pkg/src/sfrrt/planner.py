"""RRT* over container poses with a tilt cap enforced on whole edges.

The tree grows in SE(3) under the metric ||dp|| + w_rot * rotation angle.
The tilt cap is enforced at the continuum level: the maximum tilt along a
slerp arc has a closed form, so edges that breach the cap anywhere are
rejected exactly, with no sampling and no discretization gap. Collision is
checked by interpolating at the configured resolution with the capsule
inflated by the largest possible between-sample sweep, which again makes
the discrete check sound. A returned path therefore stays valid under
re-validation at any finer resolution.

Performance notes (single-core numpy): candidate parent edges are checked
in one batched collision call in cost order, rewiring only re-checks
neighbors whose cost would actually improve, an axis-aligned swept-tube
test fast-accepts edges clear of every obstacle's world box, and steered
poses that provably collide are discarded before any edge work.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, replace

import numpy as np

from sfrrt.container import ContainerSpec, max_tilt_angle
from sfrrt.errors import InfeasibleQuery, InvalidConfig, NoPathFound
from sfrrt.sampling import PoseSampler, SamplerConfig, SamplerMode
from sfrrt.scene import ContainerBody, Scene, collision_mask, in_collision
from sfrrt.se3 import (
    Pose,
    quat_angle,
    quat_rotate,
    quat_to_matrix,
    slerp,
    slerp_max_tilt,
    tilt_of,
    tilt_of_quat,
)

# Default rewiring scale: radius gamma*(log n / n)^(1/6) equals 3x the
# default step at n = 1000.
DEFAULT_STEP = 0.10
DEFAULT_GAMMA = 3.0 * DEFAULT_STEP / (math.log(1000.0) / 1000.0) ** (1.0 / 6.0)

# Cap on neighbors examined per iteration; the rewiring radius can hold
# hundreds of nodes early on and cost-ordered scanning makes extras useless.
MAX_NEIGHBORS = 32

_TILT_EPS = 1e-9  # float slack when comparing sampled tilt to the cap

_S_CACHE: dict = {}


def _unit_grid(c: int) -> np.ndarray:
    s = _S_CACHE.get(c)
    if s is None:
        s = np.linspace(0.0, 1.0, c)
        _S_CACHE[c] = s
    return s


@dataclass(frozen=True)
class PlannerConfig:
    """RRT* parameters.

    ``theta_cap`` defaults to the container's quasi-static limit when left
    as None; setting it lower (e.g. a 15-degree transport rule) or higher is
    an explicit override.
    """

    max_iterations: int = 5000
    step: float = DEFAULT_STEP
    w_rot: float = 0.3
    goal_bias: float = 0.05
    gamma: float = DEFAULT_GAMMA
    edge_resolution: float = 0.01
    theta_cap: float | None = None
    seed: int = 0
    sampler_mode: SamplerMode = SamplerMode.INFORMED

    def __post_init__(self):
        if not (isinstance(self.max_iterations, int) and self.max_iterations > 0):
            raise InvalidConfig(f"max_iterations must be a positive int, got {self.max_iterations}")
        for name in ("step", "w_rot", "gamma", "edge_resolution"):
            v = getattr(self, name)
            if not (np.isfinite(v) and v > 0):
                raise InvalidConfig(f"{name} must be positive, got {v}")
        if not 0.0 <= self.goal_bias < 1.0:
            raise InvalidConfig(f"goal_bias must be in [0, 1), got {self.goal_bias}")
        if self.theta_cap is not None and not (0.0 <= self.theta_cap <= math.pi / 2):
            raise InvalidConfig(f"theta_cap must be in [0, pi/2], got {self.theta_cap}")
        if not isinstance(self.sampler_mode, SamplerMode):
            raise InvalidConfig(f"sampler_mode must be a SamplerMode, got {self.sampler_mode!r}")


@dataclass(frozen=True)
class Path:
    """Waypoint poses from start to goal region, with metric cost."""

    poses: tuple
    cost: float

    def __post_init__(self):
        object.__setattr__(self, "poses", tuple(self.poses))
        if len(self.poses) < 2:
            raise InvalidConfig("a path needs at least two poses")


def distance(a: Pose, b: Pose, w_rot: float) -> float:
    """Planner metric: position distance plus weighted rotation angle."""
    if not w_rot > 0:
        raise InvalidConfig(f"w_rot must be positive, got {w_rot}")
    return float(
        np.linalg.norm(a.position - b.position)
        + w_rot * quat_angle(a.orientation, b.orientation)
    )


def path_cost(poses, w_rot: float) -> float:
    return sum(distance(a, b, w_rot) for a, b in zip(poses, poses[1:]))


class _EdgeChecker:
    """Batched edge validation shared by plan() and prune().

    An edge (a -> b) is accepted iff every interpolated sample keeps tilt at
    or below the cap (with the mid-sample overshoot margin) and the swept,
    inflated capsule stays collision-free and in bounds.
    """

    def __init__(self, scene: Scene, body: ContainerBody, cfg: PlannerConfig, theta_cap: float):
        self.scene = scene
        self.body = body
        self.cfg = cfg
        self.theta_cap = theta_cap
        self.reach = float(np.linalg.norm(body.p1)) + body.radius
        # Per-axis swept-capsule padding for poses with tilt <= theta_cap:
        # below the pose only the bottom sphere extends, above it the full
        # height, sideways at most h sin(theta_cap) plus the radius. The
        # edge resolution covers the sweep between interpolation samples.
        h = float(np.linalg.norm(body.p1))
        side = h * math.sin(min(theta_cap, math.pi / 2)) + body.radius + cfg.edge_resolution
        self.pad_lo = np.array([side, side, body.radius + cfg.edge_resolution])
        self.pad_hi = np.array([side, side, h + body.radius + cfg.edge_resolution])
        # world-frame AABBs of all obstacles for the fast-accept tube test
        boxes = []
        for ob in scene.obstacles:
            if hasattr(ob, "half_extents"):
                extent = np.abs(quat_to_matrix(ob.orientation)) @ ob.half_extents
            else:
                extent = np.full(3, ob.radius)
            boxes.append((ob.center - extent, ob.center + extent))
        self.obstacle_aabbs = boxes

    def _tube_free(self, pa: np.ndarray, pb: np.ndarray) -> np.ndarray:
        """Fast conservative accept: swept tube clear of all obstacle AABBs.

        The tube is the position segment inflated per axis by the capsule's
        reachable extent under the tilt cap; anything it cannot touch, the
        true swept capsule cannot touch either. Only valid for edges whose
        tilt stays within the cap for their entire arc, which check_edges
        guarantees before trusting this accept.
        """
        lo = np.minimum(pa, pb) - self.pad_lo
        hi = np.maximum(pa, pb) + self.pad_hi
        free = np.all(lo >= self.scene.bounds[0], axis=-1) & np.all(
            hi <= self.scene.bounds[1], axis=-1
        )
        for blo, bhi in self.obstacle_aabbs:
            if not np.any(free):
                break
            overlap = np.all(hi >= blo, axis=-1) & np.all(lo <= bhi, axis=-1)
            free &= ~overlap
        return free

    def definite_hit(self, p_bot: np.ndarray, p_top: np.ndarray) -> bool:
        """Certain collision for the capsule axis (p_bot, p_top); sound only.

        Tests just the two axis endpoints against each obstacle, so True is
        a proven hit while False merely means no cheap certificate. Used to
        discard steered poses before any batched edge validation.
        """
        r = self.body.radius
        for ob in self.scene.obstacles:
            if hasattr(ob, "half_extents"):
                if ob.orientation[0] >= 1.0 - 1e-12:
                    a = p_bot - ob.center
                    b = p_top - ob.center
                else:
                    m = quat_to_matrix(ob.orientation)
                    a = m.T @ (p_bot - ob.center)
                    b = m.T @ (p_top - ob.center)
                he = ob.half_extents
                ea = np.maximum(np.abs(a) - he, 0.0)
                if float(ea @ ea) <= r * r:
                    return True
                eb = np.maximum(np.abs(b) - he, 0.0)
                if float(eb @ eb) <= r * r:
                    return True
            else:
                rr = (ob.radius + r) ** 2
                da = p_bot - ob.center
                db = p_top - ob.center
                if float(da @ da) <= rr or float(db @ db) <= rr:
                    return True
        return False

    def edge_certs(self, pa, qa, pb, qb):
        """Cheap per-edge certificates: (tilt ok, needs collision sampling).

        The maximum tilt along a slerp arc is known in closed form (the body
        z-axis orbits the relative rotation axis on a cone), so cap
        enforcement is exact: no sampling, no mid-sample overshoot. The tube
        accept presumes the arc respects the cap, which that exact test has
        already established for ok lanes.
        """
        ta = tilt_of_quat(qa)
        tb = tilt_of_quat(qb)
        ok = slerp_max_tilt(qa, qb, ta, tb) <= self.theta_cap + _TILT_EPS
        need = ok & ~self._tube_free(pa, pb)
        return ok, need

    def sampled_collision_free(self, pa, qa, pb, qb) -> np.ndarray:
        """Dense-sampled collision check for k edges; boolean (k,).

        Caller is responsible for the tilt certificate. The capsule is
        inflated by the worst between-sample sweep bound
        (pos_step + reach * rot_step) / 2, which keeps the discrete check
        sound under re-validation at any finer resolution.
        """
        res = self.cfg.edge_resolution
        rot = quat_angle(qa, qb)
        pos_len = np.linalg.norm(pb - pa, axis=-1)
        length = pos_len + self.cfg.w_rot * rot
        counts = np.maximum(np.ceil(length / res).astype(int) + 1, 2)
        offsets = np.concatenate([[0], np.cumsum(counts)])
        s = np.concatenate([_unit_grid(int(c)) for c in counts])
        owner = np.repeat(np.arange(len(pa)), counts)

        positions = (1.0 - s)[:, None] * pa[owner] + s[:, None] * pb[owner]
        quats = slerp(qa[owner], qb[owner], s)

        seg = np.maximum(counts - 1, 1)
        sweep = 0.5 * (pos_len + self.reach * rot) / seg
        inflated = ContainerBody(
            self.body.p0, self.body.p1, self.body.radius + float(sweep.max())
        )
        hit = collision_mask(positions, quats, inflated, self.scene)
        return np.add.reduceat(hit, offsets[:-1]) == 0

    def check_edges(self, pa, qa, pb, qb) -> np.ndarray:
        """Validate k edges given endpoint arrays; returns boolean (k,)."""
        pa = np.atleast_2d(pa)
        qa = np.atleast_2d(qa)
        pb = np.atleast_2d(pb)
        qb = np.atleast_2d(qb)
        ok, need = self.edge_certs(pa, qa, pb, qb)
        result = ok.copy()
        if np.any(need):
            idx = np.flatnonzero(need)
            result[idx] = self.sampled_collision_free(pa[idx], qa[idx], pb[idx], qb[idx])
        return result

    def check_edge(self, a: Pose, b: Pose) -> bool:
        return bool(
            self.check_edges(
                a.position[None], a.orientation[None], b.position[None], b.orientation[None]
            )[0]
        )


def _resolve_cap(container: ContainerSpec, cfg: PlannerConfig) -> float:
    return max_tilt_angle(container).theta_max if cfg.theta_cap is None else cfg.theta_cap


def plan(
    scene: Scene,
    container: ContainerSpec,
    cfg: PlannerConfig = PlannerConfig(),
    *,
    stop_on_first: bool = False,
    progress=None,
) -> Path:
    """Grow an RRT* from scene.start and return the best goal-region path.

    Deterministic for a given config seed. Cost of the best path found so
    far never increases with more iterations; ``progress(iteration, cost)``
    is invoked whenever it improves. ``stop_on_first`` returns at the first
    goal connection (feasibility mode).

    Raises:
        InfeasibleQuery: start or goal colliding, out of bounds, or over
            the tilt cap.
        NoPathFound: iteration budget exhausted without reaching the goal.
    """
    theta_cap = _resolve_cap(container, cfg)
    body = ContainerBody.from_spec(container)
    start, goal = scene.start, scene.goal

    for name, pose in (("start", start), ("goal", goal)):
        if tilt_of(pose) > theta_cap + _TILT_EPS:
            raise InfeasibleQuery(f"{name} tilt {tilt_of(pose):.4f} exceeds cap {theta_cap:.4f}")
        if in_collision(pose, body, scene):
            raise InfeasibleQuery(f"{name} pose is in collision or out of bounds")

    checker = _EdgeChecker(scene, body, cfg, theta_cap)
    sampler = PoseSampler(
        SamplerConfig(theta_max=theta_cap, bounds=scene.bounds, mode=cfg.sampler_mode, seed=cfg.seed)
    )
    rng = np.random.default_rng(cfg.seed + 0x5EED)

    cap = cfg.max_iterations + 2
    pos = np.empty((cap, 3))
    quat = np.empty((cap, 4))
    parent = np.full(cap, -1, dtype=np.int64)
    cost = np.full(cap, np.inf)
    children: list[list[int]] = [[] for _ in range(cap)]
    pos[0], quat[0], cost[0] = start.position, start.orientation, 0.0
    n = 1

    goal_pos = goal.position
    goal_tilt = tilt_of(goal)
    goal_nodes: list[int] = []
    best_cost = math.inf
    best_node = -1

    def in_goal_region(p, q) -> bool:
        return (
            float(np.linalg.norm(p - goal_pos)) <= scene.goal_pos_tol
            and abs(float(tilt_of_quat(q)) - goal_tilt) <= scene.goal_tilt_tol
        )

    if in_goal_region(pos[0], quat[0]):
        return Path((start, start), 0.0)

    # Once a solution exists, concentrate samples on poses that could still
    # improve it (informed-set rejection): keep a sample only if the metric
    # from start plus a lower bound on reaching the goal region fits under
    # the best cost. Admissibility uses |tilt difference| as a rotation
    # lower bound, so no improving sample is ever rejected.
    batch_size = 1024
    batch_pos = np.empty((0, 3))
    batch_quat = np.empty((0, 4))
    queue: list[int] = []
    queue_i = 0
    low_yield = 0
    filter_off_at = math.inf  # filtering suspended while best_cost >= this

    def admissible_idx() -> np.ndarray:
        if not math.isfinite(best_cost) or best_cost >= filter_off_at:
            return np.arange(len(batch_pos))
        d_start = np.linalg.norm(batch_pos - pos[0], axis=1) + cfg.w_rot * quat_angle(
            batch_quat, quat[0]
        )
        lb_goal = np.maximum(
            np.linalg.norm(batch_pos - goal_pos, axis=1) - scene.goal_pos_tol, 0.0
        ) + cfg.w_rot * np.maximum(
            np.abs(tilt_of_quat(batch_quat) - goal_tilt) - scene.goal_tilt_tol, 0.0
        )
        return np.flatnonzero(d_start + lb_goal <= best_cost)

    def next_sample():
        nonlocal batch_pos, batch_quat, queue, queue_i, low_yield, filter_off_at
        while True:
            if queue_i < len(queue):
                i = queue[queue_i]
                queue_i += 1
                return batch_pos[i], batch_quat[i]
            batch_pos, batch_quat = sampler.sample_batch(batch_size)
            queue = admissible_idx().tolist()
            queue_i = 0
            # When the best cost sits at the informed set's lower bound the
            # acceptance rate collapses and rejection costs more than it
            # saves; suspend filtering until the best cost improves again.
            if math.isfinite(best_cost) and best_cost < filter_off_at:
                if len(queue) * 64 < batch_size:
                    low_yield += 1
                    if low_yield >= 4:
                        filter_off_at = best_cost
                        low_yield = 0
                        queue = list(range(batch_size))
                else:
                    low_yield = 0

    blo = scene.bounds[0] + body.radius
    bhi = scene.bounds[1] - body.radius
    top_offset = body.p1

    def partial_metric(p, q, extra: float):
        """Exact metric to nodes that could be within ``extra``; inf elsewhere.

        Uses sqrt(2(1-x)) <= arccos(x) <= (pi/2) sqrt(2(1-x)) to prefilter
        before the expensive arccos, so the exact metric is only evaluated
        for plausible nearest/neighbor candidates. Sound: the returned inf
        lanes provably exceed both the running minimum and ``extra``.
        """
        diff = pos[:n] - p
        dp = np.sqrt(np.sum(diff * diff, axis=1))
        dot = np.abs(quat[:n, 0] * q[0] + quat[:n, 1] * q[1] + quat[:n, 2] * q[2] + quat[:n, 3] * q[3])
        chord = np.sqrt(2.0 * np.maximum(1.0 - dot, 0.0))
        d_lb = dp + cfg.w_rot * 2.0 * chord
        d_ub = dp + cfg.w_rot * math.pi * chord
        keep = d_lb <= max(float(d_ub.min()), extra) + 1e-12
        d = np.full(n, np.inf)
        d[keep] = dp[keep] + cfg.w_rot * 2.0 * np.arccos(np.clip(dot[keep], 0.0, 1.0))
        return d

    def reparent(child: int, new_parent: int, edge_cost: float):
        old = int(parent[child])
        if old >= 0:
            children[old].remove(child)
        parent[child] = new_parent
        children[new_parent].append(child)
        delta = cost[new_parent] + edge_cost - cost[child]
        stack = [child]
        while stack:
            k = stack.pop()
            cost[k] += delta
            stack.extend(children[k])

    def shortcut_best():
        """Greedy shortcut pass over the current best chain (in-tree splice)."""
        chain = []
        node = best_node
        while node >= 0:
            chain.append(node)
            node = int(parent[node])
        chain.reverse()
        i = 0
        while i + 2 < len(chain):
            a = chain[i]
            pose_a_p, pose_a_q = pos[a], quat[a]
            spliced = False
            for j in range(len(chain) - 1, i + 1, -1):
                c = chain[j]
                d_ac = float(np.linalg.norm(pos[c] - pose_a_p)) + cfg.w_rot * float(
                    quat_angle(quat[c], pose_a_q)
                )
                if cost[c] - cost[a] <= d_ac + 1e-12:
                    continue
                if checker.check_edges(
                    pose_a_p[None], pose_a_q[None], pos[c][None], quat[c][None]
                )[0]:
                    reparent(c, a, d_ac)
                    chain = chain[: i + 1] + chain[j:]
                    spliced = True
                    break
            i += 1
            if not spliced and i + 2 >= len(chain):
                break

    for it in range(cfg.max_iterations):
        if best_node < 0 and rng.uniform() < cfg.goal_bias:
            s_pos, s_quat = goal_pos, goal.orientation
        else:
            s_pos, s_quat = next_sample()

        radius = min(cfg.gamma * (math.log(n + 1) / (n + 1)) ** (1.0 / 6.0), 4.0 * cfg.step)
        d = partial_metric(s_pos, s_quat, radius)
        nearest = int(np.argmin(d))
        d_near = float(d[nearest])
        if d_near < 1e-12:
            continue

        if d_near <= cfg.step:
            new_pos, new_quat = s_pos, s_quat
            d_new = d
        else:
            frac = cfg.step / d_near
            new_pos = pos[nearest] + frac * (s_pos - pos[nearest])
            new_quat = slerp(quat[nearest], s_quat, frac)
            d_new = None
        if float(tilt_of_quat(new_quat)) > theta_cap + _TILT_EPS:
            continue
        # cheap rejects: the capsule at the new pose must fit inside bounds
        # and must not be provably inside an obstacle
        top = new_pos + quat_rotate(new_quat, top_offset)
        if (
            np.any(new_pos < blo)
            or np.any(new_pos > bhi)
            or np.any(top < blo)
            or np.any(top > bhi)
        ):
            continue
        if checker.definite_hit(new_pos, top):
            continue
        if d_new is None:
            d_new = partial_metric(new_pos, new_quat, radius)

        nb = np.flatnonzero(d_new <= radius)
        if nb.size == 0:
            nb = np.array([nearest if math.isfinite(d_new[nearest]) else int(np.argmin(d_new))])

        # Parent candidates in total-cost order, plus the optimistic rewire
        # set (computed with the lowest possible new-node cost, so a
        # superset of the true improve set). One certificate pass covers
        # both; collision sampling is resolved lazily in cost order, so the
        # first free edge found is the exact-optimal parent. Edge validity
        # is direction-independent, which lets parent and rewire share
        # results.
        order = nb[np.argsort(cost[nb] + d_new[nb], kind="stable")[:MAX_NEIGHBORS]]
        cost_opt = float(cost[order[0]] + d_new[order[0]])
        improve = nb[cost[nb] > cost_opt + d_new[nb] + 1e-12]
        if improve.size > MAX_NEIGHBORS:
            # true gains differ only by a constant, so the top-k agree
            gain = cost[improve] - d_new[improve]
            improve = improve[np.argsort(-gain, kind="stable")[:MAX_NEIGHBORS]]

        cand = np.unique(np.concatenate([order, improve]))
        ok_c, need_c = checker.edge_certs(
            pos[cand],
            quat[cand],
            np.broadcast_to(new_pos, (cand.size, 3)),
            np.broadcast_to(new_quat, (cand.size, 4)),
        )
        # per-candidate edge state: -1 collision unknown, 0 blocked, 1 free
        state = np.where(ok_c, np.where(need_c, -1, 1), 0).astype(np.int8)

        def resolve(rows) -> int:
            """Collision-sample cand rows; returns first free row or -1."""
            rr = np.asarray(rows)
            good = checker.sampled_collision_free(
                pos[cand[rr]],
                quat[cand[rr]],
                np.broadcast_to(new_pos, (rr.size, 3)),
                np.broadcast_to(new_quat, (rr.size, 4)),
            )
            state[rr] = good.astype(np.int8)
            hits = np.flatnonzero(good)
            return int(rr[hits[0]]) if hits.size else -1

        chosen_row = -1
        pending: list[int] = []
        for r in np.searchsorted(cand, order):
            if state[r] == 0:
                continue
            if state[r] == 1:
                if pending:
                    w = resolve(pending)
                    pending.clear()
                    if w >= 0:
                        chosen_row = w
                        break
                chosen_row = int(r)
                break
            pending.append(int(r))
            if len(pending) == 8:
                w = resolve(pending)
                pending.clear()
                if w >= 0:
                    chosen_row = w
                    break
        if chosen_row < 0 and pending:
            chosen_row = resolve(pending)
        if chosen_row < 0:
            continue
        chosen = int(cand[chosen_row])

        new_idx = n
        pos[new_idx], quat[new_idx] = new_pos, new_quat
        parent[new_idx] = chosen
        cost[new_idx] = cost[chosen] + d_new[chosen]
        children[chosen].append(new_idx)
        n += 1

        # rewire with the actual new-node cost, reusing certificates and
        # collision results from the parent scan; never picks an ancestor
        # because costs strictly increase along tree edges
        improve = improve[cost[improve] > cost[new_idx] + d_new[improve] + 1e-12]
        if improve.size:
            rows = np.searchsorted(cand, improve)
            unknown = rows[state[rows] < 0]
            if unknown.size:
                resolve(unknown)
            for r, j in zip(rows, improve):
                if state[r] == 1:
                    reparent(int(j), new_idx, float(d_new[j]))

        if in_goal_region(new_pos, new_quat):
            goal_nodes.append(new_idx)

        if goal_nodes:
            costs = cost[goal_nodes]
            i_best = int(np.argmin(costs))
            if costs[i_best] < best_cost - 1e-15:
                had_solution = best_node >= 0
                best_cost = float(costs[i_best])
                best_node = goal_nodes[i_best]
                if not had_solution or it % 16 == 0:
                    # splice shortcuts into the tree while searching; the
                    # tighter cost also shrinks the informed sampling set
                    shortcut_best()
                    i_best = int(np.argmin(cost[goal_nodes]))
                    best_node = goal_nodes[i_best]
                    best_cost = float(cost[best_node])
                if progress is not None:
                    progress(it, best_cost)
            if stop_on_first:
                break

    if best_node < 0:
        raise NoPathFound(
            f"no path within {cfg.max_iterations} iterations (tilt cap {theta_cap:.3f} rad)"
        )

    shortcut_best()
    best_node = goal_nodes[int(np.argmin(cost[goal_nodes]))]

    chain = []
    node = best_node
    while node >= 0:
        chain.append(node)
        node = int(parent[node])
    chain.reverse()
    poses = tuple(Pose(pos[i], quat[i]) for i in chain)
    return Path(poses, float(cost[best_node]))


def prune(path: Path, scene: Scene, container: ContainerSpec, cfg: PlannerConfig = PlannerConfig()) -> Path:
    """Greedy shortcutting: repeatedly jump to the farthest visible waypoint.

    Keeps endpoints, never increases cost (triangle inequality), and every
    surviving edge passes the same validation as tree edges.
    """
    theta_cap = _resolve_cap(container, cfg)
    body = ContainerBody.from_spec(container)
    checker = _EdgeChecker(scene, body, cfg, theta_cap)
    poses = list(path.poses)
    out = [poses[0]]
    i = 0
    while i < len(poses) - 1:
        j = len(poses) - 1
        while j > i + 1 and not checker.check_edge(poses[i], poses[j]):
            j -= 1
        out.append(poses[j])
        i = j
    return Path(tuple(out), path_cost(out, cfg.w_rot))
