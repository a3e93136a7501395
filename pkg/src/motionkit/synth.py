"""Deterministic synthetic scenarios with analytically known labels.

Trajectories are built from piecewise phases (constant-curvature arcs or
straights with linearly ramping speed), so every sampled point, the endpoint
pose, and the speed profile have closed forms. Expected labels are computed by
applying the threshold rules to those closed-form quantities, never by running
the classifiers under test; the test suites assert classifier/oracle agreement.

All tracks start at the origin heading +x; rigid-motion invariance of the
classifiers makes that anchoring lossless.
"""

from __future__ import annotations

import math
import random
from dataclasses import dataclass, replace
from typing import Optional

import numpy as np

from .attributes import (
    DirectionLabel,
    DirectionThresholds,
    FineDirection,
    SpeedCategory,
    AccelCategory,
    DEFAULT_COLLAPSE,
    classify_acceleration,
    classify_speed,
)
from .behavior import BehaviorLabel, BehaviorParams
from .core import MPS_TO_KMH, AgentTrack, CenterlinePoint, HorizonConfig, Lane, Scenario, TrajectoryPoint
from .errors import InvalidSpec
from .geometry import normalize_heading, wrap_angle

KINDS = frozenset({"straight", "arc", "stop", "dwell_then_go", "piecewise", "u_turn"})

TOPOLOGIES = ("single", "t_junction", "parallel_pair", "u_loop")

# S-curve half-angle used for veer lateral shifts; stays well below the 30 deg
# straight threshold so shift phases never read as turns.
_S_CURVE_DEG = 22.0

# Steeper S-curve for the pre-U-turn shift (only the endpoint heading matters
# to the classifier, so this may approach the straight threshold).
_U_SHIFT_DEG = 28.0


@dataclass(frozen=True)
class Phase:
    """One motion phase: ``angle_deg`` is the total heading sweep (0 = straight),
    speed ramps linearly from v0 to v1 over ``duration_s``."""

    duration_s: float
    v0: float
    v1: float
    angle_deg: float = 0.0


@dataclass(frozen=True)
class SynthSpec:
    kind: str
    speed: float = 8.0
    speed_end: Optional[float] = None
    radius: float = 20.0
    angle_deg: float = 90.0
    dwell_s: float = 2.0
    rest_s: float = 1.5
    shift: Optional[float] = None
    phases: tuple[Phase, ...] = ()
    seed: int = 0

    def __post_init__(self) -> None:
        if self.kind not in KINDS:
            raise InvalidSpec(f"unknown kind {self.kind!r}")
        if self.radius <= 0:
            raise InvalidSpec("radius must be positive")
        if self.kind in ("arc", "u_turn") and not 0.0 < abs(self.angle_deg) <= 200.0:
            raise InvalidSpec("arc angle magnitude must lie in (0, 200] degrees")
        if self.speed < 0 or (self.speed_end is not None and self.speed_end < 0):
            raise InvalidSpec("speeds must be nonnegative")


# -- closed-form pose/profile evaluation -------------------------------------


def _advance(pose: tuple[float, float, float], length: float, angle_rad: float) -> tuple[float, float, float]:
    """Endpoint after traveling ``length`` along an arc sweeping ``angle_rad``."""
    x, y, h = pose
    if abs(angle_rad) < 1e-12:
        return x + length * math.cos(h), y + length * math.sin(h), h
    r = length / angle_rad
    return (
        x + r * (math.sin(h + angle_rad) - math.sin(h)),
        y + r * (math.cos(h) - math.cos(h + angle_rad)),
        h + angle_rad,
    )


class _PhasePlan:
    """Pre-composed phase table supporting exact pose/speed queries by time."""

    def __init__(self, phases: tuple[Phase, ...]):
        self.rows = []
        pose = (0.0, 0.0, 0.0)
        t0 = 0.0
        s0 = 0.0
        for ph in phases:
            length = ph.duration_s * (ph.v0 + ph.v1) / 2.0
            if length <= 0 and ph.angle_deg != 0.0:
                raise InvalidSpec("an arc phase must cover a positive distance")
            kappa = math.radians(ph.angle_deg) / length if length > 0 else 0.0
            self.rows.append((t0, pose, ph, kappa, s0))
            pose = _advance(pose, length, math.radians(ph.angle_deg))
            t0 += ph.duration_s
            s0 += length
        self.t_end = t0
        self.s_end = s0
        self.end_pose = pose

    def at(self, t: float) -> tuple[float, float, float, float, float]:
        """(x, y, tangent heading, speed, cumulative distance) at time ``t``."""
        t = min(max(t, 0.0), self.t_end)
        row = self.rows[0]
        for candidate in self.rows:
            if candidate[0] <= t + 1e-12:
                row = candidate
        t0, pose, ph, kappa, s0 = row
        u = min(max(t - t0, 0.0), ph.duration_s)
        accel = (ph.v1 - ph.v0) / ph.duration_s if ph.duration_s > 0 else 0.0
        s = ph.v0 * u + 0.5 * accel * u * u
        v = ph.v0 + accel * u
        x, y, h = _advance(pose, s, kappa * s)
        return x, y, h, v, s0 + s


def build_phases(spec: SynthSpec, horizon: HorizonConfig) -> tuple[Phase, ...]:
    """Expand a spec into phases covering the sampled future span exactly."""
    span = (horizon.t_pred - 1) * horizon.dt  # time of the last future sample
    v = spec.speed
    if spec.kind == "straight":
        v1 = spec.speed_end if spec.speed_end is not None else v
        return (Phase(span, v, v1),)
    if spec.kind == "arc":
        if v <= 0:
            raise InvalidSpec("arc requires positive speed")
        t_arc = spec.radius * math.radians(abs(spec.angle_deg)) / v
        if t_arc > span:
            raise InvalidSpec("arc does not fit in the future window; raise speed or shrink the angle")
        phases = [Phase(t_arc, v, v, spec.angle_deg)]
        if span - t_arc > 0:
            phases.append(Phase(span - t_arc, v, v))
        return tuple(phases)
    if spec.kind == "stop":
        rest = min(spec.rest_s, span)
        return (Phase(span - rest, v, 0.0), Phase(rest, 0.0, 0.0)) if span > rest else (Phase(span, 0.0, 0.0),)
    if spec.kind == "dwell_then_go":
        dwell = min(spec.dwell_s, span)
        target = spec.speed_end if spec.speed_end is not None else v
        return (Phase(dwell, 0.0, 0.0), Phase(span - dwell, 0.0, target))
    if spec.kind == "u_turn":
        return _u_turn_phases(spec, span)
    # piecewise: explicit phases, padded to the sampled span when short
    if not spec.phases:
        raise InvalidSpec("piecewise spec needs explicit phases")
    total = sum(p.duration_s for p in spec.phases)
    if total > span + 1e-9:
        raise InvalidSpec(f"phases span {total:.2f}s but the future window samples {span:.2f}s")
    phases = list(spec.phases)
    if total < span - 1e-9:
        tail_v = phases[-1].v1
        phases.append(Phase(span - total, tail_v, tail_v))
    return tuple(phases)


def _u_turn_phases(spec: SynthSpec, span: float) -> tuple[Phase, ...]:
    """Lateral shift away from the turn, then a tight loop back.

    The shift is sized so the endpoint lands more than d_u on the side opposite
    the turn even after the straight tail drifts it back.
    """
    v = spec.speed
    if v <= 0:
        raise InvalidSpec("u_turn requires positive speed")
    theta = math.radians(abs(spec.angle_deg))
    if math.degrees(theta) < 60.0:
        raise InvalidSpec("u_turn angle below 60 degrees cannot separate from a plain turn")
    left = spec.angle_deg > 0
    phi = math.radians(_U_SHIFT_DEG)
    c_s = 2.0 * phi / (2.0 * (1.0 - math.cos(phi)))  # shift-to-arclength factor of the S-curve
    loop_len = spec.radius * theta
    budget = v * span
    shift = spec.shift
    if shift is None:
        # endpoint lateral: -shift + r*(1 - cos theta) + tail*sin(theta); require <= -(d_u + 3).
        need = 5.0 + 3.0 + spec.radius * (1.0 - math.cos(theta)) + max(0.0, (budget - loop_len)) * max(
            0.0, math.sin(theta)
        )
        shift = need / (1.0 + c_s * max(0.0, math.sin(theta)))
    s_len = c_s * shift
    if s_len + loop_len > budget + 1e-9:
        raise InvalidSpec("u_turn geometry does not fit the window; raise speed or shrink the radius")
    tail = budget - s_len - loop_len
    sign = 1.0 if left else -1.0
    half = s_len / 2.0 / v
    phases = [
        Phase(half, v, v, -sign * _U_SHIFT_DEG),
        Phase(half, v, v, sign * _U_SHIFT_DEG),
        Phase(loop_len / v, v, v, sign * math.degrees(theta)),
    ]
    if tail > 1e-9:
        phases.append(Phase(tail / v, v, v))
    return tuple(phases)


# -- trajectory generation ----------------------------------------------------


@dataclass(frozen=True)
class SynthExpectation:
    fine: FineDirection
    direction: DirectionLabel
    speed: SpeedCategory
    acceleration: AccelCategory
    behavior: BehaviorLabel


# Generated coordinates are rounded to 0.1 um: far below every rule margin,
# and it keeps serialized corpora compact (short float reprs).
_ROUND = 7


def gen_trajectory(
    spec: SynthSpec,
    horizon: HorizonConfig = HorizonConfig(),
    agent_id: str = "ego",
) -> tuple[AgentTrack, SynthExpectation]:
    """Closed-form sampled track plus its analytically expected labels."""
    plan = _PhasePlan(build_phases(spec, horizon))
    dt = horizon.dt
    points = []
    x0, y0, h0, v0, _ = plan.at(0.0)
    for i in range(horizon.t_obs):
        back = (horizon.t_obs - i) * dt
        points.append(
            TrajectoryPoint(
                t_index=i,
                x=round(x0 - back * v0 * math.cos(h0), _ROUND),
                y=round(y0 - back * v0 * math.sin(h0), _ROUND),
                heading=normalize_heading(round(wrap_angle(h0), _ROUND)),
                speed=round(v0, _ROUND),
                valid=True,
            )
        )
    for k in range(horizon.t_pred):
        x, y, h, v, _ = plan.at(k * dt)
        points.append(
            TrajectoryPoint(
                t_index=horizon.t_obs + k,
                x=round(x, _ROUND),
                y=round(y, _ROUND),
                heading=normalize_heading(round(wrap_angle(h), _ROUND)),
                speed=round(v, _ROUND),
                valid=True,
            )
        )
    track = AgentTrack(agent_id=agent_id, agent_kind="vehicle", points=tuple(points))
    return track, expected_labels(plan, horizon)


def expected_labels(
    plan: _PhasePlan,
    horizon: HorizonConfig,
    th: DirectionThresholds = DirectionThresholds(),
    bp: BehaviorParams = BehaviorParams(),
) -> SynthExpectation:
    """Threshold rules applied to the closed-form geometry and speed profile."""
    dt = horizon.dt
    n = horizon.t_pred
    t_last = (n - 1) * dt
    speeds = [plan.at(k * dt)[3] for k in range(n)]
    x0, y0, h0, _, s0 = plan.at(0.0)
    x1, y1, h1, _, s1 = plan.at(t_last)
    path = s1 - s0

    if max(speeds) < th.v_stationary and path < th.d_stationary:
        fine = FineDirection.STATIONARY
    else:
        dtheta = wrap_angle(h1 - h0)
        dx, dy = x1 - x0, y1 - y0
        lat = -math.sin(h0) * dx + math.cos(h0) * dy
        if abs(dtheta) <= math.radians(th.theta_s):
            if abs(lat) > th.d_v:
                fine = FineDirection.STRAIGHT_VEER_LEFT if lat > 0 else FineDirection.STRAIGHT_VEER_RIGHT
            else:
                fine = FineDirection.STRAIGHT
        elif dtheta > 0:
            fine = FineDirection.LEFT_U_TURN if lat < -th.d_u else FineDirection.LEFT_TURN
        else:
            fine = FineDirection.RIGHT_U_TURN if lat > th.d_u else FineDirection.RIGHT_TURN

    mean_kmh = (sum(speeds) / n) * MPS_TO_KMH
    window_s = n * dt
    dv_kmh = (speeds[-1] - speeds[0]) * MPS_TO_KMH * (8.0 / window_s)
    return SynthExpectation(
        fine=fine,
        direction=DEFAULT_COLLAPSE[fine],
        speed=classify_speed(mean_kmh),
        acceleration=classify_acceleration(dv_kmh),
        behavior=_expected_behavior(speeds, dt, bp),
    )


def _expected_behavior(speeds: list[float], dt: float, bp: BehaviorParams) -> BehaviorLabel:
    """Behavior rules on the closed-form speed grid (decision order as documented)."""
    n = len(speeds)
    dwell = max(1, round(bp.dwell_s / dt))
    if all(v < bp.v_stop for v in speeds):
        return BehaviorLabel.NOT_MOVING
    if all(v < bp.v_stop for v in speeds[:dwell]) and any(v >= bp.v_stop for v in speeds):
        return BehaviorLabel.WAITING_THEN_MOVING
    if speeds[0] >= bp.v_stop and all(v < bp.v_stop for v in speeds[n - dwell:]):
        return BehaviorLabel.STOPPING
    mid = n // 2

    def dv(sub: list[float], steps: int) -> float:
        return (sub[-1] - sub[0]) * MPS_TO_KMH * (8.0 / (steps * dt)) if len(sub) >= 2 else 0.0

    band = bp.delta_v_const_kmh
    dv1, dv2 = dv(speeds[:mid], mid), dv(speeds[mid:], n - mid)
    if dv1 < -band and dv2 > band:
        return BehaviorLabel.SLOWING_THEN_SPEEDING
    if dv1 > band and dv2 < -band:
        return BehaviorLabel.SPEEDING_THEN_SLOWING
    total = dv(speeds, n)
    if total <= -band:
        return BehaviorLabel.SLOWING_DOWN
    if total >= band:
        return BehaviorLabel.SPEEDING_UP
    return BehaviorLabel.MAINTAINING_SPEED


# -- convenience spec constructors ---------------------------------------------


def veer_spec(shift: float, speed: float = 8.0, left: bool = True, seed: int = 0) -> SynthSpec:
    """Piecewise S-curve shifting laterally by ``shift`` meters (a veer case)."""
    phi = math.radians(_S_CURVE_DEG)
    s_len = 2.0 * phi * shift / (2.0 * (1.0 - math.cos(phi)))
    sign = 1.0 if left else -1.0
    half = s_len / 2.0 / speed
    return SynthSpec(
        kind="piecewise",
        speed=speed,
        seed=seed,
        phases=(
            Phase(half, speed, speed, sign * _S_CURVE_DEG),
            Phase(half, speed, speed, -sign * _S_CURVE_DEG),
        ),
    )


def stationary_spec(speed: float = 0.0, seed: int = 0) -> SynthSpec:
    """A track that never leaves the stationary bucket."""
    if speed >= 1.8:
        raise InvalidSpec("stationary speeds must stay clearly below the 2 m/s threshold")
    return SynthSpec(kind="straight", speed=speed, seed=seed)


# -- lane-graph fixtures --------------------------------------------------------


@dataclass(frozen=True)
class LaneGraphFixture:
    """Closed-form topology with its documented expected feasible labels.

    ``expected_feasible`` lists the labels produced by candidate samples alone;
    Stationary additionally joins whenever the ego speed is below the cap.
    """

    topology: str
    lanes: tuple[Lane, ...]
    expected_feasible: frozenset[DirectionLabel]


def _lane_from_phases(
    lane_id: str,
    phases: tuple[Phase, ...],
    start: tuple[float, float, float] = (0.0, 0.0, 0.0),
    step_m: float = 2.0,
    successors: tuple[str, ...] = (),
    left_neighbor: Optional[str] = None,
    right_neighbor: Optional[str] = None,
    speed_limit_kmh: Optional[float] = None,
) -> Lane:
    plan = _PhasePlan(phases)
    # Phases here are parameterized at 1 m/s so time equals arc length.
    total = plan.t_end
    n = max(2, int(math.floor(total / step_m)) + 1)
    pts = []
    for i in range(n):
        s = min(i * step_m, total)
        x, y, h, _, _ = plan.at(s)
        pts.append((x, y, h))
    if total - (n - 1) * step_m > 1e-6:
        x, y, h, _, _ = plan.at(total)
        pts.append((x, y, h))
    c, s_ = math.cos(start[2]), math.sin(start[2])
    centerline = tuple(
        CenterlinePoint(
            x=round(start[0] + c * x - s_ * y, _ROUND),
            y=round(start[1] + s_ * x + c * y, _ROUND),
            heading=normalize_heading(round(wrap_angle(h + start[2]), _ROUND)),
        )
        for x, y, h in pts
    )
    return Lane(
        lane_id=lane_id,
        centerline=centerline,
        successors=successors,
        left_neighbor=left_neighbor,
        right_neighbor=right_neighbor,
        speed_limit_kmh=speed_limit_kmh,
    )


def _unit(length: float, angle_deg: float = 0.0) -> Phase:
    """A 1 m/s phase whose duration equals its length (lane construction helper)."""
    return Phase(length, 1.0, 1.0, angle_deg)


def gen_lane_graph(topology: str) -> LaneGraphFixture:
    """Fixed topologies for feasibility tests; ego pose is the origin heading +x."""
    if topology == "single":
        lanes = (_lane_from_phases("lane_a", (_unit(100.0),), step_m=10.0),)
        expected = {DirectionLabel.STRAIGHT}
    elif topology == "t_junction":
        lanes = (
            _lane_from_phases(
                "lane_a", (_unit(30.0),), start=(-10.0, 0.0, 0.0), successors=("lane_left", "lane_right")
            ),
            _lane_from_phases("lane_left", (_unit(10.0 * math.pi / 2.0, 90.0),), start=(20.0, 0.0, 0.0)),
            _lane_from_phases("lane_right", (_unit(10.0 * math.pi / 2.0, -90.0),), start=(20.0, 0.0, 0.0)),
        )
        expected = {DirectionLabel.STRAIGHT, DirectionLabel.LEFT, DirectionLabel.RIGHT}
    elif topology == "parallel_pair":
        lanes = (
            _lane_from_phases("lane_p1", (_unit(100.0),), start=(0.0, 1.5, 0.0), right_neighbor="lane_p2"),
            _lane_from_phases("lane_p2", (_unit(100.0),), start=(0.0, -1.5, 0.0), left_neighbor="lane_p1"),
        )
        expected = {DirectionLabel.STRAIGHT}
    elif topology == "u_loop":
        shift = 10.0
        phi = math.radians(_S_CURVE_DEG)
        s_len = 2.0 * phi * shift / (2.0 * (1.0 - math.cos(phi)))
        s_phases = (_unit(s_len / 2.0, -_S_CURVE_DEG), _unit(s_len / 2.0, _S_CURVE_DEG))
        loop_radius, loop_deg = 1.5, 178.0
        # lane_loop starts where lane_a ends (shifted right by `shift`, heading +x).
        lanes = (
            _lane_from_phases("lane_a", s_phases, successors=("lane_loop",), step_m=1.0),
            _lane_from_phases(
                "lane_loop",
                (_unit(loop_radius * math.radians(loop_deg), loop_deg),),
                start=_PhasePlan(s_phases).end_pose,
                step_m=0.5,
            ),
        )
        expected = {DirectionLabel.STRAIGHT, DirectionLabel.LEFT_U_TURN}
    else:
        raise InvalidSpec(f"unknown topology {topology!r}; expected one of {TOPOLOGIES}")
    return LaneGraphFixture(topology=topology, lanes=lanes, expected_feasible=frozenset(expected))


def gen_scenario(
    spec: SynthSpec,
    scenario_id: str,
    horizon: HorizonConfig = HorizonConfig(),
    topology: Optional[str] = "single",
    scenario_type: Optional[str] = None,
) -> tuple[Scenario, SynthExpectation]:
    """One-agent scenario around a synthetic track, with an optional lane map."""
    track, expected = gen_trajectory(spec, horizon)
    lanes: tuple[Lane, ...] = ()
    if topology is not None:
        lanes = gen_lane_graph(topology).lanes
    scenario = Scenario(
        scenario_id=scenario_id,
        focal_agent_id=track.agent_id,
        agents=(track,),
        lanes=lanes,
        horizon=horizon,
        scenario_type=scenario_type,
    )
    return scenario, expected


# -- prediction sets with controlled match counts -------------------------------

_REDIRECT_ARC = 90.0


def _redirect_spec(gt_label: DirectionLabel) -> SynthSpec:
    """A spec whose direction label provably differs from ``gt_label``."""
    if gt_label in (DirectionLabel.STRAIGHT, DirectionLabel.RIGHT):
        return SynthSpec(kind="arc", radius=15.0, angle_deg=+_REDIRECT_ARC, speed=8.0)  # Left
    if gt_label is DirectionLabel.LEFT:
        return SynthSpec(kind="arc", radius=15.0, angle_deg=-_REDIRECT_ARC, speed=8.0)  # Right
    return SynthSpec(kind="straight", speed=8.0)  # Straight for Stationary / LeftUTurn


def gen_prediction_set(
    gt_track: AgentTrack,
    gt_label: DirectionLabel,
    match_count: int,
    n_modes: int = 6,
    horizon: HorizonConfig = HorizonConfig(),
    perturbation: str = "none",
    seed: int = 0,
):
    """Prediction trajectories with exactly ``match_count`` matching directions.

    Matching modes replay the ground-truth future (optionally with seeded
    sub-centimeter jitter); the rest are redirected through a label-changing
    transform anchored at the same start pose. Returns a
    :class:`~motionkit.metrics.PredictionSet`.
    """
    from .metrics import PredictionSet  # local import avoids a module cycle

    if not 0 <= match_count <= n_modes:
        raise InvalidSpec("match_count must lie in [0, n_modes]")
    if perturbation not in ("none", "jitter"):
        raise InvalidSpec(f"unknown perturbation {perturbation!r}")
    start, stop = horizon.future_window
    gt_xy = gt_track.xy[start:stop]
    redirect_spec = _redirect_spec(gt_label)
    redirect_expected = expected_labels(_PhasePlan(build_phases(redirect_spec, horizon)), horizon)
    if redirect_expected.direction == gt_label:
        raise InvalidSpec("redirect transform failed to change the label")
    redirect_track, _ = gen_trajectory(redirect_spec, horizon)
    base = redirect_track.xy[start:stop]
    # Anchor the redirected path at the GT start pose (labels are rigid-motion invariant).
    p0 = gt_track.points[start]
    c, s = math.cos(p0.heading), math.sin(p0.heading)
    rot = np.array([[c, -s], [s, c]])
    redirect_xy = (base - base[0]) @ rot.T + np.array([p0.x, p0.y])

    rng = np.random.default_rng(seed)
    modes = []
    for j in range(n_modes):
        xy = gt_xy.copy() if j < match_count else redirect_xy.copy()
        if perturbation == "jitter":
            xy = xy + rng.normal(scale=0.02, size=xy.shape)
        modes.append(xy)
    return PredictionSet(
        scenario_id="synthetic",
        trajectories=np.stack(modes),
        scores=np.full(n_modes, 1.0 / n_modes),
    )


# -- suites ----------------------------------------------------------------------


def _comfortably_off_thresholds(
    plan: _PhasePlan,
    horizon: HorizonConfig,
    th: DirectionThresholds = DirectionThresholds(),
    bp: BehaviorParams = BehaviorParams(),
) -> bool:
    """True when every rule quantity sits clearly away from its boundary.

    Used by the default suite's rejection sampling so sampled-point
    discretization (sub-degree heading shifts, chord-vs-arc path length) can
    never flip a label relative to the closed-form oracle.
    """
    dt = horizon.dt
    n = horizon.t_pred
    speeds = [plan.at(k * dt)[3] for k in range(n)]
    x0, y0, h0, _, s0 = plan.at(0.0)
    x1, y1, h1, _, s1 = plan.at((n - 1) * dt)
    path = s1 - s0
    if abs(max(speeds) - th.v_stationary) < 0.3 or abs(path - th.d_stationary) < 0.75:
        return False
    dtheta_deg = abs(math.degrees(wrap_angle(h1 - h0)))
    if abs(dtheta_deg - th.theta_s) < 3.0 or dtheta_deg > 177.0:
        return False
    lat = -math.sin(h0) * (x1 - x0) + math.cos(h0) * (y1 - y0)
    if abs(abs(lat) - th.d_v) < 1.0 or abs(abs(lat) - th.d_u) < 1.0:
        return False
    mean_kmh = sum(speeds) / n * MPS_TO_KMH
    from .attributes import SPEED_THRESHOLDS_KMH, ACCEL_THRESHOLDS_KMH

    if any(abs(mean_kmh - t) < 0.75 for t in SPEED_THRESHOLDS_KMH):
        return False
    window_s = n * dt
    mid = n // 2

    def dv(sub: list[float], steps: int) -> float:
        return (sub[-1] - sub[0]) * MPS_TO_KMH * (8.0 / (steps * dt))

    for value in (dv(speeds, n), dv(speeds[:mid], mid), dv(speeds[mid:], n - mid)):
        if any(abs(abs(value) - t) < 0.75 for t in (*ACCEL_THRESHOLDS_KMH, bp.delta_v_const_kmh)):
            return False
    return True


def default_suite(n: int = 500, seed: int = 7, horizon: HorizonConfig = HorizonConfig()) -> list[SynthSpec]:
    """Parameter sweep over all families, rejection-sampled away from thresholds.

    Families cycle: straights (constant and ramping), veers, left/right turns,
    left/right U-turns, stationary, stops, dwell-then-go. Deterministic for a
    given seed.
    """
    rng = random.Random(seed)
    span = (horizon.t_pred - 1) * horizon.dt

    def u(a: float, b: float) -> float:
        return rng.uniform(a, b)

    def arc(sign: float) -> SynthSpec:
        speed = u(6.0, 14.0)
        radius = u(8.0, 25.0)
        max_deg = min(150.0, math.degrees(0.92 * speed * span / radius))
        return SynthSpec(kind="arc", radius=radius, angle_deg=sign * u(40.0, max_deg), speed=speed)

    makers = [
        lambda: SynthSpec(kind="straight", speed=u(1.0, 36.0)),
        lambda: SynthSpec(kind="straight", speed=u(4.0, 12.0), speed_end=u(13.0, 30.0)),
        lambda: veer_spec(shift=u(6.8, 9.5), speed=u(7.0, 10.0), left=bool(rng.getrandbits(1))),
        lambda: arc(+1.0),
        lambda: arc(-1.0),
        lambda: SynthSpec(kind="u_turn", radius=u(0.8, 1.3), angle_deg=u(163.0, 175.0), speed=u(8.0, 9.5)),
        lambda: SynthSpec(kind="u_turn", radius=u(0.8, 1.3), angle_deg=-u(163.0, 175.0), speed=u(8.0, 9.5)),
        lambda: stationary_spec(speed=u(0.0, 0.35)),
        lambda: SynthSpec(kind="stop", speed=u(8.0, 14.0), rest_s=u(1.2, 2.0)),
        lambda: SynthSpec(kind="dwell_then_go", dwell_s=u(1.5, 2.5), speed_end=u(8.0, 14.0), speed=0.0),
    ]
    specs: list[SynthSpec] = []
    for i in range(n):
        maker = makers[i % len(makers)]
        for _ in range(200):
            spec = maker()
            try:
                plan = _PhasePlan(build_phases(spec, horizon))
            except InvalidSpec:
                continue
            if _comfortably_off_thresholds(plan, horizon):
                specs.append(replace(spec, seed=i))
                break
        else:  # pragma: no cover - parameter ranges are chosen to converge fast
            raise InvalidSpec(f"could not draw a margin-safe spec for family {i % len(makers)}")
    return specs


def build_corpus(
    n: int,
    seed: int = 7,
    horizon: HorizonConfig = HorizonConfig(),
    topology: Optional[str] = "single",
) -> list[tuple[Scenario, SynthExpectation]]:
    """Materialize ``n`` suite scenarios with sidecar expectations."""
    out = []
    for i, spec in enumerate(default_suite(n, seed)):
        scenario, expected = gen_scenario(spec, scenario_id=f"synth-{i:06d}", horizon=horizon, topology=topology)
        out.append((scenario, expected))
    return out


def expectation_to_obj(scenario_id: str, expected: SynthExpectation) -> dict:
    return {
        "scenario_id": scenario_id,
        "fine_direction": expected.fine.value,
        "direction": expected.direction.value,
        "speed": expected.speed.value,
        "acceleration": expected.acceleration.value,
        "behavior": expected.behavior.value,
    }
