"""Scenario data model, JSON(L) schemas, and validation.

One scenario is a single JSON document; corpora are JSON Lines (one scenario
per line). Field names in the schema are normative and documented in the
README. Angles are radians wrapped to (-pi, pi], speeds are m/s except lane
``speed_limit_kmh``, time steps are integers at ``dt`` seconds per step
(default 0.1 s, i.e. 10 Hz).
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field
from typing import Iterable, Iterator, NamedTuple, Optional, TextIO

import numpy as np

from .errors import GeometryError, ReferenceError, SchemaError
from .geometry import normalize_heading

MPS_TO_KMH = 3.6

AGENT_KINDS = frozenset({"vehicle", "pedestrian", "cyclist", "other"})


class TrajectoryPoint(NamedTuple):
    """One trajectory sample. Invalid points have all numeric fields ignored downstream."""

    t_index: int
    x: float
    y: float
    heading: float
    speed: float
    valid: bool


class CenterlinePoint(NamedTuple):
    x: float
    y: float
    heading: float


@dataclass(frozen=True)
class HorizonConfig:
    """Observed/future step layout of a scenario.

    ``t_obs`` observed steps followed by ``t_pred`` future steps; the current
    step is index ``t_obs - 1``. ``t_select`` lists future step indices used by
    the GMM loss (relative to the start of the future window).
    """

    t_obs: int = 11
    t_pred: int = 80
    t_select: tuple[int, ...] = (29, 49, 79)
    dt: float = 0.1

    def __post_init__(self) -> None:
        if self.t_obs < 2:
            raise SchemaError("t_obs must be >= 2 (heading inference needs two points)")
        if self.t_pred < 1:
            raise SchemaError("t_pred must be >= 1")
        if self.dt <= 0:
            raise SchemaError("dt must be positive")
        for t in self.t_select:
            if not 0 <= t < self.t_pred:
                raise SchemaError(f"t_select entry {t} outside [0, {self.t_pred})")
        object.__setattr__(self, "t_select", tuple(int(t) for t in self.t_select))

    @property
    def n_steps(self) -> int:
        return self.t_obs + self.t_pred

    @property
    def current_index(self) -> int:
        return self.t_obs - 1

    @property
    def future_window(self) -> tuple[int, int]:
        """Half-open [start, stop) index range of the future steps."""
        return self.t_obs, self.t_obs + self.t_pred

    @property
    def future_duration_s(self) -> float:
        return self.t_pred * self.dt


@dataclass(frozen=True)
class AgentTrack:
    """An agent's full track (observed + future), ordered by t_index."""

    agent_id: str
    agent_kind: str
    points: tuple[TrajectoryPoint, ...]

    def __post_init__(self) -> None:
        if self.agent_kind not in AGENT_KINDS:
            raise SchemaError(f"unknown agent_kind {self.agent_kind!r}")
        if len(self.points) < 2:
            raise GeometryError(f"agent {self.agent_id}: track needs >= 2 points")
        t = [p.t_index for p in self.points]
        if any(b - a != 1 for a, b in zip(t, t[1:])):
            raise GeometryError(f"agent {self.agent_id}: t_index must increase by exactly 1")
        object.__setattr__(self, "_xy", np.array([(p.x, p.y) for p in self.points], dtype=float))
        object.__setattr__(self, "_speeds", np.array([p.speed for p in self.points], dtype=float))
        object.__setattr__(self, "_headings", np.array([p.heading for p in self.points], dtype=float))
        object.__setattr__(self, "_valid", np.array([p.valid for p in self.points], dtype=bool))

    @property
    def xy(self) -> np.ndarray:
        return self._xy  # type: ignore[attr-defined]

    @property
    def speeds(self) -> np.ndarray:
        return self._speeds  # type: ignore[attr-defined]

    @property
    def headings(self) -> np.ndarray:
        return self._headings  # type: ignore[attr-defined]

    @property
    def valid_mask(self) -> np.ndarray:
        return self._valid  # type: ignore[attr-defined]


@dataclass(frozen=True)
class Lane:
    """One lane centerline plus its graph wiring (successors, side neighbors)."""

    lane_id: str
    centerline: tuple[CenterlinePoint, ...]
    speed_limit_kmh: Optional[float] = None
    successors: tuple[str, ...] = ()
    left_neighbor: Optional[str] = None
    right_neighbor: Optional[str] = None

    def __post_init__(self) -> None:
        if len(self.centerline) < 2:
            raise GeometryError(f"lane {self.lane_id}: centerline needs >= 2 points")
        xy = np.array([(p.x, p.y) for p in self.centerline], dtype=float)
        seg = np.linalg.norm(np.diff(xy, axis=0), axis=1)
        if np.any(seg <= 0.0):
            raise GeometryError(f"lane {self.lane_id}: consecutive centerline points must be distinct")
        object.__setattr__(self, "_xy", xy)

    @property
    def xy(self) -> np.ndarray:
        return self._xy  # type: ignore[attr-defined]


@dataclass(frozen=True)
class Scenario:
    scenario_id: str
    focal_agent_id: str
    agents: tuple[AgentTrack, ...]
    lanes: tuple[Lane, ...]
    horizon: HorizonConfig = field(default_factory=HorizonConfig)
    scenario_type: Optional[str] = None

    def __post_init__(self) -> None:
        agent_ids = [a.agent_id for a in self.agents]
        if len(set(agent_ids)) != len(agent_ids):
            raise ReferenceError(f"scenario {self.scenario_id}: duplicate agent_id")
        lane_ids = [l.lane_id for l in self.lanes]
        if len(set(lane_ids)) != len(lane_ids):
            raise ReferenceError(f"scenario {self.scenario_id}: duplicate lane_id")
        if self.focal_agent_id not in set(agent_ids):
            raise ReferenceError(
                f"scenario {self.scenario_id}: focal_agent_id {self.focal_agent_id!r} not among agents"
            )
        lane_set = set(lane_ids)
        for lane in self.lanes:
            for ref in (*lane.successors, lane.left_neighbor, lane.right_neighbor):
                if ref is not None and ref not in lane_set:
                    raise ReferenceError(
                        f"scenario {self.scenario_id}: lane {lane.lane_id} references unknown lane {ref!r}"
                    )
        n = self.horizon.n_steps
        for a in self.agents:
            if len(a.points) != n:
                raise SchemaError(
                    f"scenario {self.scenario_id}: agent {a.agent_id} has {len(a.points)} points, "
                    f"horizon requires {n}"
                )

    @property
    def focal_track(self) -> AgentTrack:
        for a in self.agents:
            if a.agent_id == self.focal_agent_id:
                return a
        raise ReferenceError(self.focal_agent_id)  # unreachable after validation

    def lane_by_id(self, lane_id: str) -> Lane:
        for lane in self.lanes:
            if lane.lane_id == lane_id:
                return lane
        raise ReferenceError(f"unknown lane {lane_id!r}")


# ---------------------------------------------------------------------------
# JSON parsing / serialization
# ---------------------------------------------------------------------------


def _require(obj: dict, key: str, kind, where: str):
    if key not in obj:
        raise SchemaError(f"{where}: missing required field {key!r}")
    value = obj[key]
    if kind is float:
        if isinstance(value, bool) or not isinstance(value, (int, float)):
            raise SchemaError(f"{where}: field {key!r} must be a number")
        return float(value)
    if kind is int:
        if isinstance(value, bool) or not isinstance(value, int):
            raise SchemaError(f"{where}: field {key!r} must be an integer")
        return value
    if not isinstance(value, kind):
        raise SchemaError(f"{where}: field {key!r} has wrong type {type(value).__name__}")
    return value


def _reject_extra(obj: dict, allowed: set[str], where: str) -> None:
    extra = set(obj) - allowed
    if extra:
        raise SchemaError(f"{where}: unexpected field(s) {sorted(extra)}")


def _parse_point(obj: dict, where: str) -> TrajectoryPoint:
    if not isinstance(obj, dict):
        raise SchemaError(f"{where}: point must be an object")
    _reject_extra(obj, {"t", "x", "y", "heading", "speed", "valid"}, where)
    speed = _require(obj, "speed", float, where)
    if speed < 0:
        raise SchemaError(f"{where}: speed must be >= 0")
    valid = _require(obj, "valid", bool, where)
    return TrajectoryPoint(
        t_index=_require(obj, "t", int, where),
        x=_require(obj, "x", float, where),
        y=_require(obj, "y", float, where),
        heading=normalize_heading(_require(obj, "heading", float, where)),
        speed=speed,
        valid=valid,
    )


def _parse_agent(obj: dict, where: str) -> AgentTrack:
    if not isinstance(obj, dict):
        raise SchemaError(f"{where}: agent must be an object")
    _reject_extra(obj, {"agent_id", "agent_kind", "points"}, where)
    agent_id = _require(obj, "agent_id", str, where)
    points_raw = _require(obj, "points", list, where)
    points = tuple(_parse_point(p, f"{where}.points[{i}]") for i, p in enumerate(points_raw))
    return AgentTrack(agent_id=agent_id, agent_kind=_require(obj, "agent_kind", str, where), points=points)


def _parse_lane(obj: dict, where: str) -> Lane:
    if not isinstance(obj, dict):
        raise SchemaError(f"{where}: lane must be an object")
    _reject_extra(
        obj,
        {"lane_id", "speed_limit_kmh", "successors", "left_neighbor", "right_neighbor", "centerline"},
        where,
    )
    lane_id = _require(obj, "lane_id", str, where)
    centerline = []
    for i, p in enumerate(_require(obj, "centerline", list, where)):
        pw = f"{where}.centerline[{i}]"
        if not isinstance(p, dict):
            raise SchemaError(f"{pw}: must be an object")
        _reject_extra(p, {"x", "y", "heading"}, pw)
        centerline.append(
            CenterlinePoint(
                x=_require(p, "x", float, pw),
                y=_require(p, "y", float, pw),
                heading=normalize_heading(_require(p, "heading", float, pw)),
            )
        )
    limit = obj.get("speed_limit_kmh")
    if limit is not None:
        if isinstance(limit, bool) or not isinstance(limit, (int, float)):
            raise SchemaError(f"{where}: speed_limit_kmh must be a number")
        limit = float(limit)
        if limit < 0:
            raise SchemaError(f"{where}: speed_limit_kmh must be >= 0")
    successors = obj.get("successors", [])
    if not isinstance(successors, list) or not all(isinstance(s, str) for s in successors):
        raise SchemaError(f"{where}: successors must be a list of lane ids")

    def _opt_str(key: str) -> Optional[str]:
        value = obj.get(key)
        if value is not None and not isinstance(value, str):
            raise SchemaError(f"{where}: {key} must be a string or null")
        return value

    return Lane(
        lane_id=lane_id,
        centerline=tuple(centerline),
        speed_limit_kmh=limit,
        successors=tuple(successors),
        left_neighbor=_opt_str("left_neighbor"),
        right_neighbor=_opt_str("right_neighbor"),
    )


def parse_scenario(text: str | bytes) -> Scenario:
    """Parse one scenario JSON document and check every model invariant.

    Raises :class:`SchemaError` on structural problems, :class:`ReferenceError`
    on dangling ids, :class:`GeometryError` on non-monotonic t_index or
    degenerate centerlines. Headings are normalized to (-pi, pi] on input.
    """
    if isinstance(text, bytes):
        text = text.decode("utf-8")
    try:
        obj = json.loads(text)
    except json.JSONDecodeError as exc:
        raise SchemaError(f"invalid JSON: {exc}") from exc
    if not isinstance(obj, dict):
        raise SchemaError("scenario document must be a JSON object")
    _reject_extra(
        obj, {"scenario_id", "focal_agent_id", "scenario_type", "horizon", "agents", "lanes"}, "scenario"
    )
    scenario_id = _require(obj, "scenario_id", str, "scenario")
    where = f"scenario {scenario_id}"
    horizon_raw = _require(obj, "horizon", dict, where)
    _reject_extra(horizon_raw, {"t_obs", "t_pred", "t_select", "dt"}, f"{where}.horizon")
    t_select = _require(horizon_raw, "t_select", list, f"{where}.horizon")
    if not all(isinstance(t, int) and not isinstance(t, bool) for t in t_select):
        raise SchemaError(f"{where}.horizon: t_select must be a list of integers")
    horizon = HorizonConfig(
        t_obs=_require(horizon_raw, "t_obs", int, f"{where}.horizon"),
        t_pred=_require(horizon_raw, "t_pred", int, f"{where}.horizon"),
        t_select=tuple(t_select),
        dt=_require(horizon_raw, "dt", float, f"{where}.horizon"),
    )
    scenario_type = obj.get("scenario_type")
    if scenario_type is not None and not isinstance(scenario_type, str):
        raise SchemaError(f"{where}: scenario_type must be a string or null")
    agents = tuple(
        _parse_agent(a, f"{where}.agents[{i}]") for i, a in enumerate(_require(obj, "agents", list, where))
    )
    lanes = tuple(
        _parse_lane(l, f"{where}.lanes[{i}]") for i, l in enumerate(_require(obj, "lanes", list, where))
    )
    return Scenario(
        scenario_id=scenario_id,
        focal_agent_id=_require(obj, "focal_agent_id", str, where),
        agents=agents,
        lanes=lanes,
        horizon=horizon,
        scenario_type=scenario_type,
    )


def scenario_to_obj(s: Scenario) -> dict:
    obj: dict = {
        "scenario_id": s.scenario_id,
        "focal_agent_id": s.focal_agent_id,
        "horizon": {
            "t_obs": s.horizon.t_obs,
            "t_pred": s.horizon.t_pred,
            "t_select": list(s.horizon.t_select),
            "dt": s.horizon.dt,
        },
        "agents": [
            {
                "agent_id": a.agent_id,
                "agent_kind": a.agent_kind,
                "points": [
                    {"t": p.t_index, "x": p.x, "y": p.y, "heading": p.heading, "speed": p.speed, "valid": p.valid}
                    for p in a.points
                ],
            }
            for a in s.agents
        ],
        "lanes": [],
    }
    if s.scenario_type is not None:
        obj["scenario_type"] = s.scenario_type
    for lane in s.lanes:
        lane_obj: dict = {
            "lane_id": lane.lane_id,
            "successors": list(lane.successors),
            "centerline": [{"x": p.x, "y": p.y, "heading": p.heading} for p in lane.centerline],
        }
        if lane.speed_limit_kmh is not None:
            lane_obj["speed_limit_kmh"] = lane.speed_limit_kmh
        if lane.left_neighbor is not None:
            lane_obj["left_neighbor"] = lane.left_neighbor
        if lane.right_neighbor is not None:
            lane_obj["right_neighbor"] = lane.right_neighbor
        obj["lanes"].append(lane_obj)
    return obj


def serialize_scenario(s: Scenario) -> str:
    """One-line JSON encoding such that ``parse_scenario(serialize_scenario(s)) == s``."""
    return json.dumps(scenario_to_obj(s), sort_keys=True, separators=(",", ":"))


def iter_scenarios(fp: TextIO) -> Iterator[tuple[int, Scenario]]:
    """Yield (1-based line number, Scenario) from a JSONL stream, skipping blank lines.

    Parse errors are re-raised with the line number prefixed to the message.
    """
    for lineno, line in enumerate(fp, start=1):
        line = line.strip()
        if not line:
            continue
        try:
            yield lineno, parse_scenario(line)
        except (SchemaError, GeometryError) as exc:
            raise type(exc)(f"line {lineno}: {exc}") from exc


def write_scenarios(fp: TextIO, scenarios: Iterable[Scenario]) -> int:
    n = 0
    for s in scenarios:
        fp.write(serialize_scenario(s))
        fp.write("\n")
        n += 1
    return n
