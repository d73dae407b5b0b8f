"""Road networks, vehicles, hazards, and roadside units.

All geometry is planar, in meters. Lanes are 1-D arc-length spaces with a
2-D polyline embedding; there are no lane changes. Two scenario templates
exist: a straight two-lane expressway and a four-approach intersection with
a single conflict zone.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field

from .errors import ScenarioError

Point = tuple[float, float]

EXPRESSWAY = "expressway"
INTERSECTION = "intersection"

# Roadside-unit candidate positions, as arc offsets (m) along the hazard-side
# travel axis. Labels 1..6 are ordered entry -> center -> exit.
EXPRESSWAY_RSU_OFFSETS = (50.0, 150.0, 300.0, 500.0, 700.0, 900.0)
INTERSECTION_RSU_OFFSETS = (50.0, 150.0, 250.0, 330.0, 400.0, 480.0)

_ARC_TOL = 1e-6


@dataclass(frozen=True)
class GeometryParams:
    """Concrete dimensions of the scenario templates (meters)."""

    lane_length: float = 1000.0     # expressway lane length
    lane_spacing: float = 3.5       # lateral distance between parallel lanes
    approach_length: float = 400.0  # intersection approach, origin to zone center
    exit_length: float = 400.0      # intersection exit lane length
    zone_size: float = 20.0         # conflict zone edge length
    rsu_side_offset: float = 2.0    # lateral offset of RSU from lane centerline

    def validate(self) -> None:
        for name in ("lane_length", "lane_spacing", "approach_length",
                     "exit_length", "zone_size", "rsu_side_offset"):
            if getattr(self, name) <= 0:
                raise ScenarioError(f"geometry.{name} must be positive (got {getattr(self, name)})")


@dataclass(frozen=True)
class LanePosition:
    lane_id: str
    offset: float  # meters along the lane centerline from the lane origin


@dataclass(frozen=True)
class Lane:
    id: str
    length: float
    direction: Point                 # unit heading of travel
    polyline: tuple[Point, ...]      # centerline embedding
    successors: tuple[str, ...] = ()

    def __post_init__(self):
        arc = polyline_length(self.polyline)
        if abs(arc - self.length) > _ARC_TOL:
            raise ScenarioError(
                f"lane {self.id}: polyline arc length {arc} differs from length {self.length}")
        if self.id in self.successors:
            raise ScenarioError(f"lane {self.id}: successor self-loop")


@dataclass
class VehicleState:
    """Kinematic state plus route intent; advanced by the car-following step."""

    id: int
    pos: LanePosition
    speed: float                     # m/s, never negative
    accel: float                     # m/s^2, clamped to [-9, +5]
    route: tuple[str, ...]           # ordered lane ids, starts with pos.lane_id
    spawn_time: float
    active_caution: "CautionCommand | None" = None


@dataclass(frozen=True)
class HazardEvent:
    kind: str                        # e.g. "occluded_pedestrian"
    position: Point
    affected_lanes: frozenset[str]
    active_interval: tuple[float, float]  # [start_s, end_s)

    def __post_init__(self):
        start, end = self.active_interval
        if not start < end:
            raise ScenarioError(f"hazard interval must satisfy start < end (got {start}, {end})")
        if not self.affected_lanes:
            raise ScenarioError("hazard must affect at least one lane")

    def active_at(self, now: float) -> bool:
        start, end = self.active_interval
        return start <= now < end


@dataclass(frozen=True)
class RsuNode:
    position: Point
    location_label: int              # 1..6, indexes RoadNetwork.rsu_locations
    broadcast_period: float = 0.1    # s
    camera_range: float = 75.0       # m, hazard detection radius

    def __post_init__(self):
        if self.broadcast_period <= 0:
            raise ScenarioError("broadcast_period must be positive")
        if self.camera_range <= 0:
            raise ScenarioError("camera_range must be positive")


@dataclass(frozen=True)
class RoadNetwork:
    scenario_kind: str
    lanes: dict[str, Lane]
    conflict_zone: tuple[Point, ...] | None
    rsu_locations: tuple[Point, ...]           # exactly 6, labels 1..6
    spawn_lanes: tuple[str, ...]               # lanes on which vehicles may enter
    routes: dict[str, tuple[str, ...]] = field(default_factory=dict)
    # straight-through route per spawn lane

    def __post_init__(self):
        if len(self.rsu_locations) != 6:
            raise ScenarioError("network must carry exactly 6 RSU candidate locations")
        if self.scenario_kind == EXPRESSWAY and self.conflict_zone is not None:
            raise ScenarioError("expressway network must not have a conflict zone")
        if self.scenario_kind == INTERSECTION and self.conflict_zone is None:
            raise ScenarioError("intersection network requires a conflict zone")
        for lane in self.lanes.values():
            for succ in lane.successors:
                if succ not in self.lanes:
                    raise ScenarioError(f"lane {lane.id}: unknown successor {succ}")

    def lane(self, lane_id: str) -> Lane:
        try:
            return self.lanes[lane_id]
        except KeyError:
            raise ScenarioError(f"unknown lane {lane_id!r}") from None

    def rsu_point(self, label: int) -> Point:
        if not 1 <= label <= 6:
            raise ScenarioError(f"RSU location label must be 1..6 (got {label})")
        return self.rsu_locations[label - 1]


def make_rsu(network: RoadNetwork, label: int, broadcast_period: float = 0.1,
             camera_range: float = 75.0) -> RsuNode:
    """RSU at one of the network's labeled candidate points."""
    return RsuNode(position=network.rsu_point(label), location_label=label,
                   broadcast_period=broadcast_period, camera_range=camera_range)


# ---------------------------------------------------------------------------
# polyline / route geometry
# ---------------------------------------------------------------------------

def distance(p: Point, q: Point) -> float:
    return math.hypot(p[0] - q[0], p[1] - q[1])


def polyline_length(poly: tuple[Point, ...]) -> float:
    return sum(distance(poly[i], poly[i + 1]) for i in range(len(poly) - 1))


def polyline_point(poly: tuple[Point, ...], arc: float) -> Point:
    """Point at the given arc length, linearly interpolated between vertices."""
    if arc < 0:
        raise ScenarioError(f"arc offset must be non-negative (got {arc})")
    remaining = arc
    for i in range(len(poly) - 1):
        a, b = poly[i], poly[i + 1]
        seg = distance(a, b)
        if remaining <= seg or i == len(poly) - 2:
            if remaining > seg + _ARC_TOL:
                raise ScenarioError(f"arc offset {arc} exceeds polyline length")
            t = remaining / seg if seg > 0 else 0.0
            return (a[0] + t * (b[0] - a[0]), a[1] + t * (b[1] - a[1]))
        remaining -= seg
    return poly[-1]


def polyline_project(poly: tuple[Point, ...], p: Point) -> tuple[float, float]:
    """Project a point onto a polyline; returns (arc offset, lateral distance)."""
    best_arc, best_dist = 0.0, float("inf")
    acc = 0.0
    for i in range(len(poly) - 1):
        a, b = poly[i], poly[i + 1]
        ab = (b[0] - a[0], b[1] - a[1])
        seg2 = ab[0] * ab[0] + ab[1] * ab[1]
        if seg2 == 0:
            continue
        t = ((p[0] - a[0]) * ab[0] + (p[1] - a[1]) * ab[1]) / seg2
        t = min(1.0, max(0.0, t))
        q = (a[0] + t * ab[0], a[1] + t * ab[1])
        d = distance(p, q)
        if d < best_dist:
            best_dist = d
            best_arc = acc + t * math.sqrt(seg2)
        acc += math.sqrt(seg2)
    return best_arc, best_dist


def embed(pos: LanePosition, network: RoadNetwork) -> Point:
    """2-D point at arc length pos.offset along the lane centerline."""
    lane = network.lane(pos.lane_id)
    if pos.offset < 0 or pos.offset > lane.length + _ARC_TOL:
        raise ScenarioError(
            f"offset {pos.offset} outside lane {pos.lane_id} of length {lane.length}")
    return polyline_point(lane.polyline, min(pos.offset, lane.length))


def route_length(network: RoadNetwork, route: tuple[str, ...]) -> float:
    return sum(network.lane(lid).length for lid in route)


def route_offset(network: RoadNetwork, route: tuple[str, ...], pos: LanePosition) -> float:
    """Arc offset of a lane position along the whole route chain."""
    acc = 0.0
    for lid in route:
        if lid == pos.lane_id:
            return acc + pos.offset
        acc += network.lane(lid).length
    raise ScenarioError(f"lane {pos.lane_id!r} is not on route {route}")


def locate_on_route(network: RoadNetwork, route: tuple[str, ...], s: float) -> LanePosition:
    """Map a route arc offset back to a lane position (clamped to the route end)."""
    acc = 0.0
    for lid in route:
        length = network.lane(lid).length
        if s <= acc + length:
            return LanePosition(lid, max(0.0, s - acc))
        acc += length
    return LanePosition(route[-1], network.lane(route[-1]).length)


def route_point(network: RoadNetwork, route: tuple[str, ...], s: float) -> Point:
    return embed(locate_on_route(network, route, s), network)


def route_project(network: RoadNetwork, route: tuple[str, ...], p: Point) -> tuple[float, float]:
    """Project a point onto a route chain; returns (chain arc offset, lateral distance)."""
    best_s, best_dist = 0.0, float("inf")
    acc = 0.0
    for lid in route:
        lane = network.lane(lid)
        arc, d = polyline_project(lane.polyline, p)
        if d < best_dist:
            best_dist = d
            best_s = acc + arc
        acc += lane.length
    return best_s, best_dist


def predicted_path(v: VehicleState, horizon: float, network: RoadNetwork,
                   sample_dt: float = 0.5) -> list[Point]:
    """Future positions sampled at constant current speed along the route.

    Samples every sample_dt seconds from now to the horizon, truncated where
    the route ends. A stationary vehicle yields only its current point.
    """
    if horizon <= 0:
        raise ScenarioError(f"prediction horizon must be positive (got {horizon})")
    s0 = route_offset(network, v.route, v.pos)
    if v.speed <= 0:
        return [route_point(network, v.route, s0)]
    total = route_length(network, v.route)
    n = int(math.floor(horizon / sample_dt + 1e-9))
    points = []
    for k in range(n + 1):
        s = s0 + v.speed * k * sample_dt
        if s > total + _ARC_TOL:
            break
        points.append(route_point(network, v.route, s))
    return points


# ---------------------------------------------------------------------------
# scenario templates
# ---------------------------------------------------------------------------

def build_network(kind: str, geometry: GeometryParams | None = None) -> RoadNetwork:
    """Construct one of the two scenario networks.

    expressway: two parallel same-direction lanes ("1" hazard side, "2"),
    RSU points at offsets {50,150,300,500,700,900} on the roadside of lane 1.

    intersection: approaches a,b (east-west) and c,d (north-south), each
    continuing through an exit lane (e.g. c -> c_out) past a square conflict
    zone centered where the approaches meet; RSU points along the c approach
    axis at offsets {50,150,250,330,400,480}, with 400 at the zone center.
    """
    geometry = geometry or GeometryParams()
    geometry.validate()
    if kind == EXPRESSWAY:
        return _build_expressway(geometry)
    if kind == INTERSECTION:
        return _build_intersection(geometry)
    raise ScenarioError(f"unknown scenario kind {kind!r}")


def _build_expressway(g: GeometryParams) -> RoadNetwork:
    length, spacing = g.lane_length, g.lane_spacing
    lanes = {
        "1": Lane("1", length, (1.0, 0.0), ((0.0, 0.0), (length, 0.0))),
        "2": Lane("2", length, (1.0, 0.0), ((0.0, spacing), (length, spacing))),
    }
    for off in EXPRESSWAY_RSU_OFFSETS:
        if off > length:
            raise ScenarioError(f"lane_length {length} is shorter than RSU offset {off}")
    rsu_points = tuple((off, -g.rsu_side_offset) for off in EXPRESSWAY_RSU_OFFSETS)
    return RoadNetwork(
        scenario_kind=EXPRESSWAY,
        lanes=lanes,
        conflict_zone=None,
        rsu_locations=rsu_points,
        spawn_lanes=("1", "2"),
        routes={"1": ("1",), "2": ("2",)},
    )


def _build_intersection(g: GeometryParams) -> RoadNetwork:
    ap, ex = g.approach_length, g.exit_length
    half = g.zone_size / 2.0
    w = g.lane_spacing / 2.0
    if ap <= half:
        raise ScenarioError("approach_length must exceed half the zone size")
    for off in INTERSECTION_RSU_OFFSETS:
        if off > ap + ex:
            raise ScenarioError(f"approach+exit too short for RSU offset {off}")

    lanes = {
        # north-south pair: approaches end at the zone center line
        "c": Lane("c", ap, (0.0, 1.0), ((-w, -ap), (-w, 0.0)), successors=("c_out",)),
        "c_out": Lane("c_out", ex, (0.0, 1.0), ((-w, 0.0), (-w, ex))),
        "d": Lane("d", ap, (0.0, 1.0), ((w, -ap), (w, 0.0)), successors=("d_out",)),
        "d_out": Lane("d_out", ex, (0.0, 1.0), ((w, 0.0), (w, ex))),
        # east-west pair: a eastbound, b westbound
        "a": Lane("a", ap, (1.0, 0.0), ((-ap, -w), (0.0, -w)), successors=("a_out",)),
        "a_out": Lane("a_out", ex, (1.0, 0.0), ((0.0, -w), (ex, -w))),
        "b": Lane("b", ap, (-1.0, 0.0), ((ap, w), (0.0, w)), successors=("b_out",)),
        "b_out": Lane("b_out", ex, (-1.0, 0.0), ((0.0, w), (-ex, w))),
    }
    zone = ((-half, -half), (half, -half), (half, half), (-half, half))
    # RSU points to the west of the c-approach axis
    rsu_points = []
    for off in INTERSECTION_RSU_OFFSETS:
        if off <= ap:
            p = polyline_point(lanes["c"].polyline, off)
        else:
            p = polyline_point(lanes["c_out"].polyline, off - ap)
        rsu_points.append((p[0] - g.rsu_side_offset, p[1]))
    return RoadNetwork(
        scenario_kind=INTERSECTION,
        lanes=lanes,
        conflict_zone=zone,
        rsu_locations=tuple(rsu_points),
        spawn_lanes=("a", "b", "c", "d"),
        routes={
            "a": ("a", "a_out"),
            "b": ("b", "b_out"),
            "c": ("c", "c_out"),
            "d": ("d", "d_out"),
        },
    )


# ---------------------------------------------------------------------------
# conflict zone geometry
# ---------------------------------------------------------------------------

def point_in_polygon(p: Point, polygon: tuple[Point, ...]) -> bool:
    """Containment test for a convex, counter-clockwise polygon (inclusive)."""
    n = len(polygon)
    for i in range(n):
        a, b = polygon[i], polygon[(i + 1) % n]
        cross = (b[0] - a[0]) * (p[1] - a[1]) - (b[1] - a[1]) * (p[0] - a[0])
        if cross < -1e-12:
            return False
    return True


def _clip_segment(a: Point, b: Point, polygon: tuple[Point, ...]) -> tuple[float, float] | None:
    """Parametric [t0,t1] of segment a->b inside a convex CCW polygon."""
    t0, t1 = 0.0, 1.0
    d = (b[0] - a[0], b[1] - a[1])
    n = len(polygon)
    for i in range(n):
        p, q = polygon[i], polygon[(i + 1) % n]
        # inward normal of edge p->q for CCW polygon
        nx, ny = -(q[1] - p[1]), q[0] - p[0]
        denom = nx * d[0] + ny * d[1]
        num = nx * (p[0] - a[0]) + ny * (p[1] - a[1])
        if abs(denom) < 1e-15:
            if num > 0:
                return None  # parallel and outside
            continue
        t = num / denom
        if denom > 0:
            t0 = max(t0, t)
        else:
            t1 = min(t1, t)
        if t0 > t1:
            return None
    return t0, t1


def route_zone_interval(network: RoadNetwork, route: tuple[str, ...],
                        polygon: tuple[Point, ...]) -> tuple[float, float] | None:
    """Chain arc interval [s_in, s_out] over which the route lies inside the zone."""
    s_in, s_out = None, None
    acc = 0.0
    for lid in route:
        lane = network.lane(lid)
        poly = lane.polyline
        seg_start = 0.0
        for i in range(len(poly) - 1):
            a, b = poly[i], poly[i + 1]
            seg = distance(a, b)
            clipped = _clip_segment(a, b, polygon)
            if clipped is not None:
                lo = acc + seg_start + clipped[0] * seg
                hi = acc + seg_start + clipped[1] * seg
                s_in = lo if s_in is None else min(s_in, lo)
                s_out = hi if s_out is None else max(s_out, hi)
            seg_start += seg
        acc += lane.length
    if s_in is None:
        return None
    return s_in, s_out


def routes_cross(network: RoadNetwork, r1: tuple[str, ...], r2: tuple[str, ...]) -> bool:
    """True when the two route polylines geometrically intersect."""
    segs1 = _route_segments(network, r1)
    segs2 = _route_segments(network, r2)
    for a1, b1 in segs1:
        for a2, b2 in segs2:
            if _segments_intersect(a1, b1, a2, b2):
                return True
    return False


def _route_segments(network, route):
    segs = []
    for lid in route:
        poly = network.lane(lid).polyline
        for i in range(len(poly) - 1):
            segs.append((poly[i], poly[i + 1]))
    return segs


def _segments_intersect(p1, p2, p3, p4) -> bool:
    def orient(a, b, c):
        v = (b[0] - a[0]) * (c[1] - a[1]) - (b[1] - a[1]) * (c[0] - a[0])
        return 0 if abs(v) < 1e-12 else (1 if v > 0 else -1)

    o1, o2 = orient(p1, p2, p3), orient(p1, p2, p4)
    o3, o4 = orient(p3, p4, p1), orient(p3, p4, p2)
    return o1 != o2 and o3 != o4
