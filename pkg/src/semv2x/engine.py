"""Tick loop, vehicle spawning, intersection yielding, metrics, and the
RSU-location x density sweep.

A run is a pure function of its ScenarioConfig: all randomness comes from
streams derived from (seed, purpose), so identical configs give identical
metrics, serial and parallel sweeps agree bit-for-bit, and traditional and
semantic runs of the same seed share the same arrival process.
"""
from __future__ import annotations

import math
import random
import statistics
from collections import deque
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, replace

from .channel import BroadcastEvent, due_broadcasts, try_deliver
from .config import ScenarioConfig
from .errors import CollisionError, ScenarioError, SimulationError
from .idm import IdmParams, idm_acceleration, step
from .messages import (LEVEL_HIGH, LinkQualityLevel, SceneDescription, SemanticElement,
                       TraditionalAlert, encode_semantic, query_link_quality)
from .policy import SEMANTIC, TRADITIONAL, effective_desired_speed, on_receive
from .world import (EXPRESSWAY, HazardEvent, LanePosition, Point, RoadNetwork, RsuNode,
                    VehicleState, build_network, distance, embed, locate_on_route, make_rsu,
                    point_in_polygon, route_length, route_offset, route_point, route_project,
                    route_zone_interval, routes_cross)


@dataclass(frozen=True)
class TickStats:
    time_s: float
    mean_speed_mps: float   # over all active vehicles; 0 when none
    cautioned: int
    active: int


@dataclass(frozen=True)
class MetricsRecord:
    ticks: tuple[TickStats, ...]
    weighted_mean_speed_mps: float   # vehicle-seconds-weighted, inside the window
    caution_activations: int
    completed_trips: int
    collision: bool
    window_vehicle_seconds: float


@dataclass(frozen=True)
class CellStats:
    mean_gap: float | None
    stddev: float | None
    replicates: int
    error: str | None = None


@dataclass(frozen=True)
class SweepResult:
    cells: dict[tuple[int, float], CellStats]   # (rsu_location_label, spawn_rate)
    locations: tuple[int, ...]
    spawn_rates: tuple[float, ...]
    seeds: tuple[int, ...]
    scenario_kind: str


# ---------------------------------------------------------------------------
# hazard staging
# ---------------------------------------------------------------------------

def resolve_hazard(cfg: ScenarioConfig, network: RoadNetwork) -> HazardEvent | None:
    """Materialize the configured hazard against the network and RSU choice."""
    if cfg.hazard is None:
        return None
    h = cfg.hazard
    lane = h.lane if h.lane is not None else ("1" if cfg.scenario_kind == EXPRESSWAY else "c")
    if lane not in network.routes:
        raise ScenarioError(f"hazard.lane must be a spawn lane (got {lane!r})")
    chain = network.routes[lane]
    start = h.start_s if h.start_s is not None else cfg.warmup_s
    end = h.end_s if h.end_s is not None else cfg.duration_s
    if h.position is not None:
        pos = (float(h.position[0]), float(h.position[1]))
    else:
        # pedestrian standing side_offset off the lane, abeam the RSU
        rsu_pt = network.rsu_point(cfg.rsu.location_label)
        s, lat = route_project(network, chain, rsu_pt)
        p_lane = route_point(network, chain, s)
        if lat < 1e-9:
            raise ScenarioError("RSU sits on the hazard lane centerline; "
                                "cannot derive a roadside hazard position")
        nx = (rsu_pt[0] - p_lane[0]) / lat
        ny = (rsu_pt[1] - p_lane[1]) / lat
        pos = (p_lane[0] + h.side_offset_m * nx, p_lane[1] + h.side_offset_m * ny)
    return HazardEvent(kind=h.kind, position=pos, affected_lanes=frozenset(chain),
                       active_interval=(start, end))


def hazard_route(network: RoadNetwork, hazard: HazardEvent) -> tuple[str, ...]:
    for head in sorted(network.routes):
        if set(network.routes[head]) & hazard.affected_lanes:
            return network.routes[head]
    raise ScenarioError("hazard affects no route of the network")


def observe_scene(rsu: RsuNode, hazard: HazardEvent, network: RoadNetwork) -> SceneDescription:
    """Symbolic ground-truth scene around the hazard, as the RSU camera sees it.

    The occluded pedestrian carries the affected lanes; the parked vehicle
    occluding it and the road surface are context elements that threaten
    nothing themselves.
    """
    chain = hazard_route(network, hazard)
    s, lat = route_project(network, chain, hazard.position)
    p_lane = route_point(network, chain, s)
    if lat > 1e-9:
        occluder = (p_lane[0] + (hazard.position[0] - p_lane[0]) * 0.5,
                    p_lane[1] + (hazard.position[1] - p_lane[1]) * 0.5)
    else:
        occluder = p_lane
    elements = (
        SemanticElement("human", hazard.position, (0.0, 0.0), hazard.affected_lanes,
                        occluded=hazard.kind.startswith("occluded")),
        SemanticElement("vehicle_parked", occluder),
        SemanticElement("road", p_lane, associated_lanes=frozenset()),
    )
    for e in elements:
        if distance(e.position, rsu.position) > rsu.camera_range:
            raise ScenarioError("scene element outside the RSU camera range")
    return SceneDescription(elements)


# ---------------------------------------------------------------------------
# intersection yielding
# ---------------------------------------------------------------------------

def _is_north_south(network: RoadNetwork, route: tuple[str, ...]) -> bool:
    dx, dy = network.lane(route[0]).direction
    return abs(dy) > abs(dx)


def _route_priority(network: RoadNetwork, route: tuple[str, ...],
                    priority: str = "north_south") -> int:
    """Rank of a route's axis under the configured right-of-way rule."""
    ns = _is_north_south(network, route)
    if priority == "north_south":
        return 1 if ns else 0
    return 0 if ns else 1


def _geometry_cache(cache: dict | None) -> dict:
    if cache is None:
        cache = {}
    cache.setdefault("interval", {})
    cache.setdefault("cross", {})
    return cache


def intersection_yield(v: VehicleState, zone: tuple[Point, ...],
                       others: list[VehicleState], now: float,
                       network: RoadNetwork, idm_params: IdmParams = IdmParams(),
                       tau_s: float = 4.0, approach_window_m: float = 50.0,
                       priority: str = "north_south",
                       geometry_cache: dict | None = None) -> float | None:
    """Gap-acceptance rule at the conflict zone.

    A vehicle within approach_window_m of the zone entry may proceed unless a
    crossing vehicle currently occupies the zone or a crossing vehicle with
    precedence will reach it within tau_s at current speed. Precedence: the
    configured priority axis outranks the other, ties go to the earlier
    projected arrival, then to the lower vehicle id. A yielding vehicle
    treats the entry line as a standing virtual leader; the returned value is
    that braking acceleration, None when no override applies.
    """
    cache = _geometry_cache(geometry_cache)
    iv = _zone_interval(network, v.route, zone, cache)
    if iv is None:
        return None
    entry = iv[0]
    s_v = route_offset(network, v.route, v.pos)
    if not (entry - approach_window_m <= s_v < entry):
        return None
    rank_v = _route_priority(network, v.route, priority)
    t_v = (entry - s_v) / v.speed if v.speed > 0 else math.inf

    def braking() -> float:
        return idm_acceleration(v.speed, entry - s_v, v.speed, idm_params)

    for w in others:
        if w.id == v.id or not _routes_cross_cached(network, v.route, w.route, cache):
            continue
        if point_in_polygon(embed(w.pos, network), zone):
            return braking()
        ivw = _zone_interval(network, w.route, zone, cache)
        if ivw is None:
            continue
        s_w = route_offset(network, w.route, w.pos)
        if s_w >= ivw[0] or w.speed <= 0:
            continue
        t_w = (ivw[0] - s_w) / w.speed
        if t_w > tau_s:
            continue
        rank_w = _route_priority(network, w.route, priority)
        if rank_w > rank_v:
            return braking()
        if rank_w == rank_v and (t_w < t_v or (t_w == t_v and w.id < v.id)):
            return braking()
    return None


def _zone_interval(network, route, zone, cache):
    key = route
    if key not in cache["interval"]:
        cache["interval"][key] = route_zone_interval(network, route, zone)
    return cache["interval"][key]


def _routes_cross_cached(network, r1, r2, cache):
    key = (r1, r2)
    if key not in cache["cross"]:
        cache["cross"][key] = routes_cross(network, r1, r2)
        cache["cross"][(r2, r1)] = cache["cross"][key]
    return cache["cross"][key]


# ---------------------------------------------------------------------------
# single run
# ---------------------------------------------------------------------------

class _SpawnLane:
    """Poisson arrival process for one spawn lane, with a deferral queue."""

    __slots__ = ("rng", "next_arrival", "pending")

    def __init__(self, seed: int, lane_id: str, rate: float):
        self.rng = random.Random(f"{seed}:spawn:{lane_id}")
        self.next_arrival = self.rng.expovariate(rate)
        self.pending: deque[float] = deque()


class _Run:
    def __init__(self, cfg: ScenarioConfig):
        cfg.validate()
        self.cfg = cfg
        self.network = build_network(cfg.scenario_kind, cfg.geometry)
        self.rsus = [make_rsu(self.network, cfg.rsu.location_label,
                              cfg.rsu.broadcast_period_s, cfg.rsu.camera_range_m)]
        self.hazard = resolve_hazard(cfg, self.network)
        self.scene = (observe_scene(self.rsus[0], self.hazard, self.network)
                      if self.hazard is not None else None)
        lanes = cfg.spawn_lanes if cfg.spawn_lanes is not None else self.network.spawn_lanes
        for lane in lanes:
            if lane not in self.network.spawn_lanes:
                raise ScenarioError(f"spawn_lanes entry {lane!r} is not a spawn lane")
        self.spawn_lane_ids = tuple(sorted(lanes))
        self.spawn_rates = {lid: cfg.spawn_rate * self._rate_factor(lid)
                            for lid in self.spawn_lane_ids}
        self.spawners = {lid: _SpawnLane(cfg.seed, lid, self.spawn_rates[lid])
                         for lid in self.spawn_lane_ids}
        self.chan_rng = random.Random(f"{cfg.seed}:channel")

        self.dt = cfg.dt_s
        self.n_ticks = int(round(cfg.duration_s / cfg.dt_s))
        self.warmup_ticks = int(round(cfg.warmup_s / cfg.dt_s))
        self.mode = cfg.mode
        self.route_lengths = {head: route_length(self.network, r)
                              for head, r in self.network.routes.items()}
        self.gate_m = cfg.idm.s0 + cfg.initial_speed * cfg.idm.T

        self.vehicles: dict[int, VehicleState] = {}
        self.chains: dict[str, list[VehicleState]] = {lid: [] for lid in self.network.routes}
        self.chain_s: dict[int, float] = {}
        self.geom_cache: dict = {}

        self.next_id = 0
        self.arrivals = 0
        self.spawned = 0
        self.completed = 0
        self.caution_activations = 0
        self.rows: list[TickStats] = []
        self.win_speed_sum = 0.0
        self.win_count = 0

    # -- phases ------------------------------------------------------------

    def execute(self) -> MetricsRecord:
        for k in range(self.n_ticks):
            self._tick(k)
        weighted = self.win_speed_sum / self.win_count if self.win_count else 0.0
        return MetricsRecord(
            ticks=tuple(self.rows),
            weighted_mean_speed_mps=weighted,
            caution_activations=self.caution_activations,
            completed_trips=self.completed,
            collision=False,
            window_vehicle_seconds=self.win_count * self.dt,
        )

    def _tick(self, k: int) -> None:
        now = k * self.dt
        cfg = self.cfg
        xy = {vid: embed(v.pos, self.network) for vid, v in self.vehicles.items()}

        # (1) hazard activation, (2) due broadcasts
        active = [h for h in ((self.hazard,) if self.hazard else ()) if h.active_at(now)]
        events = due_broadcasts(self.rsus, active, now, self.dt, self._payload_for)

        # (3) deliveries and reactions
        for ev in events:
            for vid, v in self.vehicles.items():
                if not try_deliver(ev, xy[vid], self.chan_rng, cfg.channel):
                    continue
                if self.mode == SEMANTIC:
                    q = query_link_quality(distance(ev.tx_pos, xy[vid]), cfg.link_quality)
                    payload = encode_semantic(self.scene, q, ev.tx_time, cfg.importance)
                else:
                    payload = ev.payload
                cmd = on_receive(v, payload, self.mode, now, self.network,
                                 cfg.caution, cfg.relevance)
                if cmd is not None:
                    old = v.active_caution
                    if old is None or old.expires <= now:
                        self.caution_activations += 1
                    v.active_caution = cmd

        # (4) expire cautions
        for v in self.vehicles.values():
            if v.active_caution is not None and now >= v.active_caution.expires:
                v.active_caution = None

        # (5) intersection yield overrides
        overrides: dict[int, float] = {}
        zone = self.network.conflict_zone
        if zone is not None and self.vehicles:
            everyone = list(self.vehicles.values())
            for v in everyone:
                a = intersection_yield(v, zone, everyone, now, self.network,
                                       cfg.idm, cfg.yielding.tau_s,
                                       cfg.yielding.approach_window_m,
                                       cfg.yielding.priority, self.geom_cache)
                if a is not None:
                    overrides[v.id] = a

        # (6) car-following step, synchronous over a state snapshot
        old_s = self.chain_s
        new_s: dict[int, float] = {}
        survivors: list[VehicleState] = []
        new_chains: dict[str, list[VehicleState]] = {lid: [] for lid in self.chains}
        for head, lst in self.chains.items():
            total = self.route_lengths[head]
            for i, v in enumerate(lst):
                leader = None
                if i > 0:
                    lead = lst[i - 1]
                    gap = old_s[lead.id] - old_s[v.id]
                    if gap <= 0:
                        raise CollisionError(
                            f"vehicle {v.id} reached gap {gap:.3f} m behind vehicle "
                            f"{lead.id} at t={now:.1f} s",
                            time_s=now, vehicle_id=v.id, leader_id=lead.id)
                    leader = (gap, lead.speed)
                v0_eff = effective_desired_speed(v, now, cfg.idm.v0, self.network)
                p_eff = cfg.idm if v0_eff == cfg.idm.v0 else replace(cfg.idm, v0=v0_eff)
                new = step(v, leader, self.dt, p_eff, accel_cap=overrides.get(v.id))
                s_new = old_s[v.id] + new.speed * self.dt
                if s_new >= total - 1e-9:
                    # (7) despawn past the route end
                    self.completed += 1
                    continue
                new.pos = locate_on_route(self.network, new.route, s_new)
                new_s[v.id] = s_new
                new_chains[head].append(new)
                survivors.append(new)
        self.chains = new_chains
        self.chain_s = new_s
        self.vehicles = {v.id: v for v in sorted(survivors, key=lambda v: v.id)}

        # (8) spawn
        end_time = (k + 1) * self.dt
        for lid in self.spawn_lane_ids:
            sp = self.spawners[lid]
            while sp.next_arrival < end_time:
                sp.pending.append(sp.next_arrival)
                sp.next_arrival += sp.rng.expovariate(self.spawn_rates[lid])
                self.arrivals += 1
            while sp.pending and self._gate_clear(lid):
                sp.pending.popleft()
                self._spawn_vehicle(lid, end_time)

        # (9) metrics
        speeds = [v.speed for v in self.vehicles.values()]
        cautioned = sum(1 for v in self.vehicles.values() if v.active_caution is not None)
        mean = statistics.fmean(speeds) if speeds else 0.0
        self.rows.append(TickStats(end_time, mean, cautioned, len(self.vehicles)))
        if k + 1 >= self.warmup_ticks:
            self.win_speed_sum += sum(speeds)
            self.win_count += len(speeds)

        pending = sum(len(sp.pending) for sp in self.spawners.values())
        if self.arrivals != pending + self.spawned or \
                self.spawned != len(self.vehicles) + self.completed:
            raise SimulationError(
                f"vehicle conservation violated at t={end_time:.1f} s: "
                f"{self.arrivals} arrivals, {pending} pending, {self.spawned} spawned, "
                f"{len(self.vehicles)} active, {self.completed} completed")

    def _rate_factor(self, lane_id: str) -> float:
        if (self.network.scenario_kind == EXPRESSWAY
                or _is_north_south(self.network, self.network.routes[lane_id])):
            return 1.0
        return self.cfg.cross_rate_factor

    def _payload_for(self, rsu: RsuNode, detected: list[HazardEvent], tx_time: float):
        h = min(detected, key=lambda h: h.active_interval[0])
        if self.mode == TRADITIONAL:
            return TraditionalAlert(h.position, h.kind, tx_time)
        level = LinkQualityLevel(LEVEL_HIGH, self.cfg.link_quality.budget_high)
        return encode_semantic(self.scene, level, tx_time, self.cfg.importance)

    def _gate_clear(self, lane_id: str) -> bool:
        lst = self.chains[lane_id]
        if not lst:
            return True
        return self.chain_s[lst[-1].id] >= self.gate_m

    def _spawn_vehicle(self, lane_id: str, now: float) -> None:
        v = VehicleState(
            id=self.next_id,
            pos=LanePosition(lane_id, 0.0),
            speed=self.cfg.initial_speed,
            accel=0.0,
            route=self.network.routes[lane_id],
            spawn_time=now,
        )
        self.next_id += 1
        self.spawned += 1
        self.vehicles[v.id] = v
        self.chains[lane_id].append(v)
        self.chain_s[v.id] = 0.0


def run(cfg: ScenarioConfig) -> MetricsRecord:
    """Execute one deterministic run and collect its metrics."""
    return _Run(cfg).execute()


# ---------------------------------------------------------------------------
# speed gap and sweep
# ---------------------------------------------------------------------------

def _seed_gap(cfg: ScenarioConfig, seed: int) -> float:
    base = replace(cfg, seed=seed)
    sem = run(base.with_mode(SEMANTIC))
    trad = run(base.with_mode(TRADITIONAL))
    return sem.weighted_mean_speed_mps - trad.weighted_mean_speed_mps


def speed_gap(cfg_base: ScenarioConfig, seeds: list[int]) -> float:
    """Mean over seeds of (semantic minus traditional weighted mean speed)."""
    if not seeds:
        raise ScenarioError("speed_gap requires at least one seed")
    return statistics.fmean(_seed_gap(cfg_base, s) for s in seeds)


def _cell_config(cfg: ScenarioConfig, location: int, rate: float) -> ScenarioConfig:
    return replace(cfg, rsu=replace(cfg.rsu, location_label=location), spawn_rate=rate)


def _sweep_cell(args: tuple[ScenarioConfig, int, float, tuple[int, ...]]
                ) -> tuple[tuple[int, float], CellStats]:
    cfg, location, rate, seeds = args
    key = (location, rate)
    try:
        gaps = [_seed_gap(_cell_config(cfg, location, rate), s) for s in seeds]
    except SimulationError as exc:
        return key, CellStats(None, None, len(seeds), error=str(exc))
    stddev = statistics.stdev(gaps) if len(gaps) > 1 else 0.0
    return key, CellStats(statistics.fmean(gaps), stddev, len(gaps))


def sweep(base: ScenarioConfig, locations: list[int], spawn_rates: list[float],
          seeds: list[int], parallel: int = 1) -> SweepResult:
    """Full (location, spawn rate) grid of speed gaps, cells independent.

    Cell failures are recorded per cell and do not abort the sweep. Results
    are keyed and merged in (location, rate) order, so the output does not
    depend on the degree of parallelism.
    """
    if not locations or not spawn_rates or not seeds:
        raise ScenarioError("sweep requires non-empty locations, spawn_rates, and seeds")
    locations = sorted(set(locations))
    spawn_rates = sorted(set(spawn_rates))
    jobs = [(base, loc, rate, tuple(seeds)) for loc in locations for rate in spawn_rates]
    cells: dict[tuple[int, float], CellStats] = {}
    if parallel <= 1:
        results = map(_sweep_cell, jobs)
        for key, stats in results:
            cells[key] = stats
    else:
        with ProcessPoolExecutor(max_workers=parallel) as pool:
            for key, stats in pool.map(_sweep_cell, jobs):
                cells[key] = stats
    return SweepResult(
        cells=cells,
        locations=tuple(locations),
        spawn_rates=tuple(spawn_rates),
        seeds=tuple(seeds),
        scenario_kind=base.scenario_kind,
    )
