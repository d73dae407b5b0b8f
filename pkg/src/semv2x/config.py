"""Scenario configuration: one frozen bundle per run, composing every module's
parameters so a run is a pure function of its config (seed included)."""
from __future__ import annotations

from dataclasses import dataclass, field, replace

from .channel import ChannelModel
from .errors import ScenarioError
from .idm import IdmParams
from .messages import ImportanceWeights, LinkQualityConfig
from .policy import MODES, CautionParams, RelevanceParams
from .world import EXPRESSWAY, INTERSECTION, GeometryParams, Point


@dataclass(frozen=True)
class RsuConfig:
    location_label: int = 1        # 1..6
    broadcast_period_s: float = 0.1
    camera_range_m: float = 75.0

    def validate(self) -> None:
        if not 1 <= self.location_label <= 6:
            raise ScenarioError(f"rsu.location_label must be 1..6 (got {self.location_label})")
        if self.broadcast_period_s <= 0:
            raise ScenarioError("rsu.broadcast_period_s must be positive")
        if self.camera_range_m <= 0:
            raise ScenarioError("rsu.camera_range_m must be positive")


@dataclass(frozen=True)
class HazardConfig:
    """Hazard to stage; unset fields are resolved against the scenario.

    By default the hazard is an occluded pedestrian standing side_offset_m
    off the hazard-side lane at the RSU's arc offset, active from the end of
    the warmup until the end of the run, threatening the straight-through
    chain of `lane` (expressway lane "1", intersection lane "c").
    """

    kind: str = "occluded_pedestrian"
    lane: str | None = None
    start_s: float | None = None
    end_s: float | None = None
    position: Point | None = None
    side_offset_m: float = 1.5


@dataclass(frozen=True)
class YieldParams:
    tau_s: float = 4.0              # clear-window lookahead for zone entry
    approach_window_m: float = 50.0  # distance to the zone where yielding applies
    priority: str = "north_south"   # which axis has right of way at the conflict zone

    def validate(self) -> None:
        if self.tau_s <= 0:
            raise ScenarioError("yielding.tau_s must be positive")
        if self.approach_window_m <= 0:
            raise ScenarioError("yielding.approach_window_m must be positive")
        if self.priority not in ("east_west", "north_south"):
            raise ScenarioError(f"yielding.priority must be east_west or north_south "
                                f"(got {self.priority!r})")


@dataclass(frozen=True)
class ScenarioConfig:
    scenario_kind: str = EXPRESSWAY
    mode: str = "traditional"
    seed: int = 42
    duration_s: float = 300.0
    dt_s: float = 0.1
    warmup_s: float = 60.0          # metrics window starts here
    spawn_rate: float = 0.08        # vehicles/s per lane (density proxy)
    cross_rate_factor: float = 1.0  # spawn-rate multiplier for the east-west approaches
    initial_speed: float = 20.0     # m/s at spawn
    spawn_lanes: tuple[str, ...] | None = None   # None = all spawn lanes
    rsu: RsuConfig = RsuConfig()
    hazard: HazardConfig | None = None
    idm: IdmParams = IdmParams()
    channel: ChannelModel = ChannelModel()
    caution: CautionParams = CautionParams()
    relevance: RelevanceParams = RelevanceParams()
    link_quality: LinkQualityConfig = LinkQualityConfig()
    importance: ImportanceWeights = ImportanceWeights()
    geometry: GeometryParams = GeometryParams()
    yielding: YieldParams = YieldParams()

    def validate(self) -> None:
        if self.scenario_kind not in (EXPRESSWAY, INTERSECTION):
            raise ScenarioError(f"scenario must be expressway or intersection "
                                f"(got {self.scenario_kind!r})")
        if self.mode not in MODES:
            raise ScenarioError(f"mode must be traditional or semantic (got {self.mode!r})")
        if self.spawn_rate <= 0:
            raise ScenarioError(f"spawn_rate must be positive (got {self.spawn_rate})")
        if self.cross_rate_factor <= 0:
            raise ScenarioError(f"cross_rate_factor must be positive "
                                f"(got {self.cross_rate_factor})")
        if self.duration_s <= 0:
            raise ScenarioError(f"duration_s must be positive (got {self.duration_s})")
        if self.dt_s <= 0:
            raise ScenarioError(f"dt_s must be positive (got {self.dt_s})")
        if self.warmup_s < 0:
            raise ScenarioError(f"warmup_s must be non-negative (got {self.warmup_s})")
        if self.duration_s <= self.warmup_s:
            raise ScenarioError(f"duration_s ({self.duration_s}) must exceed "
                                f"warmup_s ({self.warmup_s})")
        if self.initial_speed < 0:
            raise ScenarioError(f"initial_speed must be non-negative (got {self.initial_speed})")
        if not 0 <= self.caution.speed_cap < self.idm.v0:
            raise ScenarioError("caution.speed_cap must satisfy 0 <= speed_cap < idm.v0")
        self.rsu.validate()
        self.geometry.validate()
        self.yielding.validate()
        if self.relevance.horizon_s <= 0:
            raise ScenarioError("relevance.horizon_s must be positive")
        if self.relevance.lateral_threshold <= 0:
            raise ScenarioError("relevance.lateral_threshold must be positive")
        if self.hazard is not None:
            h = self.hazard
            start = h.start_s if h.start_s is not None else self.warmup_s
            end = h.end_s if h.end_s is not None else self.duration_s
            if not start < end:
                raise ScenarioError(f"hazard start_s ({start}) must precede end_s ({end})")

    def with_mode(self, mode: str) -> "ScenarioConfig":
        return replace(self, mode=mode)
