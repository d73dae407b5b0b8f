"""Receiver-side reaction to warnings.

Traditional receivers slow down for every alert; semantic receivers first
decide whether the hazard is relevant to them (lane alignment, travel
direction, predicted path). A caution is a temporary desired-speed cap that
only binds inside a radius around the hazard, so the reaction magnitude is
identical in both modes and the relevance filter is the sole experimental
variable.
"""
from __future__ import annotations

from dataclasses import dataclass

from .errors import ScenarioError
from .messages import HazardContext, SemanticMessage, TraditionalAlert, decode_semantic
from .world import Point, RoadNetwork, VehicleState, distance, embed, predicted_path, route_offset, route_project

TRADITIONAL = "traditional"
SEMANTIC = "semantic"
MODES = (TRADITIONAL, SEMANTIC)


@dataclass(frozen=True)
class CautionParams:
    speed_cap: float = 5.0     # m/s inside the caution zone
    zone_radius: float = 30.0  # m around the hazard anchor
    hold_s: float = 5.0        # caution lifetime after the last confirming message

    def __post_init__(self):
        if self.speed_cap < 0:
            raise ScenarioError("caution speed_cap must be non-negative")
        if self.zone_radius <= 0:
            raise ScenarioError("caution zone_radius must be positive")
        if self.hold_s <= 0:
            raise ScenarioError("caution hold_s must be positive")


@dataclass(frozen=True)
class RelevanceParams:
    horizon_s: float = 8.0            # predicted-path lookahead
    lateral_threshold: float = 3.5    # m, one lane width


@dataclass(frozen=True)
class CautionCommand:
    speed_cap: float
    zone_radius: float
    expires: float     # s, absolute simulation time
    anchor: Point      # hazard position the zone is centered on


def relevance(v: VehicleState, ctx: HazardContext, horizon: float,
              network: RoadNetwork, lateral_threshold: float = 3.5) -> bool:
    """True iff the decoded hazard applies to this vehicle.

    All three conditions must hold: (1) some affected lane lies on the
    vehicle's route, (2) the hazard is ahead along the route, and (3) the
    predicted path passes within lateral_threshold of a threat position.
    """
    affected = ctx.affected_lanes
    if not affected or not any(lid in affected for lid in v.route):
        return False
    threats = ctx.threat_positions
    if not threats:
        return False
    own_s = route_offset(network, v.route, v.pos)
    ahead = False
    for p in threats:
        s, _ = route_project(network, v.route, p)
        if s > own_s:
            ahead = True
            break
    if not ahead:
        return False
    for point in predicted_path(v, horizon, network):
        for p in threats:
            if distance(point, p) <= lateral_threshold:
                return True
    return False


def on_receive(v: VehicleState, payload: TraditionalAlert | SemanticMessage,
               mode: str, now: float, network: RoadNetwork,
               caution: CautionParams = CautionParams(),
               rel: RelevanceParams = RelevanceParams()) -> CautionCommand | None:
    """Turn a delivered payload into a caution command (or nothing).

    Traditional mode reacts unconditionally; semantic mode reacts only when
    the decoded context is relevant. Repeated receptions refresh the expiry.
    """
    if mode == TRADITIONAL:
        if not isinstance(payload, TraditionalAlert):
            raise ScenarioError("traditional mode received a non-alert payload")
        anchor = payload.hazard_position
    elif mode == SEMANTIC:
        if not isinstance(payload, SemanticMessage):
            raise ScenarioError("semantic mode received a non-semantic payload")
        ctx = decode_semantic(payload)
        if not relevance(v, ctx, rel.horizon_s, network, rel.lateral_threshold):
            return None
        anchor = ctx.threat_positions[0]
    else:
        raise ScenarioError(f"unknown reaction mode {mode!r}")
    return CautionCommand(
        speed_cap=caution.speed_cap,
        zone_radius=caution.zone_radius,
        expires=now + caution.hold_s,
        anchor=anchor,
    )


def effective_desired_speed(v: VehicleState, now: float, v0: float,
                            network: RoadNetwork) -> float:
    """Desired speed fed to the car-following law.

    The caution cap applies only while unexpired and inside the zone radius
    around the hazard anchor; elsewhere the vehicle wants its normal v0.
    """
    cmd = v.active_caution
    if cmd is None or now >= cmd.expires:
        return v0
    if distance(embed(v.pos, network), cmd.anchor) <= cmd.zone_radius:
        return min(v0, cmd.speed_cap)
    return v0
