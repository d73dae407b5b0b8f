"""Sidelink broadcast delivery: periodic RSU transmissions and a
distance-dependent packet reception model.

The reception model is flat at reliable_rate out to reliable_range, then
falls linearly to zero at max_range. Delivery is a single Bernoulli draw
per attempt; every attempt consumes exactly one draw from the run's
channel stream so runs stay bit-reproducible regardless of outcomes.
"""
from __future__ import annotations

import math
import random
from dataclasses import dataclass
from typing import Callable

from .errors import ScenarioError
from .world import HazardEvent, Point, RsuNode, distance


@dataclass(frozen=True)
class ChannelModel:
    reliable_range: float = 50.0   # m, flat high-reliability region
    reliable_rate: float = 0.95    # reception probability within reliable_range
    max_range: float = 150.0       # m, probability reaches 0 here

    def __post_init__(self):
        if not 0 < self.reliable_range < self.max_range:
            raise ScenarioError("channel requires 0 < reliable_range < max_range")
        if not 0 < self.reliable_rate <= 1:
            raise ScenarioError("channel reliable_rate must be in (0, 1]")


@dataclass(frozen=True)
class BroadcastEvent:
    rsu_label: int
    payload: object          # TraditionalAlert or SemanticMessage
    tx_time: float           # s, multiple of broadcast_period from first detection
    tx_pos: Point


def reception_probability(dist: float, c: ChannelModel = ChannelModel()) -> float:
    """Non-increasing, continuous reception probability."""
    if dist < 0:
        raise ScenarioError(f"distance must be non-negative (got {dist})")
    if dist <= c.reliable_range:
        return c.reliable_rate
    if dist >= c.max_range:
        return 0.0
    return c.reliable_rate * (c.max_range - dist) / (c.max_range - c.reliable_range)


def try_deliver(event: BroadcastEvent, receiver_pos: Point, rng: random.Random,
                c: ChannelModel = ChannelModel()) -> bool:
    """Bernoulli delivery over reception_probability(distance to the RSU)."""
    p = reception_probability(distance(event.tx_pos, receiver_pos), c)
    return rng.random() < p


def due_broadcasts(rsus: list[RsuNode], hazards: list[HazardEvent], now: float,
                   dt: float, payload_for: Callable[[RsuNode, list[HazardEvent], float], object],
                   ) -> list[BroadcastEvent]:
    """Broadcast events whose scheduled times fall in [now, now + dt).

    An RSU transmits every broadcast_period, starting at the moment it first
    detects an active hazard within camera_range; with a static hazard and
    RSU that moment is the hazard's activation time. No detected hazard, no
    events.
    """
    if now < 0:
        raise ScenarioError(f"now must be non-negative (got {now})")
    events: list[BroadcastEvent] = []
    for rsu in rsus:
        in_range = [h for h in hazards
                    if distance(rsu.position, h.position) <= rsu.camera_range]
        if not in_range:
            continue
        first = min(h.active_interval[0] for h in in_range)
        period = rsu.broadcast_period
        n = max(0, math.ceil((now - first) / period - 1e-9))
        while True:
            tx = first + n * period
            if tx >= now + dt - 1e-9:
                break
            detected = [h for h in in_range if h.active_at(tx)]
            if detected and tx >= now - 1e-9:
                events.append(BroadcastEvent(
                    rsu_label=rsu.location_label,
                    payload=payload_for(rsu, detected, tx),
                    tx_time=tx,
                    tx_pos=rsu.position,
                ))
            n += 1
    return events
