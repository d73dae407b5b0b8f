"""Intelligent-Driver-Model car following and semi-implicit Euler integration."""
from __future__ import annotations

import math
from dataclasses import dataclass

from .errors import CollisionError
from .world import LanePosition, VehicleState

ACCEL_MIN = -9.0   # hard physical brake limit, m/s^2
ACCEL_MAX = 5.0    # hard physical acceleration limit, m/s^2
FREE_ROAD_GAP = 1e6  # sentinel gap for a vehicle with no leader, m


@dataclass(frozen=True)
class IdmParams:
    v0: float = 20.0      # desired speed, m/s
    T: float = 1.5        # safe time headway, s
    s0: float = 2.0       # jam gap, m
    a_max: float = 0.73   # maximum acceleration, m/s^2
    b: float = 1.67       # comfortable deceleration, m/s^2
    delta: float = 4.0    # acceleration exponent

    def __post_init__(self):
        for name in ("v0", "T", "s0", "a_max", "b"):
            if getattr(self, name) <= 0:
                raise ValueError(f"IDM parameter {name} must be positive")
        if self.delta < 1:
            raise ValueError("IDM exponent delta must be >= 1")


def desired_gap(v: float, dv: float, p: IdmParams = IdmParams()) -> float:
    """Desired gap s*(v, dv) = s0 + max(0, v*T + v*dv / (2*sqrt(a_max*b))).

    dv is the closing speed to the leader (own speed minus leader speed).
    """
    dynamic = v * p.T + v * dv / (2.0 * math.sqrt(p.a_max * p.b))
    return p.s0 + max(0.0, dynamic)


def idm_acceleration(v: float, gap: float, dv: float, p: IdmParams = IdmParams()) -> float:
    """a = a_max * (1 - (v/v0)^delta - (s*/gap)^2), clamped below at -9 m/s^2.

    gap <= 0 signals a collision and raises instead of being clamped.
    """
    if gap <= 0:
        raise CollisionError(f"non-positive gap {gap} m at speed {v} m/s")
    s_star = desired_gap(v, dv, p)
    a = p.a_max * (1.0 - (v / p.v0) ** p.delta - (s_star / gap) ** 2)
    return max(ACCEL_MIN, min(a, p.a_max))


def step(v: VehicleState, leader: tuple[float, float] | None, dt: float,
         p_effective: IdmParams, accel_cap: float | None = None) -> VehicleState:
    """Advance one tick with semi-implicit Euler (position uses updated speed).

    leader is (gap, leader_speed) or None for a free road. accel_cap, when
    given, bounds the acceleration from above (used for yield overrides).
    The returned offset may overrun the lane; the engine maps it onto the
    route chain.
    """
    if dt <= 0:
        raise ValueError(f"dt must be positive (got {dt})")
    if leader is None:
        gap, dv = FREE_ROAD_GAP, 0.0
    else:
        gap, dv = leader[0], v.speed - leader[1]
    a = idm_acceleration(v.speed, gap, dv, p_effective)
    if accel_cap is not None:
        a = min(a, accel_cap)
    a = max(ACCEL_MIN, min(a, ACCEL_MAX))
    speed = max(0.0, v.speed + a * dt)
    offset = v.pos.offset + speed * dt
    return VehicleState(
        id=v.id,
        pos=LanePosition(v.pos.lane_id, offset),
        speed=speed,
        accel=a,
        route=v.route,
        spawn_time=v.spawn_time,
        active_caution=v.active_caution,
    )
