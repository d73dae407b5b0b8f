"""Warning payloads and the semantic encoding pipeline.

Two payload kinds exist. A TraditionalAlert deliberately carries no
relevance context: just where and what. A SemanticMessage carries an
importance-ordered list of scene elements truncated to a budget set by the
receiver's link quality, so the most safety-critical content (humans above
all) survives even the smallest budget.
"""
from __future__ import annotations

import struct
from dataclasses import dataclass, field

from .errors import MessageError
from .world import Point

ELEMENT_CLASSES = ("human", "obstacle", "road", "vehicle_parked")

LEVEL_HIGH = "high"
LEVEL_MEDIUM = "medium"
LEVEL_LOW = "low"


@dataclass(frozen=True)
class ImportanceWeights:
    """Class base weights plus modifiers; humans must dominate everything."""

    human: float = 100.0
    obstacle: float = 50.0
    vehicle_parked: float = 20.0
    road: float = 10.0
    occluded_bonus: float = 25.0
    per_lane_bonus: float = 10.0

    def base(self, klass: str) -> float:
        return getattr(self, klass)


@dataclass(frozen=True)
class LinkQualityConfig:
    """Distance thresholds and element budgets of the three-level link oracle."""

    high_range: float = 50.0    # m, matches the reliable sidelink range
    medium_range: float = 100.0
    budget_high: int = 8
    budget_medium: int = 4
    budget_low: int = 2

    def __post_init__(self):
        if not 0 < self.high_range < self.medium_range:
            raise MessageError("link quality requires 0 < high_range < medium_range")
        if not self.budget_high >= self.budget_medium >= self.budget_low >= 1:
            raise MessageError("element budgets must be positive and non-increasing")


@dataclass(frozen=True)
class LinkQualityLevel:
    level: str                 # high | medium | low
    element_budget: int

    def __post_init__(self):
        if self.level not in (LEVEL_HIGH, LEVEL_MEDIUM, LEVEL_LOW):
            raise MessageError(f"unknown link quality level {self.level!r}")
        if self.element_budget < 1:
            raise MessageError("element_budget must be positive")


@dataclass(frozen=True)
class SemanticElement:
    klass: str
    position: Point
    velocity: Point = (0.0, 0.0)
    associated_lanes: frozenset[str] = frozenset()
    occluded: bool = False

    def __post_init__(self):
        if self.klass not in ELEMENT_CLASSES:
            raise MessageError(f"unknown element class {self.klass!r}")


@dataclass(frozen=True)
class SceneDescription:
    """Symbolic ground-truth scene as observed by an RSU camera."""

    elements: tuple[SemanticElement, ...]


@dataclass(frozen=True)
class TraditionalAlert:
    hazard_position: Point
    hazard_kind: str
    timestamp: float

    def to_bytes(self) -> bytes:
        kind = self.hazard_kind.encode()
        return struct.pack("<ddd", self.hazard_position[0], self.hazard_position[1],
                           self.timestamp) + struct.pack("<H", len(kind)) + kind


@dataclass(frozen=True)
class SemanticMessage:
    elements: tuple[SemanticElement, ...]   # non-increasing importance order
    scores: tuple[float, ...]               # importance score per element
    cause: str
    timestamp: float
    budget: int                             # element budget at encode time

    def to_bytes(self) -> bytes:
        """Compact deterministic binary record (lane ids sorted)."""
        cause = self.cause.encode()
        out = [struct.pack("<dHH", self.timestamp, self.budget, len(self.elements)),
               struct.pack("<H", len(cause)), cause]
        for e, s in zip(self.elements, self.scores):
            lanes = sorted(e.associated_lanes)
            out.append(struct.pack("<BdddddBH", ELEMENT_CLASSES.index(e.klass),
                                   e.position[0], e.position[1],
                                   e.velocity[0], e.velocity[1],
                                   s, int(e.occluded), len(lanes)))
            for lid in lanes:
                b = lid.encode()
                out.append(struct.pack("<H", len(b)) + b)
        return b"".join(out)


def message_from_bytes(data: bytes) -> SemanticMessage:
    """Inverse of SemanticMessage.to_bytes."""
    off = 0
    timestamp, budget, count = struct.unpack_from("<dHH", data, off)
    off += struct.calcsize("<dHH")
    (clen,) = struct.unpack_from("<H", data, off)
    off += 2
    cause = data[off:off + clen].decode()
    off += clen
    elements, scores = [], []
    for _ in range(count):
        ki, px, py, vx, vy, score, occ, nlanes = struct.unpack_from("<BdddddBH", data, off)
        off += struct.calcsize("<BdddddBH")
        lanes = []
        for _ in range(nlanes):
            (llen,) = struct.unpack_from("<H", data, off)
            off += 2
            lanes.append(data[off:off + llen].decode())
            off += llen
        elements.append(SemanticElement(ELEMENT_CLASSES[ki], (px, py), (vx, vy),
                                        frozenset(lanes), bool(occ)))
        scores.append(score)
    return SemanticMessage(tuple(elements), tuple(scores), cause, timestamp, budget)


@dataclass(frozen=True)
class HazardContext:
    """Decoded hazard context: the surviving elements plus the cause tag."""

    elements: tuple[SemanticElement, ...]
    cause: str

    @property
    def affected_lanes(self) -> frozenset[str]:
        lanes: set[str] = set()
        for e in self.elements:
            lanes |= e.associated_lanes
        return frozenset(lanes)

    @property
    def threat_positions(self) -> tuple[Point, ...]:
        """Positions of elements that actually threaten traffic."""
        return tuple(e.position for e in self.elements if e.associated_lanes)


def importance_score(e: SemanticElement, w: ImportanceWeights = ImportanceWeights()) -> float:
    """Deterministic score: class base weight, +occluded bonus, +bonus per lane."""
    score = w.base(e.klass)
    if e.occluded:
        score += w.occluded_bonus
    score += w.per_lane_bonus * len(e.associated_lanes)
    return score


def query_link_quality(distance_rsu_to_vehicle: float,
                       q: LinkQualityConfig = LinkQualityConfig()) -> LinkQualityLevel:
    """Three-level network-quality oracle keyed on RSU-to-vehicle distance."""
    if distance_rsu_to_vehicle < 0:
        raise MessageError(f"distance must be non-negative (got {distance_rsu_to_vehicle})")
    if distance_rsu_to_vehicle <= q.high_range:
        return LinkQualityLevel(LEVEL_HIGH, q.budget_high)
    if distance_rsu_to_vehicle <= q.medium_range:
        return LinkQualityLevel(LEVEL_MEDIUM, q.budget_medium)
    return LinkQualityLevel(LEVEL_LOW, q.budget_low)


def _cause_tag(e: SemanticElement) -> str:
    noun = "pedestrian" if e.klass == "human" else e.klass
    return f"occluded_{noun}" if e.occluded else noun


def encode_semantic(scene: SceneDescription, q: LinkQualityLevel, now: float,
                    w: ImportanceWeights = ImportanceWeights()) -> SemanticMessage:
    """Sort elements by importance (desc) and keep the top q.element_budget.

    Ties break by class name, then x, then y, so output is stable. The cause
    is taken from the highest-scoring element that threatens a lane.
    """
    if not scene.elements:
        raise MessageError("cannot encode an empty scene")
    ranked = sorted(scene.elements,
                    key=lambda e: (-importance_score(e, w), e.klass,
                                   e.position[0], e.position[1]))
    kept = tuple(ranked[: q.element_budget])
    threats = [e for e in ranked if e.associated_lanes]
    cause = _cause_tag(threats[0]) if threats else _cause_tag(ranked[0])
    return SemanticMessage(
        elements=kept,
        scores=tuple(importance_score(e, w) for e in kept),
        cause=cause,
        timestamp=now,
        budget=q.element_budget,
    )


def decode_semantic(m: SemanticMessage) -> HazardContext:
    """Validate and unpack a semantic message; lossless for surviving elements."""
    if len(m.elements) != len(m.scores):
        raise MessageError("message element/score length mismatch")
    if len(m.elements) > m.budget:
        raise MessageError(f"message carries {len(m.elements)} elements, budget {m.budget}")
    for i in range(len(m.scores) - 1):
        if m.scores[i] < m.scores[i + 1]:
            raise MessageError("message elements are not in non-increasing score order")
    return HazardContext(elements=m.elements, cause=m.cause)
