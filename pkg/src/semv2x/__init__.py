"""Deterministic microscopic traffic simulator comparing context-free and
relevance-filtered V2X hazard warnings."""

from .channel import BroadcastEvent, ChannelModel, due_broadcasts, reception_probability, try_deliver
from .config import HazardConfig, RsuConfig, ScenarioConfig, YieldParams
from .engine import (CellStats, MetricsRecord, SweepResult, TickStats, intersection_yield,
                     observe_scene, resolve_hazard, run, speed_gap, sweep)
from .errors import CollisionError, MessageError, ScenarioError, SimulationError
from .idm import IdmParams, desired_gap, idm_acceleration, step
from .messages import (HazardContext, ImportanceWeights, LinkQualityConfig, LinkQualityLevel,
                       SceneDescription, SemanticElement, SemanticMessage, TraditionalAlert,
                       decode_semantic, encode_semantic, importance_score, query_link_quality)
from .policy import (SEMANTIC, TRADITIONAL, CautionCommand, CautionParams, RelevanceParams,
                     effective_desired_speed, on_receive, relevance)
from .scenario import config_keys, parse_scenario
from .world import (EXPRESSWAY, INTERSECTION, GeometryParams, HazardEvent, Lane, LanePosition,
                    RoadNetwork, RsuNode, VehicleState, build_network, embed, make_rsu,
                    predicted_path)

__version__ = "0.1.0"
