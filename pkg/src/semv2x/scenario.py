"""Scenario file parsing: a strict nested key-value (YAML) document mapped
onto ScenarioConfig with all defaults applied.

Unknown keys are fatal (with a did-you-mean suggestion) because a silently
ignored parameter typo is the worst failure mode for a simulation study.
Units: lengths/ranges/radii in meters, times in seconds, speeds in m/s,
accelerations in m/s^2, spawn_rate in vehicles per second per lane.
"""
from __future__ import annotations

import difflib
from dataclasses import fields, replace

import yaml

from .channel import ChannelModel
from .config import HazardConfig, RsuConfig, ScenarioConfig, YieldParams
from .errors import ScenarioError
from .idm import IdmParams
from .messages import ImportanceWeights, LinkQualityConfig
from .policy import CautionParams, RelevanceParams
from .world import GeometryParams

# section name -> (config attribute, constructor, {file key: (field, coercion)})
_FLOAT, _INT, _STR, _POINT, _STR_LIST = "float", "int", "str", "point", "str_list"

_SECTIONS = {
    "rsu": ("rsu", RsuConfig, {
        "location_label": ("location_label", _INT),
        "broadcast_period_s": ("broadcast_period_s", _FLOAT),
        "camera_range_m": ("camera_range_m", _FLOAT),
    }),
    "hazard": ("hazard", HazardConfig, {
        "kind": ("kind", _STR),
        "lane": ("lane", _STR),
        "start_s": ("start_s", _FLOAT),
        "end_s": ("end_s", _FLOAT),
        "position": ("position", _POINT),
        "side_offset_m": ("side_offset_m", _FLOAT),
    }),
    "channel": ("channel", ChannelModel, {
        "reliable_range_m": ("reliable_range", _FLOAT),
        "reliable_rate": ("reliable_rate", _FLOAT),
        "max_range_m": ("max_range", _FLOAT),
    }),
    "idm": ("idm", IdmParams, {
        "v0": ("v0", _FLOAT),
        "T": ("T", _FLOAT),
        "s0": ("s0", _FLOAT),
        "a_max": ("a_max", _FLOAT),
        "b": ("b", _FLOAT),
        "delta": ("delta", _FLOAT),
    }),
    "caution": ("caution", CautionParams, {
        "speed_cap": ("speed_cap", _FLOAT),
        "zone_radius": ("zone_radius", _FLOAT),
        "hold_s": ("hold_s", _FLOAT),
    }),
    "relevance": ("relevance", RelevanceParams, {
        "horizon_s": ("horizon_s", _FLOAT),
        "lateral_threshold": ("lateral_threshold", _FLOAT),
    }),
    "link_quality": ("link_quality", LinkQualityConfig, {
        "high_range": ("high_range", _FLOAT),
        "medium_range": ("medium_range", _FLOAT),
        "budget_high": ("budget_high", _INT),
        "budget_medium": ("budget_medium", _INT),
        "budget_low": ("budget_low", _INT),
    }),
    "importance": ("importance", ImportanceWeights, {
        "human": ("human", _FLOAT),
        "obstacle": ("obstacle", _FLOAT),
        "vehicle_parked": ("vehicle_parked", _FLOAT),
        "road": ("road", _FLOAT),
        "occluded_bonus": ("occluded_bonus", _FLOAT),
        "per_lane_bonus": ("per_lane_bonus", _FLOAT),
    }),
    "geometry": ("geometry", GeometryParams, {
        "lane_length": ("lane_length", _FLOAT),
        "lane_spacing": ("lane_spacing", _FLOAT),
        "approach_length": ("approach_length", _FLOAT),
        "exit_length": ("exit_length", _FLOAT),
        "zone_size": ("zone_size", _FLOAT),
        "rsu_side_offset": ("rsu_side_offset", _FLOAT),
    }),
    "yielding": ("yielding", YieldParams, {
        "tau_s": ("tau_s", _FLOAT),
        "approach_window_m": ("approach_window_m", _FLOAT),
        "priority": ("priority", _STR),
    }),
}

_TOP_KEYS = {
    "scenario": _STR,
    "mode": _STR,
    "seed": _INT,
    "duration_s": _FLOAT,
    "dt_s": _FLOAT,
    "warmup_s": _FLOAT,
    "spawn_rate": _FLOAT,
    "cross_rate_factor": _FLOAT,
    "initial_speed": _FLOAT,
    "spawn_lanes": _STR_LIST,
}


def _suggest(key: str, valid) -> str:
    match = difflib.get_close_matches(key, list(valid), n=1)
    return f" (did you mean {match[0]!r}?)" if match else ""


def _coerce(key: str, value, kind: str):
    if kind == _FLOAT:
        if isinstance(value, bool) or not isinstance(value, (int, float)):
            raise ScenarioError(f"key '{key}' must be a number (got {value!r})")
        return float(value)
    if kind == _INT:
        if isinstance(value, bool) or not isinstance(value, int):
            raise ScenarioError(f"key '{key}' must be an integer (got {value!r})")
        return value
    if kind == _STR:
        if not isinstance(value, str):
            raise ScenarioError(f"key '{key}' must be a string (got {value!r})")
        return value
    if kind == _POINT:
        if (not isinstance(value, (list, tuple)) or len(value) != 2
                or any(isinstance(c, bool) or not isinstance(c, (int, float)) for c in value)):
            raise ScenarioError(f"key '{key}' must be a pair of numbers [x, y] (got {value!r})")
        return (float(value[0]), float(value[1]))
    if kind == _STR_LIST:
        if not isinstance(value, list) or not all(isinstance(s, str) for s in value):
            raise ScenarioError(f"key '{key}' must be a list of lane ids (got {value!r})")
        return tuple(value)
    raise AssertionError(kind)


def _parse_section(name: str, raw, default_obj, keymap):
    if raw is None:
        return default_obj if name != "hazard" else HazardConfig()
    if not isinstance(raw, dict):
        raise ScenarioError(f"section '{name}' must be a key-value mapping")
    updates = {}
    for key, value in raw.items():
        if key not in keymap:
            raise ScenarioError(f"unknown key '{key}' in section '{name}'"
                                f"{_suggest(key, keymap)}")
        field_name, kind = keymap[key]
        updates[field_name] = _coerce(f"{name}.{key}", value, kind)
    try:
        return replace(default_obj, **updates)
    except (ValueError, ScenarioError) as exc:
        raise ScenarioError(f"section '{name}': {exc}") from None


def parse_scenario(path: str) -> ScenarioConfig:
    """Read, strictly validate, and default-fill a scenario file."""
    try:
        with open(path, "r", encoding="utf-8") as fh:
            text = fh.read()
    except OSError as exc:
        raise ScenarioError(f"cannot read scenario file {path}: {exc}") from None
    try:
        doc = yaml.safe_load(text)
    except yaml.YAMLError as exc:
        raise ScenarioError(f"parse error in {path}: {exc}") from None
    if doc is None:
        doc = {}
    if not isinstance(doc, dict):
        raise ScenarioError(f"scenario file {path} must be a key-value mapping")

    valid = set(_TOP_KEYS) | set(_SECTIONS)
    for key in doc:
        if key not in valid:
            raise ScenarioError(f"unknown key '{key}'{_suggest(key, valid)}")
    for required in ("scenario", "mode"):
        if required not in doc:
            raise ScenarioError(f"missing required key '{required}'")

    top: dict = {}
    for key, kind in _TOP_KEYS.items():
        if key in doc and doc[key] is not None:
            top[_top_field(key)] = _coerce(key, doc[key], kind)

    defaults = ScenarioConfig()
    sections: dict = {}
    for name, (attr, _ctor, keymap) in _SECTIONS.items():
        if name not in doc:
            continue
        if name == "hazard":
            sections[attr] = _parse_section(name, doc[name], HazardConfig(), keymap)
        else:
            sections[attr] = _parse_section(name, doc[name], getattr(defaults, attr), keymap)

    try:
        cfg = replace(defaults, **top, **sections)
    except (ValueError, ScenarioError) as exc:
        raise ScenarioError(str(exc)) from None
    cfg.validate()
    return cfg


def _top_field(key: str) -> str:
    return {"scenario": "scenario_kind"}.get(key, key)


def config_keys() -> dict:
    """Reference of all accepted keys, for docs and tooling."""
    ref = {"top-level": sorted(_TOP_KEYS)}
    for name, (_attr, _ctor, keymap) in _SECTIONS.items():
        ref[name] = sorted(keymap)
    return ref
