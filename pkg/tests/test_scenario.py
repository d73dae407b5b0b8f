import pytest

from semv2x.errors import ScenarioError
from semv2x.scenario import config_keys, parse_scenario

MINIMAL = """\
scenario: expressway
mode: semantic
hazard: {}
"""


def write(tmp_path, text, name="scenario.yaml"):
    path = tmp_path / name
    path.write_text(text, encoding="utf-8")
    return str(path)


class TestParseScenario:
    def test_minimal_file_fills_defaults(self, tmp_path):
        cfg = parse_scenario(write(tmp_path, MINIMAL))
        assert cfg.scenario_kind == "expressway"
        assert cfg.mode == "semantic"
        assert cfg.seed == 42
        assert cfg.dt_s == 0.1
        assert cfg.duration_s == 300.0
        assert cfg.idm.v0 == 20.0
        assert cfg.channel.reliable_rate == 0.95
        assert cfg.caution.speed_cap == 5.0
        assert cfg.link_quality.budget_high == 8
        assert cfg.hazard is not None
        assert cfg.hazard.kind == "occluded_pedestrian"

    def test_omitted_hazard_means_none(self, tmp_path):
        cfg = parse_scenario(write(tmp_path, "scenario: expressway\nmode: traditional\n"))
        assert cfg.hazard is None

    def test_nested_overrides(self, tmp_path):
        text = MINIMAL + """\
seed: 9
spawn_rate: 0.12
rsu:
  location_label: 4
caution:
  speed_cap: 12.0
hazard:
  lane: "2"
  start_s: 70.0
yielding:
  priority: east_west
"""
        cfg = parse_scenario(write(tmp_path, text))
        assert cfg.seed == 9
        assert cfg.rsu.location_label == 4
        assert cfg.caution.speed_cap == 12.0
        assert cfg.hazard.lane == "2"
        assert cfg.hazard.start_s == 70.0
        assert cfg.yielding.priority == "east_west"

    def test_negative_spawn_rate_names_key(self, tmp_path):
        path = write(tmp_path, MINIMAL + "spawn_rate: -1\n")
        with pytest.raises(ScenarioError, match="spawn_rate"):
            parse_scenario(path)

    def test_unknown_key_suggests_correction(self, tmp_path):
        text = MINIMAL + "caution:\n  speedcap: 4.0\n"
        with pytest.raises(ScenarioError, match="speed_cap"):
            parse_scenario(write(tmp_path, text))

    def test_unknown_top_level_key_rejected(self, tmp_path):
        with pytest.raises(ScenarioError, match="unknown key"):
            parse_scenario(write(tmp_path, MINIMAL + "durations: 10\n"))

    def test_missing_required_keys(self, tmp_path):
        with pytest.raises(ScenarioError, match="scenario"):
            parse_scenario(write(tmp_path, "mode: semantic\n"))
        with pytest.raises(ScenarioError, match="mode"):
            parse_scenario(write(tmp_path, "scenario: expressway\n"))

    def test_type_errors_name_key(self, tmp_path):
        with pytest.raises(ScenarioError, match="seed"):
            parse_scenario(write(tmp_path, MINIMAL + "seed: 1.5\n"))
        with pytest.raises(ScenarioError, match="duration_s"):
            parse_scenario(write(tmp_path, MINIMAL + "duration_s: fast\n"))

    def test_parse_error_reports_line(self, tmp_path):
        bad = "scenario: expressway\nmode: [unclosed\n"
        with pytest.raises(ScenarioError, match="line"):
            parse_scenario(write(tmp_path, bad))

    def test_missing_file(self, tmp_path):
        with pytest.raises(ScenarioError, match="cannot read"):
            parse_scenario(str(tmp_path / "absent.yaml"))

    def test_duration_must_exceed_warmup(self, tmp_path):
        with pytest.raises(ScenarioError, match="warmup"):
            parse_scenario(write(tmp_path, MINIMAL + "duration_s: 30\n"))

    def test_hazard_position_pair(self, tmp_path):
        text = MINIMAL + "hazard:\n  position: [52.0, -1.5]\n"
        cfg = parse_scenario(write(tmp_path, text))
        assert cfg.hazard.position == (52.0, -1.5)
        with pytest.raises(ScenarioError, match="position"):
            parse_scenario(write(tmp_path, MINIMAL + "hazard:\n  position: [1, 2, 3]\n"))

    def test_invalid_mode_value(self, tmp_path):
        with pytest.raises(ScenarioError, match="mode"):
            parse_scenario(write(tmp_path, "scenario: expressway\nmode: hybrid\n"))


class TestConfigKeys:
    def test_reference_covers_sections(self):
        ref = config_keys()
        assert "top-level" in ref
        assert "idm" in ref and "v0" in ref["idm"]
        assert "caution" in ref and "speed_cap" in ref["caution"]
