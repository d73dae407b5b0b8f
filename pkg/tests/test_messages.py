import random

import pytest

from semv2x.errors import MessageError
from semv2x.messages import (ImportanceWeights, LinkQualityConfig, LinkQualityLevel,
                             SceneDescription, SemanticElement, decode_semantic,
                             encode_semantic, importance_score, message_from_bytes,
                             query_link_quality)

W = ImportanceWeights()
HIGH = LinkQualityLevel("high", 8)
LOW = LinkQualityLevel("low", 2)


def human(pos=(0.0, 0.0), lanes=("1",), occluded=True):
    return SemanticElement("human", pos, (0.0, 0.0), frozenset(lanes), occluded)


def scene(*elements):
    return SceneDescription(tuple(elements))


def random_scene(rng, with_human=True):
    # an element threatens at most one route chain, i.e. up to two lanes
    classes = ["obstacle", "road", "vehicle_parked"]
    n = rng.randint(1, 10)
    elements = []
    for i in range(n):
        cls = rng.choice(classes)
        lanes = frozenset(rng.sample(["1", "2", "c", "d"], rng.randint(0, 2)))
        elements.append(SemanticElement(cls, (rng.uniform(-50, 50), rng.uniform(-50, 50)),
                                        (0.0, 0.0), lanes, rng.random() < 0.3))
    if with_human:
        pos = (rng.uniform(-50, 50), rng.uniform(-50, 50))
        lanes = frozenset(rng.sample(["1", "2"], rng.randint(0, 2)))
        elements.insert(rng.randrange(len(elements) + 1),
                        SemanticElement("human", pos, (0.0, 0.0), lanes, rng.random() < 0.5))
    return scene(*elements)


class TestImportanceScore:
    def test_occluded_human_one_lane(self):
        assert importance_score(human()) == 135.0

    def test_road_base_weight(self):
        assert importance_score(SemanticElement("road", (0.0, 0.0))) == 10.0

    def test_human_dominates_any_non_human(self):
        # worst-case human vs best-modified non-human with equal modifiers
        plain_human = SemanticElement("human", (0.0, 0.0))
        modified_obstacle = SemanticElement("obstacle", (0.0, 0.0), (0.0, 0.0),
                                            frozenset({"1", "2"}), True)
        assert importance_score(plain_human) > importance_score(
            SemanticElement("obstacle", (0.0, 0.0), (0.0, 0.0),
                            modified_obstacle.associated_lanes, False))

    def test_unknown_class_rejected(self):
        with pytest.raises(MessageError):
            SemanticElement("bicycle", (0.0, 0.0))


class TestQueryLinkQuality:
    def test_thresholds(self):
        assert query_link_quality(30.0).level == "high"
        assert query_link_quality(75.0).level == "medium"
        assert query_link_quality(500.0).level == "low"

    def test_budgets_follow_config(self):
        q = LinkQualityConfig(budget_high=6, budget_medium=3, budget_low=1)
        assert query_link_quality(10.0, q).element_budget == 6
        assert query_link_quality(120.0, q).element_budget == 1

    def test_non_increasing_budgets_enforced(self):
        with pytest.raises(MessageError):
            LinkQualityConfig(budget_high=2, budget_medium=4, budget_low=1)


class TestEncodeSemantic:
    def test_empty_scene_rejected(self):
        with pytest.raises(MessageError):
            encode_semantic(scene(), HIGH, 0.0)

    def test_budget_respected_and_human_survives(self):
        sc = scene(
            SemanticElement("road", (1.0, 0.0)),
            SemanticElement("vehicle_parked", (2.0, 0.0)),
            human((3.0, 0.0)),
            SemanticElement("obstacle", (4.0, 0.0), associated_lanes=frozenset({"1"})),
            SemanticElement("road", (5.0, 0.0)),
        )
        msg = encode_semantic(sc, LOW, 1.0)
        assert len(msg.elements) == 2
        assert any(e.klass == "human" for e in msg.elements)

    def test_no_truncation_when_budget_sufficient(self):
        sc = scene(human(), SemanticElement("road", (1.0, 1.0)))
        msg = encode_semantic(sc, HIGH, 0.0)
        assert len(msg.elements) == 2
        assert msg.scores[0] >= msg.scores[1]

    def test_tie_break_stable(self):
        a = SemanticElement("road", (1.0, 5.0))
        b = SemanticElement("road", (1.0, 2.0))
        c = SemanticElement("obstacle", (0.0, 0.0), associated_lanes=frozenset({"1", "2", "3", "4"}))
        # obstacle 50+40=90; roads tie at 10, broken by y
        msg = encode_semantic(scene(a, b, c), HIGH, 0.0)
        assert msg.elements == (c, b, a)

    def test_cause_from_top_threat(self):
        sc = scene(human(), SemanticElement("road", (1.0, 1.0)))
        assert encode_semantic(sc, HIGH, 0.0).cause == "occluded_pedestrian"

    def test_byte_identical_for_identical_inputs(self):
        rng = random.Random(3)
        sc = random_scene(rng)
        m1 = encode_semantic(sc, LOW, 2.5)
        m2 = encode_semantic(sc, LOW, 2.5)
        assert m1.to_bytes() == m2.to_bytes()

    def test_priority_preserved_over_randomized_scenes(self):
        rng = random.Random(42)
        for _ in range(300):
            sc = random_scene(rng, with_human=True)
            for budget in (1, 2, 4, 8):
                msg = encode_semantic(sc, LinkQualityLevel("low", budget), 0.0)
                assert any(e.klass == "human" for e in msg.elements)

    def test_monotone_truncation(self):
        rng = random.Random(43)
        for _ in range(200):
            sc = random_scene(rng, with_human=rng.random() < 0.5)
            kept = [set(encode_semantic(sc, LinkQualityLevel("low", k), 0.0).elements)
                    for k in (1, 2, 3, 4, 5, 6, 7, 8)]
            for small, big in zip(kept, kept[1:]):
                assert small <= big


class TestDecodeSemantic:
    def test_round_trip_lossless_at_high_budget(self):
        rng = random.Random(7)
        for _ in range(50):
            sc = random_scene(rng)
            if len(sc.elements) > 8:
                continue
            ctx = decode_semantic(encode_semantic(sc, HIGH, 0.0))
            assert set(ctx.elements) == set(sc.elements)

    def test_low_budget_context_contains_human(self):
        sc = scene(human(), SemanticElement("road", (1.0, 1.0)))
        ctx = decode_semantic(encode_semantic(sc, LinkQualityLevel("low", 1), 0.0))
        assert any(e.klass == "human" for e in ctx.elements)

    def test_affected_lanes_union_and_threats(self):
        sc = scene(human(lanes=("1",)), SemanticElement("road", (5.0, 5.0)))
        ctx = decode_semantic(encode_semantic(sc, HIGH, 0.0))
        assert ctx.affected_lanes == frozenset({"1"})
        assert ctx.threat_positions == (human().position,)

    def test_out_of_order_scores_rejected(self):
        msg = encode_semantic(scene(human(), SemanticElement("road", (1.0, 1.0))), HIGH, 0.0)
        bad = type(msg)(elements=tuple(reversed(msg.elements)),
                        scores=tuple(reversed(msg.scores)),
                        cause=msg.cause, timestamp=msg.timestamp, budget=msg.budget)
        with pytest.raises(MessageError):
            decode_semantic(bad)

    def test_over_budget_rejected(self):
        msg = encode_semantic(scene(human(), SemanticElement("road", (1.0, 1.0))), HIGH, 0.0)
        bad = type(msg)(elements=msg.elements, scores=msg.scores, cause=msg.cause,
                        timestamp=msg.timestamp, budget=1)
        with pytest.raises(MessageError):
            decode_semantic(bad)

    def test_wire_round_trip(self):
        rng = random.Random(11)
        sc = random_scene(rng)
        msg = encode_semantic(sc, HIGH, 9.9)
        assert message_from_bytes(msg.to_bytes()) == msg
