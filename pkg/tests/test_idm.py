import math

import pytest
from hypothesis import given, settings, strategies as st

from semv2x.errors import CollisionError
from semv2x.idm import FREE_ROAD_GAP, IdmParams, desired_gap, idm_acceleration, step
from semv2x.world import LanePosition, VehicleState

P = IdmParams()


def vehicle(speed, offset=0.0):
    return VehicleState(id=0, pos=LanePosition("1", offset), speed=speed,
                        accel=0.0, route=("1",), spawn_time=0.0)


class TestDesiredGap:
    def test_stationary_equals_jam_gap(self):
        assert desired_gap(0.0, 0.0) == 2.0

    def test_hand_value_at_cruise(self):
        assert desired_gap(10.0, 0.0) == pytest.approx(17.0)

    def test_dynamic_term_clamped_at_zero(self):
        assert desired_gap(10.0, -20.0) == 2.0

    @given(st.floats(min_value=0.0, max_value=50.0),
           st.floats(min_value=-50.0, max_value=50.0))
    def test_never_below_jam_gap(self, v, dv):
        assert desired_gap(v, dv) >= P.s0


class TestIdmAcceleration:
    def test_equilibrium_at_desired_speed_free_road(self):
        assert abs(idm_acceleration(20.0, FREE_ROAD_GAP, 0.0)) < 1e-4

    def test_standstill_launch_is_full_acceleration(self):
        assert idm_acceleration(0.0, FREE_ROAD_GAP, 0.0) == pytest.approx(0.73, abs=1e-6)

    def test_hand_value_interaction_term(self):
        # v=10, gap=17, dv=0: s* = 17 so a = 0.73*(1 - 0.5^4 - 1) = -0.045625
        assert idm_acceleration(10.0, 17.0, 0.0) == pytest.approx(-0.045625, abs=1e-9)

    def test_non_positive_gap_is_a_fault(self):
        with pytest.raises(CollisionError):
            idm_acceleration(10.0, 0.0, 0.0)
        with pytest.raises(CollisionError):
            idm_acceleration(10.0, -1.0, 0.0)

    def test_brake_clamp(self):
        assert idm_acceleration(30.0, 1.0, 25.0) == -9.0

    @given(st.floats(min_value=0.0, max_value=40.0),
           st.floats(min_value=0.1, max_value=1e6),
           st.floats(min_value=-30.0, max_value=30.0))
    def test_bounded_above_by_a_max(self, v, gap, dv):
        assert idm_acceleration(v, gap, dv) <= P.a_max


class TestStep:
    def test_free_road_equilibrium_advance(self):
        v1 = step(vehicle(20.0), None, 0.1, P)
        assert v1.speed == pytest.approx(20.0, abs=1e-3)
        assert v1.pos.offset == pytest.approx(2.0, abs=1e-3)

    def test_speed_never_negative_under_max_braking(self):
        slow = vehicle(1.0)
        out = step(slow, (1.2, 0.0), 0.1, P)  # hard braking situation
        assert out.speed >= 0.0

    def test_hand_integration_platoon_of_two(self):
        follower = vehicle(10.0)
        out = step(follower, (17.0, 10.0), 0.1, P)
        assert out.speed == pytest.approx(9.9954375, abs=1e-6)

    def test_explicit_speed_update_consistency(self):
        v0 = vehicle(12.0)
        out = step(v0, (40.0, 10.0), 0.1, P)
        a = idm_acceleration(12.0, 40.0, 2.0)
        assert abs((out.speed - v0.speed) / 0.1 - a) < 1e-9

    def test_accel_cap_applies(self):
        out = step(vehicle(5.0), None, 0.1, P, accel_cap=-2.0)
        assert out.accel == -2.0

    @given(st.lists(st.tuples(st.floats(min_value=0.5, max_value=200.0),
                              st.floats(min_value=0.0, max_value=30.0)),
                    min_size=1, max_size=50))
    @settings(max_examples=50)
    def test_speed_nonnegative_for_any_leader_sequence(self, leaders):
        v = vehicle(20.0)
        for gap, lead_speed in leaders:
            v = step(v, (gap, lead_speed), 0.1, P)
            assert v.speed >= 0.0


class TestFollowingProperties:
    def test_single_follower_converges_behind_constant_leader(self):
        # leader fixed at 20 m/s; follower starts 32 m behind at 20 m/s
        dt = 0.1
        gap, speed = 32.0, 20.0
        accel_history = []
        for _ in range(3000):  # 300 s
            a = idm_acceleration(speed, gap, speed - 20.0)
            new_speed = max(0.0, speed + a * dt)
            gap += (20.0 - new_speed) * dt
            speed = new_speed
            accel_history.append(a)
        assert all(abs(a) < 1e-3 for a in accel_history[-500:])
        assert gap > 0

    def test_no_collision_when_leader_brakes_comfortably_to_stop(self):
        dt = 0.1
        lead_speed, lead_pos = 20.0, 150.0
        speed, pos = 20.0, 0.0
        min_gap = math.inf
        for k in range(1200):  # 120 s
            lead_speed = max(0.0, lead_speed - P.b * dt)
            lead_pos += lead_speed * dt
            gap = lead_pos - pos
            min_gap = min(min_gap, gap)
            a = idm_acceleration(speed, gap, speed - lead_speed)
            speed = max(0.0, speed + a * dt)
            pos += speed * dt
        assert min_gap > 0.0
        assert lead_pos - pos > 0.0
