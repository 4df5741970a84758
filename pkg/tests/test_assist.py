import dataclasses
import math

import numpy as np
import pytest

from headteleop.assist import (EMPTY_INTENT, AssistConfig, GoalCandidate,
                               IntentEstimate, assist_command, detect_objects,
                               infer_intent)
from headteleop.kinematics import (JointVelocityCommand, RobotGeometry,
                                   RobotState, forward_kinematics, integrate)
from headteleop.mapping import ActuatorLimits
from headteleop.sim import WorldObject, WorldState

CFG = AssistConfig()
GEOM = RobotGeometry()
LIM = ActuatorLimits()


def goal(gid, pos, label=None):
    return GoalCandidate(gid, label or gid, pos)


# -- detection -------------------------------------------------------------

def make_world():
    return WorldState(robot=RobotState(), objects=(
        WorldObject("can1", "red bull can", (3.0, -0.5, 0.75)),
        WorldObject("cup1", "blue cup", (1.0, -0.5, 0.8)),
        WorldObject("box1", "cardboard box", (2.0, 0.5, 0.0)),
    ))


def test_detect_substring_case_insensitive():
    found = detect_objects(make_world(), ["Red Bull"])
    assert [g.id for g in found] == ["can1"]
    assert found[0].position == (3.0, -0.5, 0.75)


def test_detect_multiple_queries():
    found = detect_objects(make_world(), ["cup", "box"])
    assert sorted(g.id for g in found) == ["box1", "cup1"]


def test_detect_nothing():
    assert detect_objects(make_world(), ["banana"]) == []
    assert detect_objects(make_world(), []) == []


def test_detect_optional_noise_is_deterministic():
    cfg = AssistConfig(position_noise=0.01, noise_seed=42)
    a = detect_objects(make_world(), ["cup"], cfg)
    b = detect_objects(make_world(), ["cup"], cfg)
    assert a == b
    assert a[0].position != (1.0, -0.5, 0.8)


# -- intent inference ------------------------------------------------------

def test_intent_two_goal_worked_example():
    # [DERIVED] d1 = 0.1, d2 = 0.3 with rho = 5:
    # P1 = 1/(1 + 0.5) = 2/3, P2 = 1/(1 + 1.5) = 0.4, alpha = 2/3 - 2/5.
    ee = (0.0, 0.0, 0.0)
    goals = [goal("a", (0.1, 0.0, 0.0)), goal("b", (0.0, 0.3, 0.0))]
    est = infer_intent(goals, ee, CFG)
    assert est.g_star == "a"
    assert est.g_star_position == (0.1, 0.0, 0.0)
    assert est.probabilities["a"] == pytest.approx(2.0 / 3.0, abs=1e-12)
    assert est.probabilities["b"] == pytest.approx(0.4, abs=1e-12)
    assert est.confidence == pytest.approx(2.0 / 3.0 - 0.4, abs=1e-12)


def test_intent_singleton_confidence_is_probability():
    est = infer_intent([goal("a", (0.0, 0.2, 0.0))], (0.0, 0.0, 0.0), CFG)
    assert est.confidence == pytest.approx(0.5)
    assert est.g_star == "a"


def test_intent_zero_distance_certainty():
    est = infer_intent([goal("a", (1.0, 2.0, 0.5))], (1.0, 2.0, 0.5), CFG)
    assert est.probabilities["a"] == 1.0
    assert est.confidence == 1.0


def test_intent_empty():
    assert infer_intent([], (0.0, 0.0, 0.0), CFG) is EMPTY_INTENT


def test_intent_tie_breaks_to_lowest_id():
    goals = [goal("z9", (0.2, 0.0, 0.0)), goal("a1", (-0.2, 0.0, 0.0))]
    est = infer_intent(goals, (0.0, 0.0, 0.0), CFG)
    assert est.g_star == "a1"
    # Equidistant runner-up has equal probability: confidence collapses.
    assert est.confidence == pytest.approx(0.0, abs=1e-12)


def test_intent_probabilities_in_unit_interval():
    rng = np.random.default_rng(5)
    for _ in range(50):
        goals = [goal(f"g{i}", tuple(rng.uniform(-3, 3, 3)))
                 for i in range(rng.integers(1, 6))]
        est = infer_intent(goals, tuple(rng.uniform(-3, 3, 3)), CFG)
        assert all(0.0 < p <= 1.0 for p in est.probabilities.values())
        assert 0.0 <= est.confidence <= 1.0
        best = max(est.probabilities.values())
        assert est.probabilities[est.g_star] == pytest.approx(best)


# -- blended control -------------------------------------------------------

def intent_for(state, goal_pos, confidence=None):
    ee = forward_kinematics(state, GEOM).position
    est = infer_intent([goal("g", goal_pos)], ee, CFG)
    if confidence is not None:
        est = dataclasses.replace(est, confidence=confidence)
    return est


def test_zero_confidence_returns_user_command_bitwise():
    state = RobotState(lift=0.5, extension=0.2)
    u_h = JointVelocityCommand(base_forward=0.123456789,
                               base_rotation=-0.0456, lift=0.1,
                               extension=-0.05, wrist=0.2, gripper=1.5)
    est = intent_for(state, (2.0, -1.0, 0.8), confidence=0.0)
    assert assist_command(state, est, u_h, CFG, GEOM, LIM) is u_h


def test_no_goal_returns_user_command():
    u_h = JointVelocityCommand(base_forward=0.1)
    assert assist_command(RobotState(), EMPTY_INTENT, u_h, CFG, GEOM, LIM) is u_h


def test_masked_joints_never_assisted():
    # mask = diag(0,1,1,0,0): base forward, extension, and wrist can only
    # come from the user.
    rng = np.random.default_rng(11)
    for _ in range(200):
        state = RobotState(x=rng.uniform(-1, 1), y=rng.uniform(-1, 1),
                           heading=rng.uniform(-3, 3),
                           lift=rng.uniform(0.1, 1.0),
                           extension=rng.uniform(0.0, 0.5))
        est = intent_for(state, tuple(rng.uniform(-2, 2, 3)))
        u = assist_command(state, est, JointVelocityCommand(), CFG, GEOM, LIM)
        assert u.base_forward == 0.0
        assert u.extension == 0.0
        assert u.wrist == 0.0
        assert u.gripper == 0.0


def test_gripper_passthrough():
    state = RobotState(lift=0.5)
    est = intent_for(state, (1.0, -1.0, 0.8))
    u_h = JointVelocityCommand(gripper=-1.75)
    u = assist_command(state, est, u_h, CFG, GEOM, LIM)
    assert u.gripper == -1.75


def test_assist_pushes_lift_toward_goal():
    state = RobotState(lift=0.3, extension=0.2)
    above = intent_for(state, (0.0, -0.51, 0.9))
    below = intent_for(state, (0.0, -0.51, 0.1))
    up = assist_command(state, above, JointVelocityCommand(), CFG, GEOM, LIM)
    down = assist_command(state, below, JointVelocityCommand(), CFG, GEOM, LIM)
    assert up.lift > 0.0
    assert down.lift < 0.0


def test_active_joint_attenuation():
    # The assistive rotation term shrinks by exactly rho_c when the user
    # is commanding rotation themselves.
    state = RobotState(lift=0.5, extension=0.2)
    est = intent_for(state, (0.3, -0.6, 0.5))
    passive = assist_command(state, est, JointVelocityCommand(), CFG, GEOM, LIM)
    u_h = JointVelocityCommand(base_rotation=0.01)
    active = assist_command(state, est, u_h, CFG, GEOM, LIM)
    assist_passive = passive.base_rotation
    assist_active = active.base_rotation - u_h.base_rotation
    assert assist_passive != 0.0
    assert assist_active == pytest.approx(CFG.rho_c * assist_passive, rel=1e-9)
    # Lift is untouched by the user, so it is not attenuated.
    assert active.lift == pytest.approx(passive.lift, rel=1e-9)


def test_blended_command_respects_limits():
    state = RobotState(lift=0.1)
    est = intent_for(state, (5.0, 5.0, 1.0))  # far goal, large raw correction
    u_h = JointVelocityCommand(base_rotation=0.3, lift=0.26)
    u = assist_command(state, est, u_h, CFG, GEOM, LIM)
    assert abs(u.base_rotation) <= LIM.base_rotation + 1e-12
    assert abs(u.lift) <= LIM.lift + 1e-12


def test_assist_convergence_closed_loop():
    """With a still user, the masked controller alone aligns rotation
    and height to the goal and the errors shrink monotonically."""
    state = RobotState(lift=0.5, extension=0.2)
    bearing = math.radians(15.0)
    ee0 = forward_kinematics(state, GEOM).position
    r = math.hypot(ee0[0], ee0[1])
    target = (r * math.cos(math.atan2(ee0[1], ee0[0]) + bearing),
              r * math.sin(math.atan2(ee0[1], ee0[0]) + bearing),
              state.lift + 0.15)
    dt = 0.05
    prev_z = prev_b = None
    for tick in range(600):
        ee = forward_kinematics(state, GEOM).position
        est = infer_intent([goal("g", target)], ee, CFG)
        u = assist_command(state, est, JointVelocityCommand(), CFG, GEOM, LIM)
        state = integrate(state, u, dt, GEOM)
        ee = forward_kinematics(state, GEOM).position
        z_err = abs(target[2] - ee[2])
        b_err = abs(math.remainder(math.atan2(target[1], target[0])
                                   - math.atan2(ee[1], ee[0]), 2 * math.pi))
        if prev_z is not None:
            assert z_err <= prev_z + 1e-12
            assert b_err <= prev_b + 1e-12
        prev_z, prev_b = z_err, b_err
        if z_err < 0.005 and b_err < math.radians(0.5):
            break
    assert z_err < 0.005
    assert b_err < math.radians(0.5)


def test_config_validation():
    with pytest.raises(ValueError):
        AssistConfig(rho=0.0)
    with pytest.raises(ValueError):
        AssistConfig(rho_c=1.5)
    with pytest.raises(ValueError):
        GoalCandidate("g", "", (0, 0, 0))
    with pytest.raises(ValueError):
        GoalCandidate("g", "thing", (0, math.nan, 0))
