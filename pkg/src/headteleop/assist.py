"""Driver assistance: goal detection, intent inference, and the
confidence-blended shared controller.

Detection is a ground-truth label matcher over the simulated world.
The inferred goal is the object nearest the end-effector; confidence
is the probability gap between the two nearest candidates and weights
a proportional alignment controller restricted (by a diagonal mask)
to base rotation and lift.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from .kinematics import (JointVelocityCommand, RobotGeometry, RobotState,
                         damped_pseudo_inverse, forward_kinematics, jacobian)
from .mapping import ActuatorLimits


@dataclass(frozen=True)
class GoalCandidate:
    id: str
    label: str
    position: tuple[float, float, float]  # world frame, m

    def __post_init__(self):
        if not self.label:
            raise ValueError("goal label must be nonempty")
        if not all(math.isfinite(c) for c in self.position):
            raise ValueError("goal position must be finite")


@dataclass(frozen=True)
class IntentEstimate:
    probabilities: dict[str, float]
    g_star: str | None
    g_star_position: tuple[float, float, float] | None
    confidence: float  # blending weight, in [0, 1]


EMPTY_INTENT = IntentEstimate({}, None, None, 0.0)


@dataclass(frozen=True)
class AssistConfig:
    rho: float = 5.0        # 1/m, distance-to-probability sharpness
    rho_c: float = 0.2      # attenuation on user-commanded joints
    # Diagonal gain mask over [v, w, lift, ext, wrist]: assistance may
    # move base rotation and lift only.
    kp_mask: tuple[float, ...] = (0.0, 1.0, 1.0, 0.0, 0.0)
    # Proportional gains for the unmasked joints (1/s).
    gains: tuple[float, ...] = (1.0, 4.0, 1.5, 1.0, 1.0)
    damping: float = 0.01   # pseudo-inverse damping
    position_noise: float = 0.0  # m, optional detector noise (testing)
    noise_seed: int = 0

    def __post_init__(self):
        if self.rho <= 0:
            raise ValueError("rho must be > 0")
        if not 0.0 <= self.rho_c <= 1.0:
            raise ValueError("rho_c must be in [0, 1]")


def detect_objects(world, queries: list[str],
                   cfg: AssistConfig = AssistConfig()) -> list[GoalCandidate]:
    """Ground-truth detector: world objects whose label contains any
    query, case-insensitive. Optional Gaussian position noise for
    robustness testing (off by default)."""
    lowered = [q.lower() for q in queries if q]
    rng = np.random.default_rng(cfg.noise_seed) if cfg.position_noise > 0 else None
    out = []
    for obj in world.objects:
        label = obj.label.lower()
        if any(q in label for q in lowered):
            pos = obj.position
            if rng is not None:
                pos = tuple(float(p + rng.normal(0.0, cfg.position_noise))
                            for p in pos)
            out.append(GoalCandidate(obj.id, obj.label, pos))
    return out


def infer_intent(goals: list[GoalCandidate], ee_position: tuple[float, float, float],
                 cfg: AssistConfig = AssistConfig()) -> IntentEstimate:
    """Distance-based goal probabilities and the top-two confidence gap.

    P(g) = 1 / (1 + rho * d(g)); the most probable goal is the nearest
    one (ties broken by lowest id for deterministic replay).  With a
    single candidate the confidence is P(g*) itself; with none it is 0.
    """
    if not goals:
        return EMPTY_INTENT
    ee = np.asarray(ee_position)
    dists = {g.id: float(np.linalg.norm(np.asarray(g.position) - ee))
             for g in goals}
    probs = {gid: 1.0 / (1.0 + cfg.rho * d) for gid, d in dists.items()}
    g_star = min(dists, key=lambda gid: (dists[gid], gid))
    if len(goals) == 1:
        conf = probs[g_star]
    else:
        runner_up = max(p for gid, p in probs.items() if gid != g_star)
        conf = probs[g_star] - runner_up
    conf = min(max(conf, 0.0), 1.0)
    star = next(g for g in goals if g.id == g_star)
    return IntentEstimate(probs, g_star, star.position, conf)


def assist_command(state: RobotState, intent: IntentEstimate,
                   u_h: JointVelocityCommand, cfg: AssistConfig,
                   geom: RobotGeometry,
                   limits: ActuatorLimits) -> JointVelocityCommand:
    """Blend the user's command with the masked alignment controller.

    u = u_h + alpha * u_a with u_a = mask . gains . Jdag(e); rows of
    u_a on joints the user is actively commanding are attenuated by
    rho_c.  The gripper channel passes through untouched and the
    result is saturated to the actuator limits.
    """
    if intent.g_star is None or intent.confidence == 0.0:
        return u_h
    ee = forward_kinematics(state, geom)
    e_world = np.asarray(intent.g_star_position) - np.asarray(ee.position)
    c, s = math.cos(state.heading), math.sin(state.heading)
    err = np.zeros(6)
    err[0] = c * e_world[0] + s * e_world[1]
    err[1] = -s * e_world[0] + c * e_world[1]
    err[2] = e_world[2]
    # Orientation error intentionally zero: assistance aligns position only.
    jdag = damped_pseudo_inverse(jacobian(state, geom), cfg.damping)
    u_a = np.asarray(cfg.kp_mask) * np.asarray(cfg.gains) * (jdag @ err)
    user = u_h.as_vector()
    u_a[user != 0.0] *= cfg.rho_c
    u = user + intent.confidence * u_a
    caps = np.array([limits.base_forward, limits.base_rotation, limits.lift,
                     limits.extension, limits.wrist])
    u = np.clip(u, -caps, caps)
    return JointVelocityCommand.from_vector(u, gripper=u_h.gripper)
