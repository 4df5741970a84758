"""Deterministic fixed-timestep kinematic world.

Objects are labeled rigid tokens; grasping is a radius test at the
end-effector (close to attach the nearest graspable object, open to
release in place).  Scenarios bundle an initial world, default query
labels, named drop zones, and a completion predicate, and can also be
loaded from a declarative YAML scene file.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field, replace

import yaml

from .kinematics import (JointVelocityCommand, RobotGeometry, RobotState,
                         forward_kinematics, integrate)

DEFAULT_DT = 0.05  # 20 Hz command cadence


class UnknownScenarioError(KeyError):
    pass


@dataclass(frozen=True)
class WorldObject:
    id: str
    label: str
    position: tuple[float, float, float]
    grasp_radius: float = 0.06
    graspable: bool = True

    def __post_init__(self):
        if self.grasp_radius <= 0:
            raise ValueError("grasp_radius must be > 0")


@dataclass(frozen=True)
class WorldState:
    robot: RobotState
    objects: tuple[WorldObject, ...] = ()
    attached_object: str | None = None
    tick: int = 0
    sim_time: float = 0.0

    def object_by_id(self, oid: str) -> WorldObject:
        for obj in self.objects:
            if obj.id == oid:
                return obj
        raise KeyError(oid)


@dataclass(frozen=True)
class Zone:
    center: tuple[float, float]  # planar, m
    radius: float

    def contains(self, position: tuple[float, float, float]) -> bool:
        return math.hypot(position[0] - self.center[0],
                          position[1] - self.center[1]) <= self.radius


# Completion rules: ("object_in_zone", object_id, zone_name) requires the
# object to be detached and inside the zone; ("all_of", [rules...]) nests.
CompletionRule = tuple


@dataclass(frozen=True)
class Scenario:
    name: str
    world: WorldState
    queries: tuple[str, ...] = ()
    zones: dict[str, Zone] = field(default_factory=dict)
    completion: CompletionRule = ("never",)
    description: str = ""
    bounds: tuple[tuple[float, float], tuple[float, float]] | None = None


def step(world: WorldState, cmd: JointVelocityCommand, dt: float,
         geom: RobotGeometry = RobotGeometry(),
         bounds=None) -> WorldState:
    """Advance the world one tick: integrate the robot, apply the
    grasp/release rules, and carry any attached object with the
    end-effector."""
    robot = integrate(world.robot, cmd, dt, geom)
    if bounds is not None:
        (xmin, xmax), (ymin, ymax) = bounds
        robot = replace(robot, x=min(max(robot.x, xmin), xmax),
                        y=min(max(robot.y, ymin), ymax))
    ee = forward_kinematics(robot, geom).position

    attached = world.attached_object
    objects = list(world.objects)

    if cmd.gripper < 0 and attached is None:
        best = None
        best_d = math.inf
        for obj in objects:
            if not obj.graspable:
                continue
            d = math.dist(obj.position, ee)
            if d <= obj.grasp_radius and d < best_d:
                best, best_d = obj, d
        if best is not None:
            attached = best.id
    elif cmd.gripper > 0 and attached is not None:
        attached = None

    if attached is not None:
        objects = [replace(o, position=ee) if o.id == attached else o
                   for o in objects]

    return WorldState(robot=robot, objects=tuple(objects),
                      attached_object=attached, tick=world.tick + 1,
                      sim_time=(world.tick + 1) * dt)


def check_completion(scenario: Scenario, world: WorldState) -> bool:
    return _eval_rule(scenario.completion, scenario, world)


def _eval_rule(rule: CompletionRule, scenario: Scenario, world: WorldState) -> bool:
    kind = rule[0]
    if kind == "never":
        return False
    if kind == "all_of":
        return all(_eval_rule(r, scenario, world) for r in rule[1])
    if kind == "object_in_zone":
        _, oid, zone_name = rule
        if world.attached_object == oid:
            return False
        obj = world.object_by_id(oid)
        return scenario.zones[zone_name].contains(obj.position)
    raise ValueError(f"unknown completion rule {kind!r}")


def _start_robot(**kw) -> RobotState:
    base = dict(x=0.0, y=0.0, heading=0.0, lift=0.6, extension=0.0,
                wrist=0.0, gripper=0.8)
    base.update(kw)
    return RobotState(**base)


def _builtin_scenarios() -> dict[str, Scenario]:
    scenarios = {}

    # A drink can ~3 m out among non-matching clutter; done when the can
    # is released inside the drop zone near the start.
    scenarios["fetch_redbull"] = Scenario(
        name="fetch_redbull",
        world=WorldState(robot=_start_robot(), objects=(
            WorldObject("can1", "red bull can", (3.0, -0.56, 0.75)),
            WorldObject("bottle1", "water bottle", (3.35, -0.62, 0.78)),
            WorldObject("mug1", "coffee mug", (2.68, -0.66, 0.74)),
        )),
        queries=("red bull", "can"),
        zones={"drop": Zone((1.0, -0.56), 0.30)},
        completion=("object_in_zone", "can1", "drop"),
        description="Fetch the drink can and release it in the drop zone.",
    )

    # Two cups 1.2 m apart; both must end up released at the table end.
    scenarios["two_cups"] = Scenario(
        name="two_cups",
        world=WorldState(robot=_start_robot(), objects=(
            WorldObject("cup1", "blue cup", (1.2, -0.56, 0.70)),
            WorldObject("cup2", "green cup", (2.4, -0.56, 0.70)),
        )),
        queries=("cup", "tumbler"),
        zones={"table_end": Zone((0.2, -0.56), 0.25)},
        completion=("all_of", (("object_in_zone", "cup1", "table_end"),
                               ("object_in_zone", "cup2", "table_end"))),
        description="Move both cups to the end of the table.",
    )

    # A towel on the bed goes into the laundry basket.
    scenarios["soiled_towel"] = Scenario(
        name="soiled_towel",
        world=WorldState(robot=_start_robot(), objects=(
            WorldObject("towel1", "soiled towel", (1.5, -0.56, 0.55)),
        )),
        queries=("cloth", "towel"),
        zones={"basket": Zone((0.3, -1.0), 0.30)},
        completion=("object_in_zone", "towel1", "basket"),
        description="Drop the towel into the laundry basket.",
    )

    # Staged stand-in for the cloth-manipulation routine: rigid tokens
    # moved through waypoint zones (no deformable model at desk scale).
    scenarios["blanket_tissue_trash_lite"] = Scenario(
        name="blanket_tissue_trash_lite",
        world=WorldState(robot=_start_robot(), objects=(
            WorldObject("blanket1", "blanket", (0.8, -0.56, 0.50)),
            WorldObject("tissue1", "tissue", (1.6, -0.56, 0.60)),
        )),
        queries=("blanket", "tissue"),
        zones={"foot_of_bed": Zone((0.8, -1.2), 0.30),
               "face": Zone((2.4, -0.56), 0.25),
               "trash": Zone((2.4, -1.2), 0.25)},
        completion=("all_of", (("object_in_zone", "blanket1", "foot_of_bed"),
                               ("object_in_zone", "tissue1", "trash"))),
        description="Blanket to the foot of the bed, tissue to the trash.",
    )
    return scenarios


BUILTIN_SCENARIOS = _builtin_scenarios()


def load_scenario(name: str) -> Scenario:
    try:
        return BUILTIN_SCENARIOS[name]
    except KeyError:
        raise UnknownScenarioError(
            f"unknown scenario {name!r}; available: "
            + ", ".join(sorted(BUILTIN_SCENARIOS))) from None


def scenario_from_dict(doc: dict) -> Scenario:
    """Build a scenario from the declarative scene-file schema."""
    robot = _start_robot(**doc.get("robot", {}))
    objects = tuple(
        WorldObject(o["id"], o["label"], tuple(o["position"]),
                    grasp_radius=o.get("grasp_radius", 0.06),
                    graspable=o.get("graspable", True))
        for o in doc.get("objects", []))
    zones = {name: Zone(tuple(z["center"]), z["radius"])
             for name, z in doc.get("zones", {}).items()}
    completion = _rule_from_doc(doc.get("completion", {"never": True}))
    bounds = None
    if "bounds" in doc:
        b = doc["bounds"]
        bounds = ((b["x"][0], b["x"][1]), (b["y"][0], b["y"][1]))
    return Scenario(name=doc["name"], world=WorldState(robot=robot, objects=objects),
                    queries=tuple(doc.get("queries", [])), zones=zones,
                    completion=completion,
                    description=doc.get("description", ""), bounds=bounds)


def _rule_from_doc(doc: dict) -> CompletionRule:
    if "never" in doc:
        return ("never",)
    if "all_of" in doc:
        return ("all_of", tuple(_rule_from_doc(d) for d in doc["all_of"]))
    if "object_in_zone" in doc:
        spec = doc["object_in_zone"]
        return ("object_in_zone", spec["object"], spec["zone"])
    raise ValueError(f"unknown completion rule in scene file: {sorted(doc)}")


def load_scenario_file(path: str) -> Scenario:
    with open(path) as f:
        return scenario_from_dict(yaml.safe_load(f))
