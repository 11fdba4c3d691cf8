"""Deterministic simulated world: free-flying parallel gripper, grasped-object
mechanics (compliance, friction, slip, damage), and a synthetic tactile
imprint renderer.

All randomness is derived from (seed, tick, sensor) so identical seeds and
command streams produce bit-identical state and frame streams.
"""

from __future__ import annotations

import enum
import json
from dataclasses import dataclass
from importlib import resources

import numpy as np

from .commands import RobotCommand
from .frames import TactileFrame

GRAVITY = 9.81


class ObjectStatus(enum.Enum):
    FREE = "free"
    GRASPED = "grasped"
    ATTACHED = "attached"
    SLIPPING = "slipping"
    DROPPED = "dropped"
    DAMAGED = "damaged"
    DELIVERED = "delivered"


@dataclass(frozen=True)
class ObjectModel:
    name: str
    rest_width: float            # m, uncompressed width between fingers
    stiffness: float             # N/m
    friction_coefficient: float
    mass: float                  # kg
    damage_compression: float    # m, penetration beyond which damage latches
    stem_force: float            # N, detach resistance (0 = unattached)
    initial_pose: tuple[float, float, float]

    def __post_init__(self):
        if min(self.rest_width, self.stiffness, self.friction_coefficient, self.mass) <= 0:
            raise ValueError("physical quantities must be positive")
        if not 0 < self.damage_compression <= self.rest_width:
            raise ValueError("need 0 < damage_compression <= rest_width")


def load_object_presets(path=None) -> dict[str, ObjectModel]:
    if path is not None:
        raw = json.loads(open(path).read())
    else:
        raw = json.loads(resources.files("tactile_teleop.data")
                         .joinpath("objects.json").read_text())
    return {name: ObjectModel(name=name,
                              rest_width=v["rest_width"], stiffness=v["stiffness"],
                              friction_coefficient=v["friction_coefficient"],
                              mass=v["mass"], damage_compression=v["damage_compression"],
                              stem_force=v["stem_force"],
                              initial_pose=tuple(v["initial_pose"]))
            for name, v in raw.items()}


@dataclass(frozen=True)
class SimParams:
    opening_max: float = 0.08
    finger_length: float = 0.03        # m, tactile view span along the finger
    capture_radius: float = 0.02       # m, lateral reach of the finger pads
    slip_gain: float = 0.1             # m/s of relative slip per N of hold deficit
    release_offset: float = 0.012      # m of relative slip before the object escapes
    table_z: float = 0.0
    goal_center: tuple[float, float, float] = (0.25, 0.0, 0.19)
    goal_radius: float = 0.1
    keepout_center: tuple[float, float, float] = (0.12, 0.0, 0.1)
    keepout_radius: float = 0.04
    stem_max_extension: float = 0.01
    # imprint rendering (pixel values for a 64px frame, scaled with frame size)
    imprint_base_radius: float = 10.0
    imprint_ref_force: float = 0.4
    imprint_base_delta: float = 0.15
    imprint_force_delta: float = 0.5
    gel_color: tuple[float, float, float] = (0.45, 0.45, 0.5)


@dataclass
class GripperState:
    position: np.ndarray           # (3,) m
    orientation: np.ndarray        # (3,) rad, rpy
    opening: float
    opening_setpoint: float


@dataclass
class WorldState:
    tick: int
    gripper: GripperState
    object_position: np.ndarray
    model: ObjectModel
    params: SimParams
    seed: int
    frame_size: int = 64
    noise_amplitude: float = 0.02
    slip_offset: float = 0.0       # m, downward offset of the object in the grasp
    in_contact: bool = False
    slipping: bool = False
    detached: bool = False
    damaged: bool = False
    dropped: bool = False
    delivered: bool = False
    keepout_incursions: int = 0

    @property
    def normal_force(self) -> float:
        if not self.in_contact:
            return 0.0
        return self.model.stiffness * max(0.0, self.model.rest_width - self.gripper.opening)

    @property
    def status(self) -> ObjectStatus:
        if self.damaged:
            return ObjectStatus.DAMAGED
        if self.dropped:
            return ObjectStatus.DROPPED
        if self.delivered:
            return ObjectStatus.DELIVERED
        if self.slipping:
            return ObjectStatus.SLIPPING
        if self.in_contact:
            if self.model.stem_force > 0 and not self.detached:
                return ObjectStatus.ATTACHED
            return ObjectStatus.GRASPED
        return ObjectStatus.FREE


def make_world(model: ObjectModel, seed: int, params: SimParams = SimParams(),
               frame_size: int = 64, noise_amplitude: float = 0.02) -> WorldState:
    """World with the gripper poised at the object's grasp point, fully open."""
    pos = np.array(model.initial_pose, dtype=np.float64)
    gripper = GripperState(position=pos.copy(), orientation=np.zeros(3),
                           opening=params.opening_max,
                           opening_setpoint=params.opening_max)
    return WorldState(tick=0, gripper=gripper, object_position=pos.copy(),
                      model=model, params=params, seed=seed,
                      frame_size=frame_size, noise_amplitude=noise_amplitude)


def apply_tighten(world: WorldState, delta: float) -> None:
    """Decrease the opening setpoint; executed at gripper speed, not a teleport."""
    world.gripper.opening_setpoint = max(0.0, world.gripper.opening_setpoint - delta)


def step_physics(world: WorldState, command: RobotCommand, dt: float,
                 gripper_speed: float) -> WorldState:
    """Advance the world by one tick under the given robot command."""
    if dt <= 0:
        raise ValueError("dt must be positive")
    p = world.params
    m = world.model
    g = world.gripper

    # gripper opening: trigger velocity moves the setpoint, the jaws track it
    g.opening_setpoint = float(np.clip(
        g.opening_setpoint + command.gripper_velocity * dt, 0.0, p.opening_max))
    max_step = gripper_speed * dt
    g.opening += float(np.clip(g.opening_setpoint - g.opening, -max_step, max_step))

    # gripper pose: first-order integration of the commanded twist
    g.position = g.position + np.asarray(command.twist[:3]) * dt
    g.orientation = g.orientation + np.asarray(command.twist[3:]) * dt

    obj = world.object_position
    rest_z = float(m.initial_pose[2])

    lateral = np.hypot(g.position[0] - obj[0], g.position[1] - obj[1])
    vertical = abs(g.position[2] - obj[2])
    between_fingers = (lateral < p.capture_radius
                       and vertical < p.finger_length / 2
                       and not world.dropped)
    penetration = max(0.0, m.rest_width - g.opening) if between_fingers else 0.0
    world.in_contact = penetration > 0.0

    if penetration > m.damage_compression:
        world.damaged = True

    world.slipping = False
    offset_before = world.slip_offset
    if world.in_contact:
        force = m.stiffness * penetration
        hold = 2.0 * m.friction_coefficient * force

        load = m.mass * GRAVITY
        if m.stem_force > 0 and not world.detached:
            anchor = np.array(m.initial_pose)
            extension = float(np.linalg.norm(g.position - anchor))
            if extension > p.stem_max_extension:
                if hold >= m.stem_force:
                    world.detached = True
                else:
                    load += m.stem_force  # stem resists; grasp will slip instead

        can_follow = world.detached or m.stem_force == 0
        if hold < load:
            world.slip_offset += p.slip_gain * (load - hold) * dt
        if can_follow:
            obj = np.array([g.position[0], g.position[1],
                            g.position[2] - world.slip_offset])
    else:
        world.slip_offset = max(0.0, g.position[2] - obj[2])
        # a free object settles back to its rest height at a fixed drop speed
        if obj[2] > rest_z:
            obj = obj.copy()
            obj[2] = max(rest_z, obj[2] - 0.5 * dt * GRAVITY)
        if obj[2] <= p.table_z:
            world.dropped = True

    # the table braces the object: it cannot be dragged below its rest height
    if world.in_contact and obj[2] < rest_z:
        obj = obj.copy()
        obj[2] = rest_z
        world.slip_offset = max(0.0, g.position[2] - rest_z)

    # slipping means the object actually moved through the fingers this tick
    world.slipping = world.in_contact and world.slip_offset > offset_before + 1e-12
    if world.in_contact and world.slip_offset > p.release_offset:
        world.dropped = True
        world.in_contact = False
        world.slipping = False

    world.object_position = obj

    if (not world.dropped and not world.damaged
            and np.linalg.norm(world.object_position - np.array(p.goal_center)) < p.goal_radius):
        world.delivered = True
    if np.linalg.norm(g.position - np.array(p.keepout_center)) < p.keepout_radius:
        world.keepout_incursions += 1

    world.tick += 1
    return world


def render_tactile(world: WorldState, sensor_id: int) -> TactileFrame:
    """Synthesize the tactile image for one sensor at the current tick.

    Pure function of the world: the noise stream is keyed on
    (seed, tick, sensor) so re-rendering any state is reproducible.
    """
    n = world.frame_size
    p = world.params
    rng = np.random.default_rng(np.random.SeedSequence(
        entropy=world.seed, spawn_key=(world.tick, sensor_id)))
    pixels = np.array(p.gel_color, dtype=np.float64) * np.ones((n, n, 3))
    pixels += rng.uniform(-world.noise_amplitude, world.noise_amplitude, size=(n, n, 3))

    force = world.normal_force
    if force > 0.0:
        scale = n / 64.0
        radius = p.imprint_base_radius * scale * np.sqrt(force / p.imprint_ref_force)
        delta = min(p.imprint_base_delta + p.imprint_force_delta * force, 0.45)
        px_per_m = n / p.finger_length
        row_c = n / 2.0 + world.slip_offset * px_per_m
        col_c = n / 2.0 + (1.0 if sensor_id == 1 else -1.0) * scale
        rows = np.arange(n)[:, None]
        cols = np.arange(n)[None, :]
        mask = (((rows - row_c) / (1.1 * radius)) ** 2
                + ((cols - col_c) / (0.9 * radius)) ** 2) <= 1.0
        bump = np.zeros((n, n, 3))
        bump[mask] = np.array([delta, 0.65 * delta, 0.65 * delta])
        pixels += bump

    return TactileFrame(sensor_id=sensor_id, tick=world.tick,
                        pixels=np.clip(pixels, 0.0, 1.0))
