/**
 * Pure view-model: everything the canvas and HUD need, computed from
 * the latest snapshot alone.  No simulation happens here; the console
 * renders server state and nothing else.
 */

import { ConnectionStatus } from "./client.js";
import { Snapshot } from "./protocol.js";

// Robot geometry used for drawing only (matches the server defaults).
export const ARM_MOUNT_OFFSET = 0.14;
export const GRIPPER_LENGTH = 0.17;
export const BODY_RADIUS = 0.17;

export interface Point {
  x: number;
  y: number;
}

export interface WorldView {
  /** Base footprint center and heading ray end, world meters. */
  base: Point;
  headingRay: Point;
  bodyRadius: number;
  /** Arm polyline: mount -> wrist joint -> gripper tip. */
  arm: [Point, Point, Point];
  objects: Array<{
    id: string;
    label: string;
    at: Point;
    highlighted: boolean;
    attached: boolean;
  }>;
}

export interface GripperInset {
  /** Jaw opening fraction, 0 closed .. 1 fully open. */
  aperture: number;
  wristAngleRad: number;
  liftMeters: number;
  extensionMeters: number;
  holding: string | null;
}

export interface HudModel {
  modeBadge: string;
  calibrationPrompt: string | null;
  assistEnabled: boolean;
  /** Confidence bar fill fraction in [0, 1]. */
  confidence: number;
  goalId: string | null;
  queries: string[];
  announcements: string[];
  taskTimer: string;
  completed: boolean;
  stalled: boolean;
  statusLabel: string;
  cursor: { x: number; y: number; style: string } | null;
}

export interface ViewModel {
  hud: HudModel;
  world: WorldView;
  gripper: GripperInset;
}

export function modeBadge(snapshot: Snapshot): string {
  const m = snapshot.mode;
  if (m.mode === "idle") return "Idle";
  if (m.mode === "cursor") return "Cursor";
  const sub = m.submode.charAt(0).toUpperCase() + m.submode.slice(1);
  return `Robot · ${sub}`;
}

export function formatTimer(tick: number, rateHz = 20): string {
  const total = Math.floor(tick / rateHz);
  const mm = Math.floor(total / 60);
  const ss = total % 60;
  return `${mm}:${ss.toString().padStart(2, "0")}`;
}

/** Arm geometry in world coordinates, mirroring the server's kinematics. */
export function armPoints(robot: Snapshot["robot"]): [Point, Point, Point] {
  const right = robot.heading - Math.PI / 2;
  const reach = ARM_MOUNT_OFFSET + robot.extension;
  const mount = { x: robot.x, y: robot.y };
  const wrist = {
    x: robot.x + reach * Math.cos(right),
    y: robot.y + reach * Math.sin(right),
  };
  const tipDir = right + robot.wrist;
  const tip = {
    x: wrist.x + GRIPPER_LENGTH * Math.cos(tipDir),
    y: wrist.y + GRIPPER_LENGTH * Math.sin(tipDir),
  };
  return [mount, wrist, tip];
}

export function buildViewModel(snapshot: Snapshot,
                               status: ConnectionStatus): ViewModel {
  const stalled = status !== "live";
  const m = snapshot.mode;
  const needsCalibration =
    (m.mode === "robot" || m.mode === "cursor") && !m.calibrated;

  const hud: HudModel = {
    modeBadge: modeBadge(snapshot),
    calibrationPrompt: needsCalibration
      ? "Click once to initialize at your current head orientation"
      : null,
    assistEnabled: snapshot.assist.enabled,
    confidence: Math.max(0, Math.min(1, snapshot.assist.alpha)),
    goalId: snapshot.assist.g_star,
    queries: snapshot.queries,
    announcements: snapshot.announcements,
    taskTimer: formatTimer(snapshot.tick),
    completed: snapshot.completed,
    stalled,
    statusLabel: stalled ? `connection ${status}` : "live",
    cursor: snapshot.cursor,
  };

  const arm = armPoints(snapshot.robot);
  const world: WorldView = {
    base: { x: snapshot.robot.x, y: snapshot.robot.y },
    headingRay: {
      x: snapshot.robot.x + BODY_RADIUS * Math.cos(snapshot.robot.heading),
      y: snapshot.robot.y + BODY_RADIUS * Math.sin(snapshot.robot.heading),
    },
    bodyRadius: BODY_RADIUS,
    arm,
    objects: snapshot.objects.map((o) => ({
      id: o.id,
      label: o.label,
      at: { x: o.position[0], y: o.position[1] },
      highlighted: o.id === snapshot.assist.g_star,
      attached: o.id === snapshot.attached_object,
    })),
  };

  const gripper: GripperInset = {
    aperture: Math.max(0, Math.min(1, snapshot.robot.gripper)),
    wristAngleRad: snapshot.robot.wrist,
    liftMeters: snapshot.robot.lift,
    extensionMeters: snapshot.robot.extension,
    holding: snapshot.attached_object,
  };

  return { hud, world, gripper };
}

/** Fit the world rectangle into a canvas, y flipped (screen y grows down). */
export function worldToScreen(bounds: { xMin: number; xMax: number;
                                        yMin: number; yMax: number },
                              width: number, height: number) {
  const sx = width / (bounds.xMax - bounds.xMin);
  const sy = height / (bounds.yMax - bounds.yMin);
  const s = Math.min(sx, sy);
  return (p: Point): Point => ({
    x: (p.x - bounds.xMin) * s,
    y: height - (p.y - bounds.yMin) * s,
  });
}
