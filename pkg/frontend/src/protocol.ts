/**
 * Wire protocol types: inbound operator messages and the per-tick
 * snapshot broadcast by the server.  The console never invents state;
 * everything rendered comes from a parsed Snapshot.
 */

import { z } from "zod";

export const PROTOCOL_VERSION = 1;

// ---- inbound (console -> server) ----------------------------------------

export interface HeadPoseMessage {
  type: "head_pose";
  roll_deg: number;
  pitch_deg: number;
  yaw_deg: number;
  t_ms: number;
}

export interface ClickMessage {
  type: "click";
  action: "press" | "release";
  t_ms: number;
}

export interface QueryMessage {
  type: "query";
  labels: string[];
}

export interface ResetMessage {
  type: "reset";
}

export interface CursorTargetMessage {
  type: "cursor_target";
  style: "velocity" | "position";
}

export type InboundMessage =
  | HeadPoseMessage
  | ClickMessage
  | QueryMessage
  | ResetMessage
  | CursorTargetMessage;

export function headPose(pitchDeg: number, yawDeg: number, tMs: number,
                         rollDeg = 0): HeadPoseMessage {
  const clamp = (v: number) => Math.max(-180, Math.min(180, v));
  return {
    type: "head_pose",
    roll_deg: clamp(rollDeg),
    pitch_deg: clamp(pitchDeg),
    yaw_deg: clamp(yawDeg),
    t_ms: tMs,
  };
}

export function click(action: "press" | "release", tMs: number): ClickMessage {
  return { type: "click", action, t_ms: tMs };
}

// ---- outbound (server -> console) ---------------------------------------

const modeSchema = z.object({
  mode: z.enum(["idle", "robot", "cursor"]),
  submode: z.enum(["drive", "arm", "wrist"]),
  calibrated: z.boolean(),
  assist_enabled: z.boolean(),
  cursor_style: z.enum(["velocity", "position"]),
});

const commandSchema = z.object({
  v: z.number(),
  omega: z.number(),
  lift: z.number(),
  extension: z.number(),
  wrist: z.number(),
  gripper: z.number(),
});

const robotSchema = z.object({
  x: z.number(),
  y: z.number(),
  heading: z.number(),
  lift: z.number(),
  extension: z.number(),
  wrist: z.number(),
  gripper: z.number(),
});

const objectSchema = z.object({
  id: z.string(),
  label: z.string(),
  position: z.tuple([z.number(), z.number(), z.number()]),
  graspable: z.boolean(),
});

const assistSchema = z.object({
  enabled: z.boolean(),
  alpha: z.number(),
  g_star: z.string().nullable(),
  probabilities: z.record(z.number()),
});

const cursorSchema = z.object({
  x: z.number(),
  y: z.number(),
  style: z.enum(["velocity", "position"]),
}).nullable();

// .passthrough() keeps unknown fields from a newer server from breaking us.
export const snapshotSchema = z.object({
  protocol_version: z.number(),
  tick: z.number().int(),
  scenario: z.string(),
  mode: modeSchema,
  command: commandSchema,
  robot: robotSchema,
  objects: z.array(objectSchema),
  attached_object: z.string().nullable(),
  assist: assistSchema,
  cursor: cursorSchema,
  queries: z.array(z.string()),
  completed: z.boolean(),
  announcements: z.array(z.string()),
  role: z.enum(["authoritative", "observer"]).optional(),
}).passthrough();

export type Snapshot = z.infer<typeof snapshotSchema>;

const errorSchema = z.object({
  error: z.string(),
  field: z.string(),
}).passthrough();

export type ServerError = z.infer<typeof errorSchema>;

export type ServerFrame =
  | { kind: "snapshot"; snapshot: Snapshot }
  | { kind: "error"; error: ServerError };

/** Parse one raw websocket frame from the server. Throws on junk. */
export function parseFrame(raw: string): ServerFrame {
  const data: unknown = JSON.parse(raw);
  if (typeof data === "object" && data !== null && "error" in data) {
    return { kind: "error", error: errorSchema.parse(data) };
  }
  return { kind: "snapshot", snapshot: snapshotSchema.parse(data) };
}

export function serialize(msg: InboundMessage): string {
  return JSON.stringify(msg);
}
