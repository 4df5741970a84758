import { describe, expect, it } from "vitest";

import {
  click,
  headPose,
  parseFrame,
  serialize,
} from "../src/protocol.js";

const SNAPSHOT = {
  protocol_version: 1,
  tick: 42,
  scenario: "fetch_redbull",
  mode: {
    mode: "robot",
    submode: "drive",
    calibrated: true,
    assist_enabled: false,
    cursor_style: "velocity",
  },
  command: { v: 0.3, omega: 0, lift: 0, extension: 0, wrist: 0, gripper: 0 },
  robot: { x: 1.0, y: 0.0, heading: 0.0, lift: 0.6, extension: 0.0,
           wrist: 0.0, gripper: 0.8 },
  objects: [
    { id: "can1", label: "red bull can", position: [3.0, -0.56, 0.75],
      graspable: true },
  ],
  attached_object: null,
  assist: { enabled: false, alpha: 0, g_star: null, probabilities: {} },
  cursor: null,
  queries: ["red bull", "can"],
  completed: false,
  announcements: [],
  role: "authoritative",
};

describe("parseFrame", () => {
  it("parses a snapshot frame", () => {
    const frame = parseFrame(JSON.stringify(SNAPSHOT));
    expect(frame.kind).toBe("snapshot");
    if (frame.kind !== "snapshot") return;
    expect(frame.snapshot.tick).toBe(42);
    expect(frame.snapshot.mode.mode).toBe("robot");
    expect(frame.snapshot.objects[0].position).toEqual([3.0, -0.56, 0.75]);
  });

  it("tolerates unknown fields from a newer server", () => {
    const withExtra = { ...SNAPSHOT, battery_pct: 93,
                        mode: { ...SNAPSHOT.mode } };
    const frame = parseFrame(JSON.stringify(withExtra));
    expect(frame.kind).toBe("snapshot");
  });

  it("parses an error frame", () => {
    const frame = parseFrame('{"error":"field \'pitch_deg\': bad",' +
                             '"field":"pitch_deg"}');
    expect(frame.kind).toBe("error");
    if (frame.kind !== "error") return;
    expect(frame.error.field).toBe("pitch_deg");
  });

  it("rejects malformed snapshots", () => {
    expect(() => parseFrame('{"tick": "soon"}')).toThrow();
    expect(() => parseFrame("not json")).toThrow();
  });
});

describe("inbound builders", () => {
  it("builds head poses and clamps to the protocol bounds", () => {
    expect(headPose(12.5, -30, 1000)).toEqual({
      type: "head_pose", roll_deg: 0, pitch_deg: 12.5, yaw_deg: -30,
      t_ms: 1000,
    });
    expect(headPose(500, -500, 0).pitch_deg).toBe(180);
    expect(headPose(500, -500, 0).yaw_deg).toBe(-180);
  });

  it("builds clicks and serializes round-trip", () => {
    const msg = click("press", 123.5);
    expect(JSON.parse(serialize(msg))).toEqual({
      type: "click", action: "press", t_ms: 123.5,
    });
  });
});
