import { describe, expect, it } from "vitest";

import { Snapshot, snapshotSchema } from "../src/protocol.js";
import {
  ARM_MOUNT_OFFSET,
  GRIPPER_LENGTH,
  armPoints,
  buildViewModel,
  formatTimer,
  modeBadge,
  worldToScreen,
} from "../src/viewmodel.js";

function makeSnapshot(overrides: Record<string, unknown> = {}): Snapshot {
  return snapshotSchema.parse({
    protocol_version: 1,
    tick: 0,
    scenario: "fetch_redbull",
    mode: { mode: "idle", submode: "drive", calibrated: false,
            assist_enabled: false, cursor_style: "velocity" },
    command: { v: 0, omega: 0, lift: 0, extension: 0, wrist: 0, gripper: 0 },
    robot: { x: 0, y: 0, heading: 0, lift: 0.6, extension: 0, wrist: 0,
             gripper: 0.8 },
    objects: [],
    attached_object: null,
    assist: { enabled: false, alpha: 0, g_star: null, probabilities: {} },
    cursor: null,
    queries: [],
    completed: false,
    announcements: [],
    ...overrides,
  });
}

describe("modeBadge", () => {
  it("renders each mode", () => {
    expect(modeBadge(makeSnapshot())).toBe("Idle");
    expect(modeBadge(makeSnapshot({
      mode: { mode: "robot", submode: "arm", calibrated: true,
              assist_enabled: false, cursor_style: "velocity" },
    }))).toBe("Robot · Arm");
    expect(modeBadge(makeSnapshot({
      mode: { mode: "cursor", submode: "drive", calibrated: true,
              assist_enabled: false, cursor_style: "velocity" },
    }))).toBe("Cursor");
  });
});

describe("formatTimer", () => {
  it("converts ticks at 20 Hz to m:ss", () => {
    expect(formatTimer(0)).toBe("0:00");
    expect(formatTimer(19)).toBe("0:00");
    expect(formatTimer(20)).toBe("0:01");
    expect(formatTimer(20 * 75)).toBe("1:15");
  });
});

describe("armPoints", () => {
  it("extends to the robot's right at heading 0", () => {
    const [mount, wrist, tip] = armPoints(makeSnapshot({
      robot: { x: 1, y: 2, heading: 0, lift: 0.5, extension: 0.2, wrist: 0,
               gripper: 0.5 },
    }).robot);
    expect(mount).toEqual({ x: 1, y: 2 });
    // Right of heading 0 is -y.
    expect(wrist.x).toBeCloseTo(1, 10);
    expect(wrist.y).toBeCloseTo(2 - (ARM_MOUNT_OFFSET + 0.2), 10);
    expect(tip.y).toBeCloseTo(wrist.y - GRIPPER_LENGTH, 10);
  });

  it("rotates rigidly with the base heading", () => {
    const [, , tip] = armPoints(makeSnapshot({
      robot: { x: 0, y: 0, heading: Math.PI / 2, lift: 0.5, extension: 0.1,
               wrist: 0.3, gripper: 0.5 },
    }).robot);
    const [, , tip0] = armPoints(makeSnapshot({
      robot: { x: 0, y: 0, heading: 0, lift: 0.5, extension: 0.1, wrist: 0.3,
               gripper: 0.5 },
    }).robot);
    // 90 degree rotation maps (x, y) -> (-y, x).
    expect(tip.x).toBeCloseTo(-tip0.y, 10);
    expect(tip.y).toBeCloseTo(tip0.x, 10);
  });
});

describe("buildViewModel", () => {
  it("shows the calibration prompt only when uncalibrated in a control mode",
     () => {
    const fresh = makeSnapshot({
      mode: { mode: "robot", submode: "drive", calibrated: false,
              assist_enabled: false, cursor_style: "velocity" },
    });
    expect(buildViewModel(fresh, "live").hud.calibrationPrompt).toMatch(
      /initialize/);
    expect(buildViewModel(makeSnapshot(), "live").hud.calibrationPrompt)
      .toBeNull();
  });

  it("renders the confidence bar and highlights g*", () => {
    const snap = makeSnapshot({
      objects: [
        { id: "can1", label: "red bull can", position: [3, -0.5, 0.75],
          graspable: true },
        { id: "mug1", label: "mug", position: [2, -0.5, 0.75],
          graspable: true },
      ],
      assist: { enabled: true, alpha: 0.27, g_star: "can1",
                probabilities: { can1: 0.6, mug1: 0.33 } },
    });
    const vm = buildViewModel(snap, "live");
    expect(vm.hud.confidence).toBeCloseTo(0.27);
    expect(vm.hud.assistEnabled).toBe(true);
    const flags = Object.fromEntries(
      vm.world.objects.map((o) => [o.id, o.highlighted]));
    expect(flags).toEqual({ can1: true, mug1: false });
  });

  it("marks the attached object and the gripper inset holding state", () => {
    const snap = makeSnapshot({
      objects: [{ id: "can1", label: "can", position: [0, -0.31, 0.6],
                  graspable: true }],
      attached_object: "can1",
    });
    const vm = buildViewModel(snap, "live");
    expect(vm.world.objects[0].attached).toBe(true);
    expect(vm.gripper.holding).toBe("can1");
  });

  it("raises the stall flag for any non-live status", () => {
    expect(buildViewModel(makeSnapshot(), "live").hud.stalled).toBe(false);
    expect(buildViewModel(makeSnapshot(), "stalled").hud.stalled).toBe(true);
    expect(buildViewModel(makeSnapshot(), "connecting").hud.stalled).toBe(true);
  });

  it("never simulates: the view model is a pure function of the snapshot",
     () => {
    const snap = makeSnapshot({ tick: 123 });
    const a = buildViewModel(snap, "live");
    const b = buildViewModel(snap, "live");
    expect(a).toEqual(b);
  });
});

describe("worldToScreen", () => {
  it("flips y and preserves aspect ratio", () => {
    const to = worldToScreen({ xMin: 0, xMax: 10, yMin: 0, yMax: 10 },
                             100, 100);
    expect(to({ x: 0, y: 0 })).toEqual({ x: 0, y: 100 });
    expect(to({ x: 10, y: 10 })).toEqual({ x: 100, y: 0 });
    expect(to({ x: 5, y: 5 })).toEqual({ x: 50, y: 50 });
  });
});
