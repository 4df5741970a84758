/**
 * End-to-end console loop against a real server process, exercising the
 * release criteria: pad-driven base motion, click-driven mode changes
 * reflected in the badge, and the stall indicator on disconnect.
 */

import { ChildProcess, spawn } from "node:child_process";
import { mkdtempSync } from "node:fs";
import { tmpdir } from "node:os";
import { join } from "node:path";
import { afterAll, beforeAll, describe, expect, it } from "vitest";
import WebSocket from "ws";

import { TeleopClient } from "../src/client.js";
import { Snapshot, headPose } from "../src/protocol.js";
import { buildViewModel, modeBadge } from "../src/viewmodel.js";

const TICK_MS = 50;

let server: ChildProcess;
let url: string;
let client: TeleopClient;
const snapshots: Snapshot[] = [];

function sleep(ms: number): Promise<void> {
  return new Promise((resolve) => setTimeout(resolve, ms));
}

async function waitFor<T>(probe: () => T | undefined,
                          timeoutMs = 10_000): Promise<T> {
  const deadline = Date.now() + timeoutMs;
  while (Date.now() < deadline) {
    const value = probe();
    if (value !== undefined) return value;
    await sleep(10);
  }
  throw new Error("timed out waiting for condition");
}

async function singleClick(): Promise<void> {
  client.send({ type: "click", action: "press", t_ms: client.serverTimeMs() });
  await sleep(2 * TICK_MS);
  client.send({ type: "click", action: "release",
                t_ms: client.serverTimeMs() });
  // Let the multi-click settle window (400 ms) elapse so the gesture lands.
  await sleep(500);
}

beforeAll(async () => {
  const logDir = mkdtempSync(join(tmpdir(), "console-e2e-"));
  server = spawn("python3", ["-m", "headteleop",
                             "--listen", "127.0.0.1:0",
                             "--log-dir", logDir],
                 { stdio: ["ignore", "pipe", "pipe"] });
  let stdout = "";
  url = await new Promise<string>((resolve, reject) => {
    server.stdout!.on("data", (chunk: Buffer) => {
      stdout += chunk.toString();
      const m = stdout.match(/listening on (ws:\/\/[\d.]+:\d+)/);
      if (m) resolve(m[1]);
    });
    server.on("exit", (code) =>
      reject(new Error(`server exited early (${code}): ${stdout}`)));
    setTimeout(() => reject(new Error("server never announced its port")),
               10_000);
  });

  client = new TeleopClient(
    { url, makeSocket: (u) => new WebSocket(u) as never, stallAfterMs: 1000 },
    { onSnapshot: (s) => snapshots.push(s) },
  );
  client.connect();
  await waitFor(() => (client.status === "live" ? true : undefined));
}, 20_000);

afterAll(() => {
  client?.close();
  if (server && server.exitCode === null) server.kill("SIGKILL");
});

describe("console loop against a live server", () => {
  it("single click moves Idle -> RobotControl and the badge updates within "
     + "2 ticks", async () => {
    expect(client.latest!.mode.mode).toBe("idle");
    expect(modeBadge(client.latest!)).toBe("Idle");

    const before = snapshots.length;
    await singleClick();
    const flip = await waitFor(() =>
      snapshots.slice(before).find((s) => s.mode.mode === "robot"));

    // The badge is a pure function of the snapshot: the tick that
    // reports robot control already renders the robot badge (0-tick
    // lag, well within the 2-tick budget).
    expect(modeBadge(flip)).toBe("Robot · Drive");
    const index = snapshots.indexOf(flip);
    for (const later of snapshots.slice(index, index + 3)) {
      expect(modeBadge(later)).toBe("Robot · Drive");
    }
    expect(buildViewModel(flip, client.status).hud.calibrationPrompt)
      .toMatch(/initialize/);
  }, 20_000);

  it("pad top edge drives the base forward: strictly increasing positions "
     + "along the heading", async () => {
    // Initialization click: the pad rests centered, so the neutral
    // orientation is (0, 0) and full pitch is +35 deg from neutral.
    await singleClick();
    await waitFor(() => (client.latest!.mode.calibrated ? true : undefined));

    const heading = client.latest!.robot.heading;
    const along = (s: Snapshot) =>
      s.robot.x * Math.cos(heading) + s.robot.y * Math.sin(heading);

    const track: Snapshot[] = [];
    const stop = Date.now() + 1500;
    while (Date.now() < stop) {
      // Pad held at the top edge -> pitch +35 deg (saturated forward).
      client.send(headPose(35, 0, client.serverTimeMs()));
      const baseline = snapshots.length;
      await waitFor(() =>
        (snapshots.length > baseline ? true : undefined));
      track.push(snapshots[snapshots.length - 1]);
    }

    expect(track.length).toBeGreaterThan(10);
    const distances = track.map(along);
    for (let i = 1; i < distances.length; i++) {
      expect(distances[i]).toBeGreaterThan(distances[i - 1]);
    }
    // Full-speed sanity: 0.3 m/s for ~1.5 s.
    expect(distances[distances.length - 1] - distances[0])
      .toBeGreaterThan(0.2);
  }, 20_000);

  it("raises the stall indicator within 1 s of the server dying", async () => {
    expect(client.status).toBe("live");
    const killedAt = Date.now();
    server.kill("SIGKILL");
    await waitFor(() => (client.status !== "live" ? true : undefined), 3000);
    expect(Date.now() - killedAt).toBeLessThan(1000);
    expect(client.status).toBe("stalled");
    // The stalled view model raises the indicator and suppresses input.
    const vm = buildViewModel(client.latest!, client.status);
    expect(vm.hud.stalled).toBe(true);
    expect(client.send({ type: "reset" })).toBe(false);
  }, 20_000);
});
