/**
 * Browser entry point: wires the pad, clicker, HUD, and the two canvas
 * views (top-down world + gripper inset) to a server connection.
 */

import { TeleopClient } from "./client.js";
import { Clicker } from "./clicker.js";
import { PadState, pointerToPad } from "./pad.js";
import { Snapshot, headPose } from "./protocol.js";
import { ViewModel, buildViewModel, worldToScreen } from "./viewmodel.js";

const SEND_HZ = 20;
const WORLD_BOUNDS = { xMin: -1, xMax: 4.5, yMin: -2, yMax: 1.5 };

function el<T extends HTMLElement>(id: string): T {
  const node = document.getElementById(id);
  if (!node) throw new Error(`missing element #${id}`);
  return node as T;
}

function drawWorld(canvas: HTMLCanvasElement, vm: ViewModel): void {
  const ctx = canvas.getContext("2d");
  if (!ctx) return;
  const toScreen = worldToScreen(WORLD_BOUNDS, canvas.width, canvas.height);
  ctx.fillStyle = "#10141c";
  ctx.fillRect(0, 0, canvas.width, canvas.height);

  const base = toScreen(vm.world.base);
  const ray = toScreen(vm.world.headingRay);
  const scale =
    Math.hypot(ray.x - base.x, ray.y - base.y) / vm.world.bodyRadius;

  for (const obj of vm.world.objects) {
    const p = toScreen(obj.at);
    ctx.beginPath();
    ctx.arc(p.x, p.y, 0.06 * scale, 0, 2 * Math.PI);
    ctx.fillStyle = obj.attached ? "#ffd24d" : "#7fb2ff";
    ctx.fill();
    if (obj.highlighted) {
      ctx.beginPath();
      ctx.arc(p.x, p.y, 0.1 * scale, 0, 2 * Math.PI);
      ctx.strokeStyle = "#ffd24d";
      ctx.lineWidth = 2;
      ctx.stroke();
    }
    ctx.fillStyle = "#9aa7bd";
    ctx.font = "11px sans-serif";
    ctx.fillText(obj.label, p.x + 8, p.y - 8);
  }

  ctx.beginPath();
  ctx.arc(base.x, base.y, vm.world.bodyRadius * scale, 0, 2 * Math.PI);
  ctx.fillStyle = "#2d7dd2";
  ctx.fill();
  ctx.beginPath();
  ctx.moveTo(base.x, base.y);
  ctx.lineTo(ray.x, ray.y);
  ctx.strokeStyle = "#e8eefc";
  ctx.lineWidth = 3;
  ctx.stroke();

  const [mount, wrist, tip] = vm.world.arm.map(toScreen);
  ctx.beginPath();
  ctx.moveTo(mount.x, mount.y);
  ctx.lineTo(wrist.x, wrist.y);
  ctx.lineTo(tip.x, tip.y);
  ctx.strokeStyle = "#9be564";
  ctx.lineWidth = 4;
  ctx.stroke();
}

function drawGripper(canvas: HTMLCanvasElement, vm: ViewModel): void {
  const ctx = canvas.getContext("2d");
  if (!ctx) return;
  const { width, height } = canvas;
  ctx.fillStyle = "#151a24";
  ctx.fillRect(0, 0, width, height);
  ctx.save();
  ctx.translate(width / 2, height / 2);
  ctx.rotate(vm.gripper.wristAngleRad);
  const gap = 10 + vm.gripper.aperture * 40;
  ctx.strokeStyle = vm.gripper.holding ? "#ffd24d" : "#9be564";
  ctx.lineWidth = 6;
  for (const side of [-1, 1]) {
    ctx.beginPath();
    ctx.moveTo(side * gap, -35);
    ctx.lineTo(side * gap, 35);
    ctx.stroke();
  }
  ctx.restore();
  ctx.fillStyle = "#9aa7bd";
  ctx.font = "11px sans-serif";
  ctx.fillText(`lift ${vm.gripper.liftMeters.toFixed(2)} m`, 8, height - 24);
  ctx.fillText(`ext ${vm.gripper.extensionMeters.toFixed(2)} m`, 8, height - 10);
}

function renderHud(vm: ViewModel): void {
  el("mode-badge").textContent = vm.hud.modeBadge;
  el("status").textContent = vm.hud.statusLabel;
  el("status").className = vm.hud.stalled ? "stalled" : "live";
  el("stall-indicator").style.display = vm.hud.stalled ? "block" : "none";
  el("timer").textContent = vm.hud.taskTimer;
  el("calibration").textContent = vm.hud.calibrationPrompt ?? "";
  el("assist-state").textContent = vm.hud.assistEnabled
    ? `assist on · g* ${vm.hud.goalId ?? "—"}`
    : "assist off";
  el<HTMLElement>("confidence-fill").style.width =
    `${Math.round(vm.hud.confidence * 100)}%`;
  el("announcements").textContent = vm.hud.announcements.join(" · ");
  el("completed").style.display = vm.hud.completed ? "block" : "none";
}

export function start(): void {
  const url = new URLSearchParams(location.search).get("server")
    ?? "ws://127.0.0.1:8765";
  const pad = new PadState();
  let latest: Snapshot | null = null;

  const client = new TeleopClient(
    { url, makeSocket: (u) => new WebSocket(u) as never },
    {
      onSnapshot: (snapshot) => {
        latest = snapshot;
        const vm = buildViewModel(snapshot, client.status);
        renderHud(vm);
        drawWorld(el<HTMLCanvasElement>("world"), vm);
        drawGripper(el<HTMLCanvasElement>("gripper"), vm);
      },
      onStatus: () => {
        if (latest) renderHud(buildViewModel(latest, client.status));
        else el("stall-indicator").style.display =
          client.status === "live" ? "none" : "block";
      },
    },
  );
  client.connect();

  const clicker = new Clicker((msg) => client.send(msg),
                              () => client.serverTimeMs());
  const clickButton = el<HTMLButtonElement>("click-button");
  clickButton.addEventListener("pointerdown", () => clicker.press());
  clickButton.addEventListener("pointerup", () => clicker.release());
  clickButton.addEventListener("pointerleave", () => clicker.release());
  window.addEventListener("keydown", (ev) => {
    if (ev.code === "Space" && !ev.repeat) {
      ev.preventDefault();
      clicker.press();
    }
    if (ev.code.startsWith("Arrow")) pad.keyDown(ev.code);
  });
  window.addEventListener("keyup", (ev) => {
    if (ev.code === "Space") clicker.release();
    if (ev.code.startsWith("Arrow")) pad.keyUp(ev.code);
  });

  const padEl = el("pad");
  const knob = el("pad-knob");
  const updateKnob = () => {
    knob.style.left = `${50 - pad.nx * 50}%`;
    knob.style.top = `${50 - pad.ny * 50}%`;
  };
  padEl.addEventListener("pointerdown", (ev) => {
    padEl.setPointerCapture(ev.pointerId);
    const rect = padEl.getBoundingClientRect();
    const { nx, ny } = pointerToPad(ev.clientX - rect.left,
                                    ev.clientY - rect.top,
                                    rect.width, rect.height);
    pad.moveTo(nx, ny);
  });
  padEl.addEventListener("pointermove", (ev) => {
    if (!pad.held) return;
    const rect = padEl.getBoundingClientRect();
    const { nx, ny } = pointerToPad(ev.clientX - rect.left,
                                    ev.clientY - rect.top,
                                    rect.width, rect.height);
    pad.moveTo(nx, ny);
  });
  padEl.addEventListener("pointerup", () => pad.release());
  padEl.addEventListener("pointercancel", () => pad.release());

  el<HTMLButtonElement>("reset-button").addEventListener("click", () => {
    client.send({ type: "reset" });
  });
  el<HTMLButtonElement>("query-apply").addEventListener("click", () => {
    const raw = el<HTMLInputElement>("query-input").value;
    const labels = raw.split(",").map((s) => s.trim()).filter(Boolean);
    client.send({ type: "query", labels });
  });

  // Fixed-cadence input loop: pad angles stream at the server tick rate.
  let lastStep = performance.now();
  setInterval(() => {
    const now = performance.now();
    pad.step((now - lastStep) / 1000);
    lastStep = now;
    updateKnob();
    const { pitchDeg, yawDeg } = pad.angles();
    client.send(headPose(pitchDeg, yawDeg, client.serverTimeMs()));
  }, 1000 / SEND_HZ);
}

if (typeof document !== "undefined" && document.readyState !== "loading") {
  start();
} else if (typeof document !== "undefined") {
  document.addEventListener("DOMContentLoaded", start);
}
