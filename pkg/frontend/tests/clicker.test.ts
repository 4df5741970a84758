import { describe, expect, it } from "vitest";

import { Clicker } from "../src/clicker.js";
import { ClickMessage } from "../src/protocol.js";

describe("Clicker", () => {
  it("emits press/release pairs with timestamps", () => {
    const out: ClickMessage[] = [];
    let t = 100;
    const clicker = new Clicker((m) => out.push(m), () => t);
    clicker.press();
    t = 180;
    clicker.release();
    expect(out).toEqual([
      { type: "click", action: "press", t_ms: 100 },
      { type: "click", action: "release", t_ms: 180 },
    ]);
  });

  it("filters key auto-repeat and duplicate releases", () => {
    const out: ClickMessage[] = [];
    const clicker = new Clicker((m) => out.push(m), () => 0);
    clicker.press();
    clicker.press(); // auto-repeat
    clicker.press();
    clicker.release();
    clicker.release(); // pointerleave after pointerup
    expect(out.map((m) => m.action)).toEqual(["press", "release"]);
    expect(clicker.isDown).toBe(false);
  });
});
