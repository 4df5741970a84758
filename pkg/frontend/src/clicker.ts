/**
 * Click emulation: one on-screen button plus keyboard Space, producing
 * press/release events with real timestamps so the server's gesture
 * timing (multi-click windows, press-and-hold) is exercised
 * authentically.  Key auto-repeat is filtered out.
 */

import { ClickMessage, click } from "./protocol.js";

export class Clicker {
  private down = false;

  constructor(private emit: (msg: ClickMessage) => void,
              private now: () => number = () => Date.now()) {}

  press(): void {
    if (this.down) return; // key auto-repeat or duplicate pointerdown
    this.down = true;
    this.emit(click("press", this.now()));
  }

  release(): void {
    if (!this.down) return;
    this.down = false;
    this.emit(click("release", this.now()));
  }

  get isDown(): boolean {
    return this.down;
  }
}
