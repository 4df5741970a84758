/**
 * The input pad: a square control emulating the head-worn sensor.
 * Pad displacement maps linearly to pitch/yaw degrees within the
 * saturation band; releasing the pad springs it back to center (the
 * deadzone) since a desk operator cannot hold an angle the way a neck
 * does.  Arrow keys slew the pad at a configurable rate.
 */

export interface PadConfig {
  /** Degrees at the pad edge; matches the mapping saturation band. */
  maxDeg: number;
  /** Fraction of displacement removed per second when released. */
  springRate: number;
  /** Arrow-key slew, in degrees per second. */
  keyDegPerS: number;
}

export const DEFAULT_PAD: PadConfig = {
  maxDeg: 35,
  springRate: 8,
  keyDegPerS: 60,
};

export interface PadAngles {
  pitchDeg: number;
  yawDeg: number;
}

/**
 * Pad coordinates are normalized to [-1, 1] on both axes: +y is the
 * top edge (head pitched up, robot forward), +x is the left edge
 * (head yawed left, positive yaw).
 */
export function padToAngles(nx: number, ny: number,
                            cfg: PadConfig = DEFAULT_PAD): PadAngles {
  const clamp = (v: number) => Math.max(-1, Math.min(1, v));
  return {
    pitchDeg: clamp(ny) * cfg.maxDeg,
    yawDeg: clamp(nx) * cfg.maxDeg,
  };
}

/** Convert a pointer position within the pad element to normalized coords. */
export function pointerToPad(px: number, py: number, width: number,
                             height: number): { nx: number; ny: number } {
  const nx = -((px / width) * 2 - 1) + 0;  // + 0 folds -0 into +0
  const ny = -((py / height) * 2 - 1) + 0; // screen y grows downward
  return { nx: Math.max(-1, Math.min(1, nx)), ny: Math.max(-1, Math.min(1, ny)) };
}

export class PadState {
  nx = 0;
  ny = 0;
  held = false;
  private keys = new Set<string>();

  constructor(private cfg: PadConfig = DEFAULT_PAD) {}

  moveTo(nx: number, ny: number): void {
    this.held = true;
    this.nx = Math.max(-1, Math.min(1, nx));
    this.ny = Math.max(-1, Math.min(1, ny));
  }

  release(): void {
    this.held = false;
  }

  keyDown(key: string): void {
    this.keys.add(key);
  }

  keyUp(key: string): void {
    this.keys.delete(key);
  }

  /** Advance spring-return and key slew by dt seconds. */
  step(dt: number): void {
    const slew = (this.cfg.keyDegPerS / this.cfg.maxDeg) * dt;
    let keyed = false;
    if (this.keys.has("ArrowUp")) { this.ny += slew; keyed = true; }
    if (this.keys.has("ArrowDown")) { this.ny -= slew; keyed = true; }
    if (this.keys.has("ArrowLeft")) { this.nx += slew; keyed = true; }
    if (this.keys.has("ArrowRight")) { this.nx -= slew; keyed = true; }
    if (keyed) {
      this.nx = Math.max(-1, Math.min(1, this.nx));
      this.ny = Math.max(-1, Math.min(1, this.ny));
      return;
    }
    if (!this.held) {
      const decay = Math.exp(-this.cfg.springRate * dt);
      this.nx *= decay;
      this.ny *= decay;
      if (Math.abs(this.nx) < 1e-3) this.nx = 0;
      if (Math.abs(this.ny) < 1e-3) this.ny = 0;
    }
  }

  angles(): PadAngles {
    return padToAngles(this.nx, this.ny, this.cfg);
  }
}
