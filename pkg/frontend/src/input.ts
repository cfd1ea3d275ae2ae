// Correction input: slider/drag position and W/S keys are sampled-and-held
// into one correction per client sampling period while engaged; letting go of
// everything emits exactly one zero so the server's sample-and-hold never
// replays a stale grip.

import { CorrectMessage } from "./protocol.js";

export const VERT_STEP = 0.1; // m/s per held W/S key

export class CorrectionInput {
    private tiltFraction = 0;   // -1..1 from slider or drag
    private vertSign: -1 | 0 | 1 = 0;
    private sliderHeld = false;
    private keyHeld = false;
    private releaseQueued = false;

    constructor(private rMax: number) {}

    setRateLimit(rMax: number): void {
        this.rMax = rMax;
    }

    get engaged(): boolean {
        return this.sliderHeld || this.keyHeld;
    }

    /** Slider/drag at `fraction` of full deflection; holding it at center is
     * still an engaged (zero-valued) input. */
    sliderEngage(fraction: number): void {
        this.tiltFraction = Math.min(1, Math.max(-1, fraction));
        this.sliderHeld = true;
    }

    sliderRelease(): void {
        if (!this.sliderHeld) return;
        this.tiltFraction = 0;
        this.sliderHeld = false;
        this.queueZeroIfIdle();
    }

    keyEngage(sign: -1 | 1): void {
        this.vertSign = sign;
        this.keyHeld = true;
    }

    keyRelease(): void {
        if (!this.keyHeld) return;
        this.vertSign = 0;
        this.keyHeld = false;
        this.queueZeroIfIdle();
    }

    private queueZeroIfIdle(): void {
        if (!this.engaged) this.releaseQueued = true;
    }

    /** Called once per sampling period: a correction while engaged, one zero
     * right after everything is released, nothing while idle. */
    sample(): CorrectMessage | null {
        if (this.engaged) {
            return {
                type: "correct",
                u_h_tilt: this.tiltFraction * this.rMax,
                u_h_vert: this.vertSign * VERT_STEP,
            };
        }
        if (this.releaseQueued) {
            this.releaseQueued = false;
            return { type: "correct", u_h_tilt: 0, u_h_vert: 0 };
        }
        return null;
    }
}
