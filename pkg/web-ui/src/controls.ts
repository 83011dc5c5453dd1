// Control surface model, kept free of real DOM so it can be driven by
// scripted gestures in tests. A binding turns input values into wire frames:
// at most one frame per animation tick (latest value wins), and nothing at
// all while the control is faded out.

import { buildMessage, encodeWire, DEFAULT_TOPIC, VALUE14_MAX } from "./wire.js";

export type ControlKind = "slider" | "button";

export interface ControlSpec {
    id: string;
    kind: ControlKind;
    x: number;
    y: number;
    channel: number;
    event?: string;
}

export const BUTTON_ON = VALUE14_MAX;
export const BUTTON_OFF = 0;

export type PublishFn = (frame: string) => void;

export class ControlBinding {
    readonly spec: ControlSpec;
    private readonly publish: PublishFn;
    private alpha = 1;
    private pending: number | null = null;

    constructor(spec: ControlSpec, publish: PublishFn) {
        this.spec = spec;
        this.publish = publish;
    }

    /** Latest slider position; coalesced until the next tick. */
    input(value: number): void {
        if (this.alpha <= 0) {
            return; // faded out: the control is not on stage right now
        }
        this.pending = value;
    }

    press(): void {
        this.input(BUTTON_ON);
    }

    release(): void {
        this.input(BUTTON_OFF);
    }

    setVisibility(alpha: number): void {
        this.alpha = alpha;
        if (alpha <= 0) {
            this.pending = null;
        }
    }

    get visible(): boolean {
        return this.alpha > 0;
    }

    /** Flush at most one frame; call once per animation tick (~16 ms). */
    tick(): void {
        if (this.pending === null || this.alpha <= 0) {
            return;
        }
        const value = this.pending;
        this.pending = null;
        const { x, y, channel } = this.spec;
        this.publish(encodeWire(buildMessage(x, y, value, channel, this.spec.event ?? DEFAULT_TOPIC)));
    }
}

// Minimal element shapes so bindings attach to real DOM nodes in the page
// and to stubs in tests.

export interface SliderElementLike {
    value: string;
    addEventListener(type: "input", listener: () => void): void;
}

export interface ButtonElementLike {
    addEventListener(type: "pointerdown" | "pointerup", listener: () => void): void;
}

export function attachSlider(binding: ControlBinding, el: SliderElementLike): void {
    el.addEventListener("input", () => binding.input(Number(el.value)));
}

export function attachButton(binding: ControlBinding, el: ButtonElementLike): void {
    el.addEventListener("pointerdown", () => binding.press());
    el.addEventListener("pointerup", () => binding.release());
}
