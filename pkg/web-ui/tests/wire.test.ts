import { readFileSync } from "node:fs";
import { describe, expect, it } from "vitest";

import { buildMessage, checkTopic, encodeWire, split14 } from "../src/wire.js";

const golden = JSON.parse(readFileSync(new URL("./golden_wire.json", import.meta.url), "utf8"));

describe("split14", () => {
    it("matches the worked example", () => {
        expect(split14(300)).toEqual([2, 44]);
    });

    it("round trips every value", () => {
        for (let v = 0; v <= 16383; v++) {
            const [msb, lsb] = split14(v);
            expect(msb * 128 + lsb).toBe(v);
        }
    });

    it("rejects out-of-range and fractional values", () => {
        for (const bad of [-1, 16384, 0.5, NaN]) {
            expect(() => split14(bad)).toThrow(RangeError);
        }
    });
});

describe("buildMessage / encodeWire", () => {
    it("reproduces every shared golden frame byte for byte", () => {
        for (const c of golden.frames) {
            const frame = encodeWire(buildMessage(c.x, c.y, c.value, c.channel, c.event));
            expect(frame).toBe(c.frame);
        }
    });

    it("puts the value MSB in lsbx, per the wire layout", () => {
        const msg = buildMessage(38, 6, 300, 1);
        expect(msg.data).toEqual({ msbx: 38, msby: 6, lsbx: 2, lsby: 44, channel: 1 });
    });

    it("rejects bad param numbers, channels and topics", () => {
        expect(() => buildMessage(128, 6, 0, 1)).toThrow(/x out of range/);
        expect(() => buildMessage(38, -1, 0, 1)).toThrow(/y out of range/);
        expect(() => buildMessage(38, 6, 0, 0)).toThrow(/channel/);
        expect(() => buildMessage(38, 6, 0, 17)).toThrow(/channel/);
        expect(() => buildMessage(38, 6, 0, 1, "bad topic!")).toThrow(/event/);
        expect(() => checkTopic("")).toThrow(/event/);
    });
});
