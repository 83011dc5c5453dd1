// The JSON envelope for one control update, byte-identical to what the
// relay and bridge expect: a single line with fixed key order, the two
// param numbers in msbx/msby and the value's MSB/LSB halves in lsbx/lsby.

export interface WireData {
    msbx: number;
    msby: number;
    lsbx: number;
    lsby: number;
    channel: number;
}

export interface WireMessage {
    event: string;
    data: WireData;
}

export const DEFAULT_TOPIC = "midiTransport-1";
export const VALUE14_MAX = 16383;

const TOPIC_RE = /^[A-Za-z0-9_-]{1,64}$/;

function checkInt(field: string, value: number, lo: number, hi: number): number {
    if (!Number.isInteger(value)) {
        throw new RangeError(`${field} must be an integer, got ${value}`);
    }
    if (value < lo || value > hi) {
        throw new RangeError(`${field} out of range ${lo}..${hi}: ${value}`);
    }
    return value;
}

export function checkTopic(name: string): string {
    if (!TOPIC_RE.test(name)) {
        throw new RangeError(`event must be 1..64 chars of [A-Za-z0-9_-], got ${JSON.stringify(name)}`);
    }
    return name;
}

/** Split a 14-bit value into its [msb, lsb] 7-bit halves. */
export function split14(value: number): [number, number] {
    checkInt("value", value, 0, VALUE14_MAX);
    return [value >> 7, value & 127];
}

export function buildMessage(
    x: number,
    y: number,
    value: number,
    channel: number,
    event: string = DEFAULT_TOPIC,
): WireMessage {
    checkInt("x", x, 0, 127);
    checkInt("y", y, 0, 127);
    checkInt("channel", channel, 1, 16);
    checkTopic(event);
    const [msb, lsb] = split14(value);
    return { event, data: { msbx: x, msby: y, lsbx: msb, lsby: lsb, channel } };
}

/** Encode to the single-line envelope; key order fixed by construction. */
export function encodeWire(msg: WireMessage): string {
    const d = msg.data;
    return JSON.stringify({
        event: msg.event,
        data: { msbx: d.msbx, msby: d.msby, lsbx: d.lsbx, lsby: d.lsby, channel: d.channel },
    });
}
