// Optional direct MIDI output from the browser, behind a capability check:
// Web MIDI is Chrome-only territory, so the WebSocket path stays primary and
// this mirror kicks in only where the API exists and permission is granted.

import { split14 } from "./wire.js";

const CC_STATUS = 0xb0;

/** The 12-byte NRPN group for one update: CC99, CC98, CC6, CC38. */
export function nrpnBytes(x: number, y: number, value: number, channel: number): number[] {
    const status = CC_STATUS | (channel - 1);
    const [msb, lsb] = split14(value);
    return [status, 99, x, status, 98, y, status, 6, msb, status, 38, lsb];
}

export type MidiSender = (bytes: number[]) => void;

export async function openMidiOutput(): Promise<MidiSender | null> {
    if (typeof navigator.requestMIDIAccess !== "function") {
        return null; // Safari/Firefox: WebSocket-only, which is fine
    }
    try {
        const access = await navigator.requestMIDIAccess();
        const outputs: MIDIOutput[] = [];
        access.outputs.forEach((out) => outputs.push(out));
        if (outputs.length === 0) {
            return null;
        }
        const out = outputs[0];
        return (bytes) => out.send(bytes);
    } catch {
        return null; // permission denied counts as "not available"
    }
}
