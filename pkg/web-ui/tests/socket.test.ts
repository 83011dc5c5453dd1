import { describe, expect, it } from "vitest";

import { PublisherSocket, WebSocketLike } from "../src/socket.js";

class FakeWebSocket implements WebSocketLike {
    static instances: FakeWebSocket[] = [];
    readyState = 0; // CONNECTING
    sent: string[] = [];
    onopen: (() => void) | null = null;
    onclose: (() => void) | null = null;
    onerror: (() => void) | null = null;
    onmessage: ((ev: { data: string }) => void) | null = null;

    constructor(readonly url: string) {
        FakeWebSocket.instances.push(this);
    }

    send(data: string): void {
        this.sent.push(data);
    }

    close(): void {
        this.readyState = 3;
        this.onclose?.();
    }

    open(): void {
        this.readyState = 1;
        this.onopen?.();
    }

    drop(): void {
        this.readyState = 3;
        this.onclose?.();
    }
}

function makeSocket(opts: { maxBuffer?: number } = {}) {
    FakeWebSocket.instances = [];
    const timeouts: { fn: () => void; ms: number }[] = [];
    const socket = new PublisherSocket("ws://example:1", "midiTransport-1", {
        wsFactory: (url) => new FakeWebSocket(url),
        maxBuffer: opts.maxBuffer,
        setTimeoutFn: (fn, ms) => {
            timeouts.push({ fn, ms });
            return 0;
        },
    });
    return { socket, timeouts, instances: FakeWebSocket.instances };
}

describe("hello handshake", () => {
    it("sends the pub hello as the first frame on open", () => {
        const { socket, instances } = makeSocket();
        socket.connect();
        const ws = instances[0];
        socket.publish("frame-1");
        ws.open();
        expect(ws.sent[0]).toBe('{"op":"hello","mode":"pub","topics":["midiTransport-1"]}');
        expect(ws.sent.slice(1)).toEqual(["frame-1"]);
    });
});

describe("disconnect buffering", () => {
    it("buffers while closed and flushes in order on open", () => {
        const { socket, instances } = makeSocket();
        socket.connect();
        for (let i = 0; i < 5; i++) {
            socket.publish(`f${i}`);
        }
        instances[0].open();
        expect(instances[0].sent.slice(1)).toEqual(["f0", "f1", "f2", "f3", "f4"]);
        expect(socket.dropped).toBe(0);
    });

    it("keeps only the newest 32 frames, dropping the oldest", () => {
        const { socket, instances } = makeSocket();
        socket.connect();
        for (let i = 0; i < 40; i++) {
            socket.publish(`f${i}`);
        }
        instances[0].open();
        const frames = instances[0].sent.slice(1);
        expect(frames).toHaveLength(32);
        expect(frames[0]).toBe("f8");
        expect(frames[31]).toBe("f39");
        expect(socket.dropped).toBe(8);
    });

    it("sends straight through while open", () => {
        const { socket, instances } = makeSocket();
        socket.connect();
        instances[0].open();
        socket.publish("live");
        expect(instances[0].sent.at(-1)).toBe("live");
        expect(socket.sent).toBe(1); // the hello itself is not counted
    });
});

describe("reconnect backoff", () => {
    it("retries with exponentially growing delays up to the cap", () => {
        const { socket, timeouts, instances } = makeSocket();
        socket.connect();
        const delays: number[] = [];
        for (let i = 0; i < 10; i++) {
            instances[instances.length - 1].drop();
            const t = timeouts.pop()!;
            delays.push(t.ms);
            t.fn(); // run the reconnect now
        }
        expect(delays.slice(0, 4)).toEqual([500, 1000, 2000, 4000]);
        expect(Math.max(...delays)).toBe(30_000);
    });

    it("resets the backoff after a successful open", () => {
        const { socket, timeouts, instances } = makeSocket();
        socket.connect();
        instances[0].drop();
        expect(timeouts.pop()!.ms).toBe(500);
        socket.connect();
        instances[instances.length - 1].open();
        instances[instances.length - 1].drop();
        expect(timeouts.pop()!.ms).toBe(500);
    });

    it("stops reconnecting after close()", () => {
        const { socket, timeouts, instances } = makeSocket();
        socket.connect();
        instances[0].open();
        socket.close();
        expect(timeouts).toHaveLength(0);
    });
});
