// Publisher-side WebSocket with the relay's hello handshake, a small
// disconnect buffer (32 frames, drop-oldest) and exponential reconnect
// backoff. The WebSocket constructor is injectable for tests.

export interface WebSocketLike {
    readyState: number;
    send(data: string): void;
    close(): void;
    onopen: (() => void) | null;
    onclose: (() => void) | null;
    onerror: (() => void) | null;
    onmessage: ((ev: { data: string }) => void) | null;
}

export type WebSocketFactory = (url: string) => WebSocketLike;

export interface PublisherOptions {
    wsFactory?: WebSocketFactory;
    maxBuffer?: number;
    backoffBaseMs?: number;
    backoffCapMs?: number;
    setTimeoutFn?: (fn: () => void, ms: number) => unknown;
}

const WS_OPEN = 1;

export class PublisherSocket {
    readonly url: string;
    readonly topic: string;
    private readonly wsFactory: WebSocketFactory;
    private readonly maxBuffer: number;
    private readonly backoffBaseMs: number;
    private readonly backoffCapMs: number;
    private readonly setTimeoutFn: (fn: () => void, ms: number) => unknown;
    private ws: WebSocketLike | null = null;
    private ready = false;
    private attempts = 0;
    private closed = false;
    private buffer: string[] = [];
    dropped = 0;
    sent = 0;

    constructor(url: string, topic: string, options: PublisherOptions = {}) {
        this.url = url;
        this.topic = topic;
        this.wsFactory = options.wsFactory ?? ((u) => new WebSocket(u) as unknown as WebSocketLike);
        this.maxBuffer = options.maxBuffer ?? 32;
        this.backoffBaseMs = options.backoffBaseMs ?? 500;
        this.backoffCapMs = options.backoffCapMs ?? 30_000;
        this.setTimeoutFn = options.setTimeoutFn ?? ((fn, ms) => setTimeout(fn, ms));
    }

    connect(): void {
        if (this.closed) {
            return;
        }
        const ws = this.wsFactory(this.url);
        this.ws = ws;
        this.ready = false;
        ws.onopen = () => {
            this.attempts = 0;
            ws.send(JSON.stringify({ op: "hello", mode: "pub", topics: [this.topic] }));
            this.ready = true;
            const backlog = this.buffer;
            this.buffer = [];
            for (const frame of backlog) {
                ws.send(frame);
                this.sent += 1;
            }
        };
        ws.onclose = () => {
            this.ready = false;
            this.ws = null;
            this.scheduleReconnect();
        };
        ws.onerror = () => {
            // onclose follows; nothing to do here
        };
        ws.onmessage = () => {
            // welcome/pong chatter from the relay; a publisher ignores it
        };
    }

    private scheduleReconnect(): void {
        if (this.closed) {
            return;
        }
        const delay = Math.min(this.backoffBaseMs * 2 ** this.attempts, this.backoffCapMs);
        this.attempts += 1;
        this.setTimeoutFn(() => this.connect(), delay);
    }

    /** Send now if connected, otherwise keep the newest 32 frames for later. */
    publish(frame: string): void {
        if (this.ready && this.ws !== null && this.ws.readyState === WS_OPEN) {
            this.ws.send(frame);
            this.sent += 1;
            return;
        }
        if (this.buffer.length >= this.maxBuffer) {
            this.buffer.shift();
            this.dropped += 1;
        }
        this.buffer.push(frame);
    }

    close(): void {
        this.closed = true;
        this.ws?.close();
        this.ws = null;
    }
}
