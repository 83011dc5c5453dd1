// Page wiring: load the control layout, connect to the relay as a
// publisher, and run the fade scheduler off requestAnimationFrame. Query
// parameters: ?relay=ws://host:port (default: same host, port 8765),
// ?seed=N (reproducible show), ?midi=1 (mirror to a local Web MIDI output).

import { ControlBinding, ControlSpec, attachButton, attachSlider } from "./controls.js";
import { nrpnBytes, openMidiOutput } from "./midi.js";
import { DEFAULT_SCHEDULE, FadePhase, ScheduleConfig, makeSchedule, visibilityAt } from "./scheduler.js";
import { PublisherSocket } from "./socket.js";
import { DEFAULT_TOPIC, VALUE14_MAX } from "./wire.js";

interface Layout {
    topic?: string;
    controls: ControlSpec[];
    schedule?: Partial<ScheduleConfig>;
}

function relayUrl(params: URLSearchParams): string {
    const given = params.get("relay");
    if (given) {
        return given;
    }
    return `ws://${location.hostname || "127.0.0.1"}:8765`;
}

async function start(): Promise<void> {
    const params = new URLSearchParams(location.search);
    const layout: Layout = await (await fetch("controls.json")).json();
    const topic = layout.topic ?? DEFAULT_TOPIC;
    const schedule: ScheduleConfig = { ...DEFAULT_SCHEDULE, ...layout.schedule };
    const seed = Number(params.get("seed") ?? Math.floor(Math.random() * 2 ** 31));

    const socket = new PublisherSocket(relayUrl(params), topic);
    socket.connect();

    const midiSender = params.get("midi") === "1" ? await openMidiOutput() : null;

    const stage = document.getElementById("stage")!;
    const bindings: { binding: ControlBinding; el: HTMLElement; phases: FadePhase[] }[] = [];

    layout.controls.forEach((spec, index) => {
        const wrapper = document.createElement("div");
        wrapper.className = "control";
        const label = document.createElement("label");
        label.textContent = spec.id;
        wrapper.appendChild(label);

        const binding = new ControlBinding({ ...spec, event: spec.event ?? topic }, (frame) => {
            socket.publish(frame);
            if (midiSender) {
                const data = JSON.parse(frame).data;
                midiSender(nrpnBytes(data.msbx, data.msby, (data.lsbx << 7) | data.lsby, data.channel));
            }
        });

        if (spec.kind === "slider") {
            const input = document.createElement("input");
            input.type = "range";
            input.min = "0";
            input.max = String(VALUE14_MAX);
            input.value = "0";
            attachSlider(binding, input);
            wrapper.appendChild(input);
        } else {
            const button = document.createElement("button");
            button.textContent = spec.id;
            attachButton(binding, button);
            wrapper.appendChild(button);
        }

        stage.appendChild(wrapper);
        bindings.push({ binding, el: wrapper, phases: makeSchedule(seed, index, schedule) });
    });

    const t0 = performance.now();
    const frame = (): void => {
        const t = performance.now() - t0;
        for (const { binding, el, phases } of bindings) {
            const alpha = visibilityAt(phases, t, schedule.horizonMs);
            binding.setVisibility(alpha);
            el.style.opacity = String(alpha);
            el.style.pointerEvents = alpha > 0 ? "auto" : "none";
            binding.tick();
        }
        requestAnimationFrame(frame);
    };
    requestAnimationFrame(frame);
}

start().catch((err) => {
    document.body.textContent = `failed to start: ${err}`;
});
