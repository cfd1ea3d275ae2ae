// Session wiring: socket lifecycle, config form, input sampling, rendering.

import { CorrectionInput } from "./input.js";
import { parseServerMessage } from "./protocol.js";
import { renderView, Widgets } from "./render.js";
import { applyTick, initialViewState, ViewState } from "./viewmodel.js";

const DEFAULT_SAMPLE_MS = 20; // until the start ack announces the tick rate

function el<T extends HTMLElement>(id: string): T {
    const node = document.getElementById(id);
    if (!node) throw new Error(`missing element #${id}`);
    return node as T;
}

function readConfig(): Record<string, unknown> {
    // form fields mirror the episode config names
    return {
        seed: Number(el<HTMLInputElement>("cfg-seed").value),
        max_t: Number(el<HTMLInputElement>("cfg-max-t").value),
        env: {
            capacity_g: Number(el<HTMLInputElement>("cfg-capacity").value),
            sensor_sigma: Number(el<HTMLInputElement>("cfg-sensor-sigma").value),
        },
        obs: {
            r_max: Number(el<HTMLInputElement>("cfg-r-max").value),
            sigma_h: Number(el<HTMLInputElement>("cfg-sigma-h").value),
        },
        grid: { count: Number(el<HTMLInputElement>("cfg-grid-count").value) },
    };
}

function main(): void {
    const widgets: Widgets = {
        canvas: el<HTMLCanvasElement>("belief-canvas"),
        gaugeFill: el("gauge-fill"),
        gaugeLabel: el("gauge-label"),
        primitiveBadge: el("primitive-badge"),
        stats: el("stats"),
        latency: el("latency"),
    };
    const status = el("connection-status");
    const slider = el<HTMLInputElement>("tilt-slider");

    let view: ViewState = initialViewState();
    let socket: WebSocket | null = null;
    let input = new CorrectionInput(0.6);
    let sampleTimer: number | null = null;
    let pendingRender = false;

    function scheduleRender(): void {
        if (pendingRender) return;
        pendingRender = true;
        requestAnimationFrame(() => {
            pendingRender = false;
            renderView(view, widgets);
        });
    }

    function send(msg: unknown): void {
        if (socket && socket.readyState === WebSocket.OPEN) {
            socket.send(JSON.stringify(msg));
        }
    }

    function startSampling(periodMs: number): void {
        if (sampleTimer !== null) clearInterval(sampleTimer);
        sampleTimer = window.setInterval(() => {
            const correction = input.sample();
            if (correction) send(correction);
        }, periodMs);
    }

    function connect(): void {
        const proto = location.protocol === "https:" ? "wss" : "ws";
        socket = new WebSocket(`${proto}://${location.host}/session`);
        status.textContent = "connecting…";
        socket.onopen = () => {
            status.textContent = "connected";
            send({ type: "start", config: readConfig() });
        };
        socket.onclose = () => {
            status.textContent = "disconnected — reload or press Start to reconnect";
            if (sampleTimer !== null) clearInterval(sampleTimer);
            sampleTimer = null;
        };
        socket.onmessage = (event) => {
            const msg = parseServerMessage(String(event.data));
            if (!msg) {
                console.warn("malformed server message", event.data);
                return;
            }
            if (msg.type === "tick") {
                view = applyTick(view, msg, performance.now());
                scheduleRender();
            } else if (msg.type === "ack") {
                if (msg.of === "start") {
                    view = initialViewState();
                    const dt = msg.tick_dt ?? DEFAULT_SAMPLE_MS / 1000;
                    input.setRateLimit(Number(el<HTMLInputElement>("cfg-r-max").value));
                    startSampling(dt * 1000);
                    send({ type: "resume" });
                }
            } else {
                console.error("server error:", msg.reason);
                status.textContent = `server error: ${msg.reason}`;
            }
        };
    }

    el("btn-start").addEventListener("click", () => {
        if (socket && socket.readyState === WebSocket.OPEN) {
            send({ type: "start", config: readConfig() });
        } else {
            connect();
        }
    });
    el("btn-pause").addEventListener("click", () => send({ type: "pause" }));
    el("btn-resume").addEventListener("click", () => send({ type: "resume" }));
    el("btn-reset").addEventListener("click", () => {
        send({ type: "reset" });
        send({ type: "resume" });
    });

    // press-and-hold slider: engaged while held, snaps back to zero on release
    slider.addEventListener("input", () => input.sliderEngage(Number(slider.value)));
    const releaseSlider = () => {
        slider.value = "0";
        input.sliderRelease();
    };
    slider.addEventListener("pointerup", releaseSlider);
    slider.addEventListener("pointercancel", releaseSlider);

    window.addEventListener("keydown", (event) => {
        if (event.repeat) return;
        if (event.key === "w" || event.key === "W") input.keyEngage(1);
        if (event.key === "s" || event.key === "S") input.keyEngage(-1);
    });
    window.addEventListener("keyup", (event) => {
        if (["w", "W", "s", "S"].includes(event.key)) input.keyRelease();
    });
}

main();
