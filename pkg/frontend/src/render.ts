// Canvas/DOM painting of the view state. Thin on purpose: every display rule
// lives in viewmodel.ts.

import { TickMessage } from "./protocol.js";
import { gaugeFraction, histogramHeights, ViewState } from "./viewmodel.js";

export type Widgets = {
    canvas: HTMLCanvasElement;
    gaugeFill: HTMLElement;
    gaugeLabel: HTMLElement;
    primitiveBadge: HTMLElement;
    stats: HTMLElement;
    latency: HTMLElement;
};

const BAR_COLOR = "#4a90d9";
const MAP_COLOR = "#e05c4b";

export function renderView(state: ViewState, widgets: Widgets): void {
    const tick = state.tick;
    if (!tick) return;
    drawHistogram(tick, state.mapIndex, widgets.canvas);

    const pct = (gaugeFraction(tick) * 100).toFixed(1);
    widgets.gaugeFill.style.width = `${pct}%`;
    widgets.gaugeLabel.textContent =
        `${tick.poured.toFixed(1)} g poured / ${tick.source.toFixed(1)} g left`;

    widgets.primitiveBadge.textContent = tick.primitive;
    widgets.primitiveBadge.className = `badge badge-${tick.primitive}`;

    const map = tick.belief[state.mapIndex];
    widgets.stats.textContent =
        `tick ${tick.n}  t=${tick.t.toFixed(2)}s  tilt=${tick.tilt.toFixed(3)} rad  ` +
        `MAP=${map.beta.toFixed(0)} g  mean=${tick.mean.toFixed(1)} g  ` +
        `H=${tick.entropy.toFixed(3)} nats`;
    widgets.latency.textContent =
        `tick gap ${state.tickGapMs.toFixed(0)} ms` +
        (state.droppedTicks > 0 ? `  (${state.droppedTicks} stale dropped)` : "");
}

function drawHistogram(tick: TickMessage, mapIndex: number, canvas: HTMLCanvasElement): void {
    const ctx = canvas.getContext("2d");
    if (!ctx) return;
    const { width, height } = canvas;
    ctx.clearRect(0, 0, width, height);
    const heights = histogramHeights(tick);
    const barW = width / heights.length;
    const plotH = height - 12;
    for (let i = 0; i < heights.length; i++) {
        const h = heights[i] * plotH;
        ctx.fillStyle = i === mapIndex ? MAP_COLOR : BAR_COLOR;
        ctx.fillRect(i * barW, plotH - h, Math.max(1, barW - 1), h);
    }
    // MAP marker under its bar
    ctx.fillStyle = MAP_COLOR;
    const cx = (mapIndex + 0.5) * barW;
    ctx.beginPath();
    ctx.moveTo(cx, plotH + 2);
    ctx.lineTo(cx - 5, height);
    ctx.lineTo(cx + 5, height);
    ctx.fill();
}
