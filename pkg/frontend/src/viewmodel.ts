// Pure view state: what the widgets display, derived from tick messages.
// Rendering reads this; nothing here touches the DOM, so the display rules
// (ordering, MAP marker, gauge fractions) are unit-testable.

import { argmaxBelief, TickMessage } from "./protocol.js";

export type ViewState = {
    tick: TickMessage | null;
    lastRenderedN: number;
    mapIndex: number;       // histogram bar carrying the MAP marker
    droppedTicks: number;
    tickGapMs: number;      // arrival gap between the last two rendered ticks
    lastArrivalMs: number;
};

export function initialViewState(): ViewState {
    return {
        tick: null,
        lastRenderedN: -1,
        mapIndex: -1,
        droppedTicks: 0,
        tickGapMs: 0,
        lastArrivalMs: 0,
    };
}

/** Fold one tick message into the view; stale ticks (n not newer than the
 * last rendered) are dropped unchanged except for the drop counter. */
export function applyTick(state: ViewState, msg: TickMessage, nowMs: number): ViewState {
    if (msg.n <= state.lastRenderedN) {
        return { ...state, droppedTicks: state.droppedTicks + 1 };
    }
    return {
        tick: msg,
        lastRenderedN: msg.n,
        mapIndex: argmaxBelief(msg.belief),
        droppedTicks: state.droppedTicks,
        tickGapMs: state.lastArrivalMs > 0 ? nowMs - state.lastArrivalMs : 0,
        lastArrivalMs: nowMs,
    };
}

/** Fill fraction of the pour gauge: receiver mass over total mass. */
export function gaugeFraction(tick: TickMessage): number {
    const total = tick.poured + tick.source;
    if (total <= 0) return 0;
    return Math.min(1, Math.max(0, tick.poured / total));
}

/** Bar heights normalized to the heaviest bin, for drawing. */
export function histogramHeights(tick: TickMessage): number[] {
    let max = 0;
    for (const bin of tick.belief) max = Math.max(max, bin.w);
    if (max <= 0) return tick.belief.map(() => 0);
    return tick.belief.map((bin) => bin.w / max);
}
