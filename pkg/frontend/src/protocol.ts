// Message schema shared with the teaching service. Everything on the wire is
// a JSON object with a `type` field.

export type BeliefBin = { beta: number; w: number };

export type TickMessage = {
    type: "tick";
    n: number;
    t: number;
    tilt: number;
    poured: number;
    source: number;
    primitive: "pour" | "shake" | "tap" | "stop";
    u_r: number;
    u_h: number;
    map: number;
    mean: number;
    entropy: number;
    belief: BeliefBin[];
};

export type AckMessage = { type: "ack"; of: string; tick_dt?: number; clamped?: boolean };
export type ErrorMessage = { type: "error"; reason: string };
export type ServerMessage = TickMessage | AckMessage | ErrorMessage;

export type CorrectMessage = { type: "correct"; u_h_tilt: number; u_h_vert: number };
export type ClientMessage =
    | { type: "start"; config: Record<string, unknown> }
    | CorrectMessage
    | { type: "pause" }
    | { type: "resume" }
    | { type: "reset" };

const PRIMITIVES = new Set(["pour", "shake", "tap", "stop"]);

function isNum(v: unknown): v is number {
    return typeof v === "number" && Number.isFinite(v);
}

/** Parse and validate one server message; null for anything malformed. */
export function parseServerMessage(raw: string): ServerMessage | null {
    let data: unknown;
    try {
        data = JSON.parse(raw);
    } catch {
        return null;
    }
    if (typeof data !== "object" || data === null) return null;
    const msg = data as Record<string, unknown>;
    if (msg.type === "ack" && typeof msg.of === "string") return msg as AckMessage;
    if (msg.type === "error" && typeof msg.reason === "string") return msg as ErrorMessage;
    if (msg.type !== "tick") return null;
    const numeric = ["n", "t", "tilt", "poured", "source", "u_r", "u_h", "map", "mean", "entropy"];
    for (const field of numeric) {
        if (!isNum(msg[field])) return null;
    }
    if (!PRIMITIVES.has(msg.primitive as string)) return null;
    if (!Array.isArray(msg.belief) || msg.belief.length === 0) return null;
    for (const bin of msg.belief) {
        if (typeof bin !== "object" || bin === null) return null;
        const b = bin as Record<string, unknown>;
        if (!isNum(b.beta) || !isNum(b.w)) return null;
    }
    return msg as TickMessage;
}

/** Index of the heaviest belief bin; ties go to the first (smallest goal),
 * matching the server's point-estimate rule. */
export function argmaxBelief(belief: BeliefBin[]): number {
    let best = 0;
    for (let i = 1; i < belief.length; i++) {
        if (belief[i].w > belief[best].w) best = i;
    }
    return best;
}

export function beliefWeightSum(belief: BeliefBin[]): number {
    return belief.reduce((acc, bin) => acc + bin.w, 0);
}
