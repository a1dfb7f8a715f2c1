/**
 * Console state: a pure reducer over the server's frame stream.
 *
 * The transcript and memory panel are functions of the received frames only;
 * the client never mutates its own copy of the memory (the server's
 * memory_state frames are the single source of truth). Frames arriving out
 * of seq order are buffered until the gap fills.
 */

import { ProtocolMessage, Payload } from "./protocol.js";

export interface TokenView {
  text: string;
  punct: "none" | "period" | "comma" | "question";
  /** Set when the token came from a memory entry (highlight + tooltip). */
  memory: { entry: string; viaAlias: boolean } | null;
  startMs: number;
  endMs: number;
}

export interface SegmentView {
  id: number;
  atMs: number;
  scriptStartMs: number;
  scriptEndMs: number;
  status: "stable" | "retracted";
  sentenceBreakBefore: boolean;
  retractableUntilMs?: number;
  supersedes?: number;
  tokens: TokenView[];
}

export interface MemoryEntryView {
  surface: string;
  normalized: string;
  aliases: string[];
  extended: boolean;
  addedAt: number;
}

export interface MemoryPanel {
  version: number;
  entries: MemoryEntryView[];
  /** The mutation that produced this version; null for the initial state. */
  trigger: Payload | null;
}

export interface SessionInfo {
  script: string;
  seed: number;
  theta: number;
  mode: string;
  realtime: boolean;
  scriptEndMs: number;
  nScriptTokens: number;
}

export type ConnectionStatus =
  | "connecting"
  | "live"
  | "ended"
  | "lost"
  | "error";

export interface PartialView {
  atMs: number;
  fromMs: number;
  toMs: number;
  tokens: TokenView[];
}

export interface ConsoleState {
  status: ConnectionStatus;
  session: SessionInfo | null;
  segments: SegmentView[];
  memory: MemoryPanel;
  partial: PartialView | null;
  metrics: Payload | null;
  finalTranscript: string | null;
  errorMessage: string | null;
  /** Highest event time seen; drives the pending-window indicator. */
  clockMs: number;
  nextSeq: number;
  buffered: Map<number, ProtocolMessage>;
}

export function initialState(): ConsoleState {
  return {
    status: "connecting",
    session: null,
    segments: [],
    memory: { version: 0, entries: [], trigger: null },
    partial: null,
    metrics: null,
    finalTranscript: null,
    errorMessage: null,
    clockMs: 0,
    nextSeq: 0,
    buffered: new Map(),
  };
}

function asToken(raw: Payload, cased: Payload): TokenView {
  const prov = raw.provenance as Payload;
  return {
    text: String(cased.text),
    punct: cased.trailing_punct as TokenView["punct"],
    memory:
      prov.kind === "memory_hit"
        ? { entry: String(prov.entry), viaAlias: Boolean(prov.via_alias) }
        : null,
    startMs: Number(raw.start_ms),
    endMs: Number(raw.end_ms),
  };
}

function asSegment(atMs: number, seg: Payload): SegmentView {
  const raws = seg.tokens as Payload[];
  const cased = seg.cased as Payload[];
  const view: SegmentView = {
    id: Number(seg.segment_id),
    atMs,
    scriptStartMs: Number(seg.script_start_ms),
    scriptEndMs: Number(seg.script_end_ms),
    status: "stable",
    sentenceBreakBefore: Boolean(seg.sentence_break_before),
    tokens: raws.map((raw, i) => asToken(raw, cased[i] ?? {})),
  };
  if (seg.retractable_until_ms !== undefined) {
    view.retractableUntilMs = Number(seg.retractable_until_ms);
  }
  if (seg.supersedes !== undefined) {
    view.supersedes = Number(seg.supersedes);
  }
  return view;
}

function applyInOrder(state: ConsoleState, msg: ProtocolMessage): void {
  const p = msg.payload;
  if (typeof p.at_ms === "number" && p.at_ms > state.clockMs) {
    state.clockMs = p.at_ms;
  }
  switch (msg.kind) {
    case "session_start":
      state.status = "live";
      state.session = {
        script: String(p.script),
        seed: Number(p.seed),
        theta: Number(p.theta),
        mode: String(p.mode),
        realtime: Boolean(p.realtime),
        scriptEndMs: Number(p.script_end_ms),
        nScriptTokens: Number(p.n_script_tokens),
      };
      break;
    case "memory_state":
      state.memory = {
        version: Number(p.version),
        entries: (p.entries as Payload[]).map((e) => ({
          surface: String(e.surface),
          normalized: String(e.normalized),
          aliases: (e.aliases as string[]) ?? [],
          extended: Boolean(e.extended),
          addedAt: Number(e.added_at),
        })),
        trigger: (p.trigger as Payload | null) ?? null,
      };
      break;
    case "transcript_stable":
      state.segments.push(asSegment(Number(p.at_ms), p.segment as Payload));
      state.partial = null;
      break;
    case "transcript_retract": {
      // Mark, never drop: the struck-through segment stays visible.
      const id = Number(p.segment_id);
      const seg = state.segments.find((s) => s.id === id);
      if (seg) seg.status = "retracted";
      break;
    }
    case "transcript_partial":
      state.partial = {
        atMs: Number(p.at_ms),
        fromMs: Number(p.from_ms),
        toMs: Number(p.to_ms),
        tokens: (p.tokens as Payload[]).map((t) => asToken(t, { text: t.text, trailing_punct: "none" })),
      };
      break;
    case "metrics_update":
      state.metrics = p;
      break;
    case "session_end":
      state.status = "ended";
      state.finalTranscript = String(p.transcript);
      state.partial = null;
      break;
    case "error":
      state.status = "error";
      state.errorMessage = String(p.message);
      break;
    default:
      // Client-side kinds never arrive from the server; ignore if they do.
      break;
  }
}

/**
 * Feed one server frame. Out-of-order frames are held until the sequence
 * gap closes, so renders only ever see the stream in seq order.
 */
export function applyFrame(state: ConsoleState, msg: ProtocolMessage): ConsoleState {
  if (msg.seq !== state.nextSeq) {
    if (msg.seq > state.nextSeq) state.buffered.set(msg.seq, msg);
    return state; // duplicates and stale frames are dropped
  }
  applyInOrder(state, msg);
  state.nextSeq += 1;
  let next: ProtocolMessage | undefined;
  while ((next = state.buffered.get(state.nextSeq)) !== undefined) {
    state.buffered.delete(state.nextSeq);
    applyInOrder(state, next);
    state.nextSeq += 1;
  }
  return state;
}

/** Connection dropped: keep everything rendered so far, flag the banner. */
export function connectionLost(state: ConsoleState): ConsoleState {
  if (state.status === "live" || state.status === "connecting") {
    state.status = "lost";
  }
  return state;
}

/** Stable segments whose retraction window is still open at the stream clock. */
export function pendingSegments(state: ConsoleState): SegmentView[] {
  if (state.status !== "live") return [];
  return state.segments.filter(
    (s) =>
      s.status === "stable" &&
      s.retractableUntilMs !== undefined &&
      s.retractableUntilMs > state.clockMs,
  );
}

/** The transcript as currently displayed: stable segments, retracted ones skipped. */
export function displayTokens(state: ConsoleState): TokenView[] {
  const out: TokenView[] = [];
  for (const seg of state.segments) {
    if (seg.status === "stable") out.push(...seg.tokens);
  }
  return out;
}
