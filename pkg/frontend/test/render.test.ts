import { describe, expect, it } from "vitest";

import { renderSnapshot, renderToken } from "../src/render.js";
import { ConsoleState, initialState, SegmentView, TokenView } from "../src/state.js";

const tok = (text: string, over: Partial<TokenView> = {}): TokenView => ({
  text,
  punct: "none",
  memory: null,
  startMs: 0,
  endMs: 400,
  ...over,
});

const seg = (id: number, tokens: TokenView[], over: Partial<SegmentView> = {}): SegmentView => ({
  id,
  atMs: 1000 * id,
  scriptStartMs: 0,
  scriptEndMs: 400,
  status: "stable",
  sentenceBreakBefore: false,
  tokens,
  ...over,
});

function demoState(): ConsoleState {
  const st = initialState();
  st.status = "ended";
  st.session = {
    script: "demo", seed: 7, theta: 0.75, mode: "delay:5000",
    realtime: false, scriptEndMs: 4000, nScriptTokens: 4,
  };
  st.segments = [
    seg(0, [tok("team"), tok("neo"), tok("graf")], { status: "retracted", retractableUntilMs: 6000 }),
    seg(1, [tok("team"), tok("NeoGraph", { memory: { entry: "neograph", viaAlias: true } })], {
      supersedes: 0,
      retractableUntilMs: 6000,
    }),
    seg(2, [tok("ships", { punct: "period" })]),
  ];
  st.memory = {
    version: 3,
    entries: [
      { surface: "NeoGraph", normalized: "neograph", aliases: ["neo graf"], extended: false, addedAt: 900 },
      { surface: "work", normalized: "work", aliases: [], extended: true, addedAt: 1200 },
    ],
    trigger: { action: "add", surface: "work", origin: "client" },
  };
  st.metrics = { final: true, wer: 0, f1: 1, tp: 1, fp: 0, fn: 0, recall: 1, precision: 1, casing_accuracy: 1 };
  st.finalTranscript = "Team NeoGraph ships.";
  return st;
}

describe("renderToken", () => {
  it("renders plain text with punctuation", () => {
    expect(renderToken(tok("hello", { punct: "period" }))).toBe("hello.");
  });

  it("brackets memory hits and names the entry", () => {
    expect(renderToken(tok("NeoGraph", { memory: { entry: "neograph", viaAlias: false } }))).toBe(
      "[[NeoGraph|neograph]]",
    );
    expect(renderToken(tok("NeoGraph", { memory: { entry: "neograph", viaAlias: true } }))).toBe(
      "[[NeoGraph|neograph~alias]]",
    );
  });
});

describe("renderSnapshot", () => {
  it("shows strike-through, supersede notes, badges, and metrics", () => {
    const text = renderSnapshot(demoState());
    expect(text).toContain("session: demo seed=7 mode=delay:5000 theta=0.75");
    expect(text).toContain("[  0] ~~team neo graf~~");
    expect(text).toContain("[  1] team [[NeoGraph|neograph~alias]]  -> supersedes 0");
    expect(text).toContain("[  2] ships.");
    expect(text).toContain("-- memory v3 --");
    expect(text).toContain("NeoGraph  (aliases: neo graf)");
    expect(text).toContain("work  [ext]");
    expect(text).toContain("casing_accuracy=1");
    expect(text).toContain("transcript: Team NeoGraph ships.");
  });

  it("is stable for the same state", () => {
    expect(renderSnapshot(demoState())).toBe(renderSnapshot(demoState()));
  });

  it("marks an empty panel and a lost connection", () => {
    const st = initialState();
    st.status = "lost";
    const text = renderSnapshot(st);
    expect(text).toContain("status: lost");
    expect(text).toContain("!! connection lost");
    expect(text).toContain("(empty)");
  });

  it("lists open retraction windows while live", () => {
    const st = demoState();
    st.status = "live";
    st.clockMs = 2000;
    const text = renderSnapshot(st);
    expect(text).toContain("pending retraction window: 1(until 6000)");
  });
});
