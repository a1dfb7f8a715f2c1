// Replay-mode acceptance: recorded frame logs of served sessions must
// reproduce the committed reference snapshots exactly, and the scripted
// flag_false_positive interaction must produce the expected frames.
// Regenerate fixtures with scripts/record-fixtures.mjs (see that file for
// what each session contains).

import { readFileSync } from "node:fs";
import path from "node:path";
import { fileURLToPath } from "node:url";
import { describe, expect, it } from "vitest";

import { decodeAll } from "../src/protocol.js";
import { applyFrame, initialState } from "../src/state.js";
import { renderSnapshot } from "../src/render.js";
import { renderFrameLog, replayFrameLog } from "../src/replay.js";
import { flagFalsePositive, SeqAllocator, submitFlagDialog } from "../src/actions.js";

const here = path.dirname(fileURLToPath(import.meta.url));
const fixture = (name: string) => readFileSync(path.join(here, "..", "fixtures", name));

const EXT_LOG = fixture("oracle_ext_before_occ_main01.framelog");
const PLAIN_LOG = fixture("oracle_before_occ_main01.framelog");

describe("oracle_ext_before_occ replay", () => {
  const state = replayFrameLog(EXT_LOG);

  it("matches the reference snapshot byte for byte", () => {
    const want = fixture("oracle_ext_before_occ_main01.snapshot.txt").toString("utf-8");
    expect(renderFrameLog(EXT_LOG)).toBe(want);
  });

  it("contains a struck-through retraction and its replacement", () => {
    const retracted = state.segments.filter((s) => s.status === "retracted");
    expect(retracted.length).toBe(1);
    const replacement = state.segments.find((s) => s.supersedes === retracted[0]!.id);
    expect(replacement).toBeDefined();
    // the re-decode turned the plain confusion into an alias hit
    const hit = replacement!.tokens.find((t) => t.memory?.entry === "crave");
    expect(hit?.text).toBe("Crave");
    expect(hit?.memory?.viaAlias).toBe(true);
  });

  it("keeps the memory panel server-authoritative with extended badges", () => {
    expect(state.memory.entries.filter((e) => e.extended).map((e) => e.surface).sort())
      .toEqual(["from", "which"]);
    const crave = state.memory.entries.find((e) => e.normalized === "crave");
    expect(crave?.aliases).toEqual(["krave"]);
    expect(state.memory.version).toBeGreaterThanOrEqual(9); // 5 words + 2 ext + remove + re-add
  });

  it("suppresses the planted confusable spans", () => {
    // "which from" appears adjacent three times; with the extended entries
    // in place none of those spans may surface as a whichfrom hit
    const planted = [121446, 178392, 310628];
    for (const seg of state.segments) {
      for (const t of seg.tokens) {
        if (t.memory?.entry === "whichfrom") {
          expect(planted).not.toContain(t.startMs);
        }
      }
    }
  });

  it("ends with dense server seqs and a final transcript", () => {
    const seqs = decodeAll(EXT_LOG).map((m) => m.seq);
    expect(seqs).toEqual(seqs.map((_, i) => i));
    expect(state.status).toBe("ended");
    expect(state.finalTranscript).toContain("Crave");
  });

  it("renders identically when frames arrive out of order", () => {
    const msgs = decodeAll(EXT_LOG);
    // deterministic shuffle: drain odd seqs first, buffered until gaps fill
    const shuffled = [...msgs.filter((m) => m.seq % 2 === 1), ...msgs.filter((m) => m.seq % 2 === 0)];
    const st = initialState();
    for (const m of shuffled) applyFrame(st, m);
    expect(renderSnapshot(st)).toBe(renderSnapshot(state));
  });
});

describe("flag_false_positive over the plain replay", () => {
  const state = replayFrameLog(PLAIN_LOG);

  it("finds the planted false positive highlighted", () => {
    // without extended entries the planted "which from" span at 121446
    // fuzzy-matches the whichfrom entry
    const fp = state.segments
      .flatMap((s) => s.tokens)
      .find((t) => t.memory?.entry === "whichfrom" && t.startMs === 121446);
    expect(fp?.text).toBe("whichfrom");
  });

  it("flagging it yields two extended-add frames", () => {
    const fp = state.segments
      .flatMap((s) => s.tokens)
      .find((t) => t.memory?.entry === "whichfrom" && t.startMs === 121446)!;
    const flagged = flagFalsePositive(fp);
    if (!flagged.ok) throw new Error("expected a dialog");
    expect(flagged.dialog.entry).toBe("whichfrom");

    const seq = new SeqAllocator();
    seq.take(); // 0 went to session_start
    expect(submitFlagDialog("which from", seq)).toEqual([
      { kind: "memory_add", seq: 1, payload: { surface: "which", extended: true } },
      { kind: "memory_add", seq: 2, payload: { surface: "from", extended: true } },
    ]);
  });

  it("flagging a plain token is refused with a hint", () => {
    const plainTok = state.segments.flatMap((s) => s.tokens).find((t) => !t.memory)!;
    const res = flagFalsePositive(plainTok);
    expect(res.ok).toBe(false);
  });
});
