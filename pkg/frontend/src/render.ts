/**
 * Deterministic text rendering of the console state.
 *
 * This is the structure the snapshot tests lock down: memory hits are
 * bracketed with their entry named inline, retracted segments are struck
 * through (never dropped), and the memory panel mirrors the last
 * memory_state frame verbatim.
 */

import {
  ConsoleState,
  SegmentView,
  TokenView,
  pendingSegments,
} from "./state.js";

const PUNCT: Record<TokenView["punct"], string> = {
  none: "",
  period: ".",
  comma: ",",
  question: "?",
};

export function renderToken(tok: TokenView): string {
  const text = tok.text + PUNCT[tok.punct];
  if (!tok.memory) return text;
  const alias = tok.memory.viaAlias ? "~alias" : "";
  return `[[${text}|${tok.memory.entry}${alias}]]`;
}

function renderSegment(seg: SegmentView): string {
  const body = seg.tokens.map(renderToken).join(" ");
  const id = String(seg.id).padStart(3);
  let line = `[${id}] ${seg.status === "retracted" ? `~~${body}~~` : body}`;
  if (seg.supersedes !== undefined) line += `  -> supersedes ${seg.supersedes}`;
  return line;
}

function num(v: unknown): string {
  const n = Number(v);
  return Number.isInteger(n) ? String(n) : n.toFixed(4);
}

export function renderSnapshot(state: ConsoleState): string {
  const lines: string[] = [];
  const s = state.session;
  lines.push("== membooth console ==");
  lines.push(
    s
      ? `session: ${s.script} seed=${s.seed} mode=${s.mode} theta=${s.theta}`
      : "session: (none)",
  );
  lines.push(`status: ${state.status}`);
  if (state.status === "lost") {
    lines.push("!! connection lost, showing last received frames");
  }
  if (state.errorMessage !== null) {
    lines.push(`!! ${state.errorMessage}`);
  }

  lines.push("");
  lines.push("-- transcript --");
  for (const seg of state.segments) {
    lines.push(renderSegment(seg));
  }
  if (state.partial) {
    const body = state.partial.tokens.map(renderToken).join(" ");
    lines.push(`  ... [${state.partial.fromMs}..${state.partial.toMs}) ${body}`);
  }
  const pending = pendingSegments(state);
  if (pending.length) {
    const ids = pending.map((p) => `${p.id}(until ${p.retractableUntilMs})`);
    lines.push(`pending retraction window: ${ids.join(", ")}`);
  }

  lines.push("");
  lines.push(`-- memory v${state.memory.version} --`);
  if (!state.memory.entries.length) {
    lines.push("  (empty)");
  }
  for (const e of state.memory.entries) {
    let line = `  ${e.surface}`;
    if (e.aliases.length) line += `  (aliases: ${e.aliases.join(", ")})`;
    if (e.extended) line += "  [ext]";
    lines.push(line);
  }

  if (state.metrics) {
    lines.push("");
    lines.push("-- metrics --");
    const keys = Object.keys(state.metrics).filter((k) => k !== "final").sort();
    lines.push("  " + keys.map((k) => `${k}=${num(state.metrics![k])}`).join(" "));
  }

  if (state.finalTranscript !== null) {
    lines.push("");
    lines.push(`transcript: ${state.finalTranscript}`);
  }
  return lines.join("\n") + "\n";
}
