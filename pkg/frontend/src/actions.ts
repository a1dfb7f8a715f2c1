/**
 * Operator actions. Each produces outbound protocol frames; none of them
 * touches the memory panel directly, the update always comes back as a
 * memory_state frame from the server.
 */

import { ProtocolMessage } from "./protocol.js";
import { TokenView } from "./state.js";

/** Dense per-sender sequence numbers (the session_start frame takes 0). */
export class SeqAllocator {
  private next = 0;
  take(): number {
    return this.next++;
  }
}

export type ActionResult =
  | { ok: true; frames: ProtocolMessage[] }
  | { ok: false; hint: string };

export interface WordForm {
  surface: string;
  aliases?: string[];
  extended?: boolean;
}

export function addWordForm(form: WordForm, seq: SeqAllocator): ActionResult {
  const surface = form.surface.trim();
  if (!surface) {
    return { ok: false, hint: "surface must not be empty" };
  }
  const aliases = (form.aliases ?? []).map((a) => a.trim()).filter(Boolean);
  const payload: ProtocolMessage["payload"] = { surface };
  if (aliases.length) payload.aliases = aliases;
  if (form.extended) payload.extended = true;
  return {
    ok: true,
    frames: [{ kind: "memory_add", seq: seq.take(), payload }],
  };
}

export function removeWord(surface: string, seq: SeqAllocator): ActionResult {
  const trimmed = surface.trim();
  if (!trimmed) {
    return { ok: false, hint: "surface must not be empty" };
  }
  return {
    ok: true,
    frames: [{ kind: "memory_remove", seq: seq.take(), payload: { surface: trimmed } }],
  };
}

export interface FlagDialog {
  /** The flagged token's surface, for the dialog heading. */
  flaggedText: string;
  /** The memory entry the false hit came from. */
  entry: string;
  /** Prefill: the operator types what was actually said over this. */
  proposed: string;
}

/**
 * Flagging a false positive only makes sense on a memory hit; on a plain
 * token it is a no-op with a hint. The returned dialog is submitted with
 * submitFlagDialog.
 */
export function flagFalsePositive(token: TokenView): { ok: true; dialog: FlagDialog } | { ok: false; hint: string } {
  if (!token.memory) {
    return { ok: false, hint: "not a memory hit; nothing to flag" };
  }
  return {
    ok: true,
    dialog: {
      flaggedText: token.text,
      entry: token.memory.entry,
      proposed: "",
    },
  };
}

/**
 * The operator typed the common words actually heard ("deaf key" for a
 * false "DFKI"); each becomes one extended memory_add frame. A cancelled
 * dialog (null) sends nothing.
 */
export function submitFlagDialog(
  typed: string | null,
  seq: SeqAllocator,
): ProtocolMessage[] {
  if (typed === null) return [];
  const words = typed.trim().split(/\s+/).filter(Boolean);
  return words.map((w) => ({
    kind: "memory_add" as const,
    seq: seq.take(),
    payload: { surface: w, extended: true },
  }));
}
