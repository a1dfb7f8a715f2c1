/**
 * Replay mode: rebuild console state from a recorded frame log (the raw
 * bytes of a served session, as captured off the wire). Rendering a log is
 * pure, so the same capture always produces the same snapshot.
 */

import { decodeAll } from "./protocol.js";
import { applyFrame, ConsoleState, initialState } from "./state.js";
import { renderSnapshot } from "./render.js";

export function replayFrameLog(data: Buffer): ConsoleState {
  const state = initialState();
  for (const msg of decodeAll(data)) {
    applyFrame(state, msg);
  }
  return state;
}

export function renderFrameLog(data: Buffer): string {
  return renderSnapshot(replayFrameLog(data));
}

/**
 * Intermediate snapshots: one render per applied frame. Useful for stepping
 * through a session in the UI and for asserting mid-stream states in tests.
 */
export function replaySteps(data: Buffer): string[] {
  const state = initialState();
  const out: string[] = [];
  for (const msg of decodeAll(data)) {
    applyFrame(state, msg);
    out.push(renderSnapshot(state));
  }
  return out;
}
