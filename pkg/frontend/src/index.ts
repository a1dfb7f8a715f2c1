export * from "./protocol.js";
export * from "./state.js";
export * from "./render.js";
export * from "./actions.js";
export * from "./replay.js";
export { ConsoleClient, type SessionOptions, type StateListener } from "./client.js";
