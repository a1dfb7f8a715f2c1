/**
 * Wire protocol codec for the membooth session service.
 *
 * Frames are `<byte length>\n<json body>\n`, where the declared length
 * covers the body plus its trailing newline. Every body is an object with
 * exactly `kind`, `seq`, and `payload`. See PROTOCOL.md at the repo root.
 */

export const KINDS = new Set([
  "session_start",
  "transcript_partial",
  "transcript_stable",
  "transcript_retract",
  "memory_add",
  "memory_remove",
  "memory_state",
  "metrics_update",
  "session_end",
  "error",
] as const);

export type Kind = typeof KINDS extends Set<infer K> ? K : never;

export type Payload = { [key: string]: unknown };

export interface ProtocolMessage {
  kind: Kind;
  seq: number;
  payload: Payload;
}

export const MAX_FRAME_BYTES = 8 * 1024 * 1024;
const MAX_HEADER_DIGITS = 20;

export class ProtocolError extends Error {}

function isPlainObject(v: unknown): v is Payload {
  return typeof v === "object" && v !== null && !Array.isArray(v);
}

/** JSON with recursively sorted object keys, matching the server's output. */
export function stableStringify(value: unknown): string {
  if (Array.isArray(value)) {
    return `[${value.map(stableStringify).join(",")}]`;
  }
  if (isPlainObject(value)) {
    const inner = Object.keys(value)
      .sort()
      .map((k) => `${JSON.stringify(k)}:${stableStringify(value[k])}`);
    return `{${inner.join(",")}}`;
  }
  return JSON.stringify(value);
}

export function encodeMessage(msg: ProtocolMessage): Buffer {
  validateMessage(msg);
  const body = Buffer.from(
    stableStringify({ kind: msg.kind, payload: msg.payload, seq: msg.seq }) + "\n",
    "utf-8",
  );
  return Buffer.concat([Buffer.from(`${body.length}\n`, "ascii"), body]);
}

export function validateMessage(msg: ProtocolMessage): void {
  if (!KINDS.has(msg.kind)) {
    throw new ProtocolError(`unknown message kind ${JSON.stringify(msg.kind)}`);
  }
  if (!Number.isInteger(msg.seq) || msg.seq < 0) {
    throw new ProtocolError(`bad seq ${JSON.stringify(msg.seq)}`);
  }
  if (!isPlainObject(msg.payload)) {
    throw new ProtocolError("payload must be an object");
  }
}

function parseBody(body: Buffer): ProtocolMessage {
  let parsed: unknown;
  try {
    parsed = JSON.parse(body.toString("utf-8"));
  } catch {
    throw new ProtocolError("frame body is not valid JSON");
  }
  if (!isPlainObject(parsed)) {
    throw new ProtocolError("frame body must be a JSON object");
  }
  const keys = Object.keys(parsed).sort();
  if (keys.join(",") !== "kind,payload,seq") {
    throw new ProtocolError(`frame body must have exactly kind/seq/payload, got ${keys.join(",")}`);
  }
  const msg = { kind: parsed.kind, seq: parsed.seq, payload: parsed.payload } as ProtocolMessage;
  validateMessage(msg);
  return msg;
}

const NL = 0x0a;

/** Incremental decoder: feed arbitrary byte chunks, get complete messages out. */
export class FrameDecoder {
  private buf: Buffer = Buffer.alloc(0);
  private want: number | null = null;

  push(chunk: Buffer): ProtocolMessage[] {
    this.buf = this.buf.length ? Buffer.concat([this.buf, chunk]) : chunk;
    const out: ProtocolMessage[] = [];
    for (;;) {
      if (this.want === null) {
        const nl = this.buf.indexOf(NL);
        if (nl < 0) {
          if (this.buf.length > MAX_HEADER_DIGITS) {
            throw new ProtocolError("frame header too long");
          }
          break;
        }
        const header = this.buf.subarray(0, nl).toString("ascii");
        if (!/^[0-9]+$/.test(header) || header.length > MAX_HEADER_DIGITS) {
          throw new ProtocolError(`bad frame header ${JSON.stringify(header)}`);
        }
        const want = Number(header);
        if (want <= 0 || want > MAX_FRAME_BYTES) {
          throw new ProtocolError(`bad frame length ${want}`);
        }
        this.want = want;
        this.buf = this.buf.subarray(nl + 1);
      }
      if (this.buf.length < this.want) break;
      const body = this.buf.subarray(0, this.want);
      this.buf = this.buf.subarray(this.want);
      this.want = null;
      out.push(parseBody(body));
    }
    return out;
  }

  /** Bytes still waiting for more input (a clean stream ends with none). */
  pending(): number {
    return this.buf.length + (this.want ?? 0);
  }
}

/** Decode a complete capture, e.g. a recorded frame log. */
export function decodeAll(data: Buffer): ProtocolMessage[] {
  const dec = new FrameDecoder();
  const out = dec.push(data);
  if (dec.pending() > 0) {
    throw new ProtocolError("trailing truncated frame");
  }
  return out;
}
