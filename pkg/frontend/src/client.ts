/**
 * Live TCP client for `membooth serve`. One client = one session. All
 * received bytes are kept, so a live session doubles as a frame-log
 * recording that replays identically later.
 */

import net from "node:net";

import {
  encodeMessage,
  FrameDecoder,
  Payload,
  ProtocolError,
  ProtocolMessage,
} from "./protocol.js";
import {
  applyFrame,
  connectionLost,
  ConsoleState,
  initialState,
} from "./state.js";
import { SeqAllocator } from "./actions.js";

export type SessionOptions = { script: string } & Payload;

export type StateListener = (state: ConsoleState, msg: ProtocolMessage | null) => void;

export class ConsoleClient {
  readonly state: ConsoleState = initialState();
  readonly done: Promise<void>;

  private readonly decoder = new FrameDecoder();
  private readonly listeners = new Set<StateListener>();
  private readonly chunks: Buffer[] = [];
  private readonly seq = new SeqAllocator();
  private finishDone!: () => void;

  private constructor(private readonly sock: net.Socket) {
    this.done = new Promise((res) => {
      this.finishDone = res;
    });
    sock.on("data", (chunk: Buffer) => this.receive(chunk));
    sock.on("error", () => {});
    sock.on("close", () => {
      connectionLost(this.state);
      this.notify(null);
      this.finishDone();
    });
  }

  static connect(host: string, port: number, options: SessionOptions): Promise<ConsoleClient> {
    return new Promise((resolve, reject) => {
      const sock = net.createConnection({ host, port }, () => {
        const client = new ConsoleClient(sock);
        client.send({ kind: "session_start", seq: client.seq.take(), payload: options });
        resolve(client);
      });
      sock.once("error", reject);
    });
  }

  onChange(fn: StateListener): () => void {
    this.listeners.add(fn);
    return () => this.listeners.delete(fn);
  }

  send(msg: ProtocolMessage): void {
    this.sock.write(encodeMessage(msg));
  }

  sendAll(frames: ProtocolMessage[]): void {
    for (const f of frames) this.send(f);
  }

  /** Next free client-side sequence number. */
  get seqAllocator(): SeqAllocator {
    return this.seq;
  }

  /** Everything received so far, as a replayable frame log. */
  frameLog(): Buffer {
    return Buffer.concat(this.chunks);
  }

  close(): void {
    this.sock.end();
  }

  private receive(chunk: Buffer): void {
    this.chunks.push(chunk);
    let msgs: ProtocolMessage[];
    try {
      msgs = this.decoder.push(chunk);
    } catch (err) {
      if (err instanceof ProtocolError) {
        this.state.status = "error";
        this.state.errorMessage = err.message;
        this.notify(null);
        this.sock.destroy();
        return;
      }
      throw err;
    }
    for (const msg of msgs) {
      applyFrame(this.state, msg);
      this.notify(msg);
    }
  }

  private notify(msg: ProtocolMessage | null): void {
    this.listeners.forEach((fn) => fn(this.state, msg));
  }
}
