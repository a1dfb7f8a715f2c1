#!/usr/bin/env node
/**
 * membooth-console replay <framelog>
 * membooth-console connect <host:port> <script> [--seed N] [--mode M] [--save FILE]
 */

import { readFileSync, writeFileSync } from "node:fs";

import { renderFrameLog } from "./replay.js";
import { ConsoleClient } from "./client.js";
import { renderSnapshot } from "./render.js";

function usage(): never {
  process.stderr.write(
    "usage: membooth-console replay <framelog>\n" +
      "       membooth-console connect <host:port> <script> [--seed N] [--mode M] [--save FILE]\n",
  );
  process.exit(2);
}

async function connect(args: string[]): Promise<number> {
  const [addr, script] = args;
  if (!addr || !script) usage();
  const [host, portStr] = addr.split(":");
  const port = Number(portStr);
  if (!host || !Number.isInteger(port)) usage();

  const opts: Record<string, unknown> = { script };
  let save: string | null = null;
  for (let i = 2; i < args.length; i += 2) {
    const key = args[i];
    const val = args[i + 1];
    if (val === undefined) usage();
    if (key === "--seed") opts.seed = Number(val);
    else if (key === "--mode") opts.mode = val;
    else if (key === "--save") save = val;
    else usage();
  }

  const client = await ConsoleClient.connect(host, port, { script, ...opts });
  client.onChange((state, msg) => {
    if (msg && (msg.kind === "transcript_stable" || msg.kind === "transcript_retract")) {
      const seg = state.segments[state.segments.length - 1];
      process.stderr.write(`${msg.kind} #${seg?.id ?? "?"}\n`);
    }
  });
  await client.done;
  process.stdout.write(renderSnapshot(client.state));
  if (save) {
    writeFileSync(save, client.frameLog());
    process.stderr.write(`frame log saved to ${save}\n`);
  }
  return client.state.status === "error" ? 1 : 0;
}

async function main(): Promise<number> {
  const [cmd, ...rest] = process.argv.slice(2);
  if (cmd === "replay") {
    const file = rest[0];
    if (!file) usage();
    process.stdout.write(renderFrameLog(readFileSync(file)));
    return 0;
  }
  if (cmd === "connect") {
    return connect(rest);
  }
  usage();
}

main().then(
  (code) => process.exit(code),
  (err) => {
    process.stderr.write(`${err}\n`);
    process.exit(1);
  },
);
