/** Shared plumbing for the UI tests: spawn the real plan service as a child
 * process on a private port, and a fetch wrapper that records which
 * endpoints the client actually hit. */

import { spawn, type ChildProcess } from "node:child_process";
import { mkdtempSync } from "node:fs";
import { tmpdir } from "node:os";
import { dirname, join } from "node:path";
import { fileURLToPath } from "node:url";

import type { FetchLike } from "../src/api";

const HERE = dirname(fileURLToPath(import.meta.url));

export interface TestServer {
  baseUrl: string;
  storeDir: string;
  stop(): Promise<void>;
}

function sleep(ms: number): Promise<void> {
  return new Promise((resolve) => setTimeout(resolve, ms));
}

/** Start replay_server.py on a test-unique port and wait until it answers. */
export async function spawnServer(): Promise<TestServer> {
  const port = 21000 + Math.floor(Math.random() * 20000);
  const storeDir = mkdtempSync(join(tmpdir(), "arguplan-ui-"));
  const child: ChildProcess = spawn(
    "python3",
    [join(HERE, "replay_server.py"), "--port", String(port), "--store", storeDir],
    { stdio: ["ignore", "pipe", "pipe"] },
  );
  let stderr = "";
  child.stderr!.on("data", (chunk) => {
    stderr += String(chunk);
  });
  let exited = false;
  child.on("exit", () => {
    exited = true;
  });

  const baseUrl = `http://127.0.0.1:${port}`;
  const deadline = Date.now() + 15_000;
  while (Date.now() < deadline) {
    if (exited) break;
    try {
      const response = await fetch(`${baseUrl}/plans`);
      if (response.ok) {
        return {
          baseUrl,
          storeDir,
          stop: async () => {
            child.kill("SIGTERM");
            await sleep(50);
            if (!exited) child.kill("SIGKILL");
          },
        };
      }
    } catch {
      // not listening yet
    }
    await sleep(100);
  }
  child.kill("SIGKILL");
  throw new Error(`plan service never came up on port ${port}\n${stderr}`);
}

export interface RecordedCall {
  method: string;
  path: string;
  body: unknown;
}

export interface RecordingFetch {
  fetchImpl: FetchLike;
  calls: RecordedCall[];
}

/** Wrap fetch so tests can assert exactly which endpoints were driven. */
export function recordingFetch(baseUrl: string): RecordingFetch {
  const calls: RecordedCall[] = [];
  const fetchImpl: FetchLike = (url, init) => {
    const method = init?.method ?? "GET";
    const path = url.startsWith(baseUrl) ? url.slice(baseUrl.length) : url;
    const body = typeof init?.body === "string" ? JSON.parse(init.body) : undefined;
    calls.push({ method, path, body });
    return fetch(url, init);
  };
  return { fetchImpl, calls };
}
