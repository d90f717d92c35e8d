// Shared plumbing for the integration tests: fixture files, a free port,
// and a real adjudication server child process.

import { type ChildProcess, execFileSync, spawn } from "node:child_process";
import { mkdtempSync, writeFileSync } from "node:fs";
import net from "node:net";
import { tmpdir } from "node:os";
import { join } from "node:path";

export const PYTHON = process.env.GOLDSIFT_PYTHON ?? "python3";

export interface CrowdItem {
  id: string;
  text: string;
  crowd: string; // five labels, e.g. "AAADD"
}

export interface FixturePaths {
  dir: string;
  corpus: string;
  annotations: string;
  stateDir: string;
}

export function writeFixture(items: CrowdItem[]): FixturePaths {
  const dir = mkdtempSync(join(tmpdir(), "goldsift-ui-"));
  const corpusLines = items.map((item) =>
    JSON.stringify({ id: item.id, text: item.text, source: "synthetic" })
  );
  const annotationLines: string[] = [];
  for (const item of items) {
    [...item.crowd].forEach((label, i) => {
      annotationLines.push(
        JSON.stringify({
          item_id: item.id,
          annotator_id: `w${i}`,
          label,
          round: "crowd",
          trust: 1.0,
        })
      );
    });
  }
  const corpus = join(dir, "corpus.jsonl");
  const annotations = join(dir, "annotations.jsonl");
  writeFileSync(corpus, corpusLines.join("\n") + "\n");
  writeFileSync(annotations, annotationLines.join("\n") + "\n");
  return { dir, corpus, annotations, stateDir: join(dir, "state") };
}

export function freePort(): Promise<number> {
  return new Promise((resolve, reject) => {
    const server = net.createServer();
    server.listen(0, "127.0.0.1", () => {
      const address = server.address();
      if (address === null || typeof address === "string") {
        reject(new Error("no port assigned"));
        return;
      }
      const port = address.port;
      server.close(() => resolve(port));
    });
  });
}

export function startServer(paths: FixturePaths, port: number): ChildProcess {
  const proc = spawn(
    PYTHON,
    [
      "-m",
      "goldsift",
      "serve",
      "--corpus",
      paths.corpus,
      "--annotations",
      paths.annotations,
      "--state-dir",
      paths.stateDir,
      "--host",
      "127.0.0.1",
      "--port",
      String(port),
    ],
    { stdio: ["ignore", "pipe", "pipe"] }
  );
  return proc;
}

function portOpen(port: number): Promise<boolean> {
  return new Promise((resolve) => {
    const socket = net.connect({ port, host: "127.0.0.1" });
    socket.once("connect", () => {
      socket.destroy();
      resolve(true);
    });
    socket.once("error", () => resolve(false));
  });
}

export async function waitReady(base: string, timeoutMs = 60_000): Promise<void> {
  const port = Number.parseInt(new URL(base).port, 10);
  const deadline = Date.now() + timeoutMs;
  // probe the socket first: a failed fetch logs noisy connection errors
  while (Date.now() < deadline) {
    if (await portOpen(port)) {
      break;
    }
    await sleep(150);
  }
  let lastError: unknown = null;
  while (Date.now() < deadline) {
    try {
      const response = await fetch(`${base}/api/stats`);
      if (response.ok) {
        return;
      }
    } catch (err) {
      lastError = err;
    }
    await sleep(150);
  }
  throw new Error(`server did not become ready: ${lastError}`);
}

export function stopServer(proc: ChildProcess, signal: NodeJS.Signals = "SIGTERM"): Promise<void> {
  return new Promise((resolve) => {
    if (proc.exitCode !== null) {
      resolve();
      return;
    }
    proc.once("exit", () => resolve());
    proc.kill(signal);
  });
}

export function sleep(ms: number): Promise<void> {
  return new Promise((resolve) => setTimeout(resolve, ms));
}

export async function waitFor(
  predicate: () => boolean,
  timeoutMs = 15_000,
  what = "condition"
): Promise<void> {
  const deadline = Date.now() + timeoutMs;
  while (Date.now() < deadline) {
    if (predicate()) {
      return;
    }
    await sleep(20);
  }
  throw new Error(`timed out waiting for ${what}`);
}

/** Cohen's kappa computed by the Python evaluation code, for cross-checks. */
export function pythonKappa(pairs: Array<[string, string]>): number {
  const r1 = Object.fromEntries(pairs.map((p, i) => [`i${i}`, p[0]]));
  const r2 = Object.fromEntries(pairs.map((p, i) => [`i${i}`, p[1]]));
  const script = [
    "import json, sys",
    "from goldsift.annotation import Label, cohen_kappa",
    "data = json.load(sys.stdin)",
    "r1 = {k: Label(v) for k, v in data['r1'].items()}",
    "r2 = {k: Label(v) for k, v in data['r2'].items()}",
    "print(repr(cohen_kappa(r1, r2).kappa))",
  ].join("\n");
  const out = execFileSync(PYTHON, ["-c", script], {
    input: JSON.stringify({ r1, r2 }),
    encoding: "utf-8",
  });
  return Number.parseFloat(out.trim());
}
