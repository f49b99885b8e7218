/** Test fixtures: build a small synthetic run with the Python CLI and
 * serve it over HTTP, so parity tests talk to the real artifact server. */

import { execFileSync, spawn } from "node:child_process";
import { mkdtempSync, rmSync } from "node:fs";
import { tmpdir } from "node:os";
import { join } from "node:path";

const SERVER_SNIPPET = [
  "import sys",
  "from scenex.server import create_server",
  "srv = create_server(sys.argv[1], port=0)",
  "print(srv.server_address[1], flush=True)",
  "srv.serve_forever()",
].join("\n");

/** Run the full pipeline on the default synthetic mix; returns the
 * artifact directory (inside a fresh temp dir). */
export function buildRun(seed = 11): string {
  const parent = mkdtempSync(join(tmpdir(), "scenex-ui-"));
  const dir = join(parent, "run");
  execFileSync("python3", ["-m", "scenex.cli", "run", "--out", dir, "--seed", String(seed)], {
    stdio: "pipe",
  });
  return dir;
}

export function removeRun(dir: string): void {
  rmSync(join(dir, ".."), { recursive: true, force: true });
}

export interface RunningServer {
  base: string;
  stop: () => void;
}

export function startServer(dir: string): Promise<RunningServer> {
  return new Promise((resolve, reject) => {
    const proc = spawn("python3", ["-c", SERVER_SNIPPET, dir], {
      stdio: ["ignore", "pipe", "pipe"],
    });
    let out = "";
    let err = "";
    let ready = false;
    proc.stderr.on("data", (chunk: Buffer) => {
      err += chunk.toString();
    });
    proc.stdout.on("data", (chunk: Buffer) => {
      out += chunk.toString();
      const newline = out.indexOf("\n");
      if (!ready && newline >= 0) {
        ready = true;
        const port = Number(out.slice(0, newline).trim());
        resolve({
          base: `http://127.0.0.1:${port}`,
          stop: () => {
            proc.kill();
          },
        });
      }
    });
    proc.on("exit", (code) => {
      if (!ready) reject(new Error(`artifact server exited with ${code}: ${err}`));
    });
  });
}

export async function getJson<T>(base: string, path: string): Promise<T> {
  const response = await fetch(base + path);
  if (!response.ok) {
    throw new Error(`GET ${path}: HTTP ${response.status}`);
  }
  return (await response.json()) as T;
}

export async function postJson(base: string, path: string, body: unknown): Promise<Response> {
  return fetch(base + path, {
    method: "POST",
    headers: { "Content-Type": "application/json" },
    body: JSON.stringify(body),
  });
}

/** Small deterministic RNG so "random thresholds" are reproducible. */
export function mulberry32(seed: number): () => number {
  let a = seed >>> 0;
  return () => {
    a = (a + 0x6d2b79f5) >>> 0;
    let t = a;
    t = Math.imul(t ^ (t >>> 15), t | 1);
    t ^= t + Math.imul(t ^ (t >>> 7), t | 61);
    return ((t ^ (t >>> 14)) >>> 0) / 4294967296;
  };
}
