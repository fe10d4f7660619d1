/**
 * Spawns a real modkin service for the test run and provides its URL.
 * Requires the Python package to be installed (pip install -e ..).
 */

import { spawn, type ChildProcess } from "node:child_process";
import type { TestProject } from "vitest/node";

const PORT = 8771;
const URL_BASE = `http://127.0.0.1:${PORT}`;

declare module "vitest" {
  export interface ProvidedContext {
    serviceUrl: string;
  }
}

async function waitForService(timeoutMs: number): Promise<void> {
  const deadline = Date.now() + timeoutMs;
  while (Date.now() < deadline) {
    try {
      const response = await fetch(`${URL_BASE}/catalog`);
      if (response.ok) return;
    } catch {
      // not up yet
    }
    await new Promise((resolve) => setTimeout(resolve, 200));
  }
  throw new Error(`modkin service did not come up on ${URL_BASE}`);
}

let child: ChildProcess | null = null;

export default async function setup(project: TestProject) {
  child = spawn("modkin", ["serve", "--port", String(PORT)], {
    stdio: "ignore",
    detached: false,
  });
  child.on("error", (err: Error) => {
    console.error("failed to spawn `modkin serve`:", err.message);
  });
  await waitForService(20000);
  project.provide("serviceUrl", URL_BASE);

  return () => {
    child?.kill("SIGTERM");
  };
}
