// Scripted end-to-end session: the built UI's DOM drives a live instance of
// the Python study service over HTTP. Ground truth comes from the dataset
// manifest on disk (researcher side), never from anything the client sees.
//
// The window origin must match the service (the UI is served same-origin at
// /ui/ in production), so the port is fixed and set as the environment URL.

// @vitest-environment happy-dom
// @vitest-environment-options { "url": "http://127.0.0.1:8765" }

import { afterAll, beforeAll, expect, it } from "vitest";
import { execFileSync, spawn, ChildProcess } from "node:child_process";
import { mkdtempSync, openSync, readFileSync, rmSync } from "node:fs";
import { tmpdir } from "node:os";
import { join } from "node:path";

import { StudyApi } from "../src/api.js";
import { StudyApp } from "../src/ui.js";

const PORT = 8765;
const BASE = `http://127.0.0.1:${PORT}`;

let workDir: string;
let server: ChildProcess;
let truth: Record<string, string>;
const currentPayloads: Array<Record<string, unknown>> = [];

async function serverReady(): Promise<void> {
  const deadline = Date.now() + 30_000;
  while (Date.now() < deadline) {
    try {
      const resp = await fetch(`${BASE}/glyphs/Linear.svg`);
      if (resp.ok) return;
    } catch {
      // not listening yet
    }
    await new Promise((r) => setTimeout(r, 250));
  }
  throw new Error("study service did not come up in time");
}

beforeAll(async () => {
  workDir = mkdtempSync(join(tmpdir(), "study-e2e-"));
  execFileSync("python3", [
    "-m", "ttng.cli", "dataset", "build-study",
    "--topic", "harbor city affairs", "--seed", "11", "--sets", "1",
    "--provider", "mock", "--out-dir", join(workDir, "ds"),
  ]);
  const manifest = JSON.parse(readFileSync(join(workDir, "ds", "manifest.json"), "utf-8"));
  truth = Object.fromEntries(
    manifest.stories.map((s: { story_id: string; motif: string }) => [s.story_id, s.motif]),
  );

  const logFd = openSync(join(workDir, "server.log"), "w");
  server = spawn("python3", [
    "-m", "ttng.cli", "study", "serve",
    "--dataset", join(workDir, "ds"),
    "--port", String(PORT),
    "--journal", join(workDir, "journal.jsonl"),
  ], { stdio: ["ignore", logFd, logFd] });
  server.on("exit", (code) => {
    if (code !== null && code !== 0) {
      console.error("server exited:", readFileSync(join(workDir, "server.log"), "utf-8"));
    }
  });
  await serverReady();

  // Record every task payload the client receives for the leak check.
  // The body is consumed here and re-wrapped (happy-dom clones drain the
  // original stream).
  const realFetch = globalThis.fetch.bind(globalThis);
  globalThis.fetch = (async (input: RequestInfo | URL, init?: RequestInit) => {
    const resp = await realFetch(input, init);
    const url = String(input);
    if (url.includes("/current") && resp.ok) {
      const text = await resp.text();
      currentPayloads.push(JSON.parse(text));
      return new Response(text, {
        status: resp.status,
        headers: { "Content-Type": "application/json" },
      });
    }
    return resp;
  }) as typeof fetch;
});

afterAll(() => {
  server?.kill();
  rmSync(workDir, { recursive: true, force: true });
});

it("completes training and all ten tasks through the DOM", async () => {
  document.body.innerHTML = '<main id="app"></main>';
  const root = document.getElementById("app") as HTMLElement;
  const app = new StudyApp(root, new StudyApi(BASE), "e2e-participant");
  await app.start();

  const click = async (selector: string) => {
    const node = root.querySelector(selector) as HTMLElement | null;
    expect(node, `missing element ${selector}`).not.toBeNull();
    node!.click();
    await app.whenIdle();
  };
  const view = () => root.querySelector("[data-view]")!.getAttribute("data-view");
  const taskId = () => root.querySelector("[data-view]")!.getAttribute("data-task")!;

  await click('[data-action="start"]');
  expect(app.lastError).toBeNull();
  expect(view()).toBe("training");

  // Training gate: a deliberate wrong pick must not advance.
  const firstTask = taskId();
  const wrong = truth[firstTask] === "Linear" ? "Arch" : "Linear";
  await click(`[data-option="${wrong}"]`);
  await click('[data-action="submit"]');
  expect(view()).toBe("training");
  expect(taskId()).toBe(firstTask);
  expect(root.querySelector('[data-role="notice"]')!.textContent).toMatch(/try again/i);

  // Advance through training with correct picks only.
  let guard = 0;
  while (view() === "training" && guard++ < 10) {
    await click(`[data-option="${truth[taskId()]}"]`);
    await click('[data-action="submit"]');
  }
  expect(view()).toBe("task");

  // Ten main tasks with confidence + reasoning; no correctness feedback.
  let answered = 0;
  while (view() === "task" && answered < 12) {
    const announcements = root.querySelectorAll(".announcement");
    expect(announcements).toHaveLength(3);
    await click(`[data-option="${truth[taskId()]}"]`);
    const select = root.querySelector('[data-role="confidence"]') as HTMLSelectElement;
    select.value = String(1 + (answered % 5));
    select.dispatchEvent(new Event("change"));
    const textarea = root.querySelector('[data-role="reasoning"]') as HTMLTextAreaElement;
    textarea.value = `scripted reasoning for task ${answered + 1}`;
    textarea.dispatchEvent(new Event("input"));
    await click('[data-action="submit"]');
    answered += 1;
  }
  expect(answered).toBe(10);
  expect(view()).toBe("done");

  // Server journal holds exactly ten responses, all with positive elapsed time.
  const journal = readFileSync(join(workDir, "journal.jsonl"), "utf-8")
    .split("\n")
    .filter((line) => line.trim())
    .map((line) => JSON.parse(line));
  const responses = journal.filter((event) => event.event === "response");
  expect(responses).toHaveLength(10);
  for (const response of responses) {
    expect(response.elapsed_ms).toBeGreaterThan(0);
    expect(response.reasoning).toMatch(/scripted reasoning/);
  }

  // No payload served to the client carries ground-truth labels: task views
  // expose only the fixed option list, opaque task ids, and plain
  // content/timestamp announcements.
  expect(currentPayloads.length).toBeGreaterThan(0);
  for (const payload of currentPayloads) {
    const keys = Object.keys(payload).sort();
    if (payload.phase === "done") {
      expect(keys).toEqual(["options", "phase", "session_id"]);
      continue;
    }
    expect(keys).toEqual(
      ["announcements", "options", "phase", "progress", "session_id", "task_id"],
    );
    for (const a of payload.announcements as Array<Record<string, unknown>>) {
      expect(Object.keys(a).sort()).toEqual(["content", "timestamp"]);
    }
    const taskTruth = truth[payload.task_id as string];
    expect(JSON.stringify(payload.task_id)).not.toContain(taskTruth);
  }
});
