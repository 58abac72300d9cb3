import { beforeEach, describe, expect, it } from "vitest";

import { StudyApi, CurrentPayload, TrainingAck, ResponseAck, SessionInfo } from "../src/api.js";
import { StudyApp, validateSubmission } from "../src/ui.js";

describe("validateSubmission", () => {
  it("requires a selection first", () => {
    expect(validateSubmission({ selected: null, confidence: 3, reasoning: "x" })).toMatch(
      /pick the pattern/i,
    );
  });

  it("requires a confidence rating", () => {
    expect(validateSubmission({ selected: "Arch", confidence: null, reasoning: "x" })).toMatch(
      /confidence/i,
    );
  });

  it("rejects out-of-scale confidence", () => {
    expect(validateSubmission({ selected: "Arch", confidence: 6, reasoning: "x" })).toMatch(
      /1 to 5/,
    );
  });

  it("rejects whitespace-only reasoning", () => {
    expect(validateSubmission({ selected: "Arch", confidence: 4, reasoning: "   " })).toMatch(
      /reasoning/i,
    );
  });

  it("accepts a complete draft", () => {
    expect(validateSubmission({ selected: "Arch", confidence: 4, reasoning: "returns" })).toBeNull();
  });
});

const OPTIONS = [
  "Linear", "Arch", "Ladder", "EarlyTurn", "LateTurn",
  "SharpBranch", "WideBranch", "SharpMerge", "WideMerge",
];

// Offline stand-in for the service: one training task, one main task.
class FakeApi extends StudyApi {
  phase: "training" | "task" | "done" = "training";
  trainingSubmissions: string[] = [];
  responses: Array<{ selected: string; confidence: number; reasoning: string }> = [];

  constructor() {
    super("");
  }

  override glyphUrl(motif: string): string {
    return `about:blank#${motif}`;
  }

  override async createSession(): Promise<SessionInfo> {
    return {
      session_id: "fake", participant_id: "p", set_id: 0,
      phase: "training", training_total: 1, task_total: 1,
    };
  }

  override async getCurrent(): Promise<CurrentPayload> {
    return {
      session_id: "fake",
      phase: this.phase,
      options: OPTIONS,
      progress: { done: 0, total: 1 },
      task_id: this.phase === "done" ? undefined : `${this.phase}-task`,
      announcements: this.phase === "done" ? undefined : [
        { content: "First announcement.", timestamp: "2023-01-10" },
        { content: "Second announcement.", timestamp: "2023-05-04" },
        { content: "Third announcement.", timestamp: "2023-09-21" },
      ],
    };
  }

  override async submitTraining(_s: string, _t: string, selected: string): Promise<TrainingAck> {
    this.trainingSubmissions.push(selected);
    const correct = selected === "Arch";
    if (correct) this.phase = "task";
    return { correct, advance: correct, attempts: this.trainingSubmissions.length, phase: this.phase };
  }

  override async submitResponse(
    _s: string, _t: string, selected: string, confidence: number, reasoning: string,
  ): Promise<ResponseAck> {
    this.responses.push({ selected, confidence, reasoning });
    this.phase = "done";
    return { ok: true, response_id: "r0", phase: "done" };
  }
}

describe("StudyApp flow against a fake service", () => {
  let api: FakeApi;
  let app: StudyApp;
  let root: HTMLElement;

  const click = (selector: string) => {
    const node = root.querySelector(selector) as HTMLElement | null;
    expect(node, selector).not.toBeNull();
    node!.click();
    return app.whenIdle();
  };

  beforeEach(async () => {
    document.body.innerHTML = '<main id="app"></main>';
    root = document.getElementById("app") as HTMLElement;
    api = new FakeApi();
    app = new StudyApp(root, api, "tester");
    await app.start();
  });

  it("shows instructions first, then training after start", async () => {
    expect(root.querySelector('[data-view="instructions"]')).not.toBeNull();
    await click('[data-action="start"]');
    expect(root.querySelector('[data-view="training"]')).not.toBeNull();
    expect(root.querySelectorAll("button.option")).toHaveLength(9);
  });

  it("keeps the training task on a wrong pick without revealing the answer", async () => {
    await click('[data-action="start"]');
    await click('[data-option="Linear"]');
    await click('[data-action="submit"]');
    const notice = root.querySelector('[data-role="notice"]')!.textContent ?? "";
    expect(notice).toMatch(/try again/i);
    expect(notice).not.toContain("Arch");
    expect(root.querySelector('[data-view="training"]')).not.toBeNull();
    await click('[data-option="Arch"]');
    await click('[data-action="submit"]');
    expect(root.querySelector('[data-view="task"]')).not.toBeNull();
  });

  it("blocks task submission until selection, confidence, and reasoning exist", async () => {
    await click('[data-action="start"]');
    await click('[data-option="Arch"]');
    await click('[data-action="submit"]'); // now in task phase

    await click('[data-option="Ladder"]');
    await click('[data-action="submit"]');
    expect(root.querySelector('[data-role="notice"]')!.textContent).toMatch(/confidence/i);
    expect(api.responses).toHaveLength(0);

    const select = root.querySelector('[data-role="confidence"]') as HTMLSelectElement;
    select.value = "4";
    select.dispatchEvent(new Event("change"));
    await click('[data-action="submit"]');
    expect(root.querySelector('[data-role="notice"]')!.textContent).toMatch(/reasoning/i);
    expect(api.responses).toHaveLength(0);

    const textarea = root.querySelector('[data-role="reasoning"]') as HTMLTextAreaElement;
    textarea.value = "steps across all three tracks";
    textarea.dispatchEvent(new Event("input"));
    await click('[data-action="submit"]');
    expect(api.responses).toEqual([
      { selected: "Ladder", confidence: 4, reasoning: "steps across all three tracks" },
    ]);
    expect(root.querySelector('[data-view="done"]')).not.toBeNull();
  });
});
