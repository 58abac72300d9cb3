// View layer and session flow. Server-driven: every screen is rebuilt from
// GET current, so a page refresh resumes exactly where the server says.

import { CurrentPayload, StudyApi } from "./api.js";

export interface SubmissionDraft {
  selected: string | null;
  confidence: number | null;
  reasoning: string;
}

// Inline validation for the task phase; returns a message or null when valid.
export function validateSubmission(draft: SubmissionDraft): string | null {
  if (!draft.selected) return "Pick the pattern that matches the story.";
  if (draft.confidence === null) return "Rate your confidence (1–5).";
  if (!Number.isInteger(draft.confidence) || draft.confidence < 1 || draft.confidence > 5) {
    return "Confidence must be a whole number from 1 to 5.";
  }
  if (draft.reasoning.trim().length === 0) return "Briefly explain your reasoning.";
  return null;
}

function el<K extends keyof HTMLElementTagNameMap>(
  tag: K,
  attrs: Record<string, string> = {},
  text?: string,
): HTMLElementTagNameMap[K] {
  const node = document.createElement(tag);
  for (const [key, value] of Object.entries(attrs)) node.setAttribute(key, value);
  if (text !== undefined) node.textContent = text;
  return node;
}

// Editable instructional copy shown before training starts.
export const INSTRUCTIONS_HTML = `
  <h1>How news stories move</h1>
  <p>You will read short sets of three news announcements, each with a
  timestamp. Announcements belong to horizontal <strong>tracks</strong>
  (storylines grouped by a shared theme or actor); time runs left to right.
  A story can stay on one track, move between tracks, split into two
  tracks, or merge from two tracks into one.</p>
  <p>Nine small diagrams describe these movements. For each set of
  announcements, pick the diagram whose shape matches the story best, rate
  your confidence, and explain your choice in a sentence. There are ten
  story sets; a short practice round comes first.</p>
`;

export class StudyApp {
  readonly root: HTMLElement;
  readonly api: StudyApi;
  participantId: string;
  sessionId: string | null = null;
  draft: SubmissionDraft = { selected: null, confidence: null, reasoning: "" };
  lastError: string | null = null;
  private inflight: Promise<void> = Promise.resolve();
  private submitting = false;

  constructor(root: HTMLElement, api: StudyApi, participantId: string) {
    this.root = root;
    this.api = api;
    this.participantId = participantId;
  }

  // Tests and main() can await the last event-triggered action.
  whenIdle(): Promise<void> {
    return this.inflight;
  }

  // Serialises event-triggered actions; a failed request surfaces a retry
  // banner (the server keeps all state, so retrying is always safe).
  private track(action: () => Promise<void>): Promise<void> {
    const run = this.inflight.then(action).catch((err: unknown) => {
      this.lastError = err instanceof Error ? err.message : String(err);
      this.setNotice("Connection problem — please check your network and retry.");
    });
    this.inflight = run;
    return run;
  }

  async start(existingSessionId?: string): Promise<void> {
    if (existingSessionId) {
      this.sessionId = existingSessionId;
      await this.refresh();
      return;
    }
    this.renderInstructions();
  }

  async beginSession(): Promise<void> {
    const info = await this.api.createSession(this.participantId);
    this.sessionId = info.session_id;
    try {
      window.sessionStorage.setItem("study-session", this.sessionId);
    } catch {
      // storage unavailable (private mode); refresh resume is best-effort
    }
    await this.refresh();
  }

  async refresh(): Promise<void> {
    if (!this.sessionId) return;
    const payload = await this.api.getCurrent(this.sessionId);
    this.draft = { selected: null, confidence: null, reasoning: "" };
    if (payload.phase === "done") {
      this.renderDone();
    } else {
      this.renderTask(payload);
    }
  }

  private renderInstructions(): void {
    this.root.innerHTML = "";
    const panel = el("section", { class: "instructions", "data-view": "instructions" });
    panel.innerHTML = INSTRUCTIONS_HTML;
    const button = el("button", { "data-action": "start" }, "Start the practice round");
    button.addEventListener("click", () => void this.track(() => this.beginSession()));
    panel.appendChild(button);
    this.root.appendChild(panel);
  }

  private renderDone(): void {
    this.root.innerHTML = "";
    const panel = el("section", { class: "done", "data-view": "done" });
    panel.appendChild(el("h1", {}, "All tasks complete"));
    panel.appendChild(
      el("p", {}, "Thank you. Your responses have been recorded; you can close this tab."),
    );
    this.root.appendChild(panel);
  }

  private renderTask(payload: CurrentPayload): void {
    const training = payload.phase === "training";
    this.root.innerHTML = "";
    const view = el("section", {
      class: "task",
      "data-view": payload.phase,
      "data-task": payload.task_id ?? "",
    });

    const header = el("header", {});
    header.appendChild(el("h1", {}, training ? "Practice round" : "Matching task"));
    if (payload.progress) {
      header.appendChild(
        el(
          "p",
          { class: "progress", "data-role": "progress" },
          `${training ? "Practice" : "Task"} ${payload.progress.done + 1} of ${payload.progress.total}`,
        ),
      );
    }
    view.appendChild(header);

    const columns = el("div", { class: "columns" });

    // Left: the nine motif options, fixed order, glyphs from the service.
    const optionPanel = el("div", { class: "options", "data-role": "options" });
    optionPanel.appendChild(el("h2", {}, "Patterns"));
    for (const motif of payload.options) {
      const button = el("button", {
        class: "option",
        "data-option": motif,
        type: "button",
        "aria-pressed": "false",
      });
      const img = el("img", { src: this.api.glyphUrl(motif), alt: `${motif} pattern` });
      button.appendChild(img);
      button.appendChild(el("span", {}, motif));
      button.addEventListener("click", () => {
        this.draft.selected = motif;
        optionPanel
          .querySelectorAll("button.option")
          .forEach((b) => b.setAttribute("aria-pressed", b === button ? "true" : "false"));
        this.setNotice("");
      });
      optionPanel.appendChild(button);
    }
    columns.appendChild(optionPanel);

    // Right: announcements in plain text with their timestamps.
    const textPanel = el("div", { class: "announcements", "data-role": "announcements" });
    textPanel.appendChild(el("h2", {}, "Announcements"));
    for (const a of payload.announcements ?? []) {
      const item = el("article", { class: "announcement" });
      item.appendChild(el("time", {}, a.timestamp));
      item.appendChild(el("p", {}, a.content));
      textPanel.appendChild(item);
    }
    columns.appendChild(textPanel);
    view.appendChild(columns);

    const form = el("div", { class: "controls" });
    if (!training) {
      const confidence = el("label", { class: "confidence" }, "Confidence: ");
      const select = el("select", { "data-role": "confidence" });
      select.appendChild(el("option", { value: "" }, "—"));
      for (let i = 1; i <= 5; i++) select.appendChild(el("option", { value: String(i) }, String(i)));
      select.addEventListener("change", () => {
        this.draft.confidence = select.value === "" ? null : Number(select.value);
      });
      confidence.appendChild(select);
      form.appendChild(confidence);

      const reasoning = el("textarea", {
        "data-role": "reasoning",
        placeholder: "Why does this pattern match?",
      });
      reasoning.addEventListener("input", () => {
        this.draft.reasoning = reasoning.value;
      });
      form.appendChild(reasoning);
    }

    const notice = el("p", { class: "notice", "data-role": "notice" }, "");
    form.appendChild(notice);

    const submit = el("button", { "data-action": "submit", type: "button" },
                      training ? "Check" : "Submit");
    submit.addEventListener("click", () => void this.track(() => this.submit(payload)));
    form.appendChild(submit);
    view.appendChild(form);

    this.root.appendChild(view);
  }

  private setNotice(message: string): void {
    const notice = this.root.querySelector('[data-role="notice"]');
    if (notice) notice.textContent = message;
  }

  private async submit(payload: CurrentPayload): Promise<void> {
    if (this.submitting || !this.sessionId || !payload.task_id) return;
    if (payload.phase === "training") {
      if (!this.draft.selected) {
        this.setNotice("Pick the pattern that matches the story.");
        return;
      }
      this.submitting = true;
      try {
        const ack = await this.api.submitTraining(
          this.sessionId, payload.task_id, this.draft.selected,
        );
        if (ack.correct) {
          await this.refresh();
        } else {
          // Retry affordance only; the right answer is never shown.
          this.setNotice("Not quite — compare the track movements and try again.");
        }
      } finally {
        this.submitting = false;
      }
      return;
    }

    const problem = validateSubmission(this.draft);
    if (problem) {
      this.setNotice(problem);
      return;
    }
    this.submitting = true;
    try {
      await this.api.submitResponse(
        this.sessionId,
        payload.task_id,
        this.draft.selected as string,
        this.draft.confidence as number,
        this.draft.reasoning.trim(),
      );
      await this.refresh();
    } finally {
      this.submitting = false;
    }
  }
}
