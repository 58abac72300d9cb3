// Typed client for the study service HTTP API. The server is the single
// source of truth for session state; the client never sees ground truth.

export interface SessionInfo {
  session_id: string;
  participant_id: string;
  set_id: number;
  phase: string;
  training_total: number;
  task_total: number;
}

export interface AnnouncementView {
  content: string;
  timestamp: string;
}

export interface CurrentPayload {
  session_id: string;
  phase: "training" | "task" | "done";
  options: string[];
  progress?: { done: number; total: number };
  task_id?: string;
  announcements?: AnnouncementView[];
}

export interface TrainingAck {
  correct: boolean;
  advance: boolean;
  attempts: number;
  phase: string;
}

export interface ResponseAck {
  ok: boolean;
  response_id: string;
  phase: string;
}

export class ApiError extends Error {
  constructor(public status: number, message: string) {
    super(message);
  }
}

export class StudyApi {
  constructor(private baseUrl: string = "") {}

  glyphUrl(motif: string): string {
    return `${this.baseUrl}/glyphs/${motif}.svg`;
  }

  private async request<T>(path: string, init?: RequestInit): Promise<T> {
    const resp = await fetch(`${this.baseUrl}${path}`, {
      headers: { "Content-Type": "application/json" },
      ...init,
    });
    const text = await resp.text();
    if (!resp.ok) {
      let detail = text;
      try {
        detail = JSON.parse(text).detail ?? text;
      } catch {
        // plain-text error body
      }
      throw new ApiError(resp.status, String(detail));
    }
    return JSON.parse(text) as T;
  }

  createSession(participantId: string, seed?: number): Promise<SessionInfo> {
    return this.request<SessionInfo>("/sessions", {
      method: "POST",
      body: JSON.stringify({ participant_id: participantId, seed: seed ?? null }),
    });
  }

  getCurrent(sessionId: string): Promise<CurrentPayload> {
    return this.request<CurrentPayload>(`/sessions/${sessionId}/current`);
  }

  submitTraining(sessionId: string, taskId: string, selected: string): Promise<TrainingAck> {
    return this.request<TrainingAck>(`/sessions/${sessionId}/training`, {
      method: "POST",
      body: JSON.stringify({ task_id: taskId, selected }),
    });
  }

  submitResponse(
    sessionId: string,
    taskId: string,
    selected: string,
    confidence: number,
    reasoning: string,
  ): Promise<ResponseAck> {
    return this.request<ResponseAck>(`/sessions/${sessionId}/responses`, {
      method: "POST",
      body: JSON.stringify({
        task_id: taskId,
        selected,
        confidence,
        reasoning,
      }),
    });
  }
}
