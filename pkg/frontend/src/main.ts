// Bootstrap: one session per tab, resumed from sessionStorage on refresh.

import { StudyApi } from "./api.js";
import { StudyApp } from "./ui.js";

function participantId(): string {
  const fromQuery = new URLSearchParams(window.location.search).get("participant");
  if (fromQuery) return fromQuery;
  const existing = window.sessionStorage.getItem("study-participant");
  if (existing) return existing;
  const generated = `anon-${Math.random().toString(36).slice(2, 10)}`;
  window.sessionStorage.setItem("study-participant", generated);
  return generated;
}

const root = document.getElementById("app");
if (root) {
  const app = new StudyApp(root, new StudyApi(""), participantId());
  const resumed = window.sessionStorage.getItem("study-session");
  void app.start(resumed ?? undefined);
}
