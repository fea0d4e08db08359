/**
 * App bootstrap: fetch the served constants, start (or resume) a session,
 * and wire the stack, answer panel, and progress panel together.
 *
 * The API base defaults to the page origin; override with ?api=http://host:port.
 */

import { ApiClient } from "./api.js";
import { renderProgressPanel, type ScorePoint } from "./progress.js";
import { StackView } from "./stack.js";
import type { ProgressSummary, UiConfig } from "./types.js";

function el<T extends HTMLElement>(id: string): T {
  const node = document.getElementById(id);
  if (!node) {
    throw new Error(`missing #${id}`);
  }
  return node as T;
}

async function start(): Promise<void> {
  const params = new URLSearchParams(window.location.search);
  const api = new ApiClient(params.get("api") ?? "");
  const cfg: UiConfig = await api.config();

  const studentId = params.get("student") ?? `web-${Math.random().toString(36).slice(2, 8)}`;
  // a refresh mid-session resumes from GET /stack rather than starting over
  const resumeKey = `swipelearn-session:${studentId}`;
  let sessionId = window.sessionStorage.getItem(resumeKey);
  let initialStack = null;
  if (sessionId) {
    try {
      initialStack = await api.stack(sessionId);
    } catch {
      sessionId = null;
    }
  }
  if (!sessionId) {
    const created = await api.createSession(studentId);
    sessionId = created.session_id;
    window.sessionStorage.setItem(resumeKey, sessionId);
    initialStack = await api.stack(sessionId);
  }
  el("session-label").textContent = `${studentId} · ${sessionId}`;

  const scoreHistory: ScorePoint[] = [];
  const answerPanel = el("answer-panel");
  const progressPanel = el("progress-panel");
  let engagedAt = 0;

  const refreshProgress = async () => {
    const summary: ProgressSummary = await api.progress(sessionId);
    renderProgressPanel(progressPanel, summary, scoreHistory);
    return summary;
  };

  const stack = new StackView(el("stack"), api, cfg, sessionId, {
    onEngaged(itemRef, cardId) {
      engagedAt = Date.now();
      answerPanel.textContent = "";
      const title = document.createElement("div");
      title.textContent = `Working on ${itemRef} — how did it go?`;
      answerPanel.appendChild(title);
      for (const [label, correct] of [["Correct", true], ["Wrong", false]] as const) {
        const button = document.createElement("button");
        button.textContent = label;
        button.addEventListener("click", async () => {
          answerPanel.textContent = "";
          const elapsed = Math.max((Date.now() - engagedAt) / 1000, 0.1);
          const result = await api.answer(sessionId, cardId, correct, elapsed);
          scoreHistory.push({ seq: result.progress.cards_answered, score: result.progress.score });
          renderProgressPanel(progressPanel, result.progress, scoreHistory);
          stack.setStack(result);
        });
        answerPanel.appendChild(button);
      }
    },
    onConnectionLost() {
      el("banner").textContent = "Connection lost — reload to reconnect.";
      el("banner").classList.add("visible");
    },
  });

  stack.setStack(initialStack!);
  await refreshProgress();
}

start().catch((err) => {
  const banner = document.getElementById("banner");
  if (banner) {
    banner.textContent = `Failed to start: ${err}`;
    banner.classList.add("visible");
  }
});
