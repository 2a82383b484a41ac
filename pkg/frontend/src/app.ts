/** Wires the chat UI to the service client.
 *
 * One in-flight turn per session: the composer is disabled from submit to
 * response. Error envelopes surface verbatim in toasts; a failed session
 * create offers a retry. All rendering goes through the pure functions in
 * render.ts from service responses only.
 */

import { ServiceError, type DialogClient, type TranscriptResponse } from "./api.js";
import {
  bookingRefsFromTrace,
  renderBookingBanner,
  renderTranscriptView,
  renderTurnBlock,
} from "./render.js";
import { showToast } from "./toast.js";

const LAYOUT = `
<header><h1>ticket chat</h1><span id="session-label" class="session-label"></span></header>
<div id="banner-slot"></div>
<main>
  <section id="chat-log" class="chat-log" aria-live="polite"></section>
  <section class="transcript-section">
    <div class="transcript-header">
      <h2>transcript</h2>
      <label class="raw-toggle-label">
        <input type="checkbox" id="raw-toggle" /> raw token view
      </label>
    </div>
    <div id="transcript-view" class="transcript-view"></div>
  </section>
</main>
<footer class="composer">
  <input id="composer-input" type="text" placeholder="say something" autocomplete="off" disabled />
  <button id="composer-send" disabled>send</button>
</footer>
<div id="toast-region" class="toast-region" role="status"></div>
`;

function describeError(error: unknown): string {
  if (error instanceof ServiceError) {
    const detail =
      error.envelope.detail === null || error.envelope.detail === undefined
        ? ""
        : ` ${JSON.stringify(error.envelope.detail)}`;
    return `${error.envelope.code}: ${error.envelope.message}${detail}`;
  }
  return error instanceof Error ? error.message : String(error);
}

export interface App {
  ready: Promise<void>;
}

export function wireApp(root: HTMLElement, api: DialogClient): App {
  root.innerHTML = LAYOUT;
  const must = <T extends HTMLElement>(selector: string): T => {
    const element = root.querySelector<T>(selector);
    if (!element) {
      throw new Error(`layout is missing ${selector}`);
    }
    return element;
  };
  const log = must<HTMLElement>("#chat-log");
  const input = must<HTMLInputElement>("#composer-input");
  const send = must<HTMLButtonElement>("#composer-send");
  const bannerSlot = must<HTMLElement>("#banner-slot");
  const transcriptView = must<HTMLElement>("#transcript-view");
  const rawToggle = must<HTMLInputElement>("#raw-toggle");
  const toastRegion = must<HTMLElement>("#toast-region");
  const sessionLabel = must<HTMLElement>("#session-label");

  let sessionId: string | null = null;
  let inFlight = false;
  let transcript: TranscriptResponse = { events: [], pairs: [] };

  function updateComposer(): void {
    const enabled = sessionId !== null && !inFlight;
    input.disabled = !enabled;
    send.disabled = !enabled;
  }

  function repaintTranscript(): void {
    transcriptView.innerHTML = renderTranscriptView(transcript, rawToggle.checked);
  }

  async function startSession(): Promise<void> {
    try {
      const created = await api.createSession();
      sessionId = created.session_id;
      sessionLabel.textContent = created.session_id;
      repaintTranscript();
    } catch (error) {
      showToast(toastRegion, describeError(error), {
        retryLabel: "retry",
        onRetry: () => {
          void startSession();
        },
      });
    } finally {
      updateComposer();
    }
  }

  async function submit(): Promise<void> {
    const text = input.value.trim();
    if (sessionId === null || inFlight || text === "") {
      return;
    }
    inFlight = true;
    updateComposer();
    try {
      const turn = await api.sendUtterance(sessionId, text);
      log.insertAdjacentHTML("beforeend", renderTurnBlock(text, turn));
      const refs = bookingRefsFromTrace(turn.api_trace);
      if (refs.length > 0) {
        bannerSlot.innerHTML = renderBookingBanner(refs);
      }
      input.value = "";
      transcript = await api.getTranscript(sessionId);
      repaintTranscript();
    } catch (error) {
      showToast(toastRegion, describeError(error));
    } finally {
      inFlight = false;
      updateComposer();
      input.focus();
    }
  }

  send.addEventListener("click", () => {
    void submit();
  });
  input.addEventListener("keydown", (event) => {
    if (event.key === "Enter") {
      void submit();
    }
  });
  rawToggle.addEventListener("change", repaintTranscript);

  return { ready: startSession() };
}
