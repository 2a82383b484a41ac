/** Pure HTML renderers. Every function maps service data to a markup string
 * with no other inputs, so the rendered views are a pure function of the
 * HTTP responses; the UI never synthesizes agent text or API calls.
 */

import type { TraceEntry, TrainingPair, TranscriptEvent, TranscriptResponse, TurnResponse } from "./api.js";

export function escapeHtml(text: string): string {
  return text
    .replace(/&/g, "&amp;")
    .replace(/</g, "&lt;")
    .replace(/>/g, "&gt;")
    .replace(/"/g, "&quot;");
}

function chip(key: string, value: string): string {
  return (
    `<span class="chip"><span class="chip-key">${escapeHtml(key)}</span>` +
    `<span class="chip-value">${escapeHtml(value)}</span></span>`
  );
}

export function renderTraceEntry(entry: TraceEntry): string {
  const argChips = entry.args.map((arg) => chip(arg.name, arg.value)).join("");
  const resultChips = entry.result
    .map((field) => chip(field.name, field.values.join(", ")))
    .join("");
  return (
    `<details class="trace-entry"><summary>${escapeHtml(entry.name)}</summary>` +
    `<div class="chips chips-args">${argChips || "<em>no arguments</em>"}</div>` +
    `<div class="chips chips-results">${resultChips || "<em>no results</em>"}</div>` +
    `</details>`
  );
}

export function renderTurnBlock(userText: string, turn: TurnResponse): string {
  const trace = turn.api_trace.map(renderTraceEntry).join("");
  const tracePanel = trace ? `<div class="trace-panel">${trace}</div>` : "";
  const truncatedBadge = turn.truncated
    ? `<span class="badge badge-truncated">history truncated</span>`
    : "";
  return (
    `<div class="turn">` +
    `<div class="message user">${escapeHtml(userText)}</div>` +
    tracePanel +
    `<div class="message agent">${escapeHtml(turn.agent_text)}${truncatedBadge}</div>` +
    `</div>`
  );
}

export function bookingRefsFromTrace(trace: TraceEntry[]): string[] {
  const refs: string[] = [];
  for (const entry of trace) {
    if (entry.name !== "book_tickets") {
      continue;
    }
    const fields = new Map(entry.result.map((field) => [field.name, field.values]));
    if ((fields.get("status") ?? []).includes("success")) {
      refs.push(...(fields.get("ref.id") ?? []));
    }
  }
  return refs;
}

export function renderBookingBanner(refs: string[]): string {
  return (
    `<div class="banner banner-booking">Booking confirmed` +
    `<span class="banner-refs">${refs.map(escapeHtml).join(", ")}</span></div>`
  );
}

function renderEvent(event: TranscriptEvent): string {
  if (event.kind === "utterance") {
    return (
      `<div class="event event-${event.speaker}">` +
      `<span class="who">${event.speaker}</span>` +
      `<span class="text">${escapeHtml(event.text)}</span></div>`
    );
  }
  if (event.kind === "call") {
    const args = event.args.map(([name, value]) => chip(name, value)).join("");
    return (
      `<div class="event event-call"><span class="who">call</span>` +
      `<span class="api-name">${escapeHtml(event.name)}</span>` +
      `<span class="chips">${args}</span></div>`
    );
  }
  const fields = event.args.map(([name, values]) => chip(name, values.join(", "))).join("");
  return (
    `<div class="event event-result"><span class="who">result</span>` +
    `<span class="api-name">${escapeHtml(event.name)}</span>` +
    `<span class="chips">${fields}</span></div>`
  );
}

export function renderTranscriptEvents(events: TranscriptEvent[]): string {
  if (events.length === 0) {
    return `<p class="empty">No turns yet.</p>`;
  }
  return events.map(renderEvent).join("");
}

export function renderPairs(pairs: TrainingPair[]): string {
  if (pairs.length === 0) {
    return `<p class="empty">No pairs yet.</p>`;
  }
  const rows = pairs
    .map(
      (pair) =>
        `<div class="pair"><span class="pair-index">${pair.exchange_index}</span>` +
        `<code class="pair-input">${escapeHtml(pair.input)}</code>` +
        `<code class="pair-target">${escapeHtml(pair.target)}</code></div>`,
    )
    .join("");
  return `<div class="pairs">${rows}</div>`;
}

export function renderTranscriptView(transcript: TranscriptResponse, raw: boolean): string {
  return raw ? renderPairs(transcript.pairs) : renderTranscriptEvents(transcript.events);
}
