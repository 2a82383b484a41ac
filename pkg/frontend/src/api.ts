/** Typed client for the dialog session HTTP service.
 *
 * Every non-2xx response carries an envelope {code, message, detail}; this
 * client surfaces it unchanged inside a ServiceError so the UI can show it
 * verbatim. Network failures become a synthetic NetworkError envelope with
 * status 0.
 */

export interface ErrorEnvelope {
  code: string;
  message: string;
  detail: unknown;
}

export class ServiceError extends Error {
  constructor(
    readonly status: number,
    readonly envelope: ErrorEnvelope,
  ) {
    super(`${envelope.code}: ${envelope.message}`);
    this.name = "ServiceError";
  }
}

export interface TraceArg {
  name: string;
  value: string;
}

export interface TraceResultField {
  name: string;
  values: string[];
}

export interface TraceEntry {
  name: string;
  args: TraceArg[];
  result: TraceResultField[];
}

export interface TurnResponse {
  agent_text: string;
  api_trace: TraceEntry[];
  truncated: boolean;
}

export type TranscriptEvent =
  | { kind: "utterance"; speaker: "user" | "agent"; text: string }
  | { kind: "call"; name: string; args: [string, string][] }
  | { kind: "result"; name: string; args: [string, string[]][] };

export interface TrainingPair {
  input: string;
  target: string;
  exchange_index: number;
}

export interface TranscriptResponse {
  events: TranscriptEvent[];
  pairs: TrainingPair[];
}

type Fetcher = (input: string, init?: RequestInit) => Promise<Response>;

/** What the UI needs from the service; DialogApi is the fetch-backed implementation. */
export interface DialogClient {
  createSession(defaultLocation?: string): Promise<{ session_id: string }>;
  sendUtterance(sessionId: string, text: string): Promise<TurnResponse>;
  getTranscript(sessionId: string): Promise<TranscriptResponse>;
}

export class DialogApi implements DialogClient {
  constructor(
    private readonly base: string = "",
    private readonly fetcher: Fetcher = (input, init) => fetch(input, init),
  ) {}

  private async request<T>(path: string, init?: RequestInit): Promise<T> {
    let response: Response;
    try {
      response = await this.fetcher(this.base + path, init);
    } catch (error) {
      throw new ServiceError(0, {
        code: "NetworkError",
        message: error instanceof Error ? error.message : String(error),
        detail: null,
      });
    }
    const body: unknown = await response.json().catch(() => null);
    if (!response.ok) {
      const envelope =
        body !== null && typeof body === "object" && "code" in body && "message" in body
          ? (body as ErrorEnvelope)
          : { code: `HTTP${response.status}`, message: response.statusText, detail: body };
      throw new ServiceError(response.status, envelope);
    }
    return body as T;
  }

  createSession(defaultLocation?: string): Promise<{ session_id: string }> {
    return this.request("/v1/sessions", {
      method: "POST",
      headers: { "Content-Type": "application/json" },
      body: JSON.stringify(defaultLocation ? { default_location: defaultLocation } : {}),
    });
  }

  sendUtterance(sessionId: string, text: string): Promise<TurnResponse> {
    return this.request(`/v1/sessions/${encodeURIComponent(sessionId)}/utterance`, {
      method: "POST",
      headers: { "Content-Type": "application/json" },
      body: JSON.stringify({ text }),
    });
  }

  getTranscript(sessionId: string): Promise<TranscriptResponse> {
    return this.request(`/v1/sessions/${encodeURIComponent(sessionId)}/transcript`);
  }

  health(): Promise<{ status: string }> {
    return this.request("/v1/healthz");
  }
}
