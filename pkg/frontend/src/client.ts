/**
 * Pure client logic for the negotia-dm chat API.
 *
 * No dialogue logic lives here: the server is the single source of truth and
 * the view state only mirrors what it returned last. All functions return a
 * fresh view object; the caller re-renders from it.
 */

export interface StateSummary {
  constraints: Record<string, string>;
  declined: string[];
  last_count: number | null;
  qud: string | null;
  goal_stack: { goal: string; status: string }[];
  alternatives_count: number | null;
  ended: boolean;
}

export interface TranscriptTurn {
  speaker: "U" | "S";
  text: string;
}

export interface ChatViewState {
  serverUrl: string;
  sessionId: string;
  greeting: string;
  transcript: TranscriptTurn[];
  state: StateSummary;
  pending: boolean;
}

export interface StartOptions {
  domain?: string;
  fixture?: string;
}

export type FetchLike = typeof fetch;

export class ApiError extends Error {
  constructor(public readonly status: number, message: string) {
    super(message);
    this.name = "ApiError";
  }
}

async function request<T>(
  fetchImpl: FetchLike,
  url: string,
  init?: RequestInit,
): Promise<T> {
  let response: Response;
  try {
    response = await fetchImpl(url, init);
  } catch (error) {
    throw new ApiError(0, `cannot reach server: ${String(error)}`);
  }
  if (!response.ok) {
    let detail = response.statusText;
    try {
      const body = (await response.json()) as { detail?: unknown };
      if (body.detail !== undefined) detail = JSON.stringify(body.detail);
    } catch {
      /* non-JSON error body; keep the status text */
    }
    throw new ApiError(response.status, detail);
  }
  if (response.status === 204) {
    return undefined as T;
  }
  return (await response.json()) as T;
}

export async function startChat(
  serverUrl: string,
  options: StartOptions = {},
  fetchImpl: FetchLike = fetch,
): Promise<ChatViewState> {
  const base = serverUrl.replace(/\/+$/, "");
  const created = await request<{
    session_id: string;
    system_text: string;
    state: StateSummary;
  }>(fetchImpl, `${base}/sessions`, {
    method: "POST",
    headers: { "content-type": "application/json" },
    body: JSON.stringify(options),
  });
  return {
    serverUrl: base,
    sessionId: created.session_id,
    greeting: created.system_text,
    transcript: [],
    state: created.state,
    pending: false,
  };
}

export async function sendTurn(
  view: ChatViewState,
  text: string,
  fetchImpl: FetchLike = fetch,
): Promise<ChatViewState> {
  if (view.pending) {
    throw new ApiError(0, "a turn is already in flight");
  }
  const reply = await request<{ system_text: string; state: StateSummary }>(
    fetchImpl,
    `${view.serverUrl}/sessions/${view.sessionId}/utterances`,
    {
      method: "POST",
      headers: { "content-type": "application/json" },
      body: JSON.stringify({ text }),
    },
  );
  return {
    ...view,
    transcript: [
      ...view.transcript,
      { speaker: "U", text },
      { speaker: "S", text: reply.system_text },
    ],
    state: reply.state,
    pending: false,
  };
}

export async function fetchServerTranscript(
  view: ChatViewState,
  fetchImpl: FetchLike = fetch,
): Promise<{ transcript: TranscriptTurn[]; state: StateSummary }> {
  const body = await request<{
    session_id: string;
    transcript: TranscriptTurn[];
    state: StateSummary;
  }>(fetchImpl, `${view.serverUrl}/sessions/${view.sessionId}`);
  return { transcript: body.transcript, state: body.state };
}

export async function endChat(
  view: ChatViewState,
  fetchImpl: FetchLike = fetch,
): Promise<void> {
  await request<void>(fetchImpl, `${view.serverUrl}/sessions/${view.sessionId}`, {
    method: "DELETE",
  });
}

/** True when the client transcript mirrors the server's exactly. */
export function transcriptsEqual(a: TranscriptTurn[], b: TranscriptTurn[]): boolean {
  return (
    a.length === b.length &&
    a.every((turn, i) => turn.speaker === b[i].speaker && turn.text === b[i].text)
  );
}
