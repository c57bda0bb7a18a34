import { sseEvents } from "./sse.js";

export interface SessionInfo {
  session_id: string;
  user_id: string;
  created: number;
}

/** Create a session; the id is held for the lifetime of the tab. */
export async function connect(baseUrl: string, userId?: string): Promise<SessionInfo> {
  const resp = await fetch(`${baseUrl}/sessions`, {
    method: "POST",
    headers: { "Content-Type": "application/json" },
    body: JSON.stringify(userId ? { user_id: userId } : {}),
  });
  if (!resp.ok) throw new Error(`session create failed: ${resp.status}`);
  return resp.json();
}

/** Post one user message and yield the stream's events as they arrive. */
export async function* streamMessage(baseUrl: string, sessionId: string, text: string) {
  const resp = await fetch(`${baseUrl}/sessions/${sessionId}/messages`, {
    method: "POST",
    headers: { "Content-Type": "application/json" },
    body: JSON.stringify({ text }),
  });
  if (!resp.ok || !resp.body) throw new Error(`message failed: ${resp.status}`);
  yield* sseEvents(resp.body);
}

export async function fetchTrace(baseUrl: string, sessionId: string) {
  const resp = await fetch(`${baseUrl}/sessions/${sessionId}/trace`);
  if (!resp.ok) throw new Error(`trace fetch failed: ${resp.status}`);
  return resp.json();
}
