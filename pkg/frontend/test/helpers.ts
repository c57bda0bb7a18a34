import { vi } from "vitest";
import { ChatStore } from "../src/store.js";
import { renderTranscript } from "../src/render.js";

export const DONE_EVENT = {
  done: true,
  plan: {
    plan: [
      { tool: "retrieve", input: { hard: "genre = 'RPG' AND price < 20", k: 5 } },
      { tool: "rank", input: { candidates: "$bus" } },
    ],
  },
  trace: [
    {
      tool: "retrieve",
      input: '{"hard":"genre = \'RPG\' AND price < 20","k":5}',
      output: "1 candidates: g1",
      started: 10.0,
      ended: 10.002,
      error: null,
    },
    {
      tool: "rank",
      input: '{"candidates":"$bus"}',
      output: "1 candidates: g1",
      started: 10.002,
      ended: 10.003,
      error: null,
    },
  ],
  items: [
    {
      id: "g1",
      title: "Eldervale",
      attributes: { genre: "RPG", price: 15, tags: ["fantasy", "story-rich"] },
    },
  ],
};

/** Encode events as an SSE byte stream, deliberately split mid-payload. */
export function sseBody(events: any[], chunkSize = 7): ReadableStream<Uint8Array> {
  const text = events.map((e) => `data: ${JSON.stringify(e)}\n\n`).join("");
  const bytes = new TextEncoder().encode(text);
  return new ReadableStream({
    start(controller) {
      for (let i = 0; i < bytes.length; i += chunkSize) {
        controller.enqueue(bytes.slice(i, i + chunkSize));
      }
      controller.close();
    },
  });
}

/** Stub fetch with a scripted service; returns the list of calls made. */
export function scriptService(events: any[], chunkSize = 7) {
  const calls: { url: string; init?: any }[] = [];
  vi.stubGlobal("fetch", async (url: string, init?: any) => {
    calls.push({ url, init });
    if (url.endsWith("/sessions")) {
      return {
        ok: true,
        status: 200,
        json: async () => ({ session_id: "s1", user_id: "anonymous", created: 1.0 }),
      };
    }
    if (url.endsWith("/messages")) {
      return { ok: true, status: 200, body: sseBody(events, chunkSize) };
    }
    return { ok: false, status: 404, body: null, json: async () => ({}) };
  });
  return calls;
}

/** A store wired to re-render into a detached container on every change. */
export function setupUi() {
  const store = new ChatStore();
  const container = document.createElement("div");
  store.onChange(() => renderTranscript(container, store));
  return { store, container };
}
