import { streamMessage } from "./api.js";
import { ChatStore } from "./store.js";

/**
 * Run one full turn: append the user message, stream deltas into the
 * assistant bubble, and attach the terminal plan/trace/items metadata.
 * A mid-stream error keeps the partial text and re-enables input.
 */
export async function sendAndRender(
  baseUrl: string,
  sessionId: string,
  text: string,
  store: ChatStore,
): Promise<void> {
  store.beginTurn(text);
  try {
    for await (const event of streamMessage(baseUrl, sessionId, text)) {
      if (event.error !== undefined) {
        store.fail(event.error);
        return;
      }
      if (event.delta !== undefined) store.appendDelta(event.delta);
      if (event.done) {
        store.finish({ plan: event.plan, trace: event.trace ?? [], items: event.items });
      }
    }
    if (store.inFlight) store.fail("stream ended without a terminal event");
  } catch (err) {
    store.fail(err instanceof Error ? err.message : String(err));
  }
}
