import { connect } from "./api.js";
import { sendAndRender } from "./controller.js";
import { renderTranscript } from "./render.js";
import { ChatStore } from "./store.js";

const baseUrl = (window as any).PLANREC_URL ?? "http://127.0.0.1:8765";

const transcript = document.getElementById("transcript") as HTMLElement;
const form = document.getElementById("composer") as HTMLFormElement;
const input = document.getElementById("message") as HTMLInputElement;
const banner = document.getElementById("banner") as HTMLElement;
const footer = document.getElementById("session-footer") as HTMLElement;

const store = new ChatStore();
store.onChange(() => {
  renderTranscript(transcript, store);
  input.disabled = store.inFlight;
});

let sessionId: string | null = null;

async function connectWithBanner() {
  banner.replaceChildren();
  try {
    const session = await connect(baseUrl);
    sessionId = session.session_id;
    footer.textContent = `session ${session.session_id}`;
  } catch (err) {
    banner.textContent = `could not reach the service: ${err}`;
    const retry = document.createElement("button");
    retry.textContent = "retry";
    retry.addEventListener("click", connectWithBanner);
    banner.appendChild(retry);
  }
}

form.addEventListener("submit", async (event) => {
  event.preventDefault();
  const text = input.value.trim();
  if (!text || !sessionId || store.inFlight) return;
  input.value = "";
  await sendAndRender(baseUrl, sessionId, text, store);
  input.focus();
});

connectWithBanner();
