import { ChatStore, ItemCard, TraceRow, UiTurn } from "./store.js";

function el(tag: string, className: string, text?: string): HTMLElement {
  const node = document.createElement(tag);
  node.className = className;
  if (text !== undefined) node.textContent = text;
  return node;
}

function renderCard(item: ItemCard): HTMLElement {
  const card = el("div", "item-card");
  card.appendChild(el("div", "item-title", item.title));
  const attrs = Object.entries(item.attributes)
    .map(([name, value]) => `${name}: ${Array.isArray(value) ? value.join(", ") : value}`)
    .join(" · ");
  card.appendChild(el("div", "item-attrs", attrs));
  return card;
}

function renderTraceTable(trace: TraceRow[]): HTMLElement {
  const table = el("div", "trace-table");
  for (const row of trace) {
    const rowEl = el("div", "trace-row" + (row.error ? " trace-row-error" : ""));
    rowEl.appendChild(el("span", "trace-tool", row.tool));
    rowEl.appendChild(el("span", "trace-input", row.input));
    rowEl.appendChild(el("span", "trace-output", row.error ?? row.output));
    const ms = Math.max(0, (row.ended - row.started) * 1000);
    rowEl.appendChild(el("span", "trace-duration", `${ms.toFixed(1)} ms`));
    table.appendChild(rowEl);
  }
  return table;
}

function renderTurn(turn: UiTurn, store: ChatStore): HTMLElement {
  const bubble = el("div", `bubble bubble-${turn.role}`);
  bubble.appendChild(el("div", "bubble-text", turn.text));
  if (turn.error) bubble.appendChild(el("div", "bubble-error", turn.error));

  if (turn.role === "assistant") {
    for (const item of turn.meta?.items ?? []) bubble.appendChild(renderCard(item));
    if (turn.meta?.trace.length) {
      const toggle = el("button", "trace-toggle", turn.traceOpen ? "hide trace" : "show trace");
      toggle.addEventListener("click", () => store.toggleTrace(turn));
      bubble.appendChild(toggle);
      if (turn.traceOpen) bubble.appendChild(renderTraceTable(turn.meta.trace));
    } else if (!turn.meta && !turn.error) {
      // still streaming: the control exists but can't open anything yet
      const toggle = el("button", "trace-toggle", "show trace") as HTMLButtonElement;
      toggle.disabled = true;
      bubble.appendChild(toggle);
    }
  }
  return bubble;
}

/** Replace the transcript contents from the store; cheap at chat scale. */
export function renderTranscript(container: HTMLElement, store: ChatStore) {
  container.replaceChildren(...store.turns.map((turn) => renderTurn(turn, store)));
}
