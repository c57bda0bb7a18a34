export interface TraceRow {
  tool: string;
  input: string;
  output: string;
  started: number;
  ended: number;
  error: string | null;
}

export interface ItemCard {
  id: string;
  title: string;
  attributes: Record<string, unknown>;
}

export interface TurnMeta {
  plan: any;
  trace: TraceRow[];
  items: ItemCard[] | null;
}

export interface UiTurn {
  role: "user" | "assistant";
  text: string;
  meta?: TurnMeta;
  error?: string;
  traceOpen: boolean;
}

/**
 * All chat state for one tab. One turn may be in flight at a time; assistant
 * text only ever grows while streaming, and metadata attaches at most once.
 */
export class ChatStore {
  turns: UiTurn[] = [];
  inFlight = false;
  private listeners: (() => void)[] = [];

  onChange(listener: () => void) {
    this.listeners.push(listener);
  }

  private emit() {
    for (const listener of this.listeners) listener();
  }

  /** Append the user turn plus an empty assistant turn to stream into. */
  beginTurn(text: string): UiTurn {
    if (this.inFlight) throw new Error("a turn is already in flight");
    this.inFlight = true;
    this.turns.push({ role: "user", text, traceOpen: false });
    const assistant: UiTurn = { role: "assistant", text: "", traceOpen: false };
    this.turns.push(assistant);
    this.emit();
    return assistant;
  }

  appendDelta(delta: string) {
    const turn = this.currentAssistant();
    turn.text += delta;
    this.emit();
  }

  finish(meta: TurnMeta) {
    const turn = this.currentAssistant();
    if (turn.meta) throw new Error("metadata already attached");
    turn.meta = meta;
    this.inFlight = false;
    this.emit();
  }

  /** Keep whatever text already streamed; show the error; re-enable input. */
  fail(message: string) {
    const turn = this.currentAssistant();
    turn.error = message;
    this.inFlight = false;
    this.emit();
  }

  /** Flip the inspector for a finished turn; no-op while still streaming. */
  toggleTrace(turn: UiTurn): boolean {
    if (!turn.meta) return false;
    turn.traceOpen = !turn.traceOpen;
    this.emit();
    return true;
  }

  private currentAssistant(): UiTurn {
    const turn = this.turns[this.turns.length - 1];
    if (!turn || turn.role !== "assistant") throw new Error("no assistant turn open");
    return turn;
  }
}
