/** DOM wiring for the chat page: message entry, transcript, state inspector. */

import {
  ApiError,
  ChatViewState,
  sendTurn,
  startChat,
} from "./client.js";

const $ = (id: string) => document.getElementById(id) as HTMLElement;

let view: ChatViewState | null = null;

function setBanner(text: string | null): void {
  const banner = $("banner");
  banner.textContent = text ?? "";
  banner.style.display = text ? "block" : "none";
}

function setToast(text: string): void {
  const toast = $("toast");
  toast.textContent = text;
  toast.style.display = "block";
  setTimeout(() => (toast.style.display = "none"), 2500);
}

function bubble(speaker: "U" | "S", text: string, pending = false): HTMLElement {
  const element = document.createElement("div");
  element.className = `bubble ${speaker === "U" ? "user" : "system"}${pending ? " pending" : ""}`;
  element.textContent = text;
  return element;
}

function renderTranscript(pendingText?: string): void {
  if (!view) return;
  const log = $("transcript");
  log.replaceChildren(bubble("S", view.greeting));
  for (const turn of view.transcript) {
    log.appendChild(bubble(turn.speaker, turn.text));
  }
  if (pendingText !== undefined) {
    log.appendChild(bubble("U", pendingText, true));
  }
  log.scrollTop = log.scrollHeight;
}

function renderInspector(): void {
  if (!view) return;
  const state = view.state;
  const rows: [string, string][] = [
    ["candidates", state.last_count === null ? "—" : String(state.last_count)],
    ["pending question", state.qud ?? "—"],
    [
      "constraints",
      Object.entries(state.constraints)
        .map(([predicate, value]) => `${predicate} = ${value}`)
        .join("; ") || "—",
    ],
    ["declined", state.declined.join("; ") || "—"],
    [
      "goal stack",
      state.goal_stack.map((g) => `${g.goal} (${g.status})`).join(" > ") || "—",
    ],
    ["session", state.ended ? "ended" : "active"],
  ];
  $("inspector").replaceChildren(
    ...rows.map(([label, value]) => {
      const row = document.createElement("div");
      row.className = "row";
      const key = document.createElement("span");
      key.className = "key";
      key.textContent = label;
      const val = document.createElement("span");
      val.textContent = value;
      row.append(key, val);
      return row;
    }),
  );
}

function setPending(pending: boolean): void {
  ($("send") as HTMLButtonElement).disabled = pending;
  ($("message") as HTMLInputElement).disabled = pending;
}

async function connect(): Promise<void> {
  const serverUrl = ($("server-url") as HTMLInputElement).value.trim();
  const fixture = ($("fixture") as HTMLSelectElement).value;
  setBanner(null);
  try {
    view = await startChat(serverUrl, { fixture });
  } catch (error) {
    view = null;
    setBanner(`Could not start a session: ${(error as Error).message} — check the server and retry.`);
    return;
  }
  renderTranscript();
  renderInspector();
  setPending(false);
  ($("message") as HTMLInputElement).focus();
}

async function submit(): Promise<void> {
  if (!view || view.pending) return;
  const input = $("message") as HTMLInputElement;
  const text = input.value.trim();
  if (!text) return;
  view = { ...view, pending: true };
  setPending(true);
  renderTranscript(text);
  try {
    view = await sendTurn({ ...view, pending: false }, text);
    input.value = "";
  } catch (error) {
    view = { ...view, pending: false };
    if (error instanceof ApiError && error.status === 409) {
      setToast("The previous turn is still being processed.");
    } else {
      setToast(`Send failed: ${(error as Error).message}`);
    }
  }
  setPending(false);
  renderTranscript();
  renderInspector();
  input.focus();
}

export function init(): void {
  $("connect").addEventListener("click", () => void connect());
  $("send").addEventListener("click", () => void submit());
  $("message").addEventListener("keydown", (event) => {
    if ((event as KeyboardEvent).key === "Enter") void submit();
  });
}

init();
