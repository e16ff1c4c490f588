import type { AppStore } from "./state.js";

interface SelectMessage {
  type: "remix-select";
  id: string | null;
}

function isSelectMessage(data: unknown): data is SelectMessage {
  return (
    typeof data === "object" &&
    data !== null &&
    (data as { type?: unknown }).type === "remix-select"
  );
}

/**
 * The instrumented preview posts {type: "remix-select", id} on every click;
 * id is null for clicks outside any instrumented element, which clears the
 * component selection.
 */
export function handlePreviewMessage(store: AppStore, data: unknown): void {
  if (isSelectMessage(data)) {
    store.setComponent(data.id ?? null);
  }
}

export function attachPreviewBridge(win: Window, store: AppStore): () => void {
  const listener = (event: MessageEvent) => handlePreviewMessage(store, event.data);
  win.addEventListener("message", listener);
  return () => win.removeEventListener("message", listener);
}

/** Reload the sandboxed preview frame from the server. */
export function refreshPreview(frame: HTMLIFrameElement, previewUrl: string): void {
  frame.src = `${previewUrl}?t=${Date.now()}`;
}
