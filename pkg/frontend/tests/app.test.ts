// @vitest-environment jsdom
import { describe, expect, it, vi } from "vitest";

import type { FetchLike } from "../src/api.js";
import { mountApp } from "../src/app.js";

function jsonResponse(payload: unknown): Response {
  return new Response(JSON.stringify(payload), {
    status: 200,
    headers: { "content-type": "application/json" },
  });
}

function fakeService(): FetchLike {
  let versions = 0;
  return async (url, init) => {
    if (url.endsWith("/sessions")) return jsonResponse({ session_id: "s-app" });
    if (/\/sessions\/s-app$/.test(url)) {
      return jsonResponse({
        session_id: "s-app",
        mode: "chat",
        version_count: versions,
        cursor: versions - 1,
        can_back: versions > 1,
        can_forward: false,
        current_version_id: versions ? versions - 1 : null,
        document: versions ? `<p>v${versions}</p>` : "",
        selected_example_id: null,
        target_component_id: null,
      });
    }
    if (url.includes("/search")) return jsonResponse({ results: [] });
    if (url.includes("/undo")) {
      return jsonResponse({
        version_id: 0,
        document: "<p>v1</p>",
        can_back: false,
        can_forward: true,
        at_boundary: false,
      });
    }
    versions += 1;
    return jsonResponse({
      version_id: versions - 1,
      document: `<p>v${versions}</p>`,
      can_back: versions > 1,
      can_forward: false,
    });
  };
}

async function mount() {
  const root = document.createElement("div");
  document.body.appendChild(root);
  const confirmFn = vi.fn(() => true);
  const store = await mountApp(root, {
    baseUrl: "http://svc",
    fetchFn: fakeService(),
    confirmFn,
  });
  return { root, store, confirmFn };
}

async function submitPrompt(root: HTMLElement, text: string) {
  const input = root.querySelector<HTMLTextAreaElement>(".prompt-input")!;
  input.value = text;
  root
    .querySelector<HTMLFormElement>(".prompt-form")!
    .dispatchEvent(new Event("submit", { bubbles: true, cancelable: true }));
  // let the async submit settle
  await new Promise((r) => setTimeout(r, 0));
  await new Promise((r) => setTimeout(r, 0));
}

describe("mountApp", () => {
  it("builds the three panels and boots a session", async () => {
    const { root, store } = await mount();
    expect(root.querySelector(".conversation-panel")).not.toBeNull();
    expect(root.querySelector(".gallery-panel")).not.toBeNull();
    expect(root.querySelector(".canvas-panel")).not.toBeNull();
    expect(store.state.sessionId).toBe("s-app");
  });

  it("Back/Forward buttons are enabled exactly per can_back/can_forward", async () => {
    const { root } = await mount();
    const back = root.querySelector<HTMLButtonElement>(".back-button")!;
    const forward = root.querySelector<HTMLButtonElement>(".forward-button")!;
    expect(back.disabled).toBe(true);
    expect(forward.disabled).toBe(true);

    await submitPrompt(root, "one");
    expect(back.disabled).toBe(true); // single version
    await submitPrompt(root, "two");
    expect(back.disabled).toBe(false);
    expect(forward.disabled).toBe(true);

    back.click();
    await new Promise((r) => setTimeout(r, 0));
    expect(back.disabled).toBe(true);
    expect(forward.disabled).toBe(false);
  });

  it("mode toggle highlights the active mode", async () => {
    const { root, store } = await mount();
    const buttons = root.querySelectorAll<HTMLButtonElement>(".mode-toggle button");
    expect(buttons).toHaveLength(3);
    buttons[1]!.click(); // search
    expect(store.state.mode).toBe("search");
    expect(buttons[1]!.classList.contains("active")).toBe(true);
    expect(buttons[0]!.classList.contains("active")).toBe(false);
  });

  it("view toggle swaps preview for the code editor and saves commit", async () => {
    const { root, store } = await mount();
    await submitPrompt(root, "one");
    const toggle = root.querySelector<HTMLButtonElement>(".view-toggle")!;
    const editor = root.querySelector<HTMLTextAreaElement>(".code-editor")!;
    const frame = root.querySelector<HTMLIFrameElement>(".preview-frame")!;

    toggle.click();
    expect(store.state.view).toBe("code");
    expect(editor.hidden).toBe(false);
    expect(frame.hidden).toBe(true);
    expect(editor.value).toBe(store.state.document);

    editor.value = "<p>edited</p>";
    editor.dispatchEvent(new Event("input", { bubbles: true }));
    root.querySelector<HTMLButtonElement>(".save-button")!.click();
    await new Promise((r) => setTimeout(r, 0));
    await new Promise((r) => setTimeout(r, 0));
    expect(store.state.canBack).toBe(true); // history grew by the manual edit
  });

  it("guards unsaved code edits behind a confirmation", async () => {
    const { root, confirmFn } = await mount();
    await submitPrompt(root, "one");
    const toggle = root.querySelector<HTMLButtonElement>(".view-toggle")!;
    toggle.click(); // into code view
    const editor = root.querySelector<HTMLTextAreaElement>(".code-editor")!;
    editor.value = "dirty";
    editor.dispatchEvent(new Event("input", { bubbles: true }));
    toggle.click(); // leaving with unsaved edits
    expect(confirmFn).toHaveBeenCalled();
  });
});
