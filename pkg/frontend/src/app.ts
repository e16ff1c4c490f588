import { ApiClient, type FetchLike } from "./api.js";
import { renderGallery, renderZoomOverlay } from "./gallery.js";
import { attachPreviewBridge, refreshPreview } from "./preview.js";
import { AppStore } from "./state.js";
import type { ExampleCard, Mode } from "./types.js";

const MODES: Mode[] = ["chat", "search", "apply"];

export interface AppOptions {
  baseUrl?: string;
  confirmFn?: (message: string) => boolean;
  fetchFn?: FetchLike;
}

/** Build the three-panel application inside `root` and boot a session. */
export async function mountApp(
  root: HTMLElement,
  options: AppOptions = {},
): Promise<AppStore> {
  const baseUrl = options.baseUrl ?? "";
  const confirmFn = options.confirmFn ?? ((message) => window.confirm(message));
  const api = options.fetchFn
    ? new ApiClient(baseUrl, options.fetchFn)
    : new ApiClient(baseUrl);
  const store = new AppStore(api);

  root.innerHTML = `
    <div class="panes">
      <section class="conversation-panel">
        <div class="mode-toggle" role="tablist"></div>
        <div class="conversation-log"></div>
        <form class="prompt-form">
          <textarea class="prompt-input" rows="3"
            placeholder="Describe your design goal…"></textarea>
          <button type="submit" class="send-button">Send</button>
        </form>
      </section>
      <section class="gallery-panel">
        <h2>Example Gallery</h2>
        <div class="gallery-grid"></div>
      </section>
      <section class="canvas-panel">
        <div class="canvas-toolbar">
          <button class="back-button" disabled>Back</button>
          <button class="forward-button" disabled>Forward</button>
          <button class="view-toggle">Code view</button>
          <button class="save-button" hidden>Save</button>
          <span class="selection-indicator"></span>
        </div>
        <iframe class="preview-frame" sandbox="allow-scripts" title="Live preview"></iframe>
        <textarea class="code-editor" hidden spellcheck="false"></textarea>
      </section>
    </div>
  `;

  const modeToggle = root.querySelector<HTMLElement>(".mode-toggle")!;
  const promptForm = root.querySelector<HTMLFormElement>(".prompt-form")!;
  const promptInput = root.querySelector<HTMLTextAreaElement>(".prompt-input")!;
  const sendButton = root.querySelector<HTMLButtonElement>(".send-button")!;
  const log = root.querySelector<HTMLElement>(".conversation-log")!;
  const galleryGrid = root.querySelector<HTMLElement>(".gallery-grid")!;
  const backButton = root.querySelector<HTMLButtonElement>(".back-button")!;
  const forwardButton = root.querySelector<HTMLButtonElement>(".forward-button")!;
  const viewToggle = root.querySelector<HTMLButtonElement>(".view-toggle")!;
  const saveButton = root.querySelector<HTMLButtonElement>(".save-button")!;
  const frame = root.querySelector<HTMLIFrameElement>(".preview-frame")!;
  const editor = root.querySelector<HTMLTextAreaElement>(".code-editor")!;
  const selectionIndicator = root.querySelector<HTMLElement>(".selection-indicator")!;

  for (const mode of MODES) {
    const button = document.createElement("button");
    button.dataset.mode = mode;
    button.textContent = mode[0]!.toUpperCase() + mode.slice(1);
    button.addEventListener("click", () => store.setMode(mode));
    modeToggle.appendChild(button);
  }

  let editorDirty = false;
  editor.addEventListener("input", () => {
    editorDirty = true;
  });

  const appendLog = (kind: string, text: string) => {
    const entry = document.createElement("p");
    entry.className = `log-entry log-${kind}`;
    entry.textContent = text;
    log.appendChild(entry);
  };

  const showGallery = (cards: ExampleCard[]) => {
    renderGallery(galleryGrid, cards, {
      imageUrl: (card) => api.exampleImageUrl(card),
      onSelect: (card) => {
        store.selectExample(card); // auto-switches to apply mode
        galleryGrid
          .querySelectorAll(".gallery-card.selected")
          .forEach((el) => el.classList.remove("selected"));
        galleryGrid
          .querySelector(`[data-example-id="${card.example_id}"]`)
          ?.classList.add("selected");
      },
      onZoom: (card) => {
        renderZoomOverlay(root, card, {
          imageUrl: (c) => api.exampleImageUrl(c),
          onAnnotation: (annotation) => store.setAnnotation(annotation),
        });
      },
    });
  };

  store.subscribe((state) => {
    modeToggle.querySelectorAll("button").forEach((button) => {
      button.classList.toggle("active", button.dataset.mode === state.mode);
    });
    backButton.disabled = !state.canBack || state.busy;
    forwardButton.disabled = !state.canForward || state.busy;
    sendButton.disabled = state.busy;
    saveButton.disabled = state.busy;
    selectionIndicator.textContent = state.selectedComponentId
      ? `component #${state.selectedComponentId}`
      : "";
    const codeView = state.view === "code";
    frame.hidden = codeView;
    editor.hidden = !codeView;
    saveButton.hidden = !codeView;
    viewToggle.textContent = codeView ? "Preview view" : "Code view";
  });

  const reloadPreview = () => {
    const sessionId = store.state.sessionId;
    if (sessionId && store.state.document) {
      refreshPreview(frame, api.previewUrl(sessionId));
    }
  };

  promptForm.addEventListener("submit", (event) => {
    event.preventDefault();
    const query = promptInput.value.trim();
    if (!query) return;
    appendLog(store.state.mode, query);
    void store
      .submit(query)
      .then(() => {
        if (store.state.mode === "search") {
          showGallery(store.state.gallery);
        } else {
          reloadPreview();
        }
        promptInput.value = "";
      })
      .catch((error) => appendLog("error", String(error)));
  });

  backButton.addEventListener("click", () => {
    void store.undo().then(reloadPreview);
  });
  forwardButton.addEventListener("click", () => {
    void store.redo().then(reloadPreview);
  });

  viewToggle.addEventListener("click", () => {
    if (store.state.view === "code") {
      if (editorDirty && !confirmFn("Discard unsaved code edits?")) {
        return;
      }
      editorDirty = false;
      store.setView("preview");
      reloadPreview();
    } else {
      editor.value = store.state.document;
      editorDirty = false;
      store.setView("code");
    }
  });

  saveButton.addEventListener("click", () => {
    void store.saveCode(editor.value).then(() => {
      editorDirty = false;
      reloadPreview();
    });
  });

  attachPreviewBridge(window, store);

  await store.init();
  await store.refresh();
  reloadPreview();
  return store;
}
