import type { ApiClient } from "./api.js";
import type {
  AnnotationPayload,
  ExampleCard,
  Mode,
  VersionView,
  View,
} from "./types.js";

export interface UiClientState {
  sessionId: string | null;
  mode: Mode;
  gallery: ExampleCard[];
  selectedExample: ExampleCard | null;
  annotationDraft: AnnotationPayload | null;
  selectedComponentId: string | null;
  view: View;
  document: string;
  canBack: boolean;
  canForward: boolean;
  busy: boolean;
  lastError: string | null;
}

type Listener = (state: UiClientState) => void;

/**
 * Single source of client-side truth. The server owns all design state;
 * this store only mirrors responses and routes each mode to its one
 * endpoint: chat -> /chat, search -> /search, apply -> /apply.
 */
export class AppStore {
  state: UiClientState = {
    sessionId: null,
    mode: "chat",
    gallery: [],
    selectedExample: null,
    annotationDraft: null,
    selectedComponentId: null,
    view: "preview",
    document: "",
    canBack: false,
    canForward: false,
    busy: false,
    lastError: null,
  };

  private listeners: Listener[] = [];

  constructor(private api: ApiClient) {}

  subscribe(listener: Listener): () => void {
    this.listeners.push(listener);
    return () => {
      this.listeners = this.listeners.filter((l) => l !== listener);
    };
  }

  private update(partial: Partial<UiClientState>): void {
    this.state = { ...this.state, ...partial };
    for (const listener of this.listeners) listener(this.state);
  }

  async init(): Promise<void> {
    const sessionId = await this.api.createSession();
    this.update({ sessionId });
  }

  setMode(mode: Mode): void {
    this.update({ mode, lastError: null });
  }

  setView(view: View): void {
    this.update({ view });
  }

  /** Gallery selection switches straight into apply mode. */
  selectExample(card: ExampleCard): void {
    this.update({
      selectedExample: card,
      mode: "apply",
      annotationDraft: null, // drafts never outlive an example change
    });
  }

  clearSelection(): void {
    this.update({ selectedExample: null, annotationDraft: null });
  }

  setAnnotation(annotation: AnnotationPayload | null): void {
    this.update({ annotationDraft: annotation });
  }

  setComponent(componentId: string | null): void {
    this.update({ selectedComponentId: componentId });
  }

  private absorbVersion(version: VersionView): void {
    this.update({
      document: version.document,
      canBack: version.can_back,
      canForward: version.can_forward,
    });
  }

  /** Route the prompt to the endpoint owned by the current mode. */
  async submit(query: string): Promise<void> {
    const sessionId = this.state.sessionId;
    if (!sessionId) throw new Error("no session");
    if (this.state.mode === "search") {
      const scope = this.state.selectedComponentId ? "component" : "whole_screen";
      const results = await this.api.search(sessionId, query, scope);
      this.update({ gallery: results, lastError: null });
      return;
    }
    if (this.state.busy) return; // one in-flight mutating request at a time
    this.update({ busy: true });
    try {
      if (this.state.mode === "chat") {
        this.absorbVersion(await this.api.chat(sessionId, query));
      } else {
        const example = this.state.selectedExample;
        if (!example) {
          throw new Error("apply mode requires a selected example");
        }
        const componentId = this.state.selectedComponentId;
        this.absorbVersion(
          await this.api.apply(sessionId, {
            query,
            example_id: example.example_id,
            scope: componentId ? "local" : "global",
            ...(componentId ? { target_component_id: componentId } : {}),
            ...(this.state.annotationDraft
              ? { annotation: this.state.annotationDraft }
              : {}),
          }),
        );
      }
      this.update({ lastError: null });
    } catch (error) {
      this.update({ lastError: String(error) });
      throw error;
    } finally {
      this.update({ busy: false });
    }
  }

  async undo(): Promise<void> {
    await this.navigate("undo");
  }

  async redo(): Promise<void> {
    await this.navigate("redo");
  }

  private async navigate(direction: "undo" | "redo"): Promise<void> {
    const sessionId = this.state.sessionId;
    if (!sessionId || this.state.busy) return;
    this.update({ busy: true });
    try {
      const version =
        direction === "undo"
          ? await this.api.undo(sessionId)
          : await this.api.redo(sessionId);
      this.absorbVersion(version);
    } finally {
      this.update({ busy: false });
    }
  }

  async saveCode(document: string): Promise<void> {
    const sessionId = this.state.sessionId;
    if (!sessionId || this.state.busy) return;
    this.update({ busy: true });
    try {
      this.absorbVersion(await this.api.commitCode(sessionId, document));
    } finally {
      this.update({ busy: false });
    }
  }

  async refresh(): Promise<void> {
    const sessionId = this.state.sessionId;
    if (!sessionId) return;
    const view = await this.api.getSession(sessionId);
    this.update({
      document: view.document,
      canBack: view.can_back,
      canForward: view.can_forward,
    });
  }
}
