import type {
  AnnotationPayload,
  ExampleCard,
  SessionView,
  VersionView,
} from "./types.js";

export class ApiError extends Error {
  constructor(
    public code: string,
    message: string,
    public status: number,
    public stage?: string,
  ) {
    super(message);
  }
}

export type FetchLike = (
  input: string,
  init?: RequestInit,
) => Promise<Response>;

/** Thin typed client over the engine's documented HTTP endpoints. */
export class ApiClient {
  constructor(
    private baseUrl: string,
    private fetchFn: FetchLike = (input, init) => fetch(input, init),
  ) {}

  private async request<T>(path: string, init?: RequestInit): Promise<T> {
    const response = await this.fetchFn(`${this.baseUrl}${path}`, init);
    const text = await response.text();
    const body = text ? JSON.parse(text) : {};
    if (!response.ok) {
      const err = body?.error ?? {};
      throw new ApiError(
        err.code ?? "UNKNOWN",
        err.message ?? `HTTP ${response.status}`,
        response.status,
        err.stage,
      );
    }
    return body as T;
  }

  private post<T>(path: string, payload?: unknown): Promise<T> {
    return this.request<T>(path, {
      method: "POST",
      headers: { "content-type": "application/json" },
      body: JSON.stringify(payload ?? {}),
    });
  }

  async createSession(): Promise<string> {
    const body = await this.post<{ session_id: string }>("/sessions", {});
    return body.session_id;
  }

  getSession(sessionId: string): Promise<SessionView> {
    return this.request<SessionView>(`/sessions/${sessionId}`);
  }

  async search(
    sessionId: string,
    query: string,
    scope: "whole_screen" | "component" = "whole_screen",
    limit?: number,
  ): Promise<ExampleCard[]> {
    const body = await this.post<{ results: ExampleCard[] }>(
      `/sessions/${sessionId}/search`,
      { query, scope, ...(limit ? { limit } : {}) },
    );
    return body.results;
  }

  chat(sessionId: string, query: string): Promise<VersionView> {
    return this.post<VersionView>(`/sessions/${sessionId}/chat`, { query });
  }

  apply(
    sessionId: string,
    payload: {
      query: string;
      example_id: string;
      scope: "global" | "local";
      target_component_id?: string;
      annotation?: AnnotationPayload;
    },
  ): Promise<VersionView> {
    return this.post<VersionView>(`/sessions/${sessionId}/apply`, payload);
  }

  undo(sessionId: string): Promise<VersionView> {
    return this.post<VersionView>(`/sessions/${sessionId}/undo`);
  }

  redo(sessionId: string): Promise<VersionView> {
    return this.post<VersionView>(`/sessions/${sessionId}/redo`);
  }

  commitCode(sessionId: string, document: string): Promise<VersionView> {
    return this.post<VersionView>(`/sessions/${sessionId}/code`, { document });
  }

  async codeText(sessionId: string): Promise<string> {
    const response = await this.fetchFn(
      `${this.baseUrl}/sessions/${sessionId}/code`,
    );
    return response.text();
  }

  previewUrl(sessionId: string): string {
    return `${this.baseUrl}/sessions/${sessionId}/preview`;
  }

  exampleImageUrl(card: ExampleCard): string {
    return `${this.baseUrl}${card.image_url}`;
  }
}
