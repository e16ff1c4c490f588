/** Shapes exchanged with the engine's HTTP API. */

export interface ExampleCard {
  example_id: string;
  kind: string;
  image_url: string;
  app_name: string;
  developer: string;
  rating: number;
  download_count: number;
  comment_count: number;
  category: string;
  similarity: number;
  rank: number;
}

export interface SessionView {
  session_id: string;
  mode: string;
  version_count: number;
  cursor: number;
  can_back: boolean;
  can_forward: boolean;
  current_version_id: number | null;
  document: string;
  selected_example_id: string | null;
  target_component_id: string | null;
}

export interface VersionView {
  version_id: number | null;
  document: string;
  can_back: boolean;
  can_forward: boolean;
  at_boundary?: boolean;
}

/** Freehand strokes in normalized [0,1]^2 image coordinates. */
export interface AnnotationPayload {
  strokes: [number, number][][];
}

export type Mode = "chat" | "search" | "apply";
export type View = "preview" | "code";
