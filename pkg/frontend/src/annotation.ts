import type { AnnotationPayload } from "./types.js";

/** Where the zoomed image currently sits on screen, in CSS pixels. */
export interface DisplayRect {
  left: number;
  top: number;
  width: number;
  height: number;
}

/**
 * Screen position -> normalized image coordinates, clamped to [0,1].
 * Depends only on the position relative to the display rect, so the same
 * image point maps to the same coordinates at any zoom level.
 */
export function normalizePoint(
  clientX: number,
  clientY: number,
  rect: DisplayRect,
): [number, number] {
  const clamp = (v: number) => Math.min(1, Math.max(0, v));
  return [
    clamp((clientX - rect.left) / rect.width),
    clamp((clientY - rect.top) / rect.height),
  ];
}

/** Captures pointer paths as normalized polylines; taps are discarded. */
export class StrokeRecorder {
  private strokes: [number, number][][] = [];
  private active: [number, number][] | null = null;

  begin(clientX: number, clientY: number, rect: DisplayRect): void {
    this.active = [normalizePoint(clientX, clientY, rect)];
  }

  extend(clientX: number, clientY: number, rect: DisplayRect): void {
    this.active?.push(normalizePoint(clientX, clientY, rect));
  }

  /** Finish the active stroke; single-point strokes are dropped. */
  end(): void {
    if (this.active && this.active.length >= 2) {
      this.strokes.push(this.active);
    }
    this.active = null;
  }

  clear(): void {
    this.strokes = [];
    this.active = null;
  }

  get isEmpty(): boolean {
    return this.strokes.length === 0;
  }

  toAnnotation(): AnnotationPayload | null {
    if (this.isEmpty) return null;
    return { strokes: this.strokes.map((stroke) => stroke.slice()) };
  }
}

/** Tight bound of all stroke points: [xMin, yMin, xMax, yMax]. */
export function annotationBBox(
  annotation: AnnotationPayload,
): [number, number, number, number] {
  const points = annotation.strokes.flat();
  if (points.length === 0) {
    throw new Error("annotation has no points");
  }
  const xs = points.map((p) => p[0]);
  const ys = points.map((p) => p[1]);
  return [
    Math.min(...xs),
    Math.min(...ys),
    Math.max(...xs),
    Math.max(...ys),
  ];
}
