import { StrokeRecorder, type DisplayRect } from "./annotation.js";
import type { AnnotationPayload, ExampleCard } from "./types.js";

export interface GalleryHooks {
  onSelect: (card: ExampleCard) => void;
  onZoom?: (card: ExampleCard) => void;
  imageUrl?: (card: ExampleCard) => string;
}

function formatDownloads(count: number): string {
  if (count >= 1_000_000) return `${(count / 1_000_000).toFixed(1)}M`;
  if (count >= 1_000) return `${(count / 1_000).toFixed(1)}k`;
  return String(count);
}

/**
 * Render result cards in rank order. Every card surfaces the four
 * source-transparency fields (rating, downloads, comments, category);
 * developer and app name live in the zoom overlay.
 */
export function renderGallery(
  container: HTMLElement,
  cards: ExampleCard[],
  hooks: GalleryHooks,
): void {
  container.textContent = "";
  if (cards.length === 0) {
    const empty = document.createElement("p");
    empty.className = "gallery-empty";
    empty.textContent = "No examples found. Try a different search.";
    container.appendChild(empty);
    return;
  }
  const ordered = [...cards].sort((a, b) => a.rank - b.rank);
  for (const card of ordered) {
    container.appendChild(renderCard(card, hooks));
  }
}

function metaSpan(field: string, text: string, label: string): HTMLElement {
  const span = document.createElement("span");
  span.dataset.field = field;
  span.setAttribute("aria-label", label);
  span.textContent = text;
  return span;
}

function renderCard(card: ExampleCard, hooks: GalleryHooks): HTMLElement {
  const element = document.createElement("figure");
  element.className = "gallery-card";
  element.dataset.exampleId = card.example_id;
  element.dataset.rank = String(card.rank);
  element.setAttribute(
    "aria-label",
    `${card.app_name}: rating ${card.rating}, ` +
      `${card.download_count} downloads, ${card.comment_count} comments, ` +
      `category ${card.category}`,
  );

  const image = document.createElement("img");
  image.src = hooks.imageUrl ? hooks.imageUrl(card) : card.image_url;
  image.alt = `UI example from ${card.app_name}`;
  element.appendChild(image);

  const caption = document.createElement("figcaption");
  caption.appendChild(metaSpan("rating", `${card.rating.toFixed(1)}★`, `rating ${card.rating}`));
  caption.appendChild(
    metaSpan("download_count", formatDownloads(card.download_count), `${card.download_count} downloads`),
  );
  caption.appendChild(
    metaSpan("comment_count", `${card.comment_count} comments`, `${card.comment_count} comments`),
  );
  caption.appendChild(metaSpan("category", card.category, `category ${card.category}`));
  element.appendChild(caption);

  const zoomButton = document.createElement("button");
  zoomButton.className = "zoom-button";
  zoomButton.textContent = "Zoom";
  zoomButton.addEventListener("click", (event) => {
    event.stopPropagation();
    hooks.onZoom?.(card);
  });
  element.appendChild(zoomButton);

  element.addEventListener("click", () => hooks.onSelect(card));
  return element;
}

export interface ZoomHooks {
  onAnnotation: (annotation: AnnotationPayload | null) => void;
  onClose?: () => void;
  imageUrl?: (card: ExampleCard) => string;
}

/**
 * Zoomed view of one example: larger image, the extra provenance fields
 * (developer and app name), and a freehand annotation surface whose points
 * are stored in normalized image coordinates.
 */
export function renderZoomOverlay(
  container: HTMLElement,
  card: ExampleCard,
  hooks: ZoomHooks,
  recorder: StrokeRecorder = new StrokeRecorder(),
): HTMLElement {
  const overlay = document.createElement("div");
  overlay.className = "zoom-overlay";
  overlay.dataset.exampleId = card.example_id;

  const heading = document.createElement("header");
  heading.appendChild(metaSpan("app_name", card.app_name, `app ${card.app_name}`));
  heading.appendChild(metaSpan("developer", card.developer, `developer ${card.developer}`));
  overlay.appendChild(heading);

  const surface = document.createElement("div");
  surface.className = "zoom-surface";
  const image = document.createElement("img");
  image.src = hooks.imageUrl ? hooks.imageUrl(card) : card.image_url;
  image.alt = `Zoomed UI example from ${card.app_name}`;
  image.draggable = false;
  surface.appendChild(image);
  overlay.appendChild(surface);

  const rect = (): DisplayRect => {
    const box = surface.getBoundingClientRect();
    return { left: box.left, top: box.top, width: box.width, height: box.height };
  };

  let drawing = false;
  surface.addEventListener("pointerdown", (event) => {
    drawing = true;
    recorder.begin(event.clientX, event.clientY, rect());
  });
  surface.addEventListener("pointermove", (event) => {
    if (drawing) recorder.extend(event.clientX, event.clientY, rect());
  });
  const finish = () => {
    if (!drawing) return;
    drawing = false;
    recorder.end();
    hooks.onAnnotation(recorder.toAnnotation());
  };
  surface.addEventListener("pointerup", finish);
  surface.addEventListener("pointerleave", finish);

  const closeButton = document.createElement("button");
  closeButton.className = "zoom-close";
  closeButton.textContent = "Close";
  closeButton.addEventListener("click", () => {
    overlay.remove();
    hooks.onClose?.();
  });
  overlay.appendChild(closeButton);

  container.appendChild(overlay);
  return overlay;
}
