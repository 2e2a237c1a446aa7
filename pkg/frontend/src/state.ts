import { GraphDocument, ViewState } from "./types.js";
import { edgeKinds } from "./parse.js";

export const MIN_ZOOM = 0.05;
export const MAX_ZOOM = 50;

/** Initial state: camera framing the document, every kind visible. */
export function initialState(
  doc: GraphDocument,
  viewportWidth: number,
  viewportHeight: number,
): ViewState {
  const bounds = documentBounds(doc);
  const spanX = Math.max(bounds.maxX - bounds.minX, 1);
  const spanY = Math.max(bounds.maxY - bounds.minY, 1);
  const zoom = clampZoom(
    Math.min(viewportWidth / (spanX * 1.1), viewportHeight / (spanY * 1.1)),
  );
  return {
    camera: {
      centerX: (bounds.minX + bounds.maxX) / 2,
      centerY: (bounds.minY + bounds.maxY) / 2,
      zoom,
    },
    selected: null,
    visibleKinds: new Set(edgeKinds(doc)),
    colorMode: "opinion",
  };
}

export function documentBounds(doc: GraphDocument) {
  let minX = Infinity;
  let minY = Infinity;
  let maxX = -Infinity;
  let maxY = -Infinity;
  for (const node of doc.nodes) {
    if (node.x === undefined || node.y === undefined) continue;
    minX = Math.min(minX, node.x);
    minY = Math.min(minY, node.y);
    maxX = Math.max(maxX, node.x);
    maxY = Math.max(maxY, node.y);
  }
  if (minX === Infinity) {
    return { minX: 0, minY: 0, maxX: 1, maxY: 1 };
  }
  return { minX, minY, maxX, maxY };
}

export function clampZoom(zoom: number): number {
  return Math.min(MAX_ZOOM, Math.max(MIN_ZOOM, zoom));
}

/** All transitions return fresh state; the document is never touched. */
export function pan(state: ViewState, dxScreen: number, dyScreen: number): ViewState {
  return {
    ...state,
    camera: {
      ...state.camera,
      centerX: state.camera.centerX - dxScreen / state.camera.zoom,
      centerY: state.camera.centerY - dyScreen / state.camera.zoom,
    },
  };
}

/** Zoom toward a screen point so the world point under the cursor stays put. */
export function zoomAt(
  state: ViewState,
  factor: number,
  screenX: number,
  screenY: number,
  viewportWidth: number,
  viewportHeight: number,
): ViewState {
  const newZoom = clampZoom(state.camera.zoom * factor);
  const applied = newZoom / state.camera.zoom;
  if (applied === 1) return state;
  const world = screenToWorld(state, screenX, screenY, viewportWidth, viewportHeight);
  return {
    ...state,
    camera: {
      zoom: newZoom,
      centerX: world.x - (world.x - state.camera.centerX) / applied,
      centerY: world.y - (world.y - state.camera.centerY) / applied,
    },
  };
}

export function select(state: ViewState, nodeId: string | null): ViewState {
  return { ...state, selected: nodeId };
}

export function toggleKind(state: ViewState, kind: string): ViewState {
  const visibleKinds = new Set(state.visibleKinds);
  if (visibleKinds.has(kind)) visibleKinds.delete(kind);
  else visibleKinds.add(kind);
  return { ...state, visibleKinds };
}

export function setColorMode(state: ViewState, colorMode: ViewState["colorMode"]): ViewState {
  return { ...state, colorMode };
}

export function worldToScreen(
  state: ViewState,
  x: number,
  y: number,
  viewportWidth: number,
  viewportHeight: number,
): { x: number; y: number } {
  return {
    x: (x - state.camera.centerX) * state.camera.zoom + viewportWidth / 2,
    y: (y - state.camera.centerY) * state.camera.zoom + viewportHeight / 2,
  };
}

export function screenToWorld(
  state: ViewState,
  x: number,
  y: number,
  viewportWidth: number,
  viewportHeight: number,
): { x: number; y: number } {
  return {
    x: (x - viewportWidth / 2) / state.camera.zoom + state.camera.centerX,
    y: (y - viewportHeight / 2) / state.camera.zoom + state.camera.centerY,
  };
}

/** Topmost node under a screen point, honoring rendered radii. */
export function hitTest(
  doc: GraphDocument,
  state: ViewState,
  screenX: number,
  screenY: number,
  viewportWidth: number,
  viewportHeight: number,
): string | null {
  let best: string | null = null;
  let bestDist = Infinity;
  for (const node of doc.nodes) {
    if (node.x === undefined || node.y === undefined) continue;
    const p = worldToScreen(state, node.x, node.y, viewportWidth, viewportHeight);
    const radius = Math.max(nodeScreenRadius(node.size, state.camera.zoom), 4);
    const dist = Math.hypot(p.x - screenX, p.y - screenY);
    if (dist <= radius && dist < bestDist) {
      best = node.id;
      bestDist = dist;
    }
  }
  return best;
}

export function nodeScreenRadius(size: number | undefined, zoom: number): number {
  return (size ?? 2) * Math.sqrt(zoom) * 1.5;
}
