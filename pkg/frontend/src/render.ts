import { Scene } from "./scene.js";
import { GraphDocument, ViewState } from "./types.js";
import { nodeScreenRadius, worldToScreen } from "./state.js";

/** Zoom above which node labels are painted (level-of-detail cutoff). */
export const LABEL_ZOOM_THRESHOLD = 1.5;

/** The subset of the 2D context the painter needs; tests pass a recorder. */
export interface Painter {
  clearRect(x: number, y: number, w: number, h: number): void;
  beginPath(): void;
  moveTo(x: number, y: number): void;
  lineTo(x: number, y: number): void;
  arc(x: number, y: number, r: number, a0: number, a1: number): void;
  stroke(): void;
  fill(): void;
  fillText(text: string, x: number, y: number): void;
  strokeStyle: string | CanvasGradient | CanvasPattern;
  fillStyle: string | CanvasGradient | CanvasPattern;
  lineWidth: number;
  globalAlpha: number;
  font: string;
}

export function draw(
  ctx: Painter,
  doc: GraphDocument,
  scene: Scene,
  state: ViewState,
  width: number,
  height: number,
): void {
  ctx.clearRect(0, 0, width, height);

  ctx.globalAlpha = 0.35;
  ctx.strokeStyle = "#888888";
  ctx.lineWidth = 0.6;
  for (const edge of scene.visibleEdges) {
    const a = doc.byId.get(edge.source)!;
    const b = doc.byId.get(edge.target)!;
    if (a.x === undefined || a.y === undefined || b.x === undefined || b.y === undefined) {
      continue;
    }
    const pa = worldToScreen(state, a.x, a.y, width, height);
    const pb = worldToScreen(state, b.x, b.y, width, height);
    ctx.beginPath();
    ctx.moveTo(pa.x, pa.y);
    ctx.lineTo(pb.x, pb.y);
    ctx.stroke();
  }

  ctx.globalAlpha = 1.0;
  for (const { node, color } of scene.nodes) {
    if (node.x === undefined || node.y === undefined) continue;
    const p = worldToScreen(state, node.x, node.y, width, height);
    const radius = nodeScreenRadius(node.size, state.camera.zoom);
    ctx.beginPath();
    ctx.fillStyle = color;
    ctx.arc(p.x, p.y, radius, 0, 2 * Math.PI);
    ctx.fill();
    if (state.selected === node.id) {
      ctx.beginPath();
      ctx.strokeStyle = "#111111";
      ctx.lineWidth = 2;
      ctx.arc(p.x, p.y, radius + 3, 0, 2 * Math.PI);
      ctx.stroke();
    }
  }

  if (state.camera.zoom >= LABEL_ZOOM_THRESHOLD) {
    ctx.fillStyle = "#222222";
    ctx.font = "11px sans-serif";
    for (const { node } of scene.nodes) {
      if (node.x === undefined || node.y === undefined || !node.username) continue;
      const p = worldToScreen(state, node.x, node.y, width, height);
      const radius = nodeScreenRadius(node.size, state.camera.zoom);
      ctx.fillText(node.username, p.x + radius + 3, p.y + 3);
    }
  }
}
