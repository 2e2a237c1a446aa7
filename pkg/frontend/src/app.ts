import { frFallback } from "./layout.js";
import { edgeKinds, hasPositions, parseDocument } from "./parse.js";
import { draw } from "./render.js";
import { attributePanel, buildScene } from "./scene.js";
import {
  hitTest,
  initialState,
  pan,
  select,
  setColorMode,
  toggleKind,
  zoomAt,
} from "./state.js";
import { GraphDocument, GraphParseError, ViewState } from "./types.js";

interface App {
  doc: GraphDocument;
  state: ViewState;
}

let app: App | null = null;

function el<T extends HTMLElement>(id: string): T {
  const found = document.getElementById(id);
  if (!found) throw new Error(`missing element #${id}`);
  return found as T;
}

function banner(message: string, kind: "error" | "info" = "error"): void {
  const box = el<HTMLDivElement>("banner");
  box.textContent = message;
  box.className = `banner ${kind}`;
  box.hidden = !message;
}

function canvas(): HTMLCanvasElement {
  return el<HTMLCanvasElement>("scene");
}

function redraw(): void {
  if (!app) return;
  const cv = canvas();
  const ctx = cv.getContext("2d");
  if (!ctx) return;
  draw(ctx, app.doc, buildScene(app.doc, app.state), app.state, cv.width, cv.height);
}

function renderLegend(): void {
  if (!app) return;
  const scene = buildScene(app.doc, app.state);
  const box = el<HTMLDivElement>("legend");
  box.replaceChildren();
  const heading = document.createElement("h3");
  heading.textContent = `Edges (${scene.visibleEdges.length} shown)`;
  box.appendChild(heading);
  for (const entry of scene.legend) {
    const row = document.createElement("label");
    row.className = "legend-row";
    const checkbox = document.createElement("input");
    checkbox.type = "checkbox";
    checkbox.checked = entry.visible;
    checkbox.dataset.kind = entry.kind;
    checkbox.addEventListener("change", () => {
      if (!app) return;
      app.state = toggleKind(app.state, entry.kind);
      renderLegend();
      redraw();
    });
    row.appendChild(checkbox);
    const text = document.createElement("span");
    text.textContent = ` ${entry.kind}: ${entry.visibleCount}/${entry.edgeCount}`;
    row.appendChild(text);
    box.appendChild(row);
  }
}

function renderPanel(): void {
  if (!app) return;
  const box = el<HTMLDivElement>("panel");
  box.replaceChildren();
  if (app.state.selected === null) {
    box.hidden = true;
    return;
  }
  const model = attributePanel(app.doc, app.state.selected);
  if (!model) {
    box.hidden = true;
    return;
  }
  box.hidden = false;
  const title = document.createElement("h3");
  title.textContent = model.username || model.id;
  box.appendChild(title);
  const rows: Array<[string, string]> = [
    ["username", model.username],
    ["display name", model.displayName],
    ["followers", String(model.followersCount)],
    ["tweets in discussion", String(model.tweetsInDiscussion)],
    ["degree", String(model.degree)],
  ];
  for (const [key, value] of rows) {
    const row = document.createElement("div");
    row.className = "panel-row";
    row.textContent = `${key}: ${value}`;
    box.appendChild(row);
  }
  const opinionRow = document.createElement("div");
  opinionRow.className = "panel-row";
  const swatch = document.createElement("span");
  swatch.className = "swatch";
  swatch.style.background = model.opinionColor;
  opinionRow.append("opinion: ", swatch, ` ${model.opinion}`);
  box.appendChild(opinionRow);
}

function refresh(): void {
  renderLegend();
  renderPanel();
  redraw();
}

function loadText(text: string, sourceName: string): void {
  let doc: GraphDocument;
  try {
    doc = parseDocument(text);
    if (!hasPositions(doc) && doc.nodes.length > 0) {
      frFallback(doc);
      banner(`no stored layout in ${sourceName}; ran the in-browser fallback`, "info");
    } else {
      banner("");
    }
  } catch (err) {
    if (err instanceof GraphParseError) {
      banner(`could not load ${sourceName}: ${err.describe()}`);
    } else {
      banner(`could not load ${sourceName}: ${String(err)}`);
    }
    return;
  }
  const cv = canvas();
  app = { doc, state: initialState(doc, cv.width, cv.height) };
  el<HTMLDivElement>("doc-info").textContent =
    `${doc.nodes.length} nodes, ${doc.edges.length} edges, kinds: ${edgeKinds(doc).join(", ")}`;
  refresh();
}

async function loadUrl(url: string): Promise<void> {
  banner(`loading ${url}...`, "info");
  try {
    const resp = await fetch(url);
    if (!resp.ok) {
      banner(`fetch failed: ${resp.status} ${resp.statusText}`);
      return;
    }
    loadText(await resp.text(), url);
  } catch (err) {
    banner(`fetch failed: ${String(err)}`);
  }
}

function sourceFromLocation(): string | null {
  const viewMatch = window.location.pathname.match(/\/view\/([A-Za-z0-9_-]+)/);
  if (viewMatch) return `/graphs/${viewMatch[1]}`;
  const src = new URLSearchParams(window.location.search).get("src");
  return src || null;
}

function wireCanvas(): void {
  const cv = canvas();
  let dragging = false;
  let moved = false;
  let lastX = 0;
  let lastY = 0;

  cv.addEventListener("mousedown", (ev) => {
    dragging = true;
    moved = false;
    lastX = ev.offsetX;
    lastY = ev.offsetY;
  });
  cv.addEventListener("mousemove", (ev) => {
    const tooltip = el<HTMLDivElement>("tooltip");
    if (dragging && app) {
      const dx = ev.offsetX - lastX;
      const dy = ev.offsetY - lastY;
      if (Math.abs(dx) + Math.abs(dy) > 2) moved = true;
      app.state = pan(app.state, dx, dy);
      lastX = ev.offsetX;
      lastY = ev.offsetY;
      redraw();
      return;
    }
    if (!app) return;
    const hover = hitTest(app.doc, app.state, ev.offsetX, ev.offsetY, cv.width, cv.height);
    if (hover) {
      const node = app.doc.byId.get(hover)!;
      tooltip.textContent = node.username || node.id;
      tooltip.style.left = `${ev.offsetX + 12}px`;
      tooltip.style.top = `${ev.offsetY + 12}px`;
      tooltip.hidden = false;
    } else {
      tooltip.hidden = true;
    }
  });
  window.addEventListener("mouseup", (ev) => {
    if (!dragging) return;
    dragging = false;
    if (moved || !app) return;
    const rect = cv.getBoundingClientRect();
    const x = ev.clientX - rect.left;
    const y = ev.clientY - rect.top;
    const hit = hitTest(app.doc, app.state, x, y, cv.width, cv.height);
    app.state = select(app.state, hit);
    renderPanel();
    redraw();
  });
  cv.addEventListener("wheel", (ev) => {
    if (!app) return;
    ev.preventDefault();
    const factor = ev.deltaY < 0 ? 1.15 : 1 / 1.15;
    app.state = zoomAt(app.state, factor, ev.offsetX, ev.offsetY, cv.width, cv.height);
    redraw();
  });
}

function wireControls(): void {
  el<HTMLInputElement>("file-input").addEventListener("change", (ev) => {
    const input = ev.target as HTMLInputElement;
    const file = input.files?.[0];
    if (!file) return;
    file.text().then((text) => loadText(text, file.name));
  });

  for (const mode of ["opinion", "uniform"] as const) {
    el<HTMLInputElement>(`color-${mode}`).addEventListener("change", () => {
      if (!app) return;
      app.state = setColorMode(app.state, mode);
      redraw();
    });
  }

  el<HTMLFormElement>("upload-form").addEventListener("submit", async (ev) => {
    ev.preventDefault();
    const file = el<HTMLInputElement>("upload-file").files?.[0];
    const token = el<HTMLInputElement>("upload-token").value;
    if (!file || !token) {
      banner("choose a file and paste the upload token first");
      return;
    }
    const resp = await fetch("/graphs?filename=" + encodeURIComponent(file.name), {
      method: "POST",
      headers: { Authorization: `Bearer ${token}` },
      body: await file.arrayBuffer(),
    });
    const body = await resp.json();
    if (resp.status === 201) {
      banner(`uploaded: share it at ${window.location.origin}${body.view_url}`, "info");
    } else {
      banner(`upload failed (${resp.status}): ${body.message ?? "unknown error"}`);
    }
  });
}

export function start(): void {
  wireCanvas();
  wireControls();
  const source = sourceFromLocation();
  if (source) {
    void loadUrl(source);
  } else {
    banner("open a local graph file or visit a /view/{id} link", "info");
  }
}

if (typeof document !== "undefined" && document.getElementById("scene")) {
  start();
}
