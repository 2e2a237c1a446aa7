import { GraphDocument, GraphEdge, GraphNode, GraphParseError } from "./types.js";

const NODE_DEFAULTS = {
  username: "",
  displayName: "",
  followersCount: 0,
  tweetsInDiscussion: 0,
};

export function emptyDocument(): GraphDocument {
  return { nodes: [], edges: [], byId: new Map() };
}

function finalize(nodes: GraphNode[], edges: GraphEdge[]): GraphDocument {
  const byId = new Map<string, GraphNode>();
  for (const node of nodes) {
    if (byId.has(node.id)) {
      throw new GraphParseError(`duplicate node id ${node.id}`);
    }
    byId.set(node.id, node);
  }
  for (const edge of edges) {
    if (!byId.has(edge.source) || !byId.has(edge.target)) {
      throw new GraphParseError(
        `edge ${edge.source}->${edge.target} references an undeclared node`,
      );
    }
  }
  return { nodes, edges, byId };
}

/** Sniff GEXF vs JSON node-link from the first structural character. */
export function parseDocument(text: string): GraphDocument {
  const head = text.trimStart();
  if (head.startsWith("<")) return parseGexf(text);
  if (head.startsWith("{")) return parseNodeLink(text);
  throw new GraphParseError("unrecognized format: expected GEXF XML or JSON node-link");
}

// -- JSON node-link -----------------------------------------------------------

export function parseNodeLink(text: string): GraphDocument {
  let payload: unknown;
  try {
    payload = JSON.parse(text);
  } catch (err) {
    const message = trimErr(String(err));
    const { line, column } = positionFromJsonError(message, text);
    throw new GraphParseError(`invalid JSON: ${message}`, line, column);
  }
  const obj = payload as { nodes?: unknown; edges?: unknown };
  if (!obj || !Array.isArray(obj.nodes) || !Array.isArray(obj.edges)) {
    throw new GraphParseError("document must carry 'nodes' and 'edges' arrays");
  }
  const nodes: GraphNode[] = obj.nodes.map((raw) => {
    const item = raw as Record<string, unknown>;
    if (item.id === undefined || item.id === null) {
      throw new GraphParseError("node without id");
    }
    const node: GraphNode = {
      id: String(item.id),
      username: str(item.username),
      displayName: str(item.display_name),
      followersCount: num(item.followers_count),
      tweetsInDiscussion: num(item.tweets_in_discussion),
    };
    if (typeof item.opinion === "string") node.opinion = item.opinion;
    if (typeof item.x === "number" && typeof item.y === "number") {
      node.x = item.x;
      node.y = item.y;
    }
    if (typeof item.size === "number") node.size = item.size;
    if (typeof item.color === "string") node.color = item.color;
    return node;
  });
  const edges: GraphEdge[] = obj.edges.map((raw) => {
    const item = raw as Record<string, unknown>;
    if (item.source === undefined || item.target === undefined) {
      throw new GraphParseError("edge without source/target");
    }
    return {
      source: String(item.source),
      target: String(item.target),
      kind: typeof item.kind === "string" ? item.kind : "unknown",
      weight: num(item.weight, 1),
    };
  });
  return finalize(nodes, edges);
}

function str(value: unknown): string {
  return typeof value === "string" ? value : "";
}

function num(value: unknown, fallback = 0): number {
  return typeof value === "number" && Number.isFinite(value) ? value : fallback;
}

function trimErr(message: string): string {
  return message.replace(/^SyntaxError:\s*/, "");
}

function positionFromJsonError(
  message: string,
  text: string,
): { line?: number; column?: number } {
  const lineCol = message.match(/line (\d+) column (\d+)/);
  if (lineCol) return { line: Number(lineCol[1]), column: Number(lineCol[2]) };
  const pos = message.match(/position (\d+)/);
  if (pos) return offsetToLineCol(text, Number(pos[1]));
  // newer V8 only quotes a snippet around the error; map it back to the source
  const snippet = message.match(/,\s(?:\.\.\.)?"([\s\S]*)"(?:\.\.\.)? is not valid JSON$/);
  const token = message.match(/^Unexpected token '([\s\S]+?)',/);
  if (snippet && token) {
    const context = snippet[1];
    const contextOffset = text.indexOf(context);
    if (contextOffset >= 0) {
      const within = context.indexOf(token[1]);
      if (within >= 0) return offsetToLineCol(text, contextOffset + within);
    }
  }
  return {};
}

function offsetToLineCol(text: string, offset: number): { line: number; column: number } {
  const clamped = Math.min(Math.max(offset, 0), text.length);
  const before = text.slice(0, clamped);
  return { line: before.split("\n").length, column: clamped - before.lastIndexOf("\n") };
}

// -- GEXF -----------------------------------------------------------------------

function localName(el: Element): string {
  return (el.localName || el.tagName).toLowerCase();
}

function childrenOf(el: Element, name: string): Element[] {
  const out: Element[] = [];
  for (let i = 0; i < el.children.length; i++) {
    const child = el.children[i];
    if (localName(child) === name) out.push(child);
  }
  return out;
}

function firstChild(el: Element, name: string): Element | null {
  const found = childrenOf(el, name);
  return found.length ? found[0] : null;
}

export function parseGexf(text: string): GraphDocument {
  const doc = new DOMParser().parseFromString(text, "text/xml");
  const errorEl = doc.querySelector("parsererror");
  if (errorEl) {
    const details = errorEl.textContent || "XML parse error";
    const match = details.match(/[Ll]ine(?:\s+number)?[:\s]+(\d+)(?:[^\d]+(\d+))?/);
    throw new GraphParseError(
      "not well-formed XML",
      match ? Number(match[1]) : undefined,
      match && match[2] ? Number(match[2]) : undefined,
    );
  }
  const root = doc.documentElement;
  if (!root || localName(root) !== "gexf") {
    throw new GraphParseError("root element is not <gexf>");
  }
  const graphEl = firstChild(root, "graph");
  if (!graphEl) throw new GraphParseError("missing <graph> element");

  const nodeAttrTitles = new Map<string, string>();
  const edgeAttrTitles = new Map<string, string>();
  for (const attrsEl of childrenOf(graphEl, "attributes")) {
    const table = attrsEl.getAttribute("class") === "edge" ? edgeAttrTitles : nodeAttrTitles;
    for (const attrEl of childrenOf(attrsEl, "attribute")) {
      table.set(attrEl.getAttribute("id") ?? "", attrEl.getAttribute("title") ?? "");
    }
  }

  const nodes: GraphNode[] = [];
  const nodesEl = firstChild(graphEl, "nodes");
  for (const nodeEl of nodesEl ? childrenOf(nodesEl, "node") : []) {
    const id = nodeEl.getAttribute("id");
    if (id === null) throw new GraphParseError("node without id");
    const node: GraphNode = { id, ...NODE_DEFAULTS };
    const label = nodeEl.getAttribute("label");
    if (label) node.username = label;

    const valuesEl = firstChild(nodeEl, "attvalues");
    for (const valueEl of valuesEl ? childrenOf(valuesEl, "attvalue") : []) {
      const title = nodeAttrTitles.get(valueEl.getAttribute("for") ?? "") ?? "";
      const value = valueEl.getAttribute("value") ?? "";
      switch (title) {
        case "username":
          node.username = value;
          break;
        case "display_name":
          node.displayName = value;
          break;
        case "followers_count":
          node.followersCount = Number(value) || 0;
          break;
        case "tweets_in_discussion":
          node.tweetsInDiscussion = Number(value) || 0;
          break;
        case "opinion":
          node.opinion = value;
          break;
      }
    }
    for (let i = 0; i < nodeEl.children.length; i++) {
      const child = nodeEl.children[i];
      switch (localName(child)) {
        case "position": {
          const x = Number(child.getAttribute("x"));
          const y = Number(child.getAttribute("y"));
          if (!Number.isFinite(x) || !Number.isFinite(y)) {
            throw new GraphParseError(`bad position on node ${id}`);
          }
          node.x = x;
          node.y = y;
          break;
        }
        case "size":
          node.size = Number(child.getAttribute("value")) || 1;
          break;
        case "color": {
          const r = Number(child.getAttribute("r")) || 0;
          const g = Number(child.getAttribute("g")) || 0;
          const b = Number(child.getAttribute("b")) || 0;
          node.color = `#${hex(r)}${hex(g)}${hex(b)}`;
          break;
        }
      }
    }
    nodes.push(node);
  }

  const edges: GraphEdge[] = [];
  const edgesEl = firstChild(graphEl, "edges");
  for (const edgeEl of edgesEl ? childrenOf(edgesEl, "edge") : []) {
    const source = edgeEl.getAttribute("source");
    const target = edgeEl.getAttribute("target");
    if (source === null || target === null) {
      throw new GraphParseError("edge without source/target");
    }
    let kind = "unknown";
    const valuesEl = firstChild(edgeEl, "attvalues");
    for (const valueEl of valuesEl ? childrenOf(valuesEl, "attvalue") : []) {
      const title = edgeAttrTitles.get(valueEl.getAttribute("for") ?? "") ?? "";
      if (title === "kind") kind = valueEl.getAttribute("value") ?? "unknown";
    }
    edges.push({
      source,
      target,
      kind,
      weight: Number(edgeEl.getAttribute("weight")) || 1,
    });
  }

  return finalize(nodes, edges);
}

function hex(value: number): string {
  return Math.max(0, Math.min(255, Math.round(value))).toString(16).padStart(2, "0");
}

/** True when every node carries a stored position. */
export function hasPositions(doc: GraphDocument): boolean {
  return doc.nodes.length > 0 && doc.nodes.every((n) => n.x !== undefined && n.y !== undefined);
}

export function edgeKinds(doc: GraphDocument): string[] {
  const kinds = new Set<string>();
  for (const edge of doc.edges) kinds.add(edge.kind);
  return [...kinds].sort();
}
