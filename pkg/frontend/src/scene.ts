import { GraphDocument, GraphEdge, GraphNode, ViewState } from "./types.js";

/** Matches the pipeline's opinion palette so colors agree across surfaces. */
export const OPINION_PALETTE: Record<string, string> = {
  "group:0": "#e41a1c",
  "group:1": "#377eb8",
  ambiguous: "#984ea3",
  unlabeled: "#999999",
};

const EXTRA_GROUP_COLORS = ["#4daf4a", "#ff7f00", "#a65628", "#f781bf", "#ffff33"];
export const UNIFORM_COLOR = "#9e9e9e";

export interface SceneNode {
  node: GraphNode;
  color: string;
}

export interface Scene {
  nodes: SceneNode[];
  visibleEdges: GraphEdge[];
  legend: LegendEntry[];
}

export interface LegendEntry {
  kind: string;
  visible: boolean;
  edgeCount: number; // number of edges of this kind in the document
  visibleCount: number; // edges of this kind currently shown
}

export function opinionColor(node: GraphNode): string {
  const opinion = node.opinion ?? "unlabeled";
  const known = OPINION_PALETTE[opinion];
  if (known) return known;
  const match = opinion.match(/^group:(\d+)$/);
  if (match) {
    const group = Number(match[1]);
    if (group >= 2) return EXTRA_GROUP_COLORS[(group - 2) % EXTRA_GROUP_COLORS.length];
  }
  return node.color ?? OPINION_PALETTE.unlabeled;
}

export function nodeColor(node: GraphNode, mode: ViewState["colorMode"]): string {
  if (mode === "uniform") return UNIFORM_COLOR;
  if (node.opinion !== undefined) return opinionColor(node);
  return node.color ?? OPINION_PALETTE.unlabeled;
}

/** Pure projection of (document, state) into what the painter draws. */
export function buildScene(doc: GraphDocument, state: ViewState): Scene {
  const visibleEdges = doc.edges.filter((e) => state.visibleKinds.has(e.kind));
  const perKind = new Map<string, { total: number; visible: number }>();
  for (const edge of doc.edges) {
    const entry = perKind.get(edge.kind) ?? { total: 0, visible: 0 };
    entry.total += 1;
    if (state.visibleKinds.has(edge.kind)) entry.visible += 1;
    perKind.set(edge.kind, entry);
  }
  const legend: LegendEntry[] = [...perKind.entries()]
    .sort(([a], [b]) => (a < b ? -1 : 1))
    .map(([kind, counts]) => ({
      kind,
      visible: state.visibleKinds.has(kind),
      edgeCount: counts.total,
      visibleCount: counts.visible,
    }));
  return {
    nodes: doc.nodes.map((node) => ({ node, color: nodeColor(node, state.colorMode) })),
    visibleEdges,
    legend,
  };
}

export interface PanelModel {
  id: string;
  username: string;
  displayName: string;
  followersCount: number;
  tweetsInDiscussion: number;
  opinion: string;
  opinionColor: string;
  degree: number;
}

/** Attribute panel contents for a selected node. */
export function attributePanel(doc: GraphDocument, nodeId: string): PanelModel | null {
  const node = doc.byId.get(nodeId);
  if (!node) return null;
  let degree = 0;
  for (const edge of doc.edges) {
    if (edge.source === nodeId || edge.target === nodeId) degree += 1;
  }
  return {
    id: node.id,
    username: node.username,
    displayName: node.displayName,
    followersCount: node.followersCount,
    tweetsInDiscussion: node.tweetsInDiscussion,
    opinion: opinionLabel(node.opinion),
    opinionColor: opinionColor(node),
    degree,
  };
}

export function opinionLabel(opinion: string | undefined): string {
  if (opinion === undefined) return "unlabeled";
  const match = opinion.match(/^group:(\d+)$/);
  if (match) return `Group ${match[1]}`;
  return opinion;
}
