export interface GraphNode {
  id: string;
  username: string;
  displayName: string;
  followersCount: number;
  tweetsInDiscussion: number;
  opinion?: string;
  x?: number;
  y?: number;
  size?: number;
  color?: string;
}

export interface GraphEdge {
  source: string;
  target: string;
  kind: string;
  weight: number;
}

export interface GraphDocument {
  nodes: GraphNode[];
  edges: GraphEdge[];
  byId: Map<string, GraphNode>;
}

export type ColorMode = "opinion" | "uniform";

export interface Camera {
  /** world coordinates at the center of the viewport */
  centerX: number;
  centerY: number;
  zoom: number;
}

export interface ViewState {
  camera: Camera;
  selected: string | null;
  visibleKinds: Set<string>;
  colorMode: ColorMode;
}

/** Thrown by parsers; carries a human-readable location when known. */
export class GraphParseError extends Error {
  constructor(message: string, readonly line?: number, readonly column?: number) {
    super(message);
    this.name = "GraphParseError";
  }

  describe(): string {
    if (this.line !== undefined) {
      const col = this.column !== undefined ? `, column ${this.column}` : "";
      return `${this.message} (line ${this.line}${col})`;
    }
    return this.message;
  }
}
