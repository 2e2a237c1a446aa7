import { GraphDocument, GraphParseError } from "./types.js";

/** Documents above this size must arrive with stored positions. */
export const FR_MAX_NODES = 2000;

export interface FrParams {
  width: number;
  height: number;
  iterations: number;
  seed: number;
}

export const FR_DEFAULTS: FrParams = { width: 1000, height: 1000, iterations: 50, seed: 0 };

/** Small deterministic PRNG so the fallback layout is reproducible. */
export function mulberry32(seed: number): () => number {
  let a = seed >>> 0;
  return () => {
    a = (a + 0x6d2b79f5) >>> 0;
    let t = a;
    t = Math.imul(t ^ (t >>> 15), t | 1);
    t ^= t + Math.imul(t ^ (t >>> 7), t | 61);
    return ((t ^ (t >>> 14)) >>> 0) / 4294967296;
  };
}

/**
 * Client-side force-directed fallback for documents without stored positions.
 *
 * Same contract as the pipeline's layout stage: seeded uniform start inside
 * the frame, pairwise repulsion k^2/d, attraction d^2/k along edges, a
 * linearly cooling displacement cap that never reheats, and final clamping to
 * the frame. Writes x/y onto the nodes and returns the document.
 */
export function frFallback(doc: GraphDocument, params: FrParams = FR_DEFAULTS): GraphDocument {
  const n = doc.nodes.length;
  if (n === 0) return doc;
  if (n > FR_MAX_NODES) {
    throw new GraphParseError(
      `document has ${n} nodes and no stored layout; ` +
        `the in-browser fallback handles at most ${FR_MAX_NODES}`,
    );
  }
  const order = [...doc.nodes].sort((a, b) => compareIds(a.id, b.id));
  const index = new Map(order.map((node, i) => [node.id, i]));
  const rand = mulberry32(params.seed);
  const xs = new Float64Array(n);
  const ys = new Float64Array(n);
  for (let i = 0; i < n; i++) {
    xs[i] = rand() * params.width;
    ys[i] = rand() * params.height;
  }
  if (n > 1) {
    const pairWeights = new Map<number, number>();
    for (const edge of doc.edges) {
      const i = index.get(edge.source)!;
      const j = index.get(edge.target)!;
      if (i === j) continue;
      const key = i < j ? i * n + j : j * n + i;
      pairWeights.set(key, (pairWeights.get(key) ?? 0) + edge.weight);
    }
    const pairs = [...pairWeights.keys()].sort((a, b) => a - b);

    const k = Math.sqrt((params.width * params.height) / n);
    const t0 = params.width / 10;
    let previousMax = Infinity;
    const dx = new Float64Array(n);
    const dy = new Float64Array(n);
    for (let iter = 0; iter < params.iterations; iter++) {
      const t = Math.min((t0 * (params.iterations - iter)) / params.iterations, previousMax);
      dx.fill(0);
      dy.fill(0);
      for (let i = 0; i < n; i++) {
        for (let j = i + 1; j < n; j++) {
          let ddx = xs[i] - xs[j];
          let ddy = ys[i] - ys[j];
          let dist = Math.hypot(ddx, ddy);
          if (dist < 1e-9) {
            const angle = rand() * 2 * Math.PI;
            ddx = Math.cos(angle) * 1e-9;
            ddy = Math.sin(angle) * 1e-9;
            dist = 1e-9;
          }
          const force = (k * k) / (dist * dist);
          dx[i] += ddx * force;
          dy[i] += ddy * force;
          dx[j] -= ddx * force;
          dy[j] -= ddy * force;
        }
      }
      for (const key of pairs) {
        const i = Math.floor(key / n);
        const j = key % n;
        const ddx = xs[i] - xs[j];
        const ddy = ys[i] - ys[j];
        const dist = Math.max(Math.hypot(ddx, ddy), 1e-9);
        const pull = dist / k; // d^2/k along the unit vector
        dx[i] -= ddx * pull;
        dy[i] -= ddy * pull;
        dx[j] += ddx * pull;
        dy[j] += ddy * pull;
      }
      let realizedMax = 0;
      for (let i = 0; i < n; i++) {
        const len = Math.max(Math.hypot(dx[i], dy[i]), 1e-12);
        const step = Math.min(len, t);
        const nx = clamp(xs[i] + (dx[i] / len) * step, 0, params.width);
        const ny = clamp(ys[i] + (dy[i] / len) * step, 0, params.height);
        realizedMax = Math.max(realizedMax, Math.hypot(nx - xs[i], ny - ys[i]));
        xs[i] = nx;
        ys[i] = ny;
      }
      previousMax = realizedMax;
    }
  }
  for (const [id, i] of index) {
    const node = doc.byId.get(id)!;
    node.x = xs[i];
    node.y = ys[i];
  }
  return doc;
}

function clamp(value: number, lo: number, hi: number): number {
  return Math.min(hi, Math.max(lo, value));
}

function compareIds(a: string, b: string): number {
  const na = /^\d+$/.test(a) ? BigInt(a) : null;
  const nb = /^\d+$/.test(b) ? BigInt(b) : null;
  if (na !== null && nb !== null) return na < nb ? -1 : na > nb ? 1 : 0;
  if (na !== null) return -1;
  if (nb !== null) return 1;
  return a < b ? -1 : a > b ? 1 : 0;
}
