import { readFileSync } from "node:fs";
import { describe, expect, it } from "vitest";

import { edgeKinds, hasPositions, parseDocument, parseGexf, parseNodeLink } from "../src/parse.js";
import { GraphParseError } from "../src/types.js";

const DEMO = readFileSync("tests/fixtures/demo.gexf", "utf-8");
const NOLAYOUT = readFileSync("tests/fixtures/nolayout.gexf", "utf-8");

describe("gexf parsing", () => {
  it("loads the pipeline-produced document", () => {
    const doc = parseGexf(DEMO);
    expect(doc.nodes.length).toBe(60);
    expect(doc.edges.length).toBe(318);
    expect(hasPositions(doc)).toBe(true);
    expect(edgeKinds(doc)).toEqual(["mention", "quote", "reply", "retweet"]);
  });

  it("carries node attributes, opinions, and viz state", () => {
    const doc = parseGexf(DEMO);
    const labeled = doc.nodes.filter((n) => n.opinion !== undefined);
    expect(labeled.length).toBe(doc.nodes.length);
    const groups = new Set(doc.nodes.map((n) => n.opinion));
    expect(groups.has("group:0")).toBe(true);
    expect(groups.has("group:1")).toBe(true);
    for (const node of doc.nodes) {
      expect(node.username).not.toBe("");
      expect(node.size).toBeGreaterThan(0);
      expect(node.color).toMatch(/^#[0-9a-f]{6}$/);
    }
  });

  it("parses a position-free document", () => {
    const doc = parseGexf(NOLAYOUT);
    expect(doc.nodes.length).toBe(100);
    expect(hasPositions(doc)).toBe(false);
  });

  it("reports truncated XML as a parse failure", () => {
    expect(() => parseGexf(DEMO.slice(0, 400))).toThrow(GraphParseError);
  });

  it("rejects non-gexf XML", () => {
    expect(() => parseGexf("<svg></svg>")).toThrow(/not <gexf>/);
  });

  it("rejects duplicate node ids", () => {
    const text =
      '<gexf version="1.3"><graph><nodes><node id="1"/><node id="1"/></nodes></graph></gexf>';
    expect(() => parseGexf(text)).toThrow(/duplicate/);
  });

  it("rejects edges to undeclared nodes", () => {
    const text =
      '<gexf version="1.3"><graph><nodes><node id="1"/></nodes>' +
      '<edges><edge source="1" target="9"/></edges></graph></gexf>';
    expect(() => parseGexf(text)).toThrow(/undeclared/);
  });
});

describe("json node-link parsing", () => {
  it("round-trips the canonical keys", () => {
    const doc = parseNodeLink(
      JSON.stringify({
        nodes: [
          { id: "1", username: "a", followers_count: 3, tweets_in_discussion: 2,
            opinion: "group:0", x: 1.5, y: 2.5, size: 3, color: "#e41a1c" },
          { id: "2", username: "b" },
        ],
        edges: [{ source: "1", target: "2", kind: "retweet", weight: 2 }],
      }),
    );
    expect(doc.byId.get("1")?.followersCount).toBe(3);
    expect(doc.byId.get("1")?.x).toBe(1.5);
    expect(doc.edges[0]).toEqual({ source: "1", target: "2", kind: "retweet", weight: 2 });
  });

  it("reports a location for bad JSON", () => {
    try {
      parseNodeLink('{"nodes": [,]}');
      expect.unreachable();
    } catch (err) {
      expect(err).toBeInstanceOf(GraphParseError);
      const parseErr = err as GraphParseError;
      expect(parseErr.describe()).toMatch(/line \d+/);
    }
  });

  it("rejects documents without nodes/edges arrays", () => {
    expect(() => parseNodeLink("{}")).toThrow(/nodes/);
  });
});

describe("format sniffing", () => {
  it("dispatches on the first structural character", () => {
    expect(parseDocument(DEMO).nodes.length).toBe(60);
    expect(parseDocument('{"nodes":[],"edges":[]}').nodes.length).toBe(0);
    expect(() => parseDocument("graph [ ]")).toThrow(/unrecognized/);
  });
});
