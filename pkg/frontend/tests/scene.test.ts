import { describe, expect, it } from "vitest";

import { buildScene, layerNodes, sceneToSvg, KIND_STYLE } from "../src/scene.js";
import { ReasonGraphDoc } from "../src/types.js";

/** The eight-constraint worked-example graph: a query above a precedence
 * chain fanning out to completions and one contended resource. */
export const FIG_GRAPH: ReasonGraphDoc = {
  nodes: [
    { id: "c1", kind: "completion", params: { j: 16 }, label: "Activity 16 must be completed", is_query: false, is_minimality: false },
    { id: "c2", kind: "completion", params: { j: 17 }, label: "Activity 17 must be completed", is_query: false, is_minimality: false },
    { id: "c3", kind: "precedence", params: { j: 22, h: 16 }, label: "Act. 16 must be completed before Act. 22 starts", is_query: false, is_minimality: false },
    { id: "c4", kind: "precedence", params: { j: 22, h: 17 }, label: "Act. 17 must be completed before Act. 22 starts", is_query: false, is_minimality: false },
    { id: "c5", kind: "precedence", params: { j: 23, h: 22 }, label: "Act. 22 must be completed before Act. 23 starts", is_query: false, is_minimality: false },
    { id: "c6", kind: "precedence", params: { j: 24, h: 23 }, label: "Act. 23 must be completed before Act. 24 starts", is_query: false, is_minimality: false },
    { id: "c7", kind: "resource", params: { r: 4, t: 23 }, label: "Res. 4 is scarce at time 23 due to Acts. 16, 17", is_query: false, is_minimality: false },
    { id: "q", kind: "query", params: { j: 24, t: 41 }, label: "Act. 24 completed before time 41", is_query: true, is_minimality: false },
  ],
  edges: [
    ["c6", "q"], ["c5", "c6"], ["c3", "c5"], ["c4", "c5"], ["c3", "c4"],
    ["c1", "c3"], ["c3", "c7"], ["c2", "c4"], ["c4", "c7"], ["c1", "c7"], ["c2", "c7"],
  ],
  root: ["q"],
};

describe("scene construction", () => {
  it("renders 8 nodes and 11 edges for the worked-example graph", () => {
    const scene = buildScene(FIG_GRAPH);
    expect(scene.nodes).toHaveLength(8);
    expect(scene.edges).toHaveLength(11);
    const svg = sceneToSvg(scene);
    expect(svg.match(/<g class="node/g)).toHaveLength(8);
    expect(svg.match(/<line class="edge"/g)).toHaveLength(11);
  });

  it("styles each tag kind distinctly", () => {
    const scene = buildScene(FIG_GRAPH);
    const kinds = new Set(scene.nodes.map((n) => n.kind));
    const fills = new Set([...kinds].map((k) => KIND_STYLE[k].fill));
    expect(fills.size).toBe(kinds.size); // one colour per kind in play
    const svg = sceneToSvg(scene);
    for (const kind of kinds) {
      expect(svg).toContain(`kind-${kind}`);
    }
  });

  it("pins the query node as the root layer", () => {
    const depth = layerNodes(FIG_GRAPH);
    expect(depth.get("q")).toBe(0);
    expect(depth.get("c6")).toBe(1);
    expect(depth.get("c5")).toBe(2);
    const scene = buildScene(FIG_GRAPH);
    const q = scene.nodes.find((n) => n.id === "q")!;
    expect(Math.min(...scene.nodes.map((n) => n.y))).toBe(q.y);
    expect(q.isRoot).toBe(true);
  });

  it("keeps labels verbatim in the SVG", () => {
    const svg = sceneToSvg(buildScene(FIG_GRAPH));
    for (const node of FIG_GRAPH.nodes) {
      expect(svg).toContain(node.label);
    }
  });

  it("never mutates the input document", () => {
    const snapshot = JSON.stringify(FIG_GRAPH);
    buildScene(FIG_GRAPH);
    expect(JSON.stringify(FIG_GRAPH)).toBe(snapshot);
  });

  it("handles a single-node graph", () => {
    const graph: ReasonGraphDoc = {
      nodes: [
        { id: "query", kind: "query", params: {}, label: "Bid 1 selected", is_query: true, is_minimality: false },
      ],
      edges: [],
      root: ["query"],
    };
    const scene = buildScene(graph);
    expect(scene.nodes).toHaveLength(1);
    expect(scene.edges).toHaveLength(0);
    expect(sceneToSvg(scene)).toContain("Bid 1 selected");
  });

  it("draws the minimality ring", () => {
    const graph: ReasonGraphDoc = {
      nodes: [
        { id: "minimality", kind: "minimality", params: { bound: 9 }, label: "A solution at least as good as 9 is required", is_query: false, is_minimality: true },
        { id: "query", kind: "query", params: {}, label: "Bid 0 not selected", is_query: true, is_minimality: false },
      ],
      edges: [["minimality", "query"]],
      root: ["query"],
    };
    const svg = sceneToSvg(buildScene(graph));
    // ring = an extra un-filled circle around the minimality node
    expect(svg.match(/<circle/g)!.length).toBe(3);
  });
});
