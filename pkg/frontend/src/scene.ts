/** Scene construction: graph JSON -> positioned, styled nodes and edges.
 *
 * Layout is a deterministic layered arrangement: query nodes pinned in the
 * top layer, remaining nodes placed by breadth-first distance from them,
 * ties ordered by id.  The scene preserves node and edge counts exactly;
 * rendering never mutates the document.
 */

import { GraphNodeDoc, ReasonGraphDoc } from "./types.js";

export interface NodeStyle {
  stroke: string;
  fill: string;
  ring: boolean;
}

export const KIND_STYLE: Record<string, NodeStyle> = {
  completion: { stroke: "olive", fill: "#fffbd6", ring: false },
  precedence: { stroke: "#1f4fd8", fill: "#dce8ff", ring: false },
  resource: { stroke: "#c21807", fill: "#ffe2dd", ring: false },
  query: { stroke: "#111111", fill: "#ffffff", ring: false },
  minimality: { stroke: "#666666", fill: "#f4f4f4", ring: true },
  good_allocation: { stroke: "#6a2c91", fill: "#efe3fa", ring: false },
  generic: { stroke: "#555555", fill: "#e8e8e8", ring: false },
};

export interface SceneNode {
  id: string;
  label: string;
  kind: string;
  params: Record<string, string | number>;
  x: number;
  y: number;
  depth: number;
  style: NodeStyle;
  isRoot: boolean;
}

export interface SceneEdge {
  a: string;
  b: string;
  x1: number;
  y1: number;
  x2: number;
  y2: number;
}

export interface Scene {
  nodes: SceneNode[];
  edges: SceneEdge[];
  width: number;
  height: number;
}

export function layerNodes(graph: ReasonGraphDoc): Map<string, number> {
  const adjacency = new Map<string, string[]>();
  for (const n of graph.nodes) adjacency.set(n.id, []);
  for (const [a, b] of graph.edges) {
    adjacency.get(a)?.push(b);
    adjacency.get(b)?.push(a);
  }
  const depth = new Map<string, number>();
  const roots = graph.root.length
    ? [...graph.root].sort()
    : graph.nodes.slice(0, 1).map((n) => n.id);
  let frontier = roots.filter((r) => adjacency.has(r));
  frontier.forEach((r) => depth.set(r, 0));
  let level = 0;
  while (frontier.length) {
    level += 1;
    const next: string[] = [];
    for (const id of frontier) {
      for (const other of adjacency.get(id) ?? []) {
        if (!depth.has(other)) {
          depth.set(other, level);
          next.push(other);
        }
      }
    }
    frontier = next.sort();
  }
  // stragglers (cannot happen for a valid reason graph) go to a last layer
  for (const n of graph.nodes) {
    if (!depth.has(n.id)) depth.set(n.id, level + 1);
  }
  return depth;
}

export function buildScene(
  graph: ReasonGraphDoc,
  width = 900,
  rowHeight = 110,
  margin = 70,
): Scene {
  const depth = layerNodes(graph);
  const layers = new Map<number, GraphNodeDoc[]>();
  for (const node of [...graph.nodes].sort((p, q) => p.id.localeCompare(q.id))) {
    const d = depth.get(node.id) ?? 0;
    if (!layers.has(d)) layers.set(d, []);
    layers.get(d)!.push(node);
  }
  const nodes: SceneNode[] = [];
  const pos = new Map<string, { x: number; y: number }>();
  const sortedLevels = [...layers.keys()].sort((p, q) => p - q);
  for (const level of sortedLevels) {
    const row = layers.get(level)!;
    row.forEach((node, i) => {
      const x = ((i + 1) / (row.length + 1)) * width;
      const y = margin + level * rowHeight;
      pos.set(node.id, { x, y });
      nodes.push({
        id: node.id,
        label: node.label,
        kind: node.kind,
        params: node.params,
        x,
        y,
        depth: level,
        style: KIND_STYLE[node.kind] ?? KIND_STYLE.generic,
        isRoot: graph.root.includes(node.id),
      });
    });
  }
  const edges: SceneEdge[] = graph.edges.map(([a, b]) => {
    const pa = pos.get(a)!;
    const pb = pos.get(b)!;
    return { a, b, x1: pa.x, y1: pa.y, x2: pb.x, y2: pb.y };
  });
  const height = margin * 2 + rowHeight * Math.max(...sortedLevels, 0);
  return { nodes, edges, width, height };
}

function escapeXml(text: string): string {
  return text
    .replace(/&/g, "&amp;")
    .replace(/</g, "&lt;")
    .replace(/>/g, "&gt;")
    .replace(/"/g, "&quot;");
}

/** Scene -> standalone SVG markup.  Labels are emitted verbatim (escaped). */
export function sceneToSvg(scene: Scene): string {
  const parts: string[] = [
    `<svg xmlns="http://www.w3.org/2000/svg" viewBox="0 0 ${scene.width} ${scene.height}" class="reason-graph">`,
  ];
  for (const e of scene.edges) {
    parts.push(
      `<line class="edge" x1="${e.x1}" y1="${e.y1}" x2="${e.x2}" y2="${e.y2}" stroke="#999" />`,
    );
  }
  for (const n of scene.nodes) {
    const r = 26;
    parts.push(`<g class="node kind-${n.kind}" data-id="${escapeXml(n.id)}">`);
    if (n.style.ring) {
      parts.push(
        `<circle cx="${n.x}" cy="${n.y}" r="${r + 5}" fill="none" stroke="${n.style.stroke}" />`,
      );
    }
    parts.push(
      `<circle cx="${n.x}" cy="${n.y}" r="${r}" fill="${n.style.fill}" stroke="${n.style.stroke}"` +
        ` stroke-width="${n.isRoot ? 3 : 1.5}" />`,
    );
    parts.push(
      `<title>${escapeXml(n.id)}: ${escapeXml(n.label)}</title>`,
    );
    parts.push(
      `<text x="${n.x}" y="${n.y + r + 16}" text-anchor="middle" class="node-label">` +
        `${escapeXml(n.label)}</text>`,
    );
    parts.push("</g>");
  }
  parts.push("</svg>");
  return parts.join("");
}
