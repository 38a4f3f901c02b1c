/** Network view model: grouped nodes with a fixed five-group legend and a
 * node-detail dialog, built purely from the payload JSON. */

import { GroupStyle, NetworkPayload, PayloadNode, validatePayload } from "./payload";

/** The legend always shows these five groups, in this order, whether or
 * not the current payload contains them. */
export const LEGEND_GROUPS = [
  "seed",
  "diamond_node",
  "drug",
  "disorder",
  "gene",
] as const;

export interface LegendEntry {
  group: string;
  color: string;
  shape: string;
  hidden: boolean;
}

export interface PositionedNode extends PayloadNode {
  x: number;
  y: number;
  color: string;
  shape: string;
}

export interface NetworkViewModel {
  nodes: PositionedNode[];
  edges: { from: string; to: string }[];
  legend: LegendEntry[];
}

export interface NodeDetail {
  id: string;
  label: string;
  group: string;
  /** Namespace prefix of the id, e.g. "uniprot" for "uniprot.P08831". */
  idSource: string;
  degree: number;
  neighbors: string[];
}

const FALLBACK_STYLE: Record<string, GroupStyle> = {
  seed: { color: "#f5a623", shape: "star" },
  diamond_node: { color: "#4a90d9", shape: "diamond" },
  drug: { color: "#7ed321", shape: "diamond" },
  disorder: { color: "#d0021b", shape: "triangle" },
  gene: { color: "#9b9b9b", shape: "circle" },
  protein: { color: "#bd10e0", shape: "circle" },
};

function styleOf(payload: NetworkPayload, group: string): GroupStyle {
  const fromLegend = payload.legend[group];
  const fallback = FALLBACK_STYLE[group] ?? { color: "#000000", shape: "circle" };
  if (fromLegend && !("mode" in fromLegend)) {
    return { ...fallback, ...fromLegend };
  }
  return fallback;
}

/** Deterministic circular layout: node order in the payload fixes angles,
 * so the same payload always renders at the same coordinates. */
export function layoutPositions(count: number, radius = 200): [number, number][] {
  const out: [number, number][] = [];
  for (let i = 0; i < count; i++) {
    const angle = (2 * Math.PI * i) / Math.max(count, 1);
    out.push([
      Math.round(radius * Math.cos(angle) * 100) / 100,
      Math.round(radius * Math.sin(angle) * 100) / 100,
    ]);
  }
  return out;
}

export function showNetwork(payload: NetworkPayload): NetworkViewModel {
  validatePayload(payload);
  const positions = layoutPositions(payload.nodes.length);
  const nodes = payload.nodes.map((node, i) => {
    const style = styleOf(payload, node.group);
    return {
      ...node,
      x: positions[i][0],
      y: positions[i][1],
      color: style.color ?? "#000000",
      shape: style.shape ?? "circle",
    };
  });
  const legend = LEGEND_GROUPS.map((group) => {
    const style = styleOf(payload, group);
    return {
      group,
      color: style.color ?? "#000000",
      shape: style.shape ?? "circle",
      hidden: style.hidden === true,
    };
  });
  return { nodes, edges: payload.edges.map((e) => ({ ...e })), legend };
}

/** Detail dialog content for a node in the current payload; null for ids
 * not present (selection is a no-op then). */
export function selectNode(
  payload: NetworkPayload,
  nodeId: string,
): NodeDetail | null {
  const node = payload.nodes.find((n) => n.id === nodeId);
  if (!node) return null;
  const neighbors = new Set<string>();
  for (const edge of payload.edges) {
    if (edge.from === nodeId) neighbors.add(edge.to);
    if (edge.to === nodeId) neighbors.add(edge.from);
  }
  const dot = nodeId.indexOf(".");
  return {
    id: node.id,
    label: node.label,
    group: node.group,
    idSource: dot > 0 ? nodeId.slice(0, dot) : "",
    degree: neighbors.size,
    neighbors: [...neighbors].sort(),
  };
}
