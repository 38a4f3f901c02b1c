/** Grouped network payloads served by the REST API, plus the client-side
 * restyle fallback used when no model is reachable. Restyle mirrors the
 * server vocabulary: "hide <group>s", "make <group>s <color>",
 * "group by type". */

export interface PayloadNode {
  id: string;
  label: string;
  group: string;
}

export interface PayloadEdge {
  from: string;
  to: string;
}

export interface GroupStyle {
  color?: string;
  shape?: string;
  hidden?: boolean;
}

export interface NetworkPayload {
  nodes: PayloadNode[];
  edges: PayloadEdge[];
  legend: Record<string, GroupStyle | { mode: string }>;
}

export const GROUPS = [
  "seed",
  "diamond_node",
  "drug",
  "disorder",
  "gene",
  "protein",
] as const;

const COLOR_WORDS = [
  "red", "green", "blue", "orange", "purple", "yellow", "black",
  "white", "gray", "grey", "pink", "brown", "cyan",
];

export function validatePayload(payload: NetworkPayload): void {
  const ids = new Set(payload.nodes.map((n) => n.id));
  if (ids.size !== payload.nodes.length) {
    throw new Error("duplicate node ids in payload");
  }
  for (const node of payload.nodes) {
    if (!(GROUPS as readonly string[]).includes(node.group)) {
      throw new Error(`unknown group ${node.group}`);
    }
  }
  for (const edge of payload.edges) {
    if (!ids.has(edge.from) || !ids.has(edge.to)) {
      throw new Error(`edge endpoint missing: ${edge.from} -> ${edge.to}`);
    }
  }
}

/** Stable key over (node ids, edges); style changes leave it untouched. */
export function topologyKey(payload: NetworkPayload): string {
  const nodes = payload.nodes.map((n) => n.id).sort();
  const edges = payload.edges
    .map((e) => `${e.from}->${e.to}`)
    .sort();
  return JSON.stringify([nodes, edges]);
}

function clone(payload: NetworkPayload): NetworkPayload {
  return JSON.parse(JSON.stringify(payload)) as NetworkPayload;
}

export function restylePayload(
  payload: NetworkPayload,
  instruction: string,
): NetworkPayload {
  const out = clone(payload);
  const text = instruction.trim().toLowerCase();
  if (!text) return out;

  const hidden = new Set<string>();
  for (const group of GROUPS) {
    const label = group.replace(/_/g, " ");
    const re = new RegExp(`\\b(hide|remove|drop)\\b.*\\b${label}s?\\b`);
    if (re.test(text)) hidden.add(group);
  }
  if (hidden.size > 0) {
    out.nodes = out.nodes.filter((n) => !hidden.has(n.group));
    const keep = new Set(out.nodes.map((n) => n.id));
    out.edges = out.edges.filter((e) => keep.has(e.from) && keep.has(e.to));
    for (const group of hidden) {
      const style = (out.legend[group] ?? {}) as GroupStyle;
      style.hidden = true;
      out.legend[group] = style;
    }
  }

  const words = text.split(/\s+/);
  for (const color of COLOR_WORDS) {
    if (!words.includes(color)) continue;
    for (const group of GROUPS) {
      const label = group.replace(/_/g, " ");
      if (new RegExp(`\\b${label}s?\\b`).test(text)) {
        const style = (out.legend[group] ?? {}) as GroupStyle;
        style.color = color;
        out.legend[group] = style;
      }
    }
  }

  if (text.includes("group by type")) {
    out.legend["layout"] = { mode: "grouped" };
  }
  return out;
}
