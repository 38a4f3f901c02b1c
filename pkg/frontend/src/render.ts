/** Minimal virtual-DOM rendering: the whole UI is a pure function of the
 * view state, serialized to a stable string for snapshot comparison. No
 * real DOM needed, so tests run in plain Node. */

import { NetworkViewModel } from "./network";
import { ChatMessage, ErrorCard, ViewState } from "./viewstate";

export interface VNode {
  tag: string;
  attrs: Record<string, string>;
  children: (VNode | string)[];
}

export function h(
  tag: string,
  attrs: Record<string, string> = {},
  children: (VNode | string)[] = [],
): VNode {
  return { tag, attrs, children };
}

function isErrorCard(m: ChatMessage | ErrorCard): m is ErrorCard {
  return "message" in m;
}

export function renderMessages(state: ViewState): VNode {
  const children: VNode[] = state.messages.map((m) =>
    isErrorCard(m)
      ? h("div", { class: "error-card" }, [m.message])
      : h("div", { class: `message ${m.role}` }, [m.text]),
  );
  if (state.streamingBuffer !== null) {
    children.push(
      h("div", { class: "message assistant streaming" }, [
        state.streamingBuffer,
      ]),
    );
  }
  return h("div", { class: "messages" }, children);
}

export function renderTimeline(state: ViewState): VNode {
  return h(
    "ol",
    { class: "timeline" },
    state.timeline.map((entry) =>
      h(
        "li",
        {
          class: `timeline-${entry.kind}`,
          ...(entry.outcome ? { "data-outcome": entry.outcome } : {}),
        },
        [`${entry.label}: ${entry.detail}`],
      ),
    ),
  );
}

export function renderNetwork(view: NetworkViewModel): VNode {
  const nodes = view.nodes.map((n) =>
    h(
      "g",
      {
        class: "node",
        "data-id": n.id,
        "data-group": n.group,
        fill: n.color,
        transform: `translate(${n.x},${n.y})`,
      },
      [h("title", {}, [n.label])],
    ),
  );
  const edges = view.edges.map((e) =>
    h("line", { class: "edge", "data-from": e.from, "data-to": e.to }),
  );
  const legend = h(
    "ul",
    { class: "legend" },
    view.legend.map((entry) =>
      h(
        "li",
        {
          "data-group": entry.group,
          style: `color:${entry.color}`,
          ...(entry.hidden ? { "data-hidden": "true" } : {}),
        },
        [entry.group.replace(/_/g, " ")],
      ),
    ),
  );
  return h("div", { class: "network" }, [
    h("svg", { class: "graph" }, [...edges, ...nodes]),
    legend,
  ]);
}

export function renderApp(
  state: ViewState,
  network: NetworkViewModel | null = null,
): VNode {
  const children: VNode[] = [renderMessages(state), renderTimeline(state)];
  if (network) children.push(renderNetwork(network));
  if (!state.connected) {
    children.push(h("div", { class: "banner reconnect" }, ["reconnecting"]));
  }
  return h("main", { class: "app" }, children);
}

export function serialize(node: VNode | string, indent = 0): string {
  const pad = "  ".repeat(indent);
  if (typeof node === "string") return `${pad}${JSON.stringify(node)}`;
  const attrs = Object.keys(node.attrs)
    .sort()
    .map((k) => ` ${k}=${JSON.stringify(node.attrs[k])}`)
    .join("");
  if (node.children.length === 0) return `${pad}<${node.tag}${attrs}/>`;
  const inner = node.children
    .map((c) => serialize(c, indent + 1))
    .join("\n");
  return `${pad}<${node.tag}${attrs}>\n${inner}\n${pad}</${node.tag}>`;
}

export function queryAll(
  node: VNode,
  predicate: (n: VNode) => boolean,
): VNode[] {
  const hits: VNode[] = [];
  const walk = (n: VNode | string) => {
    if (typeof n === "string") return;
    if (predicate(n)) hits.push(n);
    n.children.forEach(walk);
  };
  walk(node);
  return hits;
}
