import { readFileSync } from "node:fs";
import { describe, expect, it } from "vitest";

import { LEGEND_GROUPS, selectNode, showNetwork } from "../src/network";
import {
  NetworkPayload,
  restylePayload,
  topologyKey,
  validatePayload,
} from "../src/payload";
import { queryAll, renderNetwork } from "../src/render";

function loadPayload(name: string): NetworkPayload {
  return JSON.parse(
    readFileSync(new URL(`../fixtures/${name}`, import.meta.url), "utf-8"),
  ) as NetworkPayload;
}

// 6 seed proteins + 10 module additions from the recorded pipeline run
const MODULE_PAYLOAD = loadPayload("diamond_payload.json");
// same module plus its 5 top-ranked drugs
const DRUG_PAYLOAD = loadPayload("drug_payload.json");

describe("network rendering", () => {
  it("renders all 16 nodes of the module payload", () => {
    const view = showNetwork(MODULE_PAYLOAD);
    expect(view.nodes).toHaveLength(16);
    const dom = renderNetwork(view);
    const nodes = queryAll(dom, (n) => n.attrs.class === "node");
    expect(nodes).toHaveLength(16);
    const groups = nodes.map((n) => n.attrs["data-group"]);
    expect(groups.filter((g) => g === "seed")).toHaveLength(6);
    expect(groups.filter((g) => g === "diamond_node")).toHaveLength(10);
  });

  it("always shows the fixed five-group legend", () => {
    const view = showNetwork(MODULE_PAYLOAD);
    expect(view.legend.map((e) => e.group)).toEqual([...LEGEND_GROUPS]);
    const dom = renderNetwork(view);
    const items = queryAll(dom, (n) => n.tag === "li");
    expect(items).toHaveLength(5);
    expect(items.map((n) => n.attrs["data-group"])).toEqual([
      "seed",
      "diamond_node",
      "drug",
      "disorder",
      "gene",
    ]);
  });

  it("keeps every edge endpoint among the rendered nodes", () => {
    const view = showNetwork(DRUG_PAYLOAD);
    const ids = new Set(view.nodes.map((n) => n.id));
    for (const edge of view.edges) {
      expect(ids.has(edge.from)).toBe(true);
      expect(ids.has(edge.to)).toBe(true);
    }
  });

  it("lays nodes out deterministically", () => {
    const a = showNetwork(MODULE_PAYLOAD);
    const b = showNetwork(MODULE_PAYLOAD);
    expect(a.nodes.map((n) => [n.x, n.y])).toEqual(b.nodes.map((n) => [n.x, n.y]));
  });
});

describe("node detail dialog", () => {
  it("lists group, id source, and neighbors for a seed node", () => {
    const seed = MODULE_PAYLOAD.nodes.find((n) => n.group === "seed")!;
    const detail = selectNode(MODULE_PAYLOAD, seed.id);
    expect(detail).not.toBeNull();
    expect(detail!.group).toBe("seed");
    expect(detail!.idSource).toBe(seed.id.split(".")[0]);
    expect(detail!.degree).toBe(detail!.neighbors.length);
    expect(detail!.degree).toBeGreaterThan(0);
  });

  it("is a no-op for node ids not in the payload", () => {
    expect(selectNode(MODULE_PAYLOAD, "entrez.0000")).toBeNull();
  });
});

describe("restyle", () => {
  it("empty instruction returns the payload unchanged", () => {
    const out = restylePayload(DRUG_PAYLOAD, "");
    expect(out).toEqual(DRUG_PAYLOAD);
  });

  it("hide drugs removes exactly the drug-group nodes", () => {
    const before = DRUG_PAYLOAD.nodes.map((n) => n.id);
    const drugIds = new Set(
      DRUG_PAYLOAD.nodes.filter((n) => n.group === "drug").map((n) => n.id),
    );
    expect(drugIds.size).toBeGreaterThan(0);
    const out = restylePayload(DRUG_PAYLOAD, "hide drugs");
    validatePayload(out);
    const after = new Set(out.nodes.map((n) => n.id));
    for (const id of before) {
      expect(after.has(id)).toBe(!drugIds.has(id));
    }
    expect(out.legend["drug"]).toMatchObject({ hidden: true });
    const view = showNetwork(out);
    expect(view.nodes.some((n) => n.group === "drug")).toBe(false);
  });

  it("re-validates edges after hiding a group", () => {
    const out = restylePayload(DRUG_PAYLOAD, "hide drugs");
    const kept = new Set(out.nodes.map((n) => n.id));
    for (const edge of out.edges) {
      expect(kept.has(edge.from) && kept.has(edge.to)).toBe(true);
    }
  });

  it("color instructions change the legend but never the topology", () => {
    const out = restylePayload(MODULE_PAYLOAD, "make seeds red");
    expect(out.legend["seed"]).toMatchObject({ color: "red" });
    expect(topologyKey(out)).toBe(topologyKey(MODULE_PAYLOAD));
    const view = showNetwork(out);
    const seed = view.nodes.find((n) => n.group === "seed")!;
    expect(seed.color).toBe("red");
  });

  it("payload swap after a style-only restyle keeps node positions", () => {
    const before = showNetwork(MODULE_PAYLOAD);
    const after = showNetwork(restylePayload(MODULE_PAYLOAD, "make seeds red"));
    expect(after.nodes.map((n) => [n.id, n.x, n.y])).toEqual(
      before.nodes.map((n) => [n.id, n.x, n.y]),
    );
  });
});
