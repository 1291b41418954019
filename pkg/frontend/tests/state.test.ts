import { describe, expect, it } from "vitest";

import { Client } from "../src/api.js";
import { ViewState } from "../src/state.js";
import { panelHtml } from "../src/render.js";
import { ExplainResponse } from "../src/types.js";
import { FIG_GRAPH } from "./scene.test.js";

const SOLVE_BODY = {
  f_star: 9,
  sense: "max",
  status: "solved",
  solution: {
    kind: "auction",
    goods: 2,
    rows: [
      { bid: 0, price: 5, goods: [0], selected: true },
      { bid: 1, price: 4, goods: [1], selected: true },
      { bid: 2, price: 8, goods: [0, 1], selected: false },
    ],
  },
};

const EXPLAIN_BODY: ExplainResponse = {
  case: "infeasibility",
  extended_objective: null,
  artifact: "abc123",
  t_iis: 0.12,
  graph: FIG_GRAPH,
  iis_report: {
    algorithm: "deletion",
    constraint_ids: FIG_GRAPH.nodes.map((n) => n.id),
    tags: FIG_GRAPH.nodes.map((n) => n.kind),
    size: FIG_GRAPH.nodes.length,
    oracle_calls: 12,
    wall_time: 0.12,
  },
};

function stubClient(log: string[]): Client {
  const fetchImpl = async (input: string, init?: RequestInit): Promise<Response> => {
    log.push(`${init?.method ?? "GET"} ${input}`);
    const body = (() => {
      if (input.endsWith("/instances")) return { session_id: "s1", family: "cats" };
      if (input.endsWith("/solve")) return SOLVE_BODY;
      if (input.endsWith("/explain")) return EXPLAIN_BODY;
      return [];
    })();
    return new Response(JSON.stringify(body), {
      status: input.endsWith("/instances") ? 201 : 200,
      headers: { "content-type": "application/json" },
    });
  };
  return new Client("http://test", fetchImpl);
}

describe("view state round trip", () => {
  it("loads, solves, explains, and appends panels", async () => {
    const log: string[] = [];
    const state = new ViewState(stubClient(log));
    await state.load("cats", "goods 2\nbids 3\n...", "toy");
    expect(state.sessionId).toBe("s1");
    expect(state.fStar).toBe(9);
    expect(state.solution?.kind).toBe("auction");

    state.setDraft({ kind: "W1", bid: 0 });
    expect(state.draftReady()).toBe(true);
    const panel = await state.submitDraft("deletion");
    expect(state.panels).toHaveLength(1);
    expect(panel.outcome).toBe("infeasibility");
    expect(log).toContain("POST http://test/sessions/s1/explain");
  });

  it("displays returned labels verbatim", async () => {
    const state = new ViewState(stubClient([]));
    await state.load("cats", "x", "toy");
    state.setDraft({ kind: "W1", bid: 0 });
    const panel = await state.submitDraft("deletion");
    expect(panel.labels).toEqual(FIG_GRAPH.nodes.map((n) => n.label));
    const html = panelHtml(
      panel.index, panel.outcome, panel.scene, panel.notice, panel.iisSize,
      JSON.stringify(panel.query),
    );
    for (const node of FIG_GRAPH.nodes) {
      expect(html).toContain(node.label);
    }
  });

  it("keeps node and edge counts intact end to end", async () => {
    const state = new ViewState(stubClient([]));
    await state.load("cats", "x", "toy");
    state.setDraft({ kind: "W1", bid: 0 });
    const panel = await state.submitDraft("deletion");
    expect(panel.scene!.nodes).toHaveLength(FIG_GRAPH.nodes.length);
    expect(panel.scene!.edges).toHaveLength(FIG_GRAPH.edges.length);
  });

  it("panels are append-only", async () => {
    const state = new ViewState(stubClient([]));
    await state.load("cats", "x", "toy");
    state.setDraft({ kind: "W1", bid: 0 });
    await state.submitDraft("deletion");
    state.setDraft({ kind: "W2", bid: 2 });
    await state.submitDraft("smallest");
    expect(state.panels.map((p) => p.index)).toEqual([0, 1]);
  });

  it("refuses to submit an invalid draft", async () => {
    const state = new ViewState(stubClient([]));
    await state.load("cats", "x", "toy");
    state.setDraft({ kind: "W3", bids: [] } as never);
    expect(state.draftReady()).toBe(false);
    await expect(state.submitDraft("deletion")).rejects.toThrow(/validate/);
  });

  it("queries echo through history byte-for-byte modulo field order", async () => {
    const state = new ViewState(stubClient([]));
    await state.load("cats", "x", "toy");
    const draft = { kind: "W4", bid: 0, bid_other: 2 } as const;
    state.setDraft(draft);
    const panel = await state.submitDraft("deletion");
    expect(JSON.parse(JSON.stringify(panel.query))).toEqual(draft);
  });
});
