import { readFileSync } from "node:fs";
import { describe, expect, it } from "vitest";

import { ExplorerState } from "../src/state.js";
import type { ModelDocument, QueryResponse } from "../src/types.js";

const model = JSON.parse(
  readFileSync(new URL("./fixtures/model.json", import.meta.url), "utf-8"),
) as ModelDocument;
const prior = JSON.parse(
  readFileSync(new URL("./fixtures/query_prior.json", import.meta.url), "utf-8"),
) as QueryResponse;

describe("evidence toggling", () => {
  it("click sets, second click clears", () => {
    const state = new ExplorerState(model);
    expect(state.toggleEvidence("G", "G1")).toEqual({ G: "G1" });
    expect(state.toggleEvidence("G", "G1")).toEqual({});
    expect(state.hasEvidence).toBe(false);
  });

  it("clicking a sibling code replaces within the segment", () => {
    const state = new ExplorerState(model);
    state.toggleEvidence("G", "G1");
    expect(state.toggleEvidence("G", "G2")).toEqual({ G: "G2" });
  });

  it("any toggle sequence ending where it started yields empty evidence", () => {
    const state = new ExplorerState(model);
    state.toggleEvidence("G", "G1");
    state.toggleEvidence("C", "C2");
    state.toggleEvidence("G", "G1");
    state.toggleEvidence("C", "C2");
    expect(state.evidence).toEqual({});
  });

  it("rejects labels and codes the model does not know", () => {
    const state = new ExplorerState(model);
    expect(() => state.toggleEvidence("Z", "Z1")).toThrow(/unknown/);
    expect(() => state.toggleEvidence("G", "G99")).toThrow(/unknown/);
  });

  it("clearEvidence empties everything", () => {
    const state = new ExplorerState(model);
    state.toggleEvidence("G", "G1");
    expect(state.clearEvidence()).toEqual({});
    expect(state.evidence).toEqual({});
  });
});

describe("response sequencing", () => {
  it("accepts only the newest issued query", () => {
    const state = new ExplorerState(model);
    const first = state.beginQuery();
    const second = state.beginQuery();
    expect(state.acceptQueryResponse(first, prior)).toBe(false); // stale
    expect(state.lastQuery).toBeNull();
    expect(state.acceptQueryResponse(second, prior)).toBe(true);
    expect(state.lastQuery).toBe(prior);
  });

  it("a response cannot be accepted twice", () => {
    const state = new ExplorerState(model);
    const seq = state.beginQuery();
    expect(state.acceptQueryResponse(seq, prior)).toBe(true);
    state.beginQuery();
    expect(state.acceptQueryResponse(seq, prior)).toBe(false);
  });

  it("rollback restores the evidence a response reported", () => {
    const state = new ExplorerState(model);
    state.toggleEvidence("G", "G1");
    state.rollbackTo({});
    expect(state.evidence).toEqual({});
  });
});

describe("model lookups", () => {
  it("lists code ids per segment from the model document", () => {
    const state = new ExplorerState(model);
    expect(state.codesOf("C")).toEqual(["C1", "C2", "C3", "C4"]);
    expect(state.codesOf("missing")).toEqual([]);
  });
});
