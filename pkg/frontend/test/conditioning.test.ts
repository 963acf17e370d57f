/** The conditioning loop against recorded backend responses.
 *
 * Fixtures under fixtures/ are verbatim HTTP bodies of the real service
 * for the copy-dependency dataset (regenerate with make_fixtures.py), so
 * these tests prove the UI shows service numbers untouched.
 */

import { readFileSync } from "node:fs";
import { describe, expect, it } from "vitest";

import { ExplorerState } from "../src/state.js";
import { probabilityBrowserHtml } from "../src/render/browser.js";
import { bnGraphSvg, graphEdges } from "../src/render/graph.js";
import { entropyPlotSvg } from "../src/render/plot.js";
import { generationTableHtml } from "../src/render/genpanel.js";
import type {
  GenerateResponse,
  ModelDocument,
  QueryResponse,
} from "../src/types.js";

function fixture<T>(name: string): T {
  return JSON.parse(
    readFileSync(new URL(`./fixtures/${name}`, import.meta.url), "utf-8"),
  ) as T;
}

const model = fixture<ModelDocument>("model.json");
const prior = fixture<QueryResponse>("query_prior.json");
const conditioned = fixture<QueryResponse>("query_child_g1.json");
const generated = fixture<GenerateResponse>("generate_n5.json");

describe("conditioning loop on the copy fixture", () => {
  it("clicking the child's code renders the parent at 100%", () => {
    const state = new ExplorerState(model);
    const evidence = state.toggleEvidence("G", "G1");
    expect(evidence).toEqual({ G: "G1" });
    const seq = state.beginQuery();
    expect(state.acceptQueryResponse(seq, conditioned)).toBe(true);
    const html = probabilityBrowserHtml(conditioned, state.evidence);

    // the parent segment C now shows its copied code at 100%,
    // exactly as the service formatted it
    const cColumn = html.slice(html.indexOf('data-label="C"'));
    const c1Cell = cColumn.slice(cColumn.indexOf('data-code="C1"'));
    const serviceC1 = conditioned.segments
      .find((s) => s.label === "C")!
      .codes.find((c) => c.id === "C1")!;
    expect(serviceC1.p_display).toBe("100%");
    expect(c1Cell).toContain(`<span class="code-p">${serviceC1.p_display}</span>`);

    // the clicked code itself renders as active evidence at 100%
    const gCell = html.slice(html.indexOf('data-code="G1"') - 200);
    expect(gCell).toContain("evidence");
  });

  it("un-clicking restores the prior view exactly", () => {
    const state = new ExplorerState(model);
    const before = probabilityBrowserHtml(prior, {});

    state.toggleEvidence("G", "G1");
    let seq = state.beginQuery();
    state.acceptQueryResponse(seq, conditioned);

    const evidence = state.toggleEvidence("G", "G1"); // un-click
    expect(evidence).toEqual({});
    seq = state.beginQuery();
    state.acceptQueryResponse(seq, prior);
    const after = probabilityBrowserHtml(prior, state.evidence);
    expect(after).toBe(before);
  });

  it("every displayed number is a verbatim service string", () => {
    const html = probabilityBrowserHtml(prior, {});
    for (const segment of prior.segments) {
      for (const code of segment.codes) {
        expect(html).toContain(`<span class="code-p">${code.p_display}</span>`);
        expect(html).toContain(`<span class="code-value">${code.display}</span>`);
      }
    }
  });
});

describe("dependency graph", () => {
  it("shows exactly the learned edges", () => {
    expect(graphEdges(model)).toEqual([{ from: "C", to: "G" }]);
    const svg = bnGraphSvg(model, {});
    expect(svg.match(/class="edge/g)?.length).toBe(1);
    expect(svg).toContain('data-from="C"');
    expect(svg).toContain('data-to="G"');
  });

  it("highlights edges incident to evidence segments", () => {
    expect(bnGraphSvg(model, { G: "G1" })).toContain("edge highlighted");
    expect(bnGraphSvg(model, { B: "B1" })).not.toContain("edge highlighted");
  });

  it("renders one node per segment, left to right", () => {
    const svg = bnGraphSvg(model, {});
    const order = [...svg.matchAll(/data-label="([A-Z]+)"/g)].map((m) => m[1]);
    expect(order).toEqual(model.segments.map((s) => s.label));
  });
});

describe("entropy plot", () => {
  it("draws both lines, a boundary per interior segment edge, and letters", () => {
    const svg = entropyPlotSvg(model);
    expect(svg).toContain('class="entropy-line"');
    expect(svg).toContain('class="acr-line"');
    const boundaries = svg.match(/class="boundary"/g)?.length ?? 0;
    expect(boundaries).toBe(model.segments.length - 1);
    for (const seg of model.segments) {
      expect(svg).toContain(`>${seg.label}</text>`);
    }
  });

  it("prefix-mode models plot only 16 positions", () => {
    const prefixModel: ModelDocument = {
      ...model,
      mode: "prefix",
      profile: {
        ...model.profile,
        entropies: model.profile.entropies.slice(0, 16),
        acr: model.profile.acr.slice(0, 16),
      },
      segments: [
        { label: "A", start: 1, end: 8 },
        { label: "B", start: 9, end: 16 },
      ],
    };
    const svg = entropyPlotSvg(prefixModel);
    expect(svg).toContain(">16</text>");
    expect(svg).not.toContain(">20</text>");
  });
});

describe("generation panel", () => {
  it("renders the service's address and log-p strings verbatim", () => {
    const html = generationTableHtml(generated);
    for (const candidate of generated.candidates) {
      expect(html).toContain(`<td class="addr">${candidate.address}</td>`);
      expect(html).toContain(`<td class="logp">${candidate.log_p_display}</td>`);
    }
    expect(html).not.toContain("underrun");
  });

  it("flags underrun", () => {
    const short: GenerateResponse = {
      ...generated,
      underrun: true,
      count: 2,
      requested: 9,
    };
    expect(generationTableHtml(short)).toContain("2 of 9 requested");
  });
});
