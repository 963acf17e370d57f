/** Page bootstrap and event wiring. Rendering itself lives in pure
 * functions under render/, so everything interesting is testable
 * without a browser. */
import { ApiClient, ApiError } from "./api.js";
import { ExplorerState } from "./state.js";
import { entropyPlotSvg } from "./render/plot.js";
import { probabilityBrowserHtml } from "./render/browser.js";
import { bnGraphSvg } from "./render/graph.js";
import { generationTableHtml } from "./render/genpanel.js";
const api = new ApiClient("");
function el(id) {
    const node = document.getElementById(id);
    if (!node)
        throw new Error(`missing #${id}`);
    return node;
}
function showBanner(message) {
    const banner = el("banner");
    banner.textContent = message;
    banner.classList.remove("hidden");
}
async function runQuery(state, evidence) {
    const seq = state.beginQuery();
    const previous = state.lastQuery?.evidence ?? {};
    try {
        const response = await api.query(evidence);
        if (!state.acceptQueryResponse(seq, response))
            return; // stale
        el("browser").innerHTML = probabilityBrowserHtml(response, state.evidence);
        el("graph").innerHTML = bnGraphSvg(state.model, state.evidence);
        el("evidence-summary").textContent = summarize(state.evidence);
    }
    catch (err) {
        state.rollbackTo(previous);
        if (err instanceof ApiError && err.isInconsistentEvidence) {
            showBanner("that combination has zero probability under the model");
        }
        else {
            showBanner(String(err));
        }
    }
}
function summarize(evidence) {
    const parts = Object.entries(evidence).map(([k, v]) => `${k}=${v}`);
    return parts.length ? `evidence: ${parts.join(", ")}` : "no evidence";
}
async function runGeneration(state) {
    const n = Number(el("gen-n").value) || 10;
    const seed = Number(el("gen-seed").value) || 0;
    const button = el("gen-run");
    button.disabled = true;
    try {
        const { response, rawBody } = await api.generate(n, state.evidence, seed);
        el("gen-results").innerHTML = generationTableHtml(response);
        const download = el("gen-download");
        download.href = URL.createObjectURL(new Blob([rawBody], { type: "application/json" }));
        download.download = `candidates-seed${seed}.json`;
        download.classList.remove("hidden");
    }
    catch (err) {
        showBanner(err instanceof ApiError ? err.message : String(err));
    }
    finally {
        button.disabled = false;
    }
}
async function boot() {
    const model = await api.getModel();
    const state = new ExplorerState(model);
    el("dataset-label").textContent =
        `${String(model.provenance["dataset_label"] ?? "model")} — ` +
            `${model.profile.n} addresses, ${model.mode} mode`;
    el("plot").innerHTML = entropyPlotSvg(model);
    el("graph").innerHTML = bnGraphSvg(model, {});
    el("browser").addEventListener("click", (event) => {
        const cell = event.target.closest(".code-cell");
        if (!cell)
            return;
        const evidence = state.toggleEvidence(cell.dataset["label"], cell.dataset["code"]);
        void runQuery(state, evidence);
    });
    el("clear-evidence").addEventListener("click", () => {
        void runQuery(state, state.clearEvidence());
    });
    el("banner").addEventListener("click", () => {
        el("banner").classList.add("hidden");
    });
    el("gen-run").addEventListener("click", () => void runGeneration(state));
    await runQuery(state, {});
}
void boot().catch((err) => showBanner(`failed to load model: ${err}`));
