/** Thin typed client for GET /model, POST /query, POST /generate. */
export class ApiError extends Error {
    constructor(status, body) {
        super(`${body.error}: ${JSON.stringify(body.detail ?? "")}`);
        this.status = status;
        this.body = body;
    }
    get isInconsistentEvidence() {
        return this.status === 422 && this.body.error === "inconsistent-evidence";
    }
}
export class ApiClient {
    constructor(baseUrl = "", fetchFn = fetch) {
        this.baseUrl = baseUrl;
        this.fetchFn = fetchFn;
    }
    async post(path, payload) {
        return this.fetchFn(this.baseUrl + path, {
            method: "POST",
            headers: { "content-type": "application/json" },
            body: JSON.stringify(payload),
        });
    }
    async check(resp) {
        if (!resp.ok) {
            throw new ApiError(resp.status, (await resp.json()));
        }
        return resp;
    }
    async getModel() {
        const resp = await this.check(await this.fetchFn(this.baseUrl + "/model"));
        return (await resp.json());
    }
    async query(evidence) {
        const resp = await this.check(await this.post("/query", { evidence }));
        return (await resp.json());
    }
    async generate(n, evidence, seed) {
        const resp = await this.check(await this.post("/generate", { n, evidence, seed }));
        const rawBody = await resp.text();
        return { response: JSON.parse(rawBody), rawBody };
    }
}
