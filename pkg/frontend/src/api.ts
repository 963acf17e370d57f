/** Thin typed client for GET /model, POST /query, POST /generate. */

import type {
  Evidence,
  GenerateResponse,
  ModelDocument,
  QueryResponse,
  ServiceError,
} from "./types.js";

export class ApiError extends Error {
  constructor(
    readonly status: number,
    readonly body: ServiceError,
  ) {
    super(`${body.error}: ${JSON.stringify(body.detail ?? "")}`);
  }

  get isInconsistentEvidence(): boolean {
    return this.status === 422 && this.body.error === "inconsistent-evidence";
  }
}

/** A generate result plus the exact body text, so downloads are byte-for-byte. */
export interface GenerateResult {
  response: GenerateResponse;
  rawBody: string;
}

export class ApiClient {
  constructor(
    readonly baseUrl: string = "",
    private readonly fetchFn: typeof fetch = fetch,
  ) {}

  private async post(path: string, payload: unknown): Promise<Response> {
    return this.fetchFn(this.baseUrl + path, {
      method: "POST",
      headers: { "content-type": "application/json" },
      body: JSON.stringify(payload),
    });
  }

  private async check(resp: Response): Promise<Response> {
    if (!resp.ok) {
      throw new ApiError(resp.status, (await resp.json()) as ServiceError);
    }
    return resp;
  }

  async getModel(): Promise<ModelDocument> {
    const resp = await this.check(await this.fetchFn(this.baseUrl + "/model"));
    return (await resp.json()) as ModelDocument;
  }

  async query(evidence: Evidence): Promise<QueryResponse> {
    const resp = await this.check(await this.post("/query", { evidence }));
    return (await resp.json()) as QueryResponse;
  }

  async generate(n: number, evidence: Evidence, seed: number): Promise<GenerateResult> {
    const resp = await this.check(
      await this.post("/generate", { n, evidence, seed }),
    );
    const rawBody = await resp.text();
    return { response: JSON.parse(rawBody) as GenerateResponse, rawBody };
  }
}
