/** Explorer session state: the loaded model, the current evidence, and
 * the sequence numbers that keep exactly one query relevant at a time.
 *
 * The state holds no probabilities of its own. Every number the page
 * shows comes from a service response stored here verbatim.
 */

import type { Evidence, ModelDocument, QueryResponse } from "./types.js";

export class ExplorerState {
  evidence: Evidence = {};
  lastQuery: QueryResponse | null = null;
  private nextSeq = 0;
  private latestIssued = -1;

  constructor(readonly model: ModelDocument) {}

  /** Valid code ids per segment label, from the loaded model. */
  codesOf(label: string): string[] {
    const dict = this.model.dictionaries.find((d) => d.segment === label);
    return dict ? dict.codes.map((c) => c.id) : [];
  }

  isValidEvidence(label: string, codeId: string): boolean {
    return this.codesOf(label).includes(codeId);
  }

  /** Toggle a code in the evidence; clicking the active code clears it,
   * clicking another code of the same segment replaces it. Returns the
   * evidence to send; throws on ids the model does not know. */
  toggleEvidence(label: string, codeId: string): Evidence {
    if (!this.isValidEvidence(label, codeId)) {
      throw new Error(`unknown evidence ${label}=${codeId}`);
    }
    if (this.evidence[label] === codeId) {
      delete this.evidence[label];
    } else {
      this.evidence[label] = codeId;
    }
    return { ...this.evidence };
  }

  clearEvidence(): Evidence {
    this.evidence = {};
    return {};
  }

  /** Mark a new in-flight query; older responses become stale. */
  beginQuery(): number {
    this.latestIssued = this.nextSeq++;
    return this.latestIssued;
  }

  /** Accept a response only if it answers the newest issued query. */
  acceptQueryResponse(seq: number, response: QueryResponse): boolean {
    if (seq !== this.latestIssued) {
      return false; // stale: a newer query is in flight or already answered
    }
    this.lastQuery = response;
    return true;
  }

  /** Roll evidence back to what a response reported (used after errors). */
  rollbackTo(evidence: Evidence): void {
    this.evidence = { ...evidence };
  }

  get hasEvidence(): boolean {
    return Object.keys(this.evidence).length > 0;
  }
}
