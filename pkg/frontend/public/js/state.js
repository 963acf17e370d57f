/** Explorer session state: the loaded model, the current evidence, and
 * the sequence numbers that keep exactly one query relevant at a time.
 *
 * The state holds no probabilities of its own. Every number the page
 * shows comes from a service response stored here verbatim.
 */
export class ExplorerState {
    constructor(model) {
        this.model = model;
        this.evidence = {};
        this.lastQuery = null;
        this.nextSeq = 0;
        this.latestIssued = -1;
    }
    /** Valid code ids per segment label, from the loaded model. */
    codesOf(label) {
        const dict = this.model.dictionaries.find((d) => d.segment === label);
        return dict ? dict.codes.map((c) => c.id) : [];
    }
    isValidEvidence(label, codeId) {
        return this.codesOf(label).includes(codeId);
    }
    /** Toggle a code in the evidence; clicking the active code clears it,
     * clicking another code of the same segment replaces it. Returns the
     * evidence to send; throws on ids the model does not know. */
    toggleEvidence(label, codeId) {
        if (!this.isValidEvidence(label, codeId)) {
            throw new Error(`unknown evidence ${label}=${codeId}`);
        }
        if (this.evidence[label] === codeId) {
            delete this.evidence[label];
        }
        else {
            this.evidence[label] = codeId;
        }
        return { ...this.evidence };
    }
    clearEvidence() {
        this.evidence = {};
        return {};
    }
    /** Mark a new in-flight query; older responses become stale. */
    beginQuery() {
        this.latestIssued = this.nextSeq++;
        return this.latestIssued;
    }
    /** Accept a response only if it answers the newest issued query. */
    acceptQueryResponse(seq, response) {
        if (seq !== this.latestIssued) {
            return false; // stale: a newer query is in flight or already answered
        }
        this.lastQuery = response;
        return true;
    }
    /** Roll evidence back to what a response reported (used after errors). */
    rollbackTo(evidence) {
        this.evidence = { ...evidence };
    }
    get hasEvidence() {
        return Object.keys(this.evidence).length > 0;
    }
}
