/** Wire types for the three backend endpoints the explorer consumes. */

export interface SegmentInfo {
  label: string;
  start: number;
  end: number;
}

export interface CodeDoc {
  id: string;
  kind: "exact-value" | "range";
  freq: string;
  origin: string;
  display: string;
  value?: string;
  lo?: string;
  hi?: string;
}

export interface DictionaryDoc {
  segment: string;
  codes: CodeDoc[];
}

export interface BnNodeDoc {
  label: string;
  parents: string[];
  codes: string[];
  cpt: { given: string[]; p: string[] }[];
}

export interface ModelDocument {
  format: string;
  version: number;
  mode: "full" | "prefix";
  provenance: Record<string, unknown>;
  profile: {
    n: number;
    entropies: string[];
    acr: string[];
    total_entropy: string;
  };
  segments: SegmentInfo[];
  dictionaries: DictionaryDoc[];
  bn: { alpha: string; nodes: BnNodeDoc[] };
}

export interface QueryCode {
  id: string;
  display: string;
  p: number;
  p_display: string;
}

export interface QuerySegment {
  label: string;
  start: number;
  end: number;
  codes: QueryCode[];
}

export interface QueryResponse {
  version: number;
  evidence: Record<string, string>;
  segments: QuerySegment[];
}

export interface Candidate {
  address: string;
  log_p: number;
  log_p_display: string;
}

export interface GenerateResponse {
  version: number;
  requested: number;
  count: number;
  underrun: boolean;
  candidates: Candidate[];
}

export interface ServiceError {
  version: number;
  error: string;
  detail?: unknown;
  valid?: string[];
}

/** Evidence is a plain label -> code-id mapping, empty when unconstrained. */
export type Evidence = Record<string, string>;
