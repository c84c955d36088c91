// Wire types for the sevasr adjudication API.

export interface SubtypeInfo {
  id: string;
  label: string;
  help: string;
}

export interface CategoryInfo {
  id: string;
  label: string;
  subtypes: SubtypeInfo[];
}

export interface Schema {
  categories: CategoryInfo[];
}

export interface QueueItem {
  utterance_id: string;
  system_id: string;
  ref_index: number;
  ref_word: string;
  hyp_words: string[];
  segment_kind: string;
  category: string;
  subtype: string;
  confidence: number;
  rationale: string;
}

export interface QueueResponse {
  pending: number;
  items: QueueItem[];
}

export interface TokenView {
  surface: string;
  normalized: string;
}

export interface SuggestionView {
  category: string;
  subtype: string;
  decided: boolean;
  confidence: number;
  rationale: string;
}

export interface NeighborUtterance {
  utterance_id: string;
  reference: string;
}

export interface CandidateDetail {
  candidate: {
    utterance_id: string;
    system_id: string;
    ref_index: number;
    ref_word: string;
    hyp_words: string[];
    hyp_indices: number[];
    hyp_gap_index: number;
    segment_kind: string;
    pos: string;
    proper_noun: boolean;
  };
  suggestion: SuggestionView;
  reference_text: string;
  hypothesis_text: string;
  reference_tokens: TokenView[];
  hypothesis_tokens: TokenView[];
  cue_words: string[];
  neighbors: {
    previous: NeighborUtterance | null;
    next: NeighborUtterance | null;
  };
  annotations: AnnotationRecord[];
}

export interface AnnotationSubmission {
  annotator: string;
  utterance_id: string;
  system_id: string;
  ref_index: number;
  category: string;
  subtype: string;
  note?: string;
}

export interface AnnotationRecord extends AnnotationSubmission {
  timestamp: string;
}

export interface AnnotateResponse {
  ok: boolean;
  appended: boolean;
  record: AnnotationRecord;
  pending: number;
}

export interface Progress {
  total_candidates: number;
  auto_decided: number;
  human_annotated: number;
  pending: number;
  log_records: number;
  category_totals: Record<string, number>;
}

export type CandidateKey = Pick<
  QueueItem,
  "utterance_id" | "system_id" | "ref_index"
>;

export function candidateKey(k: CandidateKey): string {
  return `${k.utterance_id}/${k.system_id}/${k.ref_index}`;
}
