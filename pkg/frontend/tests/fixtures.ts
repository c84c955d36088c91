import type { CandidateDetail, Schema } from "../src/types";

export const SCHEMA: Schema = {
  categories: [
    {
      id: "Lex",
      label: "Word recognized at once",
      subtypes: [
        { id: "1.1", label: "Stem distortion", help: "h11" },
        { id: "1.2", label: "Segmentation error", help: "h12" },
      ],
    },
    {
      id: "Gram",
      label: "Inflection wrong",
      subtypes: [
        { id: "2.1", label: "Verbal inflection", help: "h21" },
        { id: "2.2", label: "Nominal inflection", help: "h22" },
      ],
    },
    {
      id: "Cotx",
      label: "Needs context",
      subtypes: [
        { id: "3.1", label: "Local context", help: "h31" },
        { id: "3.2", label: "Broader context", help: "h32" },
        { id: "3.3", label: "Partial context", help: "h33" },
      ],
    },
    {
      id: "Fail",
      label: "Not recoverable",
      subtypes: [
        { id: "4.1", label: "Ambiguity", help: "h41" },
        { id: "4.2", label: "Acknowledged impasse", help: "h42" },
        { id: "4.3", label: "Misleading", help: "h43" },
      ],
    },
  ],
};

export const DETAIL: CandidateDetail = {
  candidate: {
    utterance_id: "u11",
    system_id: "demo",
    ref_index: 3,
    ref_word: "programme",
    hyp_words: ["problème"],
    hyp_indices: [3],
    hyp_gap_index: 3,
    segment_kind: "substitution",
    pos: "noun",
    proper_noun: false,
  },
  suggestion: {
    category: "Fail",
    subtype: "4.3",
    decided: false,
    confidence: 0.48,
    rationale: "'problème' is a real word unrelated to 'programme'",
  },
  reference_text: "pour présenter le programme de stabilité",
  hypothesis_text: "pour présenter le problème de stabilité",
  reference_tokens: [
    { surface: "pour", normalized: "pour" },
    { surface: "présenter", normalized: "présenter" },
    { surface: "le", normalized: "le" },
    { surface: "programme", normalized: "programme" },
    { surface: "de", normalized: "de" },
    { surface: "stabilité", normalized: "stabilité" },
  ],
  hypothesis_tokens: [
    { surface: "pour", normalized: "pour" },
    { surface: "présenter", normalized: "présenter" },
    { surface: "le", normalized: "le" },
    { surface: "problème", normalized: "problème" },
    { surface: "de", normalized: "de" },
    { surface: "stabilité", normalized: "stabilité" },
  ],
  cue_words: ["problème", "programme"],
  neighbors: { previous: null, next: null },
  annotations: [],
};
