"""Severity pre-classification of reference content-word errors.

Every reference content word covered by a non-match alignment segment
becomes an error candidate.  A cascade of objective rules assigns each
candidate a category (Lex, Gram, Cotx, Fail) and subtype; rules that are
conclusive mark the suggestion ``decided``, everything context-dependent
stays undecided and is queued for human adjudication with a machine
rationale and a confidence used only to order that queue.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field
from pathlib import Path
from typing import Iterable, Mapping, Sequence

from .alignment import (
    DEFAULT_SPLIT_THRESHOLD,
    DELETION,
    MATCH,
    SUBSTITUTION,
    AlignmentResult,
    char_similarity,
    levenshtein,
)
from .corpus import Corpus, Token, fold_diacritics
from .lexicon import Lexicon, decompose

CATEGORIES = ("Lex", "Gram", "Cotx", "Fail")

SUBTYPE_CATEGORY: dict[str, str] = {
    "1.1": "Lex",
    "1.2": "Lex",
    "2.1": "Gram",
    "2.2": "Gram",
    "3.1": "Cotx",
    "3.2": "Cotx",
    "3.3": "Cotx",
    "4.1": "Fail",
    "4.2": "Fail",
    "4.3": "Fail",
}

CATEGORY_LABELS = {
    "Lex": "Word recognized at once (stem or segmentation slip)",
    "Gram": "Word recognized, inflection wrong",
    "Cotx": "Word recovered only through context",
    "Fail": "Word not recoverable or error undetectable",
}

SUBTYPE_LABELS = {
    "1.1": "Stem distortion, word still recognized",
    "1.2": "Segmentation error, word still recognized",
    "2.1": "Verbal inflection error (tense or person)",
    "2.2": "Nominal or adjectival inflection error (gender or number)",
    "3.1": "Local context resolves it (multiword expression, collocation, named entity)",
    "3.2": "Broader context resolves it (lexical theme, syntax, anaphora)",
    "3.3": "Context resolves it only partially",
    "4.1": "Ambiguous between competing solutions",
    "4.2": "Recognized as unsolvable (distorted form, incompatible word, visible gap)",
    "4.3": "Misleading: error reads fluently and goes undetected",
}

SUBTYPE_HELP = {
    "1.1": "Misspelled stem, inflection intact; the intended word is obvious in isolation.",
    "1.2": "The word is split into pieces (or fused with a neighbor) but reassembles readily.",
    "2.1": "Verb stem intact, tense/person marker wrong.",
    "2.2": "Noun or adjective stem intact, gender/number marker wrong.",
    "3.1": "Resolution comes from the immediate word group: compounds, collocations, named entities.",
    "3.2": "Resolution needs sentence-level cues: related words, syntax, or an earlier mention.",
    "3.3": "Cues narrow the meaning down without identifying the word.",
    "4.1": "Several candidate words fit, or the single candidate stays uncertain.",
    "4.2": "The reader sees an error but cannot solve it.",
    "4.3": "Nothing looks wrong: a fitting substitution or an invisible deletion.",
}

# Subtypes the rule cascade may emit as decided; everything else requires a
# human, and human annotators may additionally pick 3.3 and 4.1.
AUTO_DECIDABLE_SUBTYPES = frozenset({"1.1", "1.2", "2.1", "2.2", "4.3"})

DEFAULT_LEX_THRESHOLD = 0.75
CONTEXT_WINDOW = 5


class ClassifierError(ValueError):
    """Raised for invalid candidates or missing classifier inputs."""


def validate_label(category: str, subtype: str) -> None:
    if subtype not in SUBTYPE_CATEGORY:
        raise ClassifierError(f"unknown subtype {subtype!r}")
    if SUBTYPE_CATEGORY[subtype] != category:
        raise ClassifierError(
            f"subtype {subtype} belongs to {SUBTYPE_CATEGORY[subtype]}, not {category}"
        )


@dataclass(frozen=True)
class ContextWindow:
    ref_before: tuple[str, ...]
    ref_after: tuple[str, ...]
    hyp_before: tuple[str, ...]
    hyp_after: tuple[str, ...]

    def all_words(self) -> tuple[str, ...]:
        return self.ref_before + self.ref_after + self.hyp_before + self.hyp_after

    def to_dict(self) -> dict:
        return {
            "ref_before": list(self.ref_before),
            "ref_after": list(self.ref_after),
            "hyp_before": list(self.hyp_before),
            "hyp_after": list(self.hyp_after),
        }

    @classmethod
    def from_dict(cls, d: dict) -> "ContextWindow":
        return cls(
            ref_before=tuple(d["ref_before"]),
            ref_after=tuple(d["ref_after"]),
            hyp_before=tuple(d["hyp_before"]),
            hyp_after=tuple(d["hyp_after"]),
        )


@dataclass(frozen=True)
class ErrorCandidate:
    """One reference content word covered by a non-match segment."""

    utterance_id: str
    system_id: str
    ref_index: int
    ref_word: str
    ref_surface: str
    hyp_words: tuple[str, ...]
    hyp_indices: tuple[int, ...]
    # Hypothesis position of the aligned span; for deletions, where the
    # missing word would sit (used by the UI to place the gap marker).
    hyp_gap_index: int
    segment_kind: str
    pos: str
    proper_noun: bool
    segment_ref_words: tuple[str, ...]
    context: ContextWindow

    @property
    def key(self) -> tuple[str, str, int]:
        return (self.utterance_id, self.system_id, self.ref_index)


@dataclass(frozen=True)
class CategorySuggestion:
    category: str
    subtype: str
    decided: bool
    rationale: str
    confidence: float

    def __post_init__(self) -> None:
        validate_label(self.category, self.subtype)
        if not 0.0 <= self.confidence <= 1.0:
            raise ClassifierError(f"confidence out of range: {self.confidence}")


@dataclass(frozen=True)
class Suggestion:
    """A classified candidate as stored in the suggestions file."""

    candidate: ErrorCandidate
    suggestion: CategorySuggestion

    @property
    def key(self) -> tuple[str, str, int]:
        return self.candidate.key

    def to_dict(self) -> dict:
        c, s = self.candidate, self.suggestion
        return {
            "utterance_id": c.utterance_id,
            "system_id": c.system_id,
            "ref_index": c.ref_index,
            "category": s.category,
            "subtype": s.subtype,
            "decided": s.decided,
            "confidence": s.confidence,
            "rationale": s.rationale,
            "ref_word": c.ref_word,
            "ref_surface": c.ref_surface,
            "hyp_words": list(c.hyp_words),
            "hyp_indices": list(c.hyp_indices),
            "hyp_gap_index": c.hyp_gap_index,
            "segment_kind": c.segment_kind,
            "pos": c.pos,
            "proper_noun": c.proper_noun,
            "segment_ref_words": list(c.segment_ref_words),
            "context": c.context.to_dict(),
        }

    @classmethod
    def from_dict(cls, d: dict) -> "Suggestion":
        return cls(
            candidate=ErrorCandidate(
                utterance_id=d["utterance_id"],
                system_id=d["system_id"],
                ref_index=int(d["ref_index"]),
                ref_word=d["ref_word"],
                ref_surface=d["ref_surface"],
                hyp_words=tuple(d["hyp_words"]),
                hyp_indices=tuple(d["hyp_indices"]),
                hyp_gap_index=int(d["hyp_gap_index"]),
                segment_kind=d["segment_kind"],
                pos=d["pos"],
                proper_noun=bool(d["proper_noun"]),
                segment_ref_words=tuple(d["segment_ref_words"]),
                context=ContextWindow.from_dict(d["context"]),
            ),
            suggestion=CategorySuggestion(
                category=d["category"],
                subtype=d["subtype"],
                decided=bool(d["decided"]),
                rationale=d["rationale"],
                confidence=float(d["confidence"]),
            ),
        )


@dataclass
class ExtractionResult:
    candidates: list[ErrorCandidate]
    total_content_words: int
    correct: int
    content_insertions: list[tuple[int, str]] = field(default_factory=list)


def _window(words: Sequence[str], lo: int, hi: int) -> tuple[tuple[str, ...], tuple[str, ...]]:
    before = tuple(words[max(0, lo - CONTEXT_WINDOW) : lo])
    after = tuple(words[hi : hi + CONTEXT_WINDOW])
    return before, after


def extract_candidates(
    alignment: AlignmentResult,
    ref_tokens: Sequence[Token],
    hyp_tokens: Sequence[Token],
    lexicon: Lexicon,
    utterance_id: str,
    system_id: str,
) -> ExtractionResult:
    """Candidates plus content-word bookkeeping for one (utterance, system).

    Reference content words in match segments count as correct; each one in
    a non-match segment yields a candidate.  Hypothesis-only insertions of
    content words are recorded as side observations, never candidates.
    """
    ref_words = alignment.ref_words
    hyp_words = alignment.hyp_words
    result = ExtractionResult(candidates=[], total_content_words=0, correct=0)
    hyp_cursor = 0  # hypothesis position of the next segment (gap position)
    for seg in alignment.segments:
        seg_hyp_pos = seg.hyp_span[0] if seg.hyp_span else hyp_cursor
        if seg.hyp_span:
            hyp_cursor = seg.hyp_span[-1] + 1
        if seg.kind == "insertion":
            for j in seg.hyp_span:
                is_content, _ = lexicon.is_content_word(hyp_tokens[j])
                if is_content:
                    result.content_insertions.append((j, hyp_words[j]))
            continue
        for i in seg.ref_span:
            token = ref_tokens[i]
            is_content, pos = lexicon.is_content_word(token)
            if not is_content:
                continue
            result.total_content_words += 1
            if seg.kind == MATCH:
                result.correct += 1
                continue
            hyp_lo = seg.hyp_span[0] if seg.hyp_span else seg_hyp_pos
            hyp_hi = seg.hyp_span[-1] + 1 if seg.hyp_span else hyp_lo
            ref_before, ref_after = _window(ref_words, i, i + 1)
            hyp_before, hyp_after = _window(hyp_words, hyp_lo, hyp_hi)
            result.candidates.append(
                ErrorCandidate(
                    utterance_id=utterance_id,
                    system_id=system_id,
                    ref_index=i,
                    ref_word=token.normalized,
                    ref_surface=token.surface,
                    hyp_words=tuple(hyp_words[j] for j in seg.hyp_span),
                    hyp_indices=seg.hyp_span,
                    hyp_gap_index=seg_hyp_pos,
                    segment_kind=seg.kind,
                    pos=pos or "noun",
                    proper_noun=lexicon.is_proper_noun(token),
                    segment_ref_words=tuple(ref_words[j] for j in seg.ref_span),
                    context=ContextWindow(ref_before, ref_after, hyp_before, hyp_after),
                )
            )
    return result


def _lexicon_neighbors(lexicon: Lexicon, word: str, cap: int = 4) -> int:
    """Count of lexicon forms within edit distance 1 of the word, capped."""
    count = 0
    for form in lexicon.forms():
        if form != word and abs(len(form) - len(word)) <= 1 and levenshtein(form, word) <= 1:
            count += 1
            if count >= cap:
                break
    return count


def _undecided_confidence(
    candidate: ErrorCandidate, lexicon: Lexicon
) -> float:
    sim = (
        char_similarity(candidate.ref_word, "".join(candidate.hyp_words))
        if candidate.hyp_words
        else 0.0
    )
    neighbors = max(
        (_lexicon_neighbors(lexicon, w) for w in candidate.hyp_words), default=0
    )
    return round(min(0.95, 0.15 + 0.6 * sim + 0.05 * neighbors), 4)


def _gram_match(
    candidate: ErrorCandidate,
    tables: dict[str, tuple[str, ...]] | None,
    pos_list: list[str],
) -> tuple[str, str, str, str] | None:
    """First (pos, stem, ref_inflection, hyp_inflection) with equal stems."""
    hyp = candidate.hyp_words[0]
    for pos in pos_list:
        for rd in decompose(candidate.ref_word, pos, tables):
            for hd in decompose(hyp, pos, tables):
                if rd.stem == hd.stem and rd.inflection != hd.inflection:
                    return pos, rd.stem, rd.inflection, hd.inflection
    return None


def classify(
    candidate: ErrorCandidate,
    lexicon: Lexicon,
    suffix_tables: dict[str, tuple[str, ...]] | None = None,
    split_threshold: float = DEFAULT_SPLIT_THRESHOLD,
    lex_threshold: float = DEFAULT_LEX_THRESHOLD,
) -> CategorySuggestion:
    """Apply the rule cascade to one candidate; first matching rule wins.

    Conclusive rules: equal stems with differing tabled inflections (Gram),
    near-identity segmentation groups (Lex 1.2), near-identity stems with
    equal inflections (Lex 1.1, except proper nouns), and deletions leaving
    no orphaned function word (Fail 4.3).  Everything else is an undecided
    suggestion for the adjudication queue.
    """
    pos_list = lexicon.content_pos(candidate.ref_word)
    if not pos_list:
        if candidate.proper_noun or (
            not lexicon.lookup(candidate.ref_word) and candidate.pos in ("noun",)
        ):
            pos_list = ["noun"]
        else:
            raise ClassifierError(
                f"not a candidate: {candidate.ref_word!r} is not a content word"
            )

    single_hyp = candidate.hyp_words[0] if len(candidate.hyp_words) == 1 else None

    # Inflection-only error: shared stem, differing suffixes from the table.
    if candidate.segment_kind == SUBSTITUTION and single_hyp is not None:
        gram = _gram_match(candidate, suffix_tables, pos_list)
        if gram is not None:
            pos, stem, ref_infl, hyp_infl = gram
            subtype = "2.1" if pos == "verb" else "2.2"
            return CategorySuggestion(
                category="Gram",
                subtype=subtype,
                decided=True,
                rationale=(
                    f"shared {pos} stem '{stem}': ending "
                    f"'{hyp_infl or '-'}' for '{ref_infl or '-'}'"
                ),
                confidence=1.0,
            )

    # Segmentation error: the pieces concatenate back to the word.
    if candidate.segment_kind in ("split", "merge"):
        similarity = char_similarity(
            "".join(candidate.segment_ref_words), "".join(candidate.hyp_words)
        )
        if similarity >= split_threshold:
            return CategorySuggestion(
                category="Lex",
                subtype="1.2",
                decided=True,
                rationale=(
                    f"{candidate.segment_kind}: '{' '.join(candidate.hyp_words)}' "
                    f"reassembles to '{' '.join(candidate.segment_ref_words)}' "
                    f"(similarity {similarity:.2f})"
                ),
                confidence=1.0,
            )

    # Stem misspelling: out-of-lexicon word close to the reference stem.
    if (
        candidate.segment_kind == SUBSTITUTION
        and single_hyp is not None
        and not lexicon.lookup(single_hyp)
    ):
        best: tuple[float, str, str] | None = None
        for pos in pos_list:
            for rd in decompose(candidate.ref_word, pos, suffix_tables):
                for hd in decompose(single_hyp, pos, suffix_tables):
                    if rd.inflection != hd.inflection:
                        continue
                    sim = char_similarity(rd.stem, hd.stem)
                    if best is None or sim > best[0]:
                        best = (sim, rd.stem, hd.stem)
        if best is not None and best[0] >= lex_threshold:
            if candidate.proper_noun:
                return CategorySuggestion(
                    category="Cotx",
                    subtype="3.1",
                    decided=False,
                    rationale=(
                        f"named entity: '{single_hyp}' distorts the proper noun "
                        f"'{candidate.ref_word}' (stem similarity {best[0]:.2f})"
                    ),
                    confidence=_undecided_confidence(candidate, lexicon),
                )
            return CategorySuggestion(
                category="Lex",
                subtype="1.1",
                decided=True,
                rationale=(
                    f"unknown word with intact ending: stem '{best[2]}' ~ "
                    f"'{best[1]}' (similarity {best[0]:.2f})"
                ),
                confidence=1.0,
            )

    # Deletion: invisible if no orphaned function word stays adjacent.
    if not candidate.hyp_words:
        orphans = [
            w
            for w in (
                candidate.context.ref_before[-1:] + candidate.context.ref_after[:1]
            )
            if lexicon.has_orphaning_function(w)
        ]
        if orphans:
            return CategorySuggestion(
                category="Fail",
                subtype="4.2",
                decided=False,
                rationale=(
                    f"deletion leaves '{orphans[0]}' without its head word; "
                    "the gap is visible but may not be recoverable"
                ),
                confidence=_undecided_confidence(candidate, lexicon),
            )
        return CategorySuggestion(
            category="Fail",
            subtype="4.3",
            decided=True,
            rationale=(
                f"deleted '{candidate.ref_word}' leaves no orphaned function "
                "word: the gap reads fluently"
            ),
            confidence=1.0,
        )

    # Real-word substitution: fits only if a human confirms the context.
    if single_hyp is not None and lexicon.content_entries(single_hyp):
        ref_lemmas = lexicon.content_lemmas(candidate.ref_word) or {candidate.ref_word}
        hyp_lemmas = lexicon.content_lemmas(single_hyp)
        if not (ref_lemmas & hyp_lemmas):
            return CategorySuggestion(
                category="Fail",
                subtype="4.3",
                decided=False,
                rationale=(
                    f"'{single_hyp}' is a real word unrelated to "
                    f"'{candidate.ref_word}'; confirm whether it fits the context"
                ),
                confidence=_undecided_confidence(candidate, lexicon),
            )

    # Context-dependent residue.
    context_words = candidate.context.all_words()
    ref_folded = fold_diacritics(candidate.ref_word)
    if any(fold_diacritics(w) == ref_folded for w in context_words):
        return CategorySuggestion(
            category="Cotx",
            subtype="3.2",
            decided=False,
            rationale=(
                f"anaphora cue: '{candidate.ref_word}' also occurs nearby and "
                "may resolve the error"
            ),
            confidence=_undecided_confidence(candidate, lexicon),
        )
    if candidate.proper_noun:
        return CategorySuggestion(
            category="Cotx",
            subtype="3.1",
            decided=False,
            rationale=(
                f"named entity '{candidate.ref_word}': local context may "
                "identify it"
            ),
            confidence=_undecided_confidence(candidate, lexicon),
        )
    return CategorySuggestion(
        category="Cotx",
        subtype="3.2",
        decided=False,
        rationale=(
            f"no conclusive rule for '{' '.join(candidate.hyp_words) or '-'}' vs "
            f"'{candidate.ref_word}': check lexical-field or syntactic cues"
        ),
        confidence=_undecided_confidence(candidate, lexicon),
    )


@dataclass
class SystemTally:
    total_content_words: int = 0
    correct: int = 0
    content_insertions: int = 0


@dataclass
class BatchResult:
    suggestions: list[Suggestion]
    tallies: dict[str, SystemTally]

    @property
    def decided_count(self) -> int:
        return sum(1 for s in self.suggestions if s.suggestion.decided)

    @property
    def undecided_count(self) -> int:
        return sum(1 for s in self.suggestions if not s.suggestion.decided)


def batch_preclassify(
    corpus: Corpus,
    alignments: Mapping[tuple[str, str], AlignmentResult],
    lexicon: Lexicon,
    suffix_tables: dict[str, tuple[str, ...]] | None = None,
    split_threshold: float = DEFAULT_SPLIT_THRESHOLD,
    lex_threshold: float = DEFAULT_LEX_THRESHOLD,
) -> BatchResult:
    """Classify every candidate in the corpus, in deterministic order.

    Order is corpus utterance order, then system id, then reference index,
    so the resulting file is byte-identical across runs.
    """
    suggestions: list[Suggestion] = []
    tallies: dict[str, SystemTally] = {}
    for utt_id, sys_id in corpus.pairs():
        if (utt_id, sys_id) not in alignments:
            raise ClassifierError(
                f"missing alignment for utterance {utt_id!r}, system {sys_id!r}"
            )
        extraction = extract_candidates(
            alignments[(utt_id, sys_id)],
            corpus.ref_tokens(utt_id),
            corpus.hyp_tokens(utt_id, sys_id),
            lexicon,
            utt_id,
            sys_id,
        )
        tally = tallies.setdefault(sys_id, SystemTally())
        tally.total_content_words += extraction.total_content_words
        tally.correct += extraction.correct
        tally.content_insertions += len(extraction.content_insertions)
        for candidate in sorted(extraction.candidates, key=lambda c: c.ref_index):
            suggestions.append(
                Suggestion(
                    candidate=candidate,
                    suggestion=classify(
                        candidate,
                        lexicon,
                        suffix_tables,
                        split_threshold=split_threshold,
                        lex_threshold=lex_threshold,
                    ),
                )
            )
    return BatchResult(suggestions=suggestions, tallies=tallies)


def write_suggestions(result: BatchResult, path: str | Path) -> None:
    """Write the suggestions JSONL plus its ``<path>.meta.json`` sidecar."""
    path = Path(path)
    with open(path, "w", encoding="utf-8") as fh:
        for s in result.suggestions:
            fh.write(json.dumps(s.to_dict(), ensure_ascii=False) + "\n")
    meta = {
        "systems": {
            sys_id: {
                "total_content_words": tally.total_content_words,
                "correct": tally.correct,
                "content_insertions": tally.content_insertions,
            }
            for sys_id, tally in sorted(result.tallies.items())
        }
    }
    with open(meta_path(path), "w", encoding="utf-8") as fh:
        json.dump(meta, fh, ensure_ascii=False, indent=2, sort_keys=True)
        fh.write("\n")


def meta_path(suggestions_path: str | Path) -> Path:
    return Path(str(suggestions_path) + ".meta.json")


def read_suggestions(path: str | Path) -> list[Suggestion]:
    out: list[Suggestion] = []
    with open(path, encoding="utf-8") as fh:
        for lineno, line in enumerate(fh, start=1):
            if not line.strip():
                continue
            try:
                out.append(Suggestion.from_dict(json.loads(line)))
            except (json.JSONDecodeError, KeyError, ClassifierError) as exc:
                raise ClassifierError(f"{path}:{lineno}: bad suggestion line ({exc})") from exc
    return out


def read_meta(suggestions_path: str | Path) -> dict:
    p = meta_path(suggestions_path)
    if not p.is_file():
        return {"systems": {}}
    with open(p, encoding="utf-8") as fh:
        return json.load(fh)
