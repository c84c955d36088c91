"""Reference/hypothesis token alignment, split/merge detection, WER and CER.

The aligner is a conventional weighted edit-distance construction over
normalized token forms.  Substitution cost shrinks with character-level
similarity so misspellings stay aligned to their reference word instead of
drifting to a neighbor; reported WER is computed separately with unit costs
so it stays the standard (S+D+I)/N.  Tie-breaking is deterministic
(substitution-preferring, edits surfacing leftmost) so token indices are
stable across runs.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Sequence

from .corpus import Token, fold_diacritics, tokenize


class AlignmentError(ValueError):
    """Raised for undefined rates (empty reference, non-empty hypothesis)."""


MATCH = "match"
SUBSTITUTION = "substitution"
DELETION = "deletion"
INSERTION = "insertion"
SPLIT = "split"
MERGE = "merge"

# Substitution cost is mapped into [floor, 1] so it never ties with a match
# and never beats one; insertions and deletions cost 1.
SUBSTITUTION_COST_FLOOR = 0.1

DEFAULT_SPLIT_THRESHOLD = 0.8


def levenshtein(a: str, b: str) -> int:
    """Plain character edit distance (unit costs)."""
    if a == b:
        return 0
    if not a:
        return len(b)
    if not b:
        return len(a)
    prev = list(range(len(b) + 1))
    for i, ca in enumerate(a, start=1):
        curr = [i]
        for j, cb in enumerate(b, start=1):
            curr.append(
                min(prev[j] + 1, curr[j - 1] + 1, prev[j - 1] + (ca != cb))
            )
        prev = curr
    return prev[len(b)]


def char_similarity(a: str, b: str) -> float:
    """Similarity in [0, 1] between diacritic-folded strings.

    1 - levenshtein(fold(a), fold(b)) / max(len, len); two empty strings
    are identical (1.0).
    """
    fa, fb = fold_diacritics(a), fold_diacritics(b)
    longest = max(len(fa), len(fb))
    if longest == 0:
        return 1.0
    return 1.0 - levenshtein(fa, fb) / longest


def _substitution_cost(similarity: float) -> float:
    return 1.0 - (1.0 - SUBSTITUTION_COST_FLOOR) * similarity


@dataclass(frozen=True)
class AlignmentSegment:
    """One aligned group: ref_span and hyp_span are contiguous token indices.

    match/substitution pair one token with one; deletion has an empty
    hyp_span, insertion an empty ref_span; split is 1 ref to 2+ hyp tokens,
    merge 2+ ref to 1 hyp.
    """

    kind: str
    ref_span: tuple[int, ...]
    hyp_span: tuple[int, ...]
    similarity: float

    def to_dict(self) -> dict:
        return {
            "kind": self.kind,
            "ref_span": list(self.ref_span),
            "hyp_span": list(self.hyp_span),
            "similarity": round(self.similarity, 4),
        }

    @classmethod
    def from_dict(cls, d: dict) -> "AlignmentSegment":
        return cls(
            kind=d["kind"],
            ref_span=tuple(d["ref_span"]),
            hyp_span=tuple(d["hyp_span"]),
            similarity=float(d["similarity"]),
        )


@dataclass(frozen=True)
class EditCounts:
    substitutions: int
    deletions: int
    insertions: int

    @property
    def total(self) -> int:
        return self.substitutions + self.deletions + self.insertions

    def to_dict(self) -> dict:
        return {
            "substitutions": self.substitutions,
            "deletions": self.deletions,
            "insertions": self.insertions,
        }


@dataclass(frozen=True)
class AlignmentResult:
    """Ordered segments partitioning both token sequences, plus edit counts.

    ``edit_counts`` always reflect the per-token alignment (a split that was
    collapsed by the post-pass still counts as its original substitution and
    insertions).
    """

    segments: tuple[AlignmentSegment, ...]
    edit_counts: EditCounts
    ref_words: tuple[str, ...]
    hyp_words: tuple[str, ...]

    def to_dict(self) -> dict:
        return {
            "segments": [s.to_dict() for s in self.segments],
            "edit_counts": self.edit_counts.to_dict(),
            "ref_words": list(self.ref_words),
            "hyp_words": list(self.hyp_words),
        }

    @classmethod
    def from_dict(cls, d: dict) -> "AlignmentResult":
        ec = d["edit_counts"]
        return cls(
            segments=tuple(AlignmentSegment.from_dict(s) for s in d["segments"]),
            edit_counts=EditCounts(
                ec["substitutions"], ec["deletions"], ec["insertions"]
            ),
            ref_words=tuple(d["ref_words"]),
            hyp_words=tuple(d["hyp_words"]),
        )


def _normalized_forms(tokens: Sequence[Token | str]) -> list[str]:
    return [t.normalized if isinstance(t, Token) else str(t) for t in tokens]


def _backtrack_ops(
    ref: list[str], hyp: list[str], costs: list[list[float]]
) -> list[tuple[str, int, int]]:
    """Ops in forward order; preference diag > deletion > insertion on ties."""
    ops: list[tuple[str, int, int]] = []
    i, j = len(ref), len(hyp)
    while i > 0 or j > 0:
        here = costs[i][j]
        if i > 0 and j > 0:
            if ref[i - 1] == hyp[j - 1] and here == costs[i - 1][j - 1]:
                ops.append((MATCH, i - 1, j - 1))
                i, j = i - 1, j - 1
                continue
            sub = costs[i - 1][j - 1] + _substitution_cost(
                char_similarity(ref[i - 1], hyp[j - 1])
            )
            if ref[i - 1] != hyp[j - 1] and here == sub:
                ops.append((SUBSTITUTION, i - 1, j - 1))
                i, j = i - 1, j - 1
                continue
        if i > 0 and here == costs[i - 1][j] + 1.0:
            ops.append((DELETION, i - 1, -1))
            i -= 1
            continue
        ops.append((INSERTION, -1, j - 1))
        j -= 1
    ops.reverse()
    return ops


def align(
    ref_tokens: Sequence[Token | str], hyp_tokens: Sequence[Token | str]
) -> AlignmentResult:
    """Optimal monotone alignment under similarity-weighted costs.

    Costs: match 0, insertion/deletion 1, substitution
    1 - 0.9 * char_similarity (so always in (0, 1]).  Either sequence may
    be empty.  Returns per-token segments; run
    :func:`detect_splits_merges` afterwards to group segmentation errors.
    """
    ref = _normalized_forms(ref_tokens)
    hyp = _normalized_forms(hyp_tokens)
    n, m = len(ref), len(hyp)
    costs = [[0.0] * (m + 1) for _ in range(n + 1)]
    for i in range(1, n + 1):
        costs[i][0] = float(i)
    for j in range(1, m + 1):
        costs[0][j] = float(j)
    for i in range(1, n + 1):
        for j in range(1, m + 1):
            if ref[i - 1] == hyp[j - 1]:
                diag = costs[i - 1][j - 1]
            else:
                diag = costs[i - 1][j - 1] + _substitution_cost(
                    char_similarity(ref[i - 1], hyp[j - 1])
                )
            costs[i][j] = min(diag, costs[i - 1][j] + 1.0, costs[i][j - 1] + 1.0)

    segments: list[AlignmentSegment] = []
    n_sub = n_del = n_ins = 0
    for op, i, j in _backtrack_ops(ref, hyp, costs):
        if op == MATCH:
            segments.append(AlignmentSegment(MATCH, (i,), (j,), 1.0))
        elif op == SUBSTITUTION:
            n_sub += 1
            segments.append(
                AlignmentSegment(
                    SUBSTITUTION, (i,), (j,), char_similarity(ref[i], hyp[j])
                )
            )
        elif op == DELETION:
            n_del += 1
            segments.append(AlignmentSegment(DELETION, (i,), (), 0.0))
        else:
            n_ins += 1
            segments.append(AlignmentSegment(INSERTION, (), (j,), 0.0))
    return AlignmentResult(
        segments=tuple(segments),
        edit_counts=EditCounts(n_sub, n_del, n_ins),
        ref_words=tuple(ref),
        hyp_words=tuple(hyp),
    )


def _collapse_runs(
    result: AlignmentResult,
    run_kinds: frozenset[str],
    collapsed_kind: str,
    threshold: float,
) -> tuple[AlignmentSegment, ...]:
    segments = list(result.segments)
    out: list[AlignmentSegment] = []
    i = 0
    while i < len(segments):
        if segments[i].kind not in run_kinds:
            out.append(segments[i])
            i += 1
            continue
        j = i
        while j < len(segments) and segments[j].kind in run_kinds:
            j += 1
        run = segments[i:j]
        subs = [s for s in run if s.kind == SUBSTITUTION]
        if len(run) >= 2 and len(subs) == 1:
            ref_span = tuple(idx for s in run for idx in s.ref_span)
            hyp_span = tuple(idx for s in run for idx in s.hyp_span)
            ref_concat = "".join(result.ref_words[idx] for idx in ref_span)
            hyp_concat = "".join(result.hyp_words[idx] for idx in hyp_span)
            similarity = char_similarity(ref_concat, hyp_concat)
            if similarity >= threshold:
                out.append(
                    AlignmentSegment(collapsed_kind, ref_span, hyp_span, similarity)
                )
                i = j
                continue
        out.extend(run)
        i = j
    return tuple(out)


def detect_splits_merges(
    result: AlignmentResult, threshold: float = DEFAULT_SPLIT_THRESHOLD
) -> AlignmentResult:
    """Collapse segmentation errors into split/merge segments.

    A run of one substitution plus adjacent insertions whose hypothesis
    words concatenate to (nearly) the reference word becomes a split
    segment; symmetrically, a substitution plus adjacent deletions becomes
    a merge.  Runs below the similarity threshold, and runs containing
    several substitutions, are left unchanged.  Idempotent; edit counts are
    preserved from the per-token alignment.
    """
    with_splits = AlignmentResult(
        segments=_collapse_runs(
            result, frozenset({SUBSTITUTION, INSERTION}), SPLIT, threshold
        ),
        edit_counts=result.edit_counts,
        ref_words=result.ref_words,
        hyp_words=result.hyp_words,
    )
    return AlignmentResult(
        segments=_collapse_runs(
            with_splits, frozenset({SUBSTITUTION, DELETION}), MERGE, threshold
        ),
        edit_counts=result.edit_counts,
        ref_words=result.ref_words,
        hyp_words=result.hyp_words,
    )


def align_utterance(
    ref_tokens: Sequence[Token | str],
    hyp_tokens: Sequence[Token | str],
    split_threshold: float = DEFAULT_SPLIT_THRESHOLD,
) -> AlignmentResult:
    """align() followed by the split/merge post-pass."""
    return detect_splits_merges(align(ref_tokens, hyp_tokens), split_threshold)


def edit_stats(
    ref_tokens: Sequence[Token | str], hyp_tokens: Sequence[Token | str]
) -> EditCounts:
    """S/D/I counts of a standard unit-cost optimal alignment.

    The minimum edit total does not pin down the S/D/I decomposition (a
    substitution can trade against a deletion+insertion elsewhere at equal
    cost), so the canonical alignment maximizes matches among minimum-edit
    alignments.  That makes the triple unique, and exactly symmetric under
    argument exchange (D and I swap).
    """
    ref = _normalized_forms(ref_tokens)
    hyp = _normalized_forms(hyp_tokens)
    n, m = len(ref), len(hyp)
    # Cell value: (edits, -matches), minimized lexicographically.
    row = [(j, 0) for j in range(m + 1)]
    for i in range(1, n + 1):
        prev = row
        row = [(i, 0)] + [(0, 0)] * m
        for j in range(1, m + 1):
            eq = ref[i - 1] == hyp[j - 1]
            diag = (prev[j - 1][0] + (not eq), prev[j - 1][1] - eq)
            up = (prev[j][0] + 1, prev[j][1])
            left = (row[j - 1][0] + 1, row[j - 1][1])
            row[j] = min(diag, up, left)
    edits, neg_matches = row[m]
    matches = -neg_matches
    # With p diagonal steps and q matches: edits = n + m - p - q.
    pairs = n + m - edits - matches
    return EditCounts(
        substitutions=pairs - matches, deletions=n - pairs, insertions=m - pairs
    )


def wer(
    ref_tokens: Sequence[Token | str], hyp_tokens: Sequence[Token | str]
) -> float:
    """Word error rate (S+D+I)/N with unit costs over normalized tokens."""
    n = len(ref_tokens)
    if n == 0:
        if len(hyp_tokens) == 0:
            return 0.0
        raise AlignmentError("undefined rate: empty reference with non-empty hypothesis")
    return edit_stats(ref_tokens, hyp_tokens).total / n


def cer(ref_text: str, hyp_text: str) -> float:
    """Character error rate over normalized, space-joined token forms."""
    ref_chars = list(" ".join(t.normalized for t in tokenize(ref_text)))
    hyp_chars = list(" ".join(t.normalized for t in tokenize(hyp_text)))
    if not ref_chars:
        if not hyp_chars:
            return 0.0
        raise AlignmentError("undefined rate: empty reference with non-empty hypothesis")
    return edit_stats(ref_chars, hyp_chars).total / len(ref_chars)
