"""Transcript corpus: ingestion, normalization and tokenization.

A corpus holds one reference transcript per utterance and any number of
system hypotheses per utterance.  Both sides are tokenized with the same
conventions so that token indices are stable across the whole pipeline:
lowercasing, terminal punctuation stripping, French elision splitting
("l'équilibre" -> "l'" + "équilibre"), and per-token diacritic folding.
"""

from __future__ import annotations

import json
import re
import unicodedata
from dataclasses import dataclass, field
from pathlib import Path
from typing import Iterable, Iterator


class CorpusError(ValueError):
    """Raised for malformed corpus files or integrity violations."""


# Clitics that elide before a vowel; a token starting with one of these is
# split into clitic + host.  Order matters: the longest prefix wins.
ELISION_CLITICS = ("qu'", "c'", "d'", "j'", "l'", "m'", "n'", "s'", "t'")

# Typographic apostrophe variants folded to the plain one for matching.
_APOSTROPHES = {"’": "'", "ʼ": "'"}

_CHUNK_RE = re.compile(r"\S+")


def _fold_apostrophes(s: str) -> str:
    for variant, plain in _APOSTROPHES.items():
        s = s.replace(variant, plain)
    return s


def fold_diacritics(s: str) -> str:
    """Strip combining marks: "pâtie" -> "patie", "leçon" -> "lecon"."""
    decomposed = unicodedata.normalize("NFD", s)
    stripped = "".join(c for c in decomposed if not unicodedata.combining(c))
    return unicodedata.normalize("NFC", stripped)


@dataclass(frozen=True)
class Token:
    """One word token with its raw surface and matching forms.

    ``surface`` is the exact substring of the raw text (edge punctuation
    included), so joining surfaces restores the input up to whitespace.
    ``normalized`` is the lowercased, punctuation-stripped form used for
    alignment and lexicon lookup; ``diacritic_free`` additionally folds
    accents and is what split/merge detection compares.
    """

    surface: str
    normalized: str
    start: int
    end: int
    diacritic_free: str

    @property
    def char_span(self) -> tuple[int, int]:
        return (self.start, self.end)

    def first_alpha_is_upper(self) -> bool:
        for c in self.surface:
            if c.isalpha():
                return c.isupper()
        return False


def _is_wordlike(s: str) -> bool:
    return any(c.isalnum() for c in s)


def _core_bounds(chunk: str) -> tuple[int, int]:
    """Indices of the chunk core once edge punctuation is removed.

    Apostrophes and hyphens are kept: they are word-internal in French
    ("porte-parole") or clitic-final ("l'").
    """
    lo, hi = 0, len(chunk)
    folded = _fold_apostrophes(chunk)

    def is_edge_punct(c: str) -> bool:
        return not (c.isalnum() or c in "'-")

    while lo < hi and is_edge_punct(folded[lo]):
        lo += 1
    while hi > lo and is_edge_punct(folded[hi - 1]):
        hi -= 1
    return lo, hi


def _normalize_core(core: str) -> str:
    return _fold_apostrophes(core).lower()


def _make_token(surface: str, start: int, core: str) -> Token:
    normalized = _normalize_core(core)
    return Token(
        surface=surface,
        normalized=normalized,
        start=start,
        end=start + len(surface),
        diacritic_free=fold_diacritics(normalized),
    )


def tokenize(text: str) -> list[Token]:
    """Tokenize raw transcript text.

    Whitespace-separated chunks become tokens; chunks with no alphanumeric
    core (stray punctuation) are dropped.  A chunk whose core starts with an
    elision clitic yields two tokens, clitic first, covering adjacent char
    spans.  Tokenization is idempotent: re-tokenizing the joined surfaces
    reproduces the same token sequence.
    """
    tokens: list[Token] = []
    for m in _CHUNK_RE.finditer(text):
        chunk, start = m.group(), m.start()
        lo, hi = _core_bounds(chunk)
        core = chunk[lo:hi]
        if not _is_wordlike(core):
            continue
        lowered = _normalize_core(core)
        clitic = next(
            (
                p
                for p in ELISION_CLITICS
                if lowered.startswith(p) and len(lowered) > len(p)
            ),
            None,
        )
        if clitic is None:
            tokens.append(_make_token(chunk, start, core))
            continue
        cut = lo + len(clitic)
        host_chunk = chunk[cut:]
        h_lo, h_hi = _core_bounds(host_chunk)
        host_core = host_chunk[h_lo:h_hi]
        if not _is_wordlike(host_core):
            tokens.append(_make_token(chunk, start, core))
            continue
        tokens.append(_make_token(chunk[:cut], start, chunk[lo:cut]))
        tokens.append(_make_token(host_chunk, start + cut, host_core))
    return tokens


@dataclass(frozen=True)
class Utterance:
    utterance_id: str
    broadcast_id: str
    reference_text: str


@dataclass(frozen=True)
class Hypothesis:
    utterance_id: str
    system_id: str
    hypothesis_text: str


class Corpus:
    """Immutable set of reference utterances plus per-system hypotheses.

    Tokenizations are computed once at construction; the object is safe for
    concurrent reads.
    """

    def __init__(
        self, utterances: Iterable[Utterance], hypotheses: Iterable[Hypothesis]
    ) -> None:
        self._utterances: dict[str, Utterance] = {}
        for utt in utterances:
            if utt.utterance_id in self._utterances:
                raise CorpusError(f"duplicate utterance_id {utt.utterance_id!r}")
            self._utterances[utt.utterance_id] = utt
        self._hypotheses: dict[tuple[str, str], Hypothesis] = {}
        for hyp in hypotheses:
            if hyp.utterance_id not in self._utterances:
                raise CorpusError(
                    f"hypothesis for unknown utterance {hyp.utterance_id!r} "
                    f"(system {hyp.system_id!r})"
                )
            key = (hyp.utterance_id, hyp.system_id)
            if key in self._hypotheses:
                raise CorpusError(
                    f"duplicate hypothesis for utterance {key[0]!r}, system {key[1]!r}"
                )
            self._hypotheses[key] = hyp
        self._ref_tokens: dict[str, list[Token]] = {}
        for utt_id, utt in self._utterances.items():
            toks = tokenize(utt.reference_text)
            if not toks:
                raise CorpusError(
                    f"reference for utterance {utt_id!r} is empty after normalization"
                )
            self._ref_tokens[utt_id] = toks
        self._hyp_tokens: dict[tuple[str, str], list[Token]] = {
            key: tokenize(hyp.hypothesis_text)
            for key, hyp in self._hypotheses.items()
        }

    @property
    def utterance_ids(self) -> list[str]:
        return list(self._utterances)

    @property
    def systems(self) -> list[str]:
        return sorted({sys for _, sys in self._hypotheses})

    def utterance(self, utterance_id: str) -> Utterance:
        return self._utterances[utterance_id]

    def hypothesis(self, utterance_id: str, system_id: str) -> Hypothesis:
        return self._hypotheses[(utterance_id, system_id)]

    def has_hypothesis(self, utterance_id: str, system_id: str) -> bool:
        return (utterance_id, system_id) in self._hypotheses

    def ref_tokens(self, utterance_id: str) -> list[Token]:
        return self._ref_tokens[utterance_id]

    def hyp_tokens(self, utterance_id: str, system_id: str) -> list[Token]:
        return self._hyp_tokens[(utterance_id, system_id)]

    def pairs(self) -> Iterator[tuple[str, str]]:
        """(utterance_id, system_id) pairs, utterance order then system order."""
        systems = self.systems
        for utt_id in self._utterances:
            for sys_id in systems:
                if (utt_id, sys_id) in self._hypotheses:
                    yield (utt_id, sys_id)


def _read_jsonl(path: Path, required: tuple[str, ...]) -> Iterator[tuple[int, dict]]:
    with open(path, encoding="utf-8") as fh:
        for lineno, line in enumerate(fh, start=1):
            if not line.strip():
                continue
            try:
                obj = json.loads(line)
            except json.JSONDecodeError as exc:
                raise CorpusError(f"{path}:{lineno}: malformed JSON ({exc.msg})") from exc
            if not isinstance(obj, dict):
                raise CorpusError(f"{path}:{lineno}: expected a JSON object")
            for key in required:
                if key not in obj or not isinstance(obj[key], str):
                    raise CorpusError(f"{path}:{lineno}: missing string field {key!r}")
            yield lineno, obj


def load_corpus(ref_path: str | Path, hyp_paths: Iterable[str | Path]) -> Corpus:
    """Load a corpus from a reference JSONL file and hypothesis JSONL files.

    Reference lines: ``{"utterance_id", "broadcast_id", "reference"}``.
    Hypothesis lines: ``{"utterance_id", "system_id", "hypothesis"}``.
    Integrity errors (duplicates, unknown utterances, empty references) are
    reported with the offending file and id.
    """
    ref_path = Path(ref_path)
    utterances = [
        Utterance(obj["utterance_id"], obj["broadcast_id"], obj["reference"])
        for _, obj in _read_jsonl(ref_path, ("utterance_id", "broadcast_id", "reference"))
    ]
    hypotheses: list[Hypothesis] = []
    for hp in hyp_paths:
        hypotheses.extend(
            Hypothesis(obj["utterance_id"], obj["system_id"], obj["hypothesis"])
            for _, obj in _read_jsonl(Path(hp), ("utterance_id", "system_id", "hypothesis"))
        )
    return Corpus(utterances, hypotheses)


REFERENCE_FILE = "reference.jsonl"
HYPOTHESES_FILE = "hypotheses.jsonl"


def save_corpus(corpus: Corpus, out_dir: str | Path) -> None:
    """Write a corpus directory (reference.jsonl + hypotheses.jsonl)."""
    out = Path(out_dir)
    out.mkdir(parents=True, exist_ok=True)
    with open(out / REFERENCE_FILE, "w", encoding="utf-8") as fh:
        for utt_id in corpus.utterance_ids:
            utt = corpus.utterance(utt_id)
            fh.write(
                json.dumps(
                    {
                        "utterance_id": utt.utterance_id,
                        "broadcast_id": utt.broadcast_id,
                        "reference": utt.reference_text,
                    },
                    ensure_ascii=False,
                )
                + "\n"
            )
    with open(out / HYPOTHESES_FILE, "w", encoding="utf-8") as fh:
        for utt_id, sys_id in corpus.pairs():
            hyp = corpus.hypothesis(utt_id, sys_id)
            fh.write(
                json.dumps(
                    {
                        "utterance_id": hyp.utterance_id,
                        "system_id": hyp.system_id,
                        "hypothesis": hyp.hypothesis_text,
                    },
                    ensure_ascii=False,
                )
                + "\n"
            )


def load_corpus_dir(corpus_dir: str | Path) -> Corpus:
    """Load a corpus directory produced by :func:`save_corpus`."""
    d = Path(corpus_dir)
    ref = d / REFERENCE_FILE
    hyp = d / HYPOTHESES_FILE
    if not ref.is_file():
        raise CorpusError(f"not a corpus directory (missing {REFERENCE_FILE}): {d}")
    hyp_paths = [hyp] if hyp.is_file() else []
    return load_corpus(ref, hyp_paths)
