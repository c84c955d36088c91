import json

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from sevasr.corpus import (
    Corpus,
    CorpusError,
    Hypothesis,
    Utterance,
    fold_diacritics,
    load_corpus,
    load_corpus_dir,
    save_corpus,
    tokenize,
)

# French-ish alphabet for property tests: letters, accents, elision clitics,
# punctuation and whitespace, but nothing whose lower/upper round trip
# changes length.
TEXT_ALPHABET = "abcdefgjlmnoqrstuéèàçâîô '-,.?!«»:;()"
text_strategy = st.text(alphabet=TEXT_ALPHABET, max_size=60)


class TestTokenize:
    def test_elision_split(self):
        tokens = tokenize("l'équilibre")
        assert [t.surface for t in tokens] == ["l'", "équilibre"]
        assert [t.normalized for t in tokens] == ["l'", "équilibre"]

    def test_empty_input(self):
        assert tokenize("") == []

    def test_diacritic_free_forms(self):
        tokens = tokenize("la pâtie noire")
        assert len(tokens) == 3
        assert tokens[1].diacritic_free == "patie"

    def test_terminal_punctuation_stripped(self):
        (token,) = tokenize("«Bonjour»,")
        assert token.normalized == "bonjour"
        assert token.surface == "«Bonjour»,"

    def test_internal_hyphen_kept(self):
        (token,) = tokenize("porte-parole")
        assert token.normalized == "porte-parole"

    def test_punctuation_only_chunk_dropped(self):
        assert [t.normalized for t in tokenize("— oui —")] == ["oui"]

    def test_typographic_apostrophe(self):
        tokens = tokenize("d’abord")
        assert [t.normalized for t in tokens] == ["d'", "abord"]

    def test_spans_are_monotone_and_non_overlapping(self):
        text = "qu'il «dise» peut-être l'essentiel."
        tokens = tokenize(text)
        last_end = 0
        for t in tokens:
            assert t.start >= last_end
            assert t.end > t.start
            assert text[t.start : t.end] == t.surface
            last_end = t.end

    @given(text_strategy)
    @settings(max_examples=300)
    def test_round_trip_idempotence(self, text):
        tokens = tokenize(text)
        rejoined = " ".join(t.surface for t in tokens)
        again = tokenize(rejoined)
        assert [t.surface for t in again] == [t.surface for t in tokens]
        assert [t.normalized for t in again] == [t.normalized for t in tokens]

    @given(text_strategy)
    @settings(max_examples=300)
    def test_case_and_punctuation_insensitive(self, text):
        reference = [t.normalized for t in tokenize(text)]
        assert [t.normalized for t in tokenize(text.upper())] == reference
        assert [t.normalized for t in tokenize(text + " .")] == reference

    @given(text_strategy)
    @settings(max_examples=300)
    def test_normalized_never_empty(self, text):
        assert all(t.normalized for t in tokenize(text))


def test_fold_diacritics():
    assert fold_diacritics("pâtie") == "patie"
    assert fold_diacritics("leçon") == "lecon"
    assert fold_diacritics("abc") == "abc"


def _write_jsonl(path, rows):
    with open(path, "w", encoding="utf-8") as fh:
        for row in rows:
            fh.write(json.dumps(row, ensure_ascii=False) + "\n")


class TestLoadCorpus:
    def test_four_broadcasts_ten_systems(self, tmp_path):
        ref = tmp_path / "ref.jsonl"
        _write_jsonl(
            ref,
            [
                {"utterance_id": f"u{i}", "broadcast_id": f"b{i % 4}", "reference": f"mot {i}"}
                for i in range(8)
            ],
        )
        hyp_paths = []
        for s in range(10):
            hp = tmp_path / f"hyp{s}.jsonl"
            _write_jsonl(
                hp,
                [
                    {"utterance_id": f"u{i}", "system_id": f"sys{s}", "hypothesis": f"mot {i}"}
                    for i in range(8)
                ],
            )
            hyp_paths.append(hp)
        corpus = load_corpus(ref, hyp_paths)
        assert len(corpus.systems) == 10
        assert len(corpus.utterance_ids) == 8
        assert len({corpus.utterance(u).broadcast_id for u in corpus.utterance_ids}) == 4

    def test_zero_hypothesis_files_is_valid(self, tmp_path):
        ref = tmp_path / "ref.jsonl"
        _write_jsonl(ref, [{"utterance_id": "u1", "broadcast_id": "b1", "reference": "un mot"}])
        corpus = load_corpus(ref, [])
        assert corpus.systems == []

    def test_unknown_utterance_rejected(self, tmp_path):
        ref = tmp_path / "ref.jsonl"
        hyp = tmp_path / "hyp.jsonl"
        _write_jsonl(ref, [{"utterance_id": "u1", "broadcast_id": "b1", "reference": "un mot"}])
        _write_jsonl(hyp, [{"utterance_id": "u9", "system_id": "s", "hypothesis": "x"}])
        with pytest.raises(CorpusError, match="unknown utterance.*u9"):
            load_corpus(ref, [hyp])

    def test_malformed_line_reports_line_number(self, tmp_path):
        ref = tmp_path / "ref.jsonl"
        ref.write_text(
            '{"utterance_id": "u1", "broadcast_id": "b", "reference": "ok"}\nnot json\n',
            encoding="utf-8",
        )
        with pytest.raises(CorpusError, match=":2:"):
            load_corpus(ref, [])

    def test_duplicate_pair_rejected(self, tmp_path):
        ref = tmp_path / "ref.jsonl"
        hyp = tmp_path / "hyp.jsonl"
        _write_jsonl(ref, [{"utterance_id": "u1", "broadcast_id": "b1", "reference": "un mot"}])
        _write_jsonl(
            hyp,
            [
                {"utterance_id": "u1", "system_id": "s", "hypothesis": "a"},
                {"utterance_id": "u1", "system_id": "s", "hypothesis": "b"},
            ],
        )
        with pytest.raises(CorpusError, match="duplicate hypothesis"):
            load_corpus(ref, [hyp])

    def test_duplicate_utterance_rejected(self):
        with pytest.raises(CorpusError, match="duplicate utterance_id"):
            Corpus(
                [
                    Utterance("u1", "b", "un"),
                    Utterance("u1", "b", "deux"),
                ],
                [],
            )

    def test_empty_reference_rejected(self):
        with pytest.raises(CorpusError, match="empty after normalization"):
            Corpus([Utterance("u1", "b", "...")], [])

    def test_empty_hypothesis_allowed(self):
        corpus = Corpus(
            [Utterance("u1", "b", "un mot")],
            [Hypothesis("u1", "s", "")],
        )
        assert corpus.hyp_tokens("u1", "s") == []


def test_save_and_load_corpus_dir(tmp_path, minicorpus):
    out = tmp_path / "corpus"
    save_corpus(minicorpus, out)
    again = load_corpus_dir(out)
    assert again.utterance_ids == minicorpus.utterance_ids
    assert again.systems == minicorpus.systems
    for u, s in minicorpus.pairs():
        assert [t.normalized for t in again.hyp_tokens(u, s)] == [
            t.normalized for t in minicorpus.hyp_tokens(u, s)
        ]


def test_load_corpus_dir_missing(tmp_path):
    with pytest.raises(CorpusError, match="not a corpus directory"):
        load_corpus_dir(tmp_path / "nope")
