"""Content-word lexicon and inflectional decomposition.

The lexicon decides which tokens are content words (nouns, adjectives,
verbs, adverbs: the unit of error measurement) and splits content words
into stem + inflectional suffix so the classifier can separate stem errors
from inflection-only errors.  It is a plain TSV lookup, deterministic by
design; swapping in a full-size lexicon (e.g. a Lefff-style export) only
requires the same four columns.
"""

from __future__ import annotations

from dataclasses import dataclass
from importlib import resources
from pathlib import Path
from typing import Iterable

from .corpus import Token

POS_VALUES = ("noun", "adjective", "verb", "adverb", "function", "other")
CONTENT_POS = ("verb", "noun", "adjective", "adverb")  # priority order
GENDER_FEATURES = ("masc", "fem")
NUMBER_FEATURES = ("sing", "plur")

# Function-word subtypes that leave a visible orphan when their head word
# is deleted from the hypothesis.
ORPHANING_FUNCTION_TAGS = frozenset({"det", "prep", "subord"})


class LexiconError(ValueError):
    """Raised for malformed lexicon or suffix-table files."""


@dataclass(frozen=True)
class LexiconEntry:
    form: str
    lemma: str
    pos: str
    gender: str = "none"
    number: str = "none"
    tense_person: str = ""
    tags: tuple[str, ...] = ()

    @property
    def is_content(self) -> bool:
        return self.pos in CONTENT_POS


@dataclass(frozen=True)
class MorphDecomposition:
    """A content word split as stem + inflectional suffix.

    ``stem + inflection == form`` always holds; the trivial decomposition
    (whole form, empty inflection) is always present.
    """

    stem: str
    inflection: str
    features: str = ""


def _parse_features(pos: str, raw: str) -> tuple[str, str, str, tuple[str, ...]]:
    gender, number, verbal = "none", "none", []
    tags: list[str] = []
    for feat in (f.strip() for f in raw.split(";")):
        if not feat:
            continue
        if feat in GENDER_FEATURES:
            gender = feat
        elif feat in NUMBER_FEATURES:
            number = feat
        elif pos == "verb":
            verbal.append(feat)
        else:
            tags.append(feat)
    return gender, number, ";".join(verbal), tuple(tags)


class Lexicon:
    """Lookup of normalized forms; multiple POS per form are allowed."""

    def __init__(self, entries: Iterable[LexiconEntry]) -> None:
        self._by_form: dict[str, list[LexiconEntry]] = {}
        for entry in entries:
            self._by_form.setdefault(entry.form, []).append(entry)

    def __len__(self) -> int:
        return sum(len(v) for v in self._by_form.values())

    def lookup(self, form: str) -> list[LexiconEntry]:
        return list(self._by_form.get(form, ()))

    def content_entries(self, form: str) -> list[LexiconEntry]:
        return [e for e in self._by_form.get(form, ()) if e.is_content]

    def content_pos(self, form: str) -> list[str]:
        """Content POS of a form, priority-ordered (verb first)."""
        present = {e.pos for e in self.content_entries(form)}
        return [p for p in CONTENT_POS if p in present]

    def content_lemmas(self, form: str) -> set[str]:
        return {e.lemma for e in self.content_entries(form)}

    def has_orphaning_function(self, form: str) -> bool:
        """True if the form is a determiner, preposition or subordinator."""
        return any(
            e.pos == "function" and set(e.tags) & ORPHANING_FUNCTION_TAGS
            for e in self._by_form.get(form, ())
        )

    def forms(self) -> Iterable[str]:
        return self._by_form.keys()

    def is_content_word(self, token: Token) -> tuple[bool, str | None]:
        """Content status and POS of a token.

        In-lexicon forms are decided by their entries.  Out-of-lexicon
        tokens whose surface is capitalized are treated as proper nouns
        (content words); other unknown tokens are not content words.
        """
        entries = self.lookup(token.normalized)
        if entries:
            pos = self.content_pos(token.normalized)
            if pos:
                return True, pos[0]
            return False, entries[0].pos
        if token.first_alpha_is_upper():
            return True, "noun"
        return False, None

    def is_proper_noun(self, token: Token) -> bool:
        return not self.lookup(token.normalized) and token.first_alpha_is_upper()


def load_lexicon(path: str | Path) -> Lexicon:
    """Load a lexicon TSV: ``form<TAB>lemma<TAB>pos<TAB>features``.

    Features are ``;``-separated (gender/number markers, verbal tense and
    person codes, function-word subtypes like ``det``/``prep``/``subord``).
    Blank lines and ``#`` comments are skipped.
    """
    entries: list[LexiconEntry] = []
    with open(path, encoding="utf-8") as fh:
        for lineno, line in enumerate(fh, start=1):
            stripped = line.strip("\n")
            if not stripped.strip() or stripped.lstrip().startswith("#"):
                continue
            cols = stripped.split("\t")
            if len(cols) < 3:
                raise LexiconError(f"{path}:{lineno}: expected at least 3 tab-separated columns")
            form, lemma, pos = cols[0].strip(), cols[1].strip(), cols[2].strip()
            raw_features = cols[3].strip() if len(cols) > 3 else ""
            if not form or not lemma:
                raise LexiconError(f"{path}:{lineno}: empty form or lemma")
            if pos not in POS_VALUES:
                raise LexiconError(f"{path}:{lineno}: unknown pos {pos!r}")
            gender, number, verbal, tags = _parse_features(pos, raw_features)
            entries.append(
                LexiconEntry(
                    form=form,
                    lemma=lemma,
                    pos=pos,
                    gender=gender,
                    number=number,
                    tense_person=verbal,
                    tags=tags,
                )
            )
    return Lexicon(entries)


# Inflectional suffixes per POS.  The empty suffix (trivial decomposition)
# is implicit.  Descriptive feature labels for noun/adjective suffixes; a
# verb suffix is its own tense/person marker.
_NOMINAL_FEATURES = {"s": "plur", "x": "plur", "e": "fem", "es": "fem;plur"}

DEFAULT_SUFFIXES: dict[str, tuple[str, ...]] = {
    "noun": ("s", "e", "es", "x"),
    "adjective": ("s", "e", "es", "x"),
    "verb": (
        "e", "es", "é", "ée", "és", "ées", "ai", "as", "a",
        "ais", "ait", "aient", "ons", "ez", "ent", "er", "t", "s", "ant",
    ),
    "adverb": (),
}


def load_suffix_tables(path: str | Path | None = None) -> dict[str, tuple[str, ...]]:
    """Load suffix tables from a config file (``pos = s, e, es`` lines).

    With no path, returns the bundled defaults.  Unlisted POS get only the
    trivial decomposition.
    """
    if path is None:
        return dict(DEFAULT_SUFFIXES)
    tables: dict[str, tuple[str, ...]] = {}
    with open(path, encoding="utf-8") as fh:
        for lineno, line in enumerate(fh, start=1):
            stripped = line.strip()
            if not stripped or stripped.startswith("#"):
                continue
            if "=" not in stripped:
                raise LexiconError(f"{path}:{lineno}: expected 'pos = suffix, suffix, ...'")
            pos, _, raw = stripped.partition("=")
            pos = pos.strip()
            if pos not in POS_VALUES:
                raise LexiconError(f"{path}:{lineno}: unknown pos {pos!r}")
            suffixes = []
            for s in raw.split(","):
                s = s.strip()
                if s and s not in suffixes:
                    suffixes.append(s)
            tables[pos] = tuple(suffixes)
    return tables


def decompose(
    form: str,
    pos: str,
    tables: dict[str, tuple[str, ...]] | None = None,
) -> list[MorphDecomposition]:
    """All stem + suffix splits of a form under the POS suffix table.

    The trivial decomposition comes first; the stem is never empty, so a
    one-letter form only decomposes trivially.
    """
    suffix_table = (tables or DEFAULT_SUFFIXES).get(pos, ())
    decomps = [MorphDecomposition(stem=form, inflection="")]
    for suffix in suffix_table:
        if len(form) > len(suffix) and form.endswith(suffix):
            if pos == "verb":
                features = suffix
            else:
                features = _NOMINAL_FEATURES.get(suffix, "")
            decomps.append(
                MorphDecomposition(
                    stem=form[: len(form) - len(suffix)],
                    inflection=suffix,
                    features=features,
                )
            )
    return decomps


def bundled_lexicon_path() -> Path:
    """Path of the small French lexicon shipped with the package."""
    return Path(str(resources.files("sevasr") / "data" / "lexicon_fr.tsv"))


def bundled_suffixes_path() -> Path:
    return Path(str(resources.files("sevasr") / "data" / "suffixes_fr.cfg"))
