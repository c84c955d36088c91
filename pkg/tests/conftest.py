import json
from pathlib import Path

import pytest

from sevasr.alignment import align_utterance
from sevasr.classifier import batch_preclassify
from sevasr.corpus import load_corpus
from sevasr.lexicon import bundled_lexicon_path, load_lexicon

TESTS_DIR = Path(__file__).parent
GOLDEN_FILE = TESTS_DIR / "golden" / "minicorpus_golden.jsonl"


def minicorpus_paths() -> tuple[Path, Path]:
    from importlib import resources

    base = resources.files("sevasr") / "data" / "minicorpus"
    return Path(str(base / "reference.jsonl")), Path(str(base / "hypotheses_demo.jsonl"))


@pytest.fixture(scope="session")
def lexicon():
    return load_lexicon(bundled_lexicon_path())


@pytest.fixture(scope="session")
def minicorpus():
    ref, hyp = minicorpus_paths()
    return load_corpus(ref, [hyp])


@pytest.fixture(scope="session")
def minicorpus_alignments(minicorpus):
    return {
        (u, s): align_utterance(minicorpus.ref_tokens(u), minicorpus.hyp_tokens(u, s))
        for u, s in minicorpus.pairs()
    }


@pytest.fixture(scope="session")
def minicorpus_batch(minicorpus, minicorpus_alignments, lexicon):
    return batch_preclassify(minicorpus, minicorpus_alignments, lexicon)


@pytest.fixture(scope="session")
def golden_labels():
    with open(GOLDEN_FILE, encoding="utf-8") as fh:
        return [json.loads(line) for line in fh if line.strip()]


def pytest_runtest_logreport(report):
    if report.when == "call" and "test_acceptance" in report.nodeid:
        name = report.nodeid.split("::")[-1]
        outcome = "PASS" if report.passed else "FAIL"
        print(f"\nACCEPTANCE {outcome}: {name}")
