"""sevasr: severity-graded benchmarking of ASR transcription errors.

The package compares ASR hypotheses against reference transcripts, isolates
errors on content words (nouns, adjectives, verbs, adverbs), pre-classifies
them into four severity categories (Lex, Gram, Cotx, Fail) by objective
linguistic rules, queues the context-dependent remainder for human
adjudication, and renders multi-system benchmark tables.
"""

__version__ = "0.1.0"
