"""Per-system category rates, severity ranking and pairwise significance.

Counts are integers and rates are kept as exact fractions internally, so
the identity correct + Lex + Gram + Cotx + Fail = total holds exactly and
the four category rates sum to the overall error rate at full precision.
Rounding happens only at display time.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from fractions import Fraction
from statistics import NormalDist
from typing import Iterable, Mapping, Sequence

CATEGORY_FIELDS = ("lex", "gram", "cotx", "fail")


class MetricsError(ValueError):
    """Raised for inconsistent counts or invalid test parameters."""


@dataclass(frozen=True)
class CategoryRates:
    """Counts for one system plus exact percentage rates."""

    total_content_words: int
    correct: int
    lex: int
    gram: int
    cotx: int
    fail: int

    def __post_init__(self) -> None:
        counts = (self.correct, self.lex, self.gram, self.cotx, self.fail)
        if self.total_content_words <= 0:
            raise MetricsError("total_content_words must be positive")
        if any(c < 0 for c in counts):
            raise MetricsError("negative count")
        if sum(counts) != self.total_content_words:
            raise MetricsError(
                f"counts {counts} do not sum to total {self.total_content_words}"
            )

    def rate(self, category: str) -> Fraction:
        """Exact percentage rate for 'lex'/'gram'/'cotx'/'fail'/'correct'."""
        return Fraction(getattr(self, category) * 100, self.total_content_words)

    @property
    def all_rate(self) -> Fraction:
        return Fraction(
            (self.total_content_words - self.correct) * 100, self.total_content_words
        )

    def display(self, category: str) -> str:
        return f"{float(self.rate(category)):.1f}"

    @property
    def all_display(self) -> str:
        return f"{float(self.all_rate):.1f}"


def rates_from_counts(
    total_content_words: int, lex: int, gram: int, cotx: int, fail: int
) -> CategoryRates:
    """Build rates from error counts; correct is the remainder."""
    correct = total_content_words - (lex + gram + cotx + fail)
    return CategoryRates(total_content_words, correct, lex, gram, cotx, fail)


@dataclass
class SystemReport:
    system_id: str
    rates: CategoryRates
    wer: float | None = None
    rank_score: float = 0.0
    pending: int = 0
    significance: dict[str, bool] = field(default_factory=dict)


def compute_rates(labels_doc: dict, allow_partial: bool = False) -> dict[str, CategoryRates]:
    """Per-system CategoryRates from an exported label document.

    The document must carry per-system totals (``systems`` summary written
    at pre-classification time) and one label per candidate.  Pending
    labels are an error unless ``allow_partial``; with the flag they are
    excluded from both the error counts and the totals.
    """
    systems = labels_doc.get("systems") or {}
    if not systems:
        raise MetricsError("label document carries no per-system totals")
    counts: dict[str, dict[str, int]] = {
        sys_id: {c: 0 for c in CATEGORY_FIELDS} | {"pending": 0, "labeled": 0}
        for sys_id in systems
    }
    for label in labels_doc.get("labels", ()):
        sys_id = label["system_id"]
        if sys_id not in counts:
            raise MetricsError(f"label for unknown system {sys_id!r}")
        if label["status"] == "pending":
            counts[sys_id]["pending"] += 1
            continue
        category = label["category"].lower()
        if category not in CATEGORY_FIELDS:
            raise MetricsError(f"unknown category {label['category']!r}")
        counts[sys_id][category] += 1
        counts[sys_id]["labeled"] += 1
    pending_total = sum(c["pending"] for c in counts.values())
    if pending_total and not allow_partial:
        raise MetricsError(
            f"{pending_total} candidates are still pending; annotate them or "
            "pass allow_partial"
        )
    out: dict[str, CategoryRates] = {}
    for sys_id, stats in systems.items():
        c = counts[sys_id]
        total = int(stats["total_content_words"]) - c["pending"]
        correct = int(stats["correct"])
        out[sys_id] = CategoryRates(
            total_content_words=total,
            correct=correct,
            lex=c["lex"],
            gram=c["gram"],
            cotx=c["cotx"],
            fail=c["fail"],
        )
    return out


def aggregate_rates(rates: Mapping[str, CategoryRates]) -> CategoryRates:
    """Sum counts across systems (the benchmark's overall row)."""
    if not rates:
        raise MetricsError("nothing to aggregate")
    return CategoryRates(
        total_content_words=sum(r.total_content_words for r in rates.values()),
        correct=sum(r.correct for r in rates.values()),
        lex=sum(r.lex for r in rates.values()),
        gram=sum(r.gram for r in rates.values()),
        cotx=sum(r.cotx for r in rates.values()),
        fail=sum(r.fail for r in rates.values()),
    )


def severity_rank(
    reports: Sequence[SystemReport],
    weight: float = 1.0,
    order: Sequence[str] | None = None,
) -> list[SystemReport]:
    """Rank systems best-first by all_rate + weight * fail_rate.

    Ties break on fail rate then system id.  ``order`` switches to an
    explicit manual ordering (every listed system must be present); rank
    scores are still filled in for display.
    """
    if weight < 0:
        raise MetricsError("weight must be >= 0")
    for report in reports:
        report.rank_score = float(report.rates.all_rate) + weight * float(
            report.rates.rate("fail")
        )
    if order is not None:
        index = {sys_id: i for i, sys_id in enumerate(order)}
        missing = [r.system_id for r in reports if r.system_id not in index]
        if missing:
            raise MetricsError(f"explicit order misses systems: {missing}")
        return sorted(reports, key=lambda r: index[r.system_id])
    return sorted(
        reports,
        key=lambda r: (r.rank_score, float(r.rates.rate("fail")), r.system_id),
    )


def significance_threshold(n1: int, n2: int, p_pool: float, alpha: float) -> float:
    """Smallest significant rate difference, in percentage points.

    Two-proportion z-test on a pooled proportion:
    z(1 - alpha/2) * sqrt(p(1-p)(1/n1 + 1/n2)) * 100.
    """
    if n1 <= 0 or n2 <= 0:
        raise MetricsError("sample sizes must be positive")
    if not 0.0 < p_pool < 1.0:
        raise MetricsError("pooled proportion must be in (0, 1)")
    if not 0.0 < alpha < 1.0:
        raise MetricsError("alpha must be in (0, 1)")
    z = NormalDist().inv_cdf(1.0 - alpha / 2.0)
    return z * math.sqrt(p_pool * (1.0 - p_pool) * (1.0 / n1 + 1.0 / n2)) * 100.0


def compare_systems(
    reports: Sequence[SystemReport], threshold: float
) -> dict[str, dict[str, bool]]:
    """Pairwise significance flags: |all_rate_i - all_rate_j| >= threshold.

    Equal rates are never significant, so a zero threshold flags exactly
    the non-equal pairs.  Fills each report's ``significance`` map and
    returns the full matrix.
    """
    if threshold < 0:
        raise MetricsError("threshold must be >= 0")
    matrix: dict[str, dict[str, bool]] = {}
    for report in reports:
        row: dict[str, bool] = {}
        for other in reports:
            if other.system_id == report.system_id:
                continue
            diff = abs(report.rates.all_rate - other.rates.all_rate)
            row[other.system_id] = diff != 0 and float(diff) >= threshold
        report.significance = row
        matrix[report.system_id] = row
    return matrix


def pooled_error_proportion(rates: Mapping[str, CategoryRates]) -> float:
    """Pooled error proportion across systems, for the significance test."""
    agg = aggregate_rates(rates)
    return float(
        Fraction(agg.total_content_words - agg.correct, agg.total_content_words)
    )
