"""Posting-time histograms, peak detection and baseline divergence.

All binning is on the raw GMT timestamps (the stored timestamps carry no
timezone), so hour-of-day peaks and the weekday smear inherit that known
bias rather than guessing timezones.
"""
from __future__ import annotations

import csv
import json
from dataclasses import dataclass
from pathlib import Path
from typing import IO, Iterable, Sequence

from .classify import ClassificationConfig, DEFAULT_CONFIG, attribute_classes, is_drug_post
from .corpus.model import Post
from .lexicon import Lexicon

HOUR_BINS = 24
WEEKDAY_BINS = 7
DEFAULT_PEAK_PROMINENCE = 0.02


class TemporalError(ValueError):
    pass


@dataclass(frozen=True)
class TimeHistogram:
    mode: str  # "hour" | "weekday"
    bins: tuple[int, ...]
    total: int
    class_filter: str | None = None

    def normalized(self) -> list[float]:
        if self.total == 0:
            raise TemporalError("empty histogram cannot be normalized")
        return [b / self.total for b in self.bins]


@dataclass(frozen=True)
class BaselineProfile:
    weights: tuple[float, ...]

    def __post_init__(self):
        if len(self.weights) != HOUR_BINS:
            raise TemporalError("baseline profile needs 24 weights")
        if any(w < 0 for w in self.weights):
            raise TemporalError("baseline weights must be nonnegative")
        if abs(sum(self.weights) - 1.0) > 1e-9:
            raise TemporalError("baseline weights must sum to 1")

    @classmethod
    def uniform(cls) -> "BaselineProfile":
        return cls(weights=(1.0 / HOUR_BINS,) * HOUR_BINS)

    @classmethod
    def from_json(cls, source: str | Path | IO[str]) -> "BaselineProfile":
        if isinstance(source, (str, Path)):
            with open(source, encoding="utf-8") as fh:
                raw = json.load(fh)
        else:
            raw = json.load(source)
        return cls(weights=tuple(float(w) for w in raw))


def hour_of(ts: int) -> int:
    return (ts // 3600) % 24


def weekday_of(ts: int) -> int:
    # Monday=0; the epoch (1970-01-01) was a Thursday
    return (ts // 86400 + 3) % 7


def histogram(
    posts: Iterable[Post],
    mode: str,
    lexicon: Lexicon | None = None,
    class_filter: str | None = None,
    config: ClassificationConfig = DEFAULT_CONFIG,
) -> TimeHistogram:
    """Bin GMT timestamps by hour of day or weekday (Monday=0).

    With class_filter set, a post counts when the filter class is among
    its attributed classes (so multi-class posts count once per class
    across per-class histograms).
    """
    if mode not in ("hour", "weekday"):
        raise TemporalError(f"unknown mode: {mode!r}")
    if class_filter is not None and lexicon is None:
        raise TemporalError("class filtering requires a lexicon")
    n_bins = HOUR_BINS if mode == "hour" else WEEKDAY_BINS
    bins = [0] * n_bins
    total = 0
    for post in posts:
        if class_filter is not None:
            attribution = attribute_classes(post, lexicon, config)
            if class_filter not in attribution.classes:
                continue
        idx = hour_of(post.created_at) if mode == "hour" else weekday_of(post.created_at)
        bins[idx] += 1
        total += 1
    return TimeHistogram(mode=mode, bins=tuple(bins), total=total, class_filter=class_filter)


def _plateau_start_is_max(bins: Sequence[int], i: int) -> bool:
    n = len(bins)
    if bins[(i - 1) % n] >= bins[i]:
        return False
    j = (i + 1) % n
    steps = 0
    while bins[j] == bins[i] and steps < n:
        j = (j + 1) % n
        steps += 1
    return bins[j] < bins[i]


def _descend_min(bins: Sequence[int], i: int, step: int) -> int:
    """Minimum along the descent from peak i until values turn upward."""
    n = len(bins)
    j = (i + step) % n
    prev = bins[j]
    best = prev
    walked = 1
    while walked < n:
        j = (j + step) % n
        if bins[j] > prev:
            break
        prev = bins[j]
        best = min(best, prev)
        walked += 1
    return best


def detect_peaks(hist: TimeHistogram, min_prominence: float = DEFAULT_PEAK_PROMINENCE) -> list[int]:
    """Circular local maxima standing out from both flanking local minima by
    more than min_prominence of the histogram total; sorted by height desc.
    """
    if hist.total <= 0:
        raise TemporalError("peak detection needs a nonempty histogram")
    bins = hist.bins
    threshold = min_prominence * hist.total
    peaks = [
        i
        for i in range(len(bins))
        if _plateau_start_is_max(bins, i)
        and bins[i] - _descend_min(bins, i, -1) > threshold
        and bins[i] - _descend_min(bins, i, +1) > threshold
    ]
    peaks.sort(key=lambda i: (-bins[i], i))
    return peaks


def divergence_from_baseline(hist: TimeHistogram, baseline: BaselineProfile) -> float:
    """Total-variation distance between the normalized histogram and the
    baseline posting profile, in [0, 1]."""
    if hist.mode != "hour":
        raise TemporalError("baseline divergence is defined on hour histograms")
    p = hist.normalized()
    return 0.5 * sum(abs(a - b) for a, b in zip(p, baseline.weights))


def histogram_doc(hist: TimeHistogram, peaks: list[int] | None = None,
                  divergence: float | None = None) -> dict:
    doc = {
        "mode": hist.mode,
        "bins": list(hist.bins),
        "total": hist.total,
        "class_filter": hist.class_filter,
    }
    if peaks is not None:
        doc["peaks"] = peaks
    if divergence is not None:
        doc["divergence_from_baseline"] = divergence
    return doc


def write_histogram_csv(hist: TimeHistogram, path: str | Path) -> None:
    with open(path, "w", newline="", encoding="utf-8") as fh:
        writer = csv.writer(fh)
        writer.writerow(["bin", "count"])
        for i, count in enumerate(hist.bins):
            writer.writerow([i, count])


def temporal_report(
    posts: Sequence[Post],
    lexicon: Lexicon,
    config: ClassificationConfig = DEFAULT_CONFIG,
    baseline: BaselineProfile | None = None,
    min_prominence: float = DEFAULT_PEAK_PROMINENCE,
) -> dict:
    """Hour and weekday histograms for all drug posts and per class, with
    detected peaks and hour-profile divergence from the baseline."""
    baseline = baseline or BaselineProfile.uniform()
    positives = [p for p in posts if is_drug_post(p, lexicon, config)[0]]
    report: dict = {"hour": {}, "weekday": {}, "n_posts": len(positives)}
    for class_filter in (None, "weed", "syrup", "pills"):
        key = class_filter or "all"
        hour_hist = histogram(positives, "hour", lexicon, class_filter, config)
        peaks = detect_peaks(hour_hist, min_prominence) if hour_hist.total else []
        divergence = (
            divergence_from_baseline(hour_hist, baseline) if hour_hist.total else None
        )
        report["hour"][key] = histogram_doc(hour_hist, peaks, divergence)
        week_hist = histogram(positives, "weekday", lexicon, class_filter, config)
        week_peaks = detect_peaks(week_hist, min_prominence) if week_hist.total else []
        report["weekday"][key] = histogram_doc(week_hist, week_peaks)
    return report
