"""Pre-training filters and corpus statistics.

The pre-training filter drops retweets first, then any tweet whose subword
count is below the minimum (default 10, boundary inclusive); order is
preserved and both drop counters are reported.  "Tokens" means subword
tokens from the trained tokenizer; a flag switches to whitespace tokens.

Histograms use unit-width integer bins up to a cap (128 for token counts,
512 for character counts, 32 for per-tweet special-token counts) plus one
overflow bin, and always conserve mass: the counts sum to the number of
inputs.  Reports are written as ``key: value`` text plus one two-column
``bin,count`` CSV per histogram for external plotting.
"""

from __future__ import annotations

from collections import Counter
from dataclasses import dataclass
from pathlib import Path
from typing import Iterable, Iterator, Sequence

from .bpe import BpeModel, subwords_per_text
from .errors import DataError
from .normalize import EMAIL_TOKEN, MENTION_TOKEN, RawTweet
from .records import atomic_write, read_json_records

TOKEN_HIST_MAX = 128
CHAR_HIST_MAX = 512
SPECIAL_HIST_MAX = 32
OVERFLOW_EDGE = 2 ** 31

# marker word counted in normalized text, per entity kind
SPECIAL_MARKERS = {
    "mention": MENTION_TOKEN,
    "hashtag": "<hashtag>",
    "cashtag": "<cashtag>",
    "emoji": "<emoji>",
    "url": "<http>",
    "email": EMAIL_TOKEN,
}


@dataclass
class Histogram:
    """Integer histogram with unit bins [0..max_value] plus an overflow bin."""

    edges: list[int]
    counts: list[int]
    total: int = 0

    @classmethod
    def empty(cls, max_value: int) -> "Histogram":
        edges = list(range(max_value + 2)) + [OVERFLOW_EDGE]
        return cls(edges, [0] * (max_value + 2), 0)

    @property
    def max_value(self) -> int:
        return len(self.counts) - 2

    def add(self, value: int) -> None:
        if value < 0:
            raise ValueError("histogram values must be non-negative")
        self.counts[min(value, self.max_value + 1)] += 1
        self.total += 1

    def write_csv(self, path) -> None:
        """Two-column plot data; the last row covers all values > max."""
        with atomic_write(path) as f:
            f.write("bin,count\n")
            for i, c in enumerate(self.counts):
                f.write(f"{i},{c}\n")


@dataclass
class DropCounters:
    retweets: int = 0
    short: int = 0

    @property
    def total(self) -> int:
        return self.retweets + self.short


@dataclass
class CorpusReport:
    n_tweets: int
    n_tokens: int
    token_hist: Histogram
    char_hist: Histogram
    special_hists: dict[str, Histogram]
    n_dropped_retweets: int
    n_dropped_short: int


@dataclass(frozen=True)
class LabeledInstance:
    id: str
    text: str
    label: str


@dataclass
class DatasetManifest:
    """A named labeled dataset; label_set keeps first-appearance order."""

    name: str
    instances: list[LabeledInstance]
    label_set: tuple[str, ...]

    def ids(self) -> list[str]:
        return [inst.id for inst in self.instances]


@dataclass
class ManifestSummary:
    counts: dict[str, int]
    total: int


def _count_tokens(text: str, model: BpeModel | None, whitespace_tokens: bool) -> int:
    if whitespace_tokens:
        return len(text.split())
    if model is None:
        raise DataError("subword token counting requires a trained model")
    return subwords_per_text(model, text)


def filter_pretrain(stream: Iterable[RawTweet], model: BpeModel | None,
                    min_tokens: int, counters: DropCounters | None = None,
                    whitespace_tokens: bool = False) -> Iterator[RawTweet]:
    """Drop retweets, then tweets shorter than min_tokens; order-stable.

    Pass a DropCounters to collect the two drop tallies while the returned
    generator is consumed.
    """
    if min_tokens < 0:
        raise DataError("min_tokens must be non-negative")
    if counters is None:
        counters = DropCounters()
    for tweet in stream:
        if tweet.is_retweet:
            counters.retweets += 1
            continue
        if _count_tokens(tweet.text, model, whitespace_tokens) < min_tokens:
            counters.short += 1
            continue
        yield tweet


def special_token_counts(text: str) -> dict[str, int]:
    """Occurrences of each entity marker in one normalized text."""
    words = Counter(text.split())
    return {kind: words[marker] for kind, marker in SPECIAL_MARKERS.items()}


def token_length_stats(stream: Iterable, model: BpeModel) -> tuple[Histogram, Histogram]:
    """Per-tweet subword-count and character-count histograms."""
    token_hist = Histogram.empty(TOKEN_HIST_MAX)
    char_hist = Histogram.empty(CHAR_HIST_MAX)
    for item in stream:
        text = item if isinstance(item, str) else item.text
        token_hist.add(subwords_per_text(model, text))
        char_hist.add(len(text))
    return token_hist, char_hist


def special_token_stats(stream: Iterable) -> dict[str, Histogram]:
    """Per-kind histograms of entity-marker occurrences per tweet."""
    hists = {kind: Histogram.empty(SPECIAL_HIST_MAX) for kind in SPECIAL_MARKERS}
    for item in stream:
        text = item if isinstance(item, str) else item.text
        counts = special_token_counts(text)
        for kind, hist in hists.items():
            hist.add(counts[kind])
    return hists


def build_corpus_report(stream: Iterable[RawTweet], model: BpeModel,
                        min_tokens: int,
                        whitespace_tokens: bool = False) -> CorpusReport:
    """Single-pass filter + statistics over a (normalized) tweet stream."""
    token_hist = Histogram.empty(TOKEN_HIST_MAX)
    char_hist = Histogram.empty(CHAR_HIST_MAX)
    special_hists = {kind: Histogram.empty(SPECIAL_HIST_MAX) for kind in SPECIAL_MARKERS}
    counters = DropCounters()
    n_tweets = 0
    n_tokens = 0
    for tweet in stream:
        if tweet.is_retweet:
            counters.retweets += 1
            continue
        n_sub = subwords_per_text(model, tweet.text)
        gate = len(tweet.text.split()) if whitespace_tokens else n_sub
        if gate < min_tokens:
            counters.short += 1
            continue
        n_tweets += 1
        n_tokens += n_sub
        token_hist.add(n_sub)
        char_hist.add(len(tweet.text))
        counts = special_token_counts(tweet.text)
        for kind, hist in special_hists.items():
            hist.add(counts[kind])
    return CorpusReport(n_tweets, n_tokens, token_hist, char_hist,
                        special_hists, counters.retweets, counters.short)


def write_corpus_report(report: CorpusReport, outdir) -> list[Path]:
    """Write report.txt plus one bin,count CSV per histogram; returns paths."""
    outdir = Path(outdir)
    outdir.mkdir(parents=True, exist_ok=True)
    written: list[Path] = []

    csvs: list[tuple[str, Histogram]] = [
        ("token_hist", report.token_hist),
        ("char_hist", report.char_hist),
    ]
    for kind in SPECIAL_MARKERS:
        csvs.append((f"special_{kind}_hist", report.special_hists[kind]))

    report_path = outdir / "report.txt"
    with atomic_write(report_path) as f:
        f.write(f"n_tweets: {report.n_tweets}\n")
        f.write(f"n_tokens: {report.n_tokens}\n")
        f.write(f"n_dropped_retweets: {report.n_dropped_retweets}\n")
        f.write(f"n_dropped_short: {report.n_dropped_short}\n")
        for name, _ in csvs:
            f.write(f"{name}: {name}.csv\n")
    written.append(report_path)

    for name, hist in csvs:
        path = outdir / f"{name}.csv"
        hist.write_csv(path)
        written.append(path)
    return written


def load_manifest(path, name: str | None = None,
                  label_set: Sequence[str] | None = None) -> DatasetManifest:
    """Load a labeled newline-delimited manifest ({id, text, label} records).

    Labels are opaque, case-sensitive strings.  When label_set is not given
    it is derived in first-appearance order.
    """
    path = Path(path)
    if name is None:
        name = path.stem
    instances: list[LabeledInstance] = []
    seen_ids: set[str] = set()
    order: list[str] = []
    known = set(label_set) if label_set is not None else None
    for i, obj in enumerate(read_json_records(path), start=1):
        where = f"{path}:{i}"
        iid = obj.get("id")
        label = obj.get("label")
        if not isinstance(iid, str) or not iid:
            raise DataError(f"{where}: manifest record needs a non-empty 'id'")
        if not isinstance(label, str):
            raise DataError(f"{where}: manifest record needs a string 'label'")
        if iid in seen_ids:
            raise DataError(f"{where}: duplicate instance id {iid!r}")
        if known is not None and label not in known:
            raise DataError(f"{where}: label {label!r} not in declared label set")
        seen_ids.add(iid)
        if label not in order:
            order.append(label)
        instances.append(LabeledInstance(iid, str(obj.get("text", "")), label))
    labels = tuple(label_set) if label_set is not None else tuple(order)
    return DatasetManifest(name, instances, labels)


def summarize_manifest(manifest: DatasetManifest) -> ManifestSummary:
    """Per-class counts plus total; every label in label_set is reported."""
    counts = {label: 0 for label in manifest.label_set}
    for inst in manifest.instances:
        counts[inst.label] = counts.get(inst.label, 0) + 1
    return ManifestSummary(counts, len(manifest.instances))


def check_expected_counts(manifest: DatasetManifest,
                          expected: dict[str, int]) -> list[str]:
    """Report (not fail on) mismatches against published class counts."""
    summary = summarize_manifest(manifest)
    problems: list[str] = []
    for label, want in expected.items():
        got = summary.counts.get(label, 0)
        if got != want:
            problems.append(f"{manifest.name}: class {label!r} has {got} instances, expected {want}")
    return problems
