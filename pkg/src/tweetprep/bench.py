"""Throughput benchmark for the normalize + encode + pad text pipeline.

The sample is held in memory before timing starts and the whole pass
(normalization, encoding, padding/truncation to the block length) is
repeated a configurable number of times; file I/O is never inside the timed
region.  Outputs are hashed after each pass and must be identical across
passes, which doubles as a determinism check.  Only the text pipeline is
timed; there is no neural inference in this toolkit.
"""

from __future__ import annotations

import hashlib
import time
from dataclasses import dataclass
from typing import Sequence

from .bpe import PAD_ID, BpeModel, encode
from .errors import DataError, EmptyInput
from .normalize import EmojiLexicon, RawTweet, normalize_tweet


@dataclass
class BenchReport:
    n_samples: int
    batch_size: int
    repeats: int
    mean_s: float
    min_s: float
    max_s: float
    throughput: float
    output_digest: str

    def lines(self) -> list[str]:
        return [
            f"n_samples: {self.n_samples}",
            f"batch_size: {self.batch_size}",
            f"repeats: {self.repeats}",
            f"mean_s: {self.mean_s:.6f}",
            f"min_s: {self.min_s:.6f}",
            f"max_s: {self.max_s:.6f}",
            f"throughput_per_s: {self.throughput:.1f}",
            f"output_digest: {self.output_digest}",
        ]


def _pad(ids: tuple[int, ...], block_len: int) -> tuple[int, ...]:
    if len(ids) >= block_len:
        return ids[:block_len]
    return ids + (PAD_ID,) * (block_len - len(ids))


def bench_throughput(tweets: Sequence[RawTweet], model: BpeModel,
                     lexicon: EmojiLexicon | None = None,
                     block_len: int = 128, repeats: int = 100,
                     batch_size: int = 1000,
                     n_samples: int | None = None) -> BenchReport:
    """Time repeated normalize+encode+pad passes over an in-memory sample.

    Raises EmptyInput for an empty sample and DataError when the sample size
    does not match a configured n_samples.
    """
    if not tweets:
        raise EmptyInput("benchmark sample is empty")
    if n_samples is not None and len(tweets) != n_samples:
        raise DataError(f"benchmark sample has {len(tweets)} tweets, configured n_samples={n_samples}")
    if repeats < 1:
        raise DataError("repeats must be at least 1")
    if batch_size < 1:
        raise DataError("batch_size must be at least 1")
    lex = lexicon if lexicon is not None else EmojiLexicon.bundled()

    times: list[float] = []
    digests: set[str] = set()
    n = len(tweets)
    for _ in range(repeats):
        outputs: list[tuple[int, ...]] = []
        t0 = time.perf_counter()
        for start in range(0, n, batch_size):
            for tweet in tweets[start:start + batch_size]:
                normalized = normalize_tweet(tweet, lex)
                ids = encode(model, normalized.text).ids
                outputs.append(_pad(ids, block_len))
        elapsed = time.perf_counter() - t0
        times.append(elapsed)
        h = hashlib.sha256()
        for padded in outputs:
            h.update(repr(padded).encode())
        digests.add(h.hexdigest())

    if len(digests) != 1:
        raise DataError("benchmark outputs differed between passes")
    mean = sum(times) / len(times)
    return BenchReport(
        n_samples=n,
        batch_size=batch_size,
        repeats=repeats,
        mean_s=mean,
        min_s=min(times),
        max_s=max(times),
        throughput=n / mean,
        output_digest=digests.pop(),
    )
