"""Deterministic fixture generators shared by the unit and acceptance tests."""

import random
import sys
from pathlib import Path

import pytest

sys.path.insert(0, str(Path(__file__).resolve().parent))

from tweetprep.normalize import RawTweet
from tweetprep.stats import DatasetManifest, LabeledInstance

TURKISH_WORDS = [
    "selam", "merhaba", "bugün", "çok", "güzel", "hava", "ışık", "öğrenci",
    "şehir", "ağaç", "üzüm", "dünya", "gündem", "seçim", "takım", "maç",
    "kahve", "deniz", "güneş", "yağmur", "istanbul", "ankara", "izmir",
    "kitap", "okul", "yıl", "gün", "hafta", "sabah", "akşam", "gece",
    "haber", "siyaset", "ekonomi", "spor", "müzik", "film", "iyi", "kötü",
    "yeni", "eski", "büyük", "küçük", "insan", "arkadaş", "aile", "çocuk",
    "yemek", "çay", "sokak", "meydan", "kalabalık", "sessiz", "uzak", "yakın",
]

EMOJIS = ["\U0001F917", "\U0001F602", "\U0001F60A", "❤", "\U0001F1F9\U0001F1F7",
          "\U0001F389", "⚽", "\U0001F44D", "\U0001F525", "⭐"]

ASCII_NAMES = ["ali", "ayse", "mehmet", "zeynep", "can", "elif", "murat",
               "deniz_k", "ebru99", "velihoca"]

DOMAIN_WORDS = ["haberler", "gazete", "spor", "video", "blog", "forum", "shop"]
TLDS = ["com", "org", "net", "com.tr", "co.uk", "io"]


def random_tweet_text(rng: random.Random, n_pieces: int | None = None) -> str:
    """Mix Turkish words with random entities; occasionally glue pieces."""
    if n_pieces is None:
        n_pieces = rng.randint(1, 14)
    pieces = []
    for _ in range(n_pieces):
        r = rng.random()
        if r < 0.55:
            pieces.append(rng.choice(TURKISH_WORDS))
        elif r < 0.64:
            pieces.append("@" + rng.choice(ASCII_NAMES))
        elif r < 0.72:
            pieces.append("#" + rng.choice(TURKISH_WORDS))
        elif r < 0.77:
            pieces.append("$" + "".join(rng.choice("ABCDEFGK") for _ in range(rng.randint(1, 6))))
        elif r < 0.84:
            pieces.append(rng.choice(EMOJIS))
        elif r < 0.91:
            dom = rng.choice(DOMAIN_WORDS)
            tld = rng.choice(TLDS)
            form = rng.random()
            if form < 0.4:
                pieces.append(f"www.{dom}.{tld}")
            elif form < 0.7:
                pieces.append(f"https://{dom}.{tld}/yazi?id={rng.randint(1, 99)}")
            else:
                pieces.append(f"http://www.{dom}.{tld}/k")
        elif r < 0.97:
            pieces.append(f"{rng.choice(ASCII_NAMES)}@{rng.choice(DOMAIN_WORDS)}.{rng.choice(['com', 'net', 'com.tr'])}")
        else:
            pieces.append("@user")
    out = []
    for i, piece in enumerate(pieces):
        if i and rng.random() >= 0.08:
            out.append(" ")
        out.append(piece)
    return "".join(out)


def random_tweets(seed: int, n: int, retweet_rate: float = 0.0) -> list[RawTweet]:
    rng = random.Random(seed)
    return [
        RawTweet(f"t{i}", random_tweet_text(rng),
                 is_retweet=rng.random() < retweet_rate)
        for i in range(n)
    ]


def random_corpus(rng: random.Random, max_words: int = 50,
                  alphabet: str = "abcd") -> list[str]:
    """Small tie-prone corpus for BPE oracle comparisons."""
    n_words = rng.randint(1, max_words)
    words = []
    for _ in range(n_words):
        length = rng.randint(1, 5)
        words.append("".join(rng.choice(alphabet) for _ in range(length)))
    return [" ".join(words)]


def synthetic_manifest(name: str, class_sizes: dict[str, int]) -> DatasetManifest:
    instances = []
    for label, n in class_sizes.items():
        for i in range(n):
            instances.append(LabeledInstance(f"{name}-{label}-{i}", "", label))
    return DatasetManifest(name, instances, tuple(class_sizes))


@pytest.fixture
def fixture_tweets():
    return random_tweets(seed=20240, n=100, retweet_rate=0.1)
