"""Byte-pair-encoding subword model with reserved special tokens.

Word-internal BPE in the classic merge-list form: whitespace pre-tokenization,
an end-of-word marker appended to the last character of every word, then
greedy merges of the most frequent adjacent symbol pair.  Ties break on the
lexicographically smallest pair (left symbol, then right) so training is
deterministic; training stops when the vocabulary is full or no pair occurs
at least twice.

Reserved tokens occupy the lowest ids in a fixed order:

    0 <pad>   1 <unk>   2 <mask>   3 <s>   4 </s>
    5 @user   6 <hashtag>   7 </hashtag>   8 <cashtag>   9 </cashtag>
    10 <emoji>   11 </emoji>   12 <http>   13 </http>

They are excluded from the pre-tokenized training stream, can never be
produced by a merge, and always encode to exactly one id.  ``<email>`` is
deliberately not reserved: it is ordinary text to the tokenizer.

Round-trip guarantee: decode(encode(x)) == x for text over the training
alphabet with canonical single-space separation (whitespace pre-tokenization
cannot represent runs of whitespace).
"""

from __future__ import annotations

from collections import Counter, defaultdict
from dataclasses import dataclass, field
from pathlib import Path
from typing import Iterable, Sequence

from .errors import DataError, EmptyCorpus, UnknownId, VocabTooSmall
from .normalize import ENTITY_TOKENS, NormalizedText
from .records import atomic_write

PAD_TOKEN = "<pad>"
UNK_TOKEN = "<unk>"
MASK_TOKEN = "<mask>"
BEGIN_TOKEN = "<s>"
END_TOKEN = "</s>"

STRUCTURAL_TOKENS = (PAD_TOKEN, UNK_TOKEN, MASK_TOKEN, BEGIN_TOKEN, END_TOKEN)
RESERVED_TOKENS = STRUCTURAL_TOKENS + ENTITY_TOKENS

PAD_ID = 0
UNK_ID = 1
MASK_ID = 2
BEGIN_ID = 3
END_ID = 4
N_STRUCTURAL = len(STRUCTURAL_TOKENS)
N_RESERVED = len(RESERVED_TOKENS)

END_OF_WORD = "</w>"

MERGES_FILE = "merges.txt"
VOCAB_FILE = "vocab.txt"


@dataclass(frozen=True)
class TokenSequence:
    """Encoded token ids for one source record."""

    ids: tuple[int, ...]
    source_id: str = ""

    def __len__(self) -> int:
        return len(self.ids)


@dataclass
class BpeModel:
    """Learned merge list, dense vocabulary, and reserved-token registry."""

    merges: list[tuple[str, str]]
    vocab: dict[str, int]
    special_tokens: tuple[str, ...] = RESERVED_TOKENS
    end_of_word_marker: str = END_OF_WORD

    _ranks: dict[tuple[str, str], int] = field(init=False, repr=False)
    _id_to_token: list[str] = field(init=False, repr=False)
    _special_set: frozenset[str] = field(init=False, repr=False)
    _word_cache: dict[str, tuple[int, ...]] = field(init=False, repr=False)

    def __post_init__(self):
        self._ranks = {pair: i for i, pair in enumerate(self.merges)}
        self._id_to_token = [""] * len(self.vocab)
        for tok, i in self.vocab.items():
            if not 0 <= i < len(self.vocab):
                raise DataError(f"vocab ids are not dense: {tok!r} has id {i}")
            self._id_to_token[i] = tok
        self._special_set = frozenset(self.special_tokens)
        self._word_cache = {}

    @property
    def vocab_size(self) -> int:
        return len(self.vocab)

    def token_of(self, token_id: int) -> str:
        if not 0 <= token_id < len(self._id_to_token):
            raise UnknownId(f"id {token_id} outside vocabulary of {len(self._id_to_token)}")
        return self._id_to_token[token_id]

    def save(self, model_dir) -> None:
        """Write merges.txt ("left right" per line, learning order) and
        vocab.txt ("token<TAB>id" per line, id order)."""
        model_dir = Path(model_dir)
        with atomic_write(model_dir / MERGES_FILE) as f:
            for left, right in self.merges:
                f.write(f"{left} {right}\n")
        with atomic_write(model_dir / VOCAB_FILE) as f:
            for token in self._id_to_token:
                f.write(f"{token}\t{self.vocab[token]}\n")

    @classmethod
    def load(cls, model_dir, special_tokens: Sequence[str] = RESERVED_TOKENS,
             end_of_word_marker: str = END_OF_WORD) -> "BpeModel":
        model_dir = Path(model_dir)
        merges: list[tuple[str, str]] = []
        with open(model_dir / MERGES_FILE, "r", encoding="utf-8") as f:
            for line in f:
                line = line.rstrip("\n")
                if not line:
                    continue
                left, right = line.split(" ")
                merges.append((left, right))
        vocab: dict[str, int] = {}
        with open(model_dir / VOCAB_FILE, "r", encoding="utf-8") as f:
            for line in f:
                line = line.rstrip("\n")
                if not line:
                    continue
                token, id_str = line.split("\t")
                vocab[token] = int(id_str)
        for i, tok in enumerate(special_tokens):
            if vocab.get(tok) != i:
                raise VocabTooSmall(f"vocab.txt does not reserve {tok!r} at id {i}")
        return cls(merges, vocab, tuple(special_tokens), end_of_word_marker)


def _word_symbols(word: str, marker: str) -> tuple[str, ...]:
    return tuple(word[:-1]) + (word[-1] + marker,)


def _pre_tokenize(text: str, special_set: frozenset[str]) -> tuple[list[str], list[str]]:
    """Split on whitespace into (plain words, special-token words)."""
    plain: list[str] = []
    special: list[str] = []
    for word in text.split():
        (special if word in special_set else plain).append(word)
    return plain, special


def train_bpe(corpus: Iterable, vocab_size: int,
              special_tokens: Sequence[str] = RESERVED_TOKENS,
              end_of_word_marker: str = END_OF_WORD,
              min_pair_freq: int = 2) -> BpeModel:
    """Learn a BPE model from a corpus of normalized texts.

    Pair counts are maintained incrementally (only words containing the
    merged pair are recounted); selection per iteration is a single
    deterministic reduction, so the learned merge list is byte-reproducible.
    """
    special = tuple(special_tokens)
    special_set = frozenset(special)

    word_freqs: Counter[str] = Counter()
    for doc in corpus:
        text = doc.text if isinstance(doc, NormalizedText) else doc
        plain, _ = _pre_tokenize(text, special_set)
        word_freqs.update(plain)
    if not word_freqs:
        raise EmptyCorpus("no trainable words in corpus")

    words: list[list[str]] = []
    freqs: list[int] = []
    for word in sorted(word_freqs):
        words.append(list(_word_symbols(word, end_of_word_marker)))
        freqs.append(word_freqs[word])

    alphabet = sorted({sym for w in words for sym in w})
    base_size = len(special) + len(alphabet)
    if vocab_size <= base_size:
        raise VocabTooSmall(
            f"vocab_size {vocab_size} must exceed {base_size} "
            f"({len(special)} reserved + {len(alphabet)} alphabet symbols)")

    vocab: dict[str, int] = {tok: i for i, tok in enumerate(special)}
    for sym in alphabet:
        vocab[sym] = len(vocab)

    pair_counts: Counter[tuple[str, str]] = Counter()
    pair_words: defaultdict[tuple[str, str], set[int]] = defaultdict(set)
    for wi, (syms, freq) in enumerate(zip(words, freqs)):
        for pair in zip(syms, syms[1:]):
            pair_counts[pair] += freq
            pair_words[pair].add(wi)

    merges: list[tuple[str, str]] = []
    while len(vocab) < vocab_size:
        best = None
        best_key = None
        for pair, count in pair_counts.items():
            if count < min_pair_freq:
                continue
            if pair[0] + pair[1] in special_set:
                continue
            key = (-count, pair)
            if best_key is None or key < best_key:
                best, best_key = pair, key
        if best is None:
            break
        merges.append(best)
        merged = best[0] + best[1]
        if merged not in vocab:
            vocab[merged] = len(vocab)
        for wi in list(pair_words[best]):
            old = words[wi]
            new = _apply_merge(old, best, merged)
            freq = freqs[wi]
            old_pairs = Counter(zip(old, old[1:]))
            new_pairs = Counter(zip(new, new[1:]))
            for pair, n in old_pairs.items():
                delta = new_pairs.get(pair, 0) - n
                if delta:
                    pair_counts[pair] += delta * freq
                    if pair_counts[pair] <= 0:
                        del pair_counts[pair]
                if new_pairs.get(pair, 0) == 0:
                    pair_words[pair].discard(wi)
            for pair, n in new_pairs.items():
                if pair not in old_pairs:
                    pair_counts[pair] += n * freq
                pair_words[pair].add(wi)
            words[wi] = new

    return BpeModel(merges, vocab, special, end_of_word_marker)


def _apply_merge(symbols: Sequence[str], pair: tuple[str, str], merged: str) -> list[str]:
    out: list[str] = []
    i = 0
    n = len(symbols)
    left, right = pair
    while i < n:
        if i < n - 1 and symbols[i] == left and symbols[i + 1] == right:
            out.append(merged)
            i += 2
        else:
            out.append(symbols[i])
            i += 1
    return out


def _encode_word(model: BpeModel, word: str) -> tuple[int, ...]:
    cached = model._word_cache.get(word)
    if cached is not None:
        return cached
    symbols = list(_word_symbols(word, model.end_of_word_marker))
    ranks = model._ranks
    while len(symbols) > 1:
        best_rank = None
        best_pair = None
        for pair in zip(symbols, symbols[1:]):
            rank = ranks.get(pair)
            if rank is not None and (best_rank is None or rank < best_rank):
                best_rank, best_pair = rank, pair
        if best_pair is None:
            break
        symbols = _apply_merge(symbols, best_pair, best_pair[0] + best_pair[1])
    vocab = model.vocab
    ids = tuple(vocab.get(sym, UNK_ID) for sym in symbols)
    model._word_cache[word] = ids
    return ids


def encode(model: BpeModel, text: str, source_id: str = "") -> TokenSequence:
    """Encode text to token ids; special tokens map to exactly one id each.

    Characters outside the training alphabet become the unknown token.  No
    structural begin/end wrapping happens at this layer.
    """
    special_ids = model.vocab
    special_set = model._special_set
    ids: list[int] = []
    for word in text.split():
        if word in special_set:
            ids.append(special_ids[word])
        else:
            ids.extend(_encode_word(model, word))
    return TokenSequence(tuple(ids), source_id)


def decode(model: BpeModel, seq: TokenSequence | Sequence[int]) -> str:
    """Inverse of encode up to the unknown token."""
    ids = seq.ids if isinstance(seq, TokenSequence) else seq
    marker = model.end_of_word_marker
    special_set = model._special_set
    parts: list[str] = []
    for token_id in ids:
        token = model.token_of(token_id)
        if token in special_set:
            parts.append(token + " ")
        else:
            parts.append(token.replace(marker, " "))
    return "".join(parts).rstrip(" ")


def subwords_per_text(model: BpeModel, text: str) -> int:
    """Number of subword tokens encode() produces for this text."""
    return len(encode(model, text).ids)
