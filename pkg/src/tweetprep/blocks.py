"""Fixed-length sequence blocks for masked-language-model training.

Documents are packed densely: token streams are concatenated with a
document-separator token (the structural ``</s>``) appended after every
document, then sliced into contiguous blocks of ``block_len`` ids.  Only the
final partial block is padded, so the block count is exactly
``ceil(total_tokens_with_separators / block_len)``.  No begin/end wrapping
is added beyond the separator.

Masking follows the standard dynamic-MLM recipe: each eligible position is
independently selected with probability ``rate``; of the selected positions
80% become the mask token, 10% a uniform random vocabulary id (structural
ids excluded), and 10% stay unchanged.  Labels hold the original id at
selected positions and -100 everywhere else.  The RNG is numpy's PCG64; a
per-block stream derived from (global_seed, block_index) makes re-epoch
masking differ while staying replayable.

Block files are binary: magic ``SQBK`` (masked: ``MSKB``), a version byte,
little-endian u32 block length, then per record u32 n_real (masked: u64
seed) followed by block_len u32 ids (masked: plus block_len i32 labels).
"""

from __future__ import annotations

import math
import struct
from dataclasses import dataclass
from fractions import Fraction
from typing import Iterable, Iterator

import numpy as np

from .bpe import END_ID, MASK_ID, N_RESERVED, N_STRUCTURAL, PAD_ID, TokenSequence
from .errors import BadConfig, BlockFormatError
from .records import atomic_write

IGNORE_LABEL = -100
SEPARATOR_ID = END_ID
MIN_BLOCK_LEN = 4

BLOCK_MAGIC = b"SQBK"
MASKED_MAGIC = b"MSKB"
FORMAT_VERSION = 1


@dataclass
class SequenceBlock:
    """block_len token ids; positions at and beyond n_real are padding."""

    ids: np.ndarray
    n_real: int

    def __post_init__(self):
        self.ids = np.asarray(self.ids, dtype=np.int64)


@dataclass
class MaskedBlock:
    """A corrupted block: ids after masking, MLM labels, and the seed used."""

    ids: np.ndarray
    labels: np.ndarray
    seed: int


def pack_blocks(stream: Iterable[TokenSequence], block_len: int,
                pad_id: int = PAD_ID,
                separator_id: int = SEPARATOR_ID) -> Iterator[SequenceBlock]:
    """Slice a document stream into dense fixed-length blocks.

    A separator token is appended after every document; only the final
    partial block is padded.
    """
    if block_len < MIN_BLOCK_LEN:
        raise BadConfig(f"block_len {block_len} is below the minimum {MIN_BLOCK_LEN}")
    buf: list[int] = []
    for seq in stream:
        buf.extend(seq.ids)
        buf.append(separator_id)
        while len(buf) >= block_len:
            yield SequenceBlock(np.array(buf[:block_len], dtype=np.int64), block_len)
            del buf[:block_len]
    if buf:
        n_real = len(buf)
        buf.extend([pad_id] * (block_len - n_real))
        yield SequenceBlock(np.array(buf, dtype=np.int64), n_real)


def block_seed(global_seed: int, block_index: int) -> int:
    """Per-block RNG seed derived from the global seed and block index."""
    ss = np.random.SeedSequence([int(global_seed), int(block_index)])
    return int(ss.generate_state(1, np.uint64)[0])


def mask_block(block: SequenceBlock, rate: float, rng_seed: int,
               vocab_size: int,
               entity_tokens_eligible: bool = False) -> MaskedBlock:
    """Sample an MLM corruption pattern for one block, deterministically.

    Pad, structural, separator, and (by default) the nine entity tokens are
    never selected; set ``entity_tokens_eligible`` to allow corrupting the
    entity tags as well.
    """
    if not 0.0 <= rate <= 1.0:
        raise BadConfig(f"mask rate {rate} outside [0, 1]")
    ids = block.ids
    block_len = len(ids)
    rng = np.random.Generator(np.random.PCG64(rng_seed))
    u_select = rng.random(block_len)
    u_branch = rng.random(block_len)
    random_ids = rng.integers(N_STRUCTURAL, vocab_size, size=block_len, dtype=np.int64)

    floor = N_STRUCTURAL if entity_tokens_eligible else N_RESERVED
    eligible = ids >= floor
    selected = eligible & (u_select < rate)

    labels = np.full(block_len, IGNORE_LABEL, dtype=np.int64)
    labels[selected] = ids[selected]

    new_ids = ids.copy()
    new_ids[selected & (u_branch < 0.8)] = MASK_ID
    random_branch = selected & (u_branch >= 0.8) & (u_branch < 0.9)
    new_ids[random_branch] = random_ids[random_branch]
    return MaskedBlock(new_ids, labels, rng_seed)


def estimate_block_count(total_bytes: int, avg_subwords_per_byte, block_len: int) -> int:
    """ceil(total_bytes * avg_subwords_per_byte / block_len).

    The rate is interpreted as a decimal quantity (``0.1`` means exactly
    one tenth), so exact divisions never round up from float noise.
    """
    if total_bytes < 0:
        raise BadConfig("total_bytes must be non-negative")
    if block_len <= 0:
        raise BadConfig("block_len must be positive")
    try:
        rate = Fraction(str(avg_subwords_per_byte))
    except (ValueError, ZeroDivisionError) as e:
        raise BadConfig(f"bad avg_subwords_per_byte {avg_subwords_per_byte!r}") from e
    if rate <= 0:
        raise BadConfig("avg_subwords_per_byte must be positive")
    if total_bytes == 0:
        return 0
    return math.ceil(total_bytes * rate / block_len)


def write_blocks(path, blocks: Iterable[SequenceBlock], block_len: int) -> int:
    n = 0
    with atomic_write(path, "wb") as f:
        f.write(BLOCK_MAGIC + bytes([FORMAT_VERSION]) + struct.pack("<I", block_len))
        for b in blocks:
            f.write(struct.pack("<I", b.n_real))
            f.write(b.ids.astype("<u4").tobytes())
            n += 1
    return n


def read_blocks(path) -> Iterator[SequenceBlock]:
    with open(path, "rb") as f:
        header = f.read(9)
        if len(header) != 9 or header[:4] != BLOCK_MAGIC:
            raise BlockFormatError(f"{path}: not a block file")
        if header[4] != FORMAT_VERSION:
            raise BlockFormatError(f"{path}: unsupported version {header[4]}")
        (block_len,) = struct.unpack("<I", header[5:9])
        record = 4 + 4 * block_len
        while True:
            chunk = f.read(record)
            if not chunk:
                return
            if len(chunk) != record:
                raise BlockFormatError(f"{path}: truncated block record")
            (n_real,) = struct.unpack("<I", chunk[:4])
            ids = np.frombuffer(chunk[4:], dtype="<u4").astype(np.int64)
            yield SequenceBlock(ids, n_real)


def write_masked_blocks(path, masked: Iterable[MaskedBlock], block_len: int) -> int:
    n = 0
    with atomic_write(path, "wb") as f:
        f.write(MASKED_MAGIC + bytes([FORMAT_VERSION]) + struct.pack("<I", block_len))
        for b in masked:
            f.write(struct.pack("<Q", b.seed))
            f.write(b.ids.astype("<u4").tobytes())
            f.write(b.labels.astype("<i4").tobytes())
            n += 1
    return n


def read_masked_blocks(path) -> Iterator[MaskedBlock]:
    with open(path, "rb") as f:
        header = f.read(9)
        if len(header) != 9 or header[:4] != MASKED_MAGIC:
            raise BlockFormatError(f"{path}: not a masked-block file")
        if header[4] != FORMAT_VERSION:
            raise BlockFormatError(f"{path}: unsupported version {header[4]}")
        (block_len,) = struct.unpack("<I", header[5:9])
        record = 8 + 8 * block_len
        while True:
            chunk = f.read(record)
            if not chunk:
                return
            if len(chunk) != record:
                raise BlockFormatError(f"{path}: truncated masked record")
            (seed,) = struct.unpack("<Q", chunk[:8])
            ids = np.frombuffer(chunk[8:8 + 4 * block_len], dtype="<u4").astype(np.int64)
            labels = np.frombuffer(chunk[8 + 4 * block_len:], dtype="<i4").astype(np.int64)
            yield MaskedBlock(ids, labels, seed)
