"""Corpus preparation and evaluation-protocol toolkit for Turkish
social-media text: entity normalization, BPE tokenization with reserved
special tokens, MLM sequence-block packing and masking, corpus statistics,
cross-validation and leave-one-dataset-out splitting, prompt rendering,
inference-cost estimation, and throughput benchmarking."""

from .bench import BenchReport, bench_throughput
from .blocks import (
    MaskedBlock,
    SequenceBlock,
    block_seed,
    estimate_block_count,
    mask_block,
    pack_blocks,
)
from .bpe import (
    BpeModel,
    TokenSequence,
    decode,
    encode,
    subwords_per_text,
    train_bpe,
)
from .domains import extract_domain
from .evaluate import (
    ChatPromptRecord,
    CostReport,
    FoldAssignment,
    OodSplit,
    estimate_cost,
    leave_one_dataset_out,
    render_causal_prompt,
    render_chat_messages,
    stratified_kfold,
    weighted_f1,
)
from .normalize import (
    EmojiLexicon,
    EntitySpan,
    NormalizedText,
    RawTweet,
    emoji_name,
    normalize_tweet,
    scan_entities,
)
from .stats import (
    CorpusReport,
    DatasetManifest,
    Histogram,
    build_corpus_report,
    filter_pretrain,
    load_manifest,
    special_token_stats,
    summarize_manifest,
    token_length_stats,
)

__version__ = "0.1.0"

__all__ = [
    "BenchReport", "bench_throughput",
    "MaskedBlock", "SequenceBlock", "block_seed", "estimate_block_count",
    "mask_block", "pack_blocks",
    "BpeModel", "TokenSequence", "decode", "encode", "subwords_per_text", "train_bpe",
    "extract_domain",
    "ChatPromptRecord", "CostReport", "FoldAssignment", "OodSplit",
    "estimate_cost", "leave_one_dataset_out", "render_causal_prompt",
    "render_chat_messages", "stratified_kfold", "weighted_f1",
    "EmojiLexicon", "EntitySpan", "NormalizedText", "RawTweet",
    "emoji_name", "normalize_tweet", "scan_entities",
    "CorpusReport", "DatasetManifest", "Histogram", "build_corpus_report",
    "filter_pretrain", "load_manifest", "special_token_stats",
    "summarize_manifest", "token_length_stats",
    "__version__",
]
