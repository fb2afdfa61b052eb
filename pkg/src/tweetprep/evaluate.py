"""Deterministic evaluation-protocol machinery.

Stratified k-fold assignment shuffles each class by seed and deals
instances round-robin to folds, which keeps every fold's per-class count
within one instance of exact proportionality.  Leave-one-dataset-out
splits take the held-out dataset's test fold as the test set and the union
of the remaining datasets' training folds as the training set, so train and
test are disjoint by construction.

Prompt rendering reproduces the fine-tuning templates character for
character; cost estimation is exact decimal arithmetic with prices read
from a bundled config file (they track a hosted-model price sheet, so they
are data, not code).
"""

from __future__ import annotations

import random
from dataclasses import dataclass
from decimal import Decimal
from functools import lru_cache
from importlib import resources
from typing import Iterable, Sequence

from .errors import (
    BadConfig,
    ClassTooSmall,
    EmptyInput,
    LengthMismatch,
    UnknownDataset,
)
from .stats import DatasetManifest

SENTIMENT_LABELS = ("positive", "neutral", "negative")

CAUSAL_QUESTIONS = {
    "sentiment": "What is the sentiment of this Turkish text",
    "hate": "Does this Turkish text contain hate speech",
}
CHAT_SYSTEM_PROMPT = ("Vrl-gpt3.5-turbo is a chatbot that can give the "
                      "sentiment of Turkish texts.")


@dataclass
class FoldAssignment:
    """Fold index in [0, k) for every instance id of one dataset."""

    k: int
    fold_of: dict[str, int]

    def fold_ids(self, fold: int) -> set[str]:
        return {iid for iid, f in self.fold_of.items() if f == fold}


@dataclass
class OodSplit:
    held_out_dataset: str
    fold: int
    train_ids: set[str]
    test_ids: set[str]


@dataclass(frozen=True)
class ChatPromptRecord:
    """Ordered (role, content) triple: system, user, assistant."""

    messages: tuple[tuple[str, str], ...]

    def to_dict(self) -> dict:
        return {"messages": [{"role": r, "content": c} for r, c in self.messages]}

    @classmethod
    def from_dict(cls, obj: dict) -> "ChatPromptRecord":
        return cls(tuple((m["role"], m["content"]) for m in obj["messages"]))


@dataclass
class Pricing:
    input_price_per_token: Decimal
    output_price_per_token: Decimal
    output_tokens_per_tweet: int


@dataclass
class CostReport:
    n_tokens: int
    n_tweets: int
    input_cost: Decimal
    output_cost: Decimal
    total: Decimal


def stratified_kfold(manifest: DatasetManifest, k: int, seed: int) -> FoldAssignment:
    """Assign every instance to one of k folds, class proportions preserved.

    Within each class (taken in label_set order) the instance ids are
    shuffled by the seed and dealt round-robin, so per-fold per-class counts
    deviate from exact proportionality by less than one.
    """
    if k < 2:
        raise BadConfig(f"k must be at least 2, got {k}")
    rng = random.Random(seed)
    by_label: dict[str, list[str]] = {label: [] for label in manifest.label_set}
    for inst in manifest.instances:
        by_label[inst.label].append(inst.id)
    fold_of: dict[str, int] = {}
    for label in manifest.label_set:
        ids = by_label[label]
        if len(ids) < k:
            raise ClassTooSmall(label, len(ids), k)
        rng.shuffle(ids)
        for pos, iid in enumerate(ids):
            fold_of[iid] = pos % k
    return FoldAssignment(k, fold_of)


def leave_one_dataset_out(manifests: Sequence[DatasetManifest], held_out: str,
                          assignments: dict[str, FoldAssignment],
                          fold: int) -> OodSplit:
    """Train on the other datasets' training folds, test on the held-out
    dataset's test fold."""
    by_name = {m.name: m for m in manifests}
    if held_out not in by_name:
        raise UnknownDataset(f"{held_out!r} not among {sorted(by_name)}")
    held_assignment = assignments[held_out]
    if not 0 <= fold < held_assignment.k:
        raise BadConfig(f"fold {fold} outside [0, {held_assignment.k})")
    test_ids = held_assignment.fold_ids(fold)
    train_ids: set[str] = set()
    for m in manifests:
        if m.name == held_out:
            continue
        assignment = assignments[m.name]
        train_ids.update(iid for iid, f in assignment.fold_of.items() if f != fold)
    return OodSplit(held_out, fold, train_ids, test_ids)


def render_causal_prompt(task: str, text: str, label: str | None = None) -> str:
    """Q/A prompt for causal-LM fine-tuning; inference form ends after "A:"."""
    question = CAUSAL_QUESTIONS.get(task)
    if question is None:
        raise BadConfig(f"unknown task {task!r}; expected one of {sorted(CAUSAL_QUESTIONS)}")
    prompt = f'Q: {question}: "{text}"? A:'
    if label is not None:
        prompt += f" {label}"
    return prompt


def render_chat_messages(text: str, label: str) -> ChatPromptRecord:
    """System/user/assistant triple for chat fine-tuning."""
    return ChatPromptRecord((
        ("system", CHAT_SYSTEM_PROMPT),
        ("user", f'What is the sentiment of this Turkish text "{text}"?'),
        ("assistant", label),
    ))


def weighted_f1(predictions: Sequence[str], gold: Sequence[str],
                label_set: Sequence[str]) -> float:
    """Per-class F1 averaged with weights proportional to gold support."""
    if len(predictions) != len(gold):
        raise LengthMismatch(f"{len(predictions)} predictions vs {len(gold)} gold labels")
    if not gold:
        raise EmptyInput("weighted F1 needs at least one instance")
    total = len(gold)
    score = 0.0
    for label in label_set:
        tp = sum(1 for p, g in zip(predictions, gold) if p == label and g == label)
        fp = sum(1 for p, g in zip(predictions, gold) if p == label and g != label)
        fn = sum(1 for p, g in zip(predictions, gold) if p != label and g == label)
        support = tp + fn
        if support == 0:
            continue
        precision = tp / (tp + fp) if tp + fp else 0.0
        recall = tp / support
        f1 = 2 * precision * recall / (precision + recall) if precision + recall else 0.0
        score += f1 * support / total
    return score


def _parse_pricing(lines: Iterable[str]) -> Pricing:
    values: dict[str, str] = {}
    for raw in lines:
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        key, _, value = line.partition("=")
        values[key.strip()] = value.strip()
    try:
        return Pricing(
            input_price_per_token=Decimal(values["input_price_per_token"]),
            output_price_per_token=Decimal(values["output_price_per_token"]),
            output_tokens_per_tweet=int(values["output_tokens_per_tweet"]),
        )
    except (KeyError, ArithmeticError, ValueError) as e:
        raise BadConfig(f"invalid pricing config: {e}") from e


@lru_cache(maxsize=1)
def default_pricing() -> Pricing:
    text = resources.files("tweetprep.data").joinpath("pricing.cfg").read_text("utf-8")
    return _parse_pricing(text.splitlines())


def load_pricing(path) -> Pricing:
    with open(path, "r", encoding="utf-8") as f:
        return _parse_pricing(f)


def estimate_cost(n_tokens: int, n_tweets: int,
                  pricing: Pricing | None = None) -> CostReport:
    """Inference cost in USD: input tokens plus fixed-size per-tweet output.

    Exact decimal arithmetic, so the report is linear in its inputs
    componentwise.
    """
    if n_tokens < 0 or n_tweets < 0:
        raise BadConfig("token and tweet counts must be non-negative")
    p = pricing if pricing is not None else default_pricing()
    input_cost = Decimal(n_tokens) * p.input_price_per_token
    output_cost = Decimal(n_tweets) * p.output_tokens_per_tweet * p.output_price_per_token
    return CostReport(n_tokens, n_tweets, input_cost, output_cost,
                      input_cost + output_cost)


def format_usd(value: Decimal) -> str:
    """Plain decimal string without exponent or trailing zeros."""
    s = format(value, "f")
    if "." in s:
        s = s.rstrip("0").rstrip(".")
    return s or "0"
