"""Command-line pipeline: normalize, train-tokenizer, encode, pack, stats,
split, prompt, cost, and bench subcommands.

Configuration precedence is flags > config file > built-in defaults; the
config file is plain ``key = value`` text with ``#`` comments.  Every stage
writes its artifact atomically (temp file + rename), so an interrupted run
never leaves a partial file at the final path.  Record-mapping stages
(normalize, encode) use an order-preserving parallel map whose worker count
is configurable; parallelism never changes the output bytes.

Exit codes: 0 success, 1 usage error, 2 data error, 3 I/O error.
"""

from __future__ import annotations

import os
from concurrent.futures import ProcessPoolExecutor
from itertools import islice
from typing import Iterable, Iterator

import click

from . import bench as bench_mod
from . import blocks as blocks_mod
from .bpe import BpeModel, encode as bpe_encode, train_bpe
from .errors import BadConfig, DataError, ToolkitError
from .evaluate import (
    estimate_cost,
    format_usd,
    leave_one_dataset_out,
    load_pricing,
    render_causal_prompt,
    render_chat_messages,
    stratified_kfold,
)
from .figures import render_report_figures
from .normalize import EmojiLexicon, RawTweet, normalize_tweet
from .records import atomic_write, json_line, read_tweet_records, read_json_records
from .stats import build_corpus_report, load_manifest, write_corpus_report

DEFAULTS = {
    "block_len": 128,
    "mask_rate": 0.15,
    "vocab_size": 100_000,
    "min_tokens": 10,
    "seed": 0,
    "batch_size": 1000,
    "repeats": 100,
    "workers": 0,       # 0 = hardware parallelism
    "n_samples": 1000,
}

_CHUNK_RECORDS = 512
_current_stage = ""


def load_config_file(path) -> dict[str, str]:
    values: dict[str, str] = {}
    with open(path, "r", encoding="utf-8") as f:
        for lineno, raw in enumerate(f, start=1):
            line = raw.split("#", 1)[0].strip()
            if not line:
                continue
            key, sep, value = line.partition("=")
            if not sep:
                raise BadConfig(f"{path}:{lineno}: expected 'key = value'")
            values[key.strip()] = value.strip()
    return values


def _resolve(ctx: click.Context, key: str, flag_value):
    """flags > config file > defaults, typed by the default value."""
    if flag_value is not None:
        return flag_value
    file_values: dict[str, str] = ctx.obj.get("config_values", {})
    default = DEFAULTS[key]
    if key in file_values:
        raw = file_values[key]
        try:
            return type(default)(raw)
        except ValueError as e:
            raise BadConfig(f"config key {key!r}: {e}") from e
    return default


# ---------------------------------------------------------------------------
# Order-preserving parallel record map.  Worker state (lexicon, model) is
# loaded once per process via the initializer; results stream back in input
# order.  Inputs that fit one chunk run serially regardless of workers.

_worker_lexicon: EmojiLexicon | None = None
_worker_model: BpeModel | None = None


def _init_normalize_worker(lexicon_path: str | None) -> None:
    global _worker_lexicon
    _worker_lexicon = (EmojiLexicon.from_file(lexicon_path)
                       if lexicon_path else EmojiLexicon.bundled())


def _normalize_chunk(records: list[dict]) -> list[str]:
    out = []
    for rec in records:
        tweet = RawTweet(rec["id"], rec["text"], bool(rec.get("is_retweet", False)))
        norm = normalize_tweet(tweet, _worker_lexicon)
        out.append(json_line({
            "id": tweet.id,
            "text": norm.text,
            "is_retweet": tweet.is_retweet,
            "spans": [{"kind": s.kind, "start": s.start, "end": s.end,
                       "payload": s.payload} for s in norm.spans],
        }))
    return out


def _init_encode_worker(model_dir: str) -> None:
    global _worker_model
    _worker_model = BpeModel.load(model_dir)


def _encode_chunk(records: list[dict]) -> list[str]:
    out = []
    for rec in records:
        seq = bpe_encode(_worker_model, rec["text"], rec["id"])
        out.append(json_line({"id": rec["id"], "ids": list(seq.ids)}))
    return out


def _chunked(records: Iterable[dict], size: int) -> Iterator[list[dict]]:
    it = iter(records)
    while True:
        chunk = list(islice(it, size))
        if not chunk:
            return
        yield chunk


def _map_record_lines(records: Iterable[dict], chunk_fn, initializer,
                      initargs: tuple, workers: int) -> Iterator[str]:
    if workers < 0:
        raise BadConfig("workers must be non-negative")
    if workers == 0:
        workers = os.cpu_count() or 1
    chunks = _chunked(records, _CHUNK_RECORDS)
    first = next(chunks, None)
    if first is None:
        return
    second = next(chunks, None)
    if workers <= 1 or second is None:
        initializer(*initargs)
        yield from chunk_fn(first)
        if second is not None:
            yield from chunk_fn(second)
            for chunk in chunks:
                yield from chunk_fn(chunk)
        return

    def all_chunks():
        yield first
        yield second
        yield from chunks

    with ProcessPoolExecutor(max_workers=workers, initializer=initializer,
                             initargs=initargs) as ex:
        for lines in ex.map(chunk_fn, all_chunks()):
            yield from lines


def _write_lines(path, lines: Iterable[str]) -> int:
    n = 0
    with atomic_write(path) as f:
        for line in lines:
            f.write(line)
            f.write("\n")
            n += 1
    return n


# ---------------------------------------------------------------------------


@click.group()
@click.option("--seed", type=int, default=None, help="Global RNG seed.")
@click.option("--workers", type=int, default=None,
              help="Worker processes for record stages (0 = hardware parallelism).")
@click.option("--config", "config_path", type=click.Path(exists=True, dir_okay=False),
              default=None, help="Plain key=value config file.")
@click.pass_context
def cli(ctx, seed, workers, config_path):
    """Corpus preparation and evaluation-protocol pipeline."""
    ctx.ensure_object(dict)
    ctx.obj["config_values"] = load_config_file(config_path) if config_path else {}
    ctx.obj["seed"] = seed
    ctx.obj["workers"] = workers


def _stage(name: str) -> None:
    global _current_stage
    _current_stage = name


@cli.command()
@click.option("--input", "input_path", required=True, type=click.Path(exists=True, dir_okay=False))
@click.option("--output", "output_path", required=True, type=click.Path())
@click.option("--lexicon", "lexicon_path", type=click.Path(exists=True, dir_okay=False),
              default=None, help="Extra emoji lexicon (tab-separated), overrides bundled names.")
@click.pass_context
def normalize(ctx, input_path, output_path, lexicon_path):
    """Rewrite entities in raw tweet records."""
    _stage("normalize")
    workers = _resolve(ctx, "workers", ctx.obj.get("workers"))
    lines = _map_record_lines(read_tweet_records(input_path), _normalize_chunk,
                              _init_normalize_worker, (lexicon_path,), workers)
    n = _write_lines(output_path, lines)
    click.echo(f"normalize: wrote {n} records to {output_path}")


@cli.command("train-tokenizer")
@click.option("--input", "input_path", required=True, type=click.Path(exists=True, dir_okay=False))
@click.option("--model-dir", required=True, type=click.Path(file_okay=False))
@click.option("--vocab-size", type=int, default=None)
@click.pass_context
def train_tokenizer(ctx, input_path, model_dir, vocab_size):
    """Train the BPE model on normalized records."""
    _stage("train-tokenizer")
    vocab_size = _resolve(ctx, "vocab_size", vocab_size)
    if vocab_size <= 0:
        raise BadConfig("vocab_size must be positive")
    texts = (rec["text"] for rec in read_tweet_records(input_path))
    model = train_bpe(texts, vocab_size)
    model.save(model_dir)
    click.echo(f"train-tokenizer: {model.vocab_size} tokens, "
               f"{len(model.merges)} merges -> {model_dir}")


@cli.command("encode")
@click.option("--input", "input_path", required=True, type=click.Path(exists=True, dir_okay=False))
@click.option("--model-dir", required=True, type=click.Path(exists=True, file_okay=False))
@click.option("--output", "output_path", required=True, type=click.Path())
@click.pass_context
def encode_cmd(ctx, input_path, model_dir, output_path):
    """Encode normalized records to token-id records."""
    _stage("encode")
    workers = _resolve(ctx, "workers", ctx.obj.get("workers"))
    lines = _map_record_lines(read_tweet_records(input_path), _encode_chunk,
                              _init_encode_worker, (model_dir,), workers)
    n = _write_lines(output_path, lines)
    click.echo(f"encode: wrote {n} records to {output_path}")


@cli.command()
@click.option("--input", "input_path", required=True, type=click.Path(exists=True, dir_okay=False))
@click.option("--output", "output_path", required=True, type=click.Path())
@click.option("--block-len", type=int, default=None)
@click.option("--mask-rate", type=float, default=None)
@click.option("--seed", type=int, default=None)
@click.option("--masked-output", type=click.Path(), default=None,
              help="Also write dynamically masked blocks (requires --model-dir).")
@click.option("--model-dir", type=click.Path(exists=True, file_okay=False), default=None)
@click.option("--entity-tokens-eligible", is_flag=True, default=False,
              help="Allow masking of the nine entity tokens.")
@click.pass_context
def pack(ctx, input_path, output_path, block_len, mask_rate, seed,
         masked_output, model_dir, entity_tokens_eligible):
    """Pack encoded records into fixed-length sequence blocks."""
    _stage("pack")
    block_len = _resolve(ctx, "block_len", block_len)
    mask_rate = _resolve(ctx, "mask_rate", mask_rate)
    seed = _resolve(ctx, "seed", seed if seed is not None else ctx.obj.get("seed"))
    if block_len < blocks_mod.MIN_BLOCK_LEN:
        raise BadConfig(f"block_len {block_len} is below the minimum {blocks_mod.MIN_BLOCK_LEN}")
    if masked_output and not model_dir:
        raise BadConfig("--masked-output requires --model-dir for the vocabulary size")

    def sequences():
        from .bpe import TokenSequence
        for rec in read_json_records(input_path):
            ids = rec.get("ids")
            if not isinstance(ids, list):
                raise DataError(f"{input_path}: record without 'ids' array")
            yield TokenSequence(tuple(int(i) for i in ids), str(rec.get("id", "")))

    packed = list(blocks_mod.pack_blocks(sequences(), block_len))
    n = blocks_mod.write_blocks(output_path, packed, block_len)
    click.echo(f"pack: wrote {n} blocks of {block_len} to {output_path}")
    if masked_output:
        model = BpeModel.load(model_dir)
        masked = (
            blocks_mod.mask_block(b, mask_rate, blocks_mod.block_seed(seed, i),
                                  model.vocab_size, entity_tokens_eligible)
            for i, b in enumerate(packed)
        )
        m = blocks_mod.write_masked_blocks(masked_output, masked, block_len)
        click.echo(f"pack: wrote {m} masked blocks to {masked_output}")


@cli.command()
@click.option("--input", "input_path", required=True, type=click.Path(exists=True, dir_okay=False))
@click.option("--model-dir", required=True, type=click.Path(exists=True, file_okay=False))
@click.option("--outdir", required=True, type=click.Path(file_okay=False))
@click.option("--min-tokens", type=int, default=None)
@click.option("--whitespace-tokens", is_flag=True, default=False,
              help="Gate the length filter on whitespace tokens instead of subwords.")
@click.option("--figures/--no-figures", default=True)
@click.pass_context
def stats(ctx, input_path, model_dir, outdir, min_tokens, whitespace_tokens, figures):
    """Filter a normalized stream and write corpus statistics."""
    _stage("stats")
    min_tokens = _resolve(ctx, "min_tokens", min_tokens)
    model = BpeModel.load(model_dir)
    tweets = (RawTweet(rec["id"], rec["text"], bool(rec.get("is_retweet", False)))
              for rec in read_tweet_records(input_path))
    report = build_corpus_report(tweets, model, min_tokens, whitespace_tokens)
    written = write_corpus_report(report, outdir)
    if figures:
        written += render_report_figures(report, outdir)
    click.echo(f"stats: kept {report.n_tweets} tweets "
               f"({report.n_dropped_retweets} retweets, {report.n_dropped_short} short dropped); "
               f"{len(written)} files in {outdir}")


@cli.command()
@click.option("--manifest", "manifest_paths", required=True, multiple=True,
              type=click.Path(exists=True, dir_okay=False),
              help="Labeled manifest file; repeat for several datasets.")
@click.option("--k", type=int, default=5, show_default=True)
@click.option("--seed", type=int, default=None)
@click.option("--output", "output_path", required=True, type=click.Path())
@click.option("--held-out", default=None, help="Dataset name for a leave-one-dataset-out split.")
@click.option("--fold", type=int, default=0, show_default=True)
@click.option("--ood-output", type=click.Path(), default=None)
@click.pass_context
def split(ctx, manifest_paths, k, seed, output_path, held_out, fold, ood_output):
    """Stratified k-fold assignment, optionally a leave-one-dataset-out split."""
    _stage("split")
    seed = _resolve(ctx, "seed", seed if seed is not None else ctx.obj.get("seed"))
    manifests = [load_manifest(p) for p in manifest_paths]
    assignments = {m.name: stratified_kfold(m, k, seed) for m in manifests}
    lines = []
    for m in manifests:
        assignment = assignments[m.name]
        for inst in m.instances:
            lines.append(json_line({"id": inst.id, "dataset": m.name,
                                    "fold": assignment.fold_of[inst.id]}))
    _write_lines(output_path, lines)
    click.echo(f"split: wrote {len(lines)} fold assignments to {output_path}")
    if held_out is not None:
        if ood_output is None:
            raise BadConfig("--held-out requires --ood-output")
        ood = leave_one_dataset_out(manifests, held_out, assignments, fold)
        with atomic_write(ood_output) as f:
            f.write(json_line({
                "held_out": ood.held_out_dataset,
                "fold": ood.fold,
                "k": k,
                "train_ids": sorted(ood.train_ids),
                "test_ids": sorted(ood.test_ids),
            }))
            f.write("\n")
        click.echo(f"split: OOD {held_out}/fold {fold}: "
                   f"{len(ood.train_ids)} train, {len(ood.test_ids)} test -> {ood_output}")


@cli.command()
@click.option("--input", "input_path", required=True, type=click.Path(exists=True, dir_okay=False))
@click.option("--task", type=click.Choice(["sentiment", "hate"]), required=True)
@click.option("--style", type=click.Choice(["causal", "chat"]), default="causal",
              show_default=True)
@click.option("--output", "output_path", required=True, type=click.Path())
@click.option("--inference", is_flag=True, default=False,
              help="Render label-free prompts (causal style only).")
@click.pass_context
def prompt(ctx, input_path, task, style, output_path, inference):
    """Render fine-tuning or inference prompts from labeled records."""
    _stage("prompt")
    if style == "chat" and inference:
        raise BadConfig("chat prompts require labels; --inference applies to causal style")

    def rendered():
        for i, rec in enumerate(read_json_records(input_path), start=1):
            text = rec.get("text")
            if not isinstance(text, str):
                raise DataError(f"{input_path}:{i}: record needs a string 'text'")
            label = rec.get("label")
            if not inference and not isinstance(label, str):
                raise DataError(f"{input_path}:{i}: record needs a string 'label'")
            if style == "causal":
                yield render_causal_prompt(task, text, None if inference else label)
            else:
                yield json_line(render_chat_messages(text, label).to_dict())

    n = _write_lines(output_path, rendered())
    click.echo(f"prompt: wrote {n} {style} prompts to {output_path}")


@cli.command()
@click.option("--tokens", "n_tokens", required=True, type=int)
@click.option("--tweets", "n_tweets", required=True, type=int)
@click.option("--pricing", "pricing_path", type=click.Path(exists=True, dir_okay=False),
              default=None)
@click.option("--output", "output_path", type=click.Path(), default=None)
@click.pass_context
def cost(ctx, n_tokens, n_tweets, pricing_path, output_path):
    """Estimate hosted-model inference cost for a corpus."""
    _stage("cost")
    pricing = load_pricing(pricing_path) if pricing_path else None
    report = estimate_cost(n_tokens, n_tweets, pricing)
    lines = [
        f"n_tokens: {report.n_tokens}",
        f"n_tweets: {report.n_tweets}",
        f"input_cost_usd: {format_usd(report.input_cost)}",
        f"output_cost_usd: {format_usd(report.output_cost)}",
        f"total_usd: {format_usd(report.total)}",
    ]
    for line in lines:
        click.echo(line)
    if output_path:
        _write_lines(output_path, lines)


@cli.command()
@click.option("--input", "input_path", required=True, type=click.Path(exists=True, dir_okay=False))
@click.option("--model-dir", required=True, type=click.Path(exists=True, file_okay=False))
@click.option("--lexicon", "lexicon_path", type=click.Path(exists=True, dir_okay=False), default=None)
@click.option("--repeats", type=int, default=None)
@click.option("--batch-size", type=int, default=None)
@click.option("--block-len", type=int, default=None)
@click.option("--n-samples", type=int, default=None,
              help="Expected sample size; mismatch is a data error.")
@click.option("--output", "output_path", type=click.Path(), default=None)
@click.pass_context
def bench(ctx, input_path, model_dir, lexicon_path, repeats, batch_size,
          block_len, n_samples, output_path):
    """Benchmark normalize+encode+pad throughput on an in-memory sample."""
    _stage("bench")
    repeats = _resolve(ctx, "repeats", repeats)
    batch_size = _resolve(ctx, "batch_size", batch_size)
    block_len = _resolve(ctx, "block_len", block_len)
    n_samples = _resolve(ctx, "n_samples", n_samples)
    model = BpeModel.load(model_dir)
    lexicon = EmojiLexicon.from_file(lexicon_path) if lexicon_path else None
    tweets = [RawTweet(rec["id"], rec["text"], bool(rec.get("is_retweet", False)))
              for rec in read_tweet_records(input_path)]
    report = bench_mod.bench_throughput(tweets, model, lexicon,
                                        block_len=block_len, repeats=repeats,
                                        batch_size=batch_size, n_samples=n_samples)
    for line in report.lines():
        click.echo(line)
    if output_path:
        _write_lines(output_path, report.lines())


def main(argv=None) -> int:
    """Entry point with the documented exit-code mapping."""
    try:
        cli.main(args=argv, standalone_mode=False)
    except click.exceptions.Exit as e:
        return e.exit_code
    except click.UsageError as e:
        click.echo(f"usage error: {e.format_message()}", err=True)
        return 1
    except BadConfig as e:
        click.echo(_err_prefix() + str(e), err=True)
        return 1
    except DataError as e:
        click.echo(_err_prefix() + str(e), err=True)
        return 2
    except ToolkitError as e:
        click.echo(_err_prefix() + str(e), err=True)
        return 2
    except OSError as e:
        click.echo(_err_prefix() + f"I/O failure: {e}", err=True)
        return 3
    return 0


def _err_prefix() -> str:
    return f"error in {_current_stage}: " if _current_stage else "error: "


if __name__ == "__main__":
    import sys

    sys.exit(main())
