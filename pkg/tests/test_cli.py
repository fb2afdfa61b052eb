"""CLI stages: exit codes, artifacts, atomicity, and determinism."""

import json
from pathlib import Path

import pytest

from conftest import random_tweets
from tweetprep.cli import main
from tweetprep.records import atomic_write, json_line


def write_raw(path, tweets):
    with open(path, "w", encoding="utf-8") as f:
        for t in tweets:
            f.write(json_line({"id": t.id, "text": t.text,
                               "is_retweet": t.is_retweet}) + "\n")


@pytest.fixture
def raw_file(tmp_path, fixture_tweets):
    path = tmp_path / "raw.jsonl"
    write_raw(path, fixture_tweets)
    return path


def run_chain(workdir: Path, raw: Path, seed: int = 7) -> dict[str, Path]:
    """normalize -> train-tokenizer -> encode -> pack(+mask) -> stats."""
    paths = {
        "norm": workdir / "norm.jsonl",
        "model": workdir / "model",
        "enc": workdir / "enc.jsonl",
        "blocks": workdir / "blocks.bin",
        "masked": workdir / "masked.bin",
        "stats": workdir / "stats",
    }
    assert main(["normalize", "--input", str(raw), "--output", str(paths["norm"])]) == 0
    assert main(["train-tokenizer", "--input", str(paths["norm"]),
                 "--model-dir", str(paths["model"]), "--vocab-size", "400"]) == 0
    assert main(["encode", "--input", str(paths["norm"]),
                 "--model-dir", str(paths["model"]), "--output", str(paths["enc"])]) == 0
    assert main(["pack", "--input", str(paths["enc"]), "--output", str(paths["blocks"]),
                 "--block-len", "128", "--seed", str(seed),
                 "--masked-output", str(paths["masked"]),
                 "--model-dir", str(paths["model"])]) == 0
    assert main(["stats", "--input", str(paths["norm"]), "--model-dir", str(paths["model"]),
                 "--outdir", str(paths["stats"]), "--min-tokens", "5"]) == 0
    return paths


class TestExitCodes:
    def test_normalize_count_preserving(self, tmp_path, raw_file):
        out = tmp_path / "norm.jsonl"
        assert main(["normalize", "--input", str(raw_file), "--output", str(out)]) == 0
        n_in = len(raw_file.read_text(encoding="utf-8").splitlines())
        n_out = len(out.read_text(encoding="utf-8").splitlines())
        assert n_in == n_out == 100

    def test_normalize_three_lines(self, tmp_path):
        raw = tmp_path / "raw.jsonl"
        raw.write_text('{"id":"1","text":"selam"}\n'
                       '{"id":"2","text":"@ali"}\n'
                       '{"id":"3","text":"#foo"}\n', encoding="utf-8")
        out = tmp_path / "norm.jsonl"
        assert main(["normalize", "--input", str(raw), "--output", str(out)]) == 0
        assert len(out.read_text(encoding="utf-8").splitlines()) == 3

    def test_usage_error_is_1(self):
        assert main(["normalize"]) == 1

    def test_unknown_command_is_1(self):
        assert main(["frobnicate"]) == 1

    def test_bad_block_len_is_1(self, tmp_path):
        enc = tmp_path / "enc.jsonl"
        enc.write_text('{"id":"a","ids":[14,15,16]}\n', encoding="utf-8")
        assert main(["pack", "--input", str(enc), "--output", str(tmp_path / "b.bin"),
                     "--block-len", "3"]) == 1

    def test_data_error_is_2(self, tmp_path):
        bad = tmp_path / "bad.jsonl"
        bad.write_text("not json\n", encoding="utf-8")
        assert main(["normalize", "--input", str(bad),
                     "--output", str(tmp_path / "out.jsonl")]) == 2

    def test_missing_id_is_2(self, tmp_path):
        bad = tmp_path / "bad.jsonl"
        bad.write_text('{"text":"selam"}\n', encoding="utf-8")
        assert main(["normalize", "--input", str(bad),
                     "--output", str(tmp_path / "out.jsonl")]) == 2

    def test_help_is_0(self):
        assert main(["--help"]) == 0


class TestConfigPrecedence:
    def test_config_file_then_flag(self, tmp_path):
        enc = tmp_path / "enc.jsonl"
        enc.write_text('{"id":"a","ids":[%s]}\n' % ",".join(["14"] * 20),
                       encoding="utf-8")
        cfg = tmp_path / "run.cfg"
        cfg.write_text("block_len = 8\n", encoding="utf-8")
        out1 = tmp_path / "b1.bin"
        assert main(["--config", str(cfg), "pack", "--input", str(enc),
                     "--output", str(out1)]) == 0
        # header carries block_len; config file (8) beats the default (128)
        assert out1.read_bytes()[5:9] == (8).to_bytes(4, "little")
        out2 = tmp_path / "b2.bin"
        assert main(["--config", str(cfg), "pack", "--input", str(enc),
                     "--output", str(out2), "--block-len", "16"]) == 0
        assert out2.read_bytes()[5:9] == (16).to_bytes(4, "little")

    def test_bad_config_line_is_1(self, tmp_path):
        cfg = tmp_path / "run.cfg"
        cfg.write_text("block_len\n", encoding="utf-8")
        enc = tmp_path / "enc.jsonl"
        enc.write_text('{"id":"a","ids":[14]}\n', encoding="utf-8")
        assert main(["--config", str(cfg), "pack", "--input", str(enc),
                     "--output", str(tmp_path / "b.bin")]) == 1


class TestAtomicity:
    def test_failed_write_leaves_no_artifact(self, tmp_path):
        target = tmp_path / "out.txt"
        with pytest.raises(RuntimeError):
            with atomic_write(target) as f:
                f.write("partial")
                raise RuntimeError("boom")
        assert not target.exists()
        assert list(tmp_path.iterdir()) == []

    def test_failed_write_preserves_previous(self, tmp_path):
        target = tmp_path / "out.txt"
        target.write_text("old", encoding="utf-8")
        with pytest.raises(RuntimeError):
            with atomic_write(target) as f:
                f.write("new")
                raise RuntimeError("boom")
        assert target.read_text(encoding="utf-8") == "old"

    def test_failed_stage_leaves_no_artifact(self, tmp_path):
        bad = tmp_path / "bad.jsonl"
        bad.write_text('{"id":"a","text":"x"}\nnot json\n', encoding="utf-8")
        out = tmp_path / "out.jsonl"
        assert main(["normalize", "--input", str(bad), "--output", str(out)]) == 2
        assert not out.exists()


class TestDeterminism:
    def test_full_chain_bit_identical(self, tmp_path, raw_file):
        run1 = run_chain(tmp_path / "r1", raw_file)
        run2 = run_chain(tmp_path / "r2", raw_file)
        for key in run1:
            p1, p2 = run1[key], run2[key]
            if p1.is_dir():
                files1 = sorted(f.name for f in p1.iterdir())
                files2 = sorted(f.name for f in p2.iterdir())
                assert files1 == files2
                for name in files1:
                    assert (p1 / name).read_bytes() == (p2 / name).read_bytes(), name
            else:
                assert p1.read_bytes() == p2.read_bytes(), key

    def test_parallel_matches_serial(self, tmp_path):
        raw = tmp_path / "raw.jsonl"
        write_raw(raw, random_tweets(seed=5, n=1300))
        out_serial = tmp_path / "s.jsonl"
        out_parallel = tmp_path / "p.jsonl"
        assert main(["--workers", "1", "normalize", "--input", str(raw),
                     "--output", str(out_serial)]) == 0
        assert main(["--workers", "2", "normalize", "--input", str(raw),
                     "--output", str(out_parallel)]) == 0
        assert out_serial.read_bytes() == out_parallel.read_bytes()


class TestSplitStage:
    def write_manifest(self, path, name, sizes):
        with open(path, "w", encoding="utf-8") as f:
            for label, n in sizes.items():
                for i in range(n):
                    f.write(json_line({"id": f"{name}-{label}-{i}",
                                       "text": "t", "label": label}) + "\n")

    def test_fold_records_and_ood(self, tmp_path):
        a, b = tmp_path / "A.jsonl", tmp_path / "B.jsonl"
        self.write_manifest(a, "A", {"x": 10, "y": 10})
        self.write_manifest(b, "B", {"x": 10, "y": 10})
        folds = tmp_path / "folds.jsonl"
        ood = tmp_path / "ood.json"
        assert main(["split", "--manifest", str(a), "--manifest", str(b),
                     "--k", "5", "--seed", "3", "--output", str(folds),
                     "--held-out", "A", "--fold", "0", "--ood-output", str(ood)]) == 0
        records = [json.loads(line) for line in folds.read_text(encoding="utf-8").splitlines()]
        assert len(records) == 40
        assert {r["dataset"] for r in records} == {"A", "B"}
        assert all(0 <= r["fold"] < 5 for r in records)
        blob = json.loads(ood.read_text(encoding="utf-8"))
        assert blob["held_out"] == "A"
        assert len(blob["test_ids"]) == 4
        assert len(blob["train_ids"]) == 16
        assert not set(blob["test_ids"]) & set(blob["train_ids"])

    def test_held_out_without_output_is_1(self, tmp_path):
        a = tmp_path / "A.jsonl"
        self.write_manifest(a, "A", {"x": 10, "y": 10})
        assert main(["split", "--manifest", str(a), "--output",
                     str(tmp_path / "f.jsonl"), "--held-out", "A"]) == 1

    def test_unknown_held_out_is_2(self, tmp_path):
        a = tmp_path / "A.jsonl"
        self.write_manifest(a, "A", {"x": 10, "y": 10})
        assert main(["split", "--manifest", str(a), "--output",
                     str(tmp_path / "f.jsonl"), "--held-out", "Z",
                     "--ood-output", str(tmp_path / "o.json")]) == 2


class TestPromptStage:
    def test_causal_lines(self, tmp_path):
        inp = tmp_path / "m.jsonl"
        inp.write_text('{"id":"1","text":"iyi","label":"positive"}\n', encoding="utf-8")
        out = tmp_path / "p.txt"
        assert main(["prompt", "--input", str(inp), "--task", "sentiment",
                     "--output", str(out)]) == 0
        assert out.read_text(encoding="utf-8") == \
            'Q: What is the sentiment of this Turkish text: "iyi"? A: positive\n'

    def test_inference_lines(self, tmp_path):
        inp = tmp_path / "m.jsonl"
        inp.write_text('{"id":"1","text":"iyi"}\n', encoding="utf-8")
        out = tmp_path / "p.txt"
        assert main(["prompt", "--input", str(inp), "--task", "hate",
                     "--inference", "--output", str(out)]) == 0
        assert out.read_text(encoding="utf-8").rstrip("\n").endswith("A:")

    def test_chat_records(self, tmp_path):
        inp = tmp_path / "m.jsonl"
        inp.write_text('{"id":"1","text":"iyi","label":"positive"}\n', encoding="utf-8")
        out = tmp_path / "p.jsonl"
        assert main(["prompt", "--input", str(inp), "--task", "sentiment",
                     "--style", "chat", "--output", str(out)]) == 0
        blob = json.loads(out.read_text(encoding="utf-8"))
        assert [m["role"] for m in blob["messages"]] == ["system", "user", "assistant"]

    def test_chat_inference_is_1(self, tmp_path):
        inp = tmp_path / "m.jsonl"
        inp.write_text('{"id":"1","text":"iyi"}\n', encoding="utf-8")
        assert main(["prompt", "--input", str(inp), "--task", "sentiment",
                     "--style", "chat", "--inference",
                     "--output", str(tmp_path / "p.jsonl")]) == 1


class TestCostStage:
    def test_cost_output(self, tmp_path, capsys):
        out = tmp_path / "cost.txt"
        assert main(["cost", "--tokens", "40200000000", "--tweets", "0",
                     "--output", str(out)]) == 0
        text = out.read_text(encoding="utf-8")
        assert "input_cost_usd: 40200" in text
        assert "total_usd: 40200" in text

    def test_custom_pricing_file(self, tmp_path):
        pricing = tmp_path / "p.cfg"
        pricing.write_text("input_price_per_token = 0.001\n"
                           "output_price_per_token = 0.002\n"
                           "output_tokens_per_tweet = 1\n", encoding="utf-8")
        out = tmp_path / "cost.txt"
        assert main(["cost", "--tokens", "1000", "--tweets", "10",
                     "--pricing", str(pricing), "--output", str(out)]) == 0
        text = out.read_text(encoding="utf-8")
        assert "input_cost_usd: 1" in text
        assert "output_cost_usd: 0.02" in text
