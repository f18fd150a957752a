"""Command-line behavior: stats lines, reports, exit codes, error objects."""

from __future__ import annotations

import json
import math

import pytest
from click.testing import CliRunner

from infodist import fixtures
from infodist.cli import main, resolve_model
from infodist.errors import InfoDistError
from infodist.models import AdaptiveContextModel, UniformModel


@pytest.fixture()
def runner():
    return CliRunner()


def invoke(runner, args):
    result = runner.invoke(main, args, catch_exceptions=False)
    payload = json.loads(result.output.strip().splitlines()[-1]) if result.output.strip() else {}
    return result, payload


class TestResolveModel:
    def test_selectors(self):
        assert isinstance(resolve_model("builtin:uniform"), UniformModel)
        adaptive = resolve_model("builtin:adaptive:3")
        assert isinstance(adaptive, AdaptiveContextModel) and adaptive.order == 3
        assert resolve_model("builtin:adaptive").order == 2
        assert resolve_model(None).order == 2  # default

    def test_env_override(self, monkeypatch):
        monkeypatch.setenv("INFODIST_MODEL", "builtin:uniform")
        assert isinstance(resolve_model(None), UniformModel)

    def test_unknown_selector(self):
        with pytest.raises(InfoDistError):
            resolve_model("builtin:transformer")


class TestCompressDecompress:
    def test_round_trip_uniform(self, runner, tmp_path):
        src = tmp_path / "f.txt"
        src.write_bytes(b"the quick brown fox jumps over the lazy dog " * 500)
        idz = tmp_path / "f.idz"
        out = tmp_path / "f.out"

        result, stats = invoke(
            runner, ["compress", "--model", "builtin:uniform", str(src), str(idz)]
        )
        assert result.exit_code == 0
        assert stats["bytes_in"] == src.stat().st_size
        assert stats["chunks"] == 9
        # container overhead shrinks toward the uniform identity on real files
        assert stats["ratio"] == pytest.approx(8.0 / math.log2(257), rel=0.01)
        assert "wall_ms" in stats

        result, out_stats = invoke(
            runner, ["decompress", "--model", "builtin:uniform", str(idz), str(out)]
        )
        assert result.exit_code == 0
        assert out.read_bytes() == src.read_bytes()

    def test_round_trip_adaptive_binaryish(self, runner, tmp_path):
        src = tmp_path / "b.bin"
        src.write_bytes(bytes(range(256)) * 3)
        idz = tmp_path / "b.idz"
        out = tmp_path / "b.out"
        result, _ = invoke(runner, ["compress", "-m", "builtin:adaptive:1", str(src), str(idz)])
        assert result.exit_code == 0
        result, _ = invoke(runner, ["decompress", "-m", "builtin:adaptive:1", str(idz), str(out)])
        assert result.exit_code == 0
        assert out.read_bytes() == src.read_bytes()

    def test_corrupt_archive_fails_nonzero(self, runner, tmp_path):
        src = tmp_path / "c.txt"
        src.write_text("some corruptible content")
        idz = tmp_path / "c.idz"
        invoke(runner, ["compress", "-m", "builtin:uniform", str(src), str(idz)])
        blob = bytearray(idz.read_bytes())
        blob[-2] ^= 0xFF
        idz.write_bytes(bytes(blob))
        result = runner.invoke(
            main, ["decompress", "-m", "builtin:uniform", str(idz), str(tmp_path / "x")]
        )
        assert result.exit_code == 1
        assert "error" in json.loads(result.output)

    def test_wrong_model_mismatch(self, runner, tmp_path):
        src = tmp_path / "m.txt"
        src.write_text("written under uniform")
        idz = tmp_path / "m.idz"
        invoke(runner, ["compress", "-m", "builtin:uniform", str(src), str(idz)])
        result = runner.invoke(
            main, ["decompress", "-m", "builtin:adaptive:2", str(idz), str(tmp_path / "y")]
        )
        assert result.exit_code == 1
        assert json.loads(result.output)["error"]["type"] == "ModelMismatch"


class TestCodelen:
    def test_empty_file(self, runner, tmp_path):
        src = tmp_path / "empty.txt"
        src.write_text("")
        result, report = invoke(runner, ["codelen", "-m", "builtin:uniform", str(src)])
        assert result.exit_code == 0
        assert report["total_bits"] == 0.0 and report["token_count"] == 0

    def test_single_file_report(self, runner, tmp_path):
        src = tmp_path / "x.txt"
        src.write_text("measure me")
        result, report = invoke(runner, ["codelen", "-m", "builtin:uniform", str(src)])
        assert result.exit_code == 0
        assert report["total_bits"] == pytest.approx(10 * math.log2(257), rel=1e-9)
        assert report["ratio"] == pytest.approx(8 / math.log2(257), rel=1e-9)

    def test_pair_prints_quintuple_and_metrics(self, runner, tmp_path):
        x = tmp_path / "x.txt"; x.write_text("identical text")
        y = tmp_path / "y.txt"; y.write_text("identical text")
        result, report = invoke(
            runner,
            ["codelen", "-m", "builtin:uniform", "--separator", "", str(x), str(y)],
        )
        assert result.exit_code == 0
        assert report["m_mean"] == pytest.approx(1.0, abs=1e-9)
        assert report["m_max"] == pytest.approx(1.0, abs=1e-9)
        assert {"c_x", "c_y", "c_x_given_y", "c_y_given_x", "c_xy"} <= set(report)

    def test_empty_operand_error_object(self, runner, tmp_path):
        x = tmp_path / "x.txt"; x.write_text("")
        y = tmp_path / "y.txt"; y.write_text("nonempty")
        result = runner.invoke(main, ["codelen", str(x), str(y)])
        assert result.exit_code == 1
        assert json.loads(result.output)["error"]["type"] == "EmptyOperand"


class TestDistanceCmd:
    def test_report_fields(self, runner, tmp_path):
        x = tmp_path / "x.txt"; x.write_text("alpha beta")
        y = tmp_path / "y.txt"; y.write_text("alpha gamma")
        result, report = invoke(
            runner, ["distance", "-m", "builtin:adaptive:1", "--metric", "min", str(x), str(y)]
        )
        assert result.exit_code == 0
        assert report["metric"] == "min" and report["value"] > 0


def _write_sts(tmp_path, pairs):
    path = tmp_path / "sts.jsonl"
    with open(path, "w") as fh:
        for a, b, score in pairs:
            fh.write(json.dumps({"a": a, "b": b, "score": score}) + "\n")
    return path


class TestEval:
    def test_sts_fixture_report(self, runner, tmp_path):
        path = _write_sts(tmp_path, fixtures.sts_pairs())
        result, report = invoke(
            runner, ["eval", "sts", "-m", "builtin:adaptive:2", str(path)]
        )
        assert result.exit_code == 0
        assert report["records"] == 20
        assert -100.0 <= report["rho_x100"] <= 100.0

    def test_grid_cells_match_single_runs(self, runner, tmp_path):
        path = _write_sts(tmp_path, fixtures.sts_pairs()[:6])
        _, with_grid = invoke(
            runner, ["eval", "sts", "-m", "builtin:adaptive:1", "--grid", str(path)]
        )
        cell = next(
            c for c in with_grid["grid"]["cells"]
            if c["metric"] == "mean" and c["variant"] == "logprob"
        )
        _, single = invoke(
            runner,
            ["eval", "sts", "-m", "builtin:adaptive:1", "--metric", "mean",
             "--variant", "logprob", str(path)],
        )
        assert cell["score"] == pytest.approx(single["rho"], abs=1e-12)

    def test_classify_with_rpred(self, runner, tmp_path):
        ex, recs = fixtures.classify_fixture()
        data = tmp_path / "cls.jsonl"
        with open(data, "w") as fh:
            for text, label in recs:
                fh.write(json.dumps({"text": text, "label": label}) + "\n")
        exf = tmp_path / "exemplars.jsonl"
        with open(exf, "w") as fh:
            for cls, text in ex.items():
                fh.write(json.dumps({"class": cls, "text": text}) + "\n")
        result, report = invoke(
            runner,
            ["eval", "classify", "-m", "builtin:adaptive:2", "--rpred", "--groups", "4",
             str(data), str(exf)],
        )
        assert result.exit_code == 0
        assert report["records"] == 12
        assert len(report["rpred"]) == 4
        assert sum(b["count"] for b in report["rpred"]) == 12

    def test_rerank_fixture(self, runner, tmp_path):
        qs = tmp_path / "q.jsonl"; cs = tmp_path / "c.jsonl"; qr = tmp_path / "qrels.tsv"
        with open(qs, "w") as fq, open(cs, "w") as fc, open(qr, "w") as fr:
            for i, rec in enumerate(fixtures.rerank_fixture()):
                qid = f"q{i}"
                fq.write(json.dumps({"qid": qid, "text": rec["query"]}) + "\n")
                for docid, text in rec["candidates"]:
                    fc.write(json.dumps({"qid": qid, "docid": docid, "text": text, "bm25": 1.0}) + "\n")
                for docid, rel in rec["qrels"].items():
                    fr.write(f"{qid}\t{docid}\t{rel}\n")
        result, report = invoke(
            runner,
            ["eval", "rerank", "-m", "builtin:adaptive:2", "--metric", "min",
             str(qs), str(cs), str(qr)],
        )
        assert result.exit_code == 0
        assert 0.0 <= report["ndcg"] <= 1.0
        assert report["flagged_queries"] == 0

    def test_deterministic_output(self, runner, tmp_path):
        path = _write_sts(tmp_path, fixtures.sts_pairs()[:4])
        args = ["eval", "sts", "-m", "builtin:adaptive:1", str(path)]
        r1 = runner.invoke(main, args, catch_exceptions=False)
        r2 = runner.invoke(main, args, catch_exceptions=False)
        assert r1.output == r2.output

    def test_bundled_sts_fixture_regression(self, runner, tmp_path):
        # report values produced by the verified pipeline, locked thereafter
        path = _write_sts(tmp_path, fixtures.sts_pairs())
        _, report = invoke(runner, ["eval", "sts", "-m", "builtin:adaptive:2", str(path)])
        assert report["rho"] == pytest.approx(0.6182775916740518, abs=1e-12)
        _, rank_report = invoke(
            runner,
            ["eval", "sts", "-m", "builtin:adaptive:2", "--variant", "logrank", str(path)],
        )
        assert rank_report["rho"] == pytest.approx(0.6491162550057259, abs=1e-12)

    def test_codelen_pair_matches_counting_oracle(self, runner, tmp_path):
        from conftest import laplace_sequence_bits

        x = tmp_path / "x.txt"; x.write_text("abab")
        y = tmp_path / "y.txt"; y.write_text("abba")
        _, report = invoke(
            runner,
            ["codelen", "-m", "builtin:adaptive:0", "--separator", "", str(x), str(y)],
        )
        x_ids, y_ids = list(b"abab"), list(b"abba")
        assert report["c_x"] == pytest.approx(laplace_sequence_bits(x_ids, [], 257), abs=1e-6)
        assert report["c_x_given_y"] == pytest.approx(
            laplace_sequence_bits(x_ids, y_ids, 257), abs=1e-6
        )
        assert report["c_xy"] == pytest.approx(
            laplace_sequence_bits(x_ids, [], 257) + laplace_sequence_bits(y_ids, x_ids, 257),
            abs=1e-6,
        )
