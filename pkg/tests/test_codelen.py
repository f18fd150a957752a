"""Code-length estimators: log-prob, log-rank, joint modes, chunking."""

from __future__ import annotations

import math

import numpy as np
import pytest

from conftest import BrokenZeroModel, laplace_sequence_bits
from infodist.codelen import (
    ChunkPlan,
    JointMode,
    chunked_codelen,
    codelen_logprob,
    codelen_logrank,
    joint_codelen,
)
from infodist.coder import encode, estimate_quantized_bits
from infodist.errors import EmptyOperand, ZeroProbability
from infodist.models import AdaptiveContextModel, StaticModel, UniformModel, Vocabulary

A, B, EOS = 0, 1, 2


def tiny_adaptive(order=0):
    return AdaptiveContextModel(order=order, vocab=Vocabulary(3, 2))


class TestLogProb:
    def test_uniform_identity(self):
        report = codelen_logprob(UniformModel(), list(range(10)))
        assert report.total_bits == pytest.approx(10 * math.log2(257), rel=1e-9)
        assert report.token_count == 10

    def test_dyadic_static(self):
        report = codelen_logprob(StaticModel([0.5, 0.25, 0.25]), [0, 1, 2])
        assert report.per_token_bits == pytest.approx([1.0, 2.0, 2.0])
        assert report.total_bits == pytest.approx(5.0)

    def test_adaptive_aa_matches_counting_oracle(self):
        report = codelen_logprob(tiny_adaptive(), [A, A])
        assert report.total_bits == pytest.approx(-math.log2(1 / 3) - math.log2(2 / 4))
        assert report.total_bits == pytest.approx(laplace_sequence_bits([A, A], [], 3))

    def test_empty_is_zero(self):
        report = codelen_logprob(UniformModel(), [])
        assert report.total_bits == 0.0
        assert report.token_count == 0

    def test_total_equals_sum(self):
        report = codelen_logprob(AdaptiveContextModel(order=1), list(b"totals add up"))
        assert report.total_bits == pytest.approx(sum(report.per_token_bits), rel=1e-6)

    def test_zero_probability_raises(self):
        with pytest.raises(ZeroProbability):
            codelen_logprob(BrokenZeroModel(), [0])


class TestLogRank:
    def test_modal_token_costs_nothing(self):
        report = codelen_logrank(StaticModel([0.8, 0.1, 0.1]), [0, 0, 0])
        assert report.total_bits == 0.0

    def test_uniform_ties_break_by_id(self):
        model = UniformModel(vocab=Vocabulary(3, 2))
        assert codelen_logrank(model, [0, 0]).total_bits == 0.0
        assert codelen_logrank(model, [1]).total_bits == pytest.approx(1.0)  # rank 2

    def test_values_are_log2_of_integers(self):
        report = codelen_logrank(AdaptiveContextModel(order=1), list(b"rank lengths"))
        for bits in report.per_token_bits:
            rank = 2.0**bits
            assert rank >= 1.0
            assert abs(rank - round(rank)) < 1e-6


class TestJoint:
    def test_context_free_identities(self):
        model = UniformModel()
        x, y = list(b"abc"), list(b"defgh")
        sep = [10]
        c_xy, c_x_y, c_y_x = joint_codelen(model, x, y, JointMode.CONDITIONAL, sep)
        c_x = codelen_logprob(model, x).total_bits
        c_y = codelen_logprob(model, y).total_bits
        assert c_x_y == pytest.approx(c_x)
        assert c_y_x == pytest.approx(c_y)
        assert c_xy == pytest.approx(c_x + c_y)
        # concatenation mode includes separator cost in the joint
        c_xy2, _, _ = joint_codelen(model, x, y, JointMode.CONCATENATION, sep)
        assert c_xy2 == pytest.approx(c_x + c_y + math.log2(257))

    def test_conditioning_helps_on_repetition(self):
        model = tiny_adaptive()
        x = [A, B]
        c_x = codelen_logprob(model, x).total_bits
        _, c_x_given_y, _ = joint_codelen(model, x, x, JointMode.CONDITIONAL)
        assert c_x_given_y < c_x  # counts from y raise P of x's tokens

    def test_empty_operand(self):
        with pytest.raises(EmptyOperand):
            joint_codelen(UniformModel(), [], [1])

    def test_subtraction_form_identity(self):
        # (C(x|y)+C(y|x)) / (C(x)+C(y)) == 2*C(xy)/(C(x)+C(y)) - 1 exactly
        model = AdaptiveContextModel(order=1)
        x, y = list(b"the cat sat"), list(b"a cat sat down")
        c_xy, c_x_y, c_y_x = joint_codelen(model, x, y, JointMode.CONCATENATION)
        c_x = codelen_logprob(model, x).total_bits
        c_y = codelen_logprob(model, y).total_bits
        lhs = (c_x_y + c_y_x) / (c_x + c_y)
        rhs = 2.0 * c_xy / (c_x + c_y) - 1.0
        assert lhs == pytest.approx(rhs, abs=1e-9)


class TestChunking:
    def test_plan_partitions_exactly(self):
        text = "x" * 6001
        plan = ChunkPlan.for_text(text, 2500)
        assert plan.boundaries == (0, 2500, 5000, 6001)
        assert "".join(plan.slices(text)) == text

    def test_single_chunk_equals_unchunked(self):
        model = AdaptiveContextModel(order=1)
        text = "a modest amount of text"
        rep = chunked_codelen(model, text, chunk_chars=10_000)
        direct = codelen_logprob(model, model.tokenize(text))
        assert rep.total_bits == pytest.approx(direct.total_bits)
        assert rep.chunk_totals == (pytest.approx(direct.total_bits),)

    def test_chunk_additivity_exact(self):
        model = AdaptiveContextModel(order=2)
        text = "abcdefgh" * 300
        rep = chunked_codelen(model, text, chunk_chars=500)
        assert rep.total_bits == sum(rep.chunk_totals)

    def test_splitting_resets_cost_bits(self):
        model = AdaptiveContextModel(order=2)
        text = "ab" * 2500
        one = chunked_codelen(model, text, chunk_chars=len(text))
        two = chunked_codelen(model, text, chunk_chars=len(text) // 2)
        assert two.total_bits >= one.total_bits

    def test_uniform_ratio_identity(self):
        rep = chunked_codelen(UniformModel(), "q" * 4000, chunk_chars=1000)
        assert rep.ratio == pytest.approx(8.0 / math.log2(257), rel=1e-9)

    def test_jobs_do_not_change_results(self):
        model = AdaptiveContextModel(order=1)
        text = "parallel chunks " * 400
        serial = chunked_codelen(model, text, chunk_chars=700)
        parallel = chunked_codelen(model, text, chunk_chars=700, jobs=4)
        assert serial.total_bits == parallel.total_bits
        assert serial.chunk_totals == parallel.chunk_totals

    def test_empty_text_rejected(self):
        with pytest.raises(EmptyOperand):
            chunked_codelen(UniformModel(), "")


class TestEstimatorVsCodec:
    def test_agreement_within_bound(self):
        model = AdaptiveContextModel(order=2)
        rng = np.random.default_rng(7)
        for _ in range(10):
            seq = [int(t) for t in rng.integers(0, 256, size=int(rng.integers(1, 400)))]
            est = estimate_quantized_bits(model, seq)
            actual = len(encode(model, seq))
            assert abs(actual - est) <= 34.0
