"""Entropy-model contracts: predictions, scoring, windowing, determinism."""

from __future__ import annotations

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from conftest import laplace_probs
from infodist.errors import InvalidToken
from infodist.models import (
    BYTE_VOCAB,
    AdaptiveContextModel,
    StaticModel,
    TokenSequence,
    UniformModel,
    Vocabulary,
    predict,
    score_sequence,
)

A, B, EOS = 0, 1, 2


def tiny_adaptive(order=0, window=1024):
    return AdaptiveContextModel(order=order, vocab=Vocabulary(3, 2), context_limit=window)


class TestVocabulary:
    def test_bounds(self):
        with pytest.raises(ValueError):
            Vocabulary(size=1, eos_id=0)
        with pytest.raises(ValueError):
            Vocabulary(size=2**21 + 1, eos_id=0)
        with pytest.raises(ValueError):
            Vocabulary(size=4, eos_id=4)

    def test_token_sequence_validates(self):
        vocab = Vocabulary(4, 3)
        TokenSequence(ids=(), vocab=vocab)  # empty is legal
        TokenSequence(ids=(0, 3), vocab=vocab)
        with pytest.raises(InvalidToken):
            TokenSequence(ids=(4,), vocab=vocab)


class TestPredict:
    def test_uniform_any_context(self):
        model = UniformModel(vocab=Vocabulary(256, 0))
        dist = predict(model, [5, 6, 7])
        assert np.allclose(dist, 1.0 / 256)

    def test_adaptive_order0_after_aab(self):
        dist = predict(tiny_adaptive(), [A, A, B])
        assert dist[A] == pytest.approx((2 + 1) / (3 + 3))
        assert dist[B] == pytest.approx(2 / 6)
        assert dist[EOS] == pytest.approx(1 / 6)
        assert np.allclose(dist, laplace_probs([A, A, B], 3))

    def test_sliding_window_truncation(self):
        model = tiny_adaptive(order=2, window=4)
        ctx = [A, B, A, A, B, B, A, B, A, A]
        assert np.array_equal(predict(model, ctx), predict(model, ctx[-4:]))

    def test_out_of_range_token(self):
        with pytest.raises(InvalidToken):
            predict(tiny_adaptive(), [7])

    @given(
        ctx=st.lists(st.integers(0, 3), max_size=40),
        order=st.integers(0, 3),
        window=st.integers(2, 12),
    )
    @settings(max_examples=120, deadline=None)
    def test_window_invariance_property(self, ctx, order, window):
        model = AdaptiveContextModel(order=order, vocab=Vocabulary(5, 4), context_limit=window)
        full = predict(model, ctx)
        trunc = predict(model, ctx[-window:])
        assert np.array_equal(full, trunc)

    @given(ctx=st.lists(st.integers(0, 2), max_size=30), order=st.integers(0, 3))
    @settings(max_examples=100, deadline=None)
    def test_distribution_is_probability(self, ctx, order):
        model = AdaptiveContextModel(order=order, vocab=Vocabulary(3, 2))
        dist = predict(model, ctx)
        assert (dist >= 0).all()
        assert abs(float(dist.sum()) - 1.0) <= 1e-9

    def test_determinism_bitwise(self):
        model = AdaptiveContextModel(order=2)
        ctx = list(b"determinism check")
        assert np.array_equal(predict(model, ctx), predict(model, ctx))


class TestScoreSequence:
    def test_uniform_length_five(self):
        model = UniformModel(vocab=Vocabulary(2, 1))
        assert np.allclose(score_sequence(model, [0] * 5), 0.5)

    def test_adaptive_order0_aa(self):
        probs = score_sequence(tiny_adaptive(), [A, A])
        assert probs == pytest.approx([1 / 3, 2 / 4])

    def test_empty_sequence(self):
        assert score_sequence(tiny_adaptive(), []).size == 0

    @given(
        x=st.lists(st.integers(0, 2), min_size=0, max_size=12),
        y=st.lists(st.integers(0, 2), min_size=0, max_size=12),
        order=st.integers(0, 3),
    )
    @settings(max_examples=100, deadline=None)
    def test_concatenation_consistency(self, x, y, order):
        # chain rule: scoring x++y from scratch equals scoring x then y given x
        model = AdaptiveContextModel(order=order, vocab=Vocabulary(3, 2))
        joint = score_sequence(model, x + y)
        first = score_sequence(model, x)
        second = score_sequence(model, y, prior_context=x)
        assert np.allclose(joint, np.concatenate([first, second]), atol=1e-12)

    def test_static_model_scores(self):
        model = StaticModel([0.5, 0.25, 0.25])
        assert score_sequence(model, [0, 1, 2]) == pytest.approx([0.5, 0.25, 0.25])


class TestTokenization:
    def test_byte_round_trip(self):
        model = UniformModel()
        for text in ["hello", "größer 🦊", "\x00\x07 binary-ish"]:
            assert model.detokenize(model.tokenize(text)) == text

    def test_surrogateescape_binary(self):
        model = UniformModel()
        raw = bytes(range(256))
        text = raw.decode("utf-8", "surrogateescape")
        assert bytes(model.tokenize(text)) == raw

    def test_custom_vocab_has_no_tokenizer(self):
        with pytest.raises(InvalidToken):
            tiny_adaptive().tokenize("ab")

    def test_byte_vocab_constants(self):
        assert BYTE_VOCAB.size == 257
        assert BYTE_VOCAB.eos_id == 256


class TestPerTokenBits:
    def test_both_variants_single_pass(self):
        model = tiny_adaptive()
        out = model.per_token_bits([A, A], variants=("logprob", "logrank"))
        assert out["logprob"] == pytest.approx([np.log2(3), 1.0])
        # first step all probs tie -> rank of id 0 is 1; after one 'a' its rank stays 1
        assert out["logrank"] == pytest.approx([0.0, 0.0])

    def test_unknown_variant(self):
        with pytest.raises(ValueError):
            tiny_adaptive().per_token_bits([A], variants=("entropy",))
