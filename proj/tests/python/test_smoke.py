"""Smoke tests for the Python bindings."""

import math

import pytest

import qsum


def test_chunk_sentence_worked_example():
    tree = "(S (NP (DT the)(NN cat)) (VP (VBD sat)(PP (IN on)(NP (DT the)(NN mat)))))"
    spans = qsum.chunk_sentence(tree, ["the", "cat", "sat", "on", "the", "mat"])
    assert spans == [(0, 2), (2, 6)]


def test_chunk_sentence_rejects_bad_parse():
    with pytest.raises(Exception):
        qsum.chunk_sentence("(S (NP", ["x"])


def test_heuristic_labels():
    labels = qsum.heuristic_labels(
        sentences=[["police", "found", "the", "suspect", "yesterday"]],
        abstract=[["police", "found", "suspect"]],
        stopwords=["the"],
    )
    assert labels == [1, 1, 0, 0, 0]


def test_rouge_hand_example():
    sys_toks = ["the", "cat", "sat"]
    ref_toks = ["the", "dog", "sat"]
    r1 = qsum.rouge(sys_toks, ref_toks, variant="1")
    assert math.isclose(r1["recall"], 2.0 / 3.0)
    rl = qsum.rouge(sys_toks, ref_toks, variant="L")
    assert math.isclose(rl["recall"], 2.0 / 3.0)
    same = qsum.rouge(sys_toks, sys_toks, variant="2")
    assert same["f1"] == 1.0


def test_reward_components():
    assert qsum.fluency([0, 1, 1, 0, 1]) == -3.0
    assert math.isclose(
        qsum.adequacy(["cat", "sat", "mat"], ["the", "cat", "sat"]), 2.0 / 3.0
    )


def test_positional_embedding():
    v = qsum.positional_embedding(0, dim=30)
    assert len(v) == 30
    assert all(x == 0.0 for x in v[0::2])  # sin(0)
    assert all(x == 1.0 for x in v[1::2])  # cos(0)
    assert qsum.positional_embedding(3, dim=30) != qsum.positional_embedding(4, dim=30)


def test_gold_summary():
    words = qsum.gold_summary(
        sentences=[["the", "cat", "sat"], ["a", "cat", "naps"]],
        abstract=[["a", "cat"]],
    )
    assert words == ["cat", "a", "cat"]
