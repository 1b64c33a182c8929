import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from camids.errors import InputError
from camids.evaluate import confusion, evaluate, metrics
from oracles import count_metrics


def test_identity_diagonal():
    assert confusion([0, 1, 2, 3], [0, 1, 2, 3], 4).tolist() == np.eye(4, dtype=int).tolist()


def test_empty_inputs_zero_matrix():
    assert confusion([], [], 4).tolist() == [[0] * 4] * 4


def test_off_diagonal_cell():
    assert confusion([0, 0], [1, 1], 2)[0, 1] == 2


def test_confusion_errors():
    with pytest.raises(InputError):
        confusion([0, 1], [0], 2)
    with pytest.raises(InputError):
        confusion([0, 2], [0, 0], 2)
    with pytest.raises(InputError):
        confusion([0], [-1], 2)


def test_perfect_diagonal():
    r = metrics(np.diag([3, 1, 4, 1]))
    assert r.accuracy == 1.0
    assert set(r.precision.values()) == set(r.recall.values()) == set(r.f1.values()) == {1.0}
    assert r.macro_f1 == 1.0


def test_symmetric_two_by_two():
    r = metrics([[1, 1], [1, 1]], labels=["a", "b"])
    assert r.accuracy == 0.5
    assert r.precision == r.recall == r.f1 == {"a": 0.5, "b": 0.5}


def test_never_predicted_class():
    r = metrics([[2, 0], [1, 0]], labels=["a", "b"])
    assert r.precision["b"] == 0.0 and r.f1["b"] == 0.0 and r.recall["b"] == 0.0


def test_empty_matrix_rejected():
    with pytest.raises(InputError):
        metrics(np.zeros((4, 4), dtype=int))


def test_default_label_names():
    r = metrics(np.eye(4, dtype=int))
    assert r.labels == ["normal", "tcp_flood", "udp_flood", "brute_force"]


def test_kv_format():
    r = evaluate([0, 1, 2, 3, 3], [0, 1, 2, 3, 0], 4)
    kv = dict(line.split("=", 1) for line in r.to_kv().splitlines())
    assert kv["accuracy"] == "0.8"
    assert kv["support.brute_force"] == "2"
    for key in ("precision.normal", "recall.udp_flood", "f1.tcp_flood", "macro_precision", "macro_recall", "macro_f1"):
        assert key in kv


def test_table_format_lists_every_label():
    text = evaluate([0, 1, 2, 3], [0, 1, 2, 2], 4).format("table")
    for name in ("normal", "tcp_flood", "udp_flood", "brute_force", "macro avg", "accuracy"):
        assert name in text
    with pytest.raises(ValueError):
        evaluate([0], [0], 1).format("xml")


pairs = st.integers(1, 200).flatmap(
    lambda n: st.tuples(
        st.lists(st.integers(0, 3), min_size=n, max_size=n),
        st.lists(st.integers(0, 3), min_size=n, max_size=n),
    )
)


@settings(max_examples=100, deadline=None)
@given(pairs)
def test_matches_brute_force_recount(pair):
    y_true, y_pred = pair
    r = evaluate(y_true, y_pred, 4)
    acc, per_class = count_metrics(y_true, y_pred, 4)
    assert r.accuracy == acc
    assert sum(map(sum, r.confusion)) == len(y_true)
    for name, (p, rec, f, support) in zip(r.labels, per_class):
        assert r.precision[name] == p
        assert r.recall[name] == rec
        assert r.f1[name] == f
        assert r.support[name] == support
    assert r.macro_precision == sum(v[0] for v in per_class) / 4
    assert r.macro_recall == sum(v[1] for v in per_class) / 4
    assert r.macro_f1 == sum(v[2] for v in per_class) / 4


@settings(max_examples=50, deadline=None)
@given(pairs, st.randoms(use_true_random=False))
def test_row_order_irrelevant(pair, rnd):
    y_true, y_pred = pair
    idx = list(range(len(y_true)))
    rnd.shuffle(idx)
    a = evaluate(y_true, y_pred, 4)
    b = evaluate([y_true[i] for i in idx], [y_pred[i] for i in idx], 4)
    assert a == b


@settings(max_examples=50, deadline=None)
@given(st.lists(st.integers(0, 3), min_size=1, max_size=100))
def test_self_agreement_is_perfect(y):
    assert evaluate(y, y, 4).accuracy == 1
