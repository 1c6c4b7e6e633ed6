import json
import math

import pytest

from gaussfock import (
    InfiniteParameterError,
    InvalidIndexError,
    InvalidInputError,
    InvalidParameterError,
    TailModel,
    classify_tail,
    tail_d,
    tail_log_weight,
    tail_partial_sums,
    tail_s,
)


def test_tail_d_examples():
    assert tail_d(TailModel.identity(), 5) == 1.0
    assert tail_d(TailModel.geometric(1, 0.5), 3) == 1.125
    assert tail_d(TailModel.power(1, 2), 2) == 1.25


@pytest.mark.parametrize("j", [0, -1, 2.5])
def test_tail_index_from_one(j):
    with pytest.raises(InvalidIndexError):
        tail_d(TailModel.identity(), j)


@pytest.mark.parametrize(
    "kw", [dict(kind="nope"), dict(kind="geometric", a=1.0, r=1.0), dict(kind="power", a=-1.0, p=2.0),
           dict(kind="power", a=1.0, p=0.0), dict(kind="geometric", a=float("inf"), r=0.5)]
)
def test_tail_rejects_bad_parameters(kw):
    with pytest.raises(InvalidInputError):
        TailModel(**kw)


def test_bad_parameter_is_specific():
    with pytest.raises(InvalidParameterError):
        TailModel.geometric(1.0, 1.5)


def test_tail_s_examples():
    # d = 3 for a = 2, r = 1 is not allowed, so pick a power tail with d_1 = 3
    assert tail_s(TailModel.power(2, 1), 1) == pytest.approx(math.log(2), rel=1e-15)
    d = 1 / math.tanh(1.0)
    assert tail_s(TailModel.power(d - 1, 1), 1) == pytest.approx(2.0, rel=1e-13)
    with pytest.raises(InfiniteParameterError):
        tail_s(TailModel.identity(), 1)


def test_tail_s_inverts_coth():
    tail = TailModel.geometric(0.7, 0.3)
    for j in range(1, 30):
        assert 1 / math.tanh(tail_s(tail, j) / 2) == pytest.approx(tail_d(tail, j), rel=1e-12)


@pytest.mark.parametrize(
    "p, cond2, cond3",
    [(2.0, True, True), (1.0, True, False), (0.4, False, False), (0.5, False, False), (0.51, True, False)],
)
def test_classify_power(p, cond2, cond3):
    c = classify_tail(TailModel.power(1, p))
    assert (c.cond1_uncertainty, c.cond2_hilbert_schmidt, c.cond3_trace_class) == (True, cond2, cond3)
    assert c.witness


def test_classify_geometric_and_identity():
    for tail in (TailModel.identity(), TailModel.geometric(5, 0.9)):
        c = classify_tail(tail)
        assert c.cond1_uncertainty and c.cond2_hilbert_schmidt and c.cond3_trace_class


def test_partial_sums():
    assert tail_partial_sums(TailModel.identity(), 100) == (0.0, 0.0)
    s1, s2 = tail_partial_sums(TailModel.geometric(1, 0.5), 200)
    assert s1 == pytest.approx(1.0, abs=1e-15)
    assert s2 == pytest.approx(1 / 3, abs=1e-15)
    s1, _ = tail_partial_sums(TailModel.power(1, 2), 10000)
    assert abs(s1 - math.pi**2 / 6) < 1e-3


def test_partial_sums_chunking_is_invisible():
    tail = TailModel.power(1.3, 0.8)
    assert tail_partial_sums(tail, 1000, chunk=7) == pytest.approx(tail_partial_sums(tail, 1000), rel=1e-14)


def test_log_weight_geometric_against_direct_product():
    tail = TailModel.geometric(0.8, 0.6)
    direct = sum(math.log(2 / (tail_d(tail, j) + 1)) for j in range(1, 200))
    assert tail_log_weight(tail) == pytest.approx(direct, rel=1e-12)


def test_log_weight_power_against_long_sum():
    tail = TailModel.power(0.5, 3.0)
    # remainder beyond 10^6 terms is below 1e-13
    direct = -math.fsum(math.log1p(0.25 / j**3) for j in range(1, 10**6))
    assert tail_log_weight(tail) == pytest.approx(direct, abs=1e-12)


def test_log_weight_non_trace_class():
    assert tail_log_weight(TailModel.power(1, 1)) == -math.inf
    assert tail_log_weight(TailModel.identity()) == 0.0


def test_json_round_trip():
    for tail in (TailModel.identity(), TailModel.geometric(1, 0.5), TailModel.power(2, 1.5)):
        assert TailModel.from_json(json.loads(json.dumps(tail.to_json()))) == tail
    with pytest.raises(InvalidInputError):
        TailModel.from_json({"kind": "power", "a": 1})
    with pytest.raises(InvalidInputError):
        TailModel.from_json([1, 2])
