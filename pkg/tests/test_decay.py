import math
from fractions import Fraction as F

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from newton_osc.decay import (
    DecayEstimate,
    ExponentError,
    ExponentTuple,
    decay_to_sublevel,
    estimate_from_delta,
    interpolate_exponents,
    interpolate_tuple,
    interpolated_delta_identity,
    log_sum_product_holds,
    off_diagonal_tuple,
    on_diagonal_threshold,
    parse_exponent,
    predict,
    sharpness_prediction,
    submultiplicativity_holds,
    validate_hypotheses,
)
from newton_osc.nondeg import DegeneratePhaseError
from newton_osc.phase import Phase

XYZ = Phase.monomial((1, 1, 1))
SQ = Phase.monomial((2, 2, 2))
INF3 = ExponentTuple.parse("inf,inf,inf")
P3 = ExponentTuple.parse("8/3,8/3,8/3")


def p_formula(d):
    # independent evaluation: (d-1) 2^(d-1) / (2^(d-1) - 1)
    g = 2 ** (d - 1)
    return F((d - 1) * g, g - 1)


@pytest.mark.parametrize("d,expected", [(3, F(8, 3)), (4, F(24, 7)), (5, F(64, 15))])
def test_on_diagonal_threshold(d, expected):
    assert on_diagonal_threshold(d) == expected == p_formula(d)


@pytest.mark.parametrize(
    "d,expected",
    [(3, (4, 4, 2)), (4, (8, 8, 4, 2)), (5, (16, 16, 8, 4, 2))],
)
def test_off_diagonal_tuple(d, expected):
    p = off_diagonal_tuple(d)
    assert p.p == tuple(F(a) for a in expected)
    assert p.P == 1


@pytest.mark.parametrize("d", [1, 2])
def test_small_d_rejected(d):
    with pytest.raises(ExponentError):
        on_diagonal_threshold(d)
    with pytest.raises(ExponentError):
        off_diagonal_tuple(d)


@pytest.mark.parametrize(
    "text,status",
    [
        ("4,4,2", "off-diagonal-ok"),
        ("8/3,8/3,8/3", "on-diagonal-ok"),
        ("2,2,2", "neither"),
        ("inf,inf,inf", "off-diagonal-ok"),
    ],
)
def test_validate_hypotheses(text, status):
    assert validate_hypotheses(ExponentTuple.parse(text)).status == status


def test_parse_exponent_forms():
    assert parse_exponent("8/3") == F(8, 3)
    assert parse_exponent("2.5") == F(5, 2)
    assert parse_exponent("inf") == math.inf
    with pytest.raises(ExponentError):
        parse_exponent("abc")
    with pytest.raises(ExponentError):
        ExponentTuple.parse("1/2,3,3")


def test_on_diagonal_direction_exact():
    for d in (3, 4, 5):
        pd = on_diagonal_threshold(d)
        p = ExponentTuple([pd] * d)
        # v_j = 1 - (d-1)/p(d) = 2^(1-d)
        assert p.direction == (F(1, 2 ** (d - 1)),) * d


@pytest.mark.parametrize(
    "phase,p,regime,rate,log_power,delta",
    [
        (XYZ, P3, "critical", F(1, 4), 3, 4),
        (SQ, INF3, "below-critical", F(1, 4), 0, 2),
        (XYZ, INF3, "below-critical", F(1, 4), 0, 1),
    ],
)
def test_predict_examples(phase, p, regime, rate, log_power, delta):
    est = predict(phase, p)
    assert (est.regime, est.rate, est.log_power, est.delta) == (regime, rate, log_power, delta)


@pytest.mark.parametrize("d", [3, 4, 5])
def test_critical_for_every_d(d):
    est = predict(Phase.monomial((1,) * d), ExponentTuple([on_diagonal_threshold(d)] * d))
    assert est.regime == "critical"
    assert est.delta == 2 ** (d - 1)


def test_above_critical_log_power_from_codimension():
    # delta = 8 > 4 at the vertex (2,2,2): codimension 3, log power 2
    est = estimate_from_delta(F(8), 3, 3)
    assert (est.regime, est.rate, est.log_power) == ("above-critical", F(1, 8), 2)
    # on a facet interior (codim 1) no log remains
    assert estimate_from_delta(F(8), 1, 3).log_power == 0


def test_predict_errors():
    with pytest.raises(ExponentError):
        predict(XYZ, ExponentTuple.parse("2,2,2"))
    deg = Phase.from_terms(3, [((2, 1, 1), 1.0), ((1, 2, 1), 1.0)])
    with pytest.raises(DegeneratePhaseError):
        predict(deg, INF3)
    with pytest.raises(ExponentError):
        predict(XYZ, ExponentTuple.parse("inf,inf"))


def test_infinite_note():
    assert any("upper-bound" in n for n in predict(XYZ, INF3).notes)


def test_estimate_serialization():
    est = predict(XYZ, P3)
    out = est.to_dict()
    assert {k: out[k] for k in ("rate", "log_power", "regime", "delta", "k")} == {
        "rate": "1/4",
        "log_power": 3,
        "regime": "critical",
        "delta": "4",
        "k": 3,
    }
    back = DecayEstimate.from_dict(out, 3)
    assert (back.rate, back.log_power, back.delta) == (est.rate, est.log_power, est.delta)


def test_interpolation_example():
    q = interpolate_exponents(
        ExponentTuple.parse("8,4,4,2"), ExponentTuple([F(24, 7)] * 4), F(1, 2)
    )
    assert q.p == (F(48, 10), F(48, 13), F(48, 13), F(48, 19))


def test_interpolate_tuple():
    assert interpolate_tuple(ExponentTuple.parse("4,4,2"), F(1, 2)).p == (F(8, 3), F(8, 3), F(2))
    with pytest.raises(ExponentError):
        interpolate_tuple(ExponentTuple.parse("4,4,2"), 1)


@settings(max_examples=40, deadline=None)
@given(st.integers(3, 5), st.fractions(F(1, 100), F(99, 100)))
def test_interpolation_fixed_point(d, theta):
    fixed = ExponentTuple([d - 1] * d)
    assert interpolate_tuple(fixed, theta) == fixed


@pytest.mark.parametrize(
    "phase,p,theta,delta,delta_prime",
    [
        (XYZ, P3, F(1, 2), 4, 8),
        (Phase.from_terms(3, [((4, 1, 1), 1.0), ((1, 1, 4), 1.0)]), INF3, F(2, 3), F(5, 2), F(15, 4)),
    ],
)
def test_identity_examples(phase, p, theta, delta, delta_prime):
    chk = interpolated_delta_identity(phase, p, theta)
    assert (chk.delta, chk.delta_prime, chk.check) == (delta, delta_prime, True)


CORPUS = [
    XYZ,
    SQ,
    Phase.from_terms(3, [((3, 1, 1), 1.0), ((1, 1, 3), 1.0)]),
    Phase.from_terms(3, [((4, 1, 1), 1.0), ((1, 4, 1), 1.0), ((1, 1, 4), 1.0)]),
    Phase.from_terms(3, [((2, 3, 1), 1.0), ((1, 1, 5), -2.0)]),
]
TUPLES = ["inf,inf,inf", "8/3,8/3,8/3", "4,4,2", "8,4,4", "4,8,2"]


@pytest.mark.parametrize("phase", CORPUS)
@pytest.mark.parametrize("text", TUPLES)
@pytest.mark.parametrize("theta", [F(1, 4), F(1, 2), F(3, 4)])
def test_identity_corpus(phase, text, theta):
    assert interpolated_delta_identity(phase, ExponentTuple.parse(text), theta).check


@pytest.mark.parametrize("perm", [(1, 0, 2), (2, 0, 1), (0, 2, 1)])
@pytest.mark.parametrize("text", ["3,4,8/3", "inf,3,5"])
def test_predict_permutation_invariance(perm, text):
    # on-diagonal tuples stay admissible under any permutation
    ph = Phase.monomial((3, 1, 2))
    p = ExponentTuple.parse(text)
    a = predict(ph, p)
    b = predict(ph.permuted(perm), p.permuted(perm))
    assert (a.rate, a.log_power, a.regime, a.delta) == (b.rate, b.log_power, b.regime, b.delta)


def test_decay_to_sublevel():
    b = decay_to_sublevel(predict(XYZ, INF3))
    assert (b.exponent, b.log_power) == (F(1, 4), 0)
    b = decay_to_sublevel(predict(XYZ, P3))
    assert (b.exponent, b.log_power) == (F(1, 4), 3)
    assert b.submultiplicativity_constant == pytest.approx((2 / math.log(2)) ** 3)
    assert b(1e-4) == pytest.approx(1e-4**0.25 * math.log(1e4) ** 3)


def test_decay_to_sublevel_rejects_nonpositive():
    with pytest.raises(ExponentError):
        decay_to_sublevel(DecayEstimate(F(0), 0, "below-critical", F(1), 3, 3))


@pytest.mark.parametrize("s", [0, 1, 2, 3])
def test_submultiplicativity(s):
    assert submultiplicativity_holds(s, rate=0.25)
    assert log_sum_product_holds(100, 20.0)


@pytest.mark.parametrize(
    "p,n,expected",
    [
        (INF3, None, (F(0), F(-1), F(-1))),
        (INF3, (F(1, 3),) * 3, (F(0), F(-1), F(-1))),
        (P3, (F(1, 3),) * 3, (F(-3, 4), F(-1), F(-1, 4))),
    ],
)
def test_sharpness_prediction(p, n, expected):
    s = sharpness_prediction(XYZ, p, n)
    assert (s.norm_product, s.form, s.ratio) == expected
    assert s.ratio == -1 / s.delta


def test_sharpness_rejects_non_tight_normal():
    with pytest.raises(ExponentError):
        sharpness_prediction(XYZ, INF3, (F(1, 2), F(1, 4), F(1, 2)))
    with pytest.raises(ExponentError):
        sharpness_prediction(XYZ, INF3, (F(1, 4), F(1, 4), F(1, 4)))
