import json

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from newton_osc.phase import (
    Phase,
    PhaseError,
    eval_phase,
    face_restriction,
    mixed_derivative,
    partial_derivative,
)

from .oracles import sympy_derivative_value

XYZ = Phase.monomial((1, 1, 1))


def random_terms(d):
    alpha = st.tuples(*[st.integers(1, 5)] * d)
    coeff = st.floats(-3, 3).filter(lambda c: abs(c) > 1e-3)
    return st.lists(st.tuples(alpha, coeff), min_size=1, max_size=4, unique_by=lambda t: t[0])


def test_eval_monomial():
    assert eval_phase(XYZ, [0.5, 2.0, 3.0]) == pytest.approx(3.0)
    x = np.random.default_rng(1).random((7, 3))
    assert np.allclose(eval_phase(XYZ, x), x.prod(axis=1))


def test_eval_wrong_length():
    with pytest.raises(PhaseError):
        eval_phase(XYZ, [1.0, 2.0])


def test_duplicate_terms_are_collected():
    p = Phase.from_terms(2, [((1, 2), 1.0), ((1, 2), 2.0), ((2, 1), 1.0), ((2, 1), -1.0)])
    assert p.terms == (((1, 2), 3.0),)


@pytest.mark.parametrize(
    "terms,beta,point",
    [
        ([((1, 1, 1), 1.0)], (1, 1, 1), (0.3, 0.7, 0.2)),
        ([((2, 1, 1), 1.0), ((1, 2, 1), 1.0)], (1, 1, 1), (0.3, -0.7, 0.2)),
        ([((4, 1, 1), 2.0), ((1, 1, 4), -1.5)], (2, 0, 3), (0.9, 0.4, -0.6)),
        ([((3, 2), 1.0)], (3, 2), (1.2, 0.5)),
        ([((3, 2), 1.0)], (4, 0), (1.2, 0.5)),
    ],
)
def test_partial_derivative_against_sympy(terms, beta, point):
    d = len(beta)
    ph = Phase.from_terms(d, terms)
    got = eval_phase(partial_derivative(ph, beta), point)
    assert got == pytest.approx(sympy_derivative_value(terms, d, beta, point), rel=1e-12, abs=1e-12)


@settings(max_examples=40, deadline=None)
@given(random_terms(3), st.tuples(*[st.floats(-1, 1)] * 3))
def test_mixed_derivative_matches_finite_differences(terms, x):
    ph = Phase.from_terms(3, terms)
    h = 1e-3
    x = np.asarray(x)
    # central difference in every coordinate: sum over the 8 sign patterns
    total = 0.0
    for signs in np.ndindex(2, 2, 2):
        s = np.where(np.array(signs) == 0, 1.0, -1.0)
        total += np.prod(s) * eval_phase(ph, x + h * s)
    fd = total / (2 * h) ** 3
    exact = eval_phase(mixed_derivative(ph), x)
    scale = 1 + sum(abs(c) for _, c in terms) * 200
    assert fd == pytest.approx(exact, abs=1e-4 * scale)


def test_face_restriction():
    p = Phase.from_terms(3, [((2, 1, 1), 1.0), ((1, 2, 1), 2.0)])
    r = face_restriction(p, [(1, 2, 1)])
    assert r.terms == (((1, 2, 1), 2.0),)
    with pytest.raises(PhaseError):
        face_restriction(p, [(3, 3, 3)])


def test_json_round_trip():
    p = Phase.from_terms(3, [((4, 1, 1), 1.0), ((1, 1, 4), -0.5)])
    assert Phase.from_json(p.to_json()) == p


@pytest.mark.parametrize(
    "payload,field",
    [
        ({"terms": []}, "dim"),
        ({"dim": 3}, "terms"),
        ({"dim": 3, "terms": [{"alpha": [1, 1], "coeff": 1}]}, "terms[0].alpha"),
        ({"dim": 3, "terms": [{"alpha": [1, 1, 1], "coeff": "x"}]}, "terms[0].coeff"),
        (
            {"dim": 3, "terms": [{"alpha": [1, 1, 1], "coeff": 1}, {"alpha": [1, 1, 1], "coeff": 2}]},
            "terms[1].alpha",
        ),
    ],
)
def test_malformed_json_names_field(payload, field):
    with pytest.raises(PhaseError, match=field.replace("[", r"\[").replace("]", r"\]")):
        Phase.from_json(json.dumps(payload))


def test_input_phase_needs_positive_exponents():
    with pytest.raises(PhaseError):
        Phase.from_json(json.dumps({"dim": 2, "terms": [{"alpha": [0, 1], "coeff": 1}]}))


@settings(max_examples=30, deadline=None)
@given(random_terms(3), st.permutations([0, 1, 2]))
def test_permutation_commutes_with_evaluation(terms, perm):
    ph = Phase.from_terms(3, terms)
    x = np.array([0.3, -0.8, 0.55])
    q = ph.permuted(perm)
    y = x[list(perm)]  # new variable i is old variable perm[i]
    assert eval_phase(q, y) == pytest.approx(eval_phase(ph, x))
