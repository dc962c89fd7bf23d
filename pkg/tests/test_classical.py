from fractions import Fraction

import numpy as np
import pytest
from hypothesis import given, strategies as st

from qprob.classical import (
    FiniteProbabilitySpace,
    JointDistribution,
    RandomVariable,
    bayes_conditional,
    classical_ftp,
    event_probability,
    joint_distribution,
    marginal,
)
from qprob.errors import ConditionOnNull, UnknownVariable


def die():
    return FiniteProbabilitySpace.uniform(range(1, 7))


def test_even_face_of_die():
    assert event_probability(die(), lambda w: w % 2 == 0) == pytest.approx(0.5)
    assert event_probability(die(), {2, 4, 6}) == pytest.approx(0.5)


def test_bayes_on_die():
    # p(face = 6 | even) = 1/3
    assert bayes_conditional(die(), {6}, {2, 4, 6}) == pytest.approx(1 / 3)


def test_condition_on_null_raises():
    with pytest.raises(ConditionOnNull):
        bayes_conditional(die(), {1}, set())


def test_weights_must_sum_to_one():
    with pytest.raises(ValueError):
        FiniteProbabilitySpace([0, 1], [0.5, 0.6])


def test_negative_weight_rejected():
    with pytest.raises(ValueError):
        FiniteProbabilitySpace([0, 1], [1.5, -0.5])


def test_undeclared_value_rejected():
    with pytest.raises(ValueError):
        RandomVariable("X", {0: 1.0, 1: 2.0}, outcomes=(1.0,))


def two_coins():
    space = FiniteProbabilitySpace.uniform([(a, b) for a in (0, 1) for b in (0, 1)])
    X = RandomVariable.from_function("X", space, lambda p: p[0])
    Y = RandomVariable.from_function("Y", space, lambda p: p[0] ^ p[1])
    return space, X, Y


def test_joint_and_marginal():
    space, X, Y = two_coins()
    jpd = joint_distribution(space, [X, Y])
    assert jpd.probability(0, 1) == pytest.approx(0.25)
    assert marginal(jpd, "Y").as_dict() == pytest.approx({0.0: 0.5, 1.0: 0.5})


def test_marginal_unknown_variable():
    space, X, Y = two_coins()
    with pytest.raises(UnknownVariable):
        marginal(joint_distribution(space, [X, Y]), "Z")


def test_include_zero_cells():
    space = FiniteProbabilitySpace([0, 1], [1.0, 0.0])
    X = RandomVariable.from_function("X", space, float)
    assert len(joint_distribution(space, [X]).support) == 1
    assert joint_distribution(space, [X], include_zero=True).probability(1.0) == 0.0


def test_ftp_skips_null_outcomes():
    space = FiniteProbabilitySpace([0, 1, 2], [0.5, 0.5, 0.0])
    A = RandomVariable.from_function("A", space, lambda w: w)
    B = RandomVariable.from_function("B", space, lambda w: w % 2)
    assert classical_ftp(space, A, B, 0) == pytest.approx(0.5)


def test_csv_uses_twelve_digits():
    jpd = JointDistribution(["X"], [(0.0,), (1.0,)], [1 / 3, 2 / 3])
    assert jpd.to_csv().splitlines() == ["X,probability", "0,0.333333333333", "1,0.666666666667"]


def test_space_json_roundtrip():
    space = FiniteProbabilitySpace([(0, 1), (1, 0)], [0.25, 0.75])
    back = FiniteProbabilitySpace.from_json(space.to_json())
    assert back.points == space.points and np.array_equal(back.weights, space.weights)


@st.composite
def finite_spaces(draw):
    n = draw(st.integers(1, 12))
    w = np.array(draw(st.lists(st.integers(0, 20), min_size=n, max_size=n)), dtype=float)
    if w.sum() == 0:
        w[0] = 1
    space = FiniteProbabilitySpace(range(n), w / w.sum())
    a_vals = draw(st.lists(st.integers(0, 3), min_size=n, max_size=n))
    b_vals = draw(st.lists(st.integers(0, 3), min_size=n, max_size=n))
    A = RandomVariable("A", dict(enumerate(a_vals)))
    B = RandomVariable("B", dict(enumerate(b_vals)))
    return space, A, B


@given(finite_spaces())
def test_classical_ftp_recovers_marginal(args):
    space, A, B = args
    for b in B.outcomes:
        assert classical_ftp(space, A, B, b) == pytest.approx(event_probability(space, B.event(b)), abs=1e-12)


@given(finite_spaces())
def test_joint_sums_to_one_and_marginals_agree(args):
    space, A, B = args
    jpd = joint_distribution(space, [A, B])
    assert jpd.probabilities.sum() == pytest.approx(1.0, abs=1e-12)
    for a, p in marginal(jpd, "A").as_dict().items():
        assert p == pytest.approx(event_probability(space, A.event(a)), abs=1e-12)


@given(finite_spaces())
def test_bayes_product_rule(args):
    space, A, B = args
    for a in A.outcomes:
        pa = event_probability(space, A.event(a))
        if pa == 0:
            continue
        for b in B.outcomes:
            both = event_probability(space, lambda w: A(w) == a and B(w) == b)
            assert bayes_conditional(space, B.event(b), A.event(a)) * pa == pytest.approx(both, abs=1e-12)


@given(st.lists(st.integers(1, 9), min_size=1, max_size=8))
def test_uniform_event_probability_is_a_count_ratio(faces):
    n = max(faces) + 1
    space = FiniteProbabilitySpace.uniform(range(n))
    event = set(faces)
    assert event_probability(space, event) == pytest.approx(float(Fraction(len(event), n)), abs=1e-12)
