from fractions import Fraction

import numpy as np
import pytest
from hypothesis import given, strategies as st

from qprob import frequency, generators, linalg
from qprob.errors import DegenerateRecord, EmptyRecord
from qprob.frequency import (
    ClickRecord,
    empirical_frequency,
    g2_zero,
    lln_convergence,
    sample_outcomes,
    simulate_clicks,
)
from qprob.quantum import KET_0, KET_PLUS

seeds = st.integers(0, 2**31 - 1)


def test_eigenstate_always_same_outcome():
    rec = sample_outcomes(KET_0, linalg.SIGMA_Z, 1000, seed=1)
    assert empirical_frequency(rec, 1) == 1.0
    assert empirical_frequency(rec, -1) == 0.0


def test_exact_fraction():
    rec = sample_outcomes(KET_PLUS, linalg.SIGMA_Z, 7, seed=3)
    f = empirical_frequency(rec, 1, exact=True)
    assert isinstance(f, Fraction) and f.denominator in (1, 7)
    assert float(f) == empirical_frequency(rec, 1)


def test_same_seed_same_record():
    a = sample_outcomes(KET_PLUS, linalg.SIGMA_Z, 500, seed=9)
    b = sample_outcomes(KET_PLUS, linalg.SIGMA_Z, 500, seed=9)
    assert np.array_equal(a.outcomes, b.outcomes)
    assert not np.array_equal(a.outcomes, sample_outcomes(KET_PLUS, linalg.SIGMA_Z, 500, seed=10).outcomes)


def test_prefixes_are_nested():
    long = sample_outcomes(KET_PLUS, linalg.SIGMA_Z, 1000, seed=4)
    short = sample_outcomes(KET_PLUS, linalg.SIGMA_Z, 100, seed=4)
    assert np.array_equal(long.prefix(100).outcomes, short.outcomes)


def test_empty_record():
    rec = sample_outcomes(KET_0, linalg.SIGMA_Z, 5, seed=0).prefix(0)
    with pytest.raises(EmptyRecord):
        empirical_frequency(rec, 1)


def test_generator_offset_skips_draws():
    full = frequency.generator(5, 0).integers(0, 2**63, size=8, dtype=np.uint64)
    # Philox.advance counts 4 x 64-bit blocks
    tail = frequency.generator(5, 0, offset=1).integers(0, 2**63, size=4, dtype=np.uint64)
    assert np.array_equal(full[4:], tail)


def test_lln_table_on_plus():
    table = lln_convergence(KET_PLUS, linalg.SIGMA_Z, 1, [10, 100, 1000, 10000], seed=2)
    assert table.probability == pytest.approx(0.5)
    assert table.holds
    assert [r.N for r in table.rows] == [10, 100, 1000, 10000]


def test_lln_grid_must_increase():
    with pytest.raises(ValueError):
        lln_convergence(KET_PLUS, linalg.SIGMA_Z, 1, [100, 10], seed=0)


@given(seeds, st.integers(2, 4))
def test_counts_match_n(seed, dim):
    rng = np.random.default_rng(seed)
    state = generators.random_mixed_state(dim, rng)
    obs = generators.random_nondegenerate_observable(dim, rng)
    rec = sample_outcomes(state, obs, 2000, seed)
    assert rec.counts().sum() == 2000
    total = sum(empirical_frequency(rec, x, exact=True) for x in obs.eigenvalues)
    assert total == 1


@given(seeds)
def test_frequency_within_generous_envelope(seed):
    rng = np.random.default_rng(seed)
    state = generators.random_pure_state(3, rng)
    obs = generators.random_nondegenerate_observable(3, rng)
    table = lln_convergence(state, obs, obs.eigenvalues[0], [20000], seed, sigmas=6)
    assert table.holds


def test_single_photon_never_coincides():
    assert g2_zero(simulate_clicks("single_photon", 50000, seed=1)) == 0.0


def test_g2_separation():
    assert 0.9 <= g2_zero(simulate_clicks("coherent", 100000, 1.0, seed=2)) <= 1.1
    assert 1.8 <= g2_zero(simulate_clicks("thermal", 100000, 1.0, seed=2)) <= 2.2


def test_g2_hand_example():
    # <ab> = 3/4, <a> = <b> = 1
    assert g2_zero(ClickRecord([1, 1, 2, 0], [1, 0, 1, 2])) == pytest.approx(0.75)


def test_degenerate_click_records():
    with pytest.raises(DegenerateRecord):
        g2_zero(ClickRecord([0, 0], [1, 1]))
    with pytest.raises(DegenerateRecord):
        g2_zero(ClickRecord([], []))
    with pytest.raises(ValueError):
        ClickRecord([1, -1], [0, 0])


def test_unknown_source():
    with pytest.raises(ValueError):
        simulate_clicks("laser", 10)
