import numpy as np
import pytest
from hypothesis import given, strategies as st

from qprob import bell, linalg
from qprob.bell import CHSHSetting, chsh_value, incompatibility_sweep, max_chsh, tsirelson_setting
from qprob.errors import DimMismatch
from qprob.quantum import PHI_PLUS, SINGLET, QuantumState

seeds = st.integers(0, 2**32 - 1)
angles = st.floats(0, 2 * np.pi)
PAULI = (linalg.SIGMA_X, linalg.SIGMA_Y, linalg.SIGMA_Z)


def spin(n):
    return sum(c * s for c, s in zip(n, PAULI))


def unit(rng):
    v = rng.normal(size=3)
    return v / np.linalg.norm(v)


def test_tsirelson_anchor():
    res = max_chsh(tsirelson_setting())
    assert res.bell_operator_max == pytest.approx(2 * np.sqrt(2), abs=1e-8)
    assert res.violated and res.locally_incompatible
    assert chsh_value(SINGLET, tsirelson_setting()) == pytest.approx(2 * np.sqrt(2), abs=1e-8)


def test_product_state_obeys_classical_bound():
    s = tsirelson_setting()
    assert abs(chsh_value(np.kron([1, 0], [1, 0]), s)) <= 2 + 1e-12


def test_identical_settings_do_not_violate():
    s = CHSHSetting(linalg.SIGMA_Z, linalg.SIGMA_Z, linalg.SIGMA_Z, linalg.SIGMA_Z)
    res = max_chsh(s)
    assert res.bell_operator_max == pytest.approx(2.0)
    assert not res.violated and not res.locally_incompatible


def test_spectrum_outside_unit_interval_rejected():
    with pytest.raises(ValueError):
        CHSHSetting(2 * linalg.SIGMA_Z, linalg.SIGMA_X, linalg.SIGMA_Z, linalg.SIGMA_X)


def test_state_dimension_checked():
    with pytest.raises(DimMismatch):
        chsh_value([1, 0], tsirelson_setting())


def test_maximally_mixed_gives_zero():
    assert chsh_value(QuantumState.maximally_mixed(4), tsirelson_setting()) == pytest.approx(0.0, abs=1e-12)


@given(angles, angles, angles, angles)
def test_singlet_correlations_in_a_plane(a1, a2, b1, b2):
    # oracle: <singlet| n.sigma (x) m.sigma |singlet> = -cos(angle between n and m)
    d = lambda t: np.array([np.sin(t), 0.0, np.cos(t)])
    s = CHSHSetting(spin(d(a1)), spin(d(a2)), spin(d(b1)), spin(d(b2)))
    E = lambda x, y: -np.cos(x - y)
    expect = E(a1, b1) + E(a1, b2) + E(a2, b1) - E(a2, b2)
    assert chsh_value(SINGLET, s) == pytest.approx(expect, abs=1e-10)


@given(seeds)
def test_max_matches_landau_formula(seed):
    # for +-1 qubit spins ||B|| = 2 sqrt(1 + sin(alpha) sin(beta))
    rng = np.random.default_rng(seed)
    a1, a2, b1, b2 = (unit(rng) for _ in range(4))
    sa = np.linalg.norm(np.cross(a1, a2))
    sb = np.linalg.norm(np.cross(b1, b2))
    s = CHSHSetting(spin(a1), spin(a2), spin(b1), spin(b2))
    assert max_chsh(s).bell_operator_max == pytest.approx(2 * np.sqrt(1 + sa * sb), abs=1e-9)


@given(seeds, st.sampled_from(bell.MINUS_PLACEMENTS))
def test_optimal_state_attains_signed_eigenvalue(seed, minus):
    rng = np.random.default_rng(seed)
    s = bell.random_setting((2, 3), rng)
    res = max_chsh(s, minus)
    assert chsh_value(res.optimal_state, s, minus) == pytest.approx(res.bell_operator_eigenvalue, abs=1e-10)
    assert res.bell_operator_max <= 2 * np.sqrt(2) + 1e-9


@given(seeds, st.sampled_from(["alice", "bob", "both"]), st.integers(2, 3), st.integers(2, 3))
def test_compatible_side_never_violates(seed, which, dA, dB):
    s = bell.random_setting((dA, dB), np.random.default_rng(seed), which)
    res = max_chsh(s)
    assert not res.locally_incompatible
    assert res.bell_operator_max <= 2 + 1e-8


@given(seeds)
def test_random_states_below_operator_max(seed):
    rng = np.random.default_rng(seed)
    s = bell.random_setting((2, 2), rng)
    rho = linalg.random_density(4, rng)
    assert abs(chsh_value(QuantumState.mixed(rho), s)) <= max_chsh(s).bell_operator_max + 1e-10


def test_phi_plus_with_other_sign_placement():
    values = [max_chsh(tsirelson_setting(), m).bell_operator_max for m in bell.MINUS_PLACEMENTS]
    assert values == pytest.approx([2 * np.sqrt(2)] * 4, abs=1e-8)
    assert abs(chsh_value(PHI_PLUS, tsirelson_setting())) <= 2 * np.sqrt(2) + 1e-12


def test_sweep_is_thread_independent():
    one = incompatibility_sweep(40, (2, 2), seed=5, threads=1)
    four = incompatibility_sweep(40, (2, 2), seed=5, threads=4)
    assert list(one.to_csv_rows()) == list(four.to_csv_rows())


def test_sweep_contingency_and_csv():
    rep = incompatibility_sweep(30, (2, 2), seed=1)
    assert sum(rep.contingency.values()) == 30
    assert rep.necessity_holds
    rows = list(rep.to_csv_rows())
    assert rows[0] == ["trial", "commutator_norm_A", "commutator_norm_B", "bell_max", "violated"]
    assert len(rows) == 31


def test_sweep_without_incompatible_trials_has_no_rate():
    rep = incompatibility_sweep(10, (2, 2), seed=2, compatible="both")
    assert rep.sufficiency_rate is None
    assert rep.count(False, True) == 0
