"""Tests for the Birkhoff-coordinate surrogates: actions, frequencies, the
linearized coordinate map, the free flow and torus membership."""

import math

import numpy as np
import pytest

from hillkdv.operator import Potential
from hillkdv.birkhoff import (
    BirkhoffState, actions_from_gaps, frequencies, linearized_birkhoff,
    inverse_linearized_birkhoff, flow, torus_membership,
)


def random_real_state(rng, N):
    z = rng.normal(size=2 * N + 1) + 1j * rng.normal(size=2 * N + 1)
    z = 0.5 * (z + np.conj(z[::-1]))
    z[N] = 0.0
    return BirkhoffState(z)


# ---------------------------------------------------------------------------
# state container
# ---------------------------------------------------------------------------

def test_state_indexing_and_zero_mode():
    st = BirkhoffState.from_pairs([(1, 1 + 2j), (-1, 1 - 2j)])
    assert st[1] == 1 + 2j and st[-1] == 1 - 2j
    assert st[0] == 0 and st[5] == 0
    with pytest.raises(ValueError):
        BirkhoffState.from_pairs([(0, 1.0)])


def test_real_state_actions_nonnegative():
    rng = np.random.default_rng(3)
    st = random_real_state(rng, 8)
    assert st.is_real_state()
    I = st.actions()
    assert np.max(np.abs(I.imag)) < 1e-14
    assert np.all(I.real >= 0)
    for n in range(1, 9):
        assert I[n - 1] == pytest.approx(abs(st[n]) ** 2)


# ---------------------------------------------------------------------------
# actions and frequencies
# ---------------------------------------------------------------------------

def test_actions_from_gaps_formula():
    gam = np.array([0.1, 0.05, 0.0])
    I = actions_from_gaps(gam)
    for n in (1, 2, 3):
        assert I[n - 1] == pytest.approx(gam[n - 1] ** 2 / (8 * n * math.pi))


def test_actions_from_gaps_complex_rejected():
    with pytest.raises(ValueError):
        actions_from_gaps(np.array([0.1 + 0.1j]))


def test_frequencies_free_and_correction():
    om = frequencies(np.zeros(4))
    for n in (1, 2, 3, 4):
        assert om[n - 1] == pytest.approx((2 * n * math.pi) ** 3)
    om2 = frequencies(np.array([0.5, 0.0]))
    assert om2[0] == pytest.approx((2 * math.pi) ** 3 - 3.0)
    with pytest.raises(ValueError):
        frequencies(np.array([-1.0]))


# ---------------------------------------------------------------------------
# linearized map
# ---------------------------------------------------------------------------

def test_linearized_map_scaling():
    q = Potential.from_even_pairs([(2, 0.4), (-2, 0.4)])
    st = linearized_birkhoff(q)
    assert st[2] == pytest.approx(0.4 / math.sqrt(4 * math.pi))
    assert st[1] == 0.0


def test_linearized_roundtrip():
    rng = np.random.default_rng(11)
    q = Potential.random_real(rng, n_max=9, sup=0.2)
    st = linearized_birkhoff(q)
    back = inverse_linearized_birkhoff(st)
    for k in range(-2 * 9, 2 * 9 + 1):
        assert back.coeff(k) == pytest.approx(q.coeff(k), abs=1e-13)


# ---------------------------------------------------------------------------
# free flow
# ---------------------------------------------------------------------------

def test_flow_group_law():
    rng = np.random.default_rng(17)
    st = random_real_state(rng, 16)
    a = flow(flow(st, 0.3), 0.7)
    b = flow(st, 1.0)
    # phases omega_n t with omega_16 ~ 1e6 carry ~omega * eps rounding noise
    om_max = (2 * 16 * math.pi) ** 3
    tol = max(1e-12, 10 * om_max * np.finfo(float).eps
              * float(np.max(np.abs(st.z))))
    assert np.max(np.abs(a.z - b.z)) < tol


def test_flow_preserves_actions_exactly():
    rng = np.random.default_rng(19)
    st = random_real_state(rng, 12)
    I0 = st.actions()
    I1 = flow(st, 12.34).actions()
    assert np.max(np.abs(I1 - I0)) < 1e-12


def test_flow_keeps_real_states_real():
    rng = np.random.default_rng(23)
    st = random_real_state(rng, 10)
    assert flow(st, 0.02).is_real_state(tol=1e-10)


def test_flow_identity_at_zero_time():
    rng = np.random.default_rng(29)
    st = random_real_state(rng, 6)
    np.testing.assert_allclose(flow(st, 0.0).z, st.z, atol=0)


def test_flow_phase_rate_matches_frequency():
    st = BirkhoffState.from_pairs([(1, 0.3), (-1, 0.3)], N=2)
    t = 1e-3
    out = flow(st, t)
    om = frequencies(np.array([0.09, 0.0]))[0]
    assert np.angle(out[1] / st[1]) == pytest.approx(om * t % (2 * np.pi),
                                                     abs=1e-12)


# ---------------------------------------------------------------------------
# torus membership and weak-star non-compactness
# ---------------------------------------------------------------------------

def test_torus_membership_accepts_flowed_states():
    rng = np.random.default_rng(31)
    st = random_real_state(rng, 8)
    assert torus_membership(st, flow(st, 5.0), tol=1e-10)


def test_torus_membership_rejects_amplitude_change():
    st = BirkhoffState.from_pairs([(1, 1.0), (-1, 1.0)])
    other = BirkhoffState.from_pairs([(1, 1.2), (-1, 1.2)])
    assert not torus_membership(st, other, tol=0.1)


def test_sign_flip_escapes_torus_in_the_limit():
    # z^{(j)} with the mass moving to ever-higher modes: all norms equal,
    # componentwise limit is 0, but no member lies on the torus of the limit
    limit = BirkhoffState.from_pairs([], N=1)
    family = [BirkhoffState.from_pairs([(j, 1.0), (-j, 1.0)], N=j + 1)
              for j in range(1, 9)]
    for st in family:
        assert not torus_membership(limit, st, tol=0.5)
        assert abs(st.actions()[st.half_range - 2]) == pytest.approx(1.0)
    # yet each fixed component converges to the limit's component
    for k in (1, 2, 3):
        assert abs(family[-1][k]) == 0.0
