import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from polariton_scf import rdm
from polariton_scf.scf import orthonormalize


def loop_partial_traces(gamma, nm, nph):
    ge = np.zeros((nm, nm))
    gp = np.zeros((nph, nph))
    for i in range(nm):
        for j in range(nm):
            for a in range(nph):
                ge[i, j] += gamma[i * nph + a, j * nph + a]
    for a in range(nph):
        for b in range(nph):
            for i in range(nm):
                gp[a, b] += gamma[i * nph + a, i * nph + b]
    return ge, gp


def random_orbitals(seed, nm, nph, n_occ):
    r = np.random.default_rng(seed)
    return orthonormalize(r.standard_normal((nm * nph, n_occ)))


def test_partial_traces_match_loops(rng):
    g = rng.standard_normal((12, 12))
    ge, gp = rdm.partial_traces(g, 4, 3)
    le, lp = loop_partial_traces(g, 4, 3)
    assert np.allclose(ge, le) and np.allclose(gp, lp)


def test_occupation_distance_examples():
    assert rdm.occupation_distance([2, 2, 0], [2, 2, 0]) == 0.0
    assert rdm.occupation_distance([2, 2, 0], [2, 1, 1]) == 2.0
    with pytest.raises(rdm.RDMError):
        rdm.occupation_distance([1, 1], [1, 1, 0])


def test_rdm_distance_shape_check():
    with pytest.raises(rdm.RDMError):
        rdm.rdm_distance(np.eye(2), np.eye(3))


def test_non_orthonormal_orbitals_rejected():
    with pytest.raises(rdm.RDMError):
        rdm.from_orbitals(np.ones((6, 2)), 3, 2)


def test_natural_decomposition_order_and_sign():
    m = np.diag([0.5, 2.0, 1.0])
    w, v = rdm.natural_decomposition(-m)
    assert w.tolist() == [-0.5, -1.0, -2.0]
    assert np.all(v.max(axis=0) > 0)


def test_representability_flags_pauli_violation():
    gamma_e = np.diag([4.0, 0.0])
    dm = rdm.DensityMatrices(gamma_e=gamma_e, gamma_p=np.diag([4.0]), n_electrons=4)
    report = rdm.representability_report(dm, 4)
    by_name = {c["name"]: c for c in report["conditions"]}
    assert not report["passed"]
    assert by_name["electronic_upper_bound"]["max_violation"] == pytest.approx(2.0)
    assert by_name["electronic_trace"]["pass"]


@settings(max_examples=50, deadline=None)
@given(seed=st.integers(0, 10**6), nm=st.integers(2, 5), nph=st.integers(1, 4), n_occ=st.integers(1, 3))
def test_orbital_set_properties(seed, nm, nph, n_occ):
    n_occ = min(n_occ, nm * nph)
    phi = random_orbitals(seed, nm, nph, n_occ)
    dm = rdm.from_orbitals(phi, nm, nph)
    n = 2 * n_occ
    # traces agree across all three matrices
    for g in (dm.gamma_e, dm.gamma_p, dm.gamma_dressed):
        assert np.trace(g) == pytest.approx(n, abs=1e-10)
    # positivity survives the partial traces
    assert dm.occ_e.min() > -1e-10 and dm.occ_p.min() > -1e-10
    # dressed occupations are exactly 2 or 0
    expected = np.r_[np.full(n_occ, 2.0), np.zeros(nm * nph - n_occ)]
    assert np.allclose(dm.occ_dressed, expected, atol=1e-10)
    # natural decomposition reassembles the matrix
    recon = (dm.natorb_e * dm.occ_e) @ dm.natorb_e.T
    assert np.allclose(recon, dm.gamma_e, atol=1e-10)
    assert np.allclose(rdm.electronic_rdm(phi, nm, nph), dm.gamma_e, atol=1e-12)
    assert dm.density.sum() == pytest.approx(n, abs=1e-10)


@settings(max_examples=30, deadline=None)
@given(a=st.lists(st.floats(0, 2), min_size=1, max_size=8))
def test_occupation_distance_symmetric_and_zero_on_self(a):
    b = list(reversed(a))
    assert rdm.occupation_distance(a, a) == 0.0
    assert rdm.occupation_distance(a, b) == 0.0
