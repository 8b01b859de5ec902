import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from polariton_scf import scf
from polariton_scf.fock_oracle import apply_dressed_hamiltonian
from polariton_scf.model import box6, build_model, dressed_operators


def make(n_sites=3, nph=2, n_el=2, coupling=0.6, omega=0.5, potential=None):
    cfg = {"n_sites": n_sites, "omega": omega, "n_photon_basis": nph, "n_electrons": n_el,
           "coupling": coupling}
    if potential is not None:
        cfg["potential"] = potential
    return build_model(cfg)


def four_index_energy(ops, phi):
    """RHF energy from the explicit kernel w'[p, q, r, s] (p, q particle 1)."""
    x, q = ops.x_op, ops.q_op
    lam, c = ops.coupling, ops.coupling_const
    w = (lam**2 * np.einsum("pq,rs->pqrs", x, x)
         - c * (np.einsum("pq,rs->pqrs", q, x) + np.einsum("pq,rs->pqrs", x, q)))
    e = 2.0 * np.einsum("pa,pq,qa->", phi, ops.h_one, phi)
    coul = np.einsum("pa,qa,pqrs,rb,sb->", phi, phi, w, phi, phi)
    exch = np.einsum("pa,qb,pqrs,rb,sa->", phi, phi, w, phi, phi)
    return e + 2.0 * coul - exch


def singlet_tensor(model, phi):
    """Two-electron dressed Slater determinant with one doubly occupied orbital."""
    nm, nph = model.n_sites, model.n_photon_basis
    f = phi[:, 0].reshape(nm, nph)
    t = np.zeros((nm, 2, nm, 2, nph, nph))
    pair = np.einsum("ia,jb->ijab", f, f) / math.sqrt(2.0)
    t[:, 0, :, 1] = pair
    t[:, 1, :, 0] = -pair
    return t.reshape(2 * nm, 2 * nm, nph, nph)


def random_phi(seed, dim, k):
    return scf.orthonormalize(np.random.default_rng(seed).standard_normal((dim, k)))


@settings(max_examples=25, deadline=None)
@given(seed=st.integers(0, 10**6), n_el=st.sampled_from([2, 4, 6]), lam=st.floats(0.0, 1.2))
def test_energy_matches_four_index_contraction(seed, n_el, lam):
    m = make(n_sites=4, nph=3, n_el=n_el, coupling=lam, potential=[0.2, -0.1, 0.0, 0.3])
    ops = dressed_operators(m)
    phi = random_phi(seed, ops.dim, n_el // 2)
    assert scf.hf_energy(ops, phi) == pytest.approx(four_index_energy(ops, phi), abs=1e-11)


@pytest.mark.parametrize("seed", range(5))
def test_energy_matches_two_electron_slater_determinant(seed):
    m = make(n_sites=3, nph=3, coupling=0.8, potential=[0.1, 0.0, -0.2])
    ops = dressed_operators(m)
    phi = random_phi(seed, ops.dim, 1)
    t = singlet_tensor(m, phi)
    assert np.linalg.norm(t) == pytest.approx(1.0)
    expect = float(np.sum(t * apply_dressed_hamiltonian(m, t)))
    assert scf.hf_energy(ops, phi) == pytest.approx(expect, abs=1e-12)


@pytest.mark.parametrize("seed", range(5))
def test_fock_is_half_the_real_gradient(seed):
    m = make(n_sites=3, nph=3, n_el=4, coupling=0.7)
    ops = dressed_operators(m)
    phi = random_phi(seed, ops.dim, 2)
    d = np.random.default_rng(seed + 100).standard_normal(phi.shape)
    h = 1e-5
    fd = (scf.hf_energy(ops, phi + h * d) - scf.hf_energy(ops, phi - h * d)) / (2 * h)
    an = 2.0 * float(np.sum(d * scf.fock_apply(ops, phi, phi)))
    assert fd == pytest.approx(an, rel=1e-7)


def test_dense_fock_is_symmetric():
    ops = dressed_operators(make(coupling=0.9, n_el=4, nph=3))
    f = scf.dense_fock(ops, random_phi(3, ops.dim, 2))
    assert np.allclose(f, f.T, atol=1e-12)


def lagrangian_fd(ops, state, phi, d, h=1e-5):
    lag = scf.Lagrangian(ops, state)
    return (lag.value(phi + h * d) - lag.value(phi - h * d)) / (2 * h)


@pytest.mark.parametrize("seed", range(8))
def test_lagrangian_gradient_with_violated_bounds(seed):
    # fermionic-like orbitals that overfill a site so the penalty branch is live
    r = np.random.default_rng(seed)
    m = make(n_sites=3, nph=3, n_el=4, coupling=0.5)
    ops = dressed_operators(m)
    phi = np.zeros((ops.dim, 2))
    phi[0, 0] = phi[1, 1] = 1.0
    phi = scf.orthonormalize(phi + 0.2 * r.standard_normal(phi.shape))
    state = scf.ConstraintState(multipliers=r.uniform(0, 1, 3), penalty=r.uniform(1, 50))
    _, grad, viol = scf.Lagrangian(ops, state).value_and_grad(phi)
    assert viol > 0
    d = r.standard_normal(phi.shape)
    fd = lagrangian_fd(ops, state, phi, d)
    assert fd == pytest.approx(float(np.sum(grad * d)), rel=1e-6)


def test_inactive_state_has_no_penalty():
    st_ = scf.ConstraintState.inactive(4)
    assert st_.penalty_terms(np.array([-1.0, 0.5])) == 0.0
    assert not np.any(st_.weights(np.array([-1.0, 0.5])))


def test_uncoupled_aufbau_energy():
    m = box6(0.0, 0.4)
    ops = dressed_operators(m)
    phi = scf.initial_orbitals(ops, 2)
    eps = np.linalg.eigvalsh(ops.h_one)[:2]
    assert scf.hf_energy(ops, phi) == pytest.approx(2 * eps.sum(), abs=1e-12)
    sol = scf.solve(m, scf.POLARITONIC)
    assert sol.dressed_energy == pytest.approx(2 * (-0.900969 - 0.623490) + 4 * 0.2, abs=1e-5)
    assert sol.physical_energy == pytest.approx(sol.dressed_energy - 3 * 0.2, abs=1e-12)


def test_random_start_reaches_aufbau_when_uncoupled():
    m = box6(0.0, 0.4)
    ops = dressed_operators(m)
    start = random_phi(11, ops.dim, 2)
    sol = scf.solve(m, scf.FERMIONIC, initial=start)
    assert sol.dressed_energy == pytest.approx(2 * np.linalg.eigvalsh(ops.h_one)[:2].sum(), abs=1e-8)


def test_pauli_violation_fixture():
    m = box6(0.0, 0.2)
    f = scf.solve(m, scf.FERMIONIC)
    p = scf.solve(m, scf.POLARITONIC)
    eps = np.linalg.eigvalsh(np.diag([-0.5] * 5, 1) + np.diag([-0.5] * 5, -1))
    assert f.physical_energy == pytest.approx(4 * eps[0] + 2.5 * 0.2, abs=1e-5)
    assert p.physical_energy == pytest.approx(2 * (eps[0] + eps[1]) + 0.1, abs=1e-5)
    assert f.density.occ_e.max() == pytest.approx(4.0, abs=1e-6)
    assert p.max_violation < 1e-6 and p.converged and f.converged


def test_polaritonic_never_below_fermionic():
    for g in (0.1, 0.3):
        m = box6(g, 0.4)
        p = scf.solve(m, scf.POLARITONIC)
        f = scf.solve(m, scf.FERMIONIC)
        assert p.dressed_energy >= f.dressed_energy - 1e-8


def test_solve_is_deterministic():
    m = box6(0.3, 0.4)
    a = scf.solve(m, scf.POLARITONIC, scf.SCFOptions(seed=3))
    b = scf.solve(m, scf.POLARITONIC, scf.SCFOptions(seed=3))
    assert a.dressed_energy == b.dressed_energy
    assert np.array_equal(a.orbitals, b.orbitals)


def test_looser_tolerance_needs_no_more_iterations():
    m = box6(0.2, 0.4)
    ops = dressed_operators(m)
    phi0 = scf.initial_orbitals(ops, 2)
    state = scf.ConstraintState.inactive(6)
    tight = scf.inner_minimize(ops, phi0, state, 1e-7)
    loose = scf.inner_minimize(ops, phi0, state, 1e-6)
    assert loose.iterations <= tight.iterations


def test_trace_rows_have_five_fields():
    sol = scf.solve(box6(0.2, 0.4), scf.POLARITONIC, scf.SCFOptions(restarts=1))
    assert sol.trace and all(len(row) == 5 for row in sol.trace)


def test_options_reject_unknown_keys():
    with pytest.raises(ValueError):
        scf.SCFOptions.from_mapping({"nope": 1})
    with pytest.raises(ValueError):
        scf.solve(box6(), "bosonic")
