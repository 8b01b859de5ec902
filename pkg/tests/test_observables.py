import numpy as np
import pytest

from polariton_scf import fock_oracle as fo
from polariton_scf import observables as obs
from polariton_scf import scf
from polariton_scf.model import box6, build_model
from polariton_scf.rdm import from_exact_state


@pytest.fixture(scope="module")
def coupled_box():
    m = box6(0.4, 0.4)
    return m, fo.ground_state(m), scf.solve(m, scf.POLARITONIC)


def test_uncoupled_exact_decomposition():
    m = box6(0.0, 0.4)
    dec = obs.decompose_exact(m, fo.ground_state(m))
    assert dec.bilinear == 0.0 and dec.dipole_self == 0.0
    assert dec.photon == pytest.approx(0.2, abs=1e-12)
    assert obs.photon_number_exact(m, fo.ground_state(m)) == pytest.approx((0.0, 0.0), abs=1e-12)


def test_exact_decomposition_is_complete(coupled_box):
    m, state, _ = coupled_box
    dec = obs.decompose_exact(m, state)
    assert dec.total == pytest.approx(state.energy, abs=1e-10)
    assert dec.dipole_self > 0
    assert dec.frame == obs.PHYSICAL


def test_gauge_minus_bare_identity(coupled_box):
    m, state, _ = coupled_box
    bare, gauge = obs.photon_number_exact(m, state)
    dec = obs.decompose_exact(m, state)
    assert gauge - bare == pytest.approx((dec.bilinear + dec.dipole_self) / m.frequency, abs=1e-10)
    assert gauge >= -1e-8


def test_dressed_decomposition_and_frame_offset(coupled_box):
    m, _, sol = coupled_box
    dec = obs.decompose_dressed(m, sol.orbitals)
    assert dec.total == pytest.approx(sol.dressed_energy, abs=1e-10)
    assert dec.total - obs.physical_offset(m) == pytest.approx(sol.physical_energy, abs=1e-12)
    assert dec.frame == obs.DRESSED


def test_dressed_photon_number_vanishes_without_coupling():
    m = box6(0.0, 0.4)
    assert obs.photon_number_dressed(m, scf.solve(m, scf.POLARITONIC)) == pytest.approx(0.0, abs=1e-10)


@pytest.mark.parametrize("g", [0.05, 0.1, 0.4])
def test_cross_frame_photon_number_for_two_electrons(g):
    m = build_model({"n_sites": 4, "omega": 0.4, "n_photon_basis": 6, "n_electrons": 2,
                     "coupling_over_omega": g})
    state = fo.ground_state(m)
    _, gauge = obs.photon_number_exact(m, state)
    pair = obs.photon_number_dressed_pair(m, fo.dress_two_particle(state))
    assert pair == pytest.approx(gauge, abs=1e-6)


def test_density_sums_to_n_and_is_reflection_symmetric():
    m = box6(0.0, 0.4)
    dm = scf.solve(m, scf.POLARITONIC).density
    rho = obs.density(dm)
    assert rho.sum() == pytest.approx(4.0, abs=1e-10)
    assert np.allclose(rho, rho[::-1], atol=1e-6)
    rho_exact = obs.density(from_exact_state(fo.ground_state(m)))
    assert rho_exact.sum() == pytest.approx(4.0, abs=1e-10)


def test_coupling_shifts_density_in_wide_well():
    base = {"n_sites": 30, "omega": 0.1, "n_photon_basis": 5, "n_electrons": 2,
            "potential": {"soft_coulomb": {"epsilon": 3.0}}}
    rho0 = obs.density(scf.solve(build_model(base), scf.POLARITONIC).density)
    rho1 = obs.density(scf.solve(build_model({**base, "coupling_over_omega": 0.2}),
                                 scf.POLARITONIC).density)
    assert np.linalg.norm(rho1 - rho0) > 1e-2
