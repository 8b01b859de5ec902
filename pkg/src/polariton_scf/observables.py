"""Energy decompositions, photon numbers and densities for exact states and
HF orbital sets.

Exact states live in the physical (length-gauge) frame. HF solutions live in
the dressed frame, where each electron carries its own auxiliary photon
coordinate; the two frames share the total energy up to the constant
``(N - 1) * omega / 2``.
"""
from __future__ import annotations

from dataclasses import asdict, dataclass

import numpy as np

from . import fock_oracle
from .model import CavityLatticeModel, dressed_one_body_terms, dressed_operators
from .rdm import DensityMatrices

PHYSICAL = "physical"
DRESSED = "dressed"


@dataclass(frozen=True)
class EnergyDecomposition:
    """Energy split by physical origin (hartree)."""

    kinetic: float
    potential: float
    dipole_self: float
    bilinear: float
    photon: float
    frame: str

    @property
    def total(self) -> float:
        return self.kinetic + self.potential + self.dipole_self + self.bilinear + self.photon

    def as_dict(self) -> dict:
        out = asdict(self)
        out["total"] = self.total
        return out


def decompose_exact(model: CavityLatticeModel, state: fock_oracle.ManyBodyState) -> EnergyDecomposition:
    terms = fock_oracle.hamiltonian_terms(model, state.basis)
    c = state.coeffs
    ev = {name: float(c @ (op @ c)) for name, op in terms.items()}
    return EnergyDecomposition(frame=PHYSICAL, **ev)


def photon_number_exact(model: CavityLatticeModel, state: fock_oracle.ManyBodyState) -> tuple[float, float]:
    """``(bare, gauge)`` photon numbers of a physical state.

    ``bare`` is the plain ``<a^dagger a>``; ``gauge`` counts the displaced
    mode, ``(E_ph + E_I + E_d) / omega - 1/2``.
    """
    c = state.coeffs
    bare = float(c @ (fock_oracle.photon_number_operator(state.basis) @ c))
    dec = decompose_exact(model, state)
    gauge = (dec.photon + dec.bilinear + dec.dipole_self) / model.frequency - 0.5
    return bare, gauge


def decompose_dressed(model: CavityLatticeModel, orbitals: np.ndarray) -> EnergyDecomposition:
    """Dressed-frame split of the HF energy E'.

    Every coupling-dependent contribution is sorted into ``dipole_self``
    (the ``lambda**2`` pieces) or ``bilinear`` (the pieces linear in the
    coupling). The components sum to E'.
    """
    from .scf import _energy_terms

    phi = np.atleast_2d(np.asarray(orbitals, dtype=float).T).T
    one = {name: 2.0 * float(np.sum(phi * (mat @ phi)))
           for name, mat in dressed_one_body_terms(model).items()}
    two = _energy_terms(dressed_operators(model), phi)
    if model.coupling == 0.0:
        one["bilinear"] = 0.0
    return EnergyDecomposition(
        kinetic=one["kinetic"],
        potential=one["potential"],
        dipole_self=one["dipole_self"] + two["hartree_dse"] + two["exchange_dse"],
        bilinear=one["bilinear"] + two["hartree_bilinear"] + two["exchange_bilinear"],
        photon=one["photon"],
        frame=DRESSED,
    )


def physical_offset(model: CavityLatticeModel) -> float:
    """Constant separating the dressed and physical energies."""
    return (model.n_electrons - 1) * model.frequency / 2.0


def photon_number_dressed(model: CavityLatticeModel, solution) -> float:
    """Photon number of an HF solution, mapped back to the single physical mode."""
    orbitals = getattr(solution, "orbitals", solution)
    dec = decompose_dressed(model, orbitals)
    e_lambda = dec.dipole_self + dec.bilinear
    n = model.n_electrons
    return (dec.photon + e_lambda) / model.frequency - (n - 1) / 2.0 - 0.5


def density(dm: DensityMatrices) -> np.ndarray:
    """Site density, the diagonal of the electronic 1RDM."""
    return np.diag(dm.gamma_e).copy()


def photon_number_dressed_pair(model: CavityLatticeModel, tensor: np.ndarray) -> float:
    """Photon number of a dressed two-polariton tensor ``C'[a, b, b1, b2]``.

    Uses the same bookkeeping as :func:`photon_number_dressed`: everything in
    the dressed energy except the matter part, divided by omega, minus the
    zero-point offsets.
    """
    energy, _ = fock_oracle.dressed_eigen_check(model, tensor)
    nm, nph = model.n_sites, model.n_photon_basis
    d = nm * nph
    terms = dressed_one_body_terms(model, n_particles=2)
    h_matter = terms["kinetic"] + terms["potential"]
    t = tensor.reshape(nm, 2, nm, 2, nph, nph).transpose(1, 3, 0, 4, 2, 5).reshape(2, 2, d, d)
    e_matter = float(np.sum(t * (h_matter @ t + t @ h_matter))) / float(np.sum(t * t))
    return (energy - e_matter) / model.frequency - 0.5 - 0.5
