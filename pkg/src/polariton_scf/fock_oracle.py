"""Exact diagonalization of the physical lattice Hamiltonian and the exact
two-electron dressing transform.

Basis: N-electron determinants over ``2 * n_sites`` spin orbitals, spin
orbital ``2 * i + sigma`` (site major, up spin first), encoded as bit masks
and sorted ascending; tensored with the Fock states ``alpha < n_photon_basis``.
Basis index is ``det_index * n_photon_basis + alpha``. A determinant is
``prod_{p ascending} c_p^dagger |0>``.
"""
from __future__ import annotations

import itertools
import logging
import math
from dataclasses import dataclass

import numpy as np
import scipy.linalg
import scipy.sparse as sp

from . import kernels
from .model import CavityLatticeModel, dressed_one_body, photon_ladder

log = logging.getLogger(__name__)

DENSE_LIMIT = 4000
DEFAULT_NNZ_CAP = 2_000_000


class OracleError(RuntimeError):
    pass


class LanczosError(OracleError):
    def __init__(self, message: str, residual: float):
        super().__init__(f"{message} (residual {residual:.3e})")
        self.residual = residual


@dataclass(frozen=True)
class DeterminantBasis:
    dets: np.ndarray
    n_sites: int
    n_electrons: int
    n_photon_basis: int

    @property
    def n_dets(self) -> int:
        return self.dets.size

    @property
    def dim(self) -> int:
        return self.dets.size * self.n_photon_basis

    def site_occupations(self) -> np.ndarray:
        occ = kernels.occupation_matrix(self.dets, 2 * self.n_sites).astype(float)
        return occ[:, 0::2] + occ[:, 1::2]


@dataclass(frozen=True)
class ManyBodyState:
    basis: DeterminantBasis
    coeffs: np.ndarray
    energy: float

    def __post_init__(self):
        norm = float(np.linalg.norm(self.coeffs))
        if abs(norm - 1.0) > 1e-12:
            raise OracleError(f"state not normalised: |c| = {norm:.15f}")

    def matrix(self) -> np.ndarray:
        """Coefficients as a ``(n_dets, n_photon_basis)`` array."""
        return self.coeffs.reshape(self.basis.n_dets, self.basis.n_photon_basis)


def basis_dimension(n_sites: int, n_electrons: int, n_photon_basis: int) -> int:
    return math.comb(2 * n_sites, n_electrons) * n_photon_basis


def make_basis(model: CavityLatticeModel) -> DeterminantBasis:
    n_so = 2 * model.n_sites
    if n_so > 62:
        raise OracleError("more than 62 spin orbitals do not fit the bit-mask encoding")
    dets = np.array(
        sorted(sum(1 << p for p in occ) for occ in itertools.combinations(range(n_so), model.n_electrons)),
        dtype=np.int64,
    )
    return DeterminantBasis(dets, model.n_sites, model.n_electrons, model.n_photon_basis)


def _hopping_matrix(basis: DeterminantBasis, hopping: float) -> sp.csr_matrix:
    p_list, q_list = [], []
    for i in range(basis.n_sites - 1):
        for s in (0, 1):
            a, b = 2 * i + s, 2 * (i + 1) + s
            p_list += [a, b]
            q_list += [b, a]
    src, dst, _, sign = kernels.single_excitations(basis.dets, p_list, q_list)
    n = basis.n_dets
    return sp.csr_matrix((-hopping * sign.astype(float), (dst, src)), shape=(n, n))


def _check_size(model: CavityLatticeModel, nnz_cap: int) -> None:
    nph = model.n_photon_basis
    n_dets = math.comb(2 * model.n_sites, model.n_electrons)
    # rough upper bound before building anything
    est = n_dets * nph * (2 * model.n_electrons + 1) + 2 * n_dets * max(nph - 1, 0)
    if est > nnz_cap:
        raise OracleError(
            f"Hamiltonian would need ~{est} nonzeros (cap {nnz_cap}); "
            "use a smaller basis or raise the cap for the Lanczos path")


def hamiltonian_terms(model: CavityLatticeModel, basis: DeterminantBasis | None = None,
                      nnz_cap: int = DEFAULT_NNZ_CAP) -> dict:
    """Sparse matrices of each physical term: kinetic, potential, dipole_self,
    bilinear and photon. Their sum is :func:`assemble_hamiltonian`."""
    _check_size(model, nnz_cap)
    if basis is None:
        basis = make_basis(model)
    nph = model.n_photon_basis
    lam, om = model.coupling, model.frequency
    n_site = basis.site_occupations()
    dipole = n_site @ model.positions
    eye_ph = sp.identity(nph, format="csr")
    eye_det = sp.identity(basis.n_dets, format="csr")
    terms = {
        "kinetic": sp.kron(_hopping_matrix(basis, model.hopping), eye_ph, format="csr"),
        "potential": sp.kron(sp.diags(n_site @ model.potential), eye_ph, format="csr"),
        "dipole_self": sp.kron(sp.diags(0.5 * lam**2 * dipole**2), eye_ph, format="csr"),
        "bilinear": -lam * math.sqrt(om / 2.0) * sp.kron(sp.diags(dipole), sp.csr_matrix(photon_ladder(nph)),
                                                          format="csr"),
        "photon": sp.kron(eye_det, sp.diags(om * (np.arange(nph) + 0.5)), format="csr"),
    }
    return terms


def photon_number_operator(basis: DeterminantBasis) -> sp.csr_matrix:
    """``a^dagger a`` on the full basis."""
    return sp.kron(sp.identity(basis.n_dets), sp.diags(np.arange(basis.n_photon_basis, dtype=float)),
                   format="csr")


def assemble_hamiltonian(model: CavityLatticeModel, basis: DeterminantBasis | None = None,
                         nnz_cap: int = DEFAULT_NNZ_CAP) -> sp.csr_matrix:
    """Sparse matrix of the physical Hamiltonian in the determinant x Fock basis."""
    terms = hamiltonian_terms(model, basis, nnz_cap)
    h = terms["kinetic"] + terms["potential"] + terms["dipole_self"] + terms["photon"]
    if model.coupling != 0.0:
        h = h + terms["bilinear"]
    h.sum_duplicates()
    h.eliminate_zeros()
    return h.tocsr()


def lanczos_ground(h, v0: np.ndarray | None = None, tol: float = 1e-10, krylov: int = 120,
                   max_restarts: int = 50, seed: int = 0) -> tuple[float, np.ndarray]:
    """Lowest eigenpair by restarted Lanczos with full reorthogonalisation."""
    n = h.shape[0]
    if v0 is None:
        v0 = np.random.default_rng(seed).standard_normal(n)
    v = v0 / np.linalg.norm(v0)
    krylov = min(krylov, n)
    residual = np.inf
    for _ in range(max_restarts):
        basis = np.zeros((krylov + 1, n))
        alpha = np.zeros(krylov)
        beta = np.zeros(krylov)
        basis[0] = v
        m = krylov
        for j in range(krylov):
            w = h @ basis[j]
            alpha[j] = basis[j] @ w
            w -= basis[: j + 1].T @ (basis[: j + 1] @ w)
            w -= basis[: j + 1].T @ (basis[: j + 1] @ w)
            beta[j] = np.linalg.norm(w)
            if beta[j] < 1e-14 * max(1.0, abs(alpha[j])):
                m = j + 1
                break
            basis[j + 1] = w / beta[j]
        t = np.diag(alpha[:m]) + np.diag(beta[: m - 1], 1) + np.diag(beta[: m - 1], -1)
        theta, s = np.linalg.eigh(t)
        e0 = theta[0]
        v = basis[:m].T @ s[:, 0]
        v /= np.linalg.norm(v)
        residual = float(np.linalg.norm(h @ v - e0 * v))
        if residual < tol * max(1.0, abs(e0)):
            return float(v @ (h @ v)), v
    raise LanczosError("Lanczos did not converge", residual)


def ground_state(model: CavityLatticeModel, *, method: str = "auto", basis: DeterminantBasis | None = None,
                 nnz_cap: int = DEFAULT_NNZ_CAP) -> ManyBodyState:
    """Exact ground state; dense below ``DENSE_LIMIT`` unless ``method`` says otherwise."""
    if basis is None:
        basis = make_basis(model)
    h = assemble_hamiltonian(model, basis, nnz_cap=nnz_cap)
    if method == "auto":
        method = "dense" if h.shape[0] < DENSE_LIMIT else "lanczos"
    if method == "dense":
        w, v = scipy.linalg.eigh(h.toarray(), subset_by_index=[0, 0])
        e, vec = float(w[0]), v[:, 0]
    elif method == "lanczos":
        e, vec = lanczos_ground(h)
    else:
        raise ValueError(f"unknown method {method!r}")
    vec = _fix_sign(vec / np.linalg.norm(vec))
    return ManyBodyState(basis=basis, coeffs=vec, energy=e)


def _fix_sign(v: np.ndarray) -> np.ndarray:
    k = int(np.argmax(np.abs(v)))
    return v if v[k] >= 0 else -v


def residual_norm(model: CavityLatticeModel, state: ManyBodyState) -> float:
    h = assemble_hamiltonian(model, state.basis)
    return float(np.linalg.norm(h @ state.coeffs - state.energy * state.coeffs))


def first_quantized_pair(state: ManyBodyState) -> np.ndarray:
    """Two-electron state as ``C[a, b, alpha]`` over spin orbitals a, b."""
    basis = state.basis
    if basis.n_electrons != 2:
        raise OracleError(f"two-electron state required, got N = {basis.n_electrons}")
    n_so = 2 * basis.n_sites
    c = state.matrix()
    out = np.zeros((n_so, n_so, basis.n_photon_basis))
    for k, d in enumerate(basis.dets.tolist()):
        p, q = [b for b in range(n_so) if (d >> b) & 1]
        out[p, q] += c[k] / math.sqrt(2.0)
        out[q, p] -= c[k] / math.sqrt(2.0)
    return out


def dress_two_particle(state: ManyBodyState) -> np.ndarray:
    """Map a physical two-electron state onto the dressed two-polariton space.

    Returns ``C'[a, b, beta1, beta2]``: each photon index alpha of the
    physical mode is distributed over the two auxiliary coordinates as
    ``(alpha - beta, beta)`` with weight ``sqrt(binom(alpha, beta) / 2**alpha)``.
    """
    c = first_quantized_pair(state)
    nph = state.basis.n_photon_basis
    n_so = c.shape[0]
    out = np.zeros((n_so, n_so, nph, nph))
    for alpha in range(nph):
        for beta in range(alpha + 1):
            w = math.sqrt(math.comb(alpha, beta) / 2.0**alpha)
            out[:, :, alpha - beta, beta] += w * c[:, :, alpha]
    return out


def apply_dressed_hamiltonian(model: CavityLatticeModel, tensor: np.ndarray) -> np.ndarray:
    """Apply ``h'(1) + h'(2) + w'(1, 2)`` (dressed with N = 2) to ``C'[a, b, b1, b2]``."""
    nm, nph = model.n_sites, model.n_photon_basis
    d = nm * nph
    h1 = dressed_one_body(model, n_particles=2)
    lam, om = model.coupling, model.frequency
    c = lam * om / math.sqrt(2.0)
    x = np.repeat(model.positions, nph)
    q = np.kron(np.eye(nm), photon_ladder(nph) / math.sqrt(2.0 * om))
    # [i1, s1, i2, s2, b1, b2] -> [s1, s2, (i1 b1), (i2 b2)]
    t = tensor.reshape(nm, 2, nm, 2, nph, nph).transpose(1, 3, 0, 4, 2, 5).reshape(2, 2, d, d)
    xm = x[:, None] * t * x[None, :]
    res = h1 @ t + t @ h1 + lam**2 * xm - c * ((q @ t) * x[None, :] + (x[:, None] * t) @ q)
    return res.reshape(2, 2, nm, nph, nm, nph).transpose(2, 0, 4, 1, 3, 5).reshape(tensor.shape)


def dressed_eigen_check(model: CavityLatticeModel, tensor: np.ndarray) -> tuple[float, float]:
    """Energy and eigen-residual of a dressed two-polariton tensor.

    The residual is measured after projecting ``H' Psi'`` onto total
    auxiliary excitation ``beta1 + beta2 < n_photon_basis``, the image of the
    truncated physical Fock space; outside it the per-coordinate truncation
    is not the transform of the physical truncation.
    """
    nph = model.n_photon_basis
    hpsi = apply_dressed_hamiltonian(model, tensor)
    b = np.arange(nph)
    inside = (b[:, None] + b[None, :]) < nph
    hpsi = hpsi * inside
    norm2 = float(np.sum(tensor * tensor))
    energy = float(np.sum(tensor * hpsi)) / norm2
    residual = float(np.linalg.norm(hpsi - energy * tensor)) / math.sqrt(norm2)
    return energy, residual


def exact_uncoupled_energy(model: CavityLatticeModel) -> float:
    """Closed-form ground energy at zero coupling: Aufbau filling plus omega/2."""
    eps = np.linalg.eigvalsh(
        np.diag(model.potential) - model.hopping * (np.eye(model.n_sites, k=1) + np.eye(model.n_sites, k=-1)))
    n = model.n_electrons
    levels = np.repeat(eps, 2)[:n]
    return float(levels.sum() + 0.5 * model.frequency)
