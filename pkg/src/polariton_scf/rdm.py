"""One-body reduced density matrices of dressed and physical states, their
natural decompositions and the ensemble N-representability checks."""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np

REPORT_TOL = 1e-6


class RDMError(ValueError):
    pass


def natural_decomposition(mat: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
    """Eigenpairs of a real symmetric matrix, occupations descending.

    Ties keep the eigensolver's index order (stable sort); each vector is
    signed so that its largest-magnitude component is positive.
    """
    w, v = np.linalg.eigh(0.5 * (mat + mat.T))
    order = np.argsort(-w, kind="stable")
    w, v = w[order], v[:, order]
    pivot = np.argmax(np.abs(v), axis=0)
    signs = np.sign(v[pivot, np.arange(v.shape[1])])
    signs[signs == 0] = 1.0
    return w, v * signs


@dataclass(frozen=True)
class DensityMatrices:
    """Spin-summed one-body density matrices.

    ``gamma_dressed`` is None for physical (exact) states. ``gamma_p`` is
    always normalised to N; the trace-one reduced photon state of a physical
    state is ``gamma_p_physical``.
    """

    gamma_e: np.ndarray
    gamma_p: np.ndarray
    n_electrons: int
    gamma_dressed: np.ndarray | None = None
    gamma_p_physical: np.ndarray | None = None

    def __post_init__(self):
        occ_e, nat_e = natural_decomposition(self.gamma_e)
        occ_p, nat_p = natural_decomposition(self.gamma_p)
        object.__setattr__(self, "occ_e", occ_e)
        object.__setattr__(self, "natorb_e", nat_e)
        object.__setattr__(self, "occ_p", occ_p)
        object.__setattr__(self, "natorb_p", nat_p)
        if self.gamma_dressed is not None:
            object.__setattr__(self, "occ_dressed", np.linalg.eigvalsh(self.gamma_dressed)[::-1])
        else:
            object.__setattr__(self, "occ_dressed", None)

    @property
    def density(self) -> np.ndarray:
        return np.diag(self.gamma_e).copy()


def partial_traces(gamma: np.ndarray, n_sites: int, n_photon_basis: int) -> tuple[np.ndarray, np.ndarray]:
    """Electronic and photonic reductions of a composite (site x Fock) matrix."""
    g4 = gamma.reshape(n_sites, n_photon_basis, n_sites, n_photon_basis)
    return np.einsum("iaja->ij", g4), np.einsum("iaib->ab", g4)


def from_orbitals(orbitals: np.ndarray, n_sites: int, n_photon_basis: int,
                  tol: float = 1e-8) -> DensityMatrices:
    """Density matrices of a doubly occupied set of polariton orbitals.

    ``orbitals`` has shape ``(d, N/2)`` with orthonormal columns.
    """
    phi = np.asarray(orbitals, dtype=float)
    if phi.ndim == 1:
        phi = phi[:, None]
    dev = np.max(np.abs(phi.T @ phi - np.eye(phi.shape[1])))
    if dev > tol:
        raise RDMError(f"orbitals not orthonormal: max overlap deviation {dev:.3e}")
    gamma = 2.0 * phi @ phi.T
    gamma_e, gamma_p = partial_traces(gamma, n_sites, n_photon_basis)
    return DensityMatrices(gamma_e=gamma_e, gamma_p=gamma_p,
                           n_electrons=2 * phi.shape[1], gamma_dressed=gamma)


def electronic_rdm(orbitals: np.ndarray, n_sites: int, n_photon_basis: int) -> np.ndarray:
    """``gamma_e`` only; the cheap path used inside the optimiser."""
    phi = orbitals.reshape(n_sites, n_photon_basis, -1)
    return 2.0 * np.einsum("iak,jak->ij", phi, phi)


def representability_report(dm: DensityMatrices, n_electrons: int, tol: float = REPORT_TOL) -> dict:
    """Check the ensemble N-representability conditions.

    Returns ``{"passed": bool, "conditions": [{name, pass, max_violation}]}``.
    The electronic upper bound is 2 because all matrices are spin summed.
    """
    conds = []

    def add(name, violation):
        violation = float(max(violation, 0.0))
        conds.append({"name": name, "pass": bool(violation <= tol), "max_violation": violation})

    n_e, n_p = dm.occ_e, dm.occ_p
    add("electronic_lower_bound", -n_e.min())
    add("electronic_upper_bound", n_e.max() - 2.0)
    add("electronic_trace", abs(n_e.sum() - n_electrons))
    add("photonic_lower_bound", -n_p.min())
    add("photonic_trace", abs(n_p.sum() - n_electrons))
    if dm.occ_dressed is not None:
        n_d = dm.occ_dressed
        add("dressed_bounds", max(-n_d.min(), n_d.max() - 2.0))
    return {"passed": all(c["pass"] for c in conds), "conditions": conds}


def rdm_distance(a: np.ndarray, b: np.ndarray) -> float:
    """Frobenius norm of ``a - b``."""
    a, b = np.asarray(a, dtype=float), np.asarray(b, dtype=float)
    if a.shape != b.shape:
        raise RDMError(f"shape mismatch {a.shape} vs {b.shape}")
    return float(np.linalg.norm(a - b))


def occupation_distance(n_a, n_b) -> float:
    """Sum of absolute differences between descending occupation vectors."""
    n_a, n_b = np.asarray(n_a, dtype=float), np.asarray(n_b, dtype=float)
    if n_a.shape != n_b.shape:
        raise RDMError(f"length mismatch {n_a.shape} vs {n_b.shape}")
    return float(np.sum(np.abs(np.sort(n_a)[::-1] - np.sort(n_b)[::-1])))


def from_exact_state(state, tol: float = 1e-10) -> DensityMatrices:
    """Electronic and photonic density matrices of an exact physical state.

    ``gamma_e[i, j] = sum_sigma <c_{j sigma}^dagger c_{i sigma}>``.
    ``gamma_p_physical`` is the trace-one reduced photon state in the Fock
    basis; ``gamma_p`` is the same matrix scaled by N so that every field of
    :class:`DensityMatrices` shares the trace N.
    """
    from . import kernels

    basis = state.basis
    c = np.asarray(state.coeffs, dtype=float)
    norm = float(np.linalg.norm(c))
    if abs(norm - 1.0) > tol:
        raise RDMError(f"state not normalised: |c| = {norm:.15f}")
    cm = c.reshape(basis.n_dets, basis.n_photon_basis)
    nm = basis.n_sites
    p_list, q_list = [], []
    for i in range(nm):
        for j in range(nm):
            for s in (0, 1):
                p_list.append(2 * j + s)
                q_list.append(2 * i + s)
    src, dst, pair, sign = kernels.single_excitations(basis.dets, p_list, q_list)
    overlap = np.einsum("ka,ka->k", cm[dst], cm[src]) * sign
    flat = np.bincount(pair, weights=overlap, minlength=len(p_list))
    gamma_e = flat.reshape(nm, nm, 2).sum(axis=2)
    gamma_e = 0.5 * (gamma_e + gamma_e.T)
    rho_p = cm.T @ cm
    n = basis.n_electrons
    return DensityMatrices(gamma_e=gamma_e, gamma_p=n * rho_p, n_electrons=n,
                           gamma_p_physical=rho_p)
