"""Spin-restricted Hartree-Fock in the dressed (polariton) space.

Two modes share one optimiser:

* ``fermionic``: plain minimisation of the dressed HF energy over
  orthonormal polariton orbitals (only the overall polariton antisymmetry).
* ``polaritonic``: the same energy with the electronic Pauli bound
  ``n_i^e <= 2`` imposed through an augmented Lagrangian.

Orbitals are the columns of a ``(d, N/2)`` array. Gradients returned by
:func:`fock_apply` and :func:`constraint_gradient` follow the complex
convention ``dE/dphi^*``; the derivative with respect to a real orbital is
twice that.
"""
from __future__ import annotations

import logging
from dataclasses import dataclass, field

import numpy as np

from .model import CavityLatticeModel, DressedOperators, dressed_operators
from .rdm import DensityMatrices, electronic_rdm, from_orbitals, natural_decomposition

log = logging.getLogger(__name__)

POLARITONIC = "polaritonic"
FERMIONIC = "fermionic"


@dataclass
class ConstraintState:
    """Augmented-Lagrangian bookkeeping for the bounds ``g_i = 2 - n_i^e >= 0``.

    Multipliers are paired with natural-orbital slots by descending
    occupation rank.
    """

    multipliers: np.ndarray
    penalty: float = 10.0
    g_values: np.ndarray | None = None
    inner_tol: float = 1e-3
    constraint_tol: float = 1e-2
    active: bool = True

    @classmethod
    def inactive(cls, n_sites: int) -> "ConstraintState":
        return cls(multipliers=np.zeros(n_sites), penalty=0.0, active=False)

    def weights(self, g: np.ndarray) -> np.ndarray:
        if not self.active:
            return np.zeros_like(g)
        return self.multipliers + self.penalty * np.maximum(-g, 0.0)

    def penalty_terms(self, g: np.ndarray) -> float:
        if not self.active:
            return 0.0
        viol = np.maximum(-g, 0.0)
        return float(-self.multipliers @ g + 0.5 * self.penalty * viol @ viol)


@dataclass(frozen=True)
class SCFSolution:
    orbitals: np.ndarray
    dressed_energy: float
    physical_energy: float
    density: DensityMatrices
    converged: bool
    outer_iterations: int
    inner_iterations: int
    gradient_norm: float
    max_violation: float
    mode: str
    multipliers: np.ndarray
    penalty: float
    trace: list = field(default_factory=list, repr=False, compare=False)

    @property
    def g_values(self) -> np.ndarray:
        return 2.0 - self.density.occ_e


@dataclass
class SCFOptions:
    max_outer: int = 50
    max_inner: int = 5000
    seed: int = 0
    initial_penalty: float = 10.0
    max_penalty: float = 1e8
    perturbation: float | None = None
    grad_tol: float = 1e-6
    energy_tol: float = 1e-4
    convergence_tol: float = 1e-4
    violation_tol: float = 1e-6
    inner_tol: float = 1e-3
    inner_tol_factor: float = 0.3
    constraint_tol: float = 1e-2
    restarts: int | None = None

    @classmethod
    def from_mapping(cls, data) -> "SCFOptions":
        known = set(cls.__dataclass_fields__)
        unknown = set(data) - known
        if unknown:
            raise ValueError(f"unknown solver option(s): {sorted(unknown)}")
        return cls(**dict(data))


# ---------------------------------------------------------------- energy

def _one_body_blocks(ops: DressedOperators, phi: np.ndarray):
    hphi = ops.h_one @ phi
    xphi = ops.x_diag[:, None] * phi
    qphi = ops.q_op @ phi
    return hphi, xphi, qphi


def hf_energy(ops: DressedOperators, orbitals: np.ndarray) -> float:
    """Dressed HF energy E' of a doubly occupied orthonormal orbital set."""
    phi = np.atleast_2d(orbitals.T).T
    return _energy_terms(ops, phi)["total"]


def _energy_terms(ops: DressedOperators, phi: np.ndarray) -> dict:
    lam, c = ops.coupling, ops.coupling_const
    hphi, xphi, qphi = _one_body_blocks(ops, phi)
    x_ab = phi.T @ xphi
    q_ab = phi.T @ qphi
    tr_x, tr_q = np.trace(x_ab), np.trace(q_ab)
    one = 2.0 * float(np.sum(phi * hphi))
    hartree_dse = 2.0 * lam**2 * tr_x**2
    hartree_bil = -4.0 * c * tr_q * tr_x
    exch_dse = -lam**2 * float(np.sum(x_ab * x_ab))
    exch_bil = 2.0 * c * float(np.sum(q_ab * x_ab))
    total = one + hartree_dse + hartree_bil + exch_dse + exch_bil
    return {
        "one_body": one, "hartree_dse": hartree_dse, "hartree_bilinear": hartree_bil,
        "exchange_dse": exch_dse, "exchange_bilinear": exch_bil, "total": total,
    }


def fock_apply(ops: DressedOperators, orbitals: np.ndarray, vec: np.ndarray) -> np.ndarray:
    """Apply the Fock operator ``2h' + 2 sum_b (2 J_b - K_b)`` of ``orbitals`` to ``vec``.

    ``vec`` may be a vector or a ``(d, k)`` block.
    """
    phi = np.atleast_2d(orbitals.T).T
    v = np.asarray(vec, dtype=float)
    lam, c = ops.coupling, ops.coupling_const
    x = ops.x_diag if v.ndim == 1 else ops.x_diag[:, None]
    xphi = ops.x_diag[:, None] * phi
    qphi = ops.q_op @ phi
    tr_x = float(np.sum(phi * xphi))
    tr_q = float(np.sum(phi * qphi))
    xv = x * v
    qv = ops.q_op @ v
    out = 2.0 * (ops.h_one @ v)
    out += 4.0 * (lam**2 * tr_x * xv - c * (tr_q * xv + tr_x * qv))
    out -= 2.0 * (lam**2 * xphi @ (xphi.T @ v) - c * (qphi @ (xphi.T @ v) + xphi @ (qphi.T @ v)))
    return out


def dense_fock(ops: DressedOperators, orbitals: np.ndarray) -> np.ndarray:
    """Explicit Fock matrix (for checks on small bases)."""
    return fock_apply(ops, orbitals, np.eye(ops.dim))


# ----------------------------------------------------------- constraints

def constraint_gradient(dm_or_natorbs, state: ConstraintState, vec: np.ndarray,
                        n_sites: int | None = None, n_photon_basis: int | None = None) -> np.ndarray:
    """Penalty/multiplier contribution ``sum_i w_i G_i vec`` to ``dL/dphi^*``.

    ``G_i`` projects the electronic part of ``vec`` (at every Fock index)
    onto natural orbital i, times 2 for the spin sum; ``w_i = lambda_i +
    mu [g_i]^-``. The first argument is a :class:`DensityMatrices` or a
    ``(occupations, natural_orbitals)`` pair.
    """
    if isinstance(dm_or_natorbs, DensityMatrices):
        occ, nat = dm_or_natorbs.occ_e, dm_or_natorbs.natorb_e
    else:
        occ, nat = dm_or_natorbs
    n_sites = nat.shape[0] if n_sites is None else n_sites
    v = np.asarray(vec, dtype=float)
    w = state.weights(2.0 - occ)
    if not np.any(w):
        return np.zeros_like(v)
    proj = (nat * w) @ nat.T
    n_ph = v.shape[0] // n_sites if n_photon_basis is None else n_photon_basis
    shaped = v.reshape(n_sites, n_ph, -1)
    return 2.0 * np.einsum("ij,jak->iak", proj, shaped).reshape(v.shape)


class Lagrangian:
    """Augmented Lagrangian ``E' - sum lambda_i g_i + mu/2 sum ([g_i]^-)^2`` as a
    function of the orbitals, with the electronic natural orbitals refreshed
    at every evaluation."""

    def __init__(self, ops: DressedOperators, state: ConstraintState):
        self.ops = ops
        self.state = state
        self.n_evals = 0

    def value(self, phi: np.ndarray) -> float:
        self.n_evals += 1
        e = _energy_terms(self.ops, phi)["total"]
        if not self.state.active:
            return e
        occ = np.linalg.eigvalsh(electronic_rdm(phi, self.ops.n_sites, self.ops.n_photon_basis))[::-1]
        return e + self.state.penalty_terms(2.0 - occ)

    def value_and_grad(self, phi: np.ndarray) -> tuple[float, np.ndarray, float]:
        """Value, real gradient ``dL/dphi`` and max constraint violation."""
        self.n_evals += 1
        e = _energy_terms(self.ops, phi)["total"]
        grad = 2.0 * fock_apply(self.ops, phi, phi)
        occ, nat = natural_decomposition(electronic_rdm(phi, self.ops.n_sites, self.ops.n_photon_basis))
        g = 2.0 - occ
        viol = float(np.max(np.maximum(-g, 0.0)))
        if self.state.active:
            e += self.state.penalty_terms(g)
            grad += 2.0 * constraint_gradient((occ, nat), self.state, phi, self.ops.n_sites,
                                              self.ops.n_photon_basis)
        return e, grad, viol


# ------------------------------------------------------------ optimiser

def orthonormalize(phi: np.ndarray) -> np.ndarray:
    """Gram-Schmidt via QR, with columns signed so that diag(R) > 0."""
    q, r = np.linalg.qr(phi)
    s = np.sign(np.diag(r))
    s[s == 0] = 1.0
    return q * s


def _geodesic(phi, u, sigma, vt, theta):
    cos = np.cos(sigma * theta)
    sin = np.sin(sigma * theta)
    return (phi @ vt.T * cos) @ vt + (u * sin) @ vt


@dataclass
class InnerResult:
    orbitals: np.ndarray
    value: float
    gradient_norm: float
    iterations: int
    converged: bool
    max_violation: float
    trace: list


def inner_minimize(ops: DressedOperators, orbitals: np.ndarray, state: ConstraintState, tol: float,
                   max_iter: int = 5000, record: list | None = None) -> InnerResult:
    """Minimise the augmented Lagrangian at fixed multipliers and penalty.

    Polak-Ribiere conjugate gradient on the manifold of orthonormal orbital
    sets, with steps taken along geodesics, a quadratic-fit line search and
    restarts every ``d`` iterations. Stops when the projected gradient norm
    (complex convention) drops below ``tol``; hitting ``max_iter`` returns a
    non-converged result.
    """
    lag = Lagrangian(ops, state)
    phi = orthonormalize(np.atleast_2d(orbitals.T).T)
    value, grad, viol = lag.value_and_grad(phi)
    d = phi.shape[0]
    direction = None
    g_prev = None
    step = 0.2
    trace = [] if record is None else record
    gnorm = np.inf
    it = 0
    converged = False
    for it in range(max_iter + 1):
        g = grad - phi @ (phi.T @ grad)
        gnorm = 0.5 * float(np.linalg.norm(g))
        trace.append((value, gnorm, viol))
        if gnorm < tol:
            converged = True
            break
        if it == max_iter:
            break
        if direction is None or it % d == 0 or g_prev is None:
            direction = -g
        else:
            direction = direction - phi @ (phi.T @ direction)
            beta = float(np.sum(g * (g - g_prev)) / np.sum(g_prev * g_prev))
            direction = -g + max(beta, 0.0) * direction
        slope = float(np.sum(grad * direction))
        if slope >= 0.0:
            direction = -g
            slope = float(np.sum(grad * direction))
        u, sigma, vt = np.linalg.svd(direction, full_matrices=False)
        smax = float(sigma[0])
        # line search on theta in units where the largest rotation angle is smax*theta
        theta_t = min(step, 0.5 / smax)
        f_t = lag.value(_geodesic(phi, u, sigma, vt, theta_t))
        curv = (f_t - value - slope * theta_t) / theta_t**2
        if curv > 0:
            theta = min(-slope / (2.0 * curv), 1.5 / smax)
        else:
            theta = min(2.0 * theta_t, 1.5 / smax)
        f_new = lag.value(_geodesic(phi, u, sigma, vt, theta))
        if f_t < f_new:
            theta, f_new = theta_t, f_t
        n_back = 0
        while f_new > value and n_back < 40:
            theta *= 0.5
            f_new = lag.value(_geodesic(phi, u, sigma, vt, theta))
            n_back += 1
        if f_new > value:
            # no descent possible at working precision
            break
        phi = orthonormalize(_geodesic(phi, u, sigma, vt, theta))
        step = max(theta, 1e-8)
        g_prev = g
        value, grad, viol = lag.value_and_grad(phi)
    return InnerResult(phi, value, gnorm, it, converged, viol, trace)


# ---------------------------------------------------------------- driver

def initial_orbitals(ops: DressedOperators, n_occ: int, perturbation: float | None = None,
                     seed: int = 0, pick: tuple[int, ...] | None = None) -> np.ndarray:
    """Lowest (or ``pick``-selected) eigenvectors of h', optionally perturbed."""
    _, vecs = np.linalg.eigh(ops.h_one)
    idx = list(range(n_occ)) if pick is None else list(pick)
    phi = vecs[:, idx].copy()
    if perturbation:
        rng = np.random.default_rng(seed)
        phi = phi + perturbation * rng.standard_normal(phi.shape)
    return orthonormalize(phi)


def _finish(ops, model, phi, state, mode, converged, outer, inner, gnorm, trace):
    e_dressed = hf_energy(ops, phi)
    dm = from_orbitals(phi, ops.n_sites, ops.n_photon_basis)
    viol = float(max(np.max(dm.occ_e) - 2.0, 0.0))
    return SCFSolution(
        orbitals=phi, dressed_energy=e_dressed,
        physical_energy=e_dressed - 0.5 * (model.n_electrons - 1) * model.frequency,
        density=dm, converged=converged, outer_iterations=outer, inner_iterations=inner,
        gradient_norm=gnorm, max_violation=viol, mode=mode,
        multipliers=state.multipliers.copy(), penalty=state.penalty, trace=trace,
    )


def solve(model: CavityLatticeModel, mode: str = POLARITONIC, options: SCFOptions | None = None,
          initial: np.ndarray | None = None) -> SCFSolution:
    """Ground state in polaritonic or fermionic HF.

    Several starting points (Aufbau selections among the lowest h'
    eigenvectors) are tried and the lowest final energy is kept; the
    ``restarts`` option caps how many.
    """
    opts = options or SCFOptions()
    if mode not in (POLARITONIC, FERMIONIC):
        raise ValueError(f"unknown mode {mode!r}")
    ops = dressed_operators(model)
    n_occ = model.n_occ
    if initial is not None:
        starts = [np.asarray(initial, dtype=float)]
    else:
        starts = [initial_orbitals(ops, n_occ, opts.perturbation if opts.perturbation is not None
                                   else (1e-3 if mode == POLARITONIC else None), opts.seed, pick)
                  for pick in _start_picks(n_occ, ops.dim, opts.restarts)]
    best = None
    for phi0 in starts:
        sol = _solve_from(model, ops, mode, opts, phi0)
        if best is None or _better(sol, best):
            best = sol
    return best


def _better(a: SCFSolution, b: SCFSolution) -> bool:
    if a.converged != b.converged:
        return a.converged
    return a.dressed_energy < b.dressed_energy - 1e-10


def _start_picks(n_occ: int, dim: int, restarts: int | None):
    import itertools

    pool = min(dim, n_occ + 2)
    picks = [tuple(range(n_occ))]
    for combo in itertools.combinations(range(pool), n_occ):
        if combo != picks[0]:
            picks.append(combo)
    limit = len(picks) if restarts is None else max(1, restarts)
    return picks[:limit]


def _solve_from(model, ops, mode, opts: SCFOptions, phi0) -> SCFSolution:
    trace: list = []
    if mode == FERMIONIC:
        state = ConstraintState.inactive(model.n_sites)
        res = inner_minimize(ops, phi0, state, opts.grad_tol, opts.max_inner)
        for k, (v, gn, vi) in enumerate(res.trace):
            trace.append((k, v, gn, vi, 0.0))
        de = abs(res.trace[-1][0] - res.trace[-2][0]) if len(res.trace) > 1 else 0.0
        converged = max(res.gradient_norm, de) < opts.convergence_tol
        return _finish(ops, model, res.orbitals, state, mode, converged, 1, res.iterations,
                       res.gradient_norm, trace)

    state = ConstraintState(multipliers=np.zeros(model.n_sites), penalty=opts.initial_penalty,
                            inner_tol=opts.inner_tol, constraint_tol=opts.constraint_tol)
    phi = phi0
    e_prev = None
    total_inner = 0
    converged = False
    gnorm = np.inf
    outer = 0
    for outer in range(1, opts.max_outer + 1):
        res = inner_minimize(ops, phi, state, state.inner_tol, opts.max_inner)
        total_inner += res.iterations
        phi = res.orbitals
        occ = np.linalg.eigvalsh(electronic_rdm(phi, ops.n_sites, ops.n_photon_basis))[::-1]
        g = 2.0 - occ
        state.g_values = g
        viol = float(np.max(np.maximum(-g, 0.0)))
        energy = hf_energy(ops, phi)
        gnorm = res.gradient_norm
        trace.append((outer, energy, gnorm, viol, state.penalty))
        de = np.inf if e_prev is None else abs(energy - e_prev)
        e_prev = energy
        final_inner = state.inner_tol <= opts.grad_tol * (1 + 1e-12)
        if (viol < opts.violation_tol and max(gnorm, de) < opts.convergence_tol
                and (final_inner or gnorm < opts.grad_tol) and res.converged):
            converged = True
            break
        if viol <= state.constraint_tol:
            state.multipliers = np.maximum(state.multipliers - state.penalty * g, 0.0)
            state.inner_tol = max(state.inner_tol * opts.inner_tol_factor, opts.grad_tol)
            state.constraint_tol = max(state.constraint_tol / state.penalty**0.9, 0.1 * opts.violation_tol)
        else:
            state.penalty = min(10.0 * state.penalty, opts.max_penalty)
            state.constraint_tol = max(opts.constraint_tol * (opts.initial_penalty / state.penalty)**0.1,
                                       0.1 * opts.violation_tol)
        log.debug("outer %d: E'=%.10f |g|=%.2e viol=%.2e mu=%.1e", outer, energy, gnorm, viol,
                  state.penalty)
    return _finish(ops, model, phi, state, POLARITONIC, converged, outer, total_inner, gnorm, trace)
