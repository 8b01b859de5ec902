import math

import numpy as np
import pytest

from polariton_scf.model import photon_ladder

ACCEPTANCE_LINES: list[str] = []


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for line in ACCEPTANCE_LINES:
            terminalreporter.write_line(line)


@pytest.fixture
def rng():
    return np.random.default_rng(12345)


def jordan_wigner(n_so: int):
    """Annihilators ``c_p`` on ``2**n_so`` states; bit p of the index is mode p."""
    a = np.array([[0.0, 1.0], [0.0, 0.0]])  # |1> -> |0>
    z = np.diag([1.0, -1.0])
    eye = np.eye(2)
    ops = []
    for p in range(n_so):
        # kron ordering puts the highest mode first so that index bit p is mode p
        factors = [eye] * n_so
        for q in range(p):
            factors[q] = z
        factors[p] = a
        m = np.array([[1.0]])
        for f in reversed(factors):
            m = np.kron(m, f)
        ops.append(m)
    return ops


def brute_force_hamiltonian(model):
    """Physical Hamiltonian built from explicit fermion and boson matrices,
    restricted to N-electron determinants ordered by bit mask."""
    nm, nph = model.n_sites, model.n_photon_basis
    n_so = 2 * nm
    c = jordan_wigner(n_so)
    dim_f = 2**n_so
    h_f = np.zeros((dim_f, dim_f))
    dip = np.zeros((dim_f, dim_f))
    for i in range(nm):
        for s in (0, 1):
            p = 2 * i + s
            n_p = c[p].T @ c[p]
            h_f += model.potential[i] * n_p
            dip += model.positions[i] * n_p
            if i + 1 < nm:
                q = 2 * (i + 1) + s
                h_f -= model.hopping * (c[p].T @ c[q] + c[q].T @ c[p])
    lam, om = model.coupling, model.frequency
    a_plus = photon_ladder(nph)
    num = np.diag(np.arange(nph, dtype=float))
    e_ph = np.eye(nph)
    h = (np.kron(h_f + 0.5 * lam**2 * dip @ dip, e_ph)
         - lam * math.sqrt(om / 2.0) * np.kron(dip, a_plus)
         + om * np.kron(np.eye(dim_f), num + 0.5 * e_ph))
    masks = sorted(m for m in range(dim_f) if bin(m).count("1") == model.n_electrons)
    idx = np.array([m * nph + al for m in masks for al in range(nph)])
    return h[np.ix_(idx, idx)], masks, c
