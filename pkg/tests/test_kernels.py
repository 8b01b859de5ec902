import itertools

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from polariton_scf import _kernels_py, kernels


def test_backend_name():
    assert kernels.BACKEND in ("cython", "python")


def test_single_excitation_sign_by_hand():
    # determinant {0, 1, 3}; moving 3 -> 2 passes no occupied orbital in between
    dets = np.array([0b1011, 0b0111], dtype=np.int64)
    src, dst, pair, sign = _kernels_py.single_excitations(dets, [2], [3])
    assert src.tolist() == [0] and dst.tolist() == [1] and sign.tolist() == [1]
    # {0, 2} with 0 -> 3 passes orbital 2 once
    dets = np.array([0b0101, 0b1100], dtype=np.int64)
    _, _, _, sign = _kernels_py.single_excitations(dets, [3], [0])
    assert sign.tolist() == [-1]


def full_basis(n_so, n_el):
    return np.array(sorted(sum(1 << p for p in c) for c in itertools.combinations(range(n_so), n_el)),
                    dtype=np.int64)


@pytest.mark.skipif(kernels.BACKEND != "cython", reason="compiled extension not built")
@settings(max_examples=40, deadline=None)
@given(seed=st.integers(0, 10**6), n_so=st.integers(2, 12), n_el=st.integers(1, 4))
def test_compiled_kernels_match_python(seed, n_so, n_el):
    from polariton_scf import _kernels

    dets = full_basis(n_so, min(n_el, n_so))
    r = np.random.default_rng(seed)
    p = r.integers(0, n_so, 12).tolist()
    q = r.integers(0, n_so, 12).tolist()
    for a, b in zip(_kernels.single_excitations(dets, p, q), _kernels_py.single_excitations(dets, p, q)):
        assert np.array_equal(a, b)
    assert np.array_equal(_kernels.occupation_matrix(dets, n_so), _kernels_py.occupation_matrix(dets, n_so))


def test_high_orbital_indices():
    dets = np.array([(1 << 60) | 1, (1 << 61) | 1], dtype=np.int64)
    src, dst, _, sign = kernels.single_excitations(dets, [61], [60])
    assert src.tolist() == [0] and dst.tolist() == [1] and sign.tolist() == [1]


def test_forced_python_backend_gives_same_energy():
    import os
    import subprocess
    import sys

    code = ("from polariton_scf import kernels, fock_oracle, model;"
            "print(kernels.BACKEND, repr(fock_oracle.ground_state(model.box6(0.3)).energy))")
    env = {**os.environ, "POLARITON_SCF_PURE_PYTHON": "1"}
    out = subprocess.run([sys.executable, "-c", code], env=env, capture_output=True, text=True, check=True)
    backend, energy = out.stdout.split()
    from polariton_scf import fock_oracle
    from polariton_scf.model import box6

    assert backend == "python"
    assert float(energy) == pytest.approx(fock_oracle.ground_state(box6(0.3)).energy, abs=1e-12)
