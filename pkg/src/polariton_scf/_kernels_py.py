"""Pure-Python determinant kernels (reference and fallback for ``_kernels``)."""
import numpy as np


def _popcount(x):
    return bin(x).count("1")


def single_excitations(dets, p_list, q_list):
    """Enumerate all nonzero ``c_p^dagger c_q`` actions on a determinant basis.

    ``dets`` is a sorted int64 array of occupation bit masks. For every basis
    determinant and every (p, q) pair with q occupied and p empty (or p == q
    occupied) one entry is returned.

    Returns ``(src, dst, pair, sign)`` arrays: ``c_p^dagger c_q |src> =
    sign |dst>`` for ``(p, q) = (p_list[pair], q_list[pair])``.
    """
    dets = np.asarray(dets, dtype=np.int64)
    index = {int(d): k for k, d in enumerate(dets)}
    src, dst, pair, sign = [], [], [], []
    pairs = list(zip((int(p) for p in p_list), (int(q) for q in q_list)))
    for k, d in enumerate(dets.tolist()):
        for m, (p, q) in enumerate(pairs):
            if not (d >> q) & 1:
                continue
            if p == q:
                src.append(k)
                dst.append(k)
                pair.append(m)
                sign.append(1)
                continue
            if (d >> p) & 1:
                continue
            lo, hi = (p, q) if p < q else (q, p)
            between = d & (((1 << hi) - 1) ^ ((1 << (lo + 1)) - 1))
            new = d ^ (1 << q) ^ (1 << p)
            src.append(k)
            dst.append(index[new])
            pair.append(m)
            sign.append(-1 if _popcount(between) & 1 else 1)
    return (np.array(src, dtype=np.int64), np.array(dst, dtype=np.int64),
            np.array(pair, dtype=np.int64), np.array(sign, dtype=np.int64))


def occupation_matrix(dets, n_orbitals):
    """``occ[k, p]`` = occupation (0/1) of spin orbital p in determinant k."""
    dets = np.asarray(dets, dtype=np.int64)
    out = np.zeros((dets.size, n_orbitals), dtype=np.int8)
    for k, d in enumerate(dets.tolist()):
        for p in range(n_orbitals):
            out[k, p] = (d >> p) & 1
    return out
