"""Kernel backend selection.

The compiled extension is used when it imports; otherwise the pure-Python
implementation. Setting ``POLARITON_SCF_PURE_PYTHON=1`` forces the fallback.
"""
import os

if os.environ.get("POLARITON_SCF_PURE_PYTHON", "") not in ("", "0"):
    from ._kernels_py import occupation_matrix, single_excitations
    BACKEND = "python"
else:
    try:
        from ._kernels import occupation_matrix, single_excitations
        BACKEND = "cython"
    except ImportError:
        from ._kernels_py import occupation_matrix, single_excitations
        BACKEND = "python"

__all__ = ["BACKEND", "occupation_matrix", "single_excitations"]
