"""Polaritonic Hartree-Fock for electrons on a lattice coupled to a cavity mode."""

__version__ = "0.1.0"

from .model import CavityLatticeModel, ModelError, box6, build_model  # noqa: E402
from .scf import SCFOptions, SCFSolution, solve  # noqa: E402

__all__ = ["__version__", "CavityLatticeModel", "ModelError", "box6", "build_model",
           "SCFOptions", "SCFSolution", "solve"]
