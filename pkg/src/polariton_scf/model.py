"""Lattice model of N electrons coupled to one cavity mode, and its dressed
single-polariton operators.

The composite (polariton) index is ``(i, alpha) -> i * n_photon_basis + alpha``
with ``i`` the lattice site and ``alpha`` the Fock index of the auxiliary
photon coordinate.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Any, Mapping

import numpy as np


class ModelError(ValueError):
    """Invalid model configuration.

    ``code`` is a stable identifier naming the failed check, ``field`` the
    offending configuration key.
    """

    def __init__(self, code: str, field: str, message: str):
        super().__init__(f"{code} ({field}): {message}")
        self.code = code
        self.field = field


@dataclass(frozen=True)
class CavityLatticeModel:
    n_sites: int
    potential: np.ndarray
    coupling: float
    frequency: float
    n_photon_basis: int
    n_electrons: int
    spacing: float = 1.0
    hopping: float = 0.5
    n_modes: int = 1
    positions: np.ndarray = field(init=False, repr=False, compare=False)

    def __post_init__(self):
        pot = np.array(self.potential, dtype=float)
        pot.setflags(write=False)
        object.__setattr__(self, "potential", pot)
        # centred once; symmetric construction keeps sum(x) == 0 exactly
        i = np.arange(self.n_sites, dtype=float)
        x = (i - (self.n_sites - 1) / 2.0) * self.spacing
        x = 0.5 * (x - x[::-1])
        x.setflags(write=False)
        object.__setattr__(self, "positions", x)

    @property
    def g_over_omega(self) -> float:
        return self.coupling / math.sqrt(2.0 * self.frequency)

    @property
    def dim(self) -> int:
        return self.n_sites * self.n_photon_basis

    @property
    def n_occ(self) -> int:
        return self.n_electrons // 2

    def replace(self, **changes) -> "CavityLatticeModel":
        kw = dict(
            n_sites=self.n_sites, potential=self.potential, coupling=self.coupling,
            frequency=self.frequency, n_photon_basis=self.n_photon_basis,
            n_electrons=self.n_electrons, spacing=self.spacing, hopping=self.hopping,
        )
        kw.update(changes)
        return CavityLatticeModel(**kw)

    def summary(self) -> dict:
        return {
            "n_sites": self.n_sites,
            "spacing": self.spacing,
            "hopping": self.hopping,
            "omega": self.frequency,
            "coupling": self.coupling,
            "coupling_over_omega": self.g_over_omega,
            "n_photon_basis": self.n_photon_basis,
            "n_electrons": self.n_electrons,
            "potential": [float(v) for v in self.potential],
        }


def coupling_from_g_over_omega(g_over_omega: float, omega: float) -> float:
    """Bare coupling lambda for a given dimensionless g/omega."""
    return g_over_omega * math.sqrt(2.0 * omega)


def lattice_positions(n_sites: int, spacing: float = 1.0) -> np.ndarray:
    i = np.arange(n_sites, dtype=float)
    x = (i - (n_sites - 1) / 2.0) * spacing
    return 0.5 * (x - x[::-1])


def soft_coulomb_potential(n_electrons: int, epsilon: float, positions) -> np.ndarray:
    """Attractive soft-Coulomb well ``-N / sqrt(x**2 + epsilon**2)``."""
    if not epsilon > 0:
        raise ModelError("NONPOSITIVE_EPSILON", "epsilon", f"epsilon must be > 0, got {epsilon}")
    x = np.asarray(positions, dtype=float)
    return -float(n_electrons) / np.sqrt(x * x + epsilon * epsilon)


_KNOWN_KEYS = {
    "n_sites", "spacing", "hopping", "potential", "coupling_over_omega", "coupling",
    "omega", "n_photon_basis", "n_electrons", "n_modes",
}


def build_model(config: Mapping[str, Any], *, allow_odd: bool = False) -> CavityLatticeModel:
    """Validate a flat configuration mapping and build the model.

    ``allow_odd`` bypasses the spin-restriction gate; it exists only for the
    single-electron validation mode.
    """
    unknown = set(config) - _KNOWN_KEYS
    if unknown:
        name = sorted(unknown)[0]
        raise ModelError("UNKNOWN_KEY", name, f"unknown configuration key {name!r}")
    for key in ("n_sites", "omega", "n_photon_basis", "n_electrons"):
        if key not in config:
            raise ModelError("MISSING_KEY", key, "required key missing")

    n_sites = _as_int(config, "n_sites")
    n_ph = _as_int(config, "n_photon_basis")
    n_el = _as_int(config, "n_electrons")
    omega = float(config["omega"])
    spacing = float(config.get("spacing", 1.0))
    n_modes = _as_int(config, "n_modes") if "n_modes" in config else 1

    if n_sites < 2:
        raise ModelError("TOO_FEW_SITES", "n_sites", f"need n_sites >= 2, got {n_sites}")
    if not spacing > 0:
        raise ModelError("NONPOSITIVE_SPACING", "spacing", f"spacing must be > 0, got {spacing}")
    if n_ph < 1:
        raise ModelError("PHOTON_BASIS_TOO_SMALL", "n_photon_basis", f"need n_photon_basis >= 1, got {n_ph}")
    if not omega > 0:
        raise ModelError("NONPOSITIVE_FREQUENCY", "omega", f"omega must be > 0, got {omega}")
    if n_modes != 1:
        raise ModelError("UNSUPPORTED_MODES", "n_modes", "only a single photon mode is supported")
    if n_el < 1:
        raise ModelError("NONPOSITIVE_ELECTRON_COUNT", "n_electrons", f"got {n_el}")
    if n_el % 2 and not allow_odd:
        raise ModelError("ODD_ELECTRON_COUNT", "n_electrons",
                         f"spin-restricted treatment needs even N, got {n_el}")
    if (n_el + 1) // 2 > n_sites:
        raise ModelError("TOO_MANY_ELECTRONS", "n_electrons",
                         f"N/2 = {n_el // 2} exceeds n_sites = {n_sites}")

    if "coupling" in config and "coupling_over_omega" in config:
        raise ModelError("AMBIGUOUS_COUPLING", "coupling",
                         "give either coupling or coupling_over_omega, not both")
    if "coupling" in config:
        lam = float(config["coupling"])
    else:
        lam = coupling_from_g_over_omega(float(config.get("coupling_over_omega", 0.0)), omega)
    if lam < 0:
        raise ModelError("NEGATIVE_COUPLING", "coupling_over_omega", f"coupling must be >= 0, got {lam}")

    hopping = float(config["hopping"]) if "hopping" in config else 1.0 / (2.0 * spacing**2)
    x = lattice_positions(n_sites, spacing)
    potential = _parse_potential(config.get("potential", "zero"), n_sites, n_el, x)

    return CavityLatticeModel(
        n_sites=n_sites, potential=potential, coupling=lam, frequency=omega,
        n_photon_basis=n_ph, n_electrons=n_el, spacing=spacing, hopping=hopping,
    )


def _as_int(config, key) -> int:
    value = config[key]
    if isinstance(value, bool) or int(value) != value:
        raise ModelError("NOT_AN_INTEGER", key, f"expected an integer, got {value!r}")
    return int(value)


def _parse_potential(spec, n_sites, n_el, x) -> np.ndarray:
    if isinstance(spec, str):
        if spec == "zero":
            return np.zeros(n_sites)
        raise ModelError("BAD_POTENTIAL", "potential", f"unknown potential {spec!r}")
    if isinstance(spec, Mapping):
        if set(spec) != {"soft_coulomb"}:
            raise ModelError("BAD_POTENTIAL", "potential", f"unsupported potential spec {dict(spec)!r}")
        params = spec["soft_coulomb"]
        try:
            eps = float(params["epsilon"])
        except (KeyError, TypeError):
            raise ModelError("BAD_POTENTIAL", "potential", "soft_coulomb needs an epsilon") from None
        return soft_coulomb_potential(n_el, eps, x)
    v = np.asarray(spec, dtype=float)
    if v.shape != (n_sites,):
        raise ModelError("BAD_POTENTIAL", "potential",
                         f"explicit potential must have {n_sites} entries, got shape {v.shape}")
    if not np.all(np.isfinite(v)):
        raise ModelError("BAD_POTENTIAL", "potential", "non-finite potential values")
    return v


def matter_one_body(model: CavityLatticeModel) -> np.ndarray:
    """Open-chain tight-binding matrix: ``-t`` off-diagonal, ``v_i`` diagonal."""
    n = model.n_sites
    h = np.diag(np.asarray(model.potential, dtype=float))
    off = np.full(n - 1, -model.hopping)
    h += np.diag(off, 1) + np.diag(off, -1)
    return h


def photon_ladder(n_photon_basis: int) -> np.ndarray:
    """Matrix of ``a + a^dagger`` in the truncated Fock basis."""
    s = np.sqrt(np.arange(1, n_photon_basis, dtype=float))
    return np.diag(s, 1) + np.diag(s, -1)


def dressed_one_body_terms(model: CavityLatticeModel, n_particles: int | None = None) -> dict:
    """The pieces of h' by physical origin; they sum to :func:`dressed_one_body`."""
    n = model.n_electrons if n_particles is None else n_particles
    lam, om = model.coupling, model.frequency
    x = model.positions
    nph = model.n_photon_basis
    eye_m, eye_p = np.eye(model.n_sites), np.eye(nph)
    hop = matter_one_body(model) - np.diag(model.potential)
    return {
        "kinetic": np.kron(hop, eye_p),
        "potential": np.kron(np.diag(model.potential), eye_p),
        "dipole_self": np.kron(np.diag(0.5 * lam**2 * x**2), eye_p),
        "bilinear": -lam * math.sqrt(om / (2.0 * n)) * np.kron(np.diag(x), photon_ladder(nph)),
        "photon": np.kron(eye_m, np.diag(om * (np.arange(nph) + 0.5))),
    }


def dressed_one_body(model: CavityLatticeModel, n_particles: int | None = None) -> np.ndarray:
    """Dressed one-body matrix h' on the composite site x Fock space.

    ``n_particles`` overrides the electron count entering the bilinear
    prefactor ``lambda * sqrt(omega / (2 N))``.
    """
    terms = dressed_one_body_terms(model, n_particles)
    h = terms["kinetic"] + terms["potential"] + terms["dipole_self"] + terms["photon"]
    if model.coupling != 0.0:
        h = h + terms["bilinear"]
    return h


@dataclass(frozen=True)
class DressedOperators:
    """Single-polariton operators: h', dipole X (diagonal) and displacement Q.

    The two-body kernel is ``w' = lam**2 X(x)X - c (Q(x)X + X(x)Q)`` and is
    only ever applied in this separable form.
    """

    h_one: np.ndarray
    x_diag: np.ndarray
    q_op: np.ndarray
    coupling: float
    coupling_const: float
    frequency: float
    n_sites: int
    n_photon_basis: int
    n_electrons: int

    @property
    def dim(self) -> int:
        return self.h_one.shape[0]

    @property
    def x_op(self) -> np.ndarray:
        return np.diag(self.x_diag)

    @property
    def photon_diag(self) -> np.ndarray:
        """Diagonal of ``1 (x) omega (alpha + 1/2)``."""
        return np.tile(self.frequency * (np.arange(self.n_photon_basis) + 0.5), self.n_sites)


def polariton_operators(model: CavityLatticeModel) -> tuple[np.ndarray, np.ndarray]:
    """Dipole operator X and displacement operator Q on the composite space."""
    nph = model.n_photon_basis
    x_op = np.kron(np.diag(model.positions), np.eye(nph))
    q_op = np.kron(np.eye(model.n_sites), photon_ladder(nph) / math.sqrt(2.0 * model.frequency))
    return x_op, q_op


def dressed_operators(model: CavityLatticeModel) -> DressedOperators:
    _, q_op = polariton_operators(model)
    x_diag = np.repeat(model.positions, model.n_photon_basis)
    n = model.n_electrons
    return DressedOperators(
        h_one=dressed_one_body(model),
        x_diag=x_diag,
        q_op=q_op,
        coupling=model.coupling,
        coupling_const=model.coupling * model.frequency / math.sqrt(n),
        frequency=model.frequency,
        n_sites=model.n_sites,
        n_photon_basis=model.n_photon_basis,
        n_electrons=n,
    )


def box6(g_over_omega: float = 0.0, omega: float = 0.4, n_photon_basis: int = 5) -> CavityLatticeModel:
    """Six-site empty box with four electrons used throughout the coupling scans."""
    return build_model({
        "n_sites": 6, "hopping": 0.5, "potential": "zero", "omega": omega,
        "n_photon_basis": n_photon_basis, "n_electrons": 4,
        "coupling_over_omega": g_over_omega,
    })
