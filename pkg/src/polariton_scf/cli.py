"""Command-line driver: single points, parameter scans, a self-check battery
and one-body spectra.

Exit codes: 0 success, 1 configuration error, 2 a solver did not converge
(or a scan point failed, or a validation check failed).
"""
from __future__ import annotations

import argparse
import concurrent.futures as cf
import contextlib
import csv
import hashlib
import io
import json
import logging
import math
import multiprocessing
import os
import sys
import time
from dataclasses import dataclass, field
from pathlib import Path
from typing import Any, Mapping, Sequence

import numpy as np

from . import __version__, fock_oracle, observables, rdm, scf
from .model import ModelError, build_model, matter_one_body

log = logging.getLogger("polariton_scf")

SCHEMA = 1
SOLVERS = ("exact", "phf", "fhf")
_MODES = {"phf": scf.POLARITONIC, "fhf": scf.FERMIONIC}
EXACT_DIM_CAP = 250_000
_RESERVED = {"solvers", "scf", "seed"}
_BLAS_ENV = ("OMP_NUM_THREADS", "OPENBLAS_NUM_THREADS", "MKL_NUM_THREADS")


class ConfigError(ValueError):
    pass


# --------------------------------------------------------------- configs

def load_json(path: str | os.PathLike) -> dict:
    try:
        with open(path, encoding="utf-8") as fh:
            data = json.load(fh)
    except OSError as exc:
        raise ConfigError(f"cannot read config {path}: {exc}") from None
    except json.JSONDecodeError as exc:
        raise ConfigError(f"{path} is not valid JSON: {exc}") from None
    if not isinstance(data, dict):
        raise ConfigError("config must be a JSON object")
    return data


def parse_solvers(value) -> tuple[str, ...]:
    if isinstance(value, str):
        items = [s.strip() for s in value.split(",") if s.strip()]
    else:
        items = list(value or [])
    if not items:
        raise ConfigError("solver set is empty")
    bad = [s for s in items if s not in SOLVERS]
    if bad:
        raise ConfigError(f"unknown solver(s) {bad}; choose from {', '.join(SOLVERS)}")
    # canonical order keeps files independent of how the set was written
    return tuple(s for s in SOLVERS if s in items)


def apply_axis(model_config: Mapping[str, Any], name: str, value) -> dict:
    """Model config with one parameter replaced; ``epsilon`` sets the soft-Coulomb width."""
    cfg = dict(model_config)
    if name == "epsilon":
        cfg["potential"] = {"soft_coulomb": {"epsilon": value}}
    else:
        cfg[name] = value
    return cfg


def check_exact_size(model) -> None:
    dim = fock_oracle.basis_dimension(model.n_sites, model.n_electrons, model.n_photon_basis)
    if dim > EXACT_DIM_CAP:
        raise ConfigError(f"exact solver needs basis dimension {dim} > cap {EXACT_DIM_CAP}")


def scf_options(data: Mapping[str, Any] | None, seed: int | None) -> scf.SCFOptions:
    try:
        opts = scf.SCFOptions.from_mapping(data or {})
    except (TypeError, ValueError) as exc:
        raise ConfigError(str(exc)) from None
    if seed is not None:
        opts.seed = seed
    return opts


def config_hash(payload: Any) -> str:
    blob = json.dumps(payload, sort_keys=True, separators=(",", ":"))
    return hashlib.sha256(blob.encode()).hexdigest()


# ----------------------------------------------------------- single point

def _jsonable(x):
    if isinstance(x, np.ndarray):
        return [_jsonable(v) for v in x.tolist()]
    if isinstance(x, (list, tuple)):
        return [_jsonable(v) for v in x]
    if isinstance(x, dict):
        return {k: _jsonable(v) for k, v in x.items()}
    if isinstance(x, (np.floating, float)):
        return float(x) if math.isfinite(x) else None
    if isinstance(x, np.integer):
        return int(x)
    if isinstance(x, np.bool_):
        return bool(x)
    return x


def solve_exact(model) -> dict:
    check_exact_size(model)
    state = fock_oracle.ground_state(model)
    dm = rdm.from_exact_state(state)
    bare, gauge = observables.photon_number_exact(model, state)
    dec = observables.decompose_exact(model, state)
    return {
        "converged": True,
        "energy": state.energy,
        "energy_dressed": state.energy + observables.physical_offset(model),
        "photon_number_bare": bare,
        "photon_number_gauge": gauge,
        "occ_e": dm.occ_e,
        "occ_p": dm.gamma_p_physical.diagonal(),
        "density": observables.density(dm),
        "energy_decomposition": dec.as_dict(),
        "representability": rdm.representability_report(dm, model.n_electrons),
        "diagnostics": {
            "basis_dimension": state.basis.dim,
            "residual": fock_oracle.residual_norm(model, state),
            "max_violation": float(max(dm.occ_e.max() - 2.0, 0.0)),
        },
        "_gamma_e": dm.gamma_e,
    }


def solve_hf(model, solver: str, opts: scf.SCFOptions) -> dict:
    sol = scf.solve(model, _MODES[solver], opts)
    dm = sol.density
    return {
        "converged": sol.converged,
        "energy": sol.physical_energy,
        "energy_dressed": sol.dressed_energy,
        "photon_number_bare": None,
        "photon_number_gauge": observables.photon_number_dressed(model, sol),
        "occ_e": dm.occ_e,
        "occ_p": dm.occ_p,
        "density": observables.density(dm),
        "energy_decomposition": observables.decompose_dressed(model, sol.orbitals).as_dict(),
        "representability": rdm.representability_report(dm, model.n_electrons),
        "diagnostics": {
            "mode": sol.mode,
            "outer_iterations": sol.outer_iterations,
            "inner_iterations": sol.inner_iterations,
            "gradient_norm": sol.gradient_norm,
            "max_violation": sol.max_violation,
            "penalty": sol.penalty,
            "multipliers": sol.multipliers,
        },
        "_gamma_e": dm.gamma_e,
    }


def evaluate(model_config: Mapping[str, Any], solvers: Sequence[str], options: Mapping[str, Any]) -> dict:
    """Run ``solvers`` on one model; the unit of work for the scan pool.

    Never raises: a failure is returned as ``{"error": message}`` for the
    solver (or the whole point) that failed.
    """
    try:
        model = build_model(model_config)
    except ModelError as exc:
        return {"error": str(exc)}
    opts = scf.SCFOptions.from_mapping(options)
    out = {"model": model.summary(), "solvers": {}}
    for name in solvers:
        try:
            out["solvers"][name] = solve_exact(model) if name == "exact" else solve_hf(model, name, opts)
        except Exception as exc:  # recorded in-row; the scan carries on
            log.exception("solver %s failed", name)
            out["solvers"][name] = {"error": f"{type(exc).__name__}: {exc}", "converged": False}
    return out


def public(result: dict) -> dict:
    """Drop private matrices and make everything JSON-serialisable."""
    clean = {k: v for k, v in result.items() if not k.startswith("_")}
    if "solvers" in clean:
        clean["solvers"] = {n: {k: v for k, v in r.items() if not k.startswith("_")}
                            for n, r in clean["solvers"].items()}
    return _jsonable(clean)


def run_point(config: Mapping[str, Any], solvers: Sequence[str] | None = None, seed: int | None = None) -> tuple[dict, int]:
    """Evaluate one configuration. Returns ``(summary, exit_code)``.

    Raises :class:`ConfigError` or :class:`ModelError` for invalid input.
    """
    cfg = dict(config)
    model_cfg = {k: v for k, v in cfg.items() if k not in _RESERVED}
    solver_set = parse_solvers(solvers if solvers is not None else cfg.get("solvers", SOLVERS))
    if seed is None:
        seed = cfg.get("seed")
    opts = scf_options(cfg.get("scf"), seed)
    model = build_model(model_cfg)
    if "exact" in solver_set:
        check_exact_size(model)
    result = evaluate(model_cfg, solver_set, vars(opts))
    summary = {"version": __version__, "schema": SCHEMA, "seed": opts.seed, **public(result)}
    ok = all(r.get("converged", False) and "error" not in r for r in result["solvers"].values())
    return summary, 0 if ok else 2


# ------------------------------------------------------------------ scans

@dataclass
class ScanSpec:
    """A one-axis parameter scan.

    ``reference`` holds the parameter overrides defining the point each grid
    point is compared against (default zero coupling at the same axis value).
    ``kind`` is ``confinement`` when the axis is ``epsilon``; those scans
    report the electronic 1RDM distance divided by N.
    """

    model: dict
    axis_name: str
    axis_values: list
    solvers: tuple[str, ...]
    reference: dict = field(default_factory=lambda: {"coupling_over_omega": 0.0})
    scf: dict = field(default_factory=dict)
    seed: int = 0

    @property
    def kind(self) -> str:
        return "confinement" if self.axis_name == "epsilon" else "coupling"

    @classmethod
    def from_config(cls, cfg: Mapping[str, Any], solvers=None, seed=None) -> "ScanSpec":
        unknown = set(cfg) - {"model", "axis", "solvers", "reference", "scf", "seed"}
        if unknown:
            raise ConfigError(f"unknown scan key(s) {sorted(unknown)}")
        if "model" not in cfg or "axis" not in cfg:
            raise ConfigError("scan config needs 'model' and 'axis'")
        axis = cfg["axis"]
        if not isinstance(axis, Mapping) or set(axis) != {"name", "values"}:
            raise ConfigError("axis must be {\"name\": ..., \"values\": [...]}")
        values = list(axis["values"])
        if not values:
            raise ConfigError("scan grid is empty")
        solver_set = parse_solvers(solvers if solvers is not None else cfg.get("solvers", SOLVERS))
        spec = cls(
            model=dict(cfg["model"]), axis_name=str(axis["name"]), axis_values=values,
            solvers=solver_set, reference=dict(cfg.get("reference", {"coupling_over_omega": 0.0})),
            scf=dict(cfg.get("scf", {})),
            seed=int(seed if seed is not None else cfg.get("seed", 0)),
        )
        spec.validate()
        return spec

    def point_config(self, value) -> dict:
        return apply_axis(self.model, self.axis_name, value)

    def reference_config(self, value) -> dict:
        cfg = self.point_config(value)
        for name, ref in self.reference.items():
            cfg = apply_axis(cfg, name, ref)
        return cfg

    def options(self) -> dict:
        return vars(scf_options(self.scf, self.seed))

    def validate(self) -> None:
        for value in self.axis_values:
            for cfg in (self.point_config(value), self.reference_config(value)):
                model = build_model(cfg)
                if "exact" in self.solvers:
                    check_exact_size(model)
        self.options()

    def as_dict(self) -> dict:
        return {"model": self.model, "axis": {"name": self.axis_name, "values": self.axis_values},
                "solvers": list(self.solvers), "reference": self.reference, "scf": self.scf,
                "seed": self.seed}


def resolve_workers(cli_value: int | None) -> int:
    if cli_value is not None:
        value = cli_value
    else:
        env = os.environ.get("POLARITON_SCF_WORKERS", "")
        try:
            value = int(env) if env else (os.cpu_count() or 1)
        except ValueError:
            raise ConfigError(f"POLARITON_SCF_WORKERS={env!r} is not an integer") from None
    if value < 1:
        raise ConfigError(f"worker count must be >= 1, got {value}")
    return value


@contextlib.contextmanager
def _single_threaded_blas():
    """Children inherit these; single-threaded BLAS keeps results bitwise stable."""
    saved = {k: os.environ.get(k) for k in _BLAS_ENV}
    os.environ.update({k: "1" for k in _BLAS_ENV})
    try:
        yield
    finally:
        for k, v in saved.items():
            if v is None:
                os.environ.pop(k, None)
            else:
                os.environ[k] = v


def _run_tasks(tasks: list, workers: int) -> list:
    """Evaluate tasks in a process pool; results come back in task order."""
    ctx = multiprocessing.get_context("spawn")
    results: list = [None] * len(tasks)
    with _single_threaded_blas(), cf.ProcessPoolExecutor(max_workers=min(workers, len(tasks)),
                                                         mp_context=ctx) as pool:
        futures = {pool.submit(evaluate, *task): k for k, task in enumerate(tasks)}
        for fut in cf.as_completed(futures):
            results[futures[fut]] = fut.result()
    return results


def _fmt(value) -> str:
    if value is None:
        return "nan"
    if isinstance(value, (bool, np.bool_)):
        return "1" if value else "0"
    if isinstance(value, (int, np.integer)):
        return str(int(value))
    value = float(value)
    return "nan" if not math.isfinite(value) else format(value, ".12e")


def scan_columns(spec: ScanSpec) -> list[str]:
    dgamma = "dgamma_e_per_N" if spec.kind == "confinement" else "dgamma_e"
    cols = ["index", spec.axis_name]
    for s in spec.solvers:
        cols += [f"{s}_E_physical", f"{s}_N_ph_gauge"]
        if s == "exact":
            cols.append(f"{s}_N_ph_bare")
        cols += [f"{s}_{dgamma}", f"{s}_dn_e"]
        if s != "exact" and "exact" in spec.solvers:
            cols.append(f"{s}_dgamma_e_vs_exact")
        cols += [f"{s}_max_violation", f"{s}_converged"]
    cols.append("failed")
    return cols


def _scan_row(spec: ScanSpec, index: int, value, point: dict, ref: dict) -> tuple[dict, bool]:
    dgamma = "dgamma_e_per_N" if spec.kind == "confinement" else "dgamma_e"
    row: dict[str, Any] = {"index": index, spec.axis_name: value}
    failed = "error" in point or "error" in ref
    sols = point.get("solvers", {})
    refs = ref.get("solvers", {})
    n_el = point.get("model", {}).get("n_electrons", 1)
    for s in spec.solvers:
        r, r0 = sols.get(s, {"error": "missing"}), refs.get(s, {"error": "missing"})
        bad = "error" in r
        failed |= bad or "error" in r0 or not r.get("converged", False)
        get = (lambda k: None) if bad else r.get
        row[f"{s}_E_physical"] = get("energy")
        row[f"{s}_N_ph_gauge"] = get("photon_number_gauge")
        if s == "exact":
            row[f"{s}_N_ph_bare"] = get("photon_number_bare")
        if bad or "error" in r0:
            row[f"{s}_{dgamma}"] = row[f"{s}_dn_e"] = None
        else:
            d = rdm.rdm_distance(r["_gamma_e"], r0["_gamma_e"])
            row[f"{s}_{dgamma}"] = d / n_el if spec.kind == "confinement" else d
            row[f"{s}_dn_e"] = rdm.occupation_distance(r["occ_e"], r0["occ_e"])
        if s != "exact" and "exact" in spec.solvers:
            ex = sols.get("exact", {"error": "missing"})
            ok = not bad and "error" not in ex
            row[f"{s}_dgamma_e_vs_exact"] = rdm.rdm_distance(r["_gamma_e"], ex["_gamma_e"]) if ok else None
        row[f"{s}_max_violation"] = None if bad else r["diagnostics"]["max_violation"]
        row[f"{s}_converged"] = bool(r.get("converged", False)) and not bad
    row["failed"] = failed
    return row, failed


def monotonicity_assertions(spec: ScanSpec, rows: list[dict]) -> list[dict]:
    """Soft trend checks for confinement scans: the photon-induced change of
    the electronic 1RDM at the widest well exceeds that at the narrowest."""
    if spec.kind != "confinement" or len(rows) < 2:
        return []
    values = [float(v) for v in spec.axis_values]
    lo, hi = int(np.argmin(values)), int(np.argmax(values))
    out = []
    for s in spec.solvers:
        key = f"{s}_dgamma_e_per_N"
        a, b = rows[lo].get(key), rows[hi].get(key)
        passed = a is not None and b is not None and b > a
        out.append({"name": f"{s}_dgamma_e_increases_with_epsilon", "passed": bool(passed),
                    "epsilon_low": values[lo], "epsilon_high": values[hi],
                    "value_low": a, "value_high": b})
    return out


def run_scan(spec: ScanSpec, out_dir: str | os.PathLike, workers: int = 1) -> tuple[dict, int]:
    """Run a scan and write ``scan.csv``, ``manifest.json`` and one JSON per point."""
    out = Path(out_dir)
    options = spec.options()
    tasks, keys = [], {}

    def task_for(cfg) -> int:
        key = config_hash(cfg)
        if key not in keys:
            keys[key] = len(tasks)
            tasks.append((cfg, spec.solvers, options))
        return keys[key]

    pairs = [(task_for(spec.point_config(v)), task_for(spec.reference_config(v))) for v in spec.axis_values]
    start = time.perf_counter()
    results = _run_tasks(tasks, workers)
    elapsed = time.perf_counter() - start

    columns = scan_columns(spec)
    rows, any_failed = [], False
    for k, (value, (ip, ir)) in enumerate(zip(spec.axis_values, pairs)):
        row, failed = _scan_row(spec, k, value, results[ip], results[ir])
        rows.append(row)
        any_failed |= failed

    (out / "points").mkdir(parents=True, exist_ok=True)
    buf = io.StringIO()
    buf.write(f"# polariton-scf v{__version__}, schema {SCHEMA}\n")
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(columns)
    for row in rows:
        writer.writerow([_fmt(row[c]) if c != spec.axis_name else repr(row[c]) for c in columns])
    (out / "scan.csv").write_text(buf.getvalue(), encoding="utf-8")

    point_files = []
    for k, (value, (ip, _)) in enumerate(zip(spec.axis_values, pairs)):
        name = f"points/point_{k:03d}.json"
        payload = {"version": __version__, "schema": SCHEMA, "index": k, spec.axis_name: value,
                   **public(results[ip])}
        (out / name).write_text(json.dumps(payload, indent=2, sort_keys=True) + "\n", encoding="utf-8")
        point_files.append({"index": k, spec.axis_name: value, "file": name, "failed": rows[k]["failed"]})

    manifest = {
        "version": __version__,
        "schema": SCHEMA,
        "kind": spec.kind,
        "config": spec.as_dict(),
        "config_hash": config_hash(spec.as_dict()),
        "columns": columns,
        "csv": "scan.csv",
        "points": point_files,
        "assertions": monotonicity_assertions(spec, rows),
        "workers": workers,
        "elapsed_seconds": round(elapsed, 3),
    }
    (out / "manifest.json").write_text(json.dumps(_jsonable(manifest), indent=2) + "\n", encoding="utf-8")
    return manifest, 2 if any_failed else 0


# --------------------------------------------------------------- spectrum

DEFAULT_SPECTRUM = {"n_sites": 30, "spacing": 1.0, "n_electrons": 2,
                    "epsilon": [0.5, 1.0, 1.5, 2.0, 2.5, 3.0], "n_levels": 4}


def spectrum_rows(cfg: Mapping[str, Any]) -> list[list[float]]:
    """Lowest one-body levels of the soft-Coulomb box for each epsilon."""
    unknown = set(cfg) - set(DEFAULT_SPECTRUM) - {"hopping"}
    if unknown:
        raise ConfigError(f"unknown spectrum key(s) {sorted(unknown)}")
    c = {**DEFAULT_SPECTRUM, **cfg}
    n_levels = int(c["n_levels"])
    if not 1 <= n_levels <= int(c["n_sites"]):
        raise ConfigError("n_levels must lie between 1 and n_sites")
    rows = []
    for eps in c["epsilon"]:
        model_cfg = {"n_sites": c["n_sites"], "spacing": c["spacing"], "n_electrons": c["n_electrons"],
                     "omega": 1.0, "n_photon_basis": 1,
                     "potential": {"soft_coulomb": {"epsilon": eps}}}
        if "hopping" in c:
            model_cfg["hopping"] = c["hopping"]
        levels = np.linalg.eigvalsh(matter_one_body(build_model(model_cfg)))[:n_levels]
        rows.append([float(eps), *map(float, levels)])
    return rows


# ------------------------------------------------------------- validation

def validation_checks() -> list[tuple[str, bool, str]]:
    """Oracle and transform battery: ``(name, passed, detail)`` per check."""
    from . import kernels
    from ._kernels_py import single_excitations as py_single
    from .model import box6

    checks = []
    m = box6(0.0, 0.4)
    ref = fock_oracle.exact_uncoupled_energy(m)
    ex = fock_oracle.ground_state(m).energy
    ph = scf.solve(m, scf.POLARITONIC).physical_energy
    err = max(abs(ex - ref), abs(ph - ref))
    checks.append(("uncoupled_exactness", err < 1e-6, f"max error {err:.2e}"))

    m = box6(0.0, 0.2)
    f = scf.solve(m, scf.FERMIONIC)
    occ_max = float(f.density.occ_e.max())
    checks.append(("pauli_violation_detected", occ_max > 2.0 + 1e-6 and
                   not rdm.representability_report(f.density, 4)["passed"], f"fHF max n_e {occ_max:.4f}"))

    m = build_model({"n_sites": 4, "omega": 0.4, "n_photon_basis": 6, "n_electrons": 2,
                     "coupling_over_omega": 0.4})
    st = fock_oracle.ground_state(m)
    t = fock_oracle.dress_two_particle(st)
    e, res = fock_oracle.dressed_eigen_check(m, t)
    de = abs(e - st.energy - m.frequency / 2)
    checks.append(("dressing_transform", de < 1e-8 and res < 1e-8, f"dE {de:.1e}, residual {res:.1e}"))

    rng = np.random.default_rng(7)
    m = build_model({"n_sites": 3, "omega": 0.5, "n_photon_basis": 2, "n_electrons": 2, "coupling": 0.7})
    ops = scf.dressed_operators(m)
    phi = scf.orthonormalize(rng.standard_normal((ops.dim, 1)))
    d = rng.standard_normal(phi.shape)
    h = 1e-5
    fd = (scf.hf_energy(ops, phi + h * d) - scf.hf_energy(ops, phi - h * d)) / (2 * h)
    an = 2.0 * float(np.sum(d * scf.fock_apply(ops, phi, phi)))
    rel = abs(fd - an) / max(abs(an), 1e-12)
    checks.append(("fock_gradient", rel < 1e-6, f"relative error {rel:.1e}"))

    basis = fock_oracle.make_basis(box6())
    p, q = [0, 2, 5, 11], [2, 0, 7, 1]
    a = kernels.single_excitations(basis.dets, p, q)
    b = py_single(basis.dets, p, q)
    same = all(np.array_equal(x, y) for x, y in zip(a, b))
    checks.append(("kernel_backends_agree", same, f"backend {kernels.BACKEND}"))
    return checks


# -------------------------------------------------------------------- CLI

def _build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--config", metavar="PATH", help="JSON configuration file")
    common.add_argument("--out", metavar="DIR", default="out", help="output directory (default: out)")
    common.add_argument("--solvers", help="comma-separated subset of exact,phf,fhf")
    common.add_argument("--workers", type=int, metavar="K",
                        help="worker processes (default: $POLARITON_SCF_WORKERS or CPU count)")
    common.add_argument("--seed", type=int, metavar="S", help="seed for start perturbations")
    common.add_argument("-v", "--verbose", action="store_true")

    parser = argparse.ArgumentParser(prog="polariton-scf", description=__doc__.splitlines()[0])
    parser.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    sub = parser.add_subparsers(dest="command", required=True)
    sub.add_parser("run", parents=[common], help="solve a single parameter point")
    sub.add_parser("scan", parents=[common], help="run a one-axis parameter scan")
    sub.add_parser("validate", parents=[common], help="run the built-in self-check battery")
    sub.add_parser("spectrum", parents=[common], help="one-body levels versus well width")
    return parser


def _cmd_run(args) -> int:
    if not args.config:
        raise ConfigError("run needs --config")
    summary, code = run_point(load_json(args.config), args.solvers, args.seed)
    out = Path(args.out)
    out.mkdir(parents=True, exist_ok=True)
    (out / "summary.json").write_text(json.dumps(summary, indent=2, sort_keys=True) + "\n", encoding="utf-8")
    for name, r in summary["solvers"].items():
        if "error" in r:
            print(f"{name:6s} ERROR {r['error']}")
        else:
            print(f"{name:6s} E = {r['energy']:+.10f}  N_ph = {r['photon_number_gauge']:.6f}  "
                  f"converged = {r['converged']}  representable = {r['representability']['passed']}")
    if code:
        print("error: at least one solver did not converge", file=sys.stderr)
    return code


def _cmd_scan(args) -> int:
    if not args.config:
        raise ConfigError("scan needs --config")
    spec = ScanSpec.from_config(load_json(args.config), args.solvers, args.seed)
    manifest, code = run_scan(spec, args.out, resolve_workers(args.workers))
    print(f"wrote {Path(args.out) / 'scan.csv'} ({len(manifest['points'])} points, "
          f"{manifest['elapsed_seconds']:.1f} s)")
    for a in manifest["assertions"]:
        print(f"assertion {a['name']}: {'pass' if a['passed'] else 'FAIL'}")
    if code:
        print("error: at least one scan point failed", file=sys.stderr)
    return code


def _cmd_validate(args) -> int:
    checks = validation_checks()
    for name, passed, detail in checks:
        print(f"{'PASS' if passed else 'FAIL'} {name}: {detail}")
    if args.config or args.out != "out":
        out = Path(args.out)
        out.mkdir(parents=True, exist_ok=True)
        report = [{"name": n, "passed": p, "detail": d} for n, p, d in checks]
        (out / "validate.json").write_text(json.dumps(report, indent=2) + "\n", encoding="utf-8")
    return 0 if all(p for _, p, _ in checks) else 2


def _cmd_spectrum(args) -> int:
    cfg = load_json(args.config) if args.config else {}
    rows = spectrum_rows(cfg)
    n_levels = len(rows[0]) - 1
    out = Path(args.out)
    out.mkdir(parents=True, exist_ok=True)
    buf = io.StringIO()
    buf.write(f"# polariton-scf v{__version__}, schema {SCHEMA}\n")
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(["epsilon", *[f"e{k + 1}" for k in range(n_levels)]])
    for row in rows:
        writer.writerow([repr(row[0]), *[_fmt(v) for v in row[1:]]])
    (out / "spectrum.csv").write_text(buf.getvalue(), encoding="utf-8")
    sys.stdout.write(buf.getvalue())
    return 0


_COMMANDS = {"run": _cmd_run, "scan": _cmd_scan, "validate": _cmd_validate, "spectrum": _cmd_spectrum}


def main(argv: Sequence[str] | None = None) -> int:
    args = _build_parser().parse_args(argv)
    logging.basicConfig(level=logging.DEBUG if args.verbose else logging.WARNING,
                        format="%(levelname)s %(name)s: %(message)s")
    try:
        return _COMMANDS[args.command](args)
    except (ConfigError, ModelError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
