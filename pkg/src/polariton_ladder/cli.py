"""Command-line driver for reproducible parameter scans.

Every subcommand writes plot-ready CSV files (one header row, 17
significant digits) together with a JSON manifest that echoes every
resolved parameter, so any output can be regenerated from its manifest
alone.  Defaults follow flat ``key = value`` config files, overridden by
explicit command-line flags.

Exit codes: 0 success, 2 configuration error, 3 solver non-convergence,
4 capacity/overflow.
"""

from __future__ import annotations

import argparse
import json
import math
import os
import sys
import tempfile
from concurrent.futures import ThreadPoolExecutor

import numpy as np

from . import __version__
from .analytic import (
    blueshift_per_particle,
    bogoliubov_energy,
    tg_energy_discrete,
)
from .basis import sector_dimension, single_species_basis
from .errors import (
    CapacityError,
    ConfigError,
    ConvergenceError,
    DimensionLimitError,
    LadderError,
)
from .exact import (
    dense_spectrum,
    g2,
    lanczos_ground_state,
    photonic_fraction,
    von_neumann_entropy,
)
from .model import (
    ModelParams,
    born_oppenheimer_upol,
    build_ladder_hamiltonian,
    build_polariton_hamiltonian,
    build_tavis_cummings_block,
    sector_basis,
)
from .mps import (
    dmrg_ground_state,
    dmrg_params_hash,
    load_checkpoint,
    mps_measure_g2,
    mps_photonic_fraction,
    save_checkpoint,
)
from .spectra import equal_time_structure, response_chi, structure_factor

_COMMON_DEFAULTS = {
    "L": 8,
    "N": 3,
    "J": 0.1,
    "U": 1.0,
    "Omega": 1.0,
    "omega_X": 0.0,
    "ell": 1.0,
    "cap_photon": None,
    "cap_exciton": None,
    "seed": 0,
    "threads": 1,
    "out_dir": "runs",
    "tol": 1e-9,
    "chi_max": 64,
    "sweeps": 8,
    "cutoff": 1e-10,
    "gamma": 0.04,
    "T": 500.0,
    "dt": 0.1,
    "dense_limit": 4096,
    "ed_max_dim": 1_500_000,
    "checkpoint_dir": None,
    "j0": None,
}

_SUBCOMMAND_DEFAULTS = {
    "blueshift-scan": {"boundary": "periodic", "methods": "ed,tg", "J_values": None, "rho_values": None},
    "g2": {"boundary": "open", "method": "ed"},
    "sqw": {
        "boundary": "periodic",
        "method": "lehmann",
        "channel": "photon",
        "omega_min": -0.5,
        "omega_max": 3.5,
        "omega_step": None,
    },
    "chi": {"boundary": "periodic", "part": "full", "omega_min": -2.5, "omega_max": 2.5, "omega_step": None},
    "finite-size": {"boundary": "open", "rho": 0.25, "L_values": "8,12,16,20", "method": "auto"},
    "photonic-fraction": {"boundary": "open", "J_values": "1,10,100,1000", "method": "ed"},
    "entropy": {"boundary": "open", "J_values": "0.01,0.1,1,10,100,1000"},
    "upol": {},
}


def _parse_scalar(text: str):
    """Parse a config value: int, float (inf allowed), None, or string."""
    s = text.strip()
    if s.lower() in ("none", ""):
        return None
    for cast in (int, float):
        try:
            return cast(s)
        except ValueError:
            continue
    return s


def read_config_file(path: str) -> dict:
    """Flat ``key = value`` config; '#' starts a comment; keys use underscores."""
    values = {}
    with open(path, "r", encoding="utf-8") as fh:
        for lineno, raw in enumerate(fh, 1):
            line = raw.split("#", 1)[0].strip()
            if not line:
                continue
            if "=" not in line:
                raise ConfigError(f"{path}:{lineno}: expected 'key = value'")
            key, _, value = line.partition("=")
            values[key.strip().replace("-", "_")] = _parse_scalar(value)
    return values


def _float_list(text: str, what: str) -> list[float]:
    try:
        return [float(tok) for tok in str(text).split(",") if tok.strip()]
    except ValueError as exc:
        raise ConfigError(f"cannot parse {what} list from {text!r}") from exc


def _int_list(text: str, what: str) -> list[int]:
    try:
        return [int(tok) for tok in str(text).split(",") if tok.strip()]
    except ValueError as exc:
        raise ConfigError(f"cannot parse {what} list from {text!r}") from exc


def _jsonable(value):
    if isinstance(value, float) and math.isinf(value):
        return "inf"
    return value


def _write_text_atomic(path: str, text: str):
    directory = os.path.dirname(path) or "."
    fd, tmp = tempfile.mkstemp(dir=directory, suffix=".tmp")
    try:
        with os.fdopen(fd, "w", encoding="utf-8") as fh:
            fh.write(text)
        os.replace(tmp, path)
    except BaseException:
        if os.path.exists(tmp):
            os.unlink(tmp)
        raise


def _fmt(value) -> str:
    if isinstance(value, (float, np.floating)):
        return f"{float(value):.17g}"
    return str(value)


def write_csv(path: str, header: list[str], rows: list[tuple]):
    lines = [",".join(header)]
    lines.extend(",".join(_fmt(x) for x in row) for row in rows)
    _write_text_atomic(path, "\n".join(lines) + "\n")


def write_manifest(path: str, subcommand: str, cfg: dict, **extras):
    payload = {
        "subcommand": subcommand,
        "package_version": __version__,
        "config": {k: _jsonable(v) for k, v in sorted(cfg.items())},
    }
    payload.update(extras)
    _write_text_atomic(path, json.dumps(payload, indent=2, sort_keys=True, default=str) + "\n")


def _model_params(cfg: dict, **overrides) -> ModelParams:
    fields = {
        "L": int(cfg["L"]),
        "N": int(cfg["N"]),
        "J": float(cfg["J"]),
        "Omega": float(cfg["Omega"]),
        "U": float(cfg["U"]),
        "omega_X": float(cfg["omega_X"]),
        "ell": float(cfg["ell"]),
        "boundary": cfg["boundary"],
        "cap_photon": cfg["cap_photon"],
        "cap_exciton": cfg["cap_exciton"],
    }
    fields.update(overrides)
    return ModelParams(**fields)


def _map_points(fn, points, threads: int):
    """Evaluate scan points (in order) on a bounded worker pool."""
    if threads <= 1 or len(points) <= 1:
        return [fn(pt) for pt in points]
    with ThreadPoolExecutor(max_workers=threads) as pool:
        return list(pool.map(fn, points))


def _with_point_context(label: str, exc: LadderError) -> LadderError:
    return type(exc)(f"scan point {label}: {exc}")


def _ed_energy(params: ModelParams, cfg: dict):
    basis = sector_basis(params)
    H = build_ladder_hamiltonian(params, basis)
    res = lanczos_ground_state(H, tol=float(cfg["tol"]), seed=int(cfg["seed"]))
    return res, basis


def _dmrg_energy(params: ModelParams, cfg: dict):
    chi = int(cfg["chi_max"])
    cutoff = float(cfg["cutoff"])
    initial = None
    chk_path = None
    if cfg.get("checkpoint_dir"):
        os.makedirs(cfg["checkpoint_dir"], exist_ok=True)
        tag = dmrg_params_hash(params, chi, cutoff)
        chk_path = os.path.join(cfg["checkpoint_dir"], f"mps_{tag[:16]}.chk")
        if os.path.exists(chk_path):
            state, header = load_checkpoint(chk_path)
            if header.get("params_hash") == tag:
                initial = state
    energy, state, report = dmrg_ground_state(
        params,
        chi_max=chi,
        n_sweeps=int(cfg["sweeps"]),
        truncation_cutoff=cutoff,
        initial=initial,
    )
    if chk_path:
        save_checkpoint(state, chk_path, params_hash=dmrg_params_hash(params, chi, cutoff), energy=energy)
    if not report["converged"]:
        raise ConvergenceError(
            f"DMRG energy still changing by {report['final_energy_change']:.3e} "
            f"after {report['n_sweeps_run']} sweeps"
        )
    return energy, state, report


# ---------------------------------------------------------------------------
# subcommands

def cmd_blueshift_scan(cfg: dict) -> int:
    methods = [m.strip() for m in str(cfg["methods"]).split(",") if m.strip()]
    known = {"ed", "dmrg", "effective-ed", "tg", "tc", "bogoliubov"}
    unknown = set(methods) - known
    if unknown:
        raise ConfigError(f"unknown blueshift methods: {sorted(unknown)}")
    if cfg.get("J_values") and cfg.get("rho_values"):
        raise ConfigError("choose one of J_values or rho_values, not both")
    omega = float(cfg["Omega"])

    if cfg.get("rho_values"):
        scan_name = "rho"
        points = []
        for rho in _float_list(cfg["rho_values"], "rho"):
            n = int(round(rho * int(cfg["L"])))
            if n < 1:
                raise ConfigError(f"scan point rho={rho}: empty sector (N=0)")
            points.append((rho, float(cfg["J"]), n))
    else:
        scan_name = "J"
        j_values = _float_list(cfg.get("J_values") or str(cfg["J"]), "J")
        points = [(int(cfg["N"]) / int(cfg["L"]), j, int(cfg["N"])) for j in j_values]

    def evaluate(point):
        rho, j_val, n = point
        label = f"{scan_name}={rho if scan_name == 'rho' else j_val}"
        rows = []
        for method in methods:
            try:
                params = _model_params(cfg, J=j_val, N=n)
                if method == "ed":
                    res, _ = _ed_energy(params, cfg)
                    energy = res.energy
                elif method == "dmrg":
                    energy, _, _ = _dmrg_energy(params, cfg)
                elif method == "effective-ed":
                    u_pol = born_oppenheimer_upol(params.U, omega)
                    chain = single_species_basis(params.L, n, cap=n)
                    h_pol = build_polariton_hamiltonian(params, u_pol, chain)
                    energy = lanczos_ground_state(
                        h_pol, tol=float(cfg["tol"]), seed=int(cfg["seed"])
                    ).energy
                elif method == "tg":
                    energy = tg_energy_discrete(n, params.L, j_val / 2.0, omega)
                elif method == "tc":
                    block = build_tavis_cummings_block(params.L, n, omega)
                    energy = float(np.linalg.eigvalsh(block)[0])
                else:  # bogoliubov
                    u_pol = born_oppenheimer_upol(params.U, omega)
                    energy = bogoliubov_energy(n, params.L, u_pol, omega)
            except LadderError as exc:
                raise _with_point_context(f"{label} method={method}", exc) from exc
            rows.append(
                (
                    j_val,
                    rho,
                    int(cfg["L"]),
                    n,
                    _jsonable(float(cfg["U"])),
                    method,
                    energy,
                    blueshift_per_particle(energy, n, omega),
                )
            )
        return rows

    results = _map_points(evaluate, points, int(cfg["threads"]))
    rows = [row for chunk in results for row in chunk]
    out = os.path.join(cfg["out_dir"], "blueshift_scan")
    write_csv(
        out + ".csv",
        ["J", "rho", "L", "N", "U", "method", "energy", "blueshift_per_particle"],
        rows,
    )
    write_manifest(out + ".manifest.json", "blueshift-scan", cfg, scan=scan_name, n_points=len(points))
    print(f"wrote {out}.csv ({len(rows)} rows)")
    return 0


def cmd_g2(cfg: dict) -> int:
    params = _model_params(cfg)
    j0 = int(cfg["j0"]) if cfg.get("j0") is not None else params.L // 2
    method = cfg["method"]
    if method == "ed":
        res, basis = _ed_energy(params, cfg)
        corr_ph = g2(res.state, basis, "photon", j0)
        corr_x = g2(res.state, basis, "exciton", j0)
        energy = res.energy
    elif method == "dmrg":
        energy, state, _ = _dmrg_energy(params, cfg)
        corr_ph = mps_measure_g2(state, "photon", j0)
        corr_x = mps_measure_g2(state, "exciton", j0)
    else:
        raise ConfigError(f"g2 method must be 'ed' or 'dmrg', got {method!r}")
    rows = [
        (j, corr_ph.values[j], corr_x.values[j]) for j in range(params.L)
    ]
    out = os.path.join(cfg["out_dir"], "g2")
    write_csv(out + ".csv", ["site", "g2_photon", "g2_exciton"], rows)
    write_manifest(
        out + ".manifest.json",
        "g2",
        cfg,
        j0=j0,
        energy=energy,
        normalization_density=corr_ph.normalization_density,
    )
    print(f"wrote {out}.csv")
    return 0


def _omega_grid_from(cfg: dict) -> np.ndarray:
    step = cfg.get("omega_step") or float(cfg["gamma"]) / 8.0
    lo, hi = float(cfg["omega_min"]), float(cfg["omega_max"])
    n = int(round((hi - lo) / step)) + 1
    return lo + step * np.arange(n)


def cmd_sqw(cfg: dict) -> int:
    params = _model_params(cfg)
    j0 = int(cfg["j0"]) if cfg.get("j0") is not None else params.L // 2
    grid = structure_factor(
        params,
        channel=cfg["channel"],
        omega_values=_omega_grid_from(cfg),
        gamma=float(cfg["gamma"]),
        method=cfg["method"],
        j0=j0,
        T=float(cfg["T"]),
        dt=float(cfg["dt"]),
        dense_limit=int(cfg["dense_limit"]),
        seed=int(cfg["seed"]),
    )
    out = os.path.join(cfg["out_dir"], "sqw")
    grid.manifest["cli_config"] = {k: _jsonable(v) for k, v in sorted(cfg.items())}
    grid.write_csv(out + ".csv")
    grid.write_manifest(out + ".manifest.json")

    # Slice files: S(q, omega ~ 0) and S(q = pi, omega).
    i0 = int(np.argmin(np.abs(grid.omega_values)))
    write_csv(
        out + "_omega0.csv",
        ["q", "weight"],
        [(q, grid.weights[iq, i0]) for iq, q in enumerate(grid.q_values)],
    )
    iq_pi = int(np.argmin(np.abs(grid.q_values - np.pi)))
    write_csv(
        out + "_qpi.csv",
        ["omega", "weight"],
        [(w, grid.weights[iq_pi, iw]) for iw, w in enumerate(grid.omega_values)],
    )

    # Per-q sum-rule report against the equal-time correlator.
    basis = sector_basis(params)
    H = build_ladder_hamiltonian(params, basis)
    if basis.dim <= int(cfg["dense_limit"]):
        evals, evecs = dense_spectrum(H, dense_limit=int(cfg["dense_limit"]))
        gs = evecs[:, 0]
    else:
        gs = lanczos_ground_state(H, tol=float(cfg["tol"]), seed=int(cfg["seed"])).state
    oracle = equal_time_structure(gs, basis, cfg["channel"], grid.q_values, j0)
    integral = np.trapezoid(grid.weights, grid.omega_values, axis=1)
    sum_rows = []
    for iq, q in enumerate(grid.q_values):
        ref = oracle[iq]
        rel = (integral[iq] - ref) / ref if abs(ref) > 1e-30 else 0.0
        sum_rows.append((q, integral[iq], ref, rel))
    write_csv(out + "_sumrule.csv", ["q", "integral", "equal_time", "rel_error"], sum_rows)
    print(f"wrote {out}.csv and slices")
    return 0


def cmd_chi(cfg: dict) -> int:
    params = _model_params(cfg)
    grid = response_chi(
        params,
        omega_values=_omega_grid_from(cfg),
        gamma=float(cfg["gamma"]),
        part=cfg["part"],
        dense_limit=int(cfg["dense_limit"]),
        seed=int(cfg["seed"]),
    )
    out = os.path.join(cfg["out_dir"], "chi")
    grid.manifest["cli_config"] = {k: _jsonable(v) for k, v in sorted(cfg.items())}
    if grid.poles is not None:
        trimmed = {}
        for half, tables in grid.poles.items():
            trimmed[half] = []
            for entry in tables:
                idx = np.argsort(entry["weights"])[::-1][:64]
                trimmed[half].append(
                    {
                        "q": entry["q"],
                        "energies": [entry["energies"][i] for i in idx],
                        "weights": [entry["weights"][i] for i in idx],
                    }
                )
        grid.manifest["dominant_poles"] = trimmed
    grid.write_csv(out + ".csv")
    grid.write_manifest(out + ".manifest.json")
    print(f"wrote {out}.csv")
    return 0


def cmd_finite_size(cfg: dict) -> int:
    rho = float(cfg["rho"])
    l_values = _int_list(cfg["L_values"], "L")
    points = []
    for L in l_values:
        n = int(round(rho * L))
        if n < 1:
            raise ConfigError(f"scan point L={L}: empty sector at rho={rho}")
        points.append((L, n))

    def evaluate(point):
        L, n = point
        try:
            params = _model_params(cfg, L=L, N=n)
            method = cfg["method"]
            if method == "auto":
                dim = sector_dimension(
                    L, n, params.resolved_cap_photon, params.resolved_cap_exciton
                )
                method = "ed" if dim <= int(cfg["ed_max_dim"]) else "dmrg"
            if method == "ed":
                res, basis = _ed_energy(params, cfg)
                corr = g2(res.state, basis, "photon", L // 2)
                energy = res.energy
            elif method == "dmrg":
                energy, state, _ = _dmrg_energy(params, cfg)
                corr = mps_measure_g2(state, "photon", L // 2)
            else:
                raise ConfigError(f"finite-size method must be auto/ed/dmrg, got {method!r}")
        except LadderError as exc:
            raise _with_point_context(f"L={L}", exc) from exc
        return (L, n, method, energy, blueshift_per_particle(energy, n, float(cfg["Omega"]))), corr

    results = _map_points(evaluate, points, int(cfg["threads"]))
    rows = [r for r, _ in results]
    out = os.path.join(cfg["out_dir"], "finite_size")
    write_csv(out + ".csv", ["L", "N", "method", "energy", "blueshift_per_particle"], rows)

    # Point-wise g2 comparison around the center, one column per chain length.
    window = min(L // 2 - 1 for L, _ in points)
    offsets = list(range(-window, window + 1))
    g2_rows = []
    for d in offsets:
        row = [d]
        for (L, _), (_, corr) in zip(points, results):
            row.append(corr.values[L // 2 + d])
        g2_rows.append(tuple(row))
    write_csv(
        out + "_g2.csv",
        ["offset"] + [f"g2_photon_L{L}" for L, _ in points],
        g2_rows,
    )
    write_manifest(out + ".manifest.json", "finite-size", cfg, L_values=l_values, rho=rho)
    print(f"wrote {out}.csv and {out}_g2.csv")
    return 0


def cmd_photonic_fraction(cfg: dict) -> int:
    j_values = _float_list(cfg["J_values"], "J")

    def evaluate(j_val):
        try:
            params = _model_params(cfg, J=j_val)
            if cfg["method"] == "ed":
                res, basis = _ed_energy(params, cfg)
                frac = photonic_fraction(res.state, basis)
                energy = res.energy
            elif cfg["method"] == "dmrg":
                energy, state, _ = _dmrg_energy(params, cfg)
                frac = mps_photonic_fraction(state)
            else:
                raise ConfigError(f"method must be 'ed' or 'dmrg', got {cfg['method']!r}")
        except LadderError as exc:
            raise _with_point_context(f"J={j_val}", exc) from exc
        return (j_val, frac, energy)

    rows = _map_points(evaluate, j_values, int(cfg["threads"]))
    out = os.path.join(cfg["out_dir"], "photonic_fraction")
    write_csv(out + ".csv", ["J", "photonic_fraction", "energy"], rows)
    write_manifest(out + ".manifest.json", "photonic-fraction", cfg, n_points=len(rows))
    print(f"wrote {out}.csv")
    return 0


def cmd_entropy(cfg: dict) -> int:
    j_values = _float_list(cfg["J_values"], "J")

    def evaluate(j_val):
        try:
            params = _model_params(cfg, J=j_val)
            res, basis = _ed_energy(params, cfg)
            s_lm = von_neumann_entropy(res.state, basis, "light_matter")
            s_lr = von_neumann_entropy(
                res.state, basis, "left_right", cut_site=params.L // 2
            )
            frac = photonic_fraction(res.state, basis)
        except LadderError as exc:
            raise _with_point_context(f"J={j_val}", exc) from exc
        return (j_val, s_lm, s_lr, frac)

    rows = _map_points(evaluate, j_values, int(cfg["threads"]))
    out = os.path.join(cfg["out_dir"], "entropy")
    write_csv(
        out + ".csv",
        ["J", "entropy_light_matter", "entropy_left_right", "photonic_fraction"],
        rows,
    )
    write_manifest(out + ".manifest.json", "entropy", cfg, n_points=len(rows))
    print(f"wrote {out}.csv")
    return 0


def cmd_upol(cfg: dict) -> int:
    value = born_oppenheimer_upol(float(cfg["U"]), float(cfg["Omega"]))
    print(f"{value:.12g}")
    return 0


_HANDLERS = {
    "blueshift-scan": cmd_blueshift_scan,
    "g2": cmd_g2,
    "sqw": cmd_sqw,
    "chi": cmd_chi,
    "finite-size": cmd_finite_size,
    "photonic-fraction": cmd_photonic_fraction,
    "entropy": cmd_entropy,
    "upol": cmd_upol,
}


def _build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="polariton-ladder",
        description="Ground states, correlations and spectra of the 1D photon-exciton ladder.",
    )
    parser.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    sub = parser.add_subparsers(dest="subcommand", required=True)

    def add_common(p):
        p.add_argument("--config", help="flat key = value config file")
        p.add_argument("--out-dir", dest="out_dir")
        p.add_argument("--seed", type=int)
        p.add_argument("--threads", type=int)
        p.add_argument("--L", type=int)
        p.add_argument("--N", type=int)
        p.add_argument("--J", type=float)
        p.add_argument("--U", type=float, help="on-site exciton repulsion; 'inf' for hard core")
        p.add_argument("--Omega", type=float)
        p.add_argument("--omega-X", dest="omega_X", type=float)
        p.add_argument("--ell", type=float)
        p.add_argument("--boundary", choices=["periodic", "open"])
        p.add_argument("--cap-photon", dest="cap_photon", type=int)
        p.add_argument("--cap-exciton", dest="cap_exciton", type=int)
        p.add_argument("--tol", type=float)
        p.add_argument("--chi-max", dest="chi_max", type=int)
        p.add_argument("--sweeps", type=int)
        p.add_argument("--cutoff", type=float)
        p.add_argument("--checkpoint-dir", dest="checkpoint_dir")

    p = sub.add_parser("blueshift-scan", help="ground-state blueshift across J or density scans")
    add_common(p)
    p.add_argument("--methods", help="comma list: ed,dmrg,effective-ed,tg,tc,bogoliubov")
    p.add_argument("--J-values", dest="J_values")
    p.add_argument("--rho-values", dest="rho_values")

    p = sub.add_parser("g2", help="pair correlations g2(j, j0) for both species")
    add_common(p)
    p.add_argument("--method", choices=["ed", "dmrg"])
    p.add_argument("--j0", type=int)

    p = sub.add_parser("sqw", help="dynamic structure factor S(q, omega)")
    add_common(p)
    p.add_argument("--channel", choices=["photon", "exciton"])
    p.add_argument("--method", choices=["lehmann", "krylov"])
    p.add_argument("--gamma", type=float)
    p.add_argument("--T", type=float)
    p.add_argument("--dt", type=float)
    p.add_argument("--dense-limit", dest="dense_limit", type=int)
    p.add_argument("--omega-min", dest="omega_min", type=float)
    p.add_argument("--omega-max", dest="omega_max", type=float)
    p.add_argument("--omega-step", dest="omega_step", type=float)
    p.add_argument("--j0", type=int)

    p = sub.add_parser("chi", help="resonant response -Im chi(q, omega)")
    add_common(p)
    p.add_argument("--part", choices=["full", "absorption", "photoluminescence"])
    p.add_argument("--gamma", type=float)
    p.add_argument("--dense-limit", dest="dense_limit", type=int)
    p.add_argument("--omega-min", dest="omega_min", type=float)
    p.add_argument("--omega-max", dest="omega_max", type=float)
    p.add_argument("--omega-step", dest="omega_step", type=float)

    p = sub.add_parser("finite-size", help="blueshift and g2 convergence with system size")
    add_common(p)
    p.add_argument("--rho", type=float)
    p.add_argument("--L-values", dest="L_values")
    p.add_argument("--method", choices=["auto", "ed", "dmrg"])
    p.add_argument("--ed-max-dim", dest="ed_max_dim", type=int)

    p = sub.add_parser("photonic-fraction", help="photon share of excitations across J")
    add_common(p)
    p.add_argument("--J-values", dest="J_values")
    p.add_argument("--method", choices=["ed", "dmrg"])

    p = sub.add_parser("entropy", help="Von Neumann entropies and photonic fraction across J")
    add_common(p)
    p.add_argument("--J-values", dest="J_values")

    p = sub.add_parser("upol", help="print the Born-Oppenheimer polariton interaction")
    p.add_argument("--config", help="flat key = value config file")
    p.add_argument("--U", type=float)
    p.add_argument("--Omega", type=float)

    return parser


def resolve_config(args: argparse.Namespace) -> dict:
    """Merge defaults, config file and CLI flags (CLI wins)."""
    cfg = dict(_COMMON_DEFAULTS)
    cfg.update(_SUBCOMMAND_DEFAULTS[args.subcommand])
    if getattr(args, "config", None):
        file_values = read_config_file(args.config)
        unknown = set(file_values) - set(cfg)
        if unknown:
            raise ConfigError(f"unknown config keys: {sorted(unknown)}")
        cfg.update(file_values)
    for key, value in vars(args).items():
        if key in ("config", "subcommand") or value is None:
            continue
        cfg[key] = value
    return cfg


def main(argv=None) -> int:
    parser = _build_parser()
    args = parser.parse_args(argv)
    try:
        cfg = resolve_config(args)
        if "out_dir" in cfg and args.subcommand != "upol":
            os.makedirs(cfg["out_dir"], exist_ok=True)
        return _HANDLERS[args.subcommand](cfg)
    except ConfigError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    except ConvergenceError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 3
    except (CapacityError, DimensionLimitError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 4


if __name__ == "__main__":
    sys.exit(main())
