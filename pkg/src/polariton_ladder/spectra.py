"""Dynamic structure factor and resonant photon response at ED scale.

The structure factor of species alpha is the one-sided transform

    S(q, w) = Re sum_j  int_0^inf dt/pi  e^{i w t - i q (j - j0)}
              <dn_a(j, t) dn_a(j0, 0)>  e^{-Gamma t / 2}

with dn = n - <n> and a fixed reference site j0.  The phase is measured
from j0 so that on a periodic ring with momenta commensurate to the ring
the weights are non-negative; the q = 0 column is zeroed, where the
procedure produces only a phase-shift artifact.

Two routes are implemented: a Lehmann sum over the exact eigenbasis
(the closed form of the time integral) and Krylov real-time propagation
of dn(j0)|0> followed by numerical quadrature.  They agree to the
quadrature error.

The resonant response

    chi_res(q, w) = -i int_0^inf dt/pi e^{i w t} <[a_q(t), a_q^+(0)]>

is assembled from the Lehmann representations in the N+1 (absorption
half) and N-1 (photoluminescence half) sectors, with a_q normalized by
1/sqrt(L).  Reported weights are -Im chi.
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass, field

import numpy as np
import scipy.linalg as sla
import scipy.sparse as sp

from .basis import FockBasis
from .errors import ConfigError, ConvergenceError
from .exact import dense_spectrum, lanczos_ground_state
from .model import (
    ModelParams,
    annihilation_map,
    build_ladder_hamiltonian,
    creation_map,
    sector_basis,
)

DEFAULT_GAMMA = 0.04


@dataclass
class SpectralGrid:
    """Spectral weights on a (q, omega) grid plus the full run manifest."""

    q_values: np.ndarray
    omega_values: np.ndarray
    weights: np.ndarray  # shape (n_q, n_omega)
    channel: str
    gamma: float
    manifest: dict = field(default_factory=dict)
    poles: dict | None = None

    def write_csv(self, path):
        with open(path, "w", encoding="utf-8") as fh:
            fh.write("q,omega,weight\n")
            for iq, q in enumerate(self.q_values):
                for iw, w in enumerate(self.omega_values):
                    fh.write(
                        f"{q:.17g},{w:.17g},{self.weights[iq, iw]:.17g}\n"
                    )

    def write_manifest(self, path):
        with open(path, "w", encoding="utf-8") as fh:
            json.dump(self.manifest, fh, indent=2, sort_keys=True, default=str)
            fh.write("\n")


def default_q_grid(params: ModelParams) -> np.ndarray:
    """Momentum grid in [0, pi]: ring-commensurate for PBC, pi m / L for OBC."""
    if params.boundary == "periodic":
        return 2.0 * np.pi * np.arange(params.L // 2 + 1) / params.L
    return np.pi * np.arange(params.L + 1) / params.L


def default_omega_grid(
    gamma: float, omega_min: float = -0.5, omega_max: float = 3.5
) -> np.ndarray:
    """Frequency grid resolving the linewidth (step gamma / 8)."""
    step = gamma / 8.0
    n = int(round((omega_max - omega_min) / step)) + 1
    return omega_min + step * np.arange(n)


def _validate_grids(q_values, omega_values):
    q = np.asarray(q_values, dtype=float)
    w = np.asarray(omega_values, dtype=float)
    if q.ndim != 1 or w.ndim != 1 or q.size == 0 or w.size == 0:
        raise ConfigError("q and omega grids must be non-empty 1D arrays")
    if np.any(np.diff(q) <= 0) or np.any(np.diff(w) <= 0):
        raise ConfigError("q and omega grids must be strictly increasing")
    return q, w


def _ground_state(H, dense_limit, seed, tol=1e-11):
    if H.shape[0] <= dense_limit:
        w, v = dense_spectrum(H, dense_limit=dense_limit)
        degenerate = bool(w.size > 1 and w[1] - w[0] < 1e-8)
        return float(w[0]), v[:, 0], degenerate
    res = lanczos_ground_state(H, tol=tol, seed=seed)
    return res.energy, res.state, res.degenerate


def _species_columns(basis: FockBasis, channel: str) -> np.ndarray:
    if channel == "photon":
        return basis.photon_occupations.astype(np.float64)
    if channel == "exciton":
        return basis.exciton_occupations.astype(np.float64)
    raise ConfigError(f"channel must be 'photon' or 'exciton', got {channel!r}")


def equal_time_structure(
    state: np.ndarray,
    basis: FockBasis,
    channel: str,
    q_values: np.ndarray,
    j0: int,
) -> np.ndarray:
    """Equal-time correlator Re sum_j e^{-iq(j-j0)} <dn_j dn_j0> (sum-rule oracle)."""
    occ = _species_columns(basis, channel)
    weights = np.abs(np.asarray(state)) ** 2
    dens = weights @ occ
    nn = (weights * occ[:, j0]) @ occ  # <n_j n_j0>
    dd = nn - dens * dens[j0]
    sites = np.arange(basis.L)
    phases = np.exp(-1j * np.outer(q_values, sites - j0))
    return (phases @ dd).real


def _manifest(params: ModelParams, **extra) -> dict:
    d = {
        "L": params.L,
        "N": params.N,
        "J": params.J,
        "Omega": params.Omega,
        "U": "inf" if params.hard_core else params.U,
        "omega_X": params.omega_X,
        "ell": params.ell,
        "boundary": params.boundary,
        "cap_photon": params.resolved_cap_photon,
        "cap_exciton": params.resolved_cap_exciton,
    }
    d.update(extra)
    return d


def structure_factor(
    params: ModelParams,
    channel: str = "photon",
    q_values=None,
    omega_values=None,
    gamma: float = DEFAULT_GAMMA,
    method: str = "lehmann",
    j0: int | None = None,
    T: float | None = None,
    dt: float = 0.1,
    dense_limit: int = 4096,
    seed: int = 0,
    propagation_tol: float = 1e-7,
) -> SpectralGrid:
    """Dynamic structure factor S(q, w) of one density channel.

    ``method='lehmann'`` evaluates the closed-form one-sided transform
    over the dense eigenbasis; ``method='krylov'`` propagates
    dn(j0)|0> in real time with Lanczos steps of size `dt` up to horizon
    `T`, damps by e^{-Gamma t/2} and integrates with composite Simpson
    weights.  The q = 0 column is set to zero in both cases.
    """
    if gamma <= 0:
        raise ConfigError(f"gamma must be > 0, got {gamma}")
    if method not in ("lehmann", "krylov"):
        raise ConfigError(f"method must be 'lehmann' or 'krylov', got {method!r}")
    basis = sector_basis(params)
    L = params.L
    if j0 is None:
        j0 = L // 2
    if not 0 <= j0 < L:
        raise ConfigError(f"j0 must lie in [0, {L}), got {j0}")
    q, omega = _validate_grids(
        default_q_grid(params) if q_values is None else q_values,
        default_omega_grid(gamma) if omega_values is None else omega_values,
    )
    H = build_ladder_hamiltonian(params, basis)
    occ = _species_columns(basis, channel)
    sites = np.arange(L)
    phases = np.exp(-1j * np.outer(q, sites - j0))

    if method == "lehmann":
        evals, evecs = dense_spectrum(H, dense_limit=dense_limit)
        gs = evecs[:, 0]
        e0 = evals[0]
        degenerate = bool(evals.size > 1 and evals[1] - evals[0] < 1e-8)
        dens = (gs**2) @ occ
        # M[j, n] = <0| n_j |n>, then subtract <n_j> from the n = 0 column.
        M = (occ * gs[:, None]).T @ evecs
        M[:, 0] -= dens
        A = (phases @ M) * M[j0, :][None, :]  # (nq, dim)
        kern = 1.0 / (
            np.pi * (0.5 * gamma - 1j * (omega[None, :] - (evals - e0)[:, None]))
        )
        weights = (A @ kern).real
        extra = {"method": "lehmann", "dense_dimension": int(basis.dim)}
    else:
        e0, gs, degenerate = _ground_state(H, dense_limit, seed)
        dens = (np.abs(gs) ** 2) @ occ
        dn_vectors = occ.T * gs[None, :] - np.outer(dens, gs)  # rows: dn_j |0>
        phi0 = dn_vectors[j0]
        if T is None:
            T = 500.0 / params.Omega
        n_steps = int(round(T / dt))
        overlaps, prop_err = _propagate_overlaps(
            H, phi0, dn_vectors, e0, n_steps, dt
        )
        if prop_err > propagation_tol:
            raise ConvergenceError(
                f"Krylov propagation error estimate {prop_err:.3e} exceeds "
                f"tolerance {propagation_tol:g}"
            )
        t_grid = dt * np.arange(n_steps + 1)
        quad = _simpson_weights(n_steps + 1, dt)
        damped = overlaps * (quad * np.exp(-0.5 * gamma * t_grid))[None, :]
        kern = np.exp(1j * np.outer(t_grid, omega))
        weights = ((phases @ damped) @ kern).real / np.pi
        extra = {
            "method": "krylov",
            "T": T,
            "dt": dt,
            "n_steps": n_steps,
            "propagation_error_estimate": prop_err,
        }

    zero_cols = np.isclose(q, 0.0, atol=1e-12)
    min_weight = float(weights.min()) if weights.size else 0.0
    weights[zero_cols, :] = 0.0
    manifest = _manifest(
        params,
        observable="structure_factor",
        channel=channel,
        gamma=gamma,
        j0=j0,
        seed=seed,
        q_grid=[float(q[0]), float(q[-1]), int(q.size)],
        omega_grid=[float(omega[0]), float(omega[-1]), int(omega.size)],
        min_weight=min_weight,
        negative_weight_flag=bool(min_weight < -1e-8),
        ground_state_degenerate=degenerate,
        **extra,
    )
    return SpectralGrid(
        q_values=q,
        omega_values=omega,
        weights=weights,
        channel=channel,
        gamma=gamma,
        manifest=manifest,
    )


def response_chi(
    params: ModelParams,
    q_values=None,
    omega_values=None,
    gamma: float = DEFAULT_GAMMA,
    part: str = "full",
    dense_limit: int = 4096,
    seed: int = 0,
) -> SpectralGrid:
    """Resonant photon response -Im chi_res(q, w) via Lehmann sums.

    Requires the N (reference) sector ground state and the full spectra
    of the N+1 (absorption) and N-1 (photoluminescence) sectors.  The
    ``full`` part is absorption minus photoluminescence, following the
    two halves of the commutator.
    """
    if gamma <= 0:
        raise ConfigError(f"gamma must be > 0, got {gamma}")
    if part not in ("full", "absorption", "photoluminescence"):
        raise ConfigError(
            "part must be 'full', 'absorption' or 'photoluminescence', "
            f"got {part!r}"
        )
    q, omega = _validate_grids(
        default_q_grid(params) if q_values is None else q_values,
        default_omega_grid(gamma, -2.5, 2.5) if omega_values is None else omega_values,
    )
    basis = sector_basis(params)
    H = build_ladder_hamiltonian(params, basis)
    e0, gs, degenerate = _ground_state(H, dense_limit, seed)
    L = params.L
    sites = np.arange(L)

    def _half(sector_n: int, mode: str):
        """Pole energies and weights of one commutator half, per q."""
        if sector_n < 0:
            return None
        sub = params.with_excitations(sector_n)
        sub_basis = sector_basis(sub)
        sub_H = build_ladder_hamiltonian(sub, sub_basis)
        evals, evecs = dense_spectrum(sub_H, dense_limit=dense_limit)
        if mode == "create":
            maps = [creation_map(basis, sub_basis, "photon", j) for j in range(L)]
            deltas = evals - e0  # poles at w = E_m(N+1) - E_0
        else:
            maps = [annihilation_map(basis, sub_basis, "photon", j) for j in range(L)]
            deltas = -(evals - e0)  # poles at w = E_0 - E_m(N-1)
        site_vecs = np.stack([m @ gs for m in maps])  # (L, dim_sub)
        amp = np.stack(
            [
                evecs.T @ (np.exp(-1j * qv * sites) @ site_vecs) / math.sqrt(L)
                for qv in q
            ]
        )  # (nq, dim_sub)
        return deltas, np.abs(amp) ** 2

    absorption = _half(params.N + 1, "create")
    luminescence = _half(params.N - 1, "annihilate") if params.N >= 1 else None

    def _lorentz_sum(poles):
        deltas, w2 = poles
        kern = (0.5 * gamma / np.pi) / (
            (omega[None, :] - deltas[:, None]) ** 2 + 0.25 * gamma**2
        )
        return w2 @ kern

    weights = np.zeros((q.size, omega.size))
    if part in ("full", "absorption") and absorption is not None:
        weights += _lorentz_sum(absorption)
    if part in ("full", "photoluminescence") and luminescence is not None:
        contrib = _lorentz_sum(luminescence)
        weights += -contrib if part == "full" else contrib

    def _pole_table(poles):
        if poles is None:
            return []
        deltas, w2 = poles
        table = []
        for iq in range(q.size):
            wq = w2[iq]
            keep = wq > max(wq.max(), 1e-300) * 1e-12
            table.append(
                {
                    "q": float(q[iq]),
                    "energies": [float(x) for x in deltas[keep]],
                    "weights": [float(x) for x in wq[keep]],
                }
            )
        return table

    poles = {
        "absorption": _pole_table(absorption),
        "photoluminescence": _pole_table(luminescence),
    }
    manifest = _manifest(
        params,
        observable="response_chi",
        channel="response" if part == "full" else part,
        part=part,
        gamma=gamma,
        seed=seed,
        a_q_normalization="1/sqrt(L)",
        q_grid=[float(q[0]), float(q[-1]), int(q.size)],
        omega_grid=[float(omega[0]), float(omega[-1]), int(omega.size)],
        ground_state_degenerate=degenerate,
    )
    return SpectralGrid(
        q_values=q,
        omega_values=omega,
        weights=weights,
        channel="response" if part == "full" else part,
        gamma=gamma,
        manifest=manifest,
        poles=poles,
    )


def _simpson_weights(n_points: int, dt: float) -> np.ndarray:
    """Composite Simpson weights; trapezoid patch on a trailing odd interval."""
    if n_points < 2:
        return np.full(n_points, dt)
    w = np.zeros(n_points)
    n_int = n_points - 1
    m = n_int if n_int % 2 == 0 else n_int - 1
    if m >= 2:
        w[0] += dt / 3.0
        w[m] += dt / 3.0
        w[1:m:2] += 4.0 * dt / 3.0
        w[2:m:2] += 2.0 * dt / 3.0
    if m < n_int:
        w[n_int - 1] += dt / 2.0
        w[n_int] += dt / 2.0
    return w


def _lanczos_factorization(H, v, m):
    """m-step Lanczos with full reorthogonalization; returns V, alpha, beta, next_beta."""
    n = v.shape[0]
    V = np.empty((m, n), dtype=complex)
    alphas = np.empty(m)
    betas = np.empty(max(m - 1, 0))
    V[0] = v
    k_built = 0
    next_beta = 0.0
    for k in range(m):
        w = H @ V[k]
        alphas[k] = np.real(np.vdot(V[k], w))
        w = w - alphas[k] * V[k]
        if k > 0:
            w = w - betas[k - 1] * V[k - 1]
        for _ in range(2):
            coeffs = V[: k + 1].conj() @ w
            w = w - V[: k + 1].T @ coeffs
        k_built = k + 1
        beta = np.linalg.norm(w)
        if k + 1 == m or beta < 1e-14:
            next_beta = beta
            break
        betas[k] = beta
        V[k + 1] = w / beta
    return V[:k_built], alphas[:k_built], betas[: max(k_built - 1, 0)], next_beta


def _krylov_step(H, phi, dt, m):
    """One step phi -> e^{-i H dt} phi; returns (new phi, error estimate).

    The tridiagonal Lanczos projection is exponentiated through its
    eigendecomposition, which is far cheaper than a dense expm.
    """
    norm = np.linalg.norm(phi)
    if norm == 0.0:
        return phi, 0.0
    V, alphas, betas, next_beta = _lanczos_factorization(H, phi / norm, m)
    theta, Y = sla.eigh_tridiagonal(alphas, betas)
    col = Y @ (np.exp(-1j * dt * theta) * Y[0, :])
    new = norm * (V.T @ col)
    err = float(norm * next_beta * abs(col[-1]))
    return new, err


def _propagate_overlaps(H, phi0, obs_vectors, e0, n_steps, dt, m0=10, m_max=96):
    """Overlaps C[j, s] = e^{i E0 t_s} <obs_j | e^{-i H t_s} | phi0>.

    The Krylov dimension adapts: it grows while the per-step error
    estimate exceeds the step tolerance and relaxes slowly when the
    estimate is far below it.
    """
    Hc = H.astype(complex) if sp.issparse(H) else H
    phi = phi0.astype(complex)
    n_obs = obs_vectors.shape[0]
    C = np.empty((n_obs, n_steps + 1), dtype=complex)
    C[:, 0] = obs_vectors @ phi
    m = m0
    total_err = 0.0
    step_tol = 1e-11 * max(1.0, np.linalg.norm(phi0))
    for s in range(1, n_steps + 1):
        new, err = _krylov_step(Hc, phi, dt, m)
        while err > step_tol and m < m_max:
            m = min(m + 8, m_max)
            new, err = _krylov_step(Hc, phi, dt, m)
        if err < 1e-4 * step_tol and m > 6:
            m -= 1
        total_err += err
        phi = new
        C[:, s] = (obs_vectors @ phi) * np.exp(1j * e0 * dt * s)
    return C, total_err
