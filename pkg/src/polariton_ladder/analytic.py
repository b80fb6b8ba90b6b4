"""Closed-form reference energies and the free-fermion excitation support.

These are the analytic limits the numerics are checked against: the
hard-core (fermionized) Fermi-sea energy on the ring, its continuum
scaling, the collective light-matter (Tavis-Cummings) small-density law,
the weak-coupling Bogoliubov energy, and the particle-hole continuum of
the mapped free Fermi gas.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .errors import ConfigError


@dataclass(frozen=True)
class LindhardBand:
    """Support of the free-fermion particle-hole continuum at one momentum."""

    q: float
    omega_lower: float
    omega_upper: float


def blueshift_per_particle(energy: float, N: int, Omega: float = 1.0) -> float:
    """Interaction-induced energy per particle above the free polariton, E/N + Omega."""
    if N < 1:
        raise ConfigError("blueshift per particle needs N >= 1")
    return energy / N + Omega


def tg_energy_discrete(N: int, L: int, J_pol: float, Omega: float = 1.0) -> float:
    """Hard-core ground-state energy on the periodic chain (filled Fermi sea).

    E = -N Omega + J_pol * sum_m [2 - 2 cos(2 pi m / L)] over the N
    momenta closest to zero.  For odd N = 2M+1 the sea m = -M..M is
    unique; for even N the ground state is doubly degenerate and the
    deterministic choice m = -N/2+1 .. N/2 is returned.
    """
    if N > L:
        raise ConfigError(f"hard-core sector needs N <= L, got N={N}, L={L}")
    if N < 0:
        raise ConfigError(f"N must be >= 0, got {N}")
    if N % 2 == 1:
        m_max = (N - 1) // 2
        ms = np.arange(-m_max, m_max + 1)
    else:
        ms = np.arange(-N // 2 + 1, N // 2 + 1)
    kinetic = float(np.sum(2.0 - 2.0 * np.cos(2.0 * np.pi * ms / L)))
    return -N * Omega + J_pol * kinetic


def tg_energy_continuum(rho: float, ell: float, J_pol: float, Omega: float = 1.0) -> float:
    """Continuum hard-core energy per particle, -Omega + k_F^2 / (6 m_pol).

    k_F = pi rho / ell and 1/m_pol = 2 ell^2 J_pol, so the result equals
    -Omega + (pi^2 rho^2 / 3) J_pol independently of ell.
    """
    if not 0.0 < rho <= 1.0:
        raise ConfigError(f"rho must be in (0, 1], got {rho}")
    if ell <= 0:
        raise ConfigError(f"ell must be > 0, got {ell}")
    k_f = math.pi * rho / ell
    inv_mass = 2.0 * ell * ell * J_pol
    return -Omega + k_f * k_f * inv_mass / 6.0


def tc_energy_small_rho(rho: float, Omega: float = 1.0) -> float:
    """Leading Tavis-Cummings blueshift per particle, (Omega / 4) rho."""
    if not 0.0 < rho <= 1.0:
        raise ConfigError(f"rho must be in (0, 1], got {rho}")
    return 0.25 * Omega * rho


def bogoliubov_energy(N: int, L: int, U_pol: float, Omega: float = 1.0) -> float:
    """Weak-coupling condensate energy, -Omega N + (U_pol / 2) N (N - 1) / L."""
    if N < 1:
        raise ConfigError(f"N must be >= 1, got {N}")
    return -Omega * N + 0.5 * U_pol * N * (N - 1) / L


def crossover_coupling(rho: float, Omega: float = 1.0) -> float:
    """Photon hopping at the fermionized/collective crossover, 3 Omega / (2 pi^3 rho^2)."""
    if rho <= 0:
        raise ConfigError(f"rho must be > 0, got {rho}")
    return 1.5 * Omega / (math.pi**3 * rho * rho)


def lindhard_support(
    q: float, k_F: float, J_pol: float, n_grid: int = 20001
) -> LindhardBand:
    """Bounds of the free-fermion particle-hole continuum at momentum q.

    Brute-force extremization of eps(k+q) - eps(k) over a dense grid of
    occupied momenta |k| <= k_F with |k+q| (folded to the zone) above
    k_F, for the lattice dispersion eps(k) = 2 J_pol (1 - cos k).  The
    lower bound is clamped at zero.
    """
    if not 0.0 <= q <= math.pi + 1e-12:
        raise ConfigError(f"q must lie in [0, pi], got {q}")
    if not 0.0 < k_F <= math.pi / 2 + 1e-12:
        raise ConfigError(f"k_F must lie in (0, pi/2], got {k_F}")
    if q == 0.0:
        return LindhardBand(q=0.0, omega_lower=0.0, omega_upper=0.0)
    k = np.linspace(-k_F, k_F, n_grid)
    k_out = k + q
    folded = np.mod(k_out + math.pi, 2.0 * math.pi) - math.pi
    valid = np.abs(folded) > k_F
    if not np.any(valid):
        return LindhardBand(q=q, omega_lower=0.0, omega_upper=0.0)
    de = 2.0 * J_pol * (np.cos(k[valid]) - np.cos(k_out[valid]))
    return LindhardBand(
        q=q,
        omega_lower=max(0.0, float(de.min())),
        omega_upper=float(de.max()),
    )


def lindhard_support_curve(
    q_values: np.ndarray, k_F: float, J_pol: float, n_grid: int = 20001
) -> tuple[np.ndarray, np.ndarray]:
    """Vectorized lower/upper support bounds over a momentum grid."""
    lows, highs = [], []
    for q in np.asarray(q_values, dtype=float):
        band = lindhard_support(float(q), k_F, J_pol, n_grid=n_grid)
        lows.append(band.omega_lower)
        highs.append(band.omega_upper)
    return np.array(lows), np.array(highs)
