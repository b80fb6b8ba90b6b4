import math

import numpy as np
import pytest

from polariton_ladder.analytic import (
    blueshift_per_particle,
    bogoliubov_energy,
    crossover_coupling,
    lindhard_support,
    lindhard_support_curve,
    tc_energy_small_rho,
    tg_energy_continuum,
    tg_energy_discrete,
)
from polariton_ladder.errors import ConfigError
from polariton_ladder.model import build_tavis_cummings_block


def test_tg_discrete_examples():
    assert tg_energy_discrete(1, 8, 0.3) == pytest.approx(-1.0)
    j_pol = 0.7
    expected = -3.0 + 2 * (2 - math.sqrt(3.0)) * j_pol
    assert tg_energy_discrete(3, 12, j_pol) == pytest.approx(expected, abs=1e-12)
    ms = np.arange(-4, 5)
    expected_36 = -9.0 + j_pol * np.sum(2 - 2 * np.cos(2 * np.pi * ms / 36))
    assert tg_energy_discrete(9, 36, j_pol) == pytest.approx(expected_36, abs=1e-12)
    with pytest.raises(ConfigError):
        tg_energy_discrete(5, 4, 0.1)


def test_tg_discrete_even_sea_is_deterministic():
    j_pol = 0.2
    # Filled sea over m = -N/2+1 .. N/2 (one of the two degenerate choices).
    ms = np.arange(-1, 3)
    expected = -4.0 + j_pol * np.sum(2 - 2 * np.cos(2 * np.pi * ms / 12))
    assert tg_energy_discrete(4, 12, j_pol) == pytest.approx(expected, abs=1e-12)


def test_tg_continuum():
    j_pol = 0.45
    # Direct substitution: E/N = -Omega + (pi^2 rho^2 / 3) J_pol, ell-independent.
    assert tg_energy_continuum(0.25, 1.0, j_pol) == pytest.approx(
        -1.0 + math.pi**2 / 48 * j_pol
    )
    assert tg_energy_continuum(0.25, 2.7, j_pol) == pytest.approx(
        tg_energy_continuum(0.25, 1.0, j_pol)
    )
    assert tg_energy_continuum(1e-6, 1.0, j_pol) == pytest.approx(-1.0, abs=1e-9)


def test_tg_discrete_converges_to_continuum():
    j_pol = 0.5
    # At fixed N = 9 the relative deviation of the sea sum from the
    # continuum integral floors at (N^2 - 1)/N^2 - 1 = 1.23%; measured
    # 1.4% at L = 144.
    per_particle = tg_energy_continuum(9 / 144, 1.0, j_pol)
    discrete = tg_energy_discrete(9, 144, j_pol) / 9
    assert abs(discrete - per_particle) / abs(per_particle + 1.0) < 0.02

    # The continuum law is the small-density limit: at fixed N the
    # deviation falls as O(1/L^2) (measured ratio ~4 per doubling).  At
    # fixed density a lattice-dispersion bias ~ k_F^2/12 survives instead.
    def deviation(L):
        return abs(
            tg_energy_discrete(9, L, j_pol) / 9 - tg_energy_continuum(9 / L, 1.0, j_pol)
        )

    devs = [deviation(L) for L in (72, 144, 288)]
    assert devs[2] < devs[1] < devs[0]
    assert devs[2] < devs[0] / 6


def test_tc_small_rho():
    assert tc_energy_small_rho(1e-9) == pytest.approx(0.0, abs=1e-9)
    assert tc_energy_small_rho(0.25) == pytest.approx(1.0 / 16)
    # Dicke-block oracle at L=64, N=4: agreement up to the O(rho^2) term.
    block = np.linalg.eigvalsh(build_tavis_cummings_block(64, 4, 1.0))
    blueshift = block[0] / 4 + 1.0
    rho = 4 / 64
    assert abs(blueshift - tc_energy_small_rho(rho)) < rho**2


def test_bogoliubov():
    assert bogoliubov_energy(1, 10, 0.3) == pytest.approx(-1.0)
    expected = -9.0 + 0.186 * (9 * 8) / (2 * 36)
    assert bogoliubov_energy(9, 36, 0.186) == pytest.approx(expected)
    assert bogoliubov_energy(9, 36, 0.186) == pytest.approx(-9.0 + 0.186)


def test_crossover_coupling():
    assert crossover_coupling(0.25) == pytest.approx(24.0 / math.pi**3)
    assert crossover_coupling(0.5) == pytest.approx(6.0 / math.pi**3)
    assert crossover_coupling(0.125) == pytest.approx(4 * crossover_coupling(0.25))


def test_blueshift_per_particle():
    assert blueshift_per_particle(-3.0, 3) == pytest.approx(0.0)
    assert blueshift_per_particle(-2.9, 3) == pytest.approx(0.1 / 3)


def test_lindhard_limits():
    j_pol = 0.05
    k_f = 0.3 * math.pi
    v_f = 2 * j_pol * math.sin(k_f)
    q_small = 0.01
    band = lindhard_support(q_small, k_f, j_pol)
    assert band.omega_lower == pytest.approx(v_f * q_small, rel=0.05, abs=1e-6)
    assert band.omega_upper == pytest.approx(v_f * q_small, rel=0.05, abs=1e-6)
    # Zero-cost backscattering across the Fermi sea at q = 2 k_F.
    band2 = lindhard_support(2 * k_f, k_f, j_pol)
    assert 0.0 <= band2.omega_lower < 1e-4
    band0 = lindhard_support(0.0, k_f, j_pol)
    assert band0.omega_lower == 0.0 and band0.omega_upper == 0.0


def test_lindhard_support_against_independent_sampling():
    rng = np.random.default_rng(7)
    j_pol = 0.2
    k_f = 0.4 * math.pi
    qs = np.linspace(0.05, math.pi, 9)
    lows, highs = lindhard_support_curve(qs, k_f, j_pol)
    for q, lo, hi in zip(qs, lows, highs):
        assert 0.0 <= lo <= hi
        # Random occupied momenta must never produce transitions outside
        # the reported band (up to sampling slack on the boundary).
        ks = rng.uniform(-k_f, k_f, 4000)
        kq = ks + q
        folded = np.mod(kq + math.pi, 2 * math.pi) - math.pi
        valid = np.abs(folded) > k_f
        if not np.any(valid):
            continue
        de = 2 * j_pol * (np.cos(ks[valid]) - np.cos(kq[valid]))
        assert de.min() >= lo - 1e-3
        assert de.max() <= hi + 1e-3


def test_lindhard_band_shape():
    j_pol = 0.11
    k_f = 0.25 * math.pi
    qs = np.linspace(0.0, math.pi, 200)
    lows, highs = lindhard_support_curve(qs, k_f, j_pol, n_grid=4001)
    assert np.all(highs >= lows - 1e-12)
    # Upper bound rises then falls across the zone for k_F <= pi/2.
    peak = int(np.argmax(highs))
    assert np.all(np.diff(highs[: peak + 1]) >= -1e-6)
    assert np.all(np.diff(highs[peak:]) <= 1e-6)


def test_input_validation():
    with pytest.raises(ConfigError):
        tg_energy_continuum(0.0, 1.0, 0.1)
    with pytest.raises(ConfigError):
        tc_energy_small_rho(1.5)
    with pytest.raises(ConfigError):
        crossover_coupling(0.0)
    with pytest.raises(ConfigError):
        lindhard_support(-0.1, 0.5, 0.1)
    with pytest.raises(ConfigError):
        lindhard_support(0.5, 2.0, 0.1)
