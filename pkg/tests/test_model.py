import math

import numpy as np
import pytest

from polariton_ladder.analytic import tg_energy_discrete
from polariton_ladder.basis import single_species_basis
from polariton_ladder.errors import ConfigError
from polariton_ladder.exact import lanczos_ground_state
from polariton_ladder.model import (
    ModelParams,
    annihilation_map,
    born_oppenheimer_upol,
    build_ladder_hamiltonian,
    build_polariton_hamiltonian,
    build_tavis_cummings_block,
    creation_map,
    sector_basis,
)


def test_params_validation():
    with pytest.raises(ConfigError):
        ModelParams(L=0, N=1, J=0.1)
    with pytest.raises(ConfigError):
        ModelParams(L=4, N=-1, J=0.1)
    with pytest.raises(ConfigError):
        ModelParams(L=4, N=1, J=-0.1)
    with pytest.raises(ConfigError):
        ModelParams(L=2, N=1, J=0.1, boundary="periodic")
    with pytest.raises(ConfigError):
        ModelParams(L=4, N=1, J=0.1, U=math.inf, cap_exciton=3)
    p = ModelParams(L=4, N=1, J=0.1, U=math.inf)
    assert p.hard_core and p.resolved_cap_exciton == 1


def test_single_rung_rabi_block():
    p = ModelParams(L=1, N=1, J=0.0, boundary="open")
    H = build_ladder_hamiltonian(p, sector_basis(p)).toarray()
    assert np.allclose(H, [[0.0, -1.0], [-1.0, 0.0]])
    assert np.isclose(np.linalg.eigvalsh(H)[0], -1.0)


@pytest.mark.parametrize("L,N", [(3, 1), (4, 2), (5, 3)])
def test_zero_hopping_ground_energy(L, N):
    p = ModelParams(L=L, N=N, J=0.0, U=1.0, boundary="open")
    H = build_ladder_hamiltonian(p, sector_basis(p))
    energy = np.linalg.eigvalsh(H.toarray())[0]
    assert abs(energy + N) < 1e-12


def test_two_rung_single_particle_bands():
    # Photon normal modes of the open 2-chain have energies {J, 3J}; each
    # pairs with one exciton combination through the Rabi coupling.
    J = 0.37
    p = ModelParams(L=2, N=1, J=J, boundary="open")
    H = build_ladder_hamiltonian(p, sector_basis(p)).toarray()
    got = np.sort(np.linalg.eigvalsh(H))
    expected = []
    for eps in (J, 3 * J):
        expected.extend(np.linalg.eigvalsh([[eps, -1.0], [-1.0, 0.0]]))
    assert np.allclose(got, np.sort(expected), atol=1e-12)


def test_detuning_closed_form():
    delta = 0.63
    p = ModelParams(L=1, N=1, J=0.0, omega_X=delta, boundary="open")
    H = build_ladder_hamiltonian(p, sector_basis(p)).toarray()
    expected = delta / 2 - math.sqrt(delta**2 / 4 + 1.0)
    assert np.isclose(np.linalg.eigvalsh(H)[0], expected)


def test_hermiticity_and_number_conservation():
    for p in [
        ModelParams(L=4, N=2, J=0.4, U=0.7, omega_X=0.1, boundary="periodic"),
        ModelParams(L=4, N=3, J=1.2, U=math.inf, boundary="open"),
    ]:
        basis = sector_basis(p)
        H = build_ladder_hamiltonian(p, basis)
        assert abs(H - H.T).max() == 0.0
        # H maps sector states to sector states with the total number intact.
        rng = np.random.default_rng(4)
        psi = rng.standard_normal(basis.dim)
        psi /= np.linalg.norm(psi)
        n_tot = basis.occupations.sum(axis=1).astype(float)
        hpsi = H @ psi
        hpsi /= np.linalg.norm(hpsi)
        assert np.isclose((hpsi**2) @ n_tot, p.N)


def test_basis_params_mismatch():
    p = ModelParams(L=4, N=2, J=0.1, boundary="open")
    other = sector_basis(ModelParams(L=4, N=3, J=0.1, boundary="open"))
    with pytest.raises(ConfigError):
        build_ladder_hamiltonian(p, other)


def test_polariton_chain_free_dispersion():
    p = ModelParams(L=6, N=1, J=0.4, boundary="periodic")
    chain = single_species_basis(6, 1)
    H = build_polariton_hamiltonian(p, 0.0, chain).toarray()
    ks = 2 * np.pi * np.arange(6) / 6
    expected = np.sort(2 * (p.J / 2) * (1 - np.cos(ks)) - 1.0)
    assert np.allclose(np.sort(np.linalg.eigvalsh(H)), expected)


def test_polariton_chain_zero_hopping():
    p = ModelParams(L=5, N=3, J=0.0, boundary="open")
    chain = single_species_basis(5, 3)
    H = build_polariton_hamiltonian(p, 0.5, chain)
    assert np.isclose(np.linalg.eigvalsh(H.toarray())[0], -3.0)


def test_polariton_chain_matches_tg_oracle():
    # Reduced-size version of the hard-core effective chain against the
    # filled-sea energy: agreement to O(J^2/Omega) at J = 0.01.
    J = 0.01
    p = ModelParams(L=12, N=3, J=J, boundary="periodic")
    chain = single_species_basis(12, 3, cap=1)
    H = build_polariton_hamiltonian(p, 2.0 - math.sqrt(2.0), chain)
    energy = lanczos_ground_state(H, tol=1e-12).energy
    expected = tg_energy_discrete(3, 12, J / 2)
    assert abs(energy - expected) < 5e-4 * J + 1e-10


def test_born_oppenheimer_limits():
    assert abs(born_oppenheimer_upol(0.0, 1.0)) < 1e-12
    assert abs(born_oppenheimer_upol(1.0, 1.0) - 0.1864) < 1e-3
    assert born_oppenheimer_upol(math.inf, 1.0) == pytest.approx(
        2.0 - math.sqrt(2.0), abs=1e-15
    )
    u_small = 1e-3
    assert born_oppenheimer_upol(u_small, 1.0) == pytest.approx(u_small / 4, rel=0.01)
    # Cross-check at U = Omega: smallest root of x^3 - x^2 - 4x + 2.
    roots = np.roots([1.0, -1.0, -4.0, 2.0])
    expected = np.min(roots.real) + 2.0
    assert born_oppenheimer_upol(1.0, 1.0) == pytest.approx(expected, abs=1e-12)
    assert born_oppenheimer_upol(2.0, 3.0) == pytest.approx(
        3.0 * born_oppenheimer_upol(2.0 / 3.0, 1.0), rel=1e-12
    )


def test_tavis_cummings_block():
    assert build_tavis_cummings_block(5, 0, 1.0).shape == (1, 1)
    for L in (2, 7, 30):
        evals = np.linalg.eigvalsh(build_tavis_cummings_block(L, 1, 1.0))
        assert np.allclose(evals, [-1.0, 1.0])
    with pytest.raises(ConfigError):
        build_tavis_cummings_block(3, 4, 1.0)
    # Small-density law at quarter filling: per-particle blueshift within
    # the O(rho^2) correction of (Omega/4) rho.
    block = np.linalg.eigvalsh(build_tavis_cummings_block(36, 9, 1.0))
    blueshift = block[0] / 9 + 1.0
    rho = 0.25
    assert abs(blueshift - 0.25 * rho) < rho**2


def test_ladder_vs_effective_model_small_J():
    for U in (1.0, 1e4):
        p = ModelParams(L=6, N=2, J=0.01, U=U, boundary="periodic", cap_photon=2, cap_exciton=2)
        H = build_ladder_hamiltonian(p, sector_basis(p))
        e_full = lanczos_ground_state(H, tol=1e-12).energy
        chain = single_species_basis(6, 2)
        H_eff = build_polariton_hamiltonian(p, born_oppenheimer_upol(U, 1.0), chain)
        e_eff = lanczos_ground_state(H_eff, tol=1e-12).energy
        assert abs(e_full - e_eff) / p.N < 1e-3


def test_annihilation_and_creation_maps():
    p = ModelParams(L=3, N=2, J=0.3, U=0.5, boundary="open")
    basis = sector_basis(p)
    lower = sector_basis(p.with_excitations(1))
    for species in ("photon", "exciton"):
        for site in range(3):
            a = annihilation_map(basis, lower, species, site)
            adag = creation_map(lower, basis, species, site)
            assert abs(adag - a.T).max() == 0.0
            # a^+ a acting within the N=2 sector counts the occupation.
            number = (a.T @ a).diagonal()
            col = site if species == "photon" else 3 + site
            assert np.allclose(number, basis.occupations[:, col])


def test_open_boundary_keeps_photon_band_bottom_at_zero():
    # The +2J diagonal runs over every site even for OBC, so the N=1
    # photon-only block (Omega -> 0 limit not representable; use tiny
    # Omega) has all eigenvalues >= ~0.
    p = ModelParams(L=5, N=1, J=1.0, Omega=1e-8, boundary="open")
    H = build_ladder_hamiltonian(p, sector_basis(p)).toarray()
    evals = np.linalg.eigvalsh(H)
    assert evals.min() > -1e-6
