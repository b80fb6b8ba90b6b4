import math

import numpy as np
import pytest
import scipy.sparse as sp

from polariton_ladder.analytic import blueshift_per_particle, tg_energy_discrete
from polariton_ladder.errors import ConfigError, ConvergenceError, DimensionLimitError
from polariton_ladder.exact import (
    dense_spectrum,
    density_density,
    g2,
    lanczos_ground_state,
    photonic_fraction,
    schmidt_entropy,
    von_neumann_entropy,
)
from polariton_ladder.model import (
    ModelParams,
    annihilation_map,
    build_ladder_hamiltonian,
    build_tavis_cummings_block,
    sector_basis,
)


def _ground(params, tol=1e-10):
    basis = sector_basis(params)
    H = build_ladder_hamiltonian(params, basis)
    return lanczos_ground_state(H, tol=tol), basis


def test_lanczos_rung_block():
    H = sp.csr_matrix(np.array([[0.0, -1.0], [-1.0, 0.0]]))
    res = lanczos_ground_state(H)
    assert res.energy == pytest.approx(-1.0, abs=1e-12)
    assert abs(np.linalg.norm(res.state) - 1.0) < 1e-12


def test_lanczos_matches_dense_minimum():
    rng = np.random.default_rng(3)
    mat = rng.standard_normal((120, 120))
    mat = 0.5 * (mat + mat.T)
    H = sp.csr_matrix(mat)
    res = lanczos_ground_state(H, tol=1e-11)
    evals, _ = dense_spectrum(H)
    assert res.energy == pytest.approx(evals[0], abs=1e-9)
    assert res.residual_norm <= 1e-11
    # Variational: never below the true minimum, never above any diagonal entry.
    assert res.energy >= evals[0] - 1e-9
    assert res.energy <= mat.diagonal().min() + 1e-12


def test_lanczos_deterministic():
    p = ModelParams(L=5, N=2, J=0.3, U=0.8, boundary="open")
    basis = sector_basis(p)
    H = build_ladder_hamiltonian(p, basis)
    r1 = lanczos_ground_state(H, seed=11)
    r2 = lanczos_ground_state(H, seed=11)
    assert r1.energy == r2.energy
    assert np.array_equal(r1.state, r2.state)
    assert r1.iterations == r2.iterations


def test_lanczos_non_convergence_error():
    rng = np.random.default_rng(0)
    mat = rng.standard_normal((300, 300))
    H = sp.csr_matrix(0.5 * (mat + mat.T))
    with pytest.raises(ConvergenceError):
        lanczos_ground_state(H, tol=1e-14, max_iter=8)


def test_lanczos_tg_and_tc_limits():
    # Hard-core regime: kinetic sea energy on the ring.
    p = ModelParams(L=8, N=3, J=1e-3, U=1e4)
    res, _ = _ground(p)
    e_tg = tg_energy_discrete(3, 8, p.J / 2)
    assert abs(res.energy - e_tg) <= 1e-2 * p.J
    # Collective regime: Dicke-block value at large hopping.
    p_tc = ModelParams(L=8, N=3, J=1e3, U=1e4)
    res_tc, _ = _ground(p_tc, tol=1e-8)
    e_tc = np.linalg.eigvalsh(build_tavis_cummings_block(8, 3, 1.0))[0]
    bs_ed = blueshift_per_particle(res_tc.energy, 3)
    bs_tc = blueshift_per_particle(e_tc, 3)
    assert abs(bs_ed - bs_tc) <= 0.02 * abs(bs_tc)


def test_photonic_fraction_single_rung_and_large_J():
    p = ModelParams(L=1, N=1, J=0.0, boundary="open")
    res, basis = _ground(p)
    assert photonic_fraction(res.state, basis) == pytest.approx(0.5, abs=1e-12)
    # Small J, bulk: Hopfield weight stays near one half.
    p2 = ModelParams(L=6, N=2, J=0.05, U=1.0, boundary="open")
    res2, basis2 = _ground(p2)
    assert photonic_fraction(res2.state, basis2) == pytest.approx(0.5, abs=0.02)
    # Large J with open boundaries: photons are expelled.
    p3 = ModelParams(L=8, N=3, J=1e3, U=1.0, boundary="open")
    res3, basis3 = _ground(p3, tol=1e-8)
    assert photonic_fraction(res3.state, basis3) < 0.05


def test_g2_single_particle_is_zero():
    p = ModelParams(L=4, N=1, J=0.2, boundary="open")
    res, basis = _ground(p)
    assert np.allclose(g2(res.state, basis, "photon").values, 0.0)
    assert np.allclose(g2(res.state, basis, "exciton").values, 0.0)


def test_g2_blockade_dip_and_plateau():
    p = ModelParams(L=12, N=3, J=0.01, U=1.0, boundary="open")
    res, basis = _ground(p)
    corr = g2(res.state, basis, "photon", j0=6)
    assert np.all(corr.values >= 0.0)
    assert corr.values[6] < 0.05  # impenetrable polaritons barely coincide
    # Friedel oscillations are strong at this size; averaging over one
    # 2k_F period (4 sites at quarter filling) recovers the 1/4 plateau.
    period_mean = corr.values[1:5].mean()
    assert abs(period_mean - 0.25) < 0.1
    # Excitonic correlator mirrors the photonic one in the fermionized regime.
    corr_x = g2(res.state, basis, "exciton", j0=6)
    assert corr_x.values[6] < 0.05


def test_g2_symmetry_under_site_exchange():
    p = ModelParams(L=5, N=2, J=0.4, U=0.7, boundary="open")
    res, basis = _ground(p)
    for a, b in [(0, 3), (1, 4), (2, 3)]:
        ga = g2(res.state, basis, "photon", j0=a).values[b]
        gb = g2(res.state, basis, "photon", j0=b).values[a]
        assert ga == pytest.approx(gb, abs=1e-12)


def test_g2_two_routes_agree():
    # Diagonal density route against explicit double annihilation:
    # <a_j^+ a_k^+ a_k a_j> = || a_k a_j |psi> ||^2.
    p = ModelParams(L=4, N=2, J=0.5, U=0.9, boundary="open")
    res, basis = _ground(p)
    mid = sector_basis(p.with_excitations(1))
    bottom = sector_basis(p.with_excitations(0))
    rho2 = (p.N / p.L) ** 2
    for j0 in range(4):
        direct = g2(res.state, basis, "photon", j0).values
        for j in range(4):
            a_j = annihilation_map(basis, mid, "photon", j)
            a_k = annihilation_map(mid, bottom, "photon", j0)
            amp = np.linalg.norm(a_k @ (a_j @ res.state)) ** 2
            assert direct[j] == pytest.approx(amp / rho2, abs=1e-10)
    # Density-density route ("performing the commutator").
    for j0 in range(4):
        nn = density_density(res.state, basis, "photon", j0)
        dens = np.abs(res.state) ** 2 @ basis.photon_occupations
        commutator = nn.copy()
        commutator[j0] -= dens[j0]
        assert np.allclose(commutator / rho2, g2(res.state, basis, "photon", j0).values)


def test_entropy_product_state_is_zero():
    basis = sector_basis(ModelParams(L=3, N=2, J=0.1, boundary="open"))
    vec = np.zeros(basis.dim)
    vec[basis.rank([1, 1, 0, 0, 0, 0])] = 1.0  # photons only, one per rung
    assert von_neumann_entropy(vec, basis, "light_matter") == pytest.approx(0.0, abs=1e-12)
    assert von_neumann_entropy(vec, basis, "left_right", cut_site=1) == pytest.approx(
        0.0, abs=1e-12
    )


def test_entropy_single_rung_ln2():
    p = ModelParams(L=1, N=1, J=0.0, boundary="open")
    res, basis = _ground(p)
    assert von_neumann_entropy(res.state, basis, "light_matter") == pytest.approx(
        math.log(2), abs=1e-10
    )


def test_entropy_same_from_both_subsystems():
    p = ModelParams(L=4, N=2, J=0.6, U=0.5, boundary="open")
    res, basis = _ground(p)
    s = von_neumann_entropy(res.state, basis, "left_right", cut_site=2)
    # Recompute from dense reduced density matrices on both sides.
    occ = basis.occupations
    left_cols = [0, 1, 4, 5]
    right_cols = [2, 3, 6, 7]
    _, rinv = np.unique(occ[:, left_cols], axis=0, return_inverse=True)
    _, cinv = np.unique(occ[:, right_cols], axis=0, return_inverse=True)
    mat = np.zeros((rinv.max() + 1, cinv.max() + 1))
    mat[rinv, cinv] = res.state
    for rho in (mat @ mat.T, mat.T @ mat):
        evals = np.linalg.eigvalsh(rho)
        evals = evals[evals > 1e-14]
        assert -np.sum(evals * np.log(evals)) == pytest.approx(s, abs=1e-10)
    bound = math.log(min(mat.shape))
    assert 0.0 <= s <= bound + 1e-12


def test_entropy_partition_validation():
    p = ModelParams(L=4, N=1, J=0.1, boundary="open")
    res, basis = _ground(p)
    with pytest.raises(ConfigError):
        von_neumann_entropy(res.state, basis, "left_right")  # cut_site missing
    with pytest.raises(ConfigError):
        von_neumann_entropy(res.state, basis, "diagonal")
    with pytest.raises(DimensionLimitError):
        von_neumann_entropy(res.state, basis, "light_matter", dense_limit=2)


def test_entropy_trends_with_hopping():
    # Hard-core ladder: light-matter entanglement dies at large J (OBC),
    # left-right entanglement stays finite.
    values = {}
    for j_val in (0.1, 1e3):
        p = ModelParams(L=6, N=2, J=j_val, U=math.inf, boundary="open")
        res, basis = _ground(p, tol=1e-9)
        values[j_val] = (
            von_neumann_entropy(res.state, basis, "light_matter"),
            von_neumann_entropy(res.state, basis, "left_right", cut_site=3),
        )
    assert values[1e3][0] < 0.05 < values[0.1][0] + 1.0
    assert values[1e3][0] < values[0.1][0]
    assert values[1e3][1] > 0.05


def test_dense_spectrum():
    H = np.array([[0.0, -1.0], [-1.0, 0.0]])
    evals, evecs = dense_spectrum(H)
    assert np.allclose(evals, [-1.0, 1.0])
    g = math.sqrt(2.0)
    h_bo = np.array([[0.0, -g, 0.0], [-g, 0.0, -g], [0.0, -g, 1.0]])
    evals_bo, _ = dense_spectrum(h_bo)
    assert evals_bo[0] == pytest.approx(-1.8136, abs=1e-3)
    assert evals_bo.sum() == pytest.approx(np.trace(h_bo), abs=1e-10)
    with pytest.raises(DimensionLimitError):
        dense_spectrum(np.eye(10), dense_limit=5)


def test_lanczos_energy_matches_dense_on_ladder():
    p = ModelParams(L=5, N=2, J=0.7, U=1.3, boundary="periodic")
    basis = sector_basis(p)
    H = build_ladder_hamiltonian(p, basis)
    evals, _ = dense_spectrum(H)
    res = lanczos_ground_state(H, tol=1e-11)
    assert res.energy == pytest.approx(evals[0], abs=1e-9)
    trace = H.diagonal().sum()
    assert evals.sum() == pytest.approx(trace, rel=1e-12, abs=1e-10)


def test_blueshift_finite_size_trend():
    # Quarter filling, open boundaries: successive size steps shrink.
    shifts = []
    for L, n in ((4, 1), (8, 2), (12, 3)):
        p = ModelParams(L=L, N=n, J=0.1, U=1.0, boundary="open", cap_photon=2, cap_exciton=2)
        res, _ = _ground(p, tol=1e-10)
        shifts.append(blueshift_per_particle(res.energy, n))
    assert abs(shifts[2] - shifts[1]) < abs(shifts[1] - shifts[0])


def test_schmidt_entropy_helper():
    assert schmidt_entropy(np.array([1.0])) == pytest.approx(0.0)
    s = np.array([1.0, 1.0]) / math.sqrt(2.0)
    assert schmidt_entropy(s) == pytest.approx(math.log(2))
