"""Hamiltonian builders for the photon-exciton ladder and its limits.

All energies are in units of the Rabi coupling (Omega = 1 by convention).
The full ladder Hamiltonian on L rungs is

    H = sum_j [ omega_X x_j^+ x_j
                - J (a_j^+ a_{j+1} + a_{j+1}^+ a_j - 2 a_j^+ a_j)
                - Omega (x_j^+ a_j + a_j^+ x_j)
                + (U/2) x_j^+ x_j^+ x_j x_j ]

with photon operators a_j and exciton operators x_j.  The +2J a_j^+ a_j
diagonal keeps the photon band bottom at zero; it is applied on every
site also for open boundaries, while the hopping itself then runs over
j = 0..L-2 only.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, replace

import numpy as np
import scipy.sparse as sp

from .basis import FockBasis, ModeBasis, enumerate_basis, single_species_basis
from .errors import ConfigError

#: Sparse Hermitian operator representation used throughout the package.
SparseOperator = sp.csr_matrix

_DEFAULT_CAP = 5


@dataclass(frozen=True)
class ModelParams:
    """Physical couplings and geometry of one simulation sector.

    ``U = math.inf`` selects hard-core excitons: the on-site repulsion
    term is dropped and the exciton cap is forced to one, which realizes
    the two-level-emitter limit without floating-point overflow.
    """

    L: int
    N: int
    J: float
    Omega: float = 1.0
    U: float = 0.0
    omega_X: float = 0.0
    ell: float = 1.0
    boundary: str = "periodic"
    cap_photon: int | None = None
    cap_exciton: int | None = None

    def __post_init__(self):
        if self.L < 1:
            raise ConfigError(f"L must be >= 1, got {self.L}")
        if self.N < 0:
            raise ConfigError(f"N must be >= 0, got {self.N}")
        if self.J < 0:
            raise ConfigError(f"J must be >= 0, got {self.J}")
        if not self.Omega > 0:
            raise ConfigError(f"Omega must be > 0, got {self.Omega}")
        if not (self.U >= 0 or math.isinf(self.U)):
            raise ConfigError(f"U must be >= 0 or inf, got {self.U}")
        if self.boundary not in ("periodic", "open"):
            raise ConfigError(f"boundary must be 'periodic' or 'open', got {self.boundary!r}")
        if self.boundary == "periodic" and self.L < 3:
            raise ConfigError("periodic boundary needs L >= 3")
        if self.ell <= 0:
            raise ConfigError(f"ell must be > 0, got {self.ell}")
        if self.hard_core and self.cap_exciton not in (None, 1):
            raise ConfigError("hard-core excitons (U = inf) require cap_exciton = 1")

    @property
    def hard_core(self) -> bool:
        return math.isinf(self.U)

    @property
    def resolved_cap_photon(self) -> int:
        if self.cap_photon is not None:
            return self.cap_photon
        return max(1, min(self.N, _DEFAULT_CAP))

    @property
    def resolved_cap_exciton(self) -> int:
        if self.hard_core:
            return 1
        if self.cap_exciton is not None:
            return self.cap_exciton
        return max(1, min(self.N, _DEFAULT_CAP))

    @property
    def density(self) -> float:
        return self.N / self.L

    def with_excitations(self, n: int) -> "ModelParams":
        """Same couplings and caps, different excitation number (for N+-1 sectors)."""
        return replace(
            self,
            N=n,
            cap_photon=self.resolved_cap_photon,
            cap_exciton=self.resolved_cap_exciton,
        )


def sector_basis(params: ModelParams, max_dim: int | None = None) -> FockBasis:
    """Fock basis of the sector described by `params` (resolved caps)."""
    kwargs = {} if max_dim is None else {"max_dim": max_dim}
    return enumerate_basis(
        params.L,
        params.N,
        params.resolved_cap_photon,
        params.resolved_cap_exciton,
        **kwargs,
    )


def _check_basis(params: ModelParams, basis: FockBasis):
    if (
        basis.L != params.L
        or basis.N != params.N
        or basis.cap_photon != params.resolved_cap_photon
        or basis.cap_exciton != params.resolved_cap_exciton
    ):
        raise ConfigError("basis does not match params (L, N, or caps differ)")


def _bonds(L: int, boundary: str) -> list[tuple[int, int]]:
    bonds = [(j, j + 1) for j in range(L - 1)]
    if boundary == "periodic":
        bonds.append((L - 1, 0))
    return bonds


def _directed_hop(basis: ModeBasis, src: int, dst: int, amp: float, rows, cols, vals):
    """Append COO entries of amp * b_dst^+ b_src to the running lists."""
    occ = basis.occupations
    n_src = occ[:, src].astype(np.int64)
    n_dst = occ[:, dst].astype(np.int64)
    idx = np.nonzero((n_src >= 1) & (n_dst < basis.caps[dst]))[0]
    if idx.size == 0:
        return
    new = occ[idx].astype(np.int64)
    new[:, src] -= 1
    new[:, dst] += 1
    rows.append(basis.rank_array(new))
    cols.append(idx)
    vals.append(amp * np.sqrt(n_src[idx] * (n_dst[idx] + 1.0)))


def _assemble(dim: int, diag, rows, cols, vals) -> SparseOperator:
    rows.append(np.arange(dim, dtype=np.int64))
    cols.append(np.arange(dim, dtype=np.int64))
    vals.append(np.asarray(diag, dtype=np.float64))
    mat = sp.coo_matrix(
        (np.concatenate(vals), (np.concatenate(rows), np.concatenate(cols))),
        shape=(dim, dim),
    )
    return mat.tocsr()


def build_ladder_hamiltonian(params: ModelParams, basis: FockBasis) -> SparseOperator:
    """Sparse Hamiltonian of the full ladder in the given sector basis.

    Hermitian and number-conserving by construction; real float64.
    """
    _check_basis(params, basis)
    L = params.L
    ph = basis.photon_occupations.astype(np.int64)
    ex = basis.exciton_occupations.astype(np.int64)

    diag = params.omega_X * ex.sum(axis=1) + 2.0 * params.J * ph.sum(axis=1)
    if not params.hard_core and params.U != 0.0:
        diag = diag + 0.5 * params.U * (ex * (ex - 1)).sum(axis=1)

    rows, cols, vals = [], [], []
    for (j, k) in _bonds(L, params.boundary):
        _directed_hop(basis, k, j, -params.J, rows, cols, vals)  # a_j^+ a_k
        _directed_hop(basis, j, k, -params.J, rows, cols, vals)  # a_k^+ a_j
    for j in range(L):
        _directed_hop(basis, j, L + j, -params.Omega, rows, cols, vals)  # x_j^+ a_j
        _directed_hop(basis, L + j, j, -params.Omega, rows, cols, vals)  # a_j^+ x_j
    return _assemble(basis.dim, diag, rows, cols, vals)


def build_polariton_hamiltonian(
    params: ModelParams, U_pol: float, basis: ModeBasis
) -> SparseOperator:
    """Effective lower-polariton chain Hamiltonian.

    H_pol = -J_pol sum_j (b_j^+ b_{j+1} + h.c.)
            + (2 J_pol - Omega) sum_j b_j^+ b_j
            + (U_pol / 2) sum_j b_j^+ b_j^+ b_j b_j

    with J_pol = J / 2 (half the photon hopping, from the 50% photonic
    weight of the lower polariton at zero detuning).
    """
    if basis.num_modes != params.L:
        raise ConfigError("single-species basis does not match params.L")
    if basis.total != params.N:
        raise ConfigError("single-species basis does not match params.N")
    J_pol = params.J / 2.0
    occ = basis.occupations.astype(np.int64)
    diag = (2.0 * J_pol - params.Omega) * occ.sum(axis=1)
    diag = diag + 0.5 * U_pol * (occ * (occ - 1)).sum(axis=1)
    rows, cols, vals = [], [], []
    for (j, k) in _bonds(params.L, params.boundary):
        _directed_hop(basis, k, j, -J_pol, rows, cols, vals)
        _directed_hop(basis, j, k, -J_pol, rows, cols, vals)
    return _assemble(basis.dim, diag, rows, cols, vals)


def born_oppenheimer_upol(U: float, Omega: float) -> float:
    """Effective polariton-polariton interaction from the two-body problem.

    Diagonalizes the zero-hopping two-excitation block on one rung in the
    basis (|2 ph>, |1 ph 1 X>, |2 X>),

        [[0,          -sqrt(2) Omega, 0],
         [-sqrt(2) Omega, 0,          -sqrt(2) Omega],
         [0,          -sqrt(2) Omega, U]]

    and returns the lowest eigenvalue measured from the non-interacting
    two-polariton energy -2 Omega.  Limits: U -> 0 gives U/4, U -> inf
    gives (2 - sqrt(2)) Omega.
    """
    if not Omega > 0:
        raise ConfigError(f"Omega must be > 0, got {Omega}")
    if math.isinf(U):
        return (2.0 - math.sqrt(2.0)) * Omega
    if U < 0:
        raise ConfigError(f"U must be >= 0 or inf, got {U}")
    g = math.sqrt(2.0) * Omega
    h_bo = np.array([[0.0, -g, 0.0], [-g, 0.0, -g], [0.0, -g, U]])
    e_bo = np.linalg.eigvalsh(h_bo)[0]
    return float(e_bo + 2.0 * Omega)


def build_tavis_cummings_block(L: int, N: int, Omega: float) -> np.ndarray:
    """Maximal-spin Dicke block of the Tavis-Cummings Hamiltonian.

    H_TC = -(Omega / sqrt(L)) (a_0^+ S_- + S_+ a_0) restricted to the
    N-excitation subspace with total spin S = L/2, in the basis
    |n_ph = N - m> (x) |S_z = -L/2 + m>, m = 0..N.  Returns the dense
    (N+1) x (N+1) symmetric tridiagonal matrix.
    """
    if N > L:
        raise ConfigError(f"TC block needs N <= L, got N={N}, L={L}")
    if N < 0 or L < 1:
        raise ConfigError("TC block needs L >= 1 and N >= 0")
    m = np.arange(N)
    # <m+1| S_+ a_0 |m>: photon sqrt(N - m), spin raising sqrt((m+1)(L-m)).
    off = -(Omega / math.sqrt(L)) * np.sqrt((N - m) * (m + 1.0) * (L - m))
    h = np.zeros((N + 1, N + 1))
    h[m, m + 1] = off
    h[m + 1, m] = off
    return h


def annihilation_map(
    basis_from: FockBasis, basis_to: FockBasis, species: str, site: int
) -> sp.csr_matrix:
    """Rectangular matrix of a_site (or x_site) from sector N to sector N-1.

    Both bases must share L and caps; `basis_to` holds one excitation less.
    """
    if species not in ("photon", "exciton"):
        raise ConfigError(f"species must be 'photon' or 'exciton', got {species!r}")
    if basis_to.N != basis_from.N - 1 or basis_to.L != basis_from.L:
        raise ConfigError("annihilation map needs target sector N-1 on the same rungs")
    if (basis_to.cap_photon, basis_to.cap_exciton) != (
        basis_from.cap_photon,
        basis_from.cap_exciton,
    ):
        raise ConfigError("annihilation map needs identical caps in both sectors")
    col = site if species == "photon" else basis_from.L + site
    occ = basis_from.occupations
    n = occ[:, col].astype(np.int64)
    idx = np.nonzero(n >= 1)[0]
    new = occ[idx].astype(np.int64)
    new[:, col] -= 1
    rows = basis_to.rank_array(new)
    return sp.csr_matrix(
        (np.sqrt(n[idx].astype(np.float64)), (rows, idx)),
        shape=(basis_to.dim, basis_from.dim),
    )


def creation_map(
    basis_from: FockBasis, basis_to: FockBasis, species: str, site: int
) -> sp.csr_matrix:
    """Rectangular matrix of a_site^+ (or x_site^+) from sector N to N+1.

    Amplitudes that would exceed the occupation cap are projected out,
    consistently with the truncated Hilbert space.
    """
    return annihilation_map(basis_to, basis_from, species, site).T.tocsr()
