"""Matrix-product-state ground states for chains beyond ED reach.

Each ladder rung (photon mode x exciton mode) is merged into one chain
site of local dimension (cap_photon + 1)(cap_exciton + 1), which keeps
every Hamiltonian term on-site or nearest-neighbor.  The Hamiltonian is
applied as an MPO of bond dimension 4, and the ground state is found by
two-site DMRG with open boundary conditions.

Total excitation number is conserved structurally: every virtual bond
carries an integer charge label (excitations to the left), two-site
updates are solved inside the charge-consistent subspace, and the
truncated SVD is performed block-by-block so charges never mix.  A
penalty-term fallback (no charge labels, H + lambda (N_tot - N)^2) is
available for debugging.
"""

from __future__ import annotations

import hashlib
import json
from dataclasses import dataclass, field

import numpy as np
import scipy.linalg as sla

from .errors import ConfigError, ConvergenceError, DimensionLimitError
from .exact import CorrelationResult, schmidt_entropy
from .model import ModelParams

#: Merged local dimensions above this are refused.
MAX_LOCAL_DIMENSION = 64

#: Penalty strength (units of Omega) for the debugging fallback.
PENALTY_LAMBDA = 10.0

_CHECKPOINT_MAGIC = b"PLMPS001"


def _boson_annihilation(cap: int) -> np.ndarray:
    a = np.zeros((cap + 1, cap + 1))
    n = np.arange(1, cap + 1)
    a[n - 1, n] = np.sqrt(n)
    return a


def local_space(cap_photon: int, cap_exciton: int):
    """Merged-rung operators: (photon annihilation, exciton annihilation, occupations)."""
    dp, dx = cap_photon + 1, cap_exciton + 1
    a = np.kron(_boson_annihilation(cap_photon), np.eye(dx))
    x = np.kron(np.eye(dp), _boson_annihilation(cap_exciton))
    n_ph = np.kron(np.diag(np.arange(dp, dtype=float)), np.eye(dx))
    n_x = np.kron(np.eye(dp), np.diag(np.arange(dx, dtype=float)))
    return a, x, n_ph, n_x


def build_ladder_mpo(params: ModelParams, penalty: bool = False) -> list[np.ndarray]:
    """MPO tensors (wl, wr, s_bra, s_ket) of the ladder on the merged chain.

    With ``penalty=True`` the operator is H + lambda (N_tot - N)^2,
    which needs one extra virtual channel for the long-range density-
    density part of the square.
    """
    if params.boundary != "open":
        raise ConfigError("the MPO chain is built for open boundaries")
    L = params.L
    if L < 2:
        raise ConfigError("the MPO chain needs L >= 2")
    cp, cx = params.resolved_cap_photon, params.resolved_cap_exciton
    d = (cp + 1) * (cx + 1)
    if d > MAX_LOCAL_DIMENSION:
        raise DimensionLimitError(
            f"merged local dimension {d} exceeds the limit {MAX_LOCAL_DIMENSION}"
        )
    a, x, n_ph, n_x = local_space(cp, cx)
    ident = np.eye(d)
    h_loc = (
        params.omega_X * n_x
        + 2.0 * params.J * n_ph
        - params.Omega * (x.T @ a + a.T @ x)
    )
    if not params.hard_core and params.U != 0.0:
        h_loc = h_loc + 0.5 * params.U * (n_x @ n_x - n_x)

    if not penalty:
        w_dim = 4
    else:
        w_dim = 5
        n_tot = n_ph + n_x
        lam = PENALTY_LAMBDA * params.Omega
        # (N_tot - N)^2 = sum_i n_i^2 + 2 sum_{i<j} n_i n_j - 2N sum_i n_i + N^2
        h_loc = h_loc + lam * (
            n_tot @ n_tot - 2.0 * params.N * n_tot + (params.N**2 / L) * ident
        )

    W = np.zeros((w_dim, w_dim, d, d))
    W[0, 0] = ident
    W[1, 0] = a
    W[2, 0] = a.T
    W[-1, 0] = h_loc
    W[-1, 1] = -params.J * a.T
    W[-1, 2] = -params.J * a
    W[-1, -1] = ident
    if penalty:
        W[3, 0] = n_tot
        W[-1, 3] = 2.0 * lam * n_tot
        W[3, 3] = ident

    first = W[-1:, :, :, :]
    last = W[:, :1, :, :]
    return [first] + [W] * (L - 2) + [last]


def mpo_to_dense(mpo: list[np.ndarray]) -> np.ndarray:
    """Contract an MPO to the full many-body matrix (testing at tiny L only)."""
    mat = mpo[0]  # (wl=1, wr, s', s)
    for W in mpo[1:]:
        mat = np.tensordot(mat, W, axes=([1], [0]))  # (1, s', s, wr, t', t)
        mat = mat.transpose(0, 3, 1, 4, 2, 5)
        s1 = mat.shape[2] * mat.shape[3]
        mat = mat.reshape(1, mat.shape[1], s1, mat.shape[4] * mat.shape[5])
    return mat[0, 0]


@dataclass
class MPSState:
    """Open-boundary MPS with per-bond charge labels (excitations to the left)."""

    tensors: list[np.ndarray]
    bond_charges: list[np.ndarray]
    cap_photon: int
    cap_exciton: int
    center: int | None = None

    @property
    def L(self) -> int:
        return len(self.tensors)

    @property
    def N(self) -> int:
        return int(self.bond_charges[-1][0])

    @property
    def bond_dims(self) -> list[int]:
        return [t.shape[2] for t in self.tensors[:-1]]

    @property
    def local_dim(self) -> int:
        return (self.cap_photon + 1) * (self.cap_exciton + 1)


def local_occupation_numbers(cap_photon: int, cap_exciton: int) -> np.ndarray:
    """Total excitation count of each merged local basis state."""
    dp, dx = cap_photon + 1, cap_exciton + 1
    return (np.arange(dp)[:, None] + np.arange(dx)[None, :]).reshape(-1)


def product_initial_state(params: ModelParams) -> MPSState:
    """Charge-definite product start: lower polaritons on evenly spaced rungs."""
    L, N = params.L, params.N
    if N > L:
        raise ConfigError("product start needs N <= L (one polariton per rung)")
    cp, cx = params.resolved_cap_photon, params.resolved_cap_exciton
    d = (cp + 1) * (cx + 1)
    occupied = set(int(round((i + 0.5) * L / N - 0.5)) for i in range(N)) if N else set()
    # Collisions from rounding: fill left-to-right deterministically.
    while len(occupied) < N:
        for j in range(L):
            if j not in occupied:
                occupied.add(j)
                break
    tensors = []
    charges = [np.array([0])]
    dx = cx + 1
    filled = 0
    for j in range(L):
        vec = np.zeros(d)
        if j in occupied:
            vec[1 * dx + 0] = 1.0 / np.sqrt(2.0)  # one photon
            vec[0 * dx + 1] = 1.0 / np.sqrt(2.0)  # one exciton
            filled += 1
        else:
            vec[0] = 1.0
        tensors.append(vec.reshape(1, d, 1))
        charges.append(np.array([filled]))
    return MPSState(
        tensors=tensors,
        bond_charges=charges,
        cap_photon=cp,
        cap_exciton=cx,
        center=0,
    )


# ---------------------------------------------------------------------------
# environments and the two-site effective problem

def _left_update(env, A, W):
    t = np.tensordot(env, A, axes=([2], [0]))        # (bb, w, s, rk)
    t = np.tensordot(t, W, axes=([1, 2], [0, 3]))    # (bb, rk, wr, s')
    out = np.tensordot(t, A.conj(), axes=([0, 3], [0, 1]))  # (rk, wr, rb)
    return out.transpose(2, 1, 0)                    # (rb, wr, rk)


def _right_update(env, A, W):
    t = np.tensordot(A, env, axes=([2], [2]))        # (lk, s, bb, w)
    t = np.tensordot(t, W, axes=([3, 1], [1, 3]))    # (lk, bb, wl, s')
    out = np.tensordot(t, A.conj(), axes=([1, 3], [2, 1]))  # (lk, wl, lb)
    return out.transpose(2, 1, 0)                    # (lb, wl, lk)


def _two_site_matvec(theta, le, w1, w2, re):
    t = np.tensordot(le, theta, axes=([2], [0]))     # (bb, w, s1, s2, br)
    t = np.tensordot(t, w1, axes=([1, 2], [0, 3]))   # (bb, s2, br, w, s1')
    t = np.tensordot(t, w2, axes=([3, 1], [0, 3]))   # (bb, br, s1', w, s2')
    t = np.tensordot(t, re, axes=([1, 3], [2, 1]))   # (bb, s1', s2', rb)
    return t


def _lanczos_lowest(matvec, v0, max_iter, tol):
    """Lowest Ritz pair by warm-started Lanczos with full reorthogonalization.

    The iteration stops on the cheap residual estimate beta * |y_last|;
    DMRG only needs each local solve to improve the wavefunction, so the
    cap `max_iter` bounds the work per bond.
    """
    size = v0.shape[0]
    m = min(max_iter, size)
    V = np.empty((m, size))
    alphas = np.empty(m)
    betas = np.empty(max(m - 1, 0))
    V[0] = v0 / np.linalg.norm(v0)
    theta = None
    y = None
    k_built = 1
    for k in range(m):
        w = matvec(V[k])
        alphas[k] = np.dot(V[k], w)
        w -= alphas[k] * V[k]
        if k > 0:
            w -= betas[k - 1] * V[k - 1]
        for _ in range(2):
            w -= V[: k + 1].T @ (V[: k + 1] @ w)
        k_built = k + 1
        beta = np.linalg.norm(w)
        theta, y = sla.eigh_tridiagonal(
            alphas[:k_built], betas[: k_built - 1], select="i", select_range=(0, 0)
        )
        if beta < 1e-14 or beta * abs(y[-1, 0]) < tol or k + 1 == m:
            break
        betas[k] = beta
        V[k + 1] = w / beta
    vec = V[:k_built].T @ y[:, 0]
    vec /= np.linalg.norm(vec)
    return float(theta[0]), vec


def _solve_two_site(theta0, le, w1, w2, re, flat_idx, tol=1e-11, max_iter=60):
    """Lowest eigenpair of the two-site effective Hamiltonian on the charge subspace."""
    shape = theta0.shape
    size = flat_idx.size

    def matvec(xp):
        theta = np.zeros(shape)
        theta.ravel()[flat_idx] = xp
        return _two_site_matvec(theta, le, w1, w2, re).ravel()[flat_idx]

    v0 = theta0.ravel()[flat_idx]
    norm0 = np.linalg.norm(v0)
    if norm0 < 1e-12:
        v0 = np.full(size, 1.0 / np.sqrt(size))

    if size == 1:
        energy = float(matvec(np.ones(1))[0])
        vec = np.ones(1)
    elif size <= 64:
        dense = np.empty((size, size))
        eye = np.eye(size)
        for k in range(size):
            dense[:, k] = matvec(eye[:, k])
        dense = 0.5 * (dense + dense.T)
        w, v = np.linalg.eigh(dense)
        energy, vec = float(w[0]), v[:, 0]
    else:
        energy, vec = _lanczos_lowest(matvec, v0, max_iter=max_iter, tol=tol)

    theta = np.zeros(shape)
    theta.ravel()[flat_idx] = vec
    return energy, theta


def _split_theta(theta, q_left, q_right, n_loc, chi_max, cutoff, to_right):
    """Charge-blockwise truncated SVD of a two-site wavefunction.

    Returns (A_left, A_right, new_bond_charges, discarded_weight); the
    singular values are attached to the side the sweep is moving toward.
    """
    chi_l, d1, d2, chi_r = theta.shape
    mat = theta.reshape(chi_l * d1, d2 * chi_r)
    q_row = (q_left[:, None] + n_loc[None, :]).reshape(-1)
    q_col = (q_right[None, :] - n_loc[:, None]).reshape(-1)

    blocks = []
    total_mass = 0.0
    for q in np.intersect1d(np.unique(q_row), np.unique(q_col)):
        rows = np.flatnonzero(q_row == q)
        cols = np.flatnonzero(q_col == q)
        sub = mat[np.ix_(rows, cols)]
        if not np.any(sub):
            continue
        u, s, vt = np.linalg.svd(sub, full_matrices=False)
        keep = s > 1e-15
        u, s, vt = u[:, keep], s[keep], vt[keep]
        total_mass += float((s**2).sum())
        blocks.append((q, rows, cols, u, s, vt))

    if not blocks:
        raise ConvergenceError("two-site wavefunction vanished during truncation")

    all_s = np.concatenate([b[4] for b in blocks])
    order = np.argsort(-all_s, kind="stable")
    sorted_sq = all_s[order] ** 2
    # Keep the largest values: at most chi_max, and discard at most
    # `cutoff` of the total weight from the tail.
    tail = np.cumsum(sorted_sq[::-1])[::-1]
    n_keep = int(np.searchsorted(-tail, -cutoff * total_mass))
    n_keep = max(1, min(chi_max, n_keep if n_keep > 0 else 1, all_s.size))
    kept_flags = np.zeros(all_s.size, dtype=bool)
    kept_flags[order[:n_keep]] = True

    kept_mass = float((all_s[kept_flags] ** 2).sum())
    discarded = 1.0 - kept_mass / total_mass
    scale = 1.0 / np.sqrt(kept_mass)

    new_left = np.zeros((chi_l * d1, n_keep))
    new_right = np.zeros((n_keep, d2 * chi_r))
    new_q = np.empty(n_keep, dtype=np.int64)
    col_at = 0
    offset = 0
    for q, rows, cols, u, s, vt in blocks:
        flags = kept_flags[offset : offset + s.size]
        offset += s.size
        k = int(flags.sum())
        if k == 0:
            continue
        sel = np.flatnonzero(flags)
        sk = s[sel] * scale
        if to_right:
            new_left[rows, col_at : col_at + k] = u[:, sel]
            new_right[col_at : col_at + k, cols] = sk[:, None] * vt[sel]
        else:
            new_left[rows, col_at : col_at + k] = u[:, sel] * sk[None, :]
            new_right[col_at : col_at + k, cols] = vt[sel]
        new_q[col_at : col_at + k] = q
        col_at += k

    A_left = new_left.reshape(chi_l, d1, n_keep)
    A_right = new_right.reshape(n_keep, d2, chi_r)
    return A_left, A_right, new_q, discarded


def dmrg_ground_state(
    params: ModelParams,
    chi_max: int = 64,
    n_sweeps: int = 10,
    truncation_cutoff: float = 1e-10,
    sweep_tol: float = 1e-9,
    conserve: str = "number",
    initial: MPSState | None = None,
    eig_tol: float = 1e-12,
) -> tuple[float, MPSState, dict]:
    """Two-site DMRG ground-state search on the merged-rung chain.

    Returns (energy, state, report).  The report carries per-sweep
    energies and maximum discarded weights plus a convergence flag; a
    run that has not reached `sweep_tol` energy change after `n_sweeps`
    is flagged, not raised.
    """
    if params.boundary != "open":
        raise ConfigError("DMRG supports open boundary conditions only")
    if conserve not in ("number", "penalty"):
        raise ConfigError(f"conserve must be 'number' or 'penalty', got {conserve!r}")
    L = params.L
    mpo = build_ladder_mpo(params, penalty=(conserve == "penalty"))
    cp, cx = params.resolved_cap_photon, params.resolved_cap_exciton
    n_loc = local_occupation_numbers(cp, cx)

    psi = initial if initial is not None else product_initial_state(params)
    if initial is not None:
        if psi.L != L or (psi.cap_photon, psi.cap_exciton) != (cp, cx):
            raise ConfigError("initial MPS does not match params (L or caps)")
        if psi.N != params.N:
            raise ConfigError("initial MPS carries the wrong excitation number")
    tensors = [t.copy() for t in psi.tensors]
    charges = [c.copy() for c in psi.bond_charges]

    left_envs = [None] * (L + 1)
    right_envs = [None] * (L + 1)
    left_envs[0] = np.ones((1, 1, 1))
    right_envs[L] = np.ones((1, 1, 1))
    for i in range(L - 1, 1, -1):
        right_envs[i] = _right_update(right_envs[i + 1], tensors[i], mpo[i])

    masked = conserve == "number"
    sweep_energies: list[float] = []
    max_discarded: list[float] = []
    energy = np.inf
    converged = False
    last_change = np.inf

    def solve_bond(i, to_right, chi_now, tol_now, iter_cap):
        nonlocal energy
        theta0 = np.tensordot(tensors[i], tensors[i + 1], axes=([2], [0]))
        if masked:
            mask = (
                charges[i][:, None, None, None]
                + n_loc[None, :, None, None]
                + n_loc[None, None, :, None]
                == charges[i + 2][None, None, None, :]
            )
            flat_idx = np.flatnonzero(mask)
        else:
            flat_idx = np.arange(theta0.size)
        energy, theta = _solve_two_site(
            theta0,
            left_envs[i],
            mpo[i],
            mpo[i + 1],
            right_envs[i + 2],
            flat_idx,
            tol=tol_now,
            max_iter=iter_cap,
        )
        a_l, a_r, q_mid, discarded = _split_theta(
            theta,
            charges[i],
            charges[i + 2],
            n_loc,
            chi_now,
            truncation_cutoff,
            to_right,
        )
        tensors[i], tensors[i + 1] = a_l, a_r
        charges[i + 1] = q_mid
        if to_right:
            left_envs[i + 1] = _left_update(left_envs[i], a_l, mpo[i])
        else:
            right_envs[i + 1] = _right_update(right_envs[i + 2], a_r, mpo[i + 1])
        return discarded

    for sweep in range(n_sweeps):
        # Ramp the bond dimension, solver accuracy and per-bond iteration
        # budget: early sweeps only rough out the state, later ones polish.
        chi_now = min(chi_max, 16 * 2**sweep)
        tol_now = max(eig_tol, 10.0 ** (-7 - 2 * sweep))
        iter_cap = (25, 35)[sweep] if sweep < 2 else 60
        sweep_discard = 0.0
        for i in range(L - 1):
            sweep_discard = max(sweep_discard, solve_bond(i, True, chi_now, tol_now, iter_cap))
        for i in range(L - 2, -1, -1):
            sweep_discard = max(sweep_discard, solve_bond(i, False, chi_now, tol_now, iter_cap))
        sweep_energies.append(energy)
        max_discarded.append(sweep_discard)
        if sweep > 0:
            last_change = abs(sweep_energies[-2] - energy)
            if last_change < sweep_tol and chi_now >= chi_max:
                converged = True
                break

    state = MPSState(
        tensors=tensors,
        bond_charges=charges,
        cap_photon=cp,
        cap_exciton=cx,
        center=0,
    )
    report = {
        "sweep_energies": sweep_energies,
        "max_discarded_weight": max_discarded,
        "n_sweeps_run": len(sweep_energies),
        "chi_max": chi_max,
        "truncation_cutoff": truncation_cutoff,
        "converged": converged,
        "final_energy_change": last_change,
        "conserve": conserve,
    }
    return energy, state, report


# ---------------------------------------------------------------------------
# measurements

def _transfer(env, A, op=None):
    t = np.tensordot(env, A, axes=([1], [0]))  # (bra, s, rk)
    if op is not None:
        t = np.tensordot(op, t, axes=([1], [1])).transpose(1, 0, 2)
    return np.tensordot(A.conj(), t, axes=([0, 1], [0, 1]))  # (rb, rk)


def mps_expectation(state: MPSState, ops: dict[int, np.ndarray]) -> float:
    """<psi| prod_site ops[site] |psi> / <psi|psi> for single-site operators."""
    env = np.ones((1, 1))
    norm = np.ones((1, 1))
    for j, A in enumerate(state.tensors):
        env = _transfer(env, A, ops.get(j))
        norm = _transfer(norm, A)
    return float(np.real(env[0, 0] / norm[0, 0]))


def mps_expectation_mpo(state: MPSState, mpo: list[np.ndarray]) -> float:
    """<psi| H |psi> / <psi|psi> for an MPO H."""
    env = np.ones((1, 1, 1))
    norm = np.ones((1, 1))
    for A, W in zip(state.tensors, mpo):
        env = _left_update(env, A, W)
        norm = _transfer(norm, A)
    return float(np.real(env[0, 0, 0] / norm[0, 0]))


def mps_densities(state: MPSState, kind: str = "photon") -> np.ndarray:
    """Per-site densities <n_j> of one species."""
    _, _, n_ph, n_x = local_space(state.cap_photon, state.cap_exciton)
    op = n_ph if kind == "photon" else n_x
    if kind not in ("photon", "exciton"):
        raise ConfigError(f"kind must be 'photon' or 'exciton', got {kind!r}")
    return np.array([mps_expectation(state, {j: op}) for j in range(state.L)])


def mps_photonic_fraction(state: MPSState) -> float:
    """Photon share of the excitations, sum_j <n_ph,j> / N."""
    if state.N == 0:
        return 0.0
    return float(mps_densities(state, "photon").sum() / state.N)


def mps_measure_g2(
    state: MPSState, kind: str = "photon", j0: int | None = None
) -> CorrelationResult:
    """Pair correlator g2(j, j0) with the same contract as the ED version."""
    if kind not in ("photon", "exciton"):
        raise ConfigError(f"kind must be 'photon' or 'exciton', got {kind!r}")
    L = state.L
    if j0 is None:
        j0 = L // 2
    if not 0 <= j0 < L:
        raise ConfigError(f"j0 must lie in [0, {L}), got {j0}")
    _, _, n_ph, n_x = local_space(state.cap_photon, state.cap_exciton)
    op = n_ph if kind == "photon" else n_x
    values = np.empty(L)
    for j in range(L):
        if j == j0:
            values[j] = mps_expectation(state, {j0: op @ op - op})
        else:
            values[j] = mps_expectation(state, {j: op, j0: op})
    rho = state.N / L
    if rho == 0:
        raise ConfigError("g2 needs at least one excitation")
    return CorrelationResult(
        kind=kind,
        reference_site=j0,
        values=values / rho**2,
        normalization_density=rho,
    )


def bond_schmidt_values(state: MPSState, bond: int) -> np.ndarray:
    """Schmidt values across the cut after site `bond - 1` (bond in 1..L-1)."""
    L = state.L
    if not 1 <= bond <= L - 1:
        raise ConfigError(f"bond must lie in [1, {L - 1}], got {bond}")
    tensors = [t.copy() for t in state.tensors]
    # Left-orthonormalize sites 0..bond-1, pushing the remainder right.
    carry = np.ones((1, 1))
    for i in range(bond):
        A = np.tensordot(carry, tensors[i], axes=([1], [0]))
        chi_l, d, chi_r = A.shape
        q, r = np.linalg.qr(A.reshape(chi_l * d, chi_r))
        carry = r
    left_carry = carry
    # Right-orthonormalize sites L-1..bond, pushing the remainder left.
    carry = np.ones((1, 1))
    for i in range(L - 1, bond - 1, -1):
        A = np.tensordot(tensors[i], carry, axes=([2], [0]))
        chi_l, d, chi_r = A.shape
        q, r = np.linalg.qr(A.reshape(chi_l, d * chi_r).T)
        carry = r.T
    center = left_carry @ carry
    s = np.linalg.svd(center, compute_uv=False)
    norm = np.linalg.norm(s)
    if norm == 0.0:
        raise ConvergenceError("MPS has zero norm")
    return s / norm


def mps_bond_entropy(state: MPSState, bond: int) -> float:
    """Von Neumann entropy (nats) of the left/right cut at `bond`."""
    return schmidt_entropy(bond_schmidt_values(state, bond))


# ---------------------------------------------------------------------------
# checkpointing

def dmrg_params_hash(params: ModelParams, chi_max: int, truncation_cutoff: float) -> str:
    """Stable hash of the physical and DMRG parameters, for resumable scans."""
    payload = {
        "L": params.L,
        "N": params.N,
        "J": params.J,
        "Omega": params.Omega,
        "U": "inf" if params.hard_core else params.U,
        "omega_X": params.omega_X,
        "boundary": params.boundary,
        "cap_photon": params.resolved_cap_photon,
        "cap_exciton": params.resolved_cap_exciton,
        "chi_max": chi_max,
        "truncation_cutoff": truncation_cutoff,
    }
    blob = json.dumps(payload, sort_keys=True).encode("utf-8")
    return hashlib.sha256(blob).hexdigest()


def save_checkpoint(state: MPSState, path, params_hash: str = "", energy: float | None = None):
    """Serialize an MPS to a binary container with a JSON header.

    Layout: 8-byte magic, uint64 little-endian header length, UTF-8 JSON
    header (shapes, bond charges, caps, hash), then the raw little-endian
    float64 tensor data in site order (C layout).
    """
    header = {
        "L": state.L,
        "N": state.N,
        "cap_photon": state.cap_photon,
        "cap_exciton": state.cap_exciton,
        "center": state.center,
        "shapes": [list(t.shape) for t in state.tensors],
        "bond_dims": state.bond_dims,
        "bond_charges": [c.tolist() for c in state.bond_charges],
        "dtype": "<f8",
        "params_hash": params_hash,
        "energy": energy,
    }
    blob = json.dumps(header, sort_keys=True).encode("utf-8")
    with open(path, "wb") as fh:
        fh.write(_CHECKPOINT_MAGIC)
        fh.write(np.uint64(len(blob)).tobytes())
        fh.write(blob)
        for t in state.tensors:
            fh.write(np.ascontiguousarray(t, dtype="<f8").tobytes())


def load_checkpoint(path) -> tuple[MPSState, dict]:
    """Load an MPS checkpoint; returns (state, header)."""
    with open(path, "rb") as fh:
        magic = fh.read(len(_CHECKPOINT_MAGIC))
        if magic != _CHECKPOINT_MAGIC:
            raise ConfigError(f"not an MPS checkpoint: {path}")
        (hlen,) = np.frombuffer(fh.read(8), dtype=np.uint64)
        header = json.loads(fh.read(int(hlen)).decode("utf-8"))
        tensors = []
        for shape in header["shapes"]:
            count = int(np.prod(shape))
            data = np.frombuffer(fh.read(count * 8), dtype="<f8")
            tensors.append(data.reshape(shape).copy())
    state = MPSState(
        tensors=tensors,
        bond_charges=[np.array(c, dtype=np.int64) for c in header["bond_charges"]],
        cap_photon=header["cap_photon"],
        cap_exciton=header["cap_exciton"],
        center=header["center"],
    )
    return state, header
