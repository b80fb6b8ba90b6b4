"""Eigensolvers and static observables on exact-diagonalization states.

States are plain complex/real amplitude vectors over a `FockBasis`.
Densities, g2 correlators and their building blocks are diagonal in the
occupation basis, so expectation values reduce to weighted sums over
basis occupancies.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np
import scipy.linalg as sla
import scipy.sparse as sp

from .basis import FockBasis
from .errors import ConfigError, ConvergenceError, DimensionLimitError

#: Below this dimension the ground state is found densely.
_DENSE_CUTOFF = 32

#: Two lowest Ritz values closer than this trigger the degeneracy flag.
DEGENERACY_GAP = 1e-8


@dataclass
class GroundStateResult:
    """Lowest eigenpair of a sparse Hermitian operator."""

    energy: float
    state: np.ndarray
    residual_norm: float
    iterations: int
    degenerate: bool = False


@dataclass
class CorrelationResult:
    """Normalized two-body correlator g2(j, j0) over all sites j."""

    kind: str
    reference_site: int
    values: np.ndarray
    normalization_density: float


def lanczos_ground_state(
    H: sp.spmatrix,
    tol: float = 1e-9,
    max_iter: int = 5000,
    seed: int = 0,
    block_size: int | None = None,
) -> GroundStateResult:
    """Lowest eigenpair by restarted Lanczos with full reorthogonalization.

    Deterministic for a given seed (fixed random start vector).  Each
    cycle builds up to `block_size` Krylov vectors, reorthogonalizing
    twice against all of them, then restarts from the best Ritz vector;
    `max_iter` bounds the total number of matrix-vector products.
    Convergence is declared on the explicit residual ||Hv - Ev|| <= tol.
    The default block size shrinks with dimension to bound the memory
    held in stored Krylov vectors.
    """
    n = H.shape[0]
    if n < 1:
        raise DimensionLimitError("operator has dimension 0")
    if block_size is None:
        block_size = 384 if n <= 20_000 else (128 if n <= 200_000 else 64)
    if n <= _DENSE_CUTOFF:
        w, v = np.linalg.eigh(H.toarray() if sp.issparse(H) else np.asarray(H))
        state = v[:, 0]
        resid = float(np.linalg.norm(H @ state - w[0] * state))
        gap = w[1] - w[0] if n > 1 else np.inf
        return GroundStateResult(
            energy=float(w[0]),
            state=state,
            residual_norm=resid,
            iterations=0,
            degenerate=bool(gap < DEGENERACY_GAP),
        )

    rng = np.random.default_rng(seed)
    v = rng.standard_normal(n)
    v /= np.linalg.norm(v)
    total_iters = 0
    best_resid = np.inf
    energy = np.inf
    degenerate = False

    while total_iters < max_iter:
        m = min(block_size, n, max_iter - total_iters + 1)
        V = np.empty((m, n))
        alphas = np.empty(m)
        betas = np.empty(max(m - 1, 0))
        V[0] = v
        k_built = 0
        for k in range(m):
            w = H @ V[k]
            total_iters += 1
            alphas[k] = np.dot(V[k], w)
            w -= alphas[k] * V[k]
            if k > 0:
                w -= betas[k - 1] * V[k - 1]
            # Full reorthogonalization, two passes for numerical safety.
            for _ in range(2):
                w -= V[: k + 1].T @ (V[: k + 1] @ w)
            k_built = k + 1
            if k + 1 == m:
                break
            beta = np.linalg.norm(w)
            if beta < 1e-14:
                break  # invariant subspace reached
            betas[k] = beta
            V[k + 1] = w / beta

        theta, y = sla.eigh_tridiagonal(
            alphas[:k_built], betas[: max(k_built - 1, 0)]
        )
        v = V[:k_built].T @ y[:, 0]
        v /= np.linalg.norm(v)
        energy = float(theta[0])
        if k_built > 1:
            degenerate = bool(theta[1] - theta[0] < DEGENERACY_GAP)
        resid = float(np.linalg.norm(H @ v - energy * v))
        best_resid = min(best_resid, resid)
        if resid <= tol:
            return GroundStateResult(
                energy=energy,
                state=v,
                residual_norm=resid,
                iterations=total_iters,
                degenerate=degenerate,
            )

    raise ConvergenceError(
        f"Lanczos did not reach residual {tol:g} within {max_iter} "
        f"matrix-vector products (best residual {best_resid:.3e})"
    )


def photonic_fraction(state: np.ndarray, basis: FockBasis) -> float:
    """Photon share of the excitations, sum_j <a_j^+ a_j> / N."""
    if basis.N == 0:
        return 0.0
    weights = np.abs(np.asarray(state)) ** 2
    n_ph = weights @ basis.photon_occupations.sum(axis=1)
    return float(n_ph / basis.N)


def occupation_profile(state: np.ndarray, basis: FockBasis, kind: str) -> np.ndarray:
    """Per-site densities <n_j> for one species ('photon' or 'exciton')."""
    occ = _species_occ(basis, kind)
    weights = np.abs(np.asarray(state)) ** 2
    return weights @ occ


def _species_occ(basis: FockBasis, kind: str) -> np.ndarray:
    if kind == "photon":
        return basis.photon_occupations.astype(np.float64)
    if kind == "exciton":
        return basis.exciton_occupations.astype(np.float64)
    raise ConfigError(f"kind must be 'photon' or 'exciton', got {kind!r}")


def g2(
    state: np.ndarray, basis: FockBasis, kind: str = "photon", j0: int | None = None
) -> CorrelationResult:
    """Normalized pair correlator g2(j, j0) = <b_j^+ b_j0^+ b_j0 b_j> / rho^2.

    rho = N/L is the average total density.  The same-site value uses
    <n (n - 1)>; the normal ordering makes every entry non-negative.
    """
    L = basis.L
    if j0 is None:
        j0 = L // 2
    if not 0 <= j0 < L:
        raise ConfigError(f"j0 must lie in [0, {L}), got {j0}")
    occ = _species_occ(basis, kind)
    weights = np.abs(np.asarray(state)) ** 2
    ref = occ[:, j0]
    values = (weights * ref) @ occ  # <n_j n_j0>
    values[j0] = weights @ (ref * (ref - 1.0))  # normal-ordered same site
    rho = basis.N / L
    if rho == 0:
        raise ConfigError("g2 needs at least one excitation")
    return CorrelationResult(
        kind=kind,
        reference_site=j0,
        values=values / rho**2,
        normalization_density=rho,
    )


def density_density(
    state: np.ndarray, basis: FockBasis, kind: str = "photon", j0: int | None = None
) -> np.ndarray:
    """Raw <n_j n_j0> correlations (no normal ordering, no normalization)."""
    L = basis.L
    if j0 is None:
        j0 = L // 2
    occ = _species_occ(basis, kind)
    weights = np.abs(np.asarray(state)) ** 2
    return (weights * occ[:, j0]) @ occ


def von_neumann_entropy(
    state: np.ndarray,
    basis: FockBasis,
    partition: str = "light_matter",
    cut_site: int | None = None,
    dense_limit: int = 50_000_000,
) -> float:
    """Entanglement entropy (nats) across a bipartition of the ladder.

    ``light_matter`` keeps all photon modes and traces out the excitons.
    ``left_right`` keeps rungs 0..cut_site-1 (photon and exciton) and
    traces out the rest.  Computed from the Schmidt decomposition of the
    amplitude matrix.
    """
    L = basis.L
    if partition == "light_matter":
        left_cols = list(range(L))
    elif partition == "left_right":
        if cut_site is None or not 1 <= cut_site <= L - 1:
            raise ConfigError(
                f"left_right partition needs cut_site in [1, {L - 1}], got {cut_site}"
            )
        left_cols = list(range(cut_site)) + [L + j for j in range(cut_site)]
    else:
        raise ConfigError(
            f"partition must be 'light_matter' or 'left_right', got {partition!r}"
        )
    right_cols = [c for c in range(2 * L) if c not in left_cols]
    occ = basis.occupations
    _, rinv = np.unique(occ[:, left_cols], axis=0, return_inverse=True)
    _, cinv = np.unique(occ[:, right_cols], axis=0, return_inverse=True)
    n_rows = int(rinv.max()) + 1
    n_cols = int(cinv.max()) + 1
    if n_rows * n_cols > dense_limit:
        raise DimensionLimitError(
            f"dense amplitude matrix {n_rows} x {n_cols} exceeds the limit"
        )
    amp = np.asarray(state)
    mat = np.zeros((n_rows, n_cols), dtype=amp.dtype)
    mat[rinv, cinv] = amp
    svals = np.linalg.svd(mat, compute_uv=False)
    return schmidt_entropy(svals)


def schmidt_entropy(schmidt_values: np.ndarray) -> float:
    """-sum s^2 log s^2 over Schmidt values (zeros dropped)."""
    p = np.asarray(schmidt_values, dtype=float) ** 2
    p = p[p > 1e-14]
    return float(-(p * np.log(p)).sum())


def dense_spectrum(
    H, dense_limit: int = 4096
) -> tuple[np.ndarray, np.ndarray]:
    """Full Hermitian eigendecomposition (ascending eigenvalues).

    Accepts a sparse or dense matrix; refuses dimensions above
    `dense_limit`.
    """
    n = H.shape[0]
    if n > dense_limit:
        raise DimensionLimitError(
            f"dimension {n} exceeds the dense limit {dense_limit}"
        )
    mat = H.toarray() if sp.issparse(H) else np.asarray(H)
    return np.linalg.eigh(mat)
