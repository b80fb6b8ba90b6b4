"""Number-conserving occupation bases for capped bosonic modes.

The ladder Hilbert space is spanned by occupation states of 2L bosonic
modes (L photon modes followed by L exciton modes), restricted to a fixed
total excitation number N and per-species occupation caps.  States are
ordered lexicographically on the concatenated count vector, which makes
matrix layouts reproducible across runs.

Ranking and unranking use counting tables ("how many ways can the
remaining modes absorb the remaining excitations"), so no hash map over
states is needed and ranks of whole batches of states can be computed
with vectorized table lookups.  This is what makes sparse-Hamiltonian
assembly fast at dimensions of ~10^6.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Sequence

import numpy as np

from .errors import CapacityError, DimensionLimitError, StateNotFoundError

#: Default hard limit on basis dimension (guards accidental huge sectors).
DEFAULT_MAX_DIMENSION = 6_000_000

_INT64_MAX = np.iinfo(np.int64).max


def capped_multiset_count(modes: int, total: int, cap: int) -> int:
    """Number of length-`modes` integer vectors with entries in [0, cap] summing to `total`.

    Inclusion-exclusion over the modes that exceed the cap (capped
    stars-and-bars).  Exact integer arithmetic.
    """
    if total < 0 or modes < 0:
        return 0
    if modes == 0:
        return 1 if total == 0 else 0
    count = 0
    for k in range(modes + 1):
        rem = total - k * (cap + 1)
        if rem < 0:
            break
        term = math.comb(modes, k) * math.comb(rem + modes - 1, modes - 1)
        count += term if k % 2 == 0 else -term
    return count


def sector_dimension(
    L: int,
    N: int,
    cap_photon: int | None = None,
    cap_exciton: int | None = None,
) -> int:
    """Dimension of the (L, N) two-species sector, by per-species convolution.

    ``None`` caps mean unbounded (equivalent to ``cap = N``).  This is an
    independent combinatorial count; `FockBasis` recomputes the dimension
    from its completion tables and the two must agree.
    """
    if L < 1:
        raise CapacityError(f"need at least one rung, got L={L}")
    if N < 0:
        raise CapacityError(f"negative excitation number N={N}")
    cp = N if cap_photon is None else cap_photon
    cx = N if cap_exciton is None else cap_exciton
    dim = sum(
        capped_multiset_count(L, s, cp) * capped_multiset_count(L, N - s, cx)
        for s in range(N + 1)
    )
    if dim > _INT64_MAX:
        raise DimensionLimitError(
            f"sector dimension {dim} exceeds the representable index range"
        )
    return dim


@dataclass(frozen=True)
class OccupationState:
    """One basis state of the ladder: per-rung photon and exciton counts."""

    photon_counts: tuple[int, ...]
    exciton_counts: tuple[int, ...]

    @property
    def total(self) -> int:
        return sum(self.photon_counts) + sum(self.exciton_counts)

    def as_array(self) -> np.ndarray:
        return np.array(self.photon_counts + self.exciton_counts, dtype=np.int64)


class ModeBasis:
    """Ordered occupation basis of bosonic modes with per-mode caps.

    States are all vectors ``n`` with ``0 <= n[i] <= caps[i]`` and
    ``sum(n) == total``, in lexicographic order.  Immutable after
    construction; shared concurrent reads are safe.
    """

    def __init__(
        self,
        caps: Sequence[int],
        total: int,
        max_dim: int = DEFAULT_MAX_DIMENSION,
    ):
        caps_arr = np.asarray(caps, dtype=np.int64)
        if caps_arr.ndim != 1 or caps_arr.size == 0:
            raise CapacityError("caps must be a non-empty 1D sequence")
        if np.any(caps_arr < 0):
            raise CapacityError("negative occupation cap")
        if total < 0:
            raise CapacityError(f"negative total excitation number {total}")
        if int(caps_arr.sum()) < total:
            raise CapacityError(
                f"empty sector: caps admit at most {int(caps_arr.sum())} "
                f"excitations, requested {total}"
            )
        self.caps = caps_arr
        self.caps.setflags(write=False)
        self.total = int(total)
        self.num_modes = int(caps_arr.size)

        # Completion counts W[i][n]: number of ways modes i.. can hold n
        # excitations.  Exact Python ints, then int64 for vectorized lookups.
        M, N = self.num_modes, self.total
        W = [[0] * (N + 1) for _ in range(M + 1)]
        W[M][0] = 1
        for i in range(M - 1, -1, -1):
            ci = int(caps_arr[i])
            for n in range(N + 1):
                W[i][n] = sum(W[i + 1][n - c] for c in range(min(ci, n) + 1))
        dim = W[0][N]
        if dim > max_dim:
            raise DimensionLimitError(
                f"basis dimension {dim} exceeds the configured limit {max_dim}"
            )
        if max(max(row) for row in W) > _INT64_MAX:  # pragma: no cover
            raise DimensionLimitError("completion counts exceed int64 range")
        self.dim = int(dim)
        self._W = np.array(W, dtype=np.int64)
        # Cumulative tables: _CW[i, n+1] = sum_{m<=n} W[i][m], _CW[i, 0] = 0.
        self._CW = np.zeros((M + 1, N + 2), dtype=np.int64)
        np.cumsum(self._W, axis=1, out=self._CW[:, 1:])
        self.occupations = self._enumerate()
        self.occupations.setflags(write=False)

    def _enumerate(self) -> np.ndarray:
        """All states in lexicographic order, shape (dim, num_modes), uint8."""
        M, N = self.num_modes, self.total
        if np.any(self.caps > 255):
            raise DimensionLimitError("per-mode caps above 255 are not supported")
        occ = np.zeros((1, 0), dtype=np.uint8)
        rem = np.array([N], dtype=np.int64)
        for i in range(M):
            cmax = int(min(self.caps[i], N))
            cs = np.arange(cmax + 1, dtype=np.int64)
            rem_after = rem[:, None] - cs[None, :]
            ok = rem_after >= 0
            ok &= self._W[i + 1, np.clip(rem_after, 0, N)] > 0
            rows, cols = np.nonzero(ok)  # row-major scan preserves lex order
            occ = np.concatenate(
                [occ[rows], cs[cols, None].astype(np.uint8)], axis=1
            )
            rem = rem_after[rows, cols]
        assert occ.shape == (self.dim, M)
        return occ

    def rank_array(self, occs: np.ndarray) -> np.ndarray:
        """Ranks of a batch of valid occupation vectors, shape (b, num_modes).

        No validation: callers must supply states inside the sector.
        """
        occs = np.asarray(occs, dtype=np.int64)
        squeeze = occs.ndim == 1
        if squeeze:
            occs = occs[None, :]
        # Remaining excitations before consuming mode i.
        nb = (self.total - np.cumsum(occs, axis=1)) + occs
        na = nb - occs
        i_idx = np.arange(1, self.num_modes + 1)
        ranks = (self._CW[i_idx, nb + 1] - self._CW[i_idx, na + 1]).sum(axis=1)
        return ranks[0] if squeeze else ranks

    def rank(self, occ: Sequence[int]) -> int:
        """Rank of one occupation vector; raises StateNotFoundError if invalid."""
        arr = np.asarray(occ, dtype=np.int64)
        if arr.shape != (self.num_modes,):
            raise StateNotFoundError(
                f"expected {self.num_modes} modes, got shape {arr.shape}"
            )
        if np.any(arr < 0) or np.any(arr > self.caps) or arr.sum() != self.total:
            raise StateNotFoundError(f"state {arr.tolist()} outside the sector")
        return int(self.rank_array(arr))

    def unrank(self, ordinal: int) -> np.ndarray:
        """Occupation vector with the given rank."""
        if not 0 <= ordinal < self.dim:
            raise StateNotFoundError(
                f"ordinal {ordinal} outside [0, {self.dim})"
            )
        r = int(ordinal)
        n_rem = self.total
        out = np.zeros(self.num_modes, dtype=np.int64)
        for i in range(self.num_modes):
            c = 0
            # States with count < c at mode i (same prefix) precede rank r.
            while True:
                block = int(self._W[i + 1, n_rem - c]) if n_rem - c >= 0 else 0
                if r < block:
                    break
                r -= block
                c += 1
            out[i] = c
            n_rem -= c
        return out


class FockBasis(ModeBasis):
    """Two-species (photon, exciton) sector basis on L rungs.

    Modes 0..L-1 hold photon counts, modes L..2L-1 exciton counts.
    ``cap_exciton = 1`` realizes the hard-core exciton limit.
    """

    def __init__(
        self,
        L: int,
        N: int,
        cap_photon: int,
        cap_exciton: int,
        max_dim: int = DEFAULT_MAX_DIMENSION,
    ):
        if L < 1:
            raise CapacityError(f"need at least one rung, got L={L}")
        super().__init__([cap_photon] * L + [cap_exciton] * L, N, max_dim=max_dim)
        self.L = L
        self.N = N
        self.cap_photon = cap_photon
        self.cap_exciton = cap_exciton

    @property
    def photon_occupations(self) -> np.ndarray:
        """View (dim, L) of photon counts."""
        return self.occupations[:, : self.L]

    @property
    def exciton_occupations(self) -> np.ndarray:
        """View (dim, L) of exciton counts."""
        return self.occupations[:, self.L :]

    def state(self, ordinal: int) -> OccupationState:
        vec = self.unrank(ordinal)
        return OccupationState(
            tuple(int(v) for v in vec[: self.L]),
            tuple(int(v) for v in vec[self.L :]),
        )

    @property
    def states(self) -> list[OccupationState]:
        """Materialized ordered list of states (O(dim * L); intended for small sectors)."""
        occ = self.occupations
        return [
            OccupationState(
                tuple(int(v) for v in row[: self.L]),
                tuple(int(v) for v in row[self.L :]),
            )
            for row in occ
        ]

    def index(self, state: OccupationState) -> int:
        """Ordinal of an OccupationState (inverse of `state`)."""
        if len(state.photon_counts) != self.L or len(state.exciton_counts) != self.L:
            raise StateNotFoundError("state has wrong number of rungs")
        return self.rank(state.photon_counts + state.exciton_counts)


def enumerate_basis(
    L: int,
    N: int,
    cap_photon: int | None = None,
    cap_exciton: int | None = None,
    max_dim: int = DEFAULT_MAX_DIMENSION,
) -> FockBasis:
    """Build the full (L, N) sector basis.

    ``None`` caps are unbounded (cap = N).  Raises CapacityError for an
    empty sector and DimensionLimitError when the dimension exceeds
    ``max_dim``.
    """
    cp = N if cap_photon is None else cap_photon
    cx = N if cap_exciton is None else cap_exciton
    if N > 0 and (cp < 1 or cx < 1):
        raise CapacityError("occupation caps must be at least 1")
    return FockBasis(L, N, cp, cx, max_dim=max_dim)


def single_species_basis(
    L: int,
    N: int,
    cap: int | None = None,
    max_dim: int = DEFAULT_MAX_DIMENSION,
) -> ModeBasis:
    """Basis for one boson flavor on L sites (used by the effective chain)."""
    c = N if cap is None else cap
    if N > 0 and c < 1:
        raise CapacityError("occupation cap must be at least 1")
    return ModeBasis([c] * L, N, max_dim=max_dim)
