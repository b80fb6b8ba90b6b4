"""Many-body toolkit for a 1D lattice of photon modes Rabi-coupled to excitons.

Ground states by exact diagonalization (Lanczos) and DMRG, closed-form
limiting energies, pair correlations, entanglement entropies, and
spectral responses (dynamic structure factor, resonant photon response),
with a CLI that drives reproducible parameter scans.
"""

__version__ = "0.1.0"

from .analytic import (
    LindhardBand,
    blueshift_per_particle,
    bogoliubov_energy,
    crossover_coupling,
    lindhard_support,
    lindhard_support_curve,
    tc_energy_small_rho,
    tg_energy_continuum,
    tg_energy_discrete,
)
from .basis import (
    FockBasis,
    ModeBasis,
    OccupationState,
    capped_multiset_count,
    enumerate_basis,
    sector_dimension,
    single_species_basis,
)
from .errors import (
    CapacityError,
    ConfigError,
    ConvergenceError,
    DimensionLimitError,
    LadderError,
    StateNotFoundError,
)
from .exact import (
    CorrelationResult,
    GroundStateResult,
    dense_spectrum,
    g2,
    lanczos_ground_state,
    photonic_fraction,
    von_neumann_entropy,
)
from .model import (
    ModelParams,
    SparseOperator,
    annihilation_map,
    born_oppenheimer_upol,
    build_ladder_hamiltonian,
    build_polariton_hamiltonian,
    build_tavis_cummings_block,
    creation_map,
    sector_basis,
)
from .mps import (
    MPSState,
    build_ladder_mpo,
    dmrg_ground_state,
    load_checkpoint,
    mps_bond_entropy,
    mps_measure_g2,
    mps_photonic_fraction,
    save_checkpoint,
)
from .spectra import (
    SpectralGrid,
    equal_time_structure,
    response_chi,
    structure_factor,
)

__all__ = [name for name in dir() if not name.startswith("_")]
