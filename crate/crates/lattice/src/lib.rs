//! Exact free-fermion engine for the hopping and critical Majorana chains:
//! ground-state Nambu correlation matrices, Gaussian-operator algebra, charged
//! moments with flux insertions on B, charge statistics, post-measurement
//! overlaps, and a many-body oracle for chains of at most 12 sites.

mod correlation;
mod ed;
mod gaussian;
mod model;
mod moments;

pub use correlation::{
    bdg_hamiltonian, finite_chain_correlations, ground_state_correlations, infinite_chain_correlations,
    ring_correlations, NambuCorrelationMatrix, CLIP,
};
pub use ed::{ed_gaussian_trace, ed_oracle, EdOracle, EdOrdering, EdRequest, EdSolver, EdValue, MAX_SITES};
pub use gaussian::{gaussian_trace, track_log_dets};
pub use model::{LatticeModel, Preset, SubsystemLayout};
pub use moments::{
    charged_moments_lattice, entanglement_hamiltonian, flux_correlation_matrix, ising_gamma_rescaling,
    post_measurement_overlap, renyi_entropy, FluxData, LatticeState, RescalingConvention, ResolvedEntropies, Route,
    SECTOR_FLOOR,
};
