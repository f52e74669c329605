//! Entry laws, moment hypotheses and reproducible random matrix sampling.

mod atom;
mod control;
mod matrix;
pub mod seed;

pub use atom::{AtomDistribution, Moments};
pub(crate) use atom::INTERNAL_MC_SEED;
pub use control::{
    check_controlled_moment, check_controlled_moment_with, controlled_moment_grid, default_grid,
    find_phase_rotation, find_phase_rotation_with, log_grid_axis, truncate_normalize, ControlOptions,
    ControlReport, PhaseRotation, MAX_KAPPA_EXPONENT,
};
pub use matrix::{sample_matrix, sample_sparse_matrix, Descriptor, MatrixSample, SparseSpec};
pub use seed::{derive_seed, trial_seed, SplitMix64};
