//! Dense complex linear algebra: LU, nonsymmetric eigenvalues, Hermitian
//! eigenvalues and singular value summaries.

mod eigen;
mod hermitian;
mod lu;
mod matrix;
mod svd;

pub use eigen::{eigenvalues, eigenvalues_with, SpectrumResult, DEFAULT_TOL};
pub use hermitian::hermitian_eigenvalues;
pub use lu::{lu_logdet, LogDet, Lu};
pub use matrix::CMatrix;
pub(crate) use matrix::vec_norm;
pub use svd::{
    least_singular_value, singular_values, spectral_norm, spectral_norm_detailed, NormEstimate, SvdSummary,
    POWER_ITERATION_CAP,
};
