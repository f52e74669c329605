//! Statistics of spectra: the ESD and the uniform disk law, their distance and
//! characteristic functions, the Hermitised spectrum `ν_n`, and the
//! trace-moment estimator.

mod disk;
mod esd;
mod hermitized;
mod moments;

pub use disk::{char_fn_disk, uniform_disk_cdf, DISK_QUADRATURE_NODES};
pub use esd::{
    cdf, char_fn_empirical, esd_of_cmatrix, esd_of_matrix, esd_scale, sup_distance, Esd, GridSpec, MAX_JUMP_COORDS,
};
pub use hermitized::{
    eps_n, g_n_fd, log_integral, log_integral_split, nu_esd, second_moment_check, LogSplit, NuEsd,
    SecondMomentCheck,
};
pub use moments::{trace_moment_estimate, TraceMoment};
