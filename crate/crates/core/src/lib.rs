//! Random matrix spectral laboratory: entry laws and sampling, dense complex
//! linear algebra, spectral statistics, small-ball and Littlewood–Offord
//! machinery, least-singular-value experiments and the experiment pipeline.

pub mod ensembles;
pub mod error;
pub mod linalg;

pub use error::{Error, Result};
pub use num_complex::Complex64;
pub mod quadrature;
pub mod spectral;
pub mod stats;
pub mod smallball;
pub mod gap;
pub mod inverse_lo;
pub mod lsv;
pub mod pipeline;
