//! Small-ball and concentration probabilities of random walks `Σ v_i α_i`,
//! the characteristic function `f` and the α-norm.

mod ball;
mod concentration;
pub(crate) mod law;

pub use ball::{
    small_ball_prob, small_ball_prob_mc, walk_sample, Budget, CoeffTuple, EstimateMethod, ProbEstimate,
};
pub use concentration::{
    alpha_norm, char_fn_f, conc_prob, conc_prob_exact, conc_prob_fourier, conc_prob_fourier_with, conc_prob_mc,
    conc_prob_sampled, fourier_node_count, lazy_law, ConcMethod, DifferenceKernel, DEFAULT_RADIUS_CUTOFF, KERNEL_MC_SAMPLES,
    MAX_FOURIER_NODES,
};
pub use law::Atoms;
