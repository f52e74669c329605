//! Generalized arithmetic progressions: enumeration, properness, dilation,
//! dispersion, ε-nets, lacunary bases, level sets and weak elements.

mod lacunary;
mod progression;
mod survey;

pub use lacunary::{lacunary_basis, lacunary_basis_with, LacunaryBasis, DEFAULT_LACUNARY_CONSTANT};
pub use progression::{
    dilate, dispersion, enumerate, epsilon_net, is_proper, pigeonhole_check, Gap, GapPoints, DEFAULT_ENUM_CAP,
    FLOAT_DEDUP_TOL, MAX_EXACT_DENOMINATOR,
};
pub use survey::{
    forward_lo_experiment, in_level_set, level_set_measure, weak_element_survey, ForwardLo, LevelSetEstimate,
    WeakSurvey, MAX_FORWARD_TUPLE, MIN_LEVEL_SET_SAMPLES,
};
