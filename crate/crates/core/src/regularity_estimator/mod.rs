//! The oscillation functional `h_r`, exponent fits, Hölder constants and the
//! exponent bootstrap.

mod bootstrap;
mod holder;
mod oscillation;

pub use bootstrap::{
    bootstrap_iterate, bootstrap_map, corollary_constants, holder_constant, holder_constant_report, ExponentSchedule,
    HolderConstantReport, TheoryConstants, Variant, MAX_ITERATIONS,
};
pub use holder::{empirical_holder, MIN_PAIRS};
pub use oscillation::{h_r, oscillation_profile, oscillation_profiles, OscillationProfile, RESOLUTION_FLOOR};
