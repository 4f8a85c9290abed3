//! Numerical laboratory for Hölder regularity of continuous solutions of
//! multi-dimensional scalar balance laws `u_t + div f(u) = g`.

pub mod balance_solver;
pub mod cli;
pub mod error;
pub mod flux_model;
pub mod kinetic_geometry;
pub mod matrix_decomp;
pub mod poly;
pub mod regularity_estimator;
pub mod stats;
pub mod verify;

pub use error::{Error, Result};
pub use flux_model::{FluxKind, FluxModel, FluxSpec, NonlinearityReport, SpanningCheck};
