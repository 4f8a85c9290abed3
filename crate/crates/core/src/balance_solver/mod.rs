//! Test solutions of `∂_t u + div f(u) = g` on periodic boxes.

mod data;
mod manufactured;
mod scheme;

pub use data::{InitialData, Mode, SolverConfig, Source};
pub use manufactured::{manufactured, Manufactured};
pub use scheme::{solve, EngquistOsher};
