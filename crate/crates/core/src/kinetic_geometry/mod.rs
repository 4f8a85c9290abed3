//! Kinetic quantities on sampled solutions: the indicator χ, super-level and
//! hypograph measures, free transport of sets, and the transport estimate.

mod estimate;
mod grid;
mod measures;
mod recon;
mod sat;
mod transport;

pub use estimate::{verify_transport_estimate, TransportCheck};
pub use grid::{GridSolution, GridSpec, SliceSummary, SolutionManifest, RANGE_TOL};
pub use measures::{
    chi, hypograph_measure, mean_value_level, mean_value_levels, region_volume, superlevel_measure, Geometry,
    KineticBox,
};
pub use recon::Reconstruction;
pub use sat::BoxIntegrator;
pub use transport::{free_transport, KineticField, Transported};

pub(crate) use measures::ball_cells;
