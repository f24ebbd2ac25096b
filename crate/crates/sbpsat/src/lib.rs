//! Summation-by-parts finite differences with SAT interface coupling for the
//! two-dimensional wave equation on non-conforming, curvilinear multiblock grids.

pub mod analysis;
pub mod assembly;
pub mod cli;
pub mod coupling;
pub mod dense;
pub mod exact;
pub mod geometry;
pub mod interp;
pub mod report;
pub mod sbp;
pub mod scalar;
pub mod sparse;
pub mod timestep;

pub use scalar::{Field, Real};

pub type SbpSetF64 = sbp::SbpSet<f64>;
pub type VariableD2F64 = sbp::VariableD2<f64>;
