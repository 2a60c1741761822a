//! Picard iteration for the truncated stream-function problem and its subsonic certificate.

mod linear;
mod picard;
mod setup;

pub use linear::{dot, linear_solve, LinearReport, LinearSystem, StencilMatrix};
pub use picard::{
    assemble, assemble_frozen, cell_fields, certify, check_bounds, picard_iterate, picard_solve, BoundViolations,
    CellFields, Certificate, FlowState, SolveReport,
};
pub use setup::{ProblemSetup, SolverConfig};

#[cfg(test)]
mod tests;
