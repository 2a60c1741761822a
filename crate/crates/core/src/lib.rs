//! Subsonic rotational flow of a polytropic gas past a wall bump, computed through
//! the stream-function formulation on a truncated, body-fitted domain.

pub mod analysis;
pub mod cli;
pub mod config;
pub mod continuation;
pub mod diagnostics;
pub mod error;
pub mod farfield;
pub mod gas;
pub mod geometry;
pub mod quad;
pub mod solver;
pub mod upstream;

pub use error::{Error, Result};
pub use farfield::{FarfieldTriple, TripleReport};
pub use gas::{BernoulliEnvelope, GasLaw};
pub use geometry::{Mesh, WallShape};
pub use solver::{FlowState, ProblemSetup, SolveReport, SolverConfig};
pub use upstream::{Cutoff, TruncatedProfile, UpstreamProfile};
