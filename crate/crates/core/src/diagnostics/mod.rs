//! Primitive variables and audits of a converged stream function.

mod checks;
mod fields;
mod mirror;
mod streamline;

pub use checks::{
    bernoulli_identity, energy_norms, farfield_decay, positivity_and_kutta, vorticity_check, BernoulliCheck,
    DecayRow, DecayTable, PositivityReport, VorticityCheck,
};
pub use fields::{cells_to_nodes, nodal_gradient, primitives, stream_gradient, write_field_csv, PrimitiveFields};
pub use mirror::{mirror_symmetric_body, MirroredFields};
pub use streamline::{default_seeds, trace_streamline, Streamline, StreamlineEnd};
