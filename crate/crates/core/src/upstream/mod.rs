//! Incoming shear profile, its nozzle truncation, the streamline coordinate and
//! memory term, and the subsonic cutoff.

mod profile;
mod spline;
mod truncated;
mod zeta;

pub use profile::{Hypotheses, ProfileKind, UpstreamProfile};
pub(crate) use profile::read_two_column_csv;
pub use spline::CubicSpline;
pub use truncated::{TruncatedProfile, TABLE_INTERVALS};
pub use zeta::Cutoff;
