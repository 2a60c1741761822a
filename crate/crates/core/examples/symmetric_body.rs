//! Reflection of a bump solve across the axis: flow past the body |x2| <= f(x1), written as CSV.

use bumpflow::diagnostics::{mirror_symmetric_body, primitives};
use bumpflow::solver::picard_solve;
use bumpflow::{GasLaw, Mesh, ProblemSetup, SolverConfig, UpstreamProfile, WallShape};

fn main() -> bumpflow::Result<()> {
    let gas = GasLaw::new(2.0)?;
    let profile = UpstreamProfile::convex_decay(1.0, 1.0, 1.0)?;
    let mesh = Mesh::build(&WallShape::smooth_bump(0.5)?, 8.0, 4.0, 64, 32)?;
    let setup = ProblemSetup::new(gas, &profile, 64.0, mesh, SolverConfig::default())?;
    let (state, _) = picard_solve(&setup, &setup.default_init())?;
    let body = mirror_symmetric_body(setup.mesh(), &state.psi, &primitives(&setup, &state));
    eprintln!("{} rows, mass flux across the channel {:.4}", body.rows, body.mass_flux());
    body.write_csv(&mut std::io::stdout().lock())
}
