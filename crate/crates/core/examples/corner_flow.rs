//! Bump with corners at its feet: speed at the corners under mesh refinement.

use bumpflow::diagnostics::{positivity_and_kutta, primitives};
use bumpflow::solver::picard_solve;
use bumpflow::{GasLaw, Mesh, ProblemSetup, SolverConfig, UpstreamProfile, WallShape};

fn main() -> bumpflow::Result<()> {
    let gas = GasLaw::new(2.0)?;
    let profile = UpstreamProfile::convex_decay(1.0, 1.0, 1.0)?;
    let wall = WallShape::corner_bump(0.25)?;
    let mut prev: Option<(Mesh, Vec<f64>)> = None;
    for n in [64, 128, 256] {
        let mesh = Mesh::build(&wall, 8.0, 4.0, n, n / 2)?;
        let setup = ProblemSetup::new(gas, &profile, 128.0, mesh, SolverConfig::default())?;
        let init = match &prev {
            Some((m, psi)) => m.transfer(psi, setup.mesh()),
            None => setup.default_init(),
        };
        let (state, report) = picard_solve(&setup, &init)?;
        let p = positivity_and_kutta(&setup, &primitives(&setup, &state));
        println!(
            "{:>3} x {:<3}: M_ratio {:.3}, min interior u {:.4}, corner speeds {:.4?}",
            n,
            n / 2,
            report.m_ratio,
            p.min_interior_u,
            p.corner_speeds
        );
        prev = Some((setup.mesh().clone(), state.psi));
    }
    Ok(())
}
