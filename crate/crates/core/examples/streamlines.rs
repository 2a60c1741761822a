//! Streamlines of a bump solve: Bernoulli and vorticity-to-density ratio transported along each.

use bumpflow::diagnostics::{bernoulli_identity, default_seeds, primitives, trace_streamline, vorticity_check};
use bumpflow::solver::picard_solve;
use bumpflow::{GasLaw, Mesh, ProblemSetup, SolverConfig, UpstreamProfile, WallShape};

fn main() -> bumpflow::Result<()> {
    let gas = GasLaw::new(2.0)?;
    let profile = UpstreamProfile::convex_decay(1.0, 1.0, 1.0)?;
    let mesh = Mesh::build(&WallShape::smooth_bump(0.25)?, 8.0, 4.0, 256, 128)?;
    let setup = ProblemSetup::new(gas, &profile, 64.0, mesh, SolverConfig::default())?;
    let (state, _) = picard_solve(&setup, &setup.default_init())?;
    let fields = primitives(&setup, &state);

    let b = bernoulli_identity(&setup, &state, &fields);
    let w = vorticity_check(&setup, &state, &fields);
    println!("Bernoulli identity relative error {:.2e}", b.relative());
    println!("vorticity formula median relative error {:.2e} over {} nodes", w.median_rel, w.nodes);
    for seed in default_seeds(setup.mesh()) {
        let line = trace_streamline(setup.mesh(), &state.psi, &fields, seed);
        println!(
            "seed x2 = {:.3}: {:4} points, {:?}, drifts B {:.1e} omega/rho {:.1e}",
            seed[1],
            line.points.len(),
            line.end,
            line.bernoulli_drift(),
            line.vorticity_drift()
        );
    }
    Ok(())
}
