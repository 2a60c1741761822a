//! Flat wall: the uniform flow is reproduced exactly and a sheared flow converges at second order.

use bumpflow::analysis::{grid_convergence, Reference};
use bumpflow::solver::picard_solve;
use bumpflow::{GasLaw, Mesh, ProblemSetup, SolverConfig, UpstreamProfile, WallShape};

fn main() -> bumpflow::Result<()> {
    let gas = GasLaw::new(2.0)?;
    let mesh = Mesh::build(&WallShape::flat(), 8.0, 8.0, 128, 64)?;
    let uniform = ProblemSetup::new(gas, &UpstreamProfile::constant(1.0)?, 20.0, mesh, SolverConfig::default())?;
    let (state, report) = picard_solve(&uniform, &uniform.default_init())?;
    let m = uniform.mesh();
    let err = (0..m.node_count())
        .map(|k| {
            let (i, j) = m.node_ij(k);
            (state.psi[k] - 20.0 * m.position(i, j).1).abs()
        })
        .fold(0.0, f64::max);
    println!("uniform flow: {} iterations, max |psi - rho0 x2| = {err:.2e}", report.iterations);

    let mesh = Mesh::build(&WallShape::flat(), 8.0, 4.0, 32, 16)?;
    let sheared =
        ProblemSetup::new(gas, &UpstreamProfile::convex_decay(1.0, 1.0, 1.0)?, 64.0, mesh, SolverConfig::default())?;
    let tp = sheared.tprofile().clone();
    let exact = move |_: f64, x2: f64| tp.barpsi(x2).unwrap();
    let study = grid_convergence(&sheared, 3, Reference::Exact(&exact))?;
    for ((nx, ny), e) in study.meshes.iter().zip(&study.errors) {
        println!("sheared flow {nx:>3} x {ny:<3}: max error {e:.4e}");
    }
    println!("observed order {:.3}", study.order().unwrap_or(f64::NAN));
    Ok(())
}
