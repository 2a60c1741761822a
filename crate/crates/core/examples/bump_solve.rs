//! Flow of a convex upstream profile over a smooth bump: Picard solve, certificate and barrier bounds.

use std::time::Instant;

use bumpflow::farfield::FarfieldTriple;
use bumpflow::solver::{check_bounds, picard_solve};
use bumpflow::{GasLaw, Mesh, ProblemSetup, SolverConfig, UpstreamProfile, WallShape};

fn main() -> bumpflow::Result<()> {
    let gas = GasLaw::new(2.0)?;
    let profile = UpstreamProfile::convex_decay(1.0, 1.0, 1.0)?;
    let factor: f64 = std::env::args().nth(1).and_then(|a| a.parse().ok()).unwrap_or(4.0);
    let rho0 = factor * gas.rho_star(profile.max_speed());
    let wall = WallShape::smooth_bump(0.5)?;
    let mesh = Mesh::build(&wall, 8.0, 8.0, 256, 128)?;
    let setup = ProblemSetup::new(gas, &profile, rho0, mesh, SolverConfig::default())?;

    let t = Instant::now();
    let (state, report) = picard_solve(&setup, &setup.default_init())?;
    println!("rho0 = {rho0}");
    println!("iterations = {}, linear iterations = {}", report.iterations, report.linear_iterations);
    println!("M_ratio = {:.6}, truncation active = {}", report.m_ratio, report.truncation_active);
    println!("max Mach = {:.6}", report.max_mach);
    println!("elapsed = {:.2?}", t.elapsed());

    let triple = FarfieldTriple::solve(setup.tprofile(), setup.gas(), wall.max_height())?;
    let v = check_bounds(&setup, &state, &triple);
    println!("psi - psi_bar   <= {:.3e}", v.above_upstream);
    println!("psi_hat - psi   <= {:.3e}", v.below_farfield);
    println!("-psi            <= {:.3e}", v.negative);
    println!("tolerance         {:.3e}", 1e-3 * rho0);
    Ok(())
}
