//! Density scan and bisection for the smallest incoming density with a certified subsonic solve.

use bumpflow::continuation::{geometric_grid, locate_critical, scan};
use bumpflow::{GasLaw, Mesh, ProblemSetup, SolverConfig, UpstreamProfile, WallShape};

fn main() -> bumpflow::Result<()> {
    let gas = GasLaw::new(2.0)?;
    let profile = UpstreamProfile::convex_decay(1.0, 1.0, 1.0)?;
    let rho_star = gas.rho_star(profile.max_speed());
    let mesh = Mesh::build(&WallShape::smooth_bump(0.25)?, 8.0, 4.0, 128, 64)?;
    let template = ProblemSetup::new(gas, &profile, 64.0 * rho_star, mesh, SolverConfig::default())?;

    let result = scan(&template, &geometric_grid(400.0 * rho_star, 4.0 * rho_star, 9)?)?;
    result.write_csv(&mut std::io::stdout())?;
    println!("log-log slope of max Mach: {:.4}", result.slope.unwrap_or(f64::NAN));

    let (lo, hi) = result.bracket.unwrap_or((4.0 * rho_star, 64.0 * rho_star));
    let crit = locate_critical(&template, lo, hi, 1e-3 * rho_star)?;
    println!(
        "critical rho0 in [{:.5}, {:.5}] = [{:.4}, {:.4}] rho_star after {} solves: {}",
        crit.lo,
        crit.hi,
        crit.lo / rho_star,
        crit.hi / rho_star,
        crit.trajectory.len(),
        crit.alternative
    );
    Ok(())
}
