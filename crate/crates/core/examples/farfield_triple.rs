//! Downstream state matched to the upstream one across a wall of height J.

use bumpflow::{FarfieldTriple, GasLaw, TruncatedProfile, UpstreamProfile};

fn main() -> bumpflow::Result<()> {
    let gas = GasLaw::new(2.0)?;
    let tp = TruncatedProfile::new(&UpstreamProfile::constant(1.0)?, 5.0, 10.0)?;
    let triple = FarfieldTriple::solve(&tp, &gas, 1.0)?;
    let r = triple.verify(&tp, &gas);
    println!("constant profile, rho0 = 5, L = 10, J = 1");
    println!("  rho1 = {:.9}", r.rho1);
    println!("  residuals: Bernoulli {:.2e}, mass {:.2e}", r.bernoulli_residual, r.mass_residual);

    let convex = UpstreamProfile::convex_decay(1.0, 1.0, 1.0)?;
    let tp = TruncatedProfile::new(&convex, 8.0, 8.0)?;
    for j in [0.25, 0.5, 1.0] {
        let t = FarfieldTriple::solve(&tp, &gas, j)?;
        let r = t.verify(&tp, &gas);
        println!(
            "convex profile, J = {j}: rho1 = {:.6}, chi - s in [{:.4}, {:.4}], u1(J) = {:.4}",
            r.rho1,
            r.shift_min,
            r.shift_max,
            t.u1(j)
        );
    }
    Ok(())
}
