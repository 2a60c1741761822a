//! Incoming velocity profiles, their truncation to a finite nozzle and the upstream stream function.

use bumpflow::{GasLaw, TruncatedProfile, UpstreamProfile};

fn main() -> bumpflow::Result<()> {
    let gas = GasLaw::new(2.0)?;
    let profiles = [
        ("constant", UpstreamProfile::constant(1.0)?),
        ("convex decay", UpstreamProfile::convex_decay(1.0, 1.0, 1.0)?),
        ("perturbation", UpstreamProfile::perturbation(1.0, 0.2, 2.0)?),
    ];
    for (name, p) in &profiles {
        let issues = p.validate();
        let rho_star = gas.rho_star(p.max_speed());
        let tp = TruncatedProfile::new(p, 4.0 * rho_star, 8.0)?;
        println!("{name}: rho_star = {rho_star:.4}, m_L = {:.4}, hypotheses hold: {}", tp.mass_flux(), issues.is_empty());
        for x2 in [0.0, 1.0, 4.0, 7.5, 8.0] {
            let psi = tp.barpsi(x2)?;
            println!(
                "  x2 = {x2:<4} u0 = {:.5} u0L = {:.5} psi_bar = {:9.4} kappa(psi_bar) = {:.5}",
                p.eval_u0(x2)?.0,
                tp.u0l(x2),
                psi,
                tp.kappa(psi)?
            );
        }
    }
    Ok(())
}
