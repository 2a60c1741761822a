//! Sonic and stagnation densities of the Bernoulli relation and the momentum-to-density inversion.

use bumpflow::GasLaw;

fn main() -> bumpflow::Result<()> {
    for gamma in [1.4, 2.0] {
        let gas = GasLaw::new(gamma)?;
        println!("gamma = {gamma}");
        for s in [0.5, 2.0, 10.0] {
            let env = gas.envelope(s)?;
            println!(
                "  s = {s:<4}  rho_sonic = {:.6}  rho_stagnation = {:.6}  Sigma = {:.6}",
                env.rho_sonic, env.rho_stagnation, env.sigma_crit
            );
            for frac in [0.0, 0.5, 0.9, 1.0] {
                let m_sq = frac * env.sigma_crit.powi(2);
                let rho = gas.invert_bernoulli(m_sq, s)?;
                let mach = gas.mach(m_sq.sqrt() / rho, rho)?;
                println!("    m^2 = {frac:.1} Sigma^2  ->  rho = {rho:.6}, Mach = {mach:.4}");
            }
        }
    }
    Ok(())
}
