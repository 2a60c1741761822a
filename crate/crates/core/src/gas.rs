//! Polytropic gas `p = rho^gamma` and the subsonic branch of the Bernoulli relation.
//!
//! For a Bernoulli value `s`, the relation `m^2 / (2 rho^2) + h(rho) = s` links the
//! momentum `m = |grad psi|` to the density. Along the subsonic branch
//! `rho in [rho_sonic(s), rho_stagnation(s)]` the momentum is strictly decreasing in
//! `rho`, so the density can be recovered uniquely from `(m^2, s)`.

use crate::error::{Error, Result};

/// Polytropic gas law with adiabatic exponent `gamma > 1`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GasLaw {
    gamma: f64,
}

/// Sonic and stagnation densities attached to one Bernoulli value.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BernoulliEnvelope {
    pub s: f64,
    pub rho_sonic: f64,
    pub rho_stagnation: f64,
    /// Largest momentum compatible with `s`, attained at `rho_sonic`.
    pub sigma_crit: f64,
}

const MAX_NEWTON: usize = 60;

impl GasLaw {
    pub fn new(gamma: f64) -> Result<Self> {
        if !(gamma > 1.0) || !gamma.is_finite() {
            return Err(Error::Domain(format!("gamma must exceed 1, got {gamma}")));
        }
        Ok(Self { gamma })
    }

    pub fn gamma(&self) -> f64 {
        self.gamma
    }

    pub fn pressure(&self, rho: f64) -> f64 {
        rho.powf(self.gamma)
    }

    /// `h(rho) = gamma rho^(gamma-1) / (gamma-1)`.
    pub fn enthalpy(&self, rho: f64) -> Result<f64> {
        check_density(rho)?;
        Ok(self.enthalpy_unchecked(rho))
    }

    #[inline]
    pub(crate) fn enthalpy_unchecked(&self, rho: f64) -> f64 {
        let g = self.gamma;
        g * rho.powf(g - 1.0) / (g - 1.0)
    }

    /// `c(rho) = sqrt(gamma rho^(gamma-1))`.
    pub fn sound_speed(&self, rho: f64) -> Result<f64> {
        check_density(rho)?;
        Ok((self.gamma * rho.powf(self.gamma - 1.0)).sqrt())
    }

    pub fn mach(&self, speed: f64, rho: f64) -> Result<f64> {
        Ok(speed / self.sound_speed(rho)?)
    }

    /// Upstream subsonicity threshold `((sup u0^2) / gamma)^(1/(gamma-1))`.
    pub fn rho_star(&self, max_speed: f64) -> f64 {
        (max_speed * max_speed / self.gamma).powf(1.0 / (self.gamma - 1.0))
    }

    /// Closed-form sonic/stagnation densities and critical momentum for `s > 0`.
    pub fn envelope(&self, s: f64) -> Result<BernoulliEnvelope> {
        if !(s > 0.0) || !s.is_finite() {
            return Err(Error::Domain(format!("Bernoulli value must be positive, got {s}")));
        }
        Ok(self.envelope_unchecked(s))
    }

    #[inline]
    pub(crate) fn envelope_unchecked(&self, s: f64) -> BernoulliEnvelope {
        let g = self.gamma;
        let inv = 1.0 / (g - 1.0);
        let rho_sonic = (2.0 * (g - 1.0) * s / (g * (g + 1.0))).powf(inv);
        let rho_stagnation = ((g - 1.0) * s / g).powf(inv);
        let sigma_crit = g.sqrt() * rho_sonic.powf(0.5 * (g + 1.0));
        BernoulliEnvelope { s, rho_sonic, rho_stagnation, sigma_crit }
    }

    /// Critical momentum `Sigma(s)`.
    pub fn sigma(&self, s: f64) -> Result<f64> {
        Ok(self.envelope(s)?.sigma_crit)
    }

    /// Subsonic-branch density with `m_sq / (2 rho^2) + h(rho) = s`.
    ///
    /// `m_sq == Sigma(s)^2` returns the sonic density; anything above is rejected.
    pub fn invert_bernoulli(&self, m_sq: f64, s: f64) -> Result<f64> {
        let env = self.envelope(s)?;
        if !(m_sq >= 0.0) || !m_sq.is_finite() {
            return Err(Error::Domain(format!("momentum squared must be non-negative, got {m_sq}")));
        }
        self.invert_with_envelope(m_sq, &env)
    }

    pub(crate) fn invert_with_envelope(&self, m_sq: f64, env: &BernoulliEnvelope) -> Result<f64> {
        let sigma_sq = env.sigma_crit * env.sigma_crit;
        if m_sq > sigma_sq * (1.0 + 8.0 * f64::EPSILON) {
            return Err(Error::SupersonicMomentum { m_sq, sigma_sq });
        }
        if m_sq >= sigma_sq * (1.0 - 16.0 * f64::EPSILON) {
            return Ok(env.rho_sonic);
        }
        if m_sq == 0.0 {
            return Ok(env.rho_stagnation);
        }
        let g = self.gamma;
        let s = env.s;
        // phi is increasing on the bracket: phi(lo) <= 0 <= phi(hi)
        let phi = |rho: f64| 0.5 * m_sq / (rho * rho) + self.enthalpy_unchecked(rho) - s;
        let dphi = |rho: f64| -m_sq / (rho * rho * rho) + g * rho.powf(g - 2.0);
        let (mut lo, mut hi) = (env.rho_sonic, env.rho_stagnation);
        let mut rho = env.rho_stagnation * (1.0 - 0.5 * m_sq / sigma_sq);
        if !(rho > lo && rho < hi) {
            rho = 0.5 * (lo + hi);
        }
        for _ in 0..MAX_NEWTON {
            let f = phi(rho);
            if f == 0.0 {
                return Ok(rho);
            }
            if f < 0.0 {
                lo = rho;
            } else {
                hi = rho;
            }
            let d = dphi(rho);
            let mut next = if d > 0.0 { rho - f / d } else { f64::NAN };
            if !(next > lo && next < hi) {
                next = 0.5 * (lo + hi);
            }
            if (next - rho).abs() <= 2.0 * f64::EPSILON * rho || hi - lo <= 2.0 * f64::EPSILON * hi {
                return Ok(next);
            }
            rho = next;
        }
        Ok(rho)
    }
}

fn check_density(rho: f64) -> Result<()> {
    if rho > 0.0 && rho.is_finite() {
        Ok(())
    } else {
        Err(Error::Domain(format!("density must be positive, got {rho}")))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn rel(a: f64, b: f64) -> f64 {
        (a - b).abs() / b.abs().max(1e-300)
    }

    #[test]
    fn enthalpy_values() {
        let g2 = GasLaw::new(2.0).unwrap();
        assert!(rel(g2.enthalpy(1.0).unwrap(), 2.0) < 1e-15);
        assert!(rel(g2.enthalpy(1.5).unwrap(), 3.0) < 1e-15);
        let g14 = GasLaw::new(1.4).unwrap();
        assert!(rel(g14.enthalpy(1.0).unwrap(), 3.5) < 1e-14);
        assert!(g2.enthalpy(0.0).is_err());
        assert!(g2.enthalpy(-1.0).is_err());
    }

    #[test]
    fn sound_speed_values() {
        let g2 = GasLaw::new(2.0).unwrap();
        assert!(rel(g2.sound_speed(2.0).unwrap(), 2.0) < 1e-15);
        assert!(rel(g2.sound_speed(5.0).unwrap(), 10f64.sqrt()) < 1e-15);
        let g14 = GasLaw::new(1.4).unwrap();
        assert!(rel(g14.sound_speed(1.0).unwrap(), 1.4f64.sqrt()) < 1e-15);
        assert!(g2.sound_speed(-2.0).is_err());
    }

    #[test]
    fn rejects_bad_gamma() {
        assert!(GasLaw::new(1.0).is_err());
        assert!(GasLaw::new(0.5).is_err());
        assert!(GasLaw::new(f64::NAN).is_err());
    }

    #[test]
    fn envelope_closed_form() {
        let g = GasLaw::new(2.0).unwrap();
        let e = g.envelope(3.0).unwrap();
        assert!(rel(e.rho_sonic, 1.0) < 1e-14);
        assert!(rel(e.rho_stagnation, 1.5) < 1e-14);
        assert!(rel(e.sigma_crit, 2f64.sqrt()) < 1e-14);
        // defining relations
        assert!(rel(g.enthalpy(e.rho_stagnation).unwrap(), 3.0) < 1e-12);
        let sonic = 0.5 * 2.0 * e.rho_sonic + g.enthalpy(e.rho_sonic).unwrap();
        assert!(rel(sonic, 3.0) < 1e-12);

        let e6 = g.envelope(6.0).unwrap();
        assert!(rel(e6.rho_sonic, 2.0) < 1e-14);
        assert!(rel(e6.rho_stagnation, 3.0) < 1e-14);
        assert!(g.envelope(0.0).is_err());
    }

    #[test]
    fn envelope_ratio_is_universal() {
        for &gamma in &[1.2, 1.4, 5.0 / 3.0, 2.0, 3.0] {
            let g = GasLaw::new(gamma).unwrap();
            let want = (2.0 / (gamma + 1.0)).powf(1.0 / (gamma - 1.0));
            for &s in &[0.1, 1.0, 7.5, 300.0] {
                let e = g.envelope(s).unwrap();
                assert!(rel(e.rho_sonic / e.rho_stagnation, want) < 1e-12);
                let lhs = 0.5 * gamma * e.rho_sonic.powf(gamma - 1.0) + g.enthalpy(e.rho_sonic).unwrap();
                assert!(rel(lhs, s) < 1e-12);
                assert!(rel(g.enthalpy(e.rho_stagnation).unwrap(), s) < 1e-12);
            }
        }
    }

    #[test]
    fn inversion_examples() {
        let g = GasLaw::new(2.0).unwrap();
        assert!(rel(g.invert_bernoulli(0.0, 3.0).unwrap(), 1.5) < 1e-14);
        assert!(rel(g.invert_bernoulli(1.728, 3.0).unwrap(), 1.2) < 1e-12);
        assert!(rel(g.invert_bernoulli(2.0, 3.0).unwrap(), 1.0) < 1e-14);
        assert!(matches!(
            g.invert_bernoulli(2.0 * 1.0001, 3.0),
            Err(Error::SupersonicMomentum { .. })
        ));
        assert!(g.invert_bernoulli(1.0, -1.0).is_err());
    }
}
