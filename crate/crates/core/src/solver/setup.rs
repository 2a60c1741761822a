use crate::error::{Error, Result};
use crate::gas::GasLaw;
use crate::geometry::Mesh;
use crate::upstream::{Cutoff, TruncatedProfile, UpstreamProfile};

#[derive(Debug, Clone, PartialEq)]
pub struct SolverConfig {
    /// Picard relaxation.
    pub theta: f64,
    /// Update tolerance relative to `m_L`.
    pub picard_tol: f64,
    /// Relative residual for each linear solve.
    pub lin_tol: f64,
    pub max_iters: usize,
    /// Subsonic truncation; `None` evaluates the untruncated density map.
    pub cutoff: Option<Cutoff>,
}

impl Default for SolverConfig {
    fn default() -> Self {
        Self { theta: 0.7, picard_tol: 1e-9, lin_tol: 1e-10, max_iters: 500, cutoff: Some(Cutoff::default()) }
    }
}

impl SolverConfig {
    pub fn validate(&self) -> Result<()> {
        if !(self.theta > 0.0 && self.theta <= 1.0) {
            return Err(Error::Config(format!("theta must lie in (0, 1], got {}", self.theta)));
        }
        if !(self.picard_tol > 0.0) || !(self.lin_tol > 0.0) || self.max_iters == 0 {
            return Err(Error::Config("tolerances and iteration cap must be positive".into()));
        }
        Ok(())
    }

    /// Threshold above which the truncation is considered active.
    pub fn activation(&self) -> f64 {
        self.cutoff.map_or(0.5, |c| c.t0())
    }
}

/// Everything a Picard solve needs: gas, truncated upstream data, mesh and boundary values.
#[derive(Debug, Clone)]
pub struct ProblemSetup {
    gas: GasLaw,
    profile: UpstreamProfile,
    tprofile: TruncatedProfile,
    mesh: Mesh,
    config: SolverConfig,
    h0: f64,
    boundary: Vec<f64>,
}

impl ProblemSetup {
    pub fn new(gas: GasLaw, profile: &UpstreamProfile, rho0: f64, mesh: Mesh, config: SolverConfig) -> Result<Self> {
        config.validate()?;
        let rho_star = gas.rho_star(profile.max_speed());
        if !(rho0 > rho_star) {
            return Err(Error::Domain(format!("rho0 = {rho0} must exceed the subsonic threshold {rho_star}")));
        }
        let l = mesh.height();
        let j = mesh.wall().max_height();
        if !(l > j + 2.0) {
            return Err(Error::Config(format!("L = {l} must exceed wall height + 2 = {}", j + 2.0)));
        }
        let tprofile = TruncatedProfile::new(profile, rho0, l)?;
        let h0 = gas.enthalpy_unchecked(rho0);
        let mut setup = Self { gas, profile: profile.clone(), tprofile, mesh, config, h0, boundary: Vec::new() };
        setup.boundary = setup.boundary_values();
        Ok(setup)
    }

    /// Same gas, profile, mesh and solver settings at another incoming density.
    pub fn with_rho0(&self, rho0: f64) -> Result<Self> {
        Self::new(self.gas, &self.profile, rho0, self.mesh.clone(), self.config.clone())
    }

    pub fn with_config(&self, config: SolverConfig) -> Result<Self> {
        config.validate()?;
        let mut s = self.clone();
        s.config = config;
        Ok(s)
    }

    fn boundary_values(&self) -> Vec<f64> {
        let m = &self.mesh;
        let ml = self.tprofile.mass_flux();
        (0..m.node_count())
            .map(|k| {
                let (i, j) = m.node_ij(k);
                if j == 0 {
                    0.0
                } else if j == m.ny() {
                    ml
                } else if i == 0 || i == m.nx() {
                    self.tprofile.barpsi_unchecked(m.position(i, j).1)
                } else {
                    0.0
                }
            })
            .collect()
    }

    pub fn gas(&self) -> &GasLaw {
        &self.gas
    }

    pub fn profile(&self) -> &UpstreamProfile {
        &self.profile
    }

    pub fn tprofile(&self) -> &TruncatedProfile {
        &self.tprofile
    }

    pub fn mesh(&self) -> &Mesh {
        &self.mesh
    }

    pub fn config(&self) -> &SolverConfig {
        &self.config
    }

    pub fn rho0(&self) -> f64 {
        self.tprofile.rho0()
    }

    pub fn mass_flux(&self) -> f64 {
        self.tprofile.mass_flux()
    }

    /// Dirichlet data at every node (interior entries are zero).
    pub fn boundary(&self) -> &[f64] {
        &self.boundary
    }

    /// `B(psi) = h(rho0) + F(psi)^2 / 2` with the extended `F`.
    pub fn bernoulli(&self, psi: f64) -> f64 {
        let f = self.tprofile.f_check(psi);
        self.h0 + 0.5 * f * f
    }

    /// Density for momentum `|grad psi|^2 = m_sq` on the streamline `psi`, and the
    /// ratio `|grad psi| / Sigma(B(psi))`.
    pub fn density(&self, m_sq: f64, psi: f64) -> Result<(f64, f64)> {
        let env = self.gas.envelope_unchecked(self.bernoulli(psi));
        let ratio = m_sq.sqrt() / env.sigma_crit;
        let m_eff = match &self.config.cutoff {
            Some(z) => {
                let t = z.eval(ratio) * env.sigma_crit;
                t * t
            }
            None => m_sq,
        };
        Ok((self.gas.invert_with_envelope(m_eff, &env)?, ratio))
    }

    /// Untruncated density `H(|grad psi|^2, psi)` on the subsonic branch; past the
    /// critical momentum the sonic density is returned.
    pub fn physical_density(&self, m_sq: f64, psi: f64) -> (f64, f64) {
        let env = self.gas.envelope_unchecked(self.bernoulli(psi));
        let ratio = m_sq.sqrt() / env.sigma_crit;
        let rho = if ratio >= 1.0 {
            env.rho_sonic
        } else {
            self.gas.invert_with_envelope(m_sq, &env).unwrap_or(env.rho_sonic)
        };
        (rho, ratio)
    }

    /// Upstream stream function carried along the mesh map.
    pub fn default_init(&self) -> Vec<f64> {
        let m = &self.mesh;
        (0..m.node_count())
            .map(|k| {
                let (i, j) = m.node_ij(k);
                if m.is_boundary(i, j) {
                    self.boundary[k]
                } else {
                    self.tprofile.barpsi_unchecked(m.position(i, j).1)
                }
            })
            .collect()
    }

    /// Blend linear in `eta` between the wall and top values.
    pub fn blend_init(&self) -> Vec<f64> {
        let m = &self.mesh;
        let ml = self.mass_flux();
        (0..m.node_count())
            .map(|k| {
                let (i, j) = m.node_ij(k);
                if m.is_boundary(i, j) {
                    self.boundary[k]
                } else {
                    ml * m.eta(j)
                }
            })
            .collect()
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::geometry::WallShape;

    fn flat_setup(rho0: f64) -> Result<ProblemSetup> {
        let mesh = Mesh::build(&WallShape::flat(), 4.0, 4.0, 32, 16)?;
        let p = UpstreamProfile::constant(1.0)?;
        ProblemSetup::new(GasLaw::new(2.0)?, &p, rho0, mesh, SolverConfig::default())
    }

    #[test]
    fn rejects_supersonic_upstream() {
        assert!(matches!(flat_setup(0.4), Err(Error::Domain(_))));
        assert!(flat_setup(0.6).is_ok());
    }

    #[test]
    fn boundary_data() {
        let s = flat_setup(5.0).unwrap();
        let m = s.mesh();
        assert_eq!(s.boundary()[m.node(3, 0)], 0.0);
        assert!((s.boundary()[m.node(3, m.ny())] - 20.0).abs() < 1e-11);
        let (_, x2) = m.position(0, 5);
        assert!((s.boundary()[m.node(0, 5)] - 5.0 * x2).abs() < 1e-11);
        let init = s.default_init();
        assert!((init[m.node(7, 9)] - 5.0 * m.position(7, 9).1).abs() < 1e-11);
    }

    #[test]
    fn density_of_still_gas_is_stagnation() {
        let s = flat_setup(5.0).unwrap();
        let (rho, ratio) = s.density(0.0, 3.0).unwrap();
        assert!((rho - 5.25).abs() < 1e-12);
        assert_eq!(ratio, 0.0);
        // upstream state recovered from its own momentum
        let raw = s.with_config(SolverConfig { cutoff: None, ..SolverConfig::default() }).unwrap();
        let (rho, _) = raw.density(25.0, 3.0).unwrap();
        assert!((rho - 5.0).abs() < 1e-12);
        // above t0 the truncated map returns a denser state
        assert!(s.density(25.0, 3.0).unwrap().0 > 5.0);
    }

    #[test]
    fn truncation_keeps_inversion_subsonic() {
        let s = flat_setup(5.0).unwrap();
        assert!(s.density(1e4, 3.0).is_ok());
        let raw = s.with_config(SolverConfig { cutoff: None, ..SolverConfig::default() }).unwrap();
        assert!(matches!(raw.density(1e4, 3.0), Err(Error::SupersonicMomentum { .. })));
    }
}
