use super::profile::UpstreamProfile;
use crate::error::{Error, Result};
use crate::quad::simpson_panel;

/// Number of intervals in the cumulative flux table.
pub const TABLE_INTERVALS: usize = 1 << 14;

/// Nozzle version `u0L` of an upstream profile at incoming density `rho0`.
///
/// Below `L - 1` the profile is unchanged; on `(L - 1, L]` its slope is ramped
/// linearly to zero so that `u0L'(L) = 0`. The struct also carries the cumulative
/// flux table used to invert the streamline coordinate.
#[derive(Debug, Clone)]
pub struct TruncatedProfile {
    profile: UpstreamProfile,
    rho0: f64,
    l: f64,
    u_ramp: f64,
    du_ramp: f64,
    h: f64,
    /// `int_0^{x_i} u0L`, `x_i = i h`.
    cum: Vec<f64>,
    m_l: f64,
    f0: f64,
    df0: f64,
}

impl TruncatedProfile {
    pub fn new(profile: &UpstreamProfile, rho0: f64, l: f64) -> Result<Self> {
        if !(rho0 > 0.0) || !rho0.is_finite() {
            return Err(Error::Domain(format!("rho0 must be positive, got {rho0}")));
        }
        if !(l > 1.0) || !l.is_finite() {
            return Err(Error::LTooSmall(format!("L = {l} must exceed 1")));
        }
        let (u_ramp, du_ramp, _) = profile.eval_unchecked(l - 1.0);
        let h = l / TABLE_INTERVALS as f64;
        let mut tp = Self {
            profile: profile.clone(),
            rho0,
            l,
            u_ramp,
            du_ramp,
            h,
            cum: Vec::with_capacity(TABLE_INTERVALS + 1),
            m_l: 0.0,
            f0: 0.0,
            df0: 0.0,
        };
        let half_ubar = 0.5 * profile.ubar();
        let mut acc = 0.0;
        tp.cum.push(0.0);
        let mut prev = tp.u0l(0.0);
        for i in 0..TABLE_INTERVALS {
            let a = i as f64 * h;
            let b = if i + 1 == TABLE_INTERVALS { l } else { (i + 1) as f64 * h };
            let mid = tp.u0l(0.5 * (a + b));
            let next = tp.u0l(b);
            if prev < half_ubar || mid < half_ubar {
                return Err(Error::LTooSmall(format!(
                    "u0L = {:.6} < ubar/2 near x2 = {a:.4} (L = {l})",
                    prev.min(mid)
                )));
            }
            acc += simpson_panel(prev, mid, next, a, b);
            tp.cum.push(acc);
            prev = next;
        }
        if prev < half_ubar {
            return Err(Error::LTooSmall(format!("u0L(L) = {prev:.6} < ubar/2 (L = {l})")));
        }
        tp.m_l = rho0 * acc;
        let u00 = tp.u0l(0.0);
        tp.f0 = u00;
        tp.df0 = tp.du0l(0.0) / (rho0 * u00);
        Ok(tp)
    }

    pub fn profile(&self) -> &UpstreamProfile {
        &self.profile
    }

    pub fn rho0(&self) -> f64 {
        self.rho0
    }

    pub fn height(&self) -> f64 {
        self.l
    }

    /// Total mass flux `rho0 int_0^L u0L`.
    pub fn mass_flux(&self) -> f64 {
        self.m_l
    }

    pub fn table_spacing(&self) -> f64 {
        self.h
    }

    /// Abscissa of table node `i`.
    pub fn node(&self, i: usize) -> f64 {
        if i == TABLE_INTERVALS {
            self.l
        } else {
            i as f64 * self.h
        }
    }

    /// `u0L(x2)`, clamped to `[0, L]`.
    #[inline]
    pub fn u0l(&self, x2: f64) -> f64 {
        let x = x2.clamp(0.0, self.l);
        let knee = self.l - 1.0;
        if x <= knee {
            self.profile.eval_unchecked(x).0
        } else {
            let r = self.l - x;
            self.u_ramp + 0.5 * self.du_ramp * (1.0 - r * r)
        }
    }

    /// `u0L'(x2) = g_L(x2)`.
    #[inline]
    pub fn du0l(&self, x2: f64) -> f64 {
        let x = x2.clamp(0.0, self.l);
        if x <= self.l - 1.0 {
            self.profile.eval_unchecked(x).1
        } else {
            self.du_ramp * (self.l - x)
        }
    }

    /// `u0L''(x2)`; on the ramp this is `-u0'(L-1)`.
    pub fn d2u0l(&self, x2: f64) -> f64 {
        let x = x2.clamp(0.0, self.l);
        if x <= self.l - 1.0 {
            self.profile.eval_unchecked(x).2
        } else {
            -self.du_ramp
        }
    }

    /// Largest value of `u0L` on the table nodes.
    pub fn max_speed(&self) -> f64 {
        (0..=TABLE_INTERVALS).map(|i| self.u0l(self.node(i))).fold(f64::MIN, f64::max)
    }

    pub fn min_speed(&self) -> f64 {
        (0..=TABLE_INTERVALS).map(|i| self.u0l(self.node(i))).fold(f64::MAX, f64::min)
    }

    fn partial(&self, a: f64, b: f64) -> f64 {
        simpson_panel(self.u0l(a), self.u0l(0.5 * (a + b)), self.u0l(b), a, b)
    }

    /// Upstream stream function `rho0 int_0^{x2} u0L`.
    pub fn barpsi(&self, x2: f64) -> Result<f64> {
        if !(x2 >= -1e-12 * self.l && x2 <= self.l * (1.0 + 1e-12)) {
            return Err(Error::Domain(format!("x2 = {x2} outside [0, {}]", self.l)));
        }
        Ok(self.barpsi_unchecked(x2))
    }

    pub(crate) fn barpsi_unchecked(&self, x2: f64) -> f64 {
        let x = x2.clamp(0.0, self.l);
        if x >= self.l {
            return self.m_l;
        }
        let i = ((x / self.h) as usize).min(TABLE_INTERVALS - 1);
        let a = self.node(i);
        self.rho0 * (self.cum[i] + self.partial(a, x))
    }

    /// Height `kappa` at which the upstream streamline carrying `psi` enters.
    pub fn kappa(&self, psi: f64) -> Result<f64> {
        let slack = 1e-12 * self.m_l;
        if !(psi >= -slack && psi <= self.m_l + slack) {
            return Err(Error::Range(format!("psi = {psi} outside [0, m_L = {}]", self.m_l)));
        }
        Ok(self.kappa_unchecked(psi))
    }

    pub(crate) fn kappa_unchecked(&self, psi: f64) -> f64 {
        let c = psi / self.rho0;
        if c <= 0.0 {
            return 0.0;
        }
        let total = self.cum[TABLE_INTERVALS];
        if c >= total {
            return self.l;
        }
        // last node with cum <= c
        let i = self.cum.partition_point(|&v| v <= c).saturating_sub(1).min(TABLE_INTERVALS - 1);
        let a = self.node(i);
        let b = self.node(i + 1);
        let target = c - self.cum[i];
        let mut x = a + target / self.u0l(a);
        for _ in 0..4 {
            x = x.clamp(a, b);
            let f = self.partial(a, x) - target;
            x -= f / self.u0l(x);
        }
        x.clamp(a, b)
    }

    /// Extended `F`: `u0L(kappa(psi))` on `[0, m_L]`, continued outside.
    pub fn f_check(&self, psi: f64) -> f64 {
        if psi > self.m_l {
            self.u0l(self.l)
        } else if psi >= 0.0 {
            self.u0l(self.kappa_unchecked(psi))
        } else if psi >= -1.0 {
            self.f0 + 0.5 * self.df0 * (psi + 0.5 * psi * psi)
        } else {
            self.f0 - 0.25 * self.df0
        }
    }

    /// Memory term `W = F F'` continued to all real `psi`.
    pub fn memory_w(&self, psi: f64) -> f64 {
        if psi > self.m_l || psi < -1.0 {
            0.0
        } else if psi >= 0.0 {
            self.du0l(self.kappa_unchecked(psi)) / self.rho0
        } else {
            let f = self.f0 + 0.5 * self.df0 * (psi + 0.5 * psi * psi);
            let df = 0.5 * self.df0 * (1.0 + psi);
            f * df
        }
    }

    /// `F F'' + (F')^2 = u0L''(kappa) / (rho0^2 u0L(kappa))` on `[0, m_L]`.
    pub fn convexity_surrogate(&self, psi: f64) -> f64 {
        let k = self.kappa_unchecked(psi.clamp(0.0, self.m_l));
        self.d2u0l(k) / (self.rho0 * self.rho0 * self.u0l(k))
    }
}
