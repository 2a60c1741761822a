//! Downstream-matched state above the wall top `J` and the lower barrier `psi_hat`.
//!
//! A streamline entering at height `s` upstream is matched to height `chi(s)` in a
//! uniform-pressure layer of density `rho1` filling `[J, L]`, conserving both the
//! Bernoulli value and the mass flux below it. `rho1` is fixed by requiring
//! `chi(L) = L`, i.e. `G(rho1) = L - J` with `G` strictly increasing.

use crate::error::{Error, Result};
use crate::gas::GasLaw;
use crate::quad::{simpson_nonuniform, simpson_panel, simpson_uniform};
use crate::upstream::{TruncatedProfile, TABLE_INTERVALS};

const BISECTION_CAP: usize = 200;

/// `D(s; rho) = 2 (h(rho0) - h(rho)) + u0L(s)^2`.
pub fn d_eval(tp: &TruncatedProfile, gas: &GasLaw, rho: f64, s: f64) -> f64 {
    let u = tp.u0l(s);
    2.0 * (gas.enthalpy_unchecked(tp.rho0()) - gas.enthalpy_unchecked(rho)) + u * u
}

/// `G(rho)` together with a central-difference estimate of `G'(rho)`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GValue {
    pub g: f64,
    pub dg: f64,
}

fn g_only(tp: &TruncatedProfile, gas: &GasLaw, rho: f64) -> Result<f64> {
    let rho0 = tp.rho0();
    let mut vals = Vec::with_capacity(TABLE_INTERVALS + 1);
    for i in 0..=TABLE_INTERVALS {
        let s = tp.node(i);
        let d = d_eval(tp, gas, rho, s);
        if !(d > 0.0) {
            return Err(Error::RhoOutOfBracket(format!("D(s = {s:.4}; rho = {rho}) = {d} <= 0")));
        }
        vals.push(rho0 * tp.u0l(s) / (rho * d.sqrt()));
    }
    Ok(simpson_uniform(&vals, tp.table_spacing()))
}

/// `G(rho) = int_0^L rho0 u0L(s) / (rho sqrt(D(s; rho))) ds`.
pub fn g_eval(tp: &TruncatedProfile, gas: &GasLaw, rho: f64) -> Result<GValue> {
    let g = g_only(tp, gas, rho)?;
    let eps = 1e-6 * rho;
    let dg = match (g_only(tp, gas, rho + eps), g_only(tp, gas, rho - eps)) {
        (Ok(a), Ok(b)) => (a - b) / (2.0 * eps),
        (Ok(a), Err(_)) => (a - g) / eps,
        (Err(_), Ok(b)) => (g - b) / eps,
        (Err(e), Err(_)) => return Err(e),
    };
    Ok(GValue { g, dg })
}

/// Sonic lower end of the admissible bracket for `rho1`.
pub fn rho1_lower_bound(tp: &TruncatedProfile, gas: &GasLaw) -> f64 {
    let umax = tp.max_speed();
    gas.envelope_unchecked(0.5 * umax * umax + gas.enthalpy_unchecked(tp.rho0())).rho_sonic
}

#[derive(Debug, Clone)]
pub struct FarfieldTriple {
    gamma: f64,
    rho1: f64,
    j: f64,
    l: f64,
    h: f64,
    /// `chi` at the profile table nodes.
    chi: Vec<f64>,
    /// `u1` at `chi` nodes.
    u1: Vec<f64>,
    /// `psi_hat` at `chi` nodes.
    psihat: Vec<f64>,
}

impl FarfieldTriple {
    /// Builds the matched triple for wall height `j`.
    pub fn solve(tp: &TruncatedProfile, gas: &GasLaw, j: f64) -> Result<Self> {
        let l = tp.height();
        if !(j >= 0.0 && j < l) {
            return Err(Error::Domain(format!("wall height J = {j} must lie in [0, L = {l})")));
        }
        let target = l - j;
        let rho0 = tp.rho0();
        let mut lo = rho1_lower_bound(tp, gas);
        let mut hi = rho0;
        let g_lo = g_only(tp, gas, lo)?;
        if g_lo > target {
            return Err(Error::NoAdmissibleTriple(format!(
                "G(rho_sonic = {lo:.6}) = {g_lo:.6} exceeds L - J = {target:.6}"
            )));
        }
        let mut rho1 = 0.5 * (lo + hi);
        if j == 0.0 {
            rho1 = rho0;
        } else {
            for _ in 0..BISECTION_CAP {
                rho1 = 0.5 * (lo + hi);
                if hi - lo <= 4.0 * f64::EPSILON * rho0 {
                    break;
                }
                let g = g_only(tp, gas, rho1)?;
                if g < target {
                    lo = rho1;
                } else {
                    hi = rho1;
                }
            }
        }

        let h = tp.table_spacing();
        let rate = |s: f64| {
            let d = d_eval(tp, gas, rho1, s);
            rho0 * tp.u0l(s) / (rho1 * d.sqrt())
        };
        let n = TABLE_INTERVALS;
        let mut chi = Vec::with_capacity(n + 1);
        let mut u1 = Vec::with_capacity(n + 1);
        let mut psihat = Vec::with_capacity(n + 1);
        chi.push(j);
        u1.push(d_eval(tp, gas, rho1, 0.0).sqrt());
        psihat.push(0.0);
        for i in 0..n {
            let a = tp.node(i);
            let b = tp.node(i + 1);
            let m = 0.5 * (a + b);
            // the right-hand side depends on s only, so a classic RK4 step is a Simpson panel
            let (ra, rm, rb) = (rate(a), rate(m), rate(b));
            let c0 = chi[i];
            let c1 = c0 + simpson_panel(ra, rm, rb, a, b);
            let cm = c0 + simpson_panel(ra, rate(0.5 * (a + m)), rm, a, m);
            let um = d_eval(tp, gas, rho1, m).sqrt();
            let ub = d_eval(tp, gas, rho1, b).sqrt();
            let q = rho1 * simpson_nonuniform([c0, cm, c1], [u1[i], um, ub]);
            chi.push(c1);
            u1.push(ub);
            psihat.push(psihat[i] + q);
        }
        Ok(Self { gamma: gas.gamma(), rho1, j, l, h, chi, u1, psihat })
    }

    pub fn rho1(&self) -> f64 {
        self.rho1
    }

    pub fn wall_height(&self) -> f64 {
        self.j
    }

    pub fn height(&self) -> f64 {
        self.l
    }

    /// `chi` sampled at the profile table nodes.
    pub fn chi_samples(&self) -> &[f64] {
        &self.chi
    }

    /// `u1` sampled at the `chi` nodes.
    pub fn u1_samples(&self) -> &[f64] {
        &self.u1
    }

    /// `chi(s)` by linear interpolation between table nodes.
    pub fn chi(&self, s: f64) -> f64 {
        let x = s.clamp(0.0, self.l) / self.h;
        let i = (x as usize).min(TABLE_INTERVALS - 1);
        let t = x - i as f64;
        self.chi[i] * (1.0 - t) + self.chi[i + 1] * t
    }

    fn locate(&self, x2: f64) -> usize {
        self.chi.partition_point(|&c| c <= x2).saturating_sub(1).min(TABLE_INTERVALS - 1)
    }

    /// `u1(x2)` on `[J, L]`.
    pub fn u1(&self, x2: f64) -> f64 {
        let x = x2.clamp(self.j, self.l);
        let i = self.locate(x);
        let t = (x - self.chi[i]) / (self.chi[i + 1] - self.chi[i]);
        self.u1[i] * (1.0 - t) + self.u1[i + 1] * t
    }

    /// `psi_hat(x2) = rho1 int_J^{x2} u1` on `[J, L]`.
    pub fn psihat(&self, x2: f64) -> f64 {
        let x = x2.clamp(self.j, self.l);
        let i = self.locate(x);
        let ua = self.u1[i];
        let ux = self.u1(x);
        self.psihat[i] + self.rho1 * 0.5 * (ua + ux) * (x - self.chi[i])
    }

    /// `u1` resampled on `n + 1` uniform points of `[J, L]`.
    pub fn u1_uniform(&self, n: usize) -> Vec<(f64, f64)> {
        (0..=n)
            .map(|k| {
                let x = self.j + (self.l - self.j) * k as f64 / n as f64;
                (x, self.u1(x))
            })
            .collect()
    }

    /// Residuals of the matching relations and the bound checks.
    pub fn verify(&self, tp: &TruncatedProfile, gas: &GasLaw) -> TripleReport {
        let rho0 = tp.rho0();
        let h0 = gas.enthalpy_unchecked(rho0);
        let h1 = gas.enthalpy_unchecked(self.rho1);
        let mut bernoulli_residual: f64 = 0.0;
        let mut mass_residual: f64 = 0.0;
        let mut shift_min = f64::MAX;
        let mut shift_max = f64::MIN;
        let mut momentum_ordered = true;
        let mut increasing = true;
        let c1 = (self.gamma * self.rho1.powf(self.gamma - 1.0)).sqrt();
        let mut subsonic = true;
        for i in 0..=TABLE_INTERVALS {
            let s = tp.node(i);
            let u0 = tp.u0l(s);
            let u1 = self.u1[i];
            bernoulli_residual = bernoulli_residual.max((0.5 * u0 * u0 + h0 - 0.5 * u1 * u1 - h1).abs());
            mass_residual = mass_residual.max((tp.barpsi_unchecked(s) - self.psihat[i]).abs());
            let shift = self.chi[i] - s;
            shift_min = shift_min.min(shift);
            shift_max = shift_max.max(shift);
            if i > 0 && rho0 * u0 >= self.rho1 * u1 {
                momentum_ordered = false;
            }
            if i > 0 && !(self.chi[i] > self.chi[i - 1]) {
                increasing = false;
            }
            if !(u1 > 0.0 && u1 < c1) {
                subsonic = false;
            }
        }
        let gap_bound = rho0 * self.j * tp.profile().max_speed();
        let mut gap_min = f64::MAX;
        let mut gap_max = f64::MIN;
        let samples = 2000;
        for k in 0..=samples {
            let x = self.j + (self.l - self.j) * k as f64 / samples as f64;
            let gap = tp.barpsi_unchecked(x) - self.psihat(x);
            gap_min = gap_min.min(gap);
            gap_max = gap_max.max(gap);
        }
        let m_l = tp.mass_flux();
        let tol = 1e-9 * m_l;
        let lo = rho1_lower_bound(tp, gas);
        let g_monotone = (1..20).all(|k| {
            let rho = lo + (rho0 - lo) * k as f64 / 20.0;
            g_eval(tp, gas, rho).map(|v| v.dg >= 0.0).unwrap_or(false)
        });
        TripleReport {
            rho1: self.rho1,
            bernoulli_residual,
            mass_residual,
            chi_start: self.chi[0],
            chi_end: self.chi[TABLE_INTERVALS],
            chi_increasing: increasing,
            shift_min,
            shift_max,
            shift_ok: shift_min >= -tol / rho0 && shift_max <= self.j + tol / rho0,
            gap_min,
            gap_max,
            gap_bound,
            gap_ok: gap_min >= -tol && gap_max <= gap_bound + tol,
            momentum_ordered,
            subsonic,
            g_monotone,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct TripleReport {
    pub rho1: f64,
    pub bernoulli_residual: f64,
    pub mass_residual: f64,
    pub chi_start: f64,
    pub chi_end: f64,
    pub chi_increasing: bool,
    pub shift_min: f64,
    pub shift_max: f64,
    pub shift_ok: bool,
    pub gap_min: f64,
    pub gap_max: f64,
    pub gap_bound: f64,
    pub gap_ok: bool,
    pub momentum_ordered: bool,
    pub subsonic: bool,
    pub g_monotone: bool,
}
