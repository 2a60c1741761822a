//! Scans over the incoming density and bisection for the critical density.

use std::io::Write;

use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::solver::{picard_iterate, ProblemSetup, SolverConfig};
use crate::upstream::Cutoff;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ScanEntry {
    pub rho0: f64,
    pub converged: bool,
    pub m_ratio: f64,
    pub max_mach: f64,
    pub truncation_active: bool,
}

impl ScanEntry {
    /// Converged with the truncation inactive.
    pub fn certified(&self) -> bool {
        self.converged && !self.truncation_active
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct ScanResult {
    /// Sorted by `rho0`, descending.
    pub entries: Vec<ScanEntry>,
    /// `(lo, hi)`: the largest uncertified density below the smallest certified one.
    pub bracket: Option<(f64, f64)>,
    /// Least-squares slope of `log(max mach)` against `log(rho0)` over certified entries.
    pub slope: Option<f64>,
}

impl ScanResult {
    /// Writes `rho0,converged,M_ratio,max_mach,truncation_active`, one row per entry.
    pub fn write_csv<W: Write>(&self, out: &mut W) -> Result<()> {
        write_entries_csv(out, &self.entries)
    }
}

pub fn write_entries_csv<W: Write>(out: &mut W, entries: &[ScanEntry]) -> Result<()> {
    writeln!(out, "rho0,converged,M_ratio,max_mach,truncation_active")?;
    for e in entries {
        writeln!(
            out,
            "{:.11e},{},{:.11e},{:.11e},{}",
            e.rho0, e.converged, e.m_ratio, e.max_mach, e.truncation_active
        )?;
    }
    Ok(())
}

/// `steps` densities from `hi` down to `lo`, equally spaced in `log(rho0)`.
pub fn geometric_grid(hi: f64, lo: f64, steps: usize) -> Result<Vec<f64>> {
    if !(hi > lo && lo > 0.0) || steps < 2 {
        return Err(Error::Domain(format!("need hi > lo > 0 and >= 2 steps, got ({hi}, {lo}, {steps})")));
    }
    let r = (lo / hi).ln() / (steps - 1) as f64;
    Ok((0..steps).map(|k| if k + 1 == steps { lo } else { hi * (r * k as f64).exp() }).collect())
}

fn run_one(template: &ProblemSetup, rho0: f64) -> ScanEntry {
    let failed = ScanEntry { rho0, converged: false, m_ratio: f64::NAN, max_mach: f64::NAN, truncation_active: true };
    let Ok(setup) = template.with_rho0(rho0) else {
        return failed;
    };
    match picard_iterate(&setup, &setup.default_init()) {
        Ok((_, rep)) => ScanEntry {
            rho0,
            converged: rep.converged,
            m_ratio: rep.m_ratio,
            max_mach: rep.max_mach,
            truncation_active: rep.truncation_active,
        },
        Err(_) => failed,
    }
}

/// Least-squares slope of `y` against `x`.
pub fn fit_slope(x: &[f64], y: &[f64]) -> Option<f64> {
    let n = x.len() as f64;
    if x.len() < 2 {
        return None;
    }
    let mx = x.iter().sum::<f64>() / n;
    let my = y.iter().sum::<f64>() / n;
    let sxx: f64 = x.iter().map(|a| (a - mx) * (a - mx)).sum();
    let sxy: f64 = x.iter().zip(y).map(|(a, b)| (a - mx) * (b - my)).sum();
    (sxx > 0.0).then(|| sxy / sxx)
}

/// Solves and certifies each density independently, in parallel.
pub fn scan(template: &ProblemSetup, rho0s: &[f64]) -> Result<ScanResult> {
    if rho0s.is_empty() || rho0s.iter().any(|r| !(*r > 0.0)) || rho0s.windows(2).any(|w| !(w[1] < w[0])) {
        return Err(Error::Domain("densities must be positive and strictly decreasing".into()));
    }
    let entries: Vec<ScanEntry> = rho0s.par_iter().map(|&r| run_one(template, r)).collect();
    let bracket = entries
        .windows(2)
        .find(|w| w[0].certified() && !w[1].certified())
        .map(|w| (w[1].rho0, w[0].rho0));
    let (lx, ly): (Vec<f64>, Vec<f64>) =
        entries.iter().filter(|e| e.certified()).map(|e| (e.rho0.ln(), e.max_mach.ln())).unzip();
    Ok(ScanResult { entries, bracket, slope: fit_slope(&lx, &ly) })
}

/// How certification was lost at the lower end of the final bracket.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum CriticalAlternative {
    /// The Picard loop converged but `M_ratio` reached the threshold.
    ThresholdReached,
    /// The Picard loop failed to converge.
    Divergence,
}

impl std::fmt::Display for CriticalAlternative {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(match self {
            Self::ThresholdReached => "M_ratio -> threshold",
            Self::Divergence => "Picard divergence",
        })
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct CriticalResult {
    pub lo: f64,
    pub hi: f64,
    /// Every solve in bisection order.
    pub trajectory: Vec<ScanEntry>,
    pub alternative: CriticalAlternative,
    /// `M_ratio` decreased with `rho0` across all converged solves.
    pub monotone: bool,
    /// Threshold used by the predicate.
    pub threshold: f64,
}

impl CriticalResult {
    pub fn width(&self) -> f64 {
        self.hi - self.lo
    }

    /// Upper bracket end, or `None` when the predicate was not monotone.
    pub fn estimate(&self) -> Option<f64> {
        self.monotone.then_some(self.hi)
    }

    pub fn hi_entry(&self) -> Option<&ScanEntry> {
        self.trajectory.iter().find(|e| e.rho0 == self.hi)
    }
}

/// Bisection on `rho0` for the loss of the predicate "converged and `M_ratio < t0`".
pub fn locate_critical(template: &ProblemSetup, lo: f64, hi: f64, tol: f64) -> Result<CriticalResult> {
    if !(hi > lo && lo > 0.0 && tol > 0.0) {
        return Err(Error::Domain(format!("bad bracket ({lo}, {hi}) or tolerance {tol}")));
    }
    let threshold = template.config().activation();
    let passes = |e: &ScanEntry| e.converged && e.m_ratio < threshold;
    let mut trajectory = Vec::new();
    let e_hi = run_one(template, hi);
    let e_lo = run_one(template, lo);
    trajectory.push(e_hi);
    trajectory.push(e_lo);
    if !passes(&e_hi) || passes(&e_lo) {
        return Err(Error::Domain(format!(
            "bracket ({lo}, {hi}) must fail at the lower end and pass at the upper end"
        )));
    }
    let (mut lo, mut hi) = (lo, hi);
    let mut lo_entry = e_lo;
    while hi - lo > tol {
        let mid = 0.5 * (lo + hi);
        let e = run_one(template, mid);
        trajectory.push(e);
        if passes(&e) {
            hi = mid;
        } else {
            lo = mid;
            lo_entry = e;
        }
    }
    let mut converged: Vec<&ScanEntry> = trajectory.iter().filter(|e| e.converged).collect();
    converged.sort_by(|a, b| a.rho0.partial_cmp(&b.rho0).unwrap());
    let monotone = converged.windows(2).all(|w| w[1].m_ratio < w[0].m_ratio);
    let alternative =
        if lo_entry.converged { CriticalAlternative::ThresholdReached } else { CriticalAlternative::Divergence };
    Ok(CriticalResult { lo, hi, trajectory, alternative, monotone, threshold })
}

/// Reruns [`locate_critical`] with cutoff thresholds `Cutoff::from_eps(eps)` for each
/// `eps`, returning the brackets in order.
pub fn critical_ladder(template: &ProblemSetup, lo: f64, hi: f64, tol: f64, eps: &[f64]) -> Result<Vec<(f64, CriticalResult)>> {
    eps.iter()
        .map(|&e| {
            let cfg = SolverConfig { cutoff: Some(Cutoff::from_eps(e)?), ..template.config().clone() };
            let setup = template.with_config(cfg)?;
            Ok((e, locate_critical(&setup, lo, hi, tol)?))
        })
        .collect()
}
