use std::path::Path;

use super::spline::CubicSpline;
use crate::error::{Error, Result};

/// Shape of the incoming horizontal velocity `u0(x2)`.
#[derive(Debug, Clone, PartialEq)]
pub enum ProfileKind {
    /// `u0 = ubar`.
    Constant,
    /// `u0 = ubar + a / (1 + x2)^p`, `a >= 0`, `p >= 1`.
    ConvexDecay { a: f64, p: f64 },
    /// `u0 = ubar + eps / (k (k+1) (1 + x2)^k)`; the scaling keeps
    /// `|u0^(i)| <= eps / (1 + x2)^(k+i)` for `i = 1, 2`.
    Perturbation { eps: f64, k: f64 },
    /// Natural cubic spline through user samples.
    Tabulated(CubicSpline),
}

/// Hypothesis class a profile is declared to satisfy, checked by [`UpstreamProfile::validate`].
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Hypotheses {
    /// Positive, convex, `u0'(0) <= 0`, `u0' -> 0`.
    Convex,
    /// Positive, `u0'(0) <= 0`, derivative decay bounds with `(eps, k)`.
    SmallPerturbation { eps: f64, k: f64 },
}

#[derive(Debug, Clone, PartialEq)]
pub struct UpstreamProfile {
    kind: ProfileKind,
    ubar: f64,
    hypotheses: Hypotheses,
}

const AUDIT_POINTS: usize = 10_000;
const ANALYTIC_AUDIT_SPAN: f64 = 50.0;

impl UpstreamProfile {
    pub fn constant(ubar: f64) -> Result<Self> {
        check_ubar(ubar)?;
        Ok(Self { kind: ProfileKind::Constant, ubar, hypotheses: Hypotheses::Convex })
    }

    pub fn convex_decay(ubar: f64, a: f64, p: f64) -> Result<Self> {
        check_ubar(ubar)?;
        if !(a >= 0.0) || !(p >= 1.0) || !a.is_finite() || !p.is_finite() {
            return Err(Error::Config(format!("convex_decay needs a >= 0 and p >= 1, got a={a}, p={p}")));
        }
        Ok(Self { kind: ProfileKind::ConvexDecay { a, p }, ubar, hypotheses: Hypotheses::Convex })
    }

    pub fn perturbation(ubar: f64, eps: f64, k: f64) -> Result<Self> {
        check_ubar(ubar)?;
        if !(eps > 0.0) || !(k > 1.0) || !eps.is_finite() || !k.is_finite() {
            return Err(Error::Config(format!("perturbation needs eps > 0 and k > 1, got eps={eps}, k={k}")));
        }
        Ok(Self {
            kind: ProfileKind::Perturbation { eps, k },
            ubar,
            hypotheses: Hypotheses::SmallPerturbation { eps, k },
        })
    }

    /// Spline profile through `(x2, u0)` samples; `x2` must start at 0 and increase.
    /// The far-field speed is taken to be the last sample.
    pub fn tabulated(x2: Vec<f64>, u0: Vec<f64>) -> Result<Self> {
        if x2.first().copied() != Some(0.0) {
            return Err(Error::Config("tabulated profile must start at x2 = 0".into()));
        }
        let ubar = *u0.last().ok_or_else(|| Error::Config("empty profile table".into()))?;
        check_ubar(ubar)?;
        let spline = CubicSpline::new(x2, u0)
            .ok_or_else(|| Error::Config("profile table needs >= 3 strictly increasing x2 samples".into()))?;
        Ok(Self { kind: ProfileKind::Tabulated(spline), ubar, hypotheses: Hypotheses::Convex })
    }

    /// Reads a two-column `x2,u0` CSV with a header line.
    pub fn from_csv(path: impl AsRef<Path>) -> Result<Self> {
        let (x, u) = read_two_column_csv(path.as_ref())?;
        Self::tabulated(x, u)
    }

    /// Overrides the hypothesis class the profile is audited against.
    pub fn declared(mut self, hypotheses: Hypotheses) -> Self {
        self.hypotheses = hypotheses;
        self
    }

    pub fn kind(&self) -> &ProfileKind {
        &self.kind
    }

    pub fn ubar(&self) -> f64 {
        self.ubar
    }

    pub fn hypotheses(&self) -> Hypotheses {
        self.hypotheses
    }

    /// `(u0, u0', u0'')` at `x2 >= 0`.
    pub fn eval_u0(&self, x2: f64) -> Result<(f64, f64, f64)> {
        if !(x2 >= 0.0) {
            return Err(Error::Domain(format!("x2 must be non-negative, got {x2}")));
        }
        Ok(self.eval_unchecked(x2))
    }

    pub(crate) fn eval_unchecked(&self, x2: f64) -> (f64, f64, f64) {
        let ubar = self.ubar;
        match &self.kind {
            ProfileKind::Constant => (ubar, 0.0, 0.0),
            ProfileKind::ConvexDecay { a, p } => decay_terms(ubar, *a, *p, x2),
            ProfileKind::Perturbation { eps, k } => decay_terms(ubar, eps / (k * (k + 1.0)), *k, x2),
            ProfileKind::Tabulated(s) => s.eval(x2),
        }
    }

    /// Span of the audit grid used by [`validate`](Self::validate) and [`max_speed`](Self::max_speed).
    pub fn audit_span(&self) -> f64 {
        match &self.kind {
            ProfileKind::Tabulated(s) => s.x_max(),
            _ => ANALYTIC_AUDIT_SPAN,
        }
    }

    /// `sup u0`, sampled on the audit grid for tabulated profiles.
    pub fn max_speed(&self) -> f64 {
        match &self.kind {
            ProfileKind::Constant => self.ubar,
            ProfileKind::ConvexDecay { a, .. } => self.ubar + a,
            ProfileKind::Perturbation { eps, k } => self.ubar + eps / (k * (k + 1.0)),
            ProfileKind::Tabulated(_) => {
                let span = self.audit_span();
                (0..=AUDIT_POINTS)
                    .map(|i| self.eval_unchecked(span * i as f64 / AUDIT_POINTS as f64).0)
                    .fold(f64::MIN, f64::max)
            }
        }
    }

    /// Hypotheses of the declared class that fail on a 10^4-point audit grid.
    pub fn validate(&self) -> Vec<String> {
        let span = self.audit_span();
        let pts: Vec<(f64, (f64, f64, f64))> = (0..=AUDIT_POINTS)
            .map(|i| {
                let x = span * i as f64 / AUDIT_POINTS as f64;
                (x, self.eval_unchecked(x))
            })
            .collect();
        let scale = pts.iter().map(|(_, (u, _, _))| u.abs()).fold(0.0, f64::max).max(1.0);
        let tol = 1e-9 * scale;
        let mut out = Vec::new();
        if pts.iter().any(|(_, (u, _, _))| !(*u > 0.0)) {
            out.push("u0 positivity violation".to_string());
        }
        if pts[0].1 .1 > tol {
            out.push("u0'(0) sign violation".to_string());
        }
        match self.hypotheses {
            Hypotheses::Convex => {
                if pts.iter().any(|(_, (_, _, d2))| *d2 < -tol) {
                    out.push("u0'' sign violation".to_string());
                }
                let dmax = pts.iter().map(|(_, (_, d, _))| d.abs()).fold(0.0, f64::max);
                let tail = pts[pts.len() - 1].1 .1.abs();
                if tail > 1e-2 * dmax + tol {
                    out.push("u0' decay violation".to_string());
                }
            }
            Hypotheses::SmallPerturbation { eps, k } => {
                let bound = |x: f64, i: i32| eps / (1.0 + x).powf(k + i as f64) * (1.0 + 1e-9) + 1e-15;
                if pts.iter().any(|(x, (_, d1, _))| d1.abs() > bound(*x, 1)) {
                    out.push("perturbation bound violation (i=1)".to_string());
                }
                if pts.iter().any(|(x, (_, _, d2))| d2.abs() > bound(*x, 2)) {
                    out.push("perturbation bound violation (i=2)".to_string());
                }
            }
        }
        out
    }
}

fn decay_terms(ubar: f64, a: f64, p: f64, x2: f64) -> (f64, f64, f64) {
    let base = 1.0 + x2;
    let t = a * base.powf(-p);
    (ubar + t, -p * t / base, p * (p + 1.0) * t / (base * base))
}

fn check_ubar(ubar: f64) -> Result<()> {
    if ubar > 0.0 && ubar.is_finite() {
        Ok(())
    } else {
        Err(Error::Config(format!("far-field speed must be positive, got {ubar}")))
    }
}

pub(crate) fn read_two_column_csv(path: &Path) -> Result<(Vec<f64>, Vec<f64>)> {
    let text = std::fs::read_to_string(path)?;
    let mut lines = text.lines().filter(|l| !l.trim().is_empty());
    lines.next().ok_or_else(|| Error::Config(format!("{}: missing header line", path.display())))?;
    let mut xs = Vec::new();
    let mut ys = Vec::new();
    for (n, line) in lines.enumerate() {
        let mut cols = line.split(',').map(str::trim);
        let parse = |c: Option<&str>| -> Result<f64> {
            c.and_then(|v| v.parse::<f64>().ok())
                .ok_or_else(|| Error::Config(format!("{}: bad row {}: {line}", path.display(), n + 2)))
        };
        xs.push(parse(cols.next())?);
        ys.push(parse(cols.next())?);
    }
    Ok((xs, ys))
}
