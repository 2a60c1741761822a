//! Weighted Poincare inequality checks and grid-convergence studies.

use std::sync::Arc;

use rand::Rng;
use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::gas::GasLaw;
use crate::geometry::Mesh;
use crate::quad::simpson_uniform;
use crate::solver::{picard_solve, ProblemSetup};

/// Cap applied to infinite intervals.
pub const INFINITE_CAP: f64 = 1e3;
const PANELS: usize = 1 << 14;

pub type ScalarFn = Arc<dyn Fn(f64) -> f64 + Send + Sync>;

/// Test function `g` with derivative `dg` on `(a, b)`, `b = None` meaning `+inf`.
#[derive(Clone)]
pub struct PoincareCase {
    pub a: f64,
    pub b: Option<f64>,
    pub l: f64,
    pub g: ScalarFn,
    pub dg: ScalarFn,
}

impl std::fmt::Debug for PoincareCase {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.debug_struct("PoincareCase").field("a", &self.a).field("b", &self.b).field("l", &self.l).finish()
    }
}

impl PoincareCase {
    pub fn new(a: f64, b: Option<f64>, l: f64, g: ScalarFn, dg: ScalarFn) -> Self {
        Self { a, b, l, g, dg }
    }

    pub fn constant(value: f64, l: f64) -> Self {
        Self::new(0.0, None, l, Arc::new(move |_| value), Arc::new(|_| 0.0))
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PoincareResult {
    /// `int g^2 / (1 + s)^l`, including the tail estimate.
    pub lhs: f64,
    /// `2 g(a)^2 / (l - 1) + 4 / (l - 1)^2 int g'^2`.
    pub rhs: f64,
    pub holds: bool,
    /// Tail bound added to `lhs` for infinite intervals.
    pub tail: f64,
    /// Largest relative change of either integral when the grid is halved.
    pub grid_change: f64,
}

/// Integrals of `g^2 (1+s)^-l` and `g'^2` on `[a, b]` with `panels` Simpson panels
/// in `u = ln(1 + s - a)`.
fn integrals(case: &PoincareCase, b: f64, panels: usize) -> (f64, f64) {
    let umax = (1.0 + b - case.a).ln();
    let du = umax / panels as f64;
    let mut w = Vec::with_capacity(panels + 1);
    let mut d = Vec::with_capacity(panels + 1);
    for k in 0..=panels {
        let e = (k as f64 * du).exp();
        let s = case.a + e - 1.0;
        let g = (case.g)(s);
        let dg = (case.dg)(s);
        w.push(g * g / (1.0 + s).powf(case.l) * e);
        d.push(dg * dg * e);
    }
    (simpson_uniform(&w, du), simpson_uniform(&d, du))
}

pub fn poincare_check(case: &PoincareCase) -> Result<PoincareResult> {
    if !(case.l > 2.0) {
        return Err(Error::Domain(format!("exponent l = {} must exceed 2", case.l)));
    }
    let b = case.b.unwrap_or(INFINITE_CAP);
    if !(b > case.a && case.a >= 0.0) {
        return Err(Error::Domain(format!("interval ({}, {b}) must satisfy 0 <= a < b", case.a)));
    }
    let (w1, d1) = integrals(case, b, PANELS);
    let (w2, d2) = integrals(case, b, 2 * PANELS);
    let rel = |x: f64, y: f64| if y == 0.0 { (x - y).abs() } else { ((x - y) / y).abs() };
    let grid_change = rel(w1, w2).max(rel(d1, d2));
    let tail = if case.b.is_none() {
        // |g| on [b, inf) bounded by its largest sample on [b/2, b]
        let gmax = (0..=64).map(|k| (case.g)(0.5 * b * (1.0 + k as f64 / 64.0)).abs()).fold(0.0, f64::max);
        gmax * gmax * (1.0 + b).powf(1.0 - case.l) / (case.l - 1.0)
    } else {
        0.0
    };
    let lhs = w2 + tail;
    let ga = (case.g)(case.a);
    let rhs = 2.0 * ga * ga / (case.l - 1.0) + 4.0 / (case.l - 1.0).powi(2) * d2;
    Ok(PoincareResult { lhs, rhs, holds: lhs <= rhs + 1e-10, tail, grid_change })
}

/// Sum of one to five Gaussian bumps on `(0, inf)` with random amplitude, centre and width.
pub fn random_gaussian_case<R: Rng>(rng: &mut R, l: f64) -> PoincareCase {
    let count = rng.gen_range(1..=5);
    let bumps: Vec<(f64, f64, f64)> = (0..count)
        .map(|_| (rng.gen_range(-1.0..1.0), rng.gen_range(0.0..20.0), rng.gen_range(0.2..3.0)))
        .collect();
    let gb = bumps.clone();
    let g = move |s: f64| gb.iter().map(|&(amp, c, w)| amp * (-(s - c).powi(2) / (2.0 * w * w)).exp()).sum();
    let dg = move |s: f64| {
        bumps.iter().map(|&(amp, c, w)| -amp * (s - c) / (w * w) * (-(s - c).powi(2) / (2.0 * w * w)).exp()).sum()
    };
    PoincareCase::new(0.0, None, l, Arc::new(g), Arc::new(dg))
}

/// Checks every case in parallel.
pub fn poincare_batch(cases: &[PoincareCase]) -> Result<Vec<PoincareResult>> {
    cases.par_iter().map(poincare_check).collect()
}

/// Worst relative error of `invert_bernoulli` over random subsonic states.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RoundTrip {
    pub samples: usize,
    pub max_rel: f64,
    pub failures: usize,
}

/// Draws `(gamma, s, rho)` with `gamma in [1.1, 3]`, `log10 s in [-2, 2]` and `rho` on the
/// subsonic branch at least `margin` (relative) above the sonic density, then inverts
/// the forward momentum.
pub fn bernoulli_roundtrip<R: Rng>(rng: &mut R, samples: usize, margin: f64) -> RoundTrip {
    let mut max_rel: f64 = 0.0;
    let mut failures = 0;
    for _ in 0..samples {
        let gas = GasLaw::new(rng.gen_range(1.1..3.0)).expect("gamma above 1");
        let s = 10f64.powf(rng.gen_range(-2.0..2.0));
        let env = gas.envelope(s).expect("positive s");
        let lo = env.rho_sonic * (1.0 + margin);
        let rho = lo + (env.rho_stagnation - lo) * rng.gen::<f64>();
        let m_sq = (2.0 * rho * rho * (s - gas.enthalpy_unchecked(rho))).max(0.0);
        match gas.invert_bernoulli(m_sq, s) {
            Ok(back) => max_rel = max_rel.max(((back - rho) / rho).abs()),
            Err(_) => failures += 1,
        }
    }
    RoundTrip { samples, max_rel, failures }
}

#[derive(Debug, Clone, PartialEq)]
pub struct ConvergenceStudy {
    /// Mesh cell counts `(nx, ny)` per level.
    pub meshes: Vec<(usize, usize)>,
    /// Max-norm error per level (exact reference) or per consecutive pair (Richardson).
    pub errors: Vec<f64>,
    /// `log2` ratios of consecutive errors.
    pub orders: Vec<f64>,
    /// Errors strictly decreased.
    pub monotone: bool,
}

impl ConvergenceStudy {
    /// Mean observed order, withheld when errors were not monotone.
    pub fn order(&self) -> Option<f64> {
        (self.monotone && !self.orders.is_empty()).then(|| self.orders.iter().sum::<f64>() / self.orders.len() as f64)
    }
}

/// Reference used by [`grid_convergence`].
pub enum Reference<'a> {
    /// Exact solution `psi(x1, x2)`.
    Exact(&'a (dyn Fn(f64, f64) -> f64 + Sync)),
    /// Differences of successive levels on the coarse nodes.
    Richardson,
}

/// Solves on `levels` meshes refined by 2 from the setup's mesh and reports the
/// observed convergence order of the stream function in the max norm.
pub fn grid_convergence(base: &ProblemSetup, levels: usize, reference: Reference<'_>) -> Result<ConvergenceStudy> {
    if levels < 3 {
        return Err(Error::Domain("a convergence study needs at least three levels".into()));
    }
    let m0 = base.mesh();
    let mut meshes = Vec::new();
    let mut fields = Vec::new();
    for k in 0..levels {
        let (nx, ny) = (m0.nx() << k, m0.ny() << k);
        let mesh = Mesh::build(m0.wall(), m0.height(), m0.half_width(), nx, ny)?;
        let setup = ProblemSetup::new(*base.gas(), base.profile(), base.rho0(), mesh, base.config().clone())?;
        let (state, _) = picard_solve(&setup, &setup.default_init())?;
        meshes.push((nx, ny));
        fields.push((setup, state.psi));
    }
    let errors: Vec<f64> = match reference {
        Reference::Exact(exact) => fields
            .iter()
            .map(|(s, psi)| {
                let m = s.mesh();
                (0..m.node_count())
                    .map(|k| {
                        let (i, j) = m.node_ij(k);
                        let (x1, x2) = m.position(i, j);
                        (psi[k] - exact(x1, x2)).abs()
                    })
                    .fold(0.0, f64::max)
            })
            .collect(),
        Reference::Richardson => fields
            .windows(2)
            .map(|w| {
                let (coarse, fine) = (&w[0], &w[1]);
                let (mc, mf) = (coarse.0.mesh(), fine.0.mesh());
                (0..mc.node_count())
                    .map(|k| {
                        let (i, j) = mc.node_ij(k);
                        (coarse.1[k] - fine.1[mf.node(2 * i, 2 * j)]).abs()
                    })
                    .fold(0.0, f64::max)
            })
            .collect(),
    };
    let orders: Vec<f64> = errors.windows(2).map(|w| (w[0] / w[1]).log2()).collect();
    let monotone = errors.windows(2).all(|w| w[1] < w[0]);
    Ok(ConvergenceStudy { meshes, errors, orders, monotone })
}
