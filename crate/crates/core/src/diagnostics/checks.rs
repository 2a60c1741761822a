use crate::quad::GAUSS2;
use crate::solver::{FlowState, ProblemSetup};

use super::fields::PrimitiveFields;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BernoulliCheck {
    /// `max |B - h(rho0) - F(psi)^2/2|` over nodes.
    pub max_error: f64,
    /// `max |h(rho0) + F(psi)^2/2|`.
    pub scale: f64,
}

impl BernoulliCheck {
    pub fn relative(&self) -> f64 {
        self.max_error / self.scale
    }
}

pub fn bernoulli_identity(setup: &ProblemSetup, state: &FlowState, fields: &PrimitiveFields) -> BernoulliCheck {
    let mut check = BernoulliCheck { max_error: 0.0, scale: 0.0 };
    for (b, p) in fields.bernoulli.iter().zip(&state.psi) {
        let want = setup.bernoulli(*p);
        check.max_error = check.max_error.max((b - want).abs());
        check.scale = check.scale.max(want.abs());
    }
    check
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct VorticityCheck {
    pub max_rel: f64,
    pub median_rel: f64,
    pub max_abs: f64,
    /// `max |omega_ref|` over the audited nodes.
    pub scale: f64,
    pub nodes: usize,
}

/// Discrete vorticity against `-rho u0L'(kappa(psi)) / rho0` on nodes at least five
/// cells from the boundary.
pub fn vorticity_check(setup: &ProblemSetup, state: &FlowState, fields: &PrimitiveFields) -> VorticityCheck {
    let m = setup.mesh();
    let tp = setup.tprofile();
    let mut pairs = Vec::new();
    for j in 5..=m.ny().saturating_sub(5) {
        for i in 5..=m.nx().saturating_sub(5) {
            let k = m.node(i, j);
            let kappa = tp.kappa_unchecked(state.psi[k].clamp(0.0, tp.mass_flux()));
            let reference = -fields.rho[k] * tp.du0l(kappa) / tp.rho0();
            pairs.push((fields.omega[k], reference));
        }
    }
    let scale = pairs.iter().map(|p| p.1.abs()).fold(0.0, f64::max);
    let mut abs: Vec<f64> = pairs.iter().map(|(a, b)| (a - b).abs()).collect();
    let max_abs = abs.iter().copied().fold(0.0, f64::max);
    let denom = if scale > 0.0 { scale } else { 1.0 };
    abs.sort_by(|a, b| a.partial_cmp(b).unwrap());
    let median = if abs.is_empty() { 0.0 } else { abs[abs.len() / 2] };
    VorticityCheck { max_rel: max_abs / denom, median_rel: median / denom, max_abs, scale, nodes: abs.len() }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DecayRow {
    /// Distance of the slab from the window centre.
    pub distance: f64,
    pub psi_dev: f64,
    pub grad_dev: f64,
    pub rho_dev: f64,
    pub v_abs: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct DecayTable {
    pub rows: Vec<DecayRow>,
}

impl DecayTable {
    /// Every column strictly decreases with distance.
    pub fn strictly_decreasing(&self) -> bool {
        self.rows.windows(2).all(|w| {
            let (a, b) = (&w[0], &w[1]);
            b.psi_dev < a.psi_dev && b.grad_dev < a.grad_dev && b.rho_dev < a.rho_dev && b.v_abs < a.v_abs
        })
    }
}

/// Sups over `x2` of the deviations from the upstream state on the slabs at
/// distances `N/4, N/2, 3N/4` from the bump, taking the larger of the two sides.
pub fn farfield_decay(setup: &ProblemSetup, state: &FlowState, fields: &PrimitiveFields) -> DecayTable {
    let m = setup.mesh();
    let tp = setup.tprofile();
    let n = m.half_width();
    let c = m.center();
    let rows = [0.25, 0.5, 0.75]
        .iter()
        .map(|q| {
            let d = q * n;
            let mut row = DecayRow { distance: d, psi_dev: 0.0, grad_dev: 0.0, rho_dev: 0.0, v_abs: 0.0 };
            for x in [c - d, c + d] {
                let i = ((x - m.xi(0)) / m.dxi()).round() as usize;
                for j in 0..=m.ny() {
                    let k = m.node(i, j);
                    let x2 = m.position(i, j).1;
                    let g = fields.grad_psi[k];
                    row.psi_dev = row.psi_dev.max((state.psi[k] - tp.barpsi_unchecked(x2)).abs());
                    row.grad_dev = row.grad_dev.max(g[0].hypot(g[1] - tp.rho0() * tp.u0l(x2)));
                    row.rho_dev = row.rho_dev.max((fields.rho[k] - tp.rho0()).abs());
                    row.v_abs = row.v_abs.max(fields.v[k].abs());
                }
            }
            row
        })
        .collect();
    DecayTable { rows }
}

/// `(int |grad(psi - psi_bar)|^2, int |(rho u - rho0 u0, rho v)|^2)` by 2x2 Gauss quadrature
/// over the elements.
pub fn energy_norms(setup: &ProblemSetup, state: &FlowState) -> (f64, f64) {
    let m = setup.mesh();
    let tp = setup.tprofile();
    let (dxi, deta, l) = (m.dxi(), m.deta(), m.height());
    let rho0 = tp.rho0();
    let mut acc = (0.0, 0.0);
    for c in 0..m.cell_count() {
        let [a, b, d, e] = m.cell_nodes(c);
        let (p0, p1, p2, p3) = (state.psi[a], state.psi[b], state.psi[d], state.psi[e]);
        let (i, j) = m.node_ij(a);
        let (fa, fb) = (m.wall_at(i), m.wall_at(i + 1));
        let df = (fb - fa) / dxi;
        for &s in &GAUSS2 {
            let f = fa + s * (fb - fa);
            let jac = l - f;
            for &t in &GAUSS2 {
                let eta = (j as f64 + t) * deta;
                let pxi = ((1.0 - t) * (p1 - p0) + t * (p3 - p2)) / dxi;
                let peta = ((1.0 - s) * (p2 - p0) + s * (p3 - p1)) / deta;
                let gx = pxi - (1.0 - eta) * df / jac * peta;
                let gy = peta / jac;
                let x2 = f + eta * jac;
                let w = 0.25 * dxi * deta * jac;
                let dl = gy - rho0 * tp.u0l(x2);
                let du = gy - rho0 * tp.profile().eval_unchecked(x2).0;
                acc.0 += w * (gx * gx + dl * dl);
                acc.1 += w * (gx * gx + du * du);
            }
        }
    }
    acc
}

#[derive(Debug, Clone, PartialEq)]
pub struct PositivityReport {
    /// Smallest `u` over nodes at least three cells from every corner.
    pub min_interior_u: f64,
    /// Speed at each wall corner.
    pub corner_speeds: Vec<f64>,
}

pub fn positivity_and_kutta(setup: &ProblemSetup, fields: &PrimitiveFields) -> PositivityReport {
    let m = setup.mesh();
    let corners: Vec<(usize, usize)> =
        m.wall().corners().iter().map(|&x| m.node_ij(m.wall_node_near(x))).collect();
    let mut min_u = f64::INFINITY;
    for k in 0..m.node_count() {
        let (i, j) = m.node_ij(k);
        if corners.iter().any(|&(ci, cj)| i.abs_diff(ci) < 3 && j.abs_diff(cj) < 3) {
            continue;
        }
        min_u = min_u.min(fields.u[k]);
    }
    let corner_speeds = corners
        .iter()
        .map(|&(i, j)| {
            let k = m.node(i, j);
            fields.u[k].hypot(fields.v[k])
        })
        .collect();
    PositivityReport { min_interior_u: min_u, corner_speeds }
}
