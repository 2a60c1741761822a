use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::farfield::FarfieldTriple;

use super::linear::{linear_solve, LinearSystem, StencilMatrix, CENTER};
use super::setup::ProblemSetup;

/// Cell-centred quantities evaluated from a nodal stream function.
#[derive(Debug, Clone, PartialEq)]
pub struct CellFields {
    /// `psi` at cell centres.
    pub psi: Vec<f64>,
    /// Physical gradient of `psi`.
    pub gradient: Vec<[f64; 2]>,
    /// Truncated density `H`.
    pub density: Vec<f64>,
    /// `|grad psi| / Sigma(B(psi))`.
    pub ratio: Vec<f64>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct FlowState {
    /// Nodal stream function.
    pub psi: Vec<f64>,
    pub cells: CellFields,
    pub iterations: usize,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Certificate {
    /// `max |grad psi| / Sigma(B(psi))` over cells.
    pub m_ratio: f64,
    pub truncation_active: bool,
    pub max_mach: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct SolveReport {
    pub converged: bool,
    pub iterations: usize,
    /// `max |psi^{k+1} - psi^k|` of the last step.
    pub final_update: f64,
    /// Relative residual of the last linear solve.
    pub linear_residual: f64,
    pub linear_iterations: usize,
    /// Relaxation in effect at exit.
    pub theta: f64,
    pub m_ratio: f64,
    pub truncation_active: bool,
    pub max_mach: f64,
    /// Update norm after each Picard step.
    pub history: Vec<f64>,
}

/// Evaluates gradient, density and ratio at every cell centre.
pub fn cell_fields(setup: &ProblemSetup, psi: &[f64]) -> Result<CellFields> {
    let mesh = setup.mesh();
    let (dxi, deta) = (mesh.dxi(), mesh.deta());
    let n = mesh.cell_count();
    let out: Vec<Result<(f64, [f64; 2], f64, f64)>> = (0..n)
        .into_par_iter()
        .map(|c| {
            let [a, b, d, e] = mesh.cell_nodes(c);
            let (p0, p1, p2, p3) = (psi[a], psi[b], psi[d], psi[e]);
            let pxi = 0.5 * ((p1 - p0) + (p3 - p2)) / dxi;
            let peta = 0.5 * ((p2 - p0) + (p3 - p1)) / deta;
            let [ex, ey] = mesh.elements()[c].center_metric;
            let g = [pxi + ex * peta, ey * peta];
            let pc = 0.25 * (p0 + p1 + p2 + p3);
            let m_sq = g[0] * g[0] + g[1] * g[1];
            if !m_sq.is_finite() || !pc.is_finite() {
                return Err(Error::StateCorrupt(format!("non-finite gradient in cell {c}")));
            }
            let (rho, ratio) = setup.density(m_sq, pc)?;
            Ok((pc, g, rho, ratio))
        })
        .collect();
    let mut f = CellFields {
        psi: Vec::with_capacity(n),
        gradient: Vec::with_capacity(n),
        density: Vec::with_capacity(n),
        ratio: Vec::with_capacity(n),
    };
    for r in out {
        let (pc, g, rho, ratio) = r?;
        f.psi.push(pc);
        f.gradient.push(g);
        f.density.push(rho);
        f.ratio.push(ratio);
    }
    Ok(f)
}

/// Frozen-coefficient system for `div(sigma grad psi) = r` on interior nodes, given
/// per-cell `sigma` and `r`, with boundary values taken from `dirichlet`.
pub fn assemble_frozen(setup_mesh: &crate::geometry::Mesh, sigma: &[f64], r: &[f64], dirichlet: &[f64]) -> Result<LinearSystem> {
    let mesh = setup_mesh;
    let (nx, ny) = (mesh.nx(), mesh.ny());
    let (ni, nj) = (nx - 1, ny - 1);
    if sigma.iter().chain(r).any(|v| !v.is_finite()) {
        return Err(Error::StateCorrupt("non-finite coefficient".into()));
    }
    let rows: Vec<([f64; 9], f64)> = (0..ni * nj)
        .into_par_iter()
        .map(|row| {
            let (i, j) = (row % ni + 1, row / ni + 1);
            let mut vals = [0.0; 9];
            let mut rhs = 0.0;
            // the four cells around node (i, j) and this node's local index in each
            for (ci, cj, local) in [(i - 1, j - 1, 3), (i, j - 1, 2), (i - 1, j, 1), (i, j, 0)] {
                let c = mesh.cell(ci, cj);
                let el = &mesh.elements()[c];
                let nodes = mesh.cell_nodes(c);
                let s = sigma[c];
                rhs -= r[c] * el.load[local];
                for (b, &g) in nodes.iter().enumerate() {
                    let (gi, gj) = mesh.node_ij(g);
                    let k = s * el.stiffness[local][b];
                    if mesh.is_boundary(gi, gj) {
                        rhs -= k * dirichlet[g];
                    } else {
                        vals[(gi + 1 - i) + 3 * (gj + 1 - j)] += k;
                    }
                }
            }
            (vals, rhs)
        })
        .collect();
    let (vals, rhs): (Vec<[f64; 9]>, Vec<f64>) = rows.into_iter().unzip();
    if vals.iter().any(|v| !(v[CENTER] > 0.0)) {
        return Err(Error::StateCorrupt("non-positive diagonal".into()));
    }
    Ok(LinearSystem { matrix: StencilMatrix::from_rows(ni, nj, vals), rhs })
}

/// Linearised system at `psi_k`: `sigma = 1/H`, `r = W(psi) H` per cell.
pub fn assemble(setup: &ProblemSetup, psi_k: &[f64]) -> Result<(LinearSystem, CellFields)> {
    let cells = cell_fields(setup, psi_k)?;
    let tp = setup.tprofile();
    let sigma: Vec<f64> = cells.density.iter().map(|h| 1.0 / h).collect();
    let r: Vec<f64> = cells.psi.iter().zip(&cells.density).map(|(p, h)| tp.memory_w(*p) * h).collect();
    Ok((assemble_frozen(setup.mesh(), &sigma, &r, setup.boundary())?, cells))
}

fn interior(setup: &ProblemSetup, psi: &[f64]) -> Vec<f64> {
    let m = setup.mesh();
    let ni = m.nx() - 1;
    (0..ni * (m.ny() - 1)).map(|r| psi[m.node(r % ni + 1, r / ni + 1)]).collect()
}

/// Runs the relaxed Picard loop to tolerance or the iteration cap.
///
/// A run that hits the cap is returned with `converged == false`.
pub fn picard_iterate(setup: &ProblemSetup, psi_init: &[f64]) -> Result<(FlowState, SolveReport)> {
    let mesh = setup.mesh();
    let cfg = setup.config();
    if psi_init.len() != mesh.node_count() {
        return Err(Error::Domain("initial field has the wrong length".into()));
    }
    let ni = mesh.nx() - 1;
    let mut psi = psi_init.to_vec();
    for (k, v) in psi.iter_mut().enumerate() {
        let (i, j) = mesh.node_ij(k);
        if mesh.is_boundary(i, j) {
            *v = setup.boundary()[k];
        }
    }
    let tol = cfg.picard_tol * setup.mass_flux();
    let mut theta = cfg.theta;
    let mut halvings = 0;
    let mut prev = f64::INFINITY;
    let mut history = Vec::new();
    let mut linear_residual = 0.0;
    let mut linear_iterations = 0;
    let mut converged = false;
    let mut iterations = 0;
    let mut update = f64::INFINITY;
    while iterations < cfg.max_iters {
        iterations += 1;
        let (sys, _) = assemble(setup, &psi)?;
        let current = interior(setup, &psi);
        let (x, rep) = linear_solve(&sys, Some(&current), cfg.lin_tol)?;
        linear_residual = rep.residual;
        linear_iterations += rep.iterations;
        let full = x.iter().zip(&current).map(|(a, b)| (a - b).abs()).fold(0.0, f64::max);
        if !full.is_finite() {
            return Err(Error::StateCorrupt("non-finite Picard update".into()));
        }
        if theta * full > prev && halvings < 3 {
            theta *= 0.5;
            halvings += 1;
        }
        update = theta * full;
        for (r, (xi, ci)) in x.iter().zip(&current).enumerate() {
            psi[mesh.node(r % ni + 1, r / ni + 1)] = ci + theta * (xi - ci);
        }
        history.push(update);
        prev = update;
        if update <= tol {
            converged = true;
            break;
        }
    }
    let cells = cell_fields(setup, &psi)?;
    let state = FlowState { psi, cells, iterations };
    let cert = certify(setup, &state);
    let report = SolveReport {
        converged,
        iterations,
        final_update: update,
        linear_residual,
        linear_iterations,
        theta,
        m_ratio: cert.m_ratio,
        truncation_active: cert.truncation_active,
        max_mach: cert.max_mach,
        history,
    };
    Ok((state, report))
}

/// As [`picard_iterate`], but a run that hits the cap is an error.
pub fn picard_solve(setup: &ProblemSetup, psi_init: &[f64]) -> Result<(FlowState, SolveReport)> {
    let (state, report) = picard_iterate(setup, psi_init)?;
    if !report.converged {
        return Err(Error::NoConvergence { iterations: report.iterations, update: report.final_update });
    }
    Ok((state, report))
}

/// Subsonic certificate of a state. Mach numbers use the untruncated density.
pub fn certify(setup: &ProblemSetup, state: &FlowState) -> Certificate {
    let gas = setup.gas();
    let c = &state.cells;
    let mut m_ratio: f64 = 0.0;
    let mut max_mach: f64 = 0.0;
    for (g, p) in c.gradient.iter().zip(&c.psi) {
        let m_sq = g[0] * g[0] + g[1] * g[1];
        let (rho, ratio) = setup.physical_density(m_sq, *p);
        m_ratio = m_ratio.max(ratio);
        let sound = (gas.gamma() * rho.powf(gas.gamma() - 1.0)).sqrt();
        max_mach = max_mach.max(m_sq.sqrt() / rho / sound);
    }
    Certificate { m_ratio, truncation_active: m_ratio > setup.config().activation(), max_mach }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BoundViolations {
    /// `max (psi - psi_bar)^+`.
    pub above_upstream: f64,
    /// `max (psi_hat - psi)^+` over nodes with `x2 >= J`.
    pub below_farfield: f64,
    /// `max (-psi)^+`.
    pub negative: f64,
}

impl BoundViolations {
    pub fn max(&self) -> f64 {
        self.above_upstream.max(self.below_farfield).max(self.negative)
    }
}

pub fn check_bounds(setup: &ProblemSetup, state: &FlowState, triple: &FarfieldTriple) -> BoundViolations {
    let m = setup.mesh();
    let tp = setup.tprofile();
    let j_top = triple.wall_height();
    let mut v = BoundViolations { above_upstream: 0.0, below_farfield: 0.0, negative: 0.0 };
    for (k, &p) in state.psi.iter().enumerate() {
        let (i, j) = m.node_ij(k);
        let x2 = m.position(i, j).1;
        v.above_upstream = v.above_upstream.max(p - tp.barpsi_unchecked(x2));
        if x2 >= j_top {
            v.below_farfield = v.below_farfield.max(triple.psihat(x2) - p);
        }
        v.negative = v.negative.max(-p);
    }
    v
}
