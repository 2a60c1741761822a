use std::io::Write;

use rayon::prelude::*;

use crate::error::Result;
use crate::geometry::Mesh;
use crate::solver::{FlowState, ProblemSetup};

/// Nodal primitive variables recovered from a stream function.
#[derive(Debug, Clone, PartialEq)]
pub struct PrimitiveFields {
    pub rho: Vec<f64>,
    pub u: Vec<f64>,
    pub v: Vec<f64>,
    pub mach: Vec<f64>,
    pub omega: Vec<f64>,
    /// `(u^2 + v^2)/2 + h(rho)`.
    pub bernoulli: Vec<f64>,
    /// Physical gradient of `psi`.
    pub grad_psi: Vec<[f64; 2]>,
}

/// Physical gradient of a nodal field from a least-squares quadratic fit in
/// `(x1, x2)` over the 3x3 block of nodes around (or, on the boundary, next to)
/// each node.
///
/// Fitting in physical coordinates keeps the result second-order accurate however
/// sharply the mesh lines bend with the wall.
pub fn nodal_gradient(mesh: &Mesh, g: &[f64]) -> Vec<[f64; 2]> {
    let (nx, ny) = (mesh.nx(), mesh.ny());
    let (hx, hy) = (mesh.dxi(), mesh.deta() * mesh.height());
    (0..mesh.node_count())
        .into_par_iter()
        .map(|k| {
            let (i, j) = mesh.node_ij(k);
            let (xt, yt) = mesh.position(i, j);
            let i0 = i.saturating_sub(1).min(nx - 2);
            let j0 = j.saturating_sub(1).min(ny - 2);
            let mut ata = [[0.0; 6]; 6];
            let mut atb = [0.0; 6];
            for b in j0..j0 + 3 {
                for a in i0..i0 + 3 {
                    let (x, y) = mesh.position(a, b);
                    let (dx, dy) = ((x - xt) / hx, (y - yt) / hy);
                    let row = [1.0, dx, dy, 0.5 * dx * dx, dx * dy, 0.5 * dy * dy];
                    let val = g[mesh.node(a, b)];
                    for p in 0..6 {
                        atb[p] += row[p] * val;
                        for q in 0..6 {
                            ata[p][q] += row[p] * row[q];
                        }
                    }
                }
            }
            let c = solve6(ata, atb);
            [c[1] / hx, c[2] / hy]
        })
        .collect()
}

/// As [`nodal_gradient`], keeping only the normal component on the wall and the
/// top, where `psi` is constant along the boundary.
pub fn stream_gradient(mesh: &Mesh, psi: &[f64]) -> Vec<[f64; 2]> {
    let mut g = nodal_gradient(mesh, psi);
    for i in 0..=mesh.nx() {
        let k = mesh.node(i, 0);
        let slope = mesh.wall_slope_at(i);
        let (nx, ny) = (-slope, 1.0);
        let proj = (g[k][0] * nx + g[k][1] * ny) / (nx * nx + ny * ny);
        g[k] = [proj * nx, proj * ny];
        let top = mesh.node(i, mesh.ny());
        g[top][0] = 0.0;
    }
    g
}

/// Gaussian elimination with partial pivoting on a 6x6 system.
fn solve6(mut a: [[f64; 6]; 6], mut b: [f64; 6]) -> [f64; 6] {
    for col in 0..6 {
        let piv = (col..6).max_by(|&r, &s| a[r][col].abs().partial_cmp(&a[s][col].abs()).unwrap()).unwrap();
        a.swap(col, piv);
        b.swap(col, piv);
        for r in col + 1..6 {
            let m = a[r][col] / a[col][col];
            for c in col..6 {
                a[r][c] -= m * a[col][c];
            }
            b[r] -= m * b[col];
        }
    }
    let mut x = [0.0; 6];
    for r in (0..6).rev() {
        let s: f64 = (r + 1..6).map(|c| a[r][c] * x[c]).sum();
        x[r] = (b[r] - s) / a[r][r];
    }
    x
}

/// Cell values averaged onto nodes.
pub fn cells_to_nodes(mesh: &Mesh, cells: &[f64]) -> Vec<f64> {
    let (nx, ny) = (mesh.nx(), mesh.ny());
    (0..mesh.node_count())
        .map(|k| {
            let (i, j) = mesh.node_ij(k);
            let mut acc = 0.0;
            let mut n = 0.0;
            for ci in [i.wrapping_sub(1), i] {
                for cj in [j.wrapping_sub(1), j] {
                    if ci < nx && cj < ny {
                        acc += cells[mesh.cell(ci, cj)];
                        n += 1.0;
                    }
                }
            }
            acc / n
        })
        .collect()
}

/// Primitive variables at every node, with `rho = H(|grad psi|^2, psi)` from the
/// untruncated density map (sonic where the momentum exceeds the critical one).
pub fn primitives(setup: &ProblemSetup, state: &FlowState) -> PrimitiveFields {
    let mesh = setup.mesh();
    let gas = setup.gas();
    let grad_psi = stream_gradient(mesh, &state.psi);
    let rho: Vec<f64> = grad_psi
        .par_iter()
        .zip(state.psi.par_iter())
        .map(|(g, p)| setup.physical_density(g[0] * g[0] + g[1] * g[1], *p).0)
        .collect();
    let u: Vec<f64> = grad_psi.iter().zip(&rho).map(|(g, r)| g[1] / r).collect();
    let v: Vec<f64> = grad_psi.iter().zip(&rho).map(|(g, r)| -g[0] / r).collect();
    let gu = nodal_gradient(mesh, &u);
    let gv = nodal_gradient(mesh, &v);
    let omega = gv.iter().zip(&gu).map(|(a, b)| a[0] - b[1]).collect();
    let (mut mach, mut bernoulli) = (Vec::with_capacity(rho.len()), Vec::with_capacity(rho.len()));
    for k in 0..rho.len() {
        let q2 = u[k] * u[k] + v[k] * v[k];
        let c2 = gas.gamma() * rho[k].powf(gas.gamma() - 1.0);
        mach.push((q2 / c2).sqrt());
        bernoulli.push(0.5 * q2 + gas.enthalpy_unchecked(rho[k]));
    }
    PrimitiveFields { rho, u, v, mach, omega, bernoulli, grad_psi }
}

/// Writes `x1,x2,psi,rho,u,v,mach,omega`, one row per node, `eta` outer.
/// Negative zeros are printed as `0`.
pub fn write_field_csv<W: Write>(out: &mut W, mesh: &Mesh, psi: &[f64], fields: &PrimitiveFields) -> Result<()> {
    writeln!(out, "x1,x2,psi,rho,u,v,mach,omega")?;
    for k in 0..mesh.node_count() {
        let (i, j) = mesh.node_ij(k);
        let (x1, x2) = mesh.position(i, j);
        writeln!(
            out,
            "{:.11e},{:.11e},{:.11e},{:.11e},{:.11e},{:.11e},{:.11e},{:.11e}",
            x1 + 0.0,
            x2 + 0.0,
            psi[k] + 0.0,
            fields.rho[k],
            fields.u[k] + 0.0,
            fields.v[k] + 0.0,
            fields.mach[k],
            fields.omega[k] + 0.0
        )?;
    }
    Ok(())
}
