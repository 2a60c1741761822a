use std::io::Write;

use crate::error::Result;
use crate::geometry::Mesh;

use super::fields::PrimitiveFields;

/// Half-plane fields reflected across `x2 = 0`: the flow past the symmetric body
/// `|x2| <= f(x1)`. Rows `0..=ny` of the mirrored grid hold the reflection, rows
/// `ny..=2 ny` the original (the wall row appears once on each side).
#[derive(Debug, Clone, PartialEq)]
pub struct MirroredFields {
    pub nx: usize,
    pub rows: usize,
    pub x1: Vec<f64>,
    pub x2: Vec<f64>,
    pub psi: Vec<f64>,
    pub rho: Vec<f64>,
    pub u: Vec<f64>,
    pub v: Vec<f64>,
}

impl MirroredFields {
    /// `psi(top) - psi(bottom)` along the first column.
    pub fn mass_flux(&self) -> f64 {
        let last = (self.rows - 1) * (self.nx + 1);
        self.psi[last] - self.psi[0]
    }

    /// Writes `x1,x2,psi,rho,u,v`, one row per mirrored node.
    pub fn write_csv<W: Write>(&self, out: &mut W) -> Result<()> {
        writeln!(out, "x1,x2,psi,rho,u,v")?;
        for k in 0..self.x1.len() {
            writeln!(
                out,
                "{:.11e},{:.11e},{:.11e},{:.11e},{:.11e},{:.11e}",
                self.x1[k], self.x2[k], self.psi[k], self.rho[k], self.u[k], self.v[k]
            )?;
        }
        Ok(())
    }
}

pub fn mirror_symmetric_body(mesh: &Mesh, psi: &[f64], fields: &PrimitiveFields) -> MirroredFields {
    let (nx, ny) = (mesh.nx(), mesh.ny());
    let rows = 2 * (ny + 1);
    let cap = rows * (nx + 1);
    let mut out = MirroredFields {
        nx,
        rows,
        x1: Vec::with_capacity(cap),
        x2: Vec::with_capacity(cap),
        psi: Vec::with_capacity(cap),
        rho: Vec::with_capacity(cap),
        u: Vec::with_capacity(cap),
        v: Vec::with_capacity(cap),
    };
    let push = |k: usize, sign: f64, out: &mut MirroredFields| {
        let (i, j) = mesh.node_ij(k);
        let (x1, x2) = mesh.position(i, j);
        out.x1.push(x1);
        out.x2.push(sign * x2);
        out.psi.push(sign * psi[k]);
        out.rho.push(fields.rho[k]);
        out.u.push(fields.u[k]);
        out.v.push(sign * fields.v[k]);
    };
    for j in (0..=ny).rev() {
        for i in 0..=nx {
            push(mesh.node(i, j), -1.0, &mut out);
        }
    }
    for j in 0..=ny {
        for i in 0..=nx {
            push(mesh.node(i, j), 1.0, &mut out);
        }
    }
    out
}
