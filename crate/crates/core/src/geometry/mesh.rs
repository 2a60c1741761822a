use crate::error::{Error, Result};
use crate::quad::GAUSS2;

use super::wall::WallShape;

/// Precomputed bilinear-element data on one cell of the computational rectangle.
///
/// Local node order is `(i, j), (i + 1, j), (i, j + 1), (i + 1, j + 1)`.
#[derive(Debug, Clone, Copy)]
pub struct Element {
    /// `int grad(phi_a) . grad(phi_b) dx` over the physical cell.
    pub stiffness: [[f64; 4]; 4],
    /// `int phi_a dx` over the physical cell.
    pub load: [f64; 4],
    /// Inverse-map factors `(d eta/d x1, d eta/d x2)` at the cell centre.
    pub center_metric: [f64; 2],
}

/// Uniform grid on `[c - N, c + N] x [0, 1]` pulled onto the physical domain by
/// `x1 = xi`, `x2 = f(xi) + eta (L - f(xi))`.
///
/// The lateral window is centred on the wall's support centre `c`. Elements are
/// isoparametric bilinear quads through the mapped nodes.
#[derive(Debug, Clone)]
pub struct Mesh {
    wall: WallShape,
    l: f64,
    half_width: f64,
    nx: usize,
    ny: usize,
    xi0: f64,
    dxi: f64,
    deta: f64,
    f_nodes: Vec<f64>,
    slope_nodes: Vec<f64>,
    elements: Vec<Element>,
}

impl Mesh {
    pub fn build(wall: &WallShape, l: f64, half_width: f64, nx: usize, ny: usize) -> Result<Self> {
        let j = wall.max_height();
        if !(l > j + 1.0) {
            return Err(Error::Config(format!("L = {l} must exceed wall height + 1 = {}", j + 1.0)));
        }
        if !(half_width >= 4.0) {
            return Err(Error::Config(format!("N = {half_width} must be at least 4")));
        }
        if nx < 16 || ny < 16 {
            return Err(Error::Config(format!("mesh {nx}x{ny} cells is below the 16x16 minimum")));
        }
        let (a, b) = wall.support();
        let xi0 = wall.center() - half_width;
        if a < xi0 || b > xi0 + 2.0 * half_width {
            return Err(Error::Config("wall support does not fit inside the lateral window".into()));
        }
        let dxi = 2.0 * half_width / nx as f64;
        let deta = 1.0 / ny as f64;
        let f_nodes: Vec<f64> = (0..=nx).map(|i| wall.f(xi0 + i as f64 * dxi)).collect();
        let slope_nodes: Vec<f64> = (0..=nx).map(|i| wall.slope(xi0 + i as f64 * dxi)).collect();
        let mut mesh = Self {
            wall: wall.clone(),
            l,
            half_width,
            nx,
            ny,
            xi0,
            dxi,
            deta,
            f_nodes,
            slope_nodes,
            elements: Vec::new(),
        };
        mesh.elements = (0..nx * ny).map(|e| mesh.element_data(e % nx, e / nx)).collect();
        Ok(mesh)
    }

    fn element_data(&self, i: usize, j: usize) -> Element {
        let mut stiffness = [[0.0; 4]; 4];
        let mut load = [0.0; 4];
        let w = 0.25 * self.dxi * self.deta;
        // isoparametric: the wall is linear across the cell
        let (fa, fb) = (self.f_nodes[i], self.f_nodes[i + 1]);
        let df = (fb - fa) / self.dxi;
        for &s in &GAUSS2 {
            let jac = self.l - (fa + s * (fb - fa));
            for &t in &GAUSS2 {
                let eta = (j as f64 + t) * self.deta;
                let ex = -(1.0 - eta) * df / jac;
                let ey = 1.0 / jac;
                let phi = [(1.0 - s) * (1.0 - t), s * (1.0 - t), (1.0 - s) * t, s * t];
                let dxi_phi = [-(1.0 - t), 1.0 - t, -t, t].map(|v| v / self.dxi);
                let deta_phi = [-(1.0 - s), -s, 1.0 - s, s].map(|v| v / self.deta);
                let grad: [[f64; 2]; 4] =
                    std::array::from_fn(|a| [dxi_phi[a] + ex * deta_phi[a], ey * deta_phi[a]]);
                for a in 0..4 {
                    load[a] += w * jac * phi[a];
                    for b in 0..4 {
                        stiffness[a][b] +=
                            w * jac * (grad[a][0] * grad[b][0] + grad[a][1] * grad[b][1]);
                    }
                }
            }
        }
        let etac = (j as f64 + 0.5) * self.deta;
        let jac = self.l - 0.5 * (fa + fb);
        let center_metric = [-(1.0 - etac) * df / jac, 1.0 / jac];
        Element { stiffness, load, center_metric }
    }

    /// Wall height interpolated linearly between nodes, the boundary the elements see.
    pub fn wall_interp(&self, x1: f64) -> f64 {
        let u = ((x1 - self.xi0) / self.dxi).clamp(0.0, self.nx as f64);
        let i = (u.floor() as usize).min(self.nx - 1);
        let s = u - i as f64;
        (1.0 - s) * self.f_nodes[i] + s * self.f_nodes[i + 1]
    }

    pub fn wall(&self) -> &WallShape {
        &self.wall
    }

    /// Top height `L`.
    pub fn height(&self) -> f64 {
        self.l
    }

    /// Lateral half-width `N`.
    pub fn half_width(&self) -> f64 {
        self.half_width
    }

    pub fn nx(&self) -> usize {
        self.nx
    }

    pub fn ny(&self) -> usize {
        self.ny
    }

    pub fn dxi(&self) -> f64 {
        self.dxi
    }

    pub fn deta(&self) -> f64 {
        self.deta
    }

    /// Centre of the lateral window.
    pub fn center(&self) -> f64 {
        self.xi0 + self.half_width
    }

    pub fn node_count(&self) -> usize {
        (self.nx + 1) * (self.ny + 1)
    }

    pub fn cell_count(&self) -> usize {
        self.nx * self.ny
    }

    /// Row-major node index, `eta` outer.
    #[inline]
    pub fn node(&self, i: usize, j: usize) -> usize {
        j * (self.nx + 1) + i
    }

    #[inline]
    pub fn node_ij(&self, k: usize) -> (usize, usize) {
        (k % (self.nx + 1), k / (self.nx + 1))
    }

    #[inline]
    pub fn cell(&self, i: usize, j: usize) -> usize {
        j * self.nx + i
    }

    /// Global node indices of a cell in local order.
    #[inline]
    pub fn cell_nodes(&self, c: usize) -> [usize; 4] {
        let (i, j) = (c % self.nx, c / self.nx);
        let k = self.node(i, j);
        [k, k + 1, k + self.nx + 1, k + self.nx + 2]
    }

    pub fn is_boundary(&self, i: usize, j: usize) -> bool {
        i == 0 || j == 0 || i == self.nx || j == self.ny
    }

    #[inline]
    pub fn xi(&self, i: usize) -> f64 {
        self.xi0 + i as f64 * self.dxi
    }

    #[inline]
    pub fn eta(&self, j: usize) -> f64 {
        j as f64 * self.deta
    }

    pub fn wall_at(&self, i: usize) -> f64 {
        self.f_nodes[i]
    }

    pub fn wall_slope_at(&self, i: usize) -> f64 {
        self.slope_nodes[i]
    }

    /// Physical coordinates of node `(i, j)`.
    #[inline]
    pub fn position(&self, i: usize, j: usize) -> (f64, f64) {
        let f = self.f_nodes[i];
        (self.xi(i), f + self.eta(j) * (self.l - f))
    }

    /// Forward-map derivatives `(d x2/d xi, d x2/d eta)` at node `(i, j)`.
    pub fn forward_metric(&self, i: usize, j: usize) -> (f64, f64) {
        (self.slope_nodes[i] * (1.0 - self.eta(j)), self.l - self.f_nodes[i])
    }

    /// Inverse-map factors `(d eta/d x1, d eta/d x2)` at node `(i, j)`.
    pub fn inverse_metric(&self, i: usize, j: usize) -> (f64, f64) {
        let jac = self.l - self.f_nodes[i];
        (-(1.0 - self.eta(j)) * self.slope_nodes[i] / jac, 1.0 / jac)
    }

    pub fn elements(&self) -> &[Element] {
        &self.elements
    }

    /// `int_Omega 1 dx` by the element quadrature.
    pub fn area(&self) -> f64 {
        self.elements.iter().map(|e| e.load.iter().sum::<f64>()).sum()
    }

    /// Computational coordinates of a physical point, or `None` outside the window.
    pub fn locate(&self, x1: f64, x2: f64) -> Option<(f64, f64)> {
        if x1 < self.xi0 - 1e-12 || x1 > self.xi0 + 2.0 * self.half_width + 1e-12 {
            return None;
        }
        let f = self.wall_interp(x1);
        let eta = (x2 - f) / (self.l - f);
        if !(-1e-12..=1.0 + 1e-12).contains(&eta) {
            return None;
        }
        Some((x1, eta.clamp(0.0, 1.0)))
    }

    /// Bilinear interpolation of a nodal field at computational coordinates.
    pub fn interpolate(&self, field: &[f64], xi: f64, eta: f64) -> f64 {
        let u = ((xi - self.xi0) / self.dxi).clamp(0.0, self.nx as f64);
        let v = (eta / self.deta).clamp(0.0, self.ny as f64);
        let i = (u.floor() as usize).min(self.nx - 1);
        let j = (v.floor() as usize).min(self.ny - 1);
        let (s, t) = (u - i as f64, v - j as f64);
        let k = self.node(i, j);
        let n = self.nx + 1;
        (1.0 - t) * ((1.0 - s) * field[k] + s * field[k + 1])
            + t * ((1.0 - s) * field[k + n] + s * field[k + n + 1])
    }

    /// Bilinear transfer of a nodal field onto the nodes of `target`, which must share
    /// this mesh's computational window.
    pub fn transfer(&self, field: &[f64], target: &Mesh) -> Vec<f64> {
        (0..target.node_count())
            .map(|k| {
                let (i, j) = target.node_ij(k);
                self.interpolate(field, target.xi(i), target.eta(j))
            })
            .collect()
    }

    /// Nodes within `3 max(dx1, dx2)` of each wall corner.
    pub fn corner_cells(&self) -> Vec<Vec<usize>> {
        let radius = 3.0 * self.dxi.max(self.deta * self.l);
        self.wall
            .corners()
            .into_iter()
            .map(|c| {
                (0..self.node_count())
                    .filter(|&k| {
                        let (i, j) = self.node_ij(k);
                        let (x1, x2) = self.position(i, j);
                        (x1 - c).hypot(x2 - self.wall.f(c)) <= radius
                    })
                    .collect()
            })
            .collect()
    }

    /// Index of the node closest to a physical point on the wall.
    pub fn wall_node_near(&self, x1: f64) -> usize {
        let i = ((x1 - self.xi0) / self.dxi).round().clamp(0.0, self.nx as f64) as usize;
        self.node(i, 0)
    }
}
