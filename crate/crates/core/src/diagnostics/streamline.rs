use crate::geometry::Mesh;

use super::fields::PrimitiveFields;

#[derive(Debug, Clone, PartialEq)]
pub enum StreamlineEnd {
    /// Reached the outflow edge of the window.
    Outflow,
    /// Met `u <= 0`; the path stops there.
    Reversed,
    /// Left the domain through the wall or the top.
    Escaped,
    /// Step size collapsed below the floor.
    Stalled,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Streamline {
    pub seed: [f64; 2],
    pub points: Vec<[f64; 2]>,
    /// Interpolated `psi` at each point.
    pub psi: Vec<f64>,
    pub bernoulli: Vec<f64>,
    /// `omega / rho` at each point.
    pub vorticity_ratio: Vec<f64>,
    pub end: StreamlineEnd,
}

fn spread(v: &[f64]) -> f64 {
    let (lo, hi) = v.iter().fold((f64::INFINITY, f64::NEG_INFINITY), |(a, b), &x| (a.min(x), b.max(x)));
    if v.is_empty() {
        0.0
    } else {
        hi - lo
    }
}

impl Streamline {
    /// `(max B - min B) / mean |B|` along the path.
    pub fn bernoulli_drift(&self) -> f64 {
        let mean = self.bernoulli.iter().map(|b| b.abs()).sum::<f64>() / self.bernoulli.len().max(1) as f64;
        spread(&self.bernoulli) / mean
    }

    /// `(max - min) / mean |.|` of `omega / rho` along the path.
    pub fn vorticity_drift(&self) -> f64 {
        let mean = self.vorticity_ratio.iter().map(|w| w.abs()).sum::<f64>() / self.vorticity_ratio.len().max(1) as f64;
        if mean > 0.0 {
            spread(&self.vorticity_ratio) / mean
        } else {
            spread(&self.vorticity_ratio)
        }
    }

    pub fn psi_drift(&self) -> f64 {
        spread(&self.psi)
    }
}

/// Seeds at ten equally spaced heights one unit inside the inflow edge.
pub fn default_seeds(mesh: &Mesh) -> Vec<[f64; 2]> {
    let x1 = mesh.xi(0) + 1.0;
    let f = mesh.wall().f(x1);
    (1..=10).map(|k| [x1, f + (mesh.height() - f) * k as f64 / 11.0]).collect()
}

const A: [[f64; 6]; 6] = [
    [1.0 / 5.0, 0.0, 0.0, 0.0, 0.0, 0.0],
    [3.0 / 40.0, 9.0 / 40.0, 0.0, 0.0, 0.0, 0.0],
    [44.0 / 45.0, -56.0 / 15.0, 32.0 / 9.0, 0.0, 0.0, 0.0],
    [19372.0 / 6561.0, -25360.0 / 2187.0, 64448.0 / 6561.0, -212.0 / 729.0, 0.0, 0.0],
    [9017.0 / 3168.0, -355.0 / 33.0, 46732.0 / 5247.0, 49.0 / 176.0, -5103.0 / 18656.0, 0.0],
    [35.0 / 384.0, 0.0, 500.0 / 1113.0, 125.0 / 192.0, -2187.0 / 6784.0, 11.0 / 84.0],
];
const C: [f64; 7] = [0.0, 1.0 / 5.0, 3.0 / 10.0, 4.0 / 5.0, 8.0 / 9.0, 1.0, 1.0];
const B5: [f64; 7] = [35.0 / 384.0, 0.0, 500.0 / 1113.0, 125.0 / 192.0, -2187.0 / 6784.0, 11.0 / 84.0, 0.0];
const B4: [f64; 7] = [
    5179.0 / 57600.0,
    0.0,
    7571.0 / 16695.0,
    393.0 / 640.0,
    -92097.0 / 339200.0,
    187.0 / 2100.0,
    1.0 / 40.0,
];

enum Slope {
    Ok(f64),
    Reversed,
    Outside,
}

/// Integrates `dx2/dx1 = v/u` from `seed` to the outflow edge with an adaptive
/// Dormand-Prince 5(4) pair, sampling `psi`, `B` and `omega/rho` at each accepted step.
pub fn trace_streamline(mesh: &Mesh, psi: &[f64], fields: &PrimitiveFields, seed: [f64; 2]) -> Streamline {
    let omega_ratio: Vec<f64> = fields.omega.iter().zip(&fields.rho).map(|(w, r)| w / r).collect();
    let slope = |x1: f64, x2: f64| -> Slope {
        match mesh.locate(x1, x2) {
            None => Slope::Outside,
            Some((xi, eta)) => {
                let u = mesh.interpolate(&fields.u, xi, eta);
                if u <= 0.0 {
                    Slope::Reversed
                } else {
                    Slope::Ok(mesh.interpolate(&fields.v, xi, eta) / u)
                }
            }
        }
    };
    let mut line = Streamline {
        seed,
        points: Vec::new(),
        psi: Vec::new(),
        bernoulli: Vec::new(),
        vorticity_ratio: Vec::new(),
        end: StreamlineEnd::Outflow,
    };
    let record = |line: &mut Streamline, x1: f64, x2: f64| {
        if let Some((xi, eta)) = mesh.locate(x1, x2) {
            line.points.push([x1, x2]);
            line.psi.push(mesh.interpolate(psi, xi, eta));
            line.bernoulli.push(mesh.interpolate(&fields.bernoulli, xi, eta));
            line.vorticity_ratio.push(mesh.interpolate(&omega_ratio, xi, eta));
        }
    };
    let x_end = mesh.xi(mesh.nx());
    let tol = 1e-9 * mesh.height();
    let h_max = mesh.dxi();
    let h_min = 1e-8 * mesh.dxi();
    let (mut x, mut y) = (seed[0], seed[1]);
    let mut h = 0.25 * h_max;
    record(&mut line, x, y);
    while x < x_end {
        h = h.min(x_end - x);
        let mut k = [0.0; 7];
        let mut failed = None;
        for s in 0..7 {
            let yi = if s == 0 { y } else { y + h * (0..s).map(|r| A[s - 1][r] * k[r]).sum::<f64>() };
            match slope(x + C[s] * h, yi) {
                Slope::Ok(v) => k[s] = v,
                Slope::Reversed => {
                    failed = Some(StreamlineEnd::Reversed);
                    break;
                }
                Slope::Outside => {
                    failed = Some(StreamlineEnd::Escaped);
                    break;
                }
            }
        }
        if let Some(end) = failed {
            if h > h_min {
                h *= 0.5;
                continue;
            }
            line.end = end;
            return line;
        }
        let y5 = y + h * (0..7).map(|s| B5[s] * k[s]).sum::<f64>();
        let err = h * (0..7).map(|s| (B5[s] - B4[s]) * k[s]).sum::<f64>().abs();
        if err <= tol || h <= h_min {
            x += h;
            y = y5;
            record(&mut line, x, y);
        }
        let factor = if err == 0.0 { 4.0 } else { (0.9 * (tol / err).powf(0.2)).clamp(0.2, 4.0) };
        h = (h * factor).min(h_max);
        if h < h_min {
            line.end = StreamlineEnd::Stalled;
            return line;
        }
    }
    line
}
