use rayon::prelude::*;

use crate::error::{Error, Result};

/// Fixed chunk length for reductions so sums do not depend on the thread count.
const CHUNK: usize = 4096;

/// Nine-point operator on an `ni x nj` grid of unknowns.
///
/// Entry `o = (di + 1) + 3 (dj + 1)` of row `r = j ni + i` couples to unknown
/// `(i + di, j + dj)`.
#[derive(Debug, Clone, PartialEq)]
pub struct StencilMatrix {
    ni: usize,
    nj: usize,
    vals: Vec<[f64; 9]>,
}

pub const CENTER: usize = 4;

impl StencilMatrix {
    pub fn zeros(ni: usize, nj: usize) -> Self {
        Self { ni, nj, vals: vec![[0.0; 9]; ni * nj] }
    }

    pub fn identity(ni: usize, nj: usize) -> Self {
        let mut m = Self::zeros(ni, nj);
        m.vals.iter_mut().for_each(|row| row[CENTER] = 1.0);
        m
    }

    pub fn from_rows(ni: usize, nj: usize, vals: Vec<[f64; 9]>) -> Self {
        assert_eq!(vals.len(), ni * nj);
        Self { ni, nj, vals }
    }

    pub fn dims(&self) -> (usize, usize) {
        (self.ni, self.nj)
    }

    pub fn rows(&self) -> usize {
        self.vals.len()
    }

    pub fn row(&self, r: usize) -> &[f64; 9] {
        &self.vals[r]
    }

    pub fn row_mut(&mut self, r: usize) -> &mut [f64; 9] {
        &mut self.vals[r]
    }

    #[inline]
    fn apply_row(&self, r: usize, x: &[f64]) -> f64 {
        let (i, j) = (r % self.ni, r / self.ni);
        let v = &self.vals[r];
        let mut acc = 0.0;
        for dj in 0..3 {
            if (dj == 0 && j == 0) || (dj == 2 && j + 1 == self.nj) {
                continue;
            }
            let base = (j + dj - 1) * self.ni;
            for di in 0..3 {
                if (di == 0 && i == 0) || (di == 2 && i + 1 == self.ni) {
                    continue;
                }
                acc += v[di + 3 * dj] * x[base + i + di - 1];
            }
        }
        acc
    }

    pub fn matvec(&self, x: &[f64], y: &mut [f64]) {
        y.par_iter_mut().enumerate().for_each(|(r, out)| *out = self.apply_row(r, x));
    }

    /// `v^T A v`.
    pub fn quadratic_form(&self, v: &[f64]) -> f64 {
        let mut av = vec![0.0; v.len()];
        self.matvec(v, &mut av);
        dot(v, &av)
    }

    /// Largest `|a_rs - a_sr|` over stored couplings.
    pub fn asymmetry(&self) -> f64 {
        let mut worst: f64 = 0.0;
        for r in 0..self.rows() {
            let (i, j) = (r % self.ni, r / self.ni);
            for o in 0..9 {
                let (di, dj) = (o % 3, o / 3);
                if (di == 0 && i == 0) || (di == 2 && i + 1 == self.ni) || (dj == 0 && j == 0) || (dj == 2 && j + 1 == self.nj) {
                    continue;
                }
                let s = (j + dj - 1) * self.ni + i + di - 1;
                worst = worst.max((self.vals[r][o] - self.vals[s][8 - o]).abs());
            }
        }
        worst
    }

    /// Symmetric Gauss-Seidel sweep `z = M^{-1} r` with `M = (D + L) D^{-1} (D + U)`.
    fn sgs(&self, rhs: &[f64], z: &mut [f64]) {
        let (ni, nj) = (self.ni, self.nj);
        for j in 0..nj {
            for i in 0..ni {
                let r = j * ni + i;
                let v = &self.vals[r];
                let mut acc = rhs[r];
                if j > 0 {
                    let b = r - ni;
                    if i > 0 {
                        acc -= v[0] * z[b - 1];
                    }
                    acc -= v[1] * z[b];
                    if i + 1 < ni {
                        acc -= v[2] * z[b + 1];
                    }
                }
                if i > 0 {
                    acc -= v[3] * z[r - 1];
                }
                z[r] = acc / v[CENTER];
            }
        }
        for j in (0..nj).rev() {
            for i in (0..ni).rev() {
                let r = j * ni + i;
                let v = &self.vals[r];
                let mut acc = 0.0;
                if i + 1 < ni {
                    acc += v[5] * z[r + 1];
                }
                if j + 1 < nj {
                    let t = r + ni;
                    if i > 0 {
                        acc += v[6] * z[t - 1];
                    }
                    acc += v[7] * z[t];
                    if i + 1 < ni {
                        acc += v[8] * z[t + 1];
                    }
                }
                z[r] -= acc / v[CENTER];
            }
        }
    }
}

/// Deterministic parallel dot product.
pub fn dot(a: &[f64], b: &[f64]) -> f64 {
    let parts: Vec<f64> = a
        .par_chunks(CHUNK)
        .zip(b.par_chunks(CHUNK))
        .map(|(x, y)| x.iter().zip(y).map(|(p, q)| p * q).sum())
        .collect();
    parts.iter().sum()
}

#[derive(Debug, Clone, PartialEq)]
pub struct LinearSystem {
    pub matrix: StencilMatrix,
    pub rhs: Vec<f64>,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LinearReport {
    pub iterations: usize,
    /// `|b - A x| / |b|`.
    pub residual: f64,
}

/// Preconditioned conjugate gradients with a symmetric Gauss-Seidel preconditioner.
///
/// Stops at relative residual `tol`; fails after `10 * unknowns` iterations.
pub fn linear_solve(system: &LinearSystem, guess: Option<&[f64]>, tol: f64) -> Result<(Vec<f64>, LinearReport)> {
    let a = &system.matrix;
    let b = &system.rhs;
    let n = b.len();
    if a.vals.iter().any(|row| !(row[CENTER] > 0.0)) {
        return Err(Error::StateCorrupt("non-positive diagonal in linear system".into()));
    }
    let mut x = guess.map_or_else(|| vec![0.0; n], |g| g.to_vec());
    let bnorm = dot(b, b).sqrt();
    if bnorm == 0.0 {
        return Ok((vec![0.0; n], LinearReport { iterations: 0, residual: 0.0 }));
    }
    let mut r = vec![0.0; n];
    a.matvec(&x, &mut r);
    r.par_iter_mut().zip(b.par_iter()).for_each(|(ri, bi)| *ri = bi - *ri);
    let mut res = dot(&r, &r).sqrt() / bnorm;
    if res <= tol {
        return Ok((x, LinearReport { iterations: 0, residual: res }));
    }
    let mut z = vec![0.0; n];
    a.sgs(&r, &mut z);
    let mut p = z.clone();
    let mut rz = dot(&r, &z);
    let mut ap = vec![0.0; n];
    let cap = 10 * n;
    for it in 1..=cap {
        a.matvec(&p, &mut ap);
        let pap = dot(&p, &ap);
        if !(pap > 0.0) {
            return Err(Error::LinearSolveFailed { iterations: it, residual: res });
        }
        let alpha = rz / pap;
        x.par_iter_mut().zip(p.par_iter()).for_each(|(xi, pi)| *xi += alpha * pi);
        r.par_iter_mut().zip(ap.par_iter()).for_each(|(ri, api)| *ri -= alpha * api);
        res = dot(&r, &r).sqrt() / bnorm;
        if !res.is_finite() {
            return Err(Error::StateCorrupt("non-finite residual in linear solve".into()));
        }
        if res <= tol {
            // guard against drift of the recursive residual
            let mut check = vec![0.0; n];
            a.matvec(&x, &mut check);
            let true_res = check.iter().zip(b).map(|(c, bi)| (bi - c) * (bi - c)).sum::<f64>().sqrt() / bnorm;
            if true_res <= tol {
                return Ok((x, LinearReport { iterations: it, residual: true_res }));
            }
            r.iter_mut().zip(check.iter().zip(b)).for_each(|(ri, (c, bi))| *ri = bi - c);
        }
        a.sgs(&r, &mut z);
        let rz_next = dot(&r, &z);
        let beta = rz_next / rz;
        rz = rz_next;
        p.par_iter_mut().zip(z.par_iter()).for_each(|(pi, zi)| *pi = zi + beta * *pi);
    }
    Err(Error::LinearSolveFailed { iterations: cap, residual: res })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn laplacian(ni: usize, nj: usize) -> StencilMatrix {
        let mut m = StencilMatrix::zeros(ni, nj);
        for r in 0..ni * nj {
            let row = m.row_mut(r);
            row[CENTER] = 4.0;
            row[1] = -1.0;
            row[3] = -1.0;
            row[5] = -1.0;
            row[7] = -1.0;
        }
        m
    }

    #[test]
    fn identity_returns_rhs() {
        let rhs: Vec<f64> = (0..48).map(|k| (k as f64).sin()).collect();
        let sys = LinearSystem { matrix: StencilMatrix::identity(8, 6), rhs: rhs.clone() };
        let (x, rep) = linear_solve(&sys, None, 1e-12).unwrap();
        assert!(x.iter().zip(&rhs).all(|(a, b)| (a - b).abs() < 1e-14));
        assert!(rep.iterations <= 1);
    }

    #[test]
    fn laplacian_solve_meets_tolerance() {
        let m = laplacian(40, 30);
        let rhs: Vec<f64> = (0..1200).map(|k| ((k * 7919) % 13) as f64 - 6.0).collect();
        let sys = LinearSystem { matrix: m, rhs };
        let (x, rep) = linear_solve(&sys, None, 1e-10).unwrap();
        assert!(rep.residual <= 1e-10);
        let mut ax = vec![0.0; x.len()];
        sys.matrix.matvec(&x, &mut ax);
        let err: f64 = ax.iter().zip(&sys.rhs).map(|(a, b)| (a - b).powi(2)).sum::<f64>().sqrt();
        let bn: f64 = sys.rhs.iter().map(|b| b * b).sum::<f64>().sqrt();
        assert!(err / bn <= 1e-10);
        assert_eq!(sys.matrix.asymmetry(), 0.0);
    }

    #[test]
    fn zero_rhs_gives_zero() {
        let sys = LinearSystem { matrix: laplacian(5, 5), rhs: vec![0.0; 25] };
        let (x, _) = linear_solve(&sys, Some(&[1.0; 25]), 1e-10).unwrap();
        assert!(x.iter().all(|&v| v == 0.0));
    }

    #[test]
    fn rejects_bad_diagonal() {
        let sys = LinearSystem { matrix: StencilMatrix::zeros(3, 3), rhs: vec![1.0; 9] };
        assert!(matches!(linear_solve(&sys, None, 1e-10), Err(Error::StateCorrupt(_))));
    }
}
