use std::path::Path;

use crate::error::{Error, Result};
use crate::upstream::read_two_column_csv;

/// Half-width of the smoothed apex of the corner bump.
pub const CORNER_APEX_HALFWIDTH: f64 = 0.1;

/// One smooth bump `height * exp(1 - 1/(1 - z^2))`, `z` mapping `[start, start + width]` to `[-1, 1]`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BumpSpec {
    pub start: f64,
    pub width: f64,
    pub height: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub enum WallKind {
    Flat,
    SmoothBump { height: f64 },
    /// Tent with corners at `x1 = 0, 1` and a smoothed apex.
    CornerBump { height: f64 },
    MultiBump(Vec<BumpSpec>),
    /// Piecewise-linear wall through `(x1, f)` samples, zero outside.
    Tabulated { x1: Vec<f64>, f: Vec<f64> },
}

/// The lower boundary `x2 = f(x1)`, with `f >= 0` and compact support.
#[derive(Debug, Clone, PartialEq)]
pub struct WallShape {
    kind: WallKind,
}

impl WallShape {
    pub fn flat() -> Self {
        Self { kind: WallKind::Flat }
    }

    pub fn smooth_bump(height: f64) -> Result<Self> {
        check_height(height)?;
        Ok(Self { kind: WallKind::SmoothBump { height } })
    }

    pub fn corner_bump(height: f64) -> Result<Self> {
        check_height(height)?;
        Ok(Self { kind: WallKind::CornerBump { height } })
    }

    pub fn multi_bump(bumps: Vec<BumpSpec>) -> Result<Self> {
        if bumps.is_empty() {
            return Err(Error::Config("multi_bump needs at least one bump".into()));
        }
        let mut sorted = bumps;
        sorted.sort_by(|a, b| a.start.partial_cmp(&b.start).unwrap());
        for b in &sorted {
            check_height(b.height)?;
            if !(b.width > 0.0) {
                return Err(Error::Config(format!("bump width must be positive, got {}", b.width)));
            }
        }
        if sorted.windows(2).any(|w| w[0].start + w[0].width > w[1].start) {
            return Err(Error::Config("multi_bump supports overlap".into()));
        }
        Ok(Self { kind: WallKind::MultiBump(sorted) })
    }

    pub fn tabulated(x1: Vec<f64>, f: Vec<f64>) -> Result<Self> {
        if x1.len() < 2 || x1.len() != f.len() || x1.windows(2).any(|w| !(w[1] > w[0])) {
            return Err(Error::Config("wall table needs >= 2 strictly increasing x1 samples".into()));
        }
        if f.iter().any(|v| !(*v >= 0.0)) {
            return Err(Error::Config("wall heights must be non-negative".into()));
        }
        Ok(Self { kind: WallKind::Tabulated { x1, f } })
    }

    /// Reads a two-column `x1,f` CSV with a header line.
    pub fn from_csv(path: impl AsRef<Path>) -> Result<Self> {
        let (x, f) = read_two_column_csv(path.as_ref())?;
        Self::tabulated(x, f)
    }

    pub fn kind(&self) -> &WallKind {
        &self.kind
    }

    /// Closed interval outside which `f` vanishes.
    pub fn support(&self) -> (f64, f64) {
        match &self.kind {
            WallKind::Flat | WallKind::SmoothBump { .. } | WallKind::CornerBump { .. } => (0.0, 1.0),
            WallKind::MultiBump(b) => (b[0].start, b[b.len() - 1].start + b[b.len() - 1].width),
            WallKind::Tabulated { x1, .. } => (x1[0], x1[x1.len() - 1]),
        }
    }

    pub fn center(&self) -> f64 {
        let (a, b) = self.support();
        0.5 * (a + b)
    }

    /// `J = max f`.
    pub fn max_height(&self) -> f64 {
        match &self.kind {
            WallKind::Flat => 0.0,
            WallKind::SmoothBump { height } => *height,
            WallKind::CornerBump { height } => height * (1.0 - CORNER_APEX_HALFWIDTH),
            WallKind::MultiBump(b) => b.iter().map(|b| b.height).fold(0.0, f64::max),
            WallKind::Tabulated { f, .. } => f.iter().copied().fold(0.0, f64::max),
        }
    }

    /// Abscissae of genuine corners where `f` leaves zero with a non-zero slope.
    pub fn corners(&self) -> Vec<f64> {
        match &self.kind {
            WallKind::CornerBump { .. } => vec![0.0, 1.0],
            _ => Vec::new(),
        }
    }

    pub fn is_symmetric(&self) -> bool {
        matches!(self.kind, WallKind::Flat | WallKind::SmoothBump { .. } | WallKind::CornerBump { .. })
    }

    pub fn f(&self, x: f64) -> f64 {
        match &self.kind {
            WallKind::Flat => 0.0,
            WallKind::SmoothBump { height } => smooth(x, 0.0, 1.0, *height).0,
            WallKind::CornerBump { height } => tent(x, *height).0,
            WallKind::MultiBump(b) => b.iter().map(|b| smooth(x, b.start, b.width, b.height).0).sum(),
            WallKind::Tabulated { x1, f } => linear(x1, f, x).0,
        }
    }

    /// `f'(x)`; at a corner the mean of the one-sided slopes.
    pub fn slope(&self, x: f64) -> f64 {
        match &self.kind {
            WallKind::Flat => 0.0,
            WallKind::SmoothBump { height } => smooth(x, 0.0, 1.0, *height).1,
            WallKind::CornerBump { height } => tent(x, *height).1,
            WallKind::MultiBump(b) => b.iter().map(|b| smooth(x, b.start, b.width, b.height).1).sum(),
            WallKind::Tabulated { x1, f } => linear(x1, f, x).1,
        }
    }
}

fn check_height(h: f64) -> Result<()> {
    if h >= 0.0 && h.is_finite() {
        Ok(())
    } else {
        Err(Error::Config(format!("bump height must be non-negative, got {h}")))
    }
}

fn smooth(x: f64, start: f64, width: f64, height: f64) -> (f64, f64) {
    let z = 2.0 * (x - start) / width - 1.0;
    let q = 1.0 - z * z;
    if q <= 1e-3 {
        return (0.0, 0.0);
    }
    let f = height * (1.0 - 1.0 / q).exp();
    (f, f * (-2.0 * z / (q * q)) * 2.0 / width)
}

fn tent(x: f64, h: f64) -> (f64, f64) {
    let d = CORNER_APEX_HALFWIDTH;
    let s = 2.0 * h;
    if x <= 0.0 || x >= 1.0 {
        let at_corner = x == 0.0 || x == 1.0;
        let half = if at_corner { 0.5 * s } else { 0.0 };
        return (0.0, if x == 0.0 { half } else { -half });
    }
    let y = x.min(1.0 - x);
    let sign = if x <= 0.5 { 1.0 } else { -1.0 };
    if y <= 0.5 - d {
        (s * y, sign * s)
    } else {
        let t = x - 0.5;
        (h - h * d - h / d * t * t, -2.0 * h / d * t)
    }
}

fn linear(xs: &[f64], fs: &[f64], x: f64) -> (f64, f64) {
    let n = xs.len();
    if x < xs[0] || x > xs[n - 1] {
        return (0.0, 0.0);
    }
    let i = xs.partition_point(|&v| v <= x).saturating_sub(1).min(n - 2);
    let slope = (fs[i + 1] - fs[i]) / (xs[i + 1] - xs[i]);
    (fs[i] + slope * (x - xs[i]), slope)
}
