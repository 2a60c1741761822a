use crate::error::{Error, Result};

/// Smooth odd cutoff: identity on `|s| <= t0`, constant `cap` for `s >= t1`,
/// and a C^2 quintic blend in between.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Cutoff {
    t0: f64,
    t1: f64,
    cap: f64,
    // blend t0 + h tau + a3 tau^3 + a4 tau^4 + a5 tau^5
    a3: f64,
    a4: f64,
    a5: f64,
}

impl Default for Cutoff {
    fn default() -> Self {
        Self::new(0.5, 0.75, 0.625).expect("default thresholds are valid")
    }
}

impl Cutoff {
    pub fn new(t0: f64, t1: f64, cap: f64) -> Result<Self> {
        if !(t0 > 0.0 && t0 < t1 && t0 < cap && cap < t1) || !t1.is_finite() {
            return Err(Error::Config(format!(
                "cutoff thresholds need 0 < t0 < cap < t1, got ({t0}, {t1}, {cap})"
            )));
        }
        let h = t1 - t0;
        let a = cap - t0 - h;
        let c = Self { t0, t1, cap, a3: 4.0 * h + 10.0 * a, a4: -7.0 * h - 15.0 * a, a5: 3.0 * h + 6.0 * a };
        // monotone blend needs non-negative slope on (t0, t1)
        let monotone = (0..=200).all(|i| c.derivative(t0 + h * i as f64 / 200.0) >= -1e-12);
        if !monotone {
            return Err(Error::Config(format!("cutoff ({t0}, {t1}, {cap}) has a non-monotone blend")));
        }
        Ok(c)
    }

    /// Thresholds `(1 - 2 eps, 1 - eps, 1 - 3 eps / 2)`; `eps = 1/4` reproduces the default.
    pub fn from_eps(eps: f64) -> Result<Self> {
        if !(eps > 0.0 && eps <= 0.25) {
            return Err(Error::Config(format!("eps_n must lie in (0, 1/4], got {eps}")));
        }
        Self::new(1.0 - 2.0 * eps, 1.0 - eps, 1.0 - 1.5 * eps)
    }

    pub fn t0(&self) -> f64 {
        self.t0
    }

    pub fn t1(&self) -> f64 {
        self.t1
    }

    pub fn cap(&self) -> f64 {
        self.cap
    }

    #[inline]
    pub fn eval(&self, s: f64) -> f64 {
        let a = s.abs();
        let v = if a <= self.t0 {
            a
        } else if a >= self.t1 {
            self.cap
        } else {
            let h = self.t1 - self.t0;
            let tau = (a - self.t0) / h;
            let t2 = tau * tau;
            self.t0 + h * tau + t2 * tau * (self.a3 + tau * (self.a4 + tau * self.a5))
        };
        v.copysign(s)
    }

    pub fn derivative(&self, s: f64) -> f64 {
        let a = s.abs();
        if a <= self.t0 {
            1.0
        } else if a >= self.t1 {
            0.0
        } else {
            let h = self.t1 - self.t0;
            let tau = (a - self.t0) / h;
            1.0 + tau * tau * (3.0 * self.a3 + tau * (4.0 * self.a4 + 5.0 * self.a5 * tau)) / h
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn default_values() {
        let z = Cutoff::default();
        assert_eq!(z.eval(0.3), 0.3);
        assert_eq!(z.eval(0.9), 0.625);
        assert_eq!(z.eval(-0.3), -0.3);
        assert_eq!(z.eval(0.5), 0.5);
        assert!((z.eval(0.75 - 1e-12) - 0.625).abs() < 1e-10);
    }

    #[test]
    fn eps_ladder() {
        assert_eq!(Cutoff::from_eps(0.25).unwrap(), Cutoff::default());
        let z = Cutoff::from_eps(1.0 / 16.0).unwrap();
        assert_eq!((z.t0(), z.t1(), z.cap()), (0.875, 0.9375, 1.0 - 3.0 / 32.0));
        assert!(Cutoff::from_eps(0.3).is_err());
    }

    #[test]
    fn blend_is_monotone_c1_and_bounded() {
        let z = Cutoff::default();
        let mut prev = z.eval(0.0);
        for i in 1..=10_000 {
            let s = i as f64 * 1e-4;
            let v = z.eval(s);
            assert!(v >= prev - 1e-15);
            assert!(v.abs() <= z.cap() + 1e-15);
            let d = z.derivative(s);
            assert!((0.0..=1.2).contains(&d));
            prev = v;
        }
        for s in [0.5, 0.75] {
            let e = 1e-7;
            assert!((z.derivative(s - e) - z.derivative(s + e)).abs() < 1e-5);
        }
    }

    #[test]
    fn rejects_bad_thresholds() {
        assert!(Cutoff::new(0.7, 0.6, 0.65).is_err());
        assert!(Cutoff::new(0.5, 0.75, 0.8).is_err());
        assert!(Cutoff::new(0.0, 0.75, 0.6).is_err());
    }
}
