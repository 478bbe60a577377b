//! The low-pass profile `φ` and the band-pass profile `κ` with `φ²(t) + κ²(t) = φ²(t/2)`.

use crate::error::{domain, Result};

/// Shape of the non-increasing cutoff `φ` (1 on `[0, 1/2]`, 0 on `[1, ∞)`).
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum FilterProfile {
    /// `C^∞` transition `b(2−2t) / (b(2−2t) + b(2t−1))` with `b(s) = e^{−1/s}`.
    SmoothBump,
    /// `C^q` polynomial smoothstep transition.
    Spline { q: usize },
}

impl Default for FilterProfile {
    fn default() -> Self {
        FilterProfile::SmoothBump
    }
}

fn bump(s: f64) -> f64 {
    if s > 0.0 {
        (-1.0 / s).exp()
    } else {
        0.0
    }
}

fn smoothstep(q: usize, x: f64) -> f64 {
    // x^{q+1} Σ_{i≤q} binom(q+i, i) (1−x)^i
    let mut sum = 0.0;
    let mut binom = 1.0;
    let mut pow = 1.0;
    for i in 0..=q {
        if i > 0 {
            binom *= (q + i) as f64 / i as f64;
            pow *= 1.0 - x;
        }
        sum += binom * pow;
    }
    x.powi(q as i32 + 1) * sum
}

impl FilterProfile {
    /// Smoothness order; `None` for the `C^∞` profile.
    pub fn smoothness(&self) -> Option<usize> {
        match self {
            FilterProfile::SmoothBump => None,
            FilterProfile::Spline { q } => Some(*q),
        }
    }

    /// `φ(t)` without the sign check; negative `t` is treated as 0.
    pub fn phi_unchecked(&self, t: f64) -> f64 {
        if t <= 0.5 {
            return 1.0;
        }
        if t >= 1.0 {
            return 0.0;
        }
        match self {
            FilterProfile::SmoothBump => {
                let a = bump(2.0 - 2.0 * t);
                let b = bump(2.0 * t - 1.0);
                a / (a + b)
            }
            FilterProfile::Spline { q } => 1.0 - smoothstep(*q, 2.0 * t - 1.0),
        }
    }

    /// `κ(t)` without the sign check.
    pub fn kappa_unchecked(&self, t: f64) -> f64 {
        let a = self.phi_unchecked(t / 2.0);
        let b = self.phi_unchecked(t);
        (a * a - b * b).max(0.0).sqrt()
    }

    pub fn phi(&self, t: f64) -> Result<f64> {
        if !(t >= 0.0) {
            return domain(format!("filter argument must be non-negative, got {t}"));
        }
        Ok(self.phi_unchecked(t))
    }

    pub fn kappa(&self, t: f64) -> Result<f64> {
        if !(t >= 0.0) {
            return domain(format!("filter argument must be non-negative, got {t}"));
        }
        Ok(self.kappa_unchecked(t))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn plateaus_and_support() {
        for f in [FilterProfile::SmoothBump, FilterProfile::Spline { q: 3 }] {
            assert_eq!(f.phi(0.25).unwrap(), 1.0);
            assert_eq!(f.phi(2.0).unwrap(), 0.0);
            let (a, b) = (f.phi(0.75).unwrap(), f.phi(0.8).unwrap());
            assert!(a > 0.0 && a < 1.0 && b <= a);
            assert_eq!(f.kappa(1.0).unwrap(), 1.0);
            assert_eq!(f.kappa(0.4).unwrap(), 0.0);
            assert_eq!(f.kappa(3.0).unwrap(), 0.0);
            assert!(f.phi(-0.1).is_err());
        }
    }

    #[test]
    fn spline_is_symmetric_about_three_quarters() {
        for q in 0..6 {
            let f = FilterProfile::Spline { q };
            for i in 1..20 {
                let s = i as f64 / 80.0;
                let v = f.phi_unchecked(0.75 - s) + f.phi_unchecked(0.75 + s);
                assert!((v - 1.0).abs() < 1e-13);
            }
        }
    }
}
