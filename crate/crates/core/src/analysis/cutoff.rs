//! Smooth ramps, bumps and the cutoff family `φₙ` (equal to one on
//! `[-n, n]`, supported in `[-n-1, n+1]`, slope bounded independently of
//! `n`).

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Polynomial transition from 0 to 1 on `[0, 1]` with vanishing end
/// derivatives.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum RampProfile {
    /// `3t² − 2t³`, C¹.
    Cubic,
    /// `10t³ − 15t⁴ + 6t⁵`, C².
    #[default]
    Quintic,
    /// `35t⁴ − 84t⁵ + 70t⁶ − 20t⁷`, C³.
    Septic,
}

impl RampProfile {
    /// `(S(t), S′(t), S″(t))`, clamped outside `[0, 1]`.
    pub fn eval(self, t: f64) -> (f64, f64, f64) {
        if t <= 0.0 {
            return (0.0, 0.0, 0.0);
        }
        if t >= 1.0 {
            return (1.0, 0.0, 0.0);
        }
        let t2 = t * t;
        let t3 = t2 * t;
        match self {
            RampProfile::Cubic => (3.0 * t2 - 2.0 * t3, 6.0 * t - 6.0 * t2, 6.0 - 12.0 * t),
            RampProfile::Quintic => (
                t3 * (10.0 - 15.0 * t + 6.0 * t2),
                30.0 * t2 * (1.0 - t) * (1.0 - t),
                60.0 * t * (1.0 - t) * (1.0 - 2.0 * t),
            ),
            RampProfile::Septic => {
                let t4 = t2 * t2;
                (
                    t4 * (35.0 - 84.0 * t + 70.0 * t2 - 20.0 * t3),
                    140.0 * t3 * (1.0 - t).powi(3),
                    420.0 * t2 * (1.0 - t).powi(2) * (1.0 - 2.0 * t),
                )
            }
        }
    }

    /// `max S′`, attained at `t = 1/2`.
    pub fn slope_bound(self) -> f64 {
        self.eval(0.5).1
    }

    /// Number of continuous derivatives.
    pub fn smoothness(self) -> usize {
        match self {
            RampProfile::Cubic => 1,
            RampProfile::Quintic => 2,
            RampProfile::Septic => 3,
        }
    }
}

/// Scalar profile with two derivatives and compact support.
pub trait Profile: Send + Sync {
    fn eval(&self, x: f64) -> (f64, f64, f64);
    fn support(&self) -> (f64, f64);
    /// Points where the second derivative may fail to be smooth.
    fn kinks(&self) -> Vec<f64>;
}

/// Plateau function: rises on `[a, a + ramp]`, equals one in between and
/// falls on `[b − ramp, b]`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Bump {
    pub a: f64,
    pub b: f64,
    pub ramp: f64,
    pub profile: RampProfile,
}

impl Bump {
    pub fn new(a: f64, b: f64, ramp: f64) -> Result<Self> {
        if !(a < b && ramp > 0.0 && 2.0 * ramp <= b - a) {
            return Err(Error::InvalidArgument(format!(
                "bump needs a < b and 0 < 2·ramp ≤ b − a (got a={a}, b={b}, ramp={ramp})"
            )));
        }
        Ok(Bump {
            a,
            b,
            ramp,
            profile: RampProfile::Quintic,
        })
    }
}

impl Profile for Bump {
    fn eval(&self, x: f64) -> (f64, f64, f64) {
        let r = self.ramp;
        if x <= self.a || x >= self.b {
            (0.0, 0.0, 0.0)
        } else if x < self.a + r {
            let (s, d1, d2) = self.profile.eval((x - self.a) / r);
            (s, d1 / r, d2 / (r * r))
        } else if x > self.b - r {
            let (s, d1, d2) = self.profile.eval((self.b - x) / r);
            (s, -d1 / r, d2 / (r * r))
        } else {
            (1.0, 0.0, 0.0)
        }
    }

    fn support(&self) -> (f64, f64) {
        (self.a, self.b)
    }

    fn kinks(&self) -> Vec<f64> {
        vec![self.a, self.a + self.ramp, self.b - self.ramp, self.b]
    }
}

/// Member `φₙ` of the cutoff family.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CutoffFamily {
    pub n: usize,
    pub profile: RampProfile,
    /// Bound on `|φₙ′|`, the same for every `n`.
    pub slope_bound: f64,
}

/// `cutoff_family`.
pub fn cutoff_family(n: usize, profile: RampProfile) -> Result<CutoffFamily> {
    if n == 0 {
        return Err(Error::InvalidArgument("cutoff index n must be ≥ 1".into()));
    }
    Ok(CutoffFamily {
        n,
        profile,
        slope_bound: profile.slope_bound(),
    })
}

impl CutoffFamily {
    pub fn phi(&self, x: f64) -> f64 {
        self.eval(x).0
    }

    pub fn dphi(&self, x: f64) -> f64 {
        self.eval(x).1
    }

    pub fn ddphi(&self, x: f64) -> f64 {
        self.eval(x).2
    }
}

impl Profile for CutoffFamily {
    fn eval(&self, x: f64) -> (f64, f64, f64) {
        let n = self.n as f64;
        let ax = x.abs();
        if ax <= n {
            return (1.0, 0.0, 0.0);
        }
        let (s, d1, d2) = self.profile.eval(n + 1.0 - ax);
        // d/dx of S(n + 1 − |x|) = −sign(x)·S′
        (s, -x.signum() * d1, d2)
    }

    fn support(&self) -> (f64, f64) {
        let n = self.n as f64;
        (-n - 1.0, n + 1.0)
    }

    fn kinks(&self) -> Vec<f64> {
        let n = self.n as f64;
        vec![-n - 1.0, -n, n, n + 1.0]
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn ramp_derivatives_match_finite_differences() {
        for profile in [RampProfile::Cubic, RampProfile::Quintic, RampProfile::Septic] {
            for &t in &[0.1, 0.37, 0.5, 0.81] {
                let h = 1e-6;
                let (_, d1, d2) = profile.eval(t);
                let fd1 = (profile.eval(t + h).0 - profile.eval(t - h).0) / (2.0 * h);
                let fd2 = (profile.eval(t + h).1 - profile.eval(t - h).1) / (2.0 * h);
                assert!((d1 - fd1).abs() < 1e-8, "{profile:?} t={t}");
                assert!((d2 - fd2).abs() < 1e-6, "{profile:?} t={t}");
            }
        }
    }

    #[test]
    fn quintic_slope_bound() {
        // S′(t) = 30 t²(1−t)², maximal at t = 1/2: 30/16
        assert_eq!(RampProfile::Quintic.slope_bound(), 1.875);
        let c = cutoff_family(3, RampProfile::Quintic).unwrap();
        assert_eq!(c.slope_bound, 1.875);
    }

    #[test]
    fn family_properties() {
        for n in 1..=5 {
            let c = cutoff_family(n, RampProfile::Quintic).unwrap();
            let nf = n as f64;
            assert_eq!(c.phi(0.0), 1.0);
            assert_eq!(c.phi(nf + 1.0), 0.0);
            assert_eq!(c.phi(-nf - 1.0), 0.0);
            assert_eq!(c.phi(nf), 1.0);
            assert!(c.dphi(nf + 0.5) < 0.0 && c.dphi(-nf - 0.5) > 0.0);
        }
        assert!(cutoff_family(0, RampProfile::Quintic).is_err());
    }

    #[test]
    fn bump_validation() {
        assert!(Bump::new(0.0, 1.0, 0.6).is_err());
        let b = Bump::new(-1.0, 1.0, 0.5).unwrap();
        assert_eq!(b.eval(0.0), (1.0, 0.0, 0.0));
        assert_eq!(b.eval(-1.0).0, 0.0);
        assert!((b.eval(-0.75).0 - 0.5).abs() < 1e-15);
    }
}
