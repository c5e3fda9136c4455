//! Compactly supported H¹ vector functions with known derivatives.

use std::f64::consts::PI;
use std::sync::Arc;

use crate::error::{Error, Result};
use crate::linalg::{C64, ZERO};
use crate::potential::Side;

/// `w(x)` and `w′(x)`.
#[derive(Debug, Clone, PartialEq)]
pub struct TestValues {
    pub value: Vec<C64>,
    pub derivative: Vec<C64>,
}

type EvalFn = dyn Fn(f64, Side) -> TestValues + Send + Sync;
type LFn = dyn Fn(f64, Side) -> Vec<C64> + Send + Sync;

/// Compactly supported test function, optionally carrying pointwise values
/// of `l[w]`.
#[derive(Clone)]
pub struct CompactTestFunction {
    m: usize,
    support: (f64, f64),
    kinks: Vec<f64>,
    eval: Arc<EvalFn>,
    l_values: Option<Arc<LFn>>,
}

impl std::fmt::Debug for CompactTestFunction {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.debug_struct("CompactTestFunction")
            .field("m", &self.m)
            .field("support", &self.support)
            .field("kinks", &self.kinks.len())
            .field("has_l_values", &self.l_values.is_some())
            .finish()
    }
}

impl CompactTestFunction {
    /// `eval` is only called inside `support`; outside it the function is zero.
    pub fn new(
        m: usize,
        support: (f64, f64),
        kinks: Vec<f64>,
        eval: impl Fn(f64, Side) -> TestValues + Send + Sync + 'static,
    ) -> Result<Self> {
        if !(support.0 < support.1) || !support.0.is_finite() || !support.1.is_finite() {
            return Err(Error::InvalidArgument(format!("bad support {support:?}")));
        }
        let mut kinks: Vec<f64> = kinks
            .into_iter()
            .filter(|k| *k > support.0 && *k < support.1)
            .collect();
        kinks.sort_by(f64::total_cmp);
        kinks.dedup();
        Ok(CompactTestFunction {
            m,
            support,
            kinks,
            eval: Arc::new(eval),
            l_values: None,
        })
    }

    pub fn with_l_values(mut self, l: impl Fn(f64, Side) -> Vec<C64> + Send + Sync + 'static) -> Self {
        self.l_values = Some(Arc::new(l));
        self
    }

    pub fn dim(&self) -> usize {
        self.m
    }

    pub fn support(&self) -> (f64, f64) {
        self.support
    }

    /// Interior points where `w′` (or `l[w]`) may jump.
    pub fn kinks(&self) -> &[f64] {
        &self.kinks
    }

    pub fn has_l_values(&self) -> bool {
        self.l_values.is_some()
    }

    fn inside(&self, x: f64) -> bool {
        x > self.support.0 && x < self.support.1
    }

    pub fn values(&self, x: f64, side: Side) -> TestValues {
        if self.inside(x) {
            (self.eval)(x, side)
        } else {
            TestValues {
                value: vec![ZERO; self.m],
                derivative: vec![ZERO; self.m],
            }
        }
    }

    pub fn value(&self, x: f64) -> Vec<C64> {
        self.values(x, Side::Auto).value
    }

    pub fn derivative(&self, x: f64, side: Side) -> Vec<C64> {
        self.values(x, side).derivative
    }

    /// `l[w](x)` when known.
    pub fn l_value(&self, x: f64, side: Side) -> Option<Vec<C64>> {
        let l = self.l_values.as_ref()?;
        Some(if self.inside(x) { l(x, side) } else { vec![ZERO; self.m] })
    }

    /// `c·w` (l-values scale too).
    pub fn scaled(&self, c: C64) -> CompactTestFunction {
        let inner = self.eval.clone();
        let mut out = CompactTestFunction {
            m: self.m,
            support: self.support,
            kinks: self.kinks.clone(),
            eval: Arc::new(move |x, side| {
                let v = inner(x, side);
                TestValues {
                    value: v.value.iter().map(|z| z * c).collect(),
                    derivative: v.derivative.iter().map(|z| z * c).collect(),
                }
            }),
            l_values: None,
        };
        if let Some(l) = self.l_values.clone() {
            out.l_values = Some(Arc::new(move |x, side| l(x, side).iter().map(|z| z * c).collect()));
        }
        out
    }

    /// `w + other`, supported on the hull of both supports.
    pub fn sum(&self, other: &CompactTestFunction) -> Result<CompactTestFunction> {
        if self.m != other.m {
            return Err(Error::Dimension(format!("{} vs {}", self.m, other.m)));
        }
        let support = (self.support.0.min(other.support.0), self.support.1.max(other.support.1));
        let mut kinks = self.kinks.clone();
        kinks.extend_from_slice(&other.kinks);
        kinks.extend([self.support.0, self.support.1, other.support.0, other.support.1]);
        let (a, b) = (self.clone(), other.clone());
        let out = CompactTestFunction::new(self.m, support, kinks, move |x, side| {
            let u = a.values(x, side);
            let v = b.values(x, side);
            TestValues {
                value: u.value.iter().zip(&v.value).map(|(p, q)| p + q).collect(),
                derivative: u.derivative.iter().zip(&v.derivative).map(|(p, q)| p + q).collect(),
            }
        })?;
        Ok(out)
    }

    /// `(1 − |x − c|/ω)₊ · direction`.
    pub fn hat(center: f64, width: f64, direction: Vec<C64>) -> Result<Self> {
        if !(width > 0.0) {
            return Err(Error::InvalidArgument("hat width must be positive".into()));
        }
        let m = direction.len();
        CompactTestFunction::new(
            m,
            (center - width, center + width),
            vec![center],
            move |x, side| {
                let t = (x - center) / width;
                let v = 1.0 - t.abs();
                let right = x > center || (x == center && side != Side::Left);
                let slope = if right { -1.0 / width } else { 1.0 / width };
                TestValues {
                    value: direction.iter().map(|d| d * v).collect(),
                    derivative: direction.iter().map(|d| d * slope).collect(),
                }
            },
        )
    }

    /// `sin(π(x − a)/(b − a)) · direction` on `[a, b]`.
    pub fn sine_arch(a: f64, b: f64, direction: Vec<C64>) -> Result<Self> {
        let m = direction.len();
        let k = PI / (b - a);
        CompactTestFunction::new(m, (a, b), vec![], move |x, _| {
            let s = (k * (x - a)).sin();
            let c = k * (k * (x - a)).cos();
            TestValues {
                value: direction.iter().map(|d| d * s).collect(),
                derivative: direction.iter().map(|d| d * c).collect(),
            }
        })
    }

    /// `((x − c)/σ)^degree · exp(−((x − c)/σ)²) · direction`, truncated at
    /// `|x − c| = 8σ` where it is below 1e-26.
    pub fn gaussian(center: f64, sigma: f64, degree: u32, direction: Vec<C64>) -> Result<Self> {
        if !(sigma > 0.0) {
            return Err(Error::InvalidArgument("gaussian width must be positive".into()));
        }
        let m = direction.len();
        CompactTestFunction::new(
            m,
            (center - 8.0 * sigma, center + 8.0 * sigma),
            vec![],
            move |x, _| {
                let t = (x - center) / sigma;
                let g = (-t * t).exp();
                let p = t.powi(degree as i32);
                let dp = if degree == 0 { 0.0 } else { degree as f64 * t.powi(degree as i32 - 1) };
                let v = p * g;
                let dv = (dp - 2.0 * t * p) * g / sigma;
                TestValues {
                    value: direction.iter().map(|d| d * v).collect(),
                    derivative: direction.iter().map(|d| d * dv).collect(),
                }
            },
        )
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn d1() -> Vec<C64> {
        vec![C64::new(1.0, 0.0)]
    }

    #[test]
    fn hat_values_and_one_sided_slopes() {
        let w = CompactTestFunction::hat(0.0, 2.0, d1()).unwrap();
        assert_eq!(w.value(1.0)[0].re, 0.5);
        assert_eq!(w.derivative(0.0, Side::Left)[0].re, 0.5);
        assert_eq!(w.derivative(0.0, Side::Right)[0].re, -0.5);
        assert_eq!(w.value(3.0)[0].re, 0.0);
        assert_eq!(w.kinks(), &[0.0]);
    }

    #[test]
    fn gaussian_derivative_matches_fd() {
        let w = CompactTestFunction::gaussian(0.4, 0.7, 2, vec![C64::new(1.0, -1.0)]).unwrap();
        let h = 1e-6;
        for x in [-0.5, 0.1, 0.9, 1.7] {
            let fd = (w.value(x + h)[0] - w.value(x - h)[0]) / (2.0 * h);
            assert!((fd - w.derivative(x, Side::Auto)[0]).norm() < 1e-8);
        }
    }

    #[test]
    fn sum_and_scale() {
        let a = CompactTestFunction::hat(-1.0, 0.5, d1()).unwrap();
        let b = CompactTestFunction::hat(1.0, 0.5, d1()).unwrap();
        let s = a.sum(&b).unwrap().scaled(C64::new(0.0, 2.0));
        assert_eq!(s.support(), (-1.5, 1.5));
        assert_eq!(s.value(1.0)[0], C64::new(0.0, 2.0));
        assert_eq!(s.value(0.0)[0], ZERO);
    }
}
