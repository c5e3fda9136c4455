//! Dormand–Prince 5(4) with the quartic continuous extension, operating on
//! complex state vectors.

use crate::error::{Error, Result};
use crate::linalg::{C64, ZERO};

/// Step-size control settings.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Tolerances {
    pub rtol: f64,
    pub atol: f64,
    /// Budget on accepted plus rejected steps for one solve.
    pub max_steps: usize,
}

impl Default for Tolerances {
    fn default() -> Self {
        Tolerances {
            rtol: 1e-10,
            atol: 1e-12,
            max_steps: 10_000_000,
        }
    }
}

impl Tolerances {
    pub fn new(rtol: f64, atol: f64) -> Self {
        Tolerances {
            rtol,
            atol,
            ..Default::default()
        }
    }

    /// Same tolerance scaled by `factor`.
    pub fn scaled(&self, factor: f64) -> Self {
        Tolerances {
            rtol: self.rtol * factor,
            atol: self.atol * factor,
            max_steps: self.max_steps,
        }
    }
}

/// States with norm above this abort the integration.
pub const BLOW_UP_THRESHOLD: f64 = 1e250;

const C2: f64 = 1.0 / 5.0;
const C3: f64 = 3.0 / 10.0;
const C4: f64 = 4.0 / 5.0;
const C5: f64 = 8.0 / 9.0;
const A21: f64 = 1.0 / 5.0;
const A31: f64 = 3.0 / 40.0;
const A32: f64 = 9.0 / 40.0;
const A41: f64 = 44.0 / 45.0;
const A42: f64 = -56.0 / 15.0;
const A43: f64 = 32.0 / 9.0;
const A51: f64 = 19372.0 / 6561.0;
const A52: f64 = -25360.0 / 2187.0;
const A53: f64 = 64448.0 / 6561.0;
const A54: f64 = -212.0 / 729.0;
const A61: f64 = 9017.0 / 3168.0;
const A62: f64 = -355.0 / 33.0;
const A63: f64 = 46732.0 / 5247.0;
const A64: f64 = 49.0 / 176.0;
const A65: f64 = -5103.0 / 18656.0;
const A71: f64 = 35.0 / 384.0;
const A73: f64 = 500.0 / 1113.0;
const A74: f64 = 125.0 / 192.0;
const A75: f64 = -2187.0 / 6784.0;
const A76: f64 = 11.0 / 84.0;
const E1: f64 = 71.0 / 57600.0;
const E3: f64 = -71.0 / 16695.0;
const E4: f64 = 71.0 / 1920.0;
const E5: f64 = -17253.0 / 339200.0;
const E6: f64 = 22.0 / 525.0;
const E7: f64 = -1.0 / 40.0;
const D1: f64 = -12715105075.0 / 11282082432.0;
const D3: f64 = 87487479700.0 / 32700410799.0;
const D4: f64 = -10690763975.0 / 1880347072.0;
const D5: f64 = 701980252875.0 / 199316789632.0;
const D6: f64 = -1453857185.0 / 822651844.0;
const D7: f64 = 69997945.0 / 29380423.0;

/// One accepted step with its interpolation coefficients.
#[derive(Debug, Clone)]
pub struct DenseStep {
    pub x0: f64,
    pub h: f64,
    /// Five coefficient vectors of length `n`, concatenated.
    coeffs: Vec<C64>,
    /// Local error estimate (weighted RMS) of the step.
    pub error: f64,
}

impl DenseStep {
    pub fn x1(&self) -> f64 {
        self.x0 + self.h
    }

    /// Lower and upper end of the step.
    pub fn span(&self) -> (f64, f64) {
        if self.h >= 0.0 {
            (self.x0, self.x0 + self.h)
        } else {
            (self.x0 + self.h, self.x0)
        }
    }

    pub fn dim(&self) -> usize {
        self.coeffs.len() / 5
    }

    /// Interpolated state at `x`.
    pub fn value(&self, x: f64, out: &mut [C64]) {
        let n = self.dim();
        let t = (x - self.x0) / self.h;
        let t1 = 1.0 - t;
        let r = &self.coeffs;
        for i in 0..n {
            out[i] = r[i] + t * (r[n + i] + t1 * (r[2 * n + i] + t * (r[3 * n + i] + t1 * r[4 * n + i])));
        }
    }

    /// Derivative of the interpolant at `x`.
    pub fn derivative(&self, x: f64, out: &mut [C64]) {
        let n = self.dim();
        let t = (x - self.x0) / self.h;
        let t1 = 1.0 - t;
        let r = &self.coeffs;
        let w3 = 1.0 - 2.0 * t;
        let w4 = t * (2.0 - 3.0 * t);
        let w5 = 2.0 * t * t1 * (t1 - t);
        for i in 0..n {
            out[i] = (r[n + i] + w3 * r[2 * n + i] + w4 * r[3 * n + i] + w5 * r[4 * n + i]) / self.h;
        }
    }
}

/// Per-solve mutable bookkeeping shared across segments.
#[derive(Debug, Clone)]
pub struct StepState {
    pub h: f64,
    pub steps: usize,
}

impl StepState {
    pub fn new() -> Self {
        StepState { h: 0.0, steps: 0 }
    }
}

impl Default for StepState {
    fn default() -> Self {
        Self::new()
    }
}

fn weighted_rms(v: &[C64], y0: &[C64], y1: &[C64], tol: &Tolerances) -> f64 {
    let n = v.len().max(1);
    let s: f64 = v
        .iter()
        .zip(y0.iter().zip(y1))
        .map(|(e, (a, b))| {
            let sk = tol.atol + tol.rtol * a.norm().max(b.norm());
            (e.norm() / sk).powi(2)
        })
        .sum();
    (s / n as f64).sqrt()
}

/// Max-abs norm; a sum of squares would overflow long before the threshold.
fn state_norm(y: &[C64]) -> f64 {
    y.iter().map(|z| z.norm()).fold(0.0, f64::max)
}

/// Integrates `y' = rhs(x, y)` from `x_start` to `x_end` (either direction)
/// over a span on which `rhs` is smooth. `y` is updated in place.
pub fn integrate<F>(
    mut rhs: F,
    x_start: f64,
    x_end: f64,
    y: &mut [C64],
    tol: &Tolerances,
    state: &mut StepState,
    mut record: Option<&mut Vec<DenseStep>>,
) -> Result<()>
where
    F: FnMut(f64, &[C64], &mut [C64]),
{
    let n = y.len();
    let span = x_end - x_start;
    if span == 0.0 {
        return Ok(());
    }
    let dir = span.signum();
    let mut x = x_start;
    let mut k1 = vec![ZERO; n];
    let mut k2 = vec![ZERO; n];
    let mut k3 = vec![ZERO; n];
    let mut k4 = vec![ZERO; n];
    let mut k5 = vec![ZERO; n];
    let mut k6 = vec![ZERO; n];
    let mut k7 = vec![ZERO; n];
    let mut ytmp = vec![ZERO; n];
    let mut ynew = vec![ZERO; n];
    let mut err = vec![ZERO; n];

    rhs(x, y, &mut k1);
    let mut h = if state.h > 0.0 {
        state.h.min(span.abs())
    } else {
        initial_step(&mut rhs, x, y, &k1, dir, tol).min(span.abs())
    } * dir;

    loop {
        if state.steps >= tol.max_steps {
            return Err(Error::StepBudget {
                budget: tol.max_steps,
                last_x: x,
            });
        }
        let last = (x + 1.01 * h - x_end) * dir >= 0.0;
        if last {
            h = x_end - x;
        }
        if h.abs() < 1e-14 * x.abs().max(1.0) {
            return Err(Error::StepUnderflow { last_x: x });
        }
        state.steps += 1;

        for i in 0..n {
            ytmp[i] = y[i] + h * A21 * k1[i];
        }
        rhs(x + C2 * h, &ytmp, &mut k2);
        for i in 0..n {
            ytmp[i] = y[i] + h * (A31 * k1[i] + A32 * k2[i]);
        }
        rhs(x + C3 * h, &ytmp, &mut k3);
        for i in 0..n {
            ytmp[i] = y[i] + h * (A41 * k1[i] + A42 * k2[i] + A43 * k3[i]);
        }
        rhs(x + C4 * h, &ytmp, &mut k4);
        for i in 0..n {
            ytmp[i] = y[i] + h * (A51 * k1[i] + A52 * k2[i] + A53 * k3[i] + A54 * k4[i]);
        }
        rhs(x + C5 * h, &ytmp, &mut k5);
        for i in 0..n {
            ytmp[i] = y[i] + h * (A61 * k1[i] + A62 * k2[i] + A63 * k3[i] + A64 * k4[i] + A65 * k5[i]);
        }
        let x_next = if last { x_end } else { x + h };
        rhs(x_next, &ytmp, &mut k6);
        for i in 0..n {
            ynew[i] = y[i] + h * (A71 * k1[i] + A73 * k3[i] + A74 * k4[i] + A75 * k5[i] + A76 * k6[i]);
        }
        rhs(x_next, &ynew, &mut k7);
        for i in 0..n {
            err[i] = h * (E1 * k1[i] + E3 * k3[i] + E4 * k4[i] + E5 * k5[i] + E6 * k6[i] + E7 * k7[i]);
        }
        let e = weighted_rms(&err, y, &ynew, tol);

        if !e.is_finite() || ynew.iter().any(|z| !z.is_finite()) {
            if h.abs() < 1e-10 * x.abs().max(1.0) {
                return Err(Error::BlowUp {
                    last_x: x,
                    threshold: BLOW_UP_THRESHOLD,
                });
            }
            h *= 0.2;
            continue;
        }

        if e <= 1.0 {
            if let Some(rec) = record.as_deref_mut() {
                let mut coeffs = Vec::with_capacity(5 * n);
                coeffs.extend_from_slice(y);
                for i in 0..n {
                    coeffs.push(ynew[i] - y[i]);
                }
                for i in 0..n {
                    let d = ynew[i] - y[i];
                    coeffs.push(h * k1[i] - d);
                }
                for i in 0..n {
                    let d = ynew[i] - y[i];
                    let bspl = h * k1[i] - d;
                    coeffs.push(d - h * k7[i] - bspl);
                }
                for i in 0..n {
                    coeffs.push(
                        h * (D1 * k1[i] + D3 * k3[i] + D4 * k4[i] + D5 * k5[i] + D6 * k6[i] + D7 * k7[i]),
                    );
                }
                rec.push(DenseStep {
                    x0: x,
                    h: x_next - x,
                    coeffs,
                    error: e,
                });
            }
            y.copy_from_slice(&ynew);
            std::mem::swap(&mut k1, &mut k7);
            x = x_next;
            if state_norm(y) > BLOW_UP_THRESHOLD {
                return Err(Error::BlowUp {
                    last_x: x,
                    threshold: BLOW_UP_THRESHOLD,
                });
            }
            let fac = (0.9 * e.max(1e-10).powf(-0.2)).clamp(0.2, 5.0);
            let h_next = h * fac;
            if !last {
                // remember the unclamped step for the next segment
                state.h = h_next.abs();
            }
            if last {
                if state.h == 0.0 {
                    state.h = h_next.abs();
                }
                return Ok(());
            }
            h = h_next;
        } else {
            let fac = (0.9 * e.powf(-0.2)).clamp(0.2, 1.0);
            h *= fac;
        }
    }
}

fn initial_step<F>(rhs: &mut F, x: f64, y: &[C64], f0: &[C64], dir: f64, tol: &Tolerances) -> f64
where
    F: FnMut(f64, &[C64], &mut [C64]),
{
    let n = y.len();
    let zeros = vec![ZERO; n];
    let d0 = weighted_rms(y, y, &zeros, tol);
    let d1 = weighted_rms(f0, y, &zeros, tol);
    let h0 = if d0 < 1e-5 || d1 < 1e-5 { 1e-6 } else { 0.01 * d0 / d1 };
    let y1: Vec<C64> = y.iter().zip(f0).map(|(a, b)| a + dir * h0 * b).collect();
    let mut f1 = vec![ZERO; n];
    rhs(x + dir * h0, &y1, &mut f1);
    let diff: Vec<C64> = f1.iter().zip(f0).map(|(a, b)| a - b).collect();
    let d2 = weighted_rms(&diff, y, &zeros, tol) / h0;
    let h1 = if d1.max(d2) <= 1e-15 {
        (h0 * 1e-3).max(1e-6)
    } else {
        (0.01 / d1.max(d2)).powf(0.2)
    };
    (100.0 * h0).min(h1)
}
