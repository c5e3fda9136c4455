//! Cauchy problems for the first-order system `(u, u^[1])′ = Ã(x)(u, u^[1])
//! + (0, −f)`, where `Ã` is the Shin–Zettl matrix with `−λI` added to the
//! bottom-left block. Solutions carry dense output and give access to the
//! quasiderivatives.

mod dopri;
mod mollify;

pub use dopri::{DenseStep, StepState, Tolerances, BLOW_UP_THRESHOLD};
pub use mollify::mollify_to_domain;

use std::fmt::Write as _;

use serde::{Deserialize, Serialize};
use std::sync::Arc;

use crate::error::{Error, Result};
use crate::linalg::{CMatrix, C64, ZERO};
use crate::potential::{merge_points, Potential, Side};

/// Initial data `u(x0) = c0`, `u^[1](x0) = c1`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CauchyData {
    pub x0: f64,
    pub c0: Vec<C64>,
    pub c1: Vec<C64>,
}

impl CauchyData {
    pub fn new(x0: f64, c0: Vec<C64>, c1: Vec<C64>) -> Self {
        CauchyData { x0, c0, c1 }
    }

    /// Real scalar data.
    pub fn scalar(x0: f64, c0: f64, c1: f64) -> Self {
        CauchyData::new(x0, vec![C64::from(c0)], vec![C64::from(c1)])
    }

    /// Componentwise complex conjugate.
    pub fn conjugate(&self) -> Self {
        CauchyData {
            x0: self.x0,
            c0: self.c0.iter().map(|z| z.conj()).collect(),
            c1: self.c1.iter().map(|z| z.conj()).collect(),
        }
    }
}

type ForcingFn = dyn Fn(f64, Side) -> Vec<C64> + Send + Sync;

/// Piecewise continuous right-hand side `f` with its jump points.
#[derive(Clone)]
pub struct Forcing {
    values: Arc<ForcingFn>,
    breakpoints: Vec<f64>,
}

impl std::fmt::Debug for Forcing {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.debug_struct("Forcing")
            .field("breakpoints", &self.breakpoints)
            .finish_non_exhaustive()
    }
}

impl Forcing {
    pub fn new(values: impl Fn(f64, Side) -> Vec<C64> + Send + Sync + 'static, mut breakpoints: Vec<f64>) -> Self {
        breakpoints.sort_by(f64::total_cmp);
        breakpoints.dedup();
        Forcing {
            values: Arc::new(values),
            breakpoints,
        }
    }

    pub fn eval(&self, x: f64, side: Side) -> Vec<C64> {
        (self.values)(x, side)
    }

    pub fn breakpoints(&self) -> &[f64] {
        &self.breakpoints
    }
}

/// Right-hand side of the (possibly multi-column) system on one smooth span.
struct SystemRhs<'a> {
    potential: &'a Potential,
    lambda: C64,
    forcing: Option<&'a Forcing>,
    m: usize,
    q: CMatrix,
    s: CMatrix,
    b: CMatrix,
}

impl<'a> SystemRhs<'a> {
    fn new(potential: &'a Potential, lambda: C64, forcing: Option<&'a Forcing>) -> Self {
        let m = potential.dim();
        SystemRhs {
            potential,
            lambda,
            forcing,
            m,
            q: CMatrix::zeros(m, m),
            s: CMatrix::zeros(m, m),
            b: CMatrix::zeros(m, m),
        }
    }

    fn eval(&mut self, x: f64, side: Side, y: &[C64], dy: &mut [C64]) {
        let m = self.m;
        self.potential.primitive().eval_into(x, side, &mut self.q);
        self.potential.remainder().eval_into(x, side, &mut self.s);
        // b = s − Q² − λI
        self.b.copy_from(&self.s);
        self.b.gemm(-crate::linalg::ONE, &self.q, &self.q, crate::linalg::ONE);
        for i in 0..m {
            self.b[(i, i)] -= self.lambda;
        }
        let f = self.forcing.map(|f| f.eval(x, side));
        for (col, dcol) in y.chunks(2 * m).zip(dy.chunks_mut(2 * m)) {
            let (u, v) = col.split_at(m);
            for i in 0..m {
                let mut du = v[i];
                let mut dv = ZERO;
                for j in 0..m {
                    du += self.q[(i, j)] * u[j];
                    dv += self.b[(i, j)] * u[j] - self.q[(i, j)] * v[j];
                }
                if let Some(f) = &f {
                    dv -= f[i];
                }
                dcol[i] = du;
                dcol[m + i] = dv;
            }
        }
    }
}

fn segment_points(from: f64, to: f64, breaks: &[f64]) -> Vec<f64> {
    let (lo, hi) = if from <= to { (from, to) } else { (to, from) };
    let mut pts: Vec<f64> = breaks.iter().copied().filter(|b| *b > lo && *b < hi).collect();
    if from > to {
        pts.reverse();
    }
    let mut out = Vec::with_capacity(pts.len() + 2);
    out.push(from);
    out.extend(pts);
    out.push(to);
    out
}

/// Integrates the homogeneous-or-forced system from `from` to `to`, never
/// stepping across a point of `breaks`.
#[allow(clippy::too_many_arguments)]
fn run(
    potential: &Potential,
    lambda: C64,
    forcing: Option<&Forcing>,
    breaks: &[f64],
    from: f64,
    to: f64,
    y: &mut [C64],
    tol: &Tolerances,
    state: &mut StepState,
    mut record: Option<&mut Vec<DenseStep>>,
) -> Result<()> {
    let pts = segment_points(from, to, breaks);
    let mut rhs = SystemRhs::new(potential, lambda, forcing);
    for w in pts.windows(2) {
        let (l, r) = (w[0], w[1]);
        let mid = 0.5 * (l + r);
        dopri::integrate(
            |x, y, dy| {
                let side = if x > mid { Side::Left } else { Side::Right };
                rhs.eval(x, side, y, dy)
            },
            l,
            r,
            y,
            tol,
            state,
            record.as_deref_mut(),
        )?;
    }
    Ok(())
}

/// Propagates a 2m×k state (column-major, columns of length 2m) of the
/// homogeneous system from `from` to `to`.
pub(crate) fn propagate(
    effective: &Potential,
    lambda: C64,
    from: f64,
    to: f64,
    state: &mut [C64],
    tol: &Tolerances,
    steps: &mut StepState,
) -> Result<()> {
    let breaks = effective.breakpoints();
    run(effective, lambda, None, &breaks, from, to, state, tol, steps, None)
}

/// A solved trajectory `(u, u^[1])` on `[a, b]` with dense output.
#[derive(Debug, Clone)]
pub struct QuasiSolution {
    potential: Potential,
    effective: Potential,
    adjoint: bool,
    lambda: C64,
    interval: (f64, f64),
    data: CauchyData,
    forcing: Option<Forcing>,
    tol: Tolerances,
    steps: Vec<DenseStep>,
}

/// Values of a solution and its quasiderivatives at one point.
#[derive(Debug, Clone, PartialEq)]
pub struct QuasiValues {
    pub u: Vec<C64>,
    /// Classical derivative `u′ = u^[1] + Q u`, one-sided at jumps of `Q`.
    pub u_prime: Vec<C64>,
    pub u1: Vec<C64>,
    /// `u^[2] = (u^[1])′ + Q u^[1] + (Q² − s) u`; `l[u] = −u^[2]`.
    pub u2: Vec<C64>,
}

/// Solves `l[u] = λu + f` (or `l⁺[u] = λu + f` when `adjoint` is set) with
/// the given Cauchy data on `interval`.
pub fn solve_cauchy(
    p: &Potential,
    adjoint: bool,
    lambda: C64,
    data: &CauchyData,
    forcing: Option<&Forcing>,
    interval: (f64, f64),
    tol: &Tolerances,
) -> Result<QuasiSolution> {
    let (a, b) = interval;
    let m = p.dim();
    if !(a.is_finite() && b.is_finite() && a <= b) {
        return Err(Error::InvalidArgument(format!("bad interval [{a}, {b}]")));
    }
    if !(a..=b).contains(&data.x0) {
        return Err(Error::OutOfInterval { x: data.x0, a, b });
    }
    if data.c0.len() != m || data.c1.len() != m {
        return Err(Error::Dimension(format!(
            "Cauchy data must have length {m}, got {} and {}",
            data.c0.len(),
            data.c1.len()
        )));
    }
    if !(tol.rtol > 0.0 && tol.atol > 0.0) {
        return Err(Error::InvalidArgument("tolerances must be positive".into()));
    }
    if !lambda.is_finite() {
        return Err(Error::InvalidArgument("spectral parameter must be finite".into()));
    }
    let effective = if adjoint { p.adjoint() } else { p.clone() };
    let mut breaks = effective.breakpoints();
    if let Some(f) = forcing {
        breaks = merge_points(&[&breaks, f.breakpoints()]);
    }
    let y0: Vec<C64> = data.c0.iter().chain(&data.c1).copied().collect();

    let mut forward = Vec::new();
    let mut y = y0.clone();
    let mut st = StepState::new();
    run(&effective, lambda, forcing, &breaks, data.x0, b, &mut y, tol, &mut st, Some(&mut forward))?;
    let mut backward = Vec::new();
    let mut y = y0;
    let used = st.steps;
    let mut st = StepState::new();
    let tol_back = Tolerances {
        max_steps: tol.max_steps.saturating_sub(used),
        ..*tol
    };
    run(&effective, lambda, forcing, &breaks, data.x0, a, &mut y, &tol_back, &mut st, Some(&mut backward))?;
    backward.reverse();
    backward.extend(forward);

    Ok(QuasiSolution {
        potential: p.clone(),
        effective,
        adjoint,
        lambda,
        interval,
        data: data.clone(),
        forcing: forcing.cloned(),
        tol: *tol,
        steps: backward,
    })
}

impl QuasiSolution {
    pub fn potential(&self) -> &Potential {
        &self.potential
    }

    /// The potential actually integrated: `p` or its adjoint.
    pub fn effective_potential(&self) -> &Potential {
        &self.effective
    }

    pub fn is_adjoint(&self) -> bool {
        self.adjoint
    }

    pub fn lambda(&self) -> C64 {
        self.lambda
    }

    pub fn interval(&self) -> (f64, f64) {
        self.interval
    }

    pub fn data(&self) -> &CauchyData {
        &self.data
    }

    pub fn tolerances(&self) -> &Tolerances {
        &self.tol
    }

    pub fn forcing(&self) -> Option<&Forcing> {
        self.forcing.as_ref()
    }

    pub fn dim(&self) -> usize {
        self.potential.dim()
    }

    pub fn steps(&self) -> &[DenseStep] {
        &self.steps
    }

    /// Interpolation order of the dense output.
    pub fn interpolation_order(&self) -> usize {
        4
    }

    /// Largest weighted local error estimate over the accepted steps.
    pub fn local_error_estimate(&self) -> f64 {
        self.steps.iter().map(|s| s.error).fold(0.0, f64::max)
    }

    /// Sorted mesh nodes, including the interval ends.
    pub fn nodes(&self) -> Vec<f64> {
        let mut xs: Vec<f64> = Vec::with_capacity(self.steps.len() + 1);
        if self.steps.is_empty() {
            xs.push(self.data.x0);
        }
        for s in &self.steps {
            let (lo, hi) = s.span();
            if xs.last() != Some(&lo) {
                xs.push(lo);
            }
            xs.push(hi);
        }
        xs
    }

    fn check(&self, x: f64) -> Result<()> {
        let (a, b) = self.interval;
        if x < a || x > b || x.is_nan() {
            return Err(Error::OutOfInterval { x, a, b });
        }
        Ok(())
    }

    fn step_at(&self, x: f64, side: Side) -> Option<&DenseStep> {
        if self.steps.is_empty() {
            return None;
        }
        let idx = match side {
            Side::Left => self.steps.partition_point(|s| s.span().1 < x),
            Side::Right | Side::Auto => self.steps.partition_point(|s| s.span().1 <= x),
        };
        Some(&self.steps[idx.min(self.steps.len() - 1)])
    }

    /// `(u(x), u^[1](x))` stacked.
    pub fn state(&self, x: f64) -> Result<Vec<C64>> {
        self.check(x)?;
        Ok(self.state_unchecked(x, Side::Auto))
    }

    fn state_unchecked(&self, x: f64, side: Side) -> Vec<C64> {
        let m = self.dim();
        match self.step_at(x, side) {
            Some(step) => {
                let mut out = vec![ZERO; 2 * m];
                step.value(x, &mut out);
                out
            }
            None => self.data.c0.iter().chain(&self.data.c1).copied().collect(),
        }
    }

    /// `u(x)`.
    pub fn u(&self, x: f64) -> Result<Vec<C64>> {
        let mut s = self.state(x)?;
        s.truncate(self.dim());
        Ok(s)
    }

    /// `u^[1](x)` (or `v^{1}` for adjoint solutions).
    pub fn u1(&self, x: f64) -> Result<Vec<C64>> {
        Ok(self.state(x)?.split_off(self.dim()))
    }

    /// `u^[1]` taken from the step on the given side of `x`.
    pub fn u1_one_sided(&self, x: f64, side: Side) -> Result<Vec<C64>> {
        self.check(x)?;
        Ok(self.state_unchecked(x, side).split_off(self.dim()))
    }

    pub fn forcing_at(&self, x: f64, side: Side) -> Vec<C64> {
        match &self.forcing {
            Some(f) => f.eval(x, side),
            None => vec![ZERO; self.dim()],
        }
    }

    /// `l[u](x) = λu(x) + f(x)` (with `l⁺` for adjoint solutions).
    pub fn l_value(&self, x: f64, side: Side) -> Result<Vec<C64>> {
        let u = self.u(x)?;
        let f = self.forcing_at(x, side);
        Ok(u.iter().zip(&f).map(|(u, f)| self.lambda * u + f).collect())
    }

    /// `u`, `u′`, `u^[1]`, `u^[2]` at `x`.
    pub fn quasiderivatives(&self, x: f64, side: Side) -> Result<QuasiValues> {
        self.check(x)?;
        let m = self.dim();
        let st = self.state_unchecked(x, side);
        let (u, u1) = st.split_at(m);
        let q = self.effective.primitive().eval(x, side);
        let s = self.effective.remainder().eval(x, side);
        let f = self.forcing_at(x, side);
        let qu = crate::linalg::mat_vec(&q, u);
        let qu1 = crate::linalg::mat_vec(&q, u1);
        let qqu = crate::linalg::mat_vec(&q, &qu);
        let su = crate::linalg::mat_vec(&s, u);
        let u_prime: Vec<C64> = (0..m).map(|i| u1[i] + qu[i]).collect();
        // (u^[1])′ from the system row, then the definition of u^[2]
        let u1_prime: Vec<C64> = (0..m)
            .map(|i| -qqu[i] + su[i] - self.lambda * u[i] - qu1[i] - f[i])
            .collect();
        let u2 = (0..m)
            .map(|i| u1_prime[i] + qu1[i] + qqu[i] - su[i])
            .collect();
        Ok(QuasiValues {
            u: u.to_vec(),
            u_prime,
            u1: u1.to_vec(),
            u2,
        })
    }

    /// Derivative of the dense interpolant of `(u, u^[1])`.
    pub fn interpolant_derivative(&self, x: f64, side: Side) -> Result<Vec<C64>> {
        self.check(x)?;
        let m = self.dim();
        let mut out = vec![ZERO; 2 * m];
        if let Some(step) = self.step_at(x, side) {
            step.derivative(x, &mut out);
        }
        Ok(out)
    }

    /// CSV with columns `x`, then `Re/Im` of each `u` component, then of
    /// each `u^[1]` component, one row per point (mesh nodes by default).
    pub fn to_csv(&self, points: Option<&[f64]>) -> Result<String> {
        let m = self.dim();
        let mut out = String::from("x");
        for name in ["u", "u1"] {
            for i in 0..m {
                write!(out, ",{name}_{i}_re,{name}_{i}_im").unwrap();
            }
        }
        out.push('\n');
        let nodes;
        let xs = match points {
            Some(p) => p,
            None => {
                nodes = self.nodes();
                &nodes
            }
        };
        for &x in xs {
            let st = self.state(x)?;
            write!(out, "{x}").unwrap();
            for z in st {
                write!(out, ",{},{}", z.re, z.im).unwrap();
            }
            out.push('\n');
        }
        Ok(out)
    }
}

/// Columns are the states at `x1` of the solutions started from the 2m
/// canonical vectors at `x0`.
pub fn fundamental_matrix(
    p: &Potential,
    adjoint: bool,
    lambda: C64,
    x0: f64,
    x1: f64,
    tol: &Tolerances,
) -> Result<CMatrix> {
    if !(x0.is_finite() && x1.is_finite()) {
        return Err(Error::InvalidArgument("endpoints must be finite".into()));
    }
    let effective = if adjoint { p.adjoint() } else { p.clone() };
    let n = 2 * p.dim();
    let ident = CMatrix::identity(n, n);
    let mut state: Vec<C64> = ident.as_slice().to_vec();
    propagate(&effective, lambda, x0, x1, &mut state, tol, &mut StepState::new())?;
    Ok(CMatrix::from_column_slice(n, n, &state))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn c(re: f64) -> C64 {
        C64::from(re)
    }

    fn tight() -> Tolerances {
        Tolerances::new(1e-12, 1e-14)
    }

    #[test]
    fn constants_solve_free_equation() {
        let p = Potential::free(1);
        let sol = solve_cauchy(&p, false, c(0.0), &CauchyData::scalar(0.0, 1.0, 0.0), None, (-5.0, 5.0), &Tolerances::default()).unwrap();
        for x in [-5.0, -1.3, 0.0, 2.2, 5.0] {
            let q = sol.quasiderivatives(x, Side::Auto).unwrap();
            assert!((q.u[0] - 1.0).norm() < 1e-12);
            assert!(q.u_prime[0].norm() < 1e-12);
            assert!(q.u1[0].norm() < 1e-12);
            assert!(q.u2[0].norm() < 1e-12);
        }
    }

    #[test]
    fn cosh_closed_form() {
        let p = Potential::free(1);
        let sol = solve_cauchy(&p, false, c(-1.0), &CauchyData::scalar(0.0, 1.0, 0.0), None, (-5.0, 5.0), &tight()).unwrap();
        for i in 0..=100 {
            let x = -5.0 + 0.1 * i as f64;
            let u = sol.u(x).unwrap()[0];
            let u1 = sol.u1(x).unwrap()[0];
            assert!((u.re - x.cosh()).abs() < 1e-9 * x.cosh(), "x={x}");
            assert!((u1.re - x.sinh()).abs() < 1e-9 * x.cosh(), "x={x}");
        }
        // u^[2] = −λu − f = cosh, l[u] = −cosh at x = 1
        let q = sol.quasiderivatives(1.0, Side::Auto).unwrap();
        assert!((q.u2[0].re - 1f64.cosh()).abs() < 1e-9);
        assert!((sol.l_value(1.0, Side::Auto).unwrap()[0].re + 1.5430806348152437).abs() < 1e-9);
    }

    #[test]
    fn delta_bound_state_trajectory() {
        let p = Potential::scalar_delta(0.0, c(-2.0));
        let e5 = (-5f64).exp();
        let sol = solve_cauchy(&p, false, c(-1.0), &CauchyData::scalar(-5.0, e5, e5), None, (-5.0, 5.0), &tight()).unwrap();
        for i in 0..=50 {
            let x = -5.0 + 0.2 * i as f64;
            assert!((sol.u(x).unwrap()[0].re - (-x.abs()).exp()).abs() < 1e-10, "x={x}");
        }
        let left = sol.quasiderivatives(0.0, Side::Left).unwrap();
        let right = sol.quasiderivatives(0.0, Side::Right).unwrap();
        assert!((left.u1[0] - 1.0).norm() < 1e-10);
        assert!((right.u1[0] - 1.0).norm() < 1e-10);
        assert!((left.u_prime[0] - 1.0).norm() < 1e-10);
        assert!((right.u_prime[0] + 1.0).norm() < 1e-10);
        let jump = right.u_prime[0] - left.u_prime[0];
        assert!((jump - (-2.0) * left.u[0]).norm() < 1e-10);
    }

    #[test]
    fn quasiderivative_chain_matches_interpolant() {
        // u2 computed from the definition should agree with the interpolant's
        // derivative of u^[1] at mesh accuracy
        let p = Potential::scalar_delta(0.5, c(1.5));
        let sol = solve_cauchy(&p, false, C64::new(0.3, 0.2), &CauchyData::scalar(0.0, 1.0, -0.5), None, (-2.0, 2.0), &tight()).unwrap();
        for x in [-1.7, -0.2, 0.9, 1.6] {
            let q = sol.quasiderivatives(x, Side::Auto).unwrap();
            let d = sol.interpolant_derivative(x, Side::Auto).unwrap();
            let qm = p.primitive().eval(x, Side::Auto)[(0, 0)];
            let from_interp = d[1] + qm * q.u1[0] + qm * qm * q.u[0];
            assert!((from_interp - q.u2[0]).norm() < 1e-7, "x={x}");
            let l = sol.l_value(x, Side::Auto).unwrap();
            assert!((l[0] + q.u2[0]).norm() < 1e-12);
        }
    }

    #[test]
    fn out_of_interval_and_bad_data() {
        let p = Potential::free(1);
        let sol = solve_cauchy(&p, false, c(0.0), &CauchyData::scalar(0.0, 1.0, 0.0), None, (-1.0, 1.0), &Tolerances::default()).unwrap();
        assert!(matches!(sol.u(1.5), Err(Error::OutOfInterval { .. })));
        assert!(solve_cauchy(&p, false, c(0.0), &CauchyData::scalar(3.0, 1.0, 0.0), None, (-1.0, 1.0), &Tolerances::default()).is_err());
        let bad = CauchyData::new(0.0, vec![c(1.0); 2], vec![c(0.0)]);
        assert!(matches!(solve_cauchy(&p, false, c(0.0), &bad, None, (-1.0, 1.0), &Tolerances::default()), Err(Error::Dimension(_))));
    }

    #[test]
    fn blow_up_reports_last_x() {
        let p = Potential::free(1);
        let r = solve_cauchy(&p, false, c(-400.0), &CauchyData::scalar(0.0, 1.0, 0.0), None, (0.0, 40.0), &Tolerances::default());
        match r {
            Err(Error::BlowUp { last_x, .. }) => assert!(last_x > 25.0 && last_x < 30.0, "{last_x}"),
            other => panic!("expected blow-up, got {other:?}"),
        }
    }

    #[test]
    fn forcing_with_jump() {
        // −u″ = f with f = H(x): u = −x²/2 for x>0, 0 for x<0 (u(−1)=0, u′(−1)=0)
        let f = Forcing::new(
            |x, side| {
                let on = x > 0.0 || (x == 0.0 && side != Side::Left);
                vec![c(if on { 1.0 } else { 0.0 })]
            },
            vec![0.0],
        );
        let p = Potential::free(1);
        let sol = solve_cauchy(&p, false, c(0.0), &CauchyData::scalar(-1.0, 0.0, 0.0), Some(&f), (-1.0, 2.0), &tight()).unwrap();
        assert!((sol.u(2.0).unwrap()[0].re + 2.0).abs() < 1e-11);
        assert!(sol.nodes().contains(&0.0));
    }

    #[test]
    fn fundamental_matrix_closed_forms() {
        let p = Potential::free(1);
        let t = 1.7;
        let m = fundamental_matrix(&p, false, c(0.0), 0.0, t, &tight()).unwrap();
        let want = CMatrix::from_row_slice(2, 2, &[c(1.0), c(t), c(0.0), c(1.0)]);
        assert!((m - want).norm() < 1e-12);
        let m = fundamental_matrix(&p, false, c(-1.0), 0.0, t, &tight()).unwrap();
        let want = CMatrix::from_row_slice(2, 2, &[c(t.cosh()), c(t.sinh()), c(t.sinh()), c(t.cosh())]);
        assert!((m - want).norm() < 1e-10);
        let d = Potential::scalar_delta(0.0, c(1.0));
        let id = fundamental_matrix(&d, true, C64::new(0.2, 1.0), 0.4, 0.4, &tight()).unwrap();
        assert_eq!(id, CMatrix::identity(2, 2));
    }

    #[test]
    fn fundamental_matrix_composition() {
        let p = Potential::scalar_delta(0.0, C64::new(-1.0, 0.5));
        let tol = tight();
        let lam = C64::new(0.4, -0.3);
        let a = fundamental_matrix(&p, false, lam, -1.0, 0.3, &tol).unwrap();
        let b = fundamental_matrix(&p, false, lam, 0.3, 1.5, &tol).unwrap();
        let ab = fundamental_matrix(&p, false, lam, -1.0, 1.5, &tol).unwrap();
        assert!((&b * &a - &ab).norm() < 100.0 * 1e-12 * ab.norm());
    }

    #[test]
    fn csv_export_shape() {
        let p = Potential::free(2);
        let data = CauchyData::new(0.0, vec![c(1.0), c(0.0)], vec![c(0.0), c(1.0)]);
        let sol = solve_cauchy(&p, false, c(0.0), &data, None, (0.0, 1.0), &Tolerances::default()).unwrap();
        let csv = sol.to_csv(Some(&[0.0, 0.5, 1.0])).unwrap();
        let lines: Vec<&str> = csv.lines().collect();
        assert_eq!(lines[0], "x,u_0_re,u_0_im,u_1_re,u_1_im,u1_0_re,u1_0_im,u1_1_re,u1_1_im");
        assert_eq!(lines.len(), 4);
        assert_eq!(lines[3].split(',').count(), 9);
    }
}
