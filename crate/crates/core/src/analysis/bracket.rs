//! Lagrange brackets `[u, v] = (u, v^{1}) − (u^[1], v)` and Green's
//! identity for pairs of solutions of `l` and `l⁺`.

use serde::Serialize;

use super::CompactTestFunction;
use crate::cauchy::QuasiSolution;
use crate::error::{Error, Result};
use crate::linalg::{inner, C64};
use crate::potential::{Potential, Side};
use crate::quadrature::{integrate, QuadOptions};

fn check_pair(u: &QuasiSolution, v: &QuasiSolution) -> Result<()> {
    if u.is_adjoint() {
        return Err(Error::AdjointMismatch("first argument must solve l, not l+".into()));
    }
    if !v.is_adjoint() {
        return Err(Error::AdjointMismatch("second argument must solve l+".into()));
    }
    if u.potential() != v.potential() {
        return Err(Error::AdjointMismatch("solutions belong to different potentials".into()));
    }
    Ok(())
}

/// `[u, v](t)`.
pub fn bracket(u: &QuasiSolution, v: &QuasiSolution, t: f64) -> Result<C64> {
    check_pair(u, v)?;
    Ok(inner(&u.u(t)?, &v.u1(t)?) - inner(&u.u1(t)?, &v.u(t)?))
}

/// Mesh nodes of the given solutions together with potential and forcing
/// breakpoints; quadrature panels are split there.
pub(crate) fn solution_splits(sols: &[&QuasiSolution], a: f64, b: f64) -> Vec<f64> {
    let mut pts = Vec::new();
    for s in sols {
        pts.extend(s.nodes());
        pts.extend(s.effective_potential().breakpoints());
        if let Some(f) = s.forcing() {
            pts.extend_from_slice(f.breakpoints());
        }
    }
    pts.retain(|x| *x > a && *x < b);
    pts.sort_by(f64::total_cmp);
    pts.dedup();
    pts
}

/// Both sides of Green's identity on `[a, b]`.
#[derive(Debug, Clone, Copy, Serialize)]
pub struct GreenReport {
    /// `∫(l[u], v) − ∫(u, l⁺[v])`.
    pub integral_difference: C64,
    /// `[u, v](b) − [u, v](a)`.
    pub bracket_difference: C64,
    pub residual: f64,
    pub quadrature_error: f64,
}

pub fn green_identity(u: &QuasiSolution, v: &QuasiSolution, a: f64, b: f64) -> Result<GreenReport> {
    check_pair(u, v)?;
    let splits = solution_splits(&[u, v], a, b);
    let opts = QuadOptions::default();
    let integral = integrate(
        |x| {
            let lu = u.l_value(x, Side::Auto).expect("inside interval");
            let lv = v.l_value(x, Side::Auto).expect("inside interval");
            let uu = u.u(x).expect("inside interval");
            let vv = v.u(x).expect("inside interval");
            inner(&lu, &vv) - inner(&uu, &lv)
        },
        a,
        b,
        &splits,
        &opts,
    )?;
    let bracket_difference = bracket(u, v, b)? - bracket(u, v, a)?;
    Ok(GreenReport {
        integral_difference: integral.value,
        bracket_difference,
        residual: (integral.value - bracket_difference).norm(),
        quadrature_error: integral.error,
    })
}

/// `green_identity_residual`.
pub fn green_identity_residual(u: &QuasiSolution, v: &QuasiSolution, a: f64, b: f64) -> Result<f64> {
    Ok(green_identity(u, v, a, b)?.residual)
}

/// One sample of `bracket_tail`.
#[derive(Debug, Clone, Copy, Serialize)]
pub struct TailSample {
    pub radius: f64,
    pub left: C64,
    pub right: C64,
}

/// `[u, v](±r)` for each radius; diagnostic only.
pub fn bracket_tail(u: &QuasiSolution, v: &QuasiSolution, radii: &[f64]) -> Result<Vec<TailSample>> {
    radii
        .iter()
        .map(|&r| {
            Ok(TailSample {
                radius: r,
                left: bracket(u, v, -r)?,
                right: bracket(u, v, r)?,
            })
        })
        .collect()
}

/// `|⟨l[w], v⟩ − ⟨w, l⁺[v]⟩|` over the support of `w`.
pub fn adjoint_pairing_residual(p: &Potential, w: &CompactTestFunction, v: &QuasiSolution) -> Result<f64> {
    if !v.is_adjoint() || v.potential() != p {
        return Err(Error::AdjointMismatch(
            "v must solve l+ for the given potential".into(),
        ));
    }
    if !w.has_l_values() {
        return Err(Error::InvalidArgument("test function carries no l-values".into()));
    }
    let (a, b) = w.support();
    let (lo, hi) = v.interval();
    if a < lo || b > hi {
        return Err(Error::OutOfInterval { x: if a < lo { a } else { b }, a: lo, b: hi });
    }
    let mut splits = solution_splits(&[v], a, b);
    splits.extend_from_slice(w.kinks());
    let r = integrate(
        |x| {
            let lw = w.l_value(x, Side::Auto).expect("has l-values");
            let ww = w.value(x);
            let vv = v.u(x).expect("inside interval");
            let lv = v.l_value(x, Side::Auto).expect("inside interval");
            inner(&lw, &vv) - inner(&ww, &lv)
        },
        a,
        b,
        &splits,
        &QuadOptions::default(),
    )?;
    Ok(r.value.norm())
}
