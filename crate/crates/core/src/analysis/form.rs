//! The quadratic form `⟨l[w], w⟩` written without derivatives of `Q`:
//! `∫(w′, w′) − ∫[(Qw′, w) + (Qw, w′)] + ∫(sw, w)`.

use serde::Serialize;

use super::CompactTestFunction;
use crate::error::{Error, Result};
use crate::linalg::{inner, mat_vec, C64};
use crate::potential::{Potential, Side};
use crate::quadrature::{integrate, CArray, QuadOptions};

/// Value of the form with its three summands.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct FormReport {
    pub value: C64,
    pub real_part: f64,
    pub kinetic: C64,
    pub q_term: C64,
    pub s_term: C64,
    pub quadrature_error: f64,
}

fn splits_for(p: &Potential, w: &CompactTestFunction, psi: Option<&CompactTestFunction>) -> Vec<f64> {
    let mut pts = p.breakpoints();
    pts.extend_from_slice(w.kinks());
    if let Some(psi) = psi {
        pts.extend_from_slice(psi.kinks());
        let (a, b) = psi.support();
        pts.extend([a, b]);
    }
    pts
}

fn check_dims(p: &Potential, w: &CompactTestFunction) -> Result<()> {
    if p.dim() != w.dim() {
        return Err(Error::Dimension(format!(
            "potential is {0}x{0} but test function has {1} components",
            p.dim(),
            w.dim()
        )));
    }
    Ok(())
}

/// Sesquilinear form `B(w, ψ) = ∫(w′, ψ′) − ∫(Qw′, ψ) − ∫(Qw, ψ′) + ∫(sw, ψ)`,
/// the weak form of `⟨l[w], ψ⟩`; integrated over the support of `w`.
pub fn sesquilinear_form(p: &Potential, w: &CompactTestFunction, psi: &CompactTestFunction) -> Result<FormReport> {
    check_dims(p, w)?;
    check_dims(p, psi)?;
    let (a, b) = w.support();
    let splits = splits_for(p, w, Some(psi));
    let r = integrate(
        |x| {
            let wv = w.values(x, Side::Auto);
            let pv = psi.values(x, Side::Auto);
            let q = p.primitive().eval(x, Side::Auto);
            let s = p.remainder().eval(x, Side::Auto);
            let kin = inner(&wv.derivative, &pv.derivative);
            let qt = -(inner(&mat_vec(&q, &wv.derivative), &pv.value) + inner(&mat_vec(&q, &wv.value), &pv.derivative));
            let st = inner(&mat_vec(&s, &wv.value), &pv.value);
            CArray([kin, qt, st])
        },
        a,
        b,
        &splits,
        &QuadOptions::default(),
    )?;
    let [kinetic, q_term, s_term] = r.value.0;
    let value = kinetic + q_term + s_term;
    Ok(FormReport {
        value,
        real_part: value.re,
        kinetic,
        q_term,
        s_term,
        quadrature_error: r.error,
    })
}

/// `form_value`: `B(w, w)`.
pub fn form_value(p: &Potential, w: &CompactTestFunction) -> Result<FormReport> {
    sesquilinear_form(p, w, w)
}

/// `∫(l[w], ψ)` from the pointwise `l`-values carried by `w`.
pub fn l_pairing(w: &CompactTestFunction, psi: &CompactTestFunction) -> Result<C64> {
    if !w.has_l_values() {
        return Err(Error::InvalidArgument("test function carries no l-values".into()));
    }
    let (a, b) = w.support();
    let mut splits = w.kinks().to_vec();
    splits.extend_from_slice(psi.kinks());
    splits.extend([psi.support().0, psi.support().1]);
    let r = integrate(
        |x| inner(&w.l_value(x, Side::Auto).expect("has l-values"), &psi.value(x)),
        a,
        b,
        &splits,
        &QuadOptions::default(),
    )?;
    Ok(r.value)
}
