//! Cutting a solution down to a compactly supported element of the
//! preminimal domain via the product rule
//! `l[φu] = φ·l[u] − φ″u − 2φ′u′`.

use std::sync::Arc;

use super::QuasiSolution;
use crate::analysis::{CompactTestFunction, Profile, TestValues};
use crate::error::{Error, Result};
use crate::linalg::C64;

/// `mollify_to_domain`: `φu` with its pointwise `l`-values.
pub fn mollify_to_domain<P>(sol: &Arc<QuasiSolution>, phi: P) -> Result<CompactTestFunction>
where
    P: Profile + Clone + 'static,
{
    let (a, b) = phi.support();
    let (lo, hi) = sol.interval();
    if a < lo || b > hi {
        return Err(Error::InvalidArgument(format!(
            "cutoff support [{a}, {b}] not inside solution interval [{lo}, {hi}]"
        )));
    }
    let mut kinks = phi.kinks();
    kinks.extend(sol.effective_potential().breakpoints());
    if let Some(f) = sol.forcing() {
        kinks.extend_from_slice(f.breakpoints());
    }
    // mesh nodes: the dense output is only piecewise smooth
    kinks.extend(sol.nodes().into_iter().filter(|x| *x > a && *x < b));

    let s1 = Arc::clone(sol);
    let p1 = phi.clone();
    let w = CompactTestFunction::new(sol.dim(), (a, b), kinks, move |x, side| {
        let (f, df, _) = p1.eval(x);
        let q = s1.quasiderivatives(x, side).expect("inside support");
        TestValues {
            value: q.u.iter().map(|u| u * f).collect(),
            derivative: q.u.iter().zip(&q.u_prime).map(|(u, du)| u * df + du * f).collect(),
        }
    })?;
    let s2 = Arc::clone(sol);
    Ok(w.with_l_values(move |x, side| {
        let (f, df, ddf) = phi.eval(x);
        let q = s2.quasiderivatives(x, side).expect("inside support");
        let l = s2.l_value(x, side).expect("inside support");
        (0..q.u.len())
            .map(|i| f * l[i] - ddf * q.u[i] - C64::from(2.0 * df) * q.u_prime[i])
            .collect()
    }))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::analysis::Bump;
    use crate::potential::Side;
    use crate::cauchy::{solve_cauchy, CauchyData, Tolerances};
    use crate::potential::Potential;

    #[test]
    fn constant_solution_gives_minus_phi_second_derivative() {
        let p = Potential::free(1);
        let sol = Arc::new(
            solve_cauchy(&p, false, C64::from(0.0), &CauchyData::scalar(0.0, 1.0, 0.0), None, (-3.0, 3.0), &Tolerances::default())
                .unwrap(),
        );
        let bump = Bump::new(-2.0, 2.0, 1.0).unwrap();
        let w = mollify_to_domain(&sol, bump).unwrap();
        for x in [-1.7, -1.2, 0.0, 1.5] {
            let want = -bump.eval(x).2;
            assert!((w.l_value(x, Side::Auto).unwrap()[0].re - want).abs() < 1e-12);
        }
    }

    #[test]
    fn cosh_solution_product_rule() {
        let p = Potential::free(1);
        let sol = Arc::new(
            solve_cauchy(&p, false, C64::from(-1.0), &CauchyData::scalar(0.0, 1.0, 0.0), None, (-3.0, 3.0), &Tolerances::new(1e-12, 1e-14))
                .unwrap(),
        );
        let bump = Bump::new(-2.5, 2.0, 0.8).unwrap();
        let w = mollify_to_domain(&sol, bump).unwrap();
        for x in [-2.2, -1.0, 1.5, 1.9] {
            let (f, df, ddf) = bump.eval(x);
            let want = -f * x.cosh() - ddf * x.cosh() - 2.0 * df * x.sinh();
            assert!((w.l_value(x, Side::Auto).unwrap()[0].re - want).abs() < 1e-9, "x={x}");
        }
    }

    #[test]
    fn locality_where_phi_is_flat() {
        let p = Potential::scalar_delta(0.0, C64::from(-2.0));
        let sol = Arc::new(
            solve_cauchy(&p, false, C64::new(0.5, 0.1), &CauchyData::scalar(0.0, 1.0, 0.3), None, (-4.0, 4.0), &Tolerances::default())
                .unwrap(),
        );
        let w = mollify_to_domain(&sol, Bump::new(-3.0, 3.0, 1.0).unwrap()).unwrap();
        for x in [-1.5, -0.3, 0.7, 1.9] {
            let lw = w.l_value(x, Side::Auto).unwrap()[0];
            let lu = sol.l_value(x, Side::Auto).unwrap()[0];
            assert!((lw - lu).norm() < 1e-14);
        }
    }

    #[test]
    fn support_must_fit() {
        let p = Potential::free(1);
        let sol = Arc::new(
            solve_cauchy(&p, false, C64::from(0.0), &CauchyData::scalar(0.0, 1.0, 0.0), None, (-1.0, 1.0), &Tolerances::default())
                .unwrap(),
        );
        assert!(mollify_to_domain(&sol, Bump::new(-2.0, 0.5, 0.5).unwrap()).is_err());
    }
}
