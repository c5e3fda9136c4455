//! Property tests over randomly generated potentials and test functions.

use nalgebra::DMatrix;
use num_complex::Complex64 as C64;
use proptest::prelude::*;

use singular_schrodinger::analysis::{
    bracket, cutoff_family, form_value, green_identity_residual, sesquilinear_form, CompactTestFunction, RampProfile,
};
use singular_schrodinger::cauchy::{solve_cauchy, CauchyData, Tolerances};
use singular_schrodinger::potential::{Extension, MatrixFunction, Potential, Side};

fn c64() -> impl Strategy<Value = C64> {
    (-1.0..1.0f64, -1.0..1.0f64).prop_map(|(re, im)| C64::new(re, im))
}

fn cmat(m: usize) -> impl Strategy<Value = DMatrix<C64>> {
    prop::collection::vec(c64(), m * m).prop_map(move |v| DMatrix::from_vec(m, m, v))
}

fn hermitian(m: usize) -> impl Strategy<Value = DMatrix<C64>> {
    cmat(m).prop_map(|a| (&a + a.adjoint()) * C64::from(0.5))
}

/// Piecewise-linear `Q` with jumps at −1 and 1 and constant `s`.
fn potential(m: usize) -> impl Strategy<Value = Potential> {
    (prop::collection::vec(cmat(m), 6), cmat(m)).prop_map(move |(c, s)| {
        let pieces = c.chunks(2).map(|p| p.to_vec()).collect();
        let q = MatrixFunction::new(m, vec![-1.0, 1.0], pieces, Extension::Constant).unwrap();
        Potential::new(q, MatrixFunction::constant(s)).unwrap()
    })
}

/// Self-adjoint: Hermitian pieces for both `Q` and `s`.
fn self_adjoint_potential(m: usize) -> impl Strategy<Value = Potential> {
    (prop::collection::vec(hermitian(m), 3), hermitian(m)).prop_map(move |(c, s)| {
        let pieces = c.into_iter().map(|p| vec![p]).collect();
        let q = MatrixFunction::new(m, vec![-0.5, 0.5], pieces, Extension::Constant).unwrap();
        Potential::new(q, MatrixFunction::constant(s)).unwrap()
    })
}

fn data(m: usize) -> impl Strategy<Value = CauchyData> {
    (-1.0..1.0f64, prop::collection::vec(c64(), m), prop::collection::vec(c64(), m))
        .prop_map(|(x0, c0, c1)| CauchyData::new(x0, c0, c1))
}

fn dim_and_potential() -> impl Strategy<Value = Potential> {
    prop_oneof![potential(1), potential(2)]
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(32))]

    #[test]
    fn system_matrix_blocks(p in dim_and_potential(), x in -3.0..3.0f64, lambda in c64()) {
        let m = p.dim();
        let a = p.system().eval_shifted(x, Side::Right, lambda);
        let q = p.primitive().eval(x, Side::Right);
        let s = p.remainder().eval(x, Side::Right);
        let lower = &s - &q * &q - DMatrix::<C64>::identity(m, m) * lambda;
        prop_assert_eq!(a.view((0, 0), (m, m)).into_owned(), q.clone());
        prop_assert_eq!(a.view((0, m), (m, m)).into_owned(), DMatrix::<C64>::identity(m, m));
        prop_assert!((a.view((m, 0), (m, m)).into_owned() - lower).norm() < 1e-14);
        prop_assert_eq!(a.view((m, m), (m, m)).into_owned(), -q);
    }

    #[test]
    fn adjoint_is_an_involution(p in dim_and_potential()) {
        prop_assert_eq!(p.adjoint().adjoint(), p);
    }

    #[test]
    fn solutions_superpose(p in potential(2), d1 in data(2), d2 in data(2), a in c64(), b in c64(), lambda in c64()) {
        let tol = Tolerances::new(1e-12, 1e-14);
        let x0 = d1.x0;
        let d2 = CauchyData::new(x0, d2.c0, d2.c1);
        let mix = CauchyData::new(
            x0,
            d1.c0.iter().zip(&d2.c0).map(|(u, v)| a * u + b * v).collect(),
            d1.c1.iter().zip(&d2.c1).map(|(u, v)| a * u + b * v).collect(),
        );
        let s1 = solve_cauchy(&p, false, lambda, &d1, None, (-2.0, 2.0), &tol).unwrap();
        let s2 = solve_cauchy(&p, false, lambda, &d2, None, (-2.0, 2.0), &tol).unwrap();
        let sm = solve_cauchy(&p, false, lambda, &mix, None, (-2.0, 2.0), &tol).unwrap();
        for x in [-2.0, -1.0, -0.3, 0.7, 1.0, 2.0] {
            let (y1, y2, ym) = (s1.state(x).unwrap(), s2.state(x).unwrap(), sm.state(x).unwrap());
            for i in 0..4 {
                prop_assert!((a * y1[i] + b * y2[i] - ym[i]).norm() < 1e-8 * (1.0 + ym[i].norm()));
            }
        }
    }

    #[test]
    fn form_scales_by_modulus_squared(p in potential(1), c in c64(), center in -1.5..1.5f64, width in 0.2..2.0f64) {
        let w = CompactTestFunction::hat(center, width, vec![C64::from(1.0)]).unwrap();
        let b1 = form_value(&p, &w).unwrap().value;
        let bc = form_value(&p, &w.scaled(c)).unwrap().value;
        prop_assert!((bc - b1 * c.norm_sqr()).norm() < 1e-9 * (1.0 + b1.norm()));
    }

    #[test]
    fn form_is_additive_over_disjoint_supports(p in potential(2), d1 in prop::collection::vec(c64(), 2), d2 in prop::collection::vec(c64(), 2)) {
        let w1 = CompactTestFunction::gaussian(-2.0, 0.1, 0, d1).unwrap();
        let w2 = CompactTestFunction::hat(1.0, 0.9, d2).unwrap();
        let sum = w1.sum(&w2).unwrap();
        let b = form_value(&p, &sum).unwrap().value;
        let parts = form_value(&p, &w1).unwrap().value + form_value(&p, &w2).unwrap().value;
        prop_assert!((b - parts).norm() < 1e-9 * (1.0 + b.norm()));
    }

    #[test]
    fn self_adjoint_forms_are_real(p in prop_oneof![self_adjoint_potential(1), self_adjoint_potential(2)], center in -1.0..1.0f64, sigma in 0.2..1.0f64, seed in c64()) {
        let m = p.dim();
        let dir: Vec<C64> = (0..m).map(|k| seed * C64::new(1.0, k as f64)).collect();
        prop_assume!(dir.iter().any(|z| z.norm() > 1e-3));
        let w = CompactTestFunction::gaussian(center, sigma, 1, dir).unwrap();
        let f = form_value(&p, &w).unwrap();
        prop_assert!(f.value.im.abs() < 1e-10 * (1.0 + f.value.norm()));
    }

    #[test]
    fn form_is_conjugate_symmetric_for_self_adjoint(p in self_adjoint_potential(2), d1 in prop::collection::vec(c64(), 2), d2 in prop::collection::vec(c64(), 2)) {
        let w = CompactTestFunction::gaussian(0.2, 0.6, 0, d1).unwrap();
        let psi = CompactTestFunction::hat(-0.1, 1.3, d2).unwrap();
        let a = sesquilinear_form(&p, &w, &psi).unwrap().value;
        let b = sesquilinear_form(&p, &psi, &w).unwrap().value;
        prop_assert!((a - b.conj()).norm() < 1e-10 * (1.0 + a.norm()));
    }

    #[test]
    fn bracket_is_constant(p in dim_and_potential(), du in data(2), dv in data(2), lambda in c64()) {
        let m = p.dim();
        let tol = Tolerances::new(1e-12, 1e-14);
        let du = CauchyData::new(du.x0, du.c0[..m].to_vec(), du.c1[..m].to_vec());
        let dv = CauchyData::new(dv.x0, dv.c0[..m].to_vec(), dv.c1[..m].to_vec());
        let u = solve_cauchy(&p, false, lambda, &du, None, (-2.0, 2.0), &tol).unwrap();
        let v = solve_cauchy(&p, true, lambda.conj(), &dv, None, (-2.0, 2.0), &tol).unwrap();
        let b0 = bracket(&u, &v, -2.0).unwrap();
        for t in [-1.5, -1.0, 0.0, 0.9, 1.0, 2.0] {
            prop_assert!((bracket(&u, &v, t).unwrap() - b0).norm() < 1e-8 * (1.0 + b0.norm()));
        }
    }

    #[test]
    fn green_residual_small(p in potential(1), du in data(1), dv in data(1), lu in c64(), lv in c64(), a in -2.0..0.0f64, b in 0.0..2.0f64) {
        let tol = Tolerances::default();
        let u = solve_cauchy(&p, false, lu, &du, None, (-2.0, 2.0), &tol).unwrap();
        let v = solve_cauchy(&p, true, lv, &dv, None, (-2.0, 2.0), &tol).unwrap();
        prop_assert!(green_identity_residual(&u, &v, a, b).unwrap() < 1e-7);
    }

    #[test]
    fn cutoffs_have_uniform_bounds(n in 1usize..=20, t in 0.0..1.0f64, profile in prop_oneof![Just(RampProfile::Cubic), Just(RampProfile::Quintic), Just(RampProfile::Septic)]) {
        let c = cutoff_family(n, profile).unwrap();
        let nf = n as f64;
        // i) identically one on [−n, n]
        prop_assert_eq!(c.phi(nf * (2.0 * t - 1.0)), 1.0);
        // ii) vanishes outside [−n−1, n+1]
        prop_assert_eq!(c.phi(nf + 1.0 + t), 0.0);
        prop_assert_eq!(c.phi(-nf - 1.0 - t), 0.0);
        // iii) values in [0, 1], slope bounded by the profile constant
        let x = nf + t;
        prop_assert!((0.0..=1.0).contains(&c.phi(x)));
        prop_assert!(c.dphi(x).abs() <= c.slope_bound + 1e-12);
        prop_assert!(c.dphi(-x).abs() <= c.slope_bound + 1e-12);
        // iv) symmetric and independent of n after translation
        prop_assert_eq!(c.phi(x), c.phi(-x));
        let one = cutoff_family(1, profile).unwrap();
        prop_assert!((c.phi(x) - one.phi(1.0 + t)).abs() < 1e-12);
        prop_assert!((c.ddphi(x) - one.ddphi(1.0 + t)).abs() < 1e-9);
    }
}

#[test]
fn quintic_slope_bound_is_15_over_8() {
    assert_eq!(cutoff_family(3, RampProfile::Quintic).unwrap().slope_bound, 1.875);
}
