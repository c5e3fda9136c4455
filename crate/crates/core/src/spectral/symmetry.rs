//! Conjugation identities for transpose-symmetric potentials: the adjoint
//! system is the complex conjugate of the original one.

use serde::Serialize;

use super::FdMatrix;
use crate::cauchy::{solve_cauchy, CauchyData, Tolerances};
use crate::error::{Error, Result};
use crate::linalg::{norm, C64};
use crate::potential::{Potential, SymmetryClass};

#[derive(Debug, Clone, Copy, Serialize)]
pub struct JSymmetryReport {
    pub residual: f64,
    pub samples: usize,
    pub symmetry_class: SymmetryClass,
}

/// `j_symmetry_residual`: solves `l[u] = λu` with `data` and `l⁺[v] = λ̄v`
/// with conjugated data, and returns the largest
/// `‖ū − v‖ + ‖conj(u^[1]) − v^{1}‖` over both meshes.
pub fn j_symmetry_residual(
    p: &Potential,
    data: &CauchyData,
    lambda: C64,
    interval: (f64, f64),
    tol: &Tolerances,
) -> Result<JSymmetryReport> {
    let class = p.symmetry_class();
    if !p.is_transpose_symmetric() {
        return Err(Error::SymmetryClass(format!(
            "conjugation identity needs Q = Qᵀ and s = sᵀ; potential is {class}"
        )));
    }
    let u = solve_cauchy(p, false, lambda, data, None, interval, tol)?;
    let v = solve_cauchy(p, true, lambda.conj(), &data.conjugate(), None, interval, tol)?;
    let mut xs = u.nodes();
    xs.extend(v.nodes());
    xs.sort_by(f64::total_cmp);
    xs.dedup();
    let mut worst = 0.0f64;
    for &x in &xs {
        let su = u.state(x)?;
        let sv = v.state(x)?;
        let m = p.dim();
        let d0: Vec<C64> = (0..m).map(|i| su[i].conj() - sv[i]).collect();
        let d1: Vec<C64> = (m..2 * m).map(|i| su[i].conj() - sv[i]).collect();
        worst = worst.max(norm(&d0) + norm(&d1));
    }
    Ok(JSymmetryReport {
        residual: worst,
        samples: xs.len(),
        symmetry_class: class,
    })
}

/// `‖M − Mᵀ‖_F / ‖M‖_F`.
pub fn fd_symmetry_ratio(fd: &FdMatrix) -> f64 {
    let t = fd.matrix.transpose();
    fd.matrix.frobenius_diff(&t) / fd.matrix.frobenius()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg::CMatrix;
    use crate::potential::MatrixFunction;
    use crate::spectral::{discretize_fd, TruncatedProblem, Window};

    #[test]
    fn complex_delta_conjugation() {
        let p = Potential::scalar_delta(0.0, C64::new(0.0, 1.0));
        let r = j_symmetry_residual(&p, &CauchyData::scalar(-1.0, 1.0, 0.0), C64::new(0.0, 1.0), (-2.0, 2.0), &Tolerances::default()).unwrap();
        assert!(r.residual <= 1e-8);
        assert_eq!(r.symmetry_class, SymmetryClass::ComplexSymmetric);
    }

    #[test]
    fn matrix_symmetric_and_refusal() {
        let i = C64::new(0.0, 1.0);
        let z = C64::from(0.0);
        let q = MatrixFunction::step(0.0, CMatrix::zeros(2, 2), CMatrix::from_row_slice(2, 2, &[z, i, i, z])).unwrap();
        let p = Potential::new(q, MatrixFunction::zero(2)).unwrap();
        let data = CauchyData::new(0.3, vec![C64::new(1.0, 0.5), z], vec![z, C64::from(1.0)]);
        let r = j_symmetry_residual(&p, &data, C64::new(0.5, -0.2), (-1.5, 1.5), &Tolerances::default()).unwrap();
        assert!(r.residual <= 1e-8);
        let tp = TruncatedProblem::new(p, 4.0, Window::real(0.0, 1.0).unwrap()).unwrap();
        assert!(fd_symmetry_ratio(&discretize_fd(&tp, 101).unwrap()) <= 1e-12);

        let nonsym = MatrixFunction::step(
            0.0,
            CMatrix::zeros(2, 2),
            CMatrix::from_row_slice(2, 2, &[z, C64::from(1.0), C64::from(-1.0), z]),
        )
        .unwrap();
        let p = Potential::new(nonsym, MatrixFunction::zero(2)).unwrap();
        assert!(matches!(
            j_symmetry_residual(&p, &data, C64::from(0.0), (-1.0, 1.0), &Tolerances::default()),
            Err(Error::SymmetryClass(_))
        ));
    }
}
