//! Distributional matrix potentials `q = Q′ + s` and their Shin–Zettl
//! system matrices.

mod config;
mod matrix_function;

pub use config::{MatrixFunctionConfig, PotentialConfig};
pub use matrix_function::{Extension, MatrixFunction, Piece, Side, DEFAULT_DEGREE_CAP};

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::linalg::{CMatrix, C64};

/// Symmetry class of a potential, decided exactly on the coefficients.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum SymmetryClass {
    /// `Q = Q*` and `s = s*`.
    SelfAdjoint,
    /// `Q = Qᵀ` and `s = sᵀ` (and not self-adjoint).
    ComplexSymmetric,
    General,
}

impl std::fmt::Display for SymmetryClass {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(match self {
            SymmetryClass::SelfAdjoint => "selfadjoint",
            SymmetryClass::ComplexSymmetric => "complex_symmetric",
            SymmetryClass::General => "general",
        })
    }
}

/// The pair `(Q, s)` representing `q = Q′ + s`.
#[derive(Debug, Clone, PartialEq)]
pub struct Potential {
    m: usize,
    primitive: MatrixFunction,
    remainder: MatrixFunction,
    class: SymmetryClass,
}

impl Potential {
    /// `primitive` is `Q` (its distributional derivative enters `q`),
    /// `remainder` is the locally integrable part `s`.
    pub fn new(primitive: MatrixFunction, remainder: MatrixFunction) -> Result<Self> {
        if primitive.dim() != remainder.dim() {
            return Err(Error::Dimension(format!(
                "Q is {0}x{0} but s is {1}x{1}",
                primitive.dim(),
                remainder.dim()
            )));
        }
        let class = classify(&primitive, &remainder);
        Ok(Potential {
            m: primitive.dim(),
            primitive,
            remainder,
            class,
        })
    }

    pub fn free(m: usize) -> Self {
        Self::new(MatrixFunction::zero(m), MatrixFunction::zero(m)).unwrap()
    }

    /// Scalar `q = α·δ(x - at)`, i.e. `Q = α·H(x - at)`, `s = 0`.
    pub fn scalar_delta(at: f64, alpha: C64) -> Self {
        Self::new(MatrixFunction::scalar_step(at, alpha), MatrixFunction::zero(1)).unwrap()
    }

    pub fn dim(&self) -> usize {
        self.m
    }

    /// `Q`.
    pub fn primitive(&self) -> &MatrixFunction {
        &self.primitive
    }

    /// `s`.
    pub fn remainder(&self) -> &MatrixFunction {
        &self.remainder
    }

    pub fn symmetry_class(&self) -> SymmetryClass {
        self.class
    }

    /// Sorted union of the breakpoints of `Q` and `s`.
    pub fn breakpoints(&self) -> Vec<f64> {
        merge_points(&[self.primitive.breakpoints(), self.remainder.breakpoints()])
    }

    /// The Lagrange adjoint data `(Q*, s*)`.
    pub fn adjoint(&self) -> Potential {
        Potential::new(self.primitive.adjoint(), self.remainder.adjoint()).unwrap()
    }

    /// True when `Q = Qᵀ` and `s = sᵀ` coefficient-wise.
    pub fn is_transpose_symmetric(&self) -> bool {
        self.primitive.transpose() == self.primitive && self.remainder.transpose() == self.remainder
    }

    /// The Shin–Zettl matrix of this potential.
    pub fn system(&self) -> SystemMatrix<'_> {
        SystemMatrix { potential: self }
    }

    /// Pointwise `q` away from jumps, `Q′(x) + s(x)`.
    pub fn regular_part(&self, x: f64, side: Side) -> CMatrix {
        self.primitive.derivative().eval(x, side) + self.remainder.eval(x, side)
    }
}

/// `adjoint_potential`: `(Q, s) ↦ (Q*, s*)`.
pub fn adjoint_potential(p: &Potential) -> Potential {
    p.adjoint()
}

/// `classify_symmetry`; self-adjoint wins over complex-symmetric.
pub fn classify_symmetry(p: &Potential) -> SymmetryClass {
    classify(p.primitive(), p.remainder())
}

fn classify(q: &MatrixFunction, s: &MatrixFunction) -> SymmetryClass {
    if q.adjoint() == *q && s.adjoint() == *s {
        SymmetryClass::SelfAdjoint
    } else if q.transpose() == *q && s.transpose() == *s {
        SymmetryClass::ComplexSymmetric
    } else {
        SymmetryClass::General
    }
}

pub(crate) fn merge_points(lists: &[&[f64]]) -> Vec<f64> {
    let mut all: Vec<f64> = lists.iter().flat_map(|l| l.iter().copied()).collect();
    all.sort_by(f64::total_cmp);
    all.dedup();
    all
}

/// `A(x) = [Q, I; −Q² + s, −Q]` for a given potential.
#[derive(Debug, Clone, Copy)]
pub struct SystemMatrix<'a> {
    potential: &'a Potential,
}

impl SystemMatrix<'_> {
    pub fn eval(&self, x: f64, side: Side) -> CMatrix {
        self.eval_shifted(x, side, C64::new(0.0, 0.0))
    }

    /// `A(x)` with `−λ·I` added to the bottom-left block, the system for
    /// `l[u] = λu + f`.
    pub fn eval_shifted(&self, x: f64, side: Side, lambda: C64) -> CMatrix {
        let m = self.potential.m;
        let q = self.potential.primitive.eval(x, side);
        let s = self.potential.remainder.eval(x, side);
        let mut a = CMatrix::zeros(2 * m, 2 * m);
        let mut bottom_left = &s - &q * &q;
        for i in 0..m {
            bottom_left[(i, i)] -= lambda;
        }
        a.view_mut((0, 0), (m, m)).copy_from(&q);
        a.view_mut((0, m), (m, m)).fill_with_identity();
        a.view_mut((m, 0), (m, m)).copy_from(&bottom_left);
        a.view_mut((m, m), (m, m)).copy_from(&(-q));
        a
    }

    /// Points where `A` may be discontinuous.
    pub fn discontinuities(&self) -> Vec<f64> {
        self.potential.breakpoints()
    }
}

/// `shin_zettl`.
pub fn shin_zettl(p: &Potential) -> SystemMatrix<'_> {
    p.system()
}

#[cfg(test)]
mod tests {
    use super::*;

    fn m1(v: C64) -> CMatrix {
        CMatrix::from_element(1, 1, v)
    }

    fn c(re: f64, im: f64) -> C64 {
        C64::new(re, im)
    }

    #[test]
    fn zero_potential_system() {
        let p = Potential::free(1);
        let a = shin_zettl(&p).eval(0.3, Side::Auto);
        assert_eq!(a, CMatrix::from_row_slice(2, 2, &[c(0., 0.), c(1., 0.), c(0., 0.), c(0., 0.)]));
    }

    #[test]
    fn delta_system_right_of_jump() {
        let p = Potential::scalar_delta(0.0, c(-2.0, 0.0));
        let a = shin_zettl(&p).eval(0.5, Side::Auto);
        assert_eq!(a, CMatrix::from_row_slice(2, 2, &[c(-2., 0.), c(1., 0.), c(-4., 0.), c(2., 0.)]));
        assert_eq!(shin_zettl(&p).discontinuities(), vec![0.0]);
    }

    #[test]
    fn identity_primitive_system() {
        let p = Potential::new(
            MatrixFunction::constant(CMatrix::identity(2, 2)),
            MatrixFunction::zero(2),
        )
        .unwrap();
        let a = p.system().eval(0.0, Side::Auto);
        let i2 = CMatrix::identity(2, 2);
        assert_eq!(a.view((0, 0), (2, 2)), i2);
        assert_eq!(a.view((0, 2), (2, 2)), i2);
        assert_eq!(a.view((2, 0), (2, 2)), -&i2);
        assert_eq!(a.view((2, 2), (2, 2)), -&i2);
    }

    #[test]
    fn adjoint_examples() {
        let real = Potential::scalar_delta(0.0, c(-2.0, 0.0));
        assert_eq!(adjoint_potential(&real), real);

        let imag = Potential::scalar_delta(0.0, c(0.0, 1.0));
        let adj = adjoint_potential(&imag);
        assert_eq!(adj.primitive().eval(1.0, Side::Auto), m1(c(0.0, -1.0)));

        let nil = CMatrix::from_row_slice(2, 2, &[c(0., 0.), c(1., 0.), c(0., 0.), c(0., 0.)]);
        let p = Potential::new(MatrixFunction::constant(nil), MatrixFunction::zero(2)).unwrap();
        assert_eq!(
            adjoint_potential(&p).primitive().eval(0.0, Side::Auto),
            CMatrix::from_row_slice(2, 2, &[c(0., 0.), c(0., 0.), c(1., 0.), c(0., 0.)])
        );
    }

    #[test]
    fn symmetry_classes() {
        assert_eq!(
            classify_symmetry(&Potential::scalar_delta(0.0, c(-2.0, 0.0))),
            SymmetryClass::SelfAdjoint
        );
        assert_eq!(
            classify_symmetry(&Potential::scalar_delta(0.0, c(0.0, 1.0))),
            SymmetryClass::ComplexSymmetric
        );
        // [[0,1],[-1,0]]: transpose is [[0,-1],[1,0]] ≠ Q, and Q* = Qᵀ for real Q
        let rot = CMatrix::from_row_slice(2, 2, &[c(0., 0.), c(1., 0.), c(-1., 0.), c(0., 0.)]);
        assert_ne!(rot.transpose(), rot);
        assert_ne!(rot.adjoint(), rot);
        let q = MatrixFunction::step(0.0, CMatrix::zeros(2, 2), rot).unwrap();
        let p = Potential::new(q, MatrixFunction::zero(2)).unwrap();
        assert_eq!(classify_symmetry(&p), SymmetryClass::General);
    }

    #[test]
    fn dimension_mismatch_rejected() {
        assert!(Potential::new(MatrixFunction::zero(1), MatrixFunction::zero(2)).is_err());
    }
}
