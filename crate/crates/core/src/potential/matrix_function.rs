//! Piecewise-polynomial m×m complex matrix functions with jumps.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::linalg::{CMatrix, C64, ZERO};

/// Default cap on the polynomial degree of a single piece.
pub const DEFAULT_DEGREE_CAP: usize = 8;

/// Which one-sided value to take at a breakpoint.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Side {
    Left,
    Right,
    #[default]
    Auto,
}

/// How a function built from interior pieces only is continued beyond the
/// outer breakpoints.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Extension {
    #[default]
    Constant,
    Zero,
}

/// One polynomial piece `Σ c_k (x - origin)^k`.
#[derive(Debug, Clone, PartialEq)]
pub struct Piece {
    pub origin: f64,
    pub coeffs: Vec<CMatrix>,
}

impl Piece {
    fn degree(&self) -> usize {
        self.coeffs.len().saturating_sub(1)
    }

    fn eval_into(&self, x: f64, out: &mut CMatrix) {
        let t = x - self.origin;
        let last = self.coeffs.len() - 1;
        out.copy_from(&self.coeffs[last]);
        for c in self.coeffs[..last].iter().rev() {
            for (o, ci) in out.iter_mut().zip(c.iter()) {
                *o = *o * t + ci;
            }
        }
    }

    fn derivative(&self) -> Piece {
        let m = self.coeffs[0].nrows();
        let coeffs = if self.coeffs.len() <= 1 {
            vec![CMatrix::zeros(m, m)]
        } else {
            self.coeffs[1..]
                .iter()
                .enumerate()
                .map(|(k, c)| c * C64::from((k + 1) as f64))
                .collect()
        };
        Piece {
            origin: self.origin,
            coeffs,
        }
    }

    fn map(&self, f: impl Fn(&CMatrix) -> CMatrix) -> Piece {
        Piece {
            origin: self.origin,
            coeffs: self.coeffs.iter().map(f).collect(),
        }
    }
}

/// Piecewise polynomial m×m complex matrix function of a real variable.
///
/// With `k` breakpoints there are `k + 1` pieces: one left of the first
/// breakpoint, one per interior interval and one right of the last. Each
/// piece is a polynomial in a local coordinate: interior pieces and the
/// right-hand extension are centred at their left breakpoint, the left-hand
/// extension at the first breakpoint, and with no breakpoints at all the
/// single piece is a polynomial in `x`.
#[derive(Debug, Clone, PartialEq)]
pub struct MatrixFunction {
    m: usize,
    breakpoints: Vec<f64>,
    pieces: Vec<Piece>,
    extension: Extension,
    outer_explicit: bool,
}

impl MatrixFunction {
    /// Builds a matrix function with the default degree cap.
    ///
    /// `pieces` holds either all `k + 1` pieces, or (for `k ≥ 2`) only the
    /// `k - 1` interior ones, in which case `extension` generates the outer
    /// two.
    pub fn new(
        m: usize,
        breakpoints: Vec<f64>,
        pieces: Vec<Vec<CMatrix>>,
        extension: Extension,
    ) -> Result<Self> {
        Self::with_degree_cap(m, breakpoints, pieces, extension, DEFAULT_DEGREE_CAP)
    }

    pub fn with_degree_cap(
        m: usize,
        breakpoints: Vec<f64>,
        pieces: Vec<Vec<CMatrix>>,
        extension: Extension,
        cap: usize,
    ) -> Result<Self> {
        if m == 0 {
            return Err(Error::Dimension("m must be positive".into()));
        }
        if pieces.is_empty() {
            return Err(Error::EmptyPieces);
        }
        for (i, b) in breakpoints.iter().enumerate() {
            if !b.is_finite() || (i > 0 && *b <= breakpoints[i - 1]) {
                return Err(Error::Breakpoints { index: i });
            }
        }
        for (i, piece) in pieces.iter().enumerate() {
            if piece.is_empty() {
                return Err(Error::Dimension(format!("piece {i} has no coefficients")));
            }
            if piece.len() - 1 > cap {
                return Err(Error::DegreeTooHigh {
                    piece: i,
                    degree: piece.len() - 1,
                    cap,
                });
            }
            for c in piece {
                if c.nrows() != m || c.ncols() != m {
                    return Err(Error::Dimension(format!(
                        "piece {i} has a {}x{} coefficient, expected {m}x{m}",
                        c.nrows(),
                        c.ncols()
                    )));
                }
            }
        }
        let k = breakpoints.len();
        let outer_explicit = if pieces.len() == k + 1 {
            true
        } else if k >= 2 && pieces.len() == k - 1 {
            false
        } else {
            return Err(Error::PieceCount {
                breakpoints: k,
                expected: if k >= 2 {
                    format!("{} or {}", k - 1, k + 1)
                } else {
                    format!("{}", k + 1)
                },
                got: pieces.len(),
            });
        };

        let origin_of = |i: usize| -> f64 {
            if k == 0 {
                0.0
            } else if i == 0 {
                breakpoints[0]
            } else {
                breakpoints[i - 1]
            }
        };
        let full: Vec<Piece> = if outer_explicit {
            pieces
                .into_iter()
                .enumerate()
                .map(|(i, coeffs)| Piece {
                    origin: origin_of(i),
                    coeffs,
                })
                .collect()
        } else {
            let interior: Vec<Piece> = pieces
                .into_iter()
                .enumerate()
                .map(|(i, coeffs)| Piece {
                    origin: origin_of(i + 1),
                    coeffs,
                })
                .collect();
            let edge = |piece: &Piece, x: f64, origin: f64| -> Piece {
                let value = match extension {
                    Extension::Constant => {
                        let mut out = CMatrix::zeros(m, m);
                        piece.eval_into(x, &mut out);
                        out
                    }
                    Extension::Zero => CMatrix::zeros(m, m),
                };
                Piece {
                    origin,
                    coeffs: vec![value],
                }
            };
            let left = edge(&interior[0], breakpoints[0], breakpoints[0]);
            let right = edge(&interior[k - 2], breakpoints[k - 1], breakpoints[k - 1]);
            std::iter::once(left)
                .chain(interior)
                .chain(std::iter::once(right))
                .collect()
        };
        Ok(MatrixFunction {
            m,
            breakpoints,
            pieces: full,
            extension,
            outer_explicit,
        })
    }

    /// The zero function.
    pub fn zero(m: usize) -> Self {
        Self::constant(CMatrix::zeros(m, m))
    }

    /// A constant matrix on the whole line.
    pub fn constant(value: CMatrix) -> Self {
        let m = value.nrows();
        MatrixFunction {
            m,
            breakpoints: Vec::new(),
            pieces: vec![Piece {
                origin: 0.0,
                coeffs: vec![value],
            }],
            extension: Extension::Constant,
            outer_explicit: true,
        }
    }

    /// `left` for `x < at`, `right` for `x > at`.
    pub fn step(at: f64, left: CMatrix, right: CMatrix) -> Result<Self> {
        let m = left.nrows();
        Self::new(m, vec![at], vec![vec![left], vec![right]], Extension::Constant)
    }

    /// `weight · H(x - at) · I_m` style scalar step, for `m = 1` mostly.
    pub fn scalar_step(at: f64, height: C64) -> Self {
        Self::step(
            at,
            CMatrix::zeros(1, 1),
            CMatrix::from_element(1, 1, height),
        )
        .expect("valid step")
    }

    pub fn dim(&self) -> usize {
        self.m
    }

    pub fn breakpoints(&self) -> &[f64] {
        &self.breakpoints
    }

    pub fn extension(&self) -> Extension {
        self.extension
    }

    /// All pieces including the two outer ones.
    pub fn pieces(&self) -> &[Piece] {
        &self.pieces
    }

    /// The pieces that a config file would list (interior only when the
    /// outer ones came from the extension rule).
    pub fn stored_pieces(&self) -> &[Piece] {
        if self.outer_explicit {
            &self.pieces
        } else {
            &self.pieces[1..self.pieces.len() - 1]
        }
    }

    pub fn max_degree(&self) -> usize {
        self.pieces.iter().map(Piece::degree).max().unwrap_or(0)
    }

    /// Index of the piece used at `x`.
    pub fn piece_index(&self, x: f64, side: Side) -> usize {
        // number of breakpoints strictly below x (left) or ≤ x (right)
        match side {
            Side::Left => self.breakpoints.partition_point(|b| *b < x),
            Side::Right | Side::Auto => self.breakpoints.partition_point(|b| *b <= x),
        }
    }

    pub fn eval(&self, x: f64, side: Side) -> CMatrix {
        let mut out = CMatrix::zeros(self.m, self.m);
        self.eval_into(x, side, &mut out);
        out
    }

    pub fn eval_into(&self, x: f64, side: Side, out: &mut CMatrix) {
        self.pieces[self.piece_index(x, side)].eval_into(x, out);
    }

    /// `F(x⁺) − F(x⁻)`; zero away from breakpoints.
    pub fn jump(&self, x: f64) -> CMatrix {
        self.eval(x, Side::Right) - self.eval(x, Side::Left)
    }

    /// Piecewise derivative (delta parts at jumps are not represented).
    pub fn derivative(&self) -> MatrixFunction {
        MatrixFunction {
            pieces: self.pieces.iter().map(Piece::derivative).collect(),
            outer_explicit: true,
            ..self.clone()
        }
    }

    fn map_coeffs(&self, f: impl Fn(&CMatrix) -> CMatrix + Copy) -> MatrixFunction {
        MatrixFunction {
            pieces: self.pieces.iter().map(|p| p.map(f)).collect(),
            ..self.clone()
        }
    }

    /// Pointwise Hermitian conjugate.
    pub fn adjoint(&self) -> MatrixFunction {
        self.map_coeffs(|c| c.adjoint())
    }

    pub fn transpose(&self) -> MatrixFunction {
        self.map_coeffs(|c| c.transpose())
    }

    pub fn conjugate(&self) -> MatrixFunction {
        self.map_coeffs(|c| c.map(|z| z.conj()))
    }

    pub fn scale(&self, factor: C64) -> MatrixFunction {
        self.map_coeffs(move |c| c * factor)
    }

    /// Coefficient-wise sum; both operands need the same breakpoints.
    pub fn add(&self, other: &MatrixFunction) -> Result<MatrixFunction> {
        self.zip_pieces(other, |a, b| {
            let n = a.coeffs.len().max(b.coeffs.len());
            let m = a.coeffs[0].nrows();
            (0..n)
                .map(|k| {
                    let x = a.coeffs.get(k).cloned().unwrap_or_else(|| CMatrix::zeros(m, m));
                    let y = b.coeffs.get(k).cloned().unwrap_or_else(|| CMatrix::zeros(m, m));
                    x + y
                })
                .collect()
        })
    }

    /// Pointwise matrix product `F(x)·G(x)`; both operands need the same
    /// breakpoints. The result may exceed the degree cap of its inputs.
    pub fn product(&self, other: &MatrixFunction) -> Result<MatrixFunction> {
        self.zip_pieces(other, |a, b| {
            let m = a.coeffs[0].nrows();
            let mut out = vec![CMatrix::zeros(m, m); a.coeffs.len() + b.coeffs.len() - 1];
            for (i, x) in a.coeffs.iter().enumerate() {
                for (j, y) in b.coeffs.iter().enumerate() {
                    out[i + j] += x * y;
                }
            }
            out
        })
    }

    fn zip_pieces(
        &self,
        other: &MatrixFunction,
        f: impl Fn(&Piece, &Piece) -> Vec<CMatrix>,
    ) -> Result<MatrixFunction> {
        if self.m != other.m {
            return Err(Error::Dimension(format!("{} vs {}", self.m, other.m)));
        }
        if self.breakpoints != other.breakpoints {
            return Err(Error::InvalidArgument(
                "pointwise operations need identical breakpoints".into(),
            ));
        }
        let pieces = self
            .pieces
            .iter()
            .zip(&other.pieces)
            .map(|(a, b)| Piece {
                origin: a.origin,
                coeffs: f(a, b),
            })
            .collect();
        Ok(MatrixFunction {
            m: self.m,
            breakpoints: self.breakpoints.clone(),
            pieces,
            extension: self.extension,
            outer_explicit: true,
        })
    }

    pub fn is_identically_zero(&self) -> bool {
        self.pieces
            .iter()
            .all(|p| p.coeffs.iter().all(|c| c.iter().all(|z| *z == ZERO)))
    }

    /// Breakpoints where the one-sided values differ.
    pub fn jump_points(&self) -> Vec<f64> {
        self.breakpoints
            .iter()
            .copied()
            .filter(|b| self.jump(*b).iter().any(|z| *z != ZERO))
            .collect()
    }
}
