//! Small complex linear-algebra helpers and a banded LU used by the
//! finite-difference oracle and the Crank–Nicolson stepper.

use nalgebra::DMatrix;
use num_complex::Complex64;

use crate::error::{Error, Result};

pub type C64 = Complex64;
pub type CMatrix = DMatrix<C64>;

pub const ZERO: C64 = C64::new(0.0, 0.0);
pub const ONE: C64 = C64::new(1.0, 0.0);

/// `(a, b) = Σ aᵢ·conj(bᵢ)`, linear in the first slot.
pub fn inner(a: &[C64], b: &[C64]) -> C64 {
    a.iter().zip(b).map(|(x, y)| x * y.conj()).sum()
}

pub fn norm(a: &[C64]) -> f64 {
    a.iter().map(|x| x.norm_sqr()).sum::<f64>().sqrt()
}

/// `y = M·x` for a dense matrix and a slice.
pub fn mat_vec(m: &CMatrix, x: &[C64]) -> Vec<C64> {
    let mut y = vec![ZERO; m.nrows()];
    for (i, yi) in y.iter_mut().enumerate() {
        let mut acc = ZERO;
        for (j, xj) in x.iter().enumerate() {
            acc += m[(i, j)] * xj;
        }
        *yi = acc;
    }
    y
}

/// Frobenius norm.
pub fn frobenius(m: &CMatrix) -> f64 {
    m.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt()
}

/// Singular values in decreasing order.
pub fn singular_values(m: &CMatrix) -> Vec<f64> {
    let mut s: Vec<f64> = m.clone().svd(false, false).singular_values.iter().copied().collect();
    s.sort_by(|a, b| b.total_cmp(a));
    s
}

/// Square complex band matrix with `kl` sub- and `ku` super-diagonals,
/// stored with `kl` extra super-diagonals of fill room for pivoted LU.
#[derive(Debug, Clone)]
pub struct BandMatrix {
    n: usize,
    kl: usize,
    ku: usize,
    width: usize,
    data: Vec<C64>,
}

impl BandMatrix {
    pub fn zeros(n: usize, kl: usize, ku: usize) -> Self {
        let width = 2 * kl + ku + 1;
        BandMatrix {
            n,
            kl,
            ku,
            width,
            data: vec![ZERO; n * width],
        }
    }

    pub fn dim(&self) -> usize {
        self.n
    }

    pub fn lower_bandwidth(&self) -> usize {
        self.kl
    }

    pub fn upper_bandwidth(&self) -> usize {
        self.ku
    }

    fn offset(&self, i: usize, j: usize) -> Option<usize> {
        let d = j as isize - i as isize + self.kl as isize;
        if d < 0 || d as usize >= self.width {
            None
        } else {
            Some(i * self.width + d as usize)
        }
    }

    /// Entry `(i, j)`; zero outside the stored band.
    pub fn get(&self, i: usize, j: usize) -> C64 {
        self.offset(i, j).map_or(ZERO, |k| self.data[k])
    }

    /// Sets entry `(i, j)`. Panics outside the declared band.
    pub fn set(&mut self, i: usize, j: usize, v: C64) {
        assert!(
            j + self.kl >= i && j <= i + self.ku,
            "entry ({i},{j}) outside band"
        );
        let k = self.offset(i, j).unwrap();
        self.data[k] = v;
    }

    pub fn add(&mut self, i: usize, j: usize, v: C64) {
        let cur = self.get(i, j);
        self.set(i, j, cur + v);
    }

    pub fn mul_vec(&self, x: &[C64]) -> Vec<C64> {
        (0..self.n)
            .map(|i| {
                let lo = i.saturating_sub(self.kl);
                let hi = (i + self.ku + 1).min(self.n);
                (lo..hi).map(|j| self.get(i, j) * x[j]).sum()
            })
            .collect()
    }

    /// `a·I + b·self`.
    pub fn affine(&self, a: C64, b: C64) -> BandMatrix {
        let mut out = self.clone();
        for z in out.data.iter_mut() {
            *z *= b;
        }
        for i in 0..self.n {
            out.add(i, i, a);
        }
        out
    }

    pub fn transpose(&self) -> BandMatrix {
        let mut t = BandMatrix::zeros(self.n, self.ku, self.kl);
        for i in 0..self.n {
            let lo = i.saturating_sub(self.kl);
            let hi = (i + self.ku + 1).min(self.n);
            for j in lo..hi {
                t.set(j, i, self.get(i, j));
            }
        }
        t
    }

    pub fn to_dense(&self) -> CMatrix {
        CMatrix::from_fn(self.n, self.n, |i, j| self.get(i, j))
    }

    /// Max-abs entry of `self - other` over the union of both bands.
    pub fn max_abs_diff(&self, other: &BandMatrix) -> f64 {
        let kl = self.kl.max(other.kl);
        let ku = self.ku.max(other.ku);
        let mut worst = 0.0f64;
        for i in 0..self.n {
            let lo = i.saturating_sub(kl);
            let hi = (i + ku + 1).min(self.n);
            for j in lo..hi {
                worst = worst.max((self.get(i, j) - other.get(i, j)).norm());
            }
        }
        worst
    }

    pub fn max_abs(&self) -> f64 {
        self.data.iter().map(|z| z.norm()).fold(0.0, f64::max)
    }

    /// Frobenius norm of `self − other` over the union of both bands.
    pub fn frobenius_diff(&self, other: &BandMatrix) -> f64 {
        let kl = self.kl.max(other.kl);
        let ku = self.ku.max(other.ku);
        let mut acc = 0.0;
        for i in 0..self.n {
            let lo = i.saturating_sub(kl);
            let hi = (i + ku + 1).min(self.n);
            for j in lo..hi {
                acc += (self.get(i, j) - other.get(i, j)).norm_sqr();
            }
        }
        acc.sqrt()
    }

    pub fn frobenius(&self) -> f64 {
        self.frobenius_diff(&BandMatrix::zeros(self.n, 0, 0))
    }

    /// `(M + Mᴴ)/2`.
    pub fn hermitian_part(&self) -> BandMatrix {
        let b = self.kl.max(self.ku);
        let mut h = BandMatrix::zeros(self.n, b, b);
        for i in 0..self.n {
            let lo = i.saturating_sub(b);
            let hi = (i + b + 1).min(self.n);
            for j in lo..hi {
                h.set(i, j, 0.5 * (self.get(i, j) + self.get(j, i).conj()));
            }
        }
        h
    }

    /// Number of negative eigenvalues of the Hermitian matrix `self + shift·I`
    /// (Sylvester inertia of an unpivoted band LDLᴴ). Only the lower band is
    /// read.
    pub fn negative_inertia(&self, shift: f64) -> Result<usize> {
        let n = self.n;
        let b = self.kl;
        // l[i][k] for k in i-b..i, stored at l[i*b + (k + b - i)]
        let mut l = vec![ZERO; n * b.max(1)];
        let mut d = vec![0.0f64; n];
        let mut negative = 0;
        let scale = self.max_abs().max(shift.abs()).max(f64::MIN_POSITIVE);
        for i in 0..n {
            let lo = i.saturating_sub(b);
            for k in lo..i {
                let mut acc = self.get(i, k);
                let klo = i.saturating_sub(b).max(k.saturating_sub(b));
                for j in klo..k {
                    acc -= l[i * b + (j + b - i)] * l[k * b + (j + b - k)].conj() * d[j];
                }
                l[i * b + (k + b - i)] = acc / d[k];
            }
            let mut di = self.get(i, i).re + shift;
            for j in lo..i {
                di -= l[i * b + (j + b - i)].norm_sqr() * d[j];
            }
            if di.abs() <= 1e-300 * scale {
                return Err(Error::Singular(format!("zero pivot {i} in LDLᴴ")));
            }
            if di < 0.0 {
                negative += 1;
            }
            d[i] = di;
        }
        Ok(negative)
    }

    /// LU factorisation with partial pivoting.
    pub fn lu(&self) -> Result<BandLu> {
        let mut a = self.clone();
        let n = a.n;
        let (kl, ku) = (a.kl, a.ku);
        let mut piv = vec![0usize; n];
        let scale = self.max_abs().max(f64::MIN_POSITIVE);
        for k in 0..n {
            let last_row = (k + kl + 1).min(n);
            let mut p = k;
            let mut best = a.get(k, k).norm();
            for i in k + 1..last_row {
                let v = a.get(i, k).norm();
                if v > best {
                    best = v;
                    p = i;
                }
            }
            if best <= scale * 1e-300 {
                return Err(Error::Singular(format!("zero pivot in column {k}")));
            }
            piv[k] = p;
            let last_col = (k + ku + kl + 1).min(n);
            if p != k {
                for j in k..last_col {
                    let x = a.get(k, j);
                    let y = a.get(p, j);
                    let (ok, op) = (a.offset(k, j).unwrap(), a.offset(p, j).unwrap());
                    a.data[ok] = y;
                    a.data[op] = x;
                }
            }
            let pivot = a.get(k, k);
            for i in k + 1..last_row {
                let l = a.get(i, k) / pivot;
                if l == ZERO {
                    continue;
                }
                let o = a.offset(i, k).unwrap();
                a.data[o] = l;
                for j in k + 1..last_col {
                    let akj = a.get(k, j);
                    if akj != ZERO {
                        let o = a.offset(i, j).unwrap();
                        a.data[o] -= l * akj;
                    }
                }
            }
        }
        Ok(BandLu { a, piv })
    }
}

/// Factorised band matrix.
#[derive(Debug, Clone)]
pub struct BandLu {
    a: BandMatrix,
    piv: Vec<usize>,
}

impl BandLu {
    pub fn solve_in_place(&self, b: &mut [C64]) {
        let a = &self.a;
        let n = a.n;
        for k in 0..n {
            let p = self.piv[k];
            if p != k {
                b.swap(k, p);
            }
            let bk = b[k];
            for i in k + 1..(k + a.kl + 1).min(n) {
                b[i] -= a.get(i, k) * bk;
            }
        }
        for k in (0..n).rev() {
            let mut acc = b[k];
            for j in k + 1..(k + a.ku + a.kl + 1).min(n) {
                acc -= a.get(k, j) * b[j];
            }
            b[k] = acc / a.get(k, k);
        }
    }

    pub fn solve(&self, b: &[C64]) -> Vec<C64> {
        let mut x = b.to_vec();
        self.solve_in_place(&mut x);
        x
    }
}
