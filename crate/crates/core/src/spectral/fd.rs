//! Second-order finite-difference oracle on `[−R, R]` with Dirichlet rows
//! eliminated. Jumps of `Q` enter as `ΔQ/h` at the nearest node.

use serde::Serialize;

use super::TruncatedProblem;
use crate::error::{Error, Result};
use crate::linalg::{inner, norm, BandMatrix, C64};
use crate::potential::Side;

/// Block-tridiagonal FD matrix; unknown `(i, c)` (node `i`, component `c`)
/// has index `i·m + c`.
#[derive(Debug, Clone)]
pub struct FdMatrix {
    pub matrix: BandMatrix,
    pub m: usize,
    pub nodes: Vec<f64>,
    pub h: f64,
    pub warnings: Vec<String>,
}

impl FdMatrix {
    pub fn dim(&self) -> usize {
        self.matrix.dim()
    }

    /// Samples a vector function at the nodes.
    pub fn sample(&self, f: impl Fn(f64) -> Vec<C64>) -> Vec<C64> {
        self.nodes.iter().flat_map(|&x| f(x)).collect()
    }

    /// Discrete `L²` norm `sqrt(h Σ |u|²)`.
    pub fn norm(&self, u: &[C64]) -> f64 {
        self.h.sqrt() * norm(u)
    }
}

/// `discretize_fd` with `n` interior nodes `x_i = −R + (i + 1)h`,
/// `h = 2R/(n + 1)`; odd `n` puts a node at the origin.
pub fn discretize_fd(tp: &TruncatedProblem, n: usize) -> Result<FdMatrix> {
    if n < 16 {
        return Err(Error::InvalidArgument(format!("FD grid needs at least 16 nodes, got {n}")));
    }
    let p = &tp.potential;
    let m = p.dim();
    let r = tp.radius;
    let h = 2.0 * r / (n + 1) as f64;
    let nodes: Vec<f64> = (0..n).map(|i| -r + (i + 1) as f64 * h).collect();
    let dq = p.primitive().derivative();
    let s = p.remainder();
    let mut a = BandMatrix::zeros(n * m, m, m);
    let diag = C64::from(2.0 / (h * h));
    let off = C64::from(-1.0 / (h * h));
    for (i, &x) in nodes.iter().enumerate() {
        let q = (dq.eval(x, Side::Left) + dq.eval(x, Side::Right) + s.eval(x, Side::Left) + s.eval(x, Side::Right))
            * C64::from(0.5);
        for c in 0..m {
            for d in 0..m {
                a.add(i * m + c, i * m + d, q[(c, d)]);
            }
            a.add(i * m + c, i * m + c, diag);
            if i + 1 < n {
                a.set(i * m + c, (i + 1) * m + c, off);
                a.set((i + 1) * m + c, i * m + c, off);
            }
        }
    }
    let mut warnings = Vec::new();
    for xj in p.primitive().jump_points() {
        if xj <= -r || xj >= r {
            warnings.push(format!("jump of Q at {xj} lies outside (−R, R) and is ignored"));
            continue;
        }
        let t = (xj + r) / h - 1.0;
        if ((t - t.floor()) - 0.5).abs() < 1e-9 {
            warnings.push(format!("jump of Q at {xj} lies midway between nodes; assigned to the nearer-rounded node"));
        }
        let idx = (t.round().max(0.0) as usize).min(n - 1);
        let jump = p.primitive().jump(xj);
        for c in 0..m {
            for d in 0..m {
                a.add(idx * m + c, idx * m + d, jump[(c, d)] / h);
            }
        }
    }
    Ok(FdMatrix {
        matrix: a,
        m,
        nodes,
        h,
        warnings,
    })
}

/// Eigenvalue of the FD matrix closest to `shift` by inverse iteration.
pub fn fd_eigenvalue_near(fd: &FdMatrix, shift: C64) -> Result<C64> {
    let n = fd.dim();
    let scale = fd.matrix.max_abs();
    let mut sigma = shift;
    let lu = loop {
        match fd.matrix.affine(-sigma, C64::from(1.0)).lu() {
            Ok(lu) => break lu,
            Err(_) if (sigma - shift).norm() < 1e-6 * shift.norm().max(1.0) => {
                sigma += C64::new(1e-10, 1e-10) * shift.norm().max(1.0);
            }
            Err(e) => return Err(e),
        }
    };
    let mut v: Vec<C64> = (0..n).map(|k| C64::new(1.0 + 0.3 * (k as f64).sin(), 0.2 * (0.7 * k as f64).cos())).collect();
    let nv = norm(&v);
    v.iter_mut().for_each(|z| *z /= nv);
    let mut lambda = shift;
    for _ in 0..5000 {
        let mut w = lu.solve(&v);
        let nw = norm(&w);
        if !(nw.is_finite() && nw > 0.0) {
            return Err(Error::Singular("inverse iteration produced a degenerate vector".into()));
        }
        w.iter_mut().for_each(|z| *z /= nw);
        let mw = fd.matrix.mul_vec(&w);
        lambda = inner(&mw, &w);
        let res: Vec<C64> = mw.iter().zip(&w).map(|(a, b)| a - lambda * b).collect();
        v = w;
        if norm(&res) <= 1e-13 * scale {
            return Ok(lambda);
        }
    }
    Err(Error::Singular(format!(
        "inverse iteration near {shift} did not converge (last estimate {lambda})"
    )))
}

/// All eigenvalues via a dense complex Schur form (small grids only).
pub fn fd_eigenvalues_dense(fd: &FdMatrix) -> Result<Vec<C64>> {
    if fd.dim() > 2000 {
        return Err(Error::InvalidArgument(format!("dense eigensolve limited to 2000 unknowns, got {}", fd.dim())));
    }
    let ev = fd
        .matrix
        .to_dense()
        .schur()
        .eigenvalues()
        .ok_or_else(|| Error::Singular("Schur form not triangular".into()))?;
    let mut out: Vec<C64> = ev.iter().copied().collect();
    out.sort_by(|a, b| a.re.total_cmp(&b.re).then(a.im.total_cmp(&b.im)));
    Ok(out)
}

/// Richardson extrapolation of a second-order quantity from spacings `h`
/// and `h/2`; the error bar is `|fine − coarse|`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct RichardsonEstimate {
    pub extrapolated: C64,
    pub error_bar: f64,
}

pub fn richardson(coarse: C64, fine: C64) -> RichardsonEstimate {
    RichardsonEstimate {
        extrapolated: fine + (fine - coarse) / 3.0,
        error_bar: (fine - coarse).norm(),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::potential::Potential;
    use crate::spectral::Window;
    use std::f64::consts::PI;

    fn tp(p: Potential, r: f64) -> TruncatedProblem {
        TruncatedProblem::new(p, r, Window::real(-1.0, 1.0).unwrap()).unwrap()
    }

    #[test]
    fn free_fd_converges_at_second_order() {
        let t = tp(Potential::free(1), PI / 2.0);
        let e = |n| fd_eigenvalue_near(&discretize_fd(&t, n).unwrap(), C64::from(3.9)).unwrap().re;
        let (c, f) = (e(63), e(127));
        assert!(((4.0 - c) / (4.0 - f) - 4.0).abs() < 0.05);
        assert!((richardson(C64::from(c), C64::from(f)).extrapolated.re - 4.0).abs() < 1e-5);
    }

    #[test]
    fn delta_is_placed_at_node() {
        let t = tp(Potential::scalar_delta(0.0, C64::from(-2.0)), 10.0);
        let fd = discretize_fd(&t, 1001).unwrap();
        assert!(fd.warnings.is_empty());
        let l = fd_eigenvalue_near(&fd, C64::from(-1.0)).unwrap();
        let h = fd.h;
        // discrete bound state −2(√(1 + h²) − 1)/h²
        let exact = -2.0 * ((1.0 + h * h).sqrt() - 1.0) / (h * h);
        assert!((l.re - exact).abs() < 1e-8, "{l} vs {exact}");
    }

    #[test]
    fn midway_jump_warns() {
        let t = tp(Potential::scalar_delta(0.0, C64::from(1.0)), 1.0);
        let fd = discretize_fd(&t, 16).unwrap();
        assert_eq!(fd.warnings.len(), 1);
        assert!(discretize_fd(&t, 15).is_err());
    }

    #[test]
    fn doubled_multiplicities_and_dense_agree() {
        let t = tp(Potential::free(2), PI / 2.0);
        let fd = discretize_fd(&t, 41).unwrap();
        let ev = fd_eigenvalues_dense(&fd).unwrap();
        assert!((ev[0] - ev[1]).norm() < 1e-10);
        assert!((ev[2] - ev[3]).norm() < 1e-10);
        let near = fd_eigenvalue_near(&fd, C64::from(1.1)).unwrap();
        assert!((near - ev[0]).norm() < 1e-9);
    }
}
