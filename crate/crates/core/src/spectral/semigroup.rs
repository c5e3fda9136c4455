//! Crank–Nicolson evolution `u' = −L_h u` on the FD grid.

use serde::Serialize;

use super::{discretize_fd, TruncatedProblem};
use crate::error::{Error, Result};
use crate::linalg::C64;

/// Slack allowed on `‖u_{k+1}‖ ≤ ‖u_k‖`.
pub const CONTRACTION_SLACK: f64 = 1e-12;

#[derive(Debug, Clone, Serialize)]
pub struct ContractionReport {
    pub dt: f64,
    pub steps: usize,
    pub nodes: usize,
    pub h: f64,
    /// `‖u_k‖` for `k = 0..=steps`.
    pub norms: Vec<f64>,
    pub max_step_ratio: f64,
    pub final_step_ratio: f64,
    /// Every step satisfies `‖u_{k+1}‖ ≤ ‖u_k‖(1 + 1e-12)`.
    pub non_increasing: bool,
    /// Negative eigenvalues of `(L_h + L_hᴴ)/2 + 1e-10·I`.
    pub hermitian_negative_count: usize,
    /// The FD matrix is accretive (no negative count above).
    pub accretive_discretization: bool,
    pub warnings: Vec<String>,
}

/// `(1 + dt·μ/2)/(1 − dt·μ/2)`: per-step growth of a mode with eigenvalue
/// `−μ` under Crank–Nicolson.
pub fn cayley_growth(mu: f64, dt: f64) -> f64 {
    (1.0 + 0.5 * dt * mu) / (1.0 - 0.5 * dt * mu)
}

/// `contraction_test`: `u_{k+1} = (I + dt/2·L_h)⁻¹(I − dt/2·L_h)u_k` on an
/// `nodes`-point grid. `u0` is indexed like the FD unknowns.
pub fn contraction_test(tp: &TruncatedProblem, u0: &[C64], dt: f64, steps: usize, nodes: usize) -> Result<ContractionReport> {
    if !(dt > 0.0 && dt.is_finite()) {
        return Err(Error::InvalidArgument(format!("dt must be positive, got {dt}")));
    }
    let fd = discretize_fd(tp, nodes)?;
    if u0.len() != fd.dim() {
        return Err(Error::Dimension(format!("initial vector has length {}, grid needs {}", u0.len(), fd.dim())));
    }
    let half = C64::from(0.5 * dt);
    let implicit = fd.matrix.affine(C64::from(1.0), half).lu().map_err(|e| {
        Error::Singular(format!("I + dt/2·L_h is singular (dt·spectrum hits −2): {e}"))
    })?;
    let explicit = fd.matrix.affine(C64::from(1.0), -half);
    let negative = fd.matrix.hermitian_part().negative_inertia(1e-10)?;

    let mut u = u0.to_vec();
    let mut norms = vec![fd.norm(&u)];
    for _ in 0..steps {
        u = implicit.solve(&explicit.mul_vec(&u));
        norms.push(fd.norm(&u));
    }
    let ratios: Vec<f64> = norms.windows(2).map(|w| w[1] / w[0]).collect();
    let non_increasing = norms.windows(2).all(|w| w[1] <= w[0] * (1.0 + CONTRACTION_SLACK));
    Ok(ContractionReport {
        dt,
        steps,
        nodes,
        h: fd.h,
        max_step_ratio: ratios.iter().copied().fold(f64::NEG_INFINITY, f64::max),
        final_step_ratio: ratios.last().copied().unwrap_or(1.0),
        norms,
        non_increasing,
        hermitian_negative_count: negative,
        accretive_discretization: negative == 0,
        warnings: fd.warnings,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::potential::Potential;
    use crate::spectral::Window;

    fn gaussian(fd_nodes: &[f64]) -> Vec<C64> {
        fd_nodes.iter().map(|x| C64::from((-x * x).exp())).collect()
    }

    fn tp(p: Potential) -> TruncatedProblem {
        TruncatedProblem::new(p, 10.0, Window::real(-1.0, 1.0).unwrap()).unwrap()
    }

    #[test]
    fn free_norms_decrease() {
        let t = tp(Potential::free(1));
        let fd = discretize_fd(&t, 401).unwrap();
        let r = contraction_test(&t, &gaussian(&fd.nodes), 0.01, 100, 401).unwrap();
        assert!(r.accretive_discretization);
        assert!(r.norms.windows(2).all(|w| w[1] < w[0]));
    }

    #[test]
    fn attractive_delta_grows_at_bound_state_rate() {
        let t = tp(Potential::scalar_delta(0.0, C64::from(-2.0)));
        let n = 1001;
        let fd = discretize_fd(&t, n).unwrap();
        let u0: Vec<C64> = fd.nodes.iter().map(|x| C64::from((-x.abs()).exp())).collect();
        let r = contraction_test(&t, &u0, 0.01, 200, n).unwrap();
        assert!(!r.accretive_discretization);
        assert!(!r.non_increasing);
        assert!((r.final_step_ratio - cayley_growth(1.0, 0.01)).abs() < 1e-3);
    }

    #[test]
    fn rejects_bad_input() {
        let t = tp(Potential::free(1));
        assert!(contraction_test(&t, &[C64::from(1.0)], 0.1, 1, 101).is_err());
        assert!(contraction_test(&t, &vec![C64::from(1.0); 101], 0.0, 1, 101).is_err());
    }
}
