//! Dirichlet eigenvalues of the truncated problem from zeros of the
//! miss-distance `d(λ) = det U(R)`.

use serde::Serialize;

use super::{discretize_fd, fd_eigenvalue_near, richardson, TruncatedProblem, Window};
use crate::cauchy::{propagate, StepState};
use crate::error::{Error, Result};
use crate::exec::Execution;
use crate::linalg::{inner, norm, singular_values, CMatrix, C64, ONE, ZERO};
use crate::potential::SymmetryClass;

/// `d(λ) = mantissa · exp(log_scale)`; the mantissa is the determinant of
/// the `u`-block of an orthonormalised frame, so `|mantissa| ≤ 1`.
/// `peak_log_scale` is the largest value the accumulated log scale took
/// along the trajectory.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct MissDistance {
    pub mantissa: C64,
    pub log_scale: f64,
    pub peak_log_scale: f64,
}

impl MissDistance {
    /// `d(λ)`; may overflow to infinity.
    pub fn value(&self) -> C64 {
        self.mantissa * self.log_scale.exp()
    }

    pub fn log_abs(&self) -> f64 {
        self.mantissa.norm().ln() + self.log_scale
    }

    /// `|d| / scale` with `scale = exp(peak_log_scale)`, the peak size of
    /// the shooting frame; integration errors are relative to it.
    pub fn normalized(&self) -> f64 {
        self.mantissa.norm() * (self.log_scale - self.peak_log_scale).exp()
    }
}

struct Shot {
    miss: MissDistance,
    /// Singular values of the normalised `u`-block, decreasing.
    sigma: Vec<f64>,
}

impl Shot {
    fn damping(&self) -> f64 {
        (self.miss.log_scale - self.miss.peak_log_scale).exp()
    }

    /// Smallest singular value of the `u`-block relative to the peak scale.
    fn sigma_min(&self) -> f64 {
        self.sigma[self.sigma.len() - 1] * self.damping()
    }

    fn multiplicity(&self) -> usize {
        let f = self.damping();
        self.sigma.iter().filter(|s| **s * f <= 1e-6).count().max(1)
    }
}

/// Modified Gram–Schmidt on the `k` columns (length `n`) of `state`;
/// returns `Σ ln rⱼⱼ`.
fn orthonormalise(state: &mut [C64], n: usize, k: usize) -> Result<f64> {
    let mut log = 0.0;
    for j in 0..k {
        for i in 0..j {
            let (done, rest) = state.split_at_mut(j * n);
            let qi = &done[i * n..(i + 1) * n];
            let cj = &mut rest[..n];
            let r = inner(cj, qi);
            for (c, q) in cj.iter_mut().zip(qi) {
                *c -= r * q;
            }
        }
        let col = &mut state[j * n..(j + 1) * n];
        let nrm = norm(col);
        if !(nrm > 0.0 && nrm.is_finite()) {
            return Err(Error::Singular(format!("shooting frame lost rank (column {j}, norm {nrm})")));
        }
        col.iter_mut().for_each(|z| *z /= nrm);
        log += nrm.ln();
    }
    Ok(log)
}

fn shoot(tp: &TruncatedProblem, lambda: C64) -> Result<Shot> {
    let p = &tp.potential;
    let m = p.dim();
    let n = 2 * m;
    let r = tp.radius;
    let mut state = vec![ZERO; n * m];
    for j in 0..m {
        state[j * n + m + j] = ONE;
    }
    let chunks = (2.0 * r).ceil().max(1.0) as usize;
    let mut log_scale = 0.0;
    let mut peak = 0.0f64;
    let mut steps = StepState::new();
    for k in 0..chunks {
        let from = -r + 2.0 * r * k as f64 / chunks as f64;
        let to = if k + 1 == chunks { r } else { -r + 2.0 * r * (k + 1) as f64 / chunks as f64 };
        propagate(p, lambda, from, to, &mut state, &tp.settings.tolerances, &mut steps)?;
        log_scale += orthonormalise(&mut state, n, m)?;
        peak = peak.max(log_scale);
    }
    let u = CMatrix::from_fn(m, m, |i, j| state[j * n + i]);
    Ok(Shot {
        miss: MissDistance {
            mantissa: u.determinant(),
            log_scale,
            peak_log_scale: peak,
        },
        sigma: singular_values(&u),
    })
}

/// `miss_distance`: Dirichlet miss-distance at `λ`, log-scaled.
pub fn miss_distance(tp: &TruncatedProblem, lambda: C64) -> Result<MissDistance> {
    if !lambda.is_finite() {
        return Err(Error::InvalidArgument("λ must be finite".into()));
    }
    Ok(shoot(tp, lambda)?.miss)
}

/// Comparison with the finite-difference oracle at `N` and `2N + 1` nodes.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct OracleComparison {
    pub nodes: usize,
    pub fd_coarse: C64,
    pub fd_fine: C64,
    pub extrapolated: C64,
    pub error_bar: f64,
    pub deviation: f64,
    pub agrees: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Eigenvalue {
    pub lambda: C64,
    /// Normalised miss-distance at `lambda`.
    pub miss: f64,
    pub log_scale: f64,
    /// Number of vanishing singular values of the `u`-block.
    pub multiplicity: usize,
    pub method: &'static str,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub oracle: Option<OracleComparison>,
    /// `|λ(R + ΔR) − λ(R)|` for the nearest eigenvalue at the larger radius.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub radius_shift: Option<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SpectralReport {
    pub radius: f64,
    pub window: Window,
    pub symmetry_class: SymmetryClass,
    pub search: &'static str,
    pub root_tol: f64,
    pub eigenvalues: Vec<Eigenvalue>,
    pub notes: Vec<String>,
}

fn eigen(lambda: C64, shot: &Shot, method: &'static str) -> Eigenvalue {
    Eigenvalue {
        lambda,
        miss: shot.miss.normalized(),
        log_scale: shot.miss.log_scale,
        multiplicity: shot.multiplicity(),
        method,
        oracle: None,
        radius_shift: None,
    }
}

fn bisect(tp: &TruncatedProblem, mut lo: f64, mut hi: f64, mut flo: f64) -> Result<(f64, Shot)> {
    let mut best: Option<(f64, Shot)> = None;
    for _ in 0..200 {
        let mid = 0.5 * (lo + hi);
        if mid <= lo || mid >= hi || hi - lo <= 4.0 * f64::EPSILON * mid.abs().max(1.0) {
            break;
        }
        let shot = shoot(tp, C64::from(mid))?;
        let f = shot.miss.mantissa.re;
        let better = best.as_ref().is_none_or(|(_, b)| shot.miss.normalized() <= b.miss.normalized());
        if f == 0.0 {
            return Ok((mid, shot));
        }
        if (f < 0.0) == (flo < 0.0) {
            lo = mid;
            flo = f;
        } else {
            hi = mid;
        }
        if better {
            best = Some((mid, shot));
        }
    }
    match best {
        Some(b) => Ok(b),
        None => {
            let x = 0.5 * (lo + hi);
            Ok((x, shoot(tp, C64::from(x))?))
        }
    }
}

/// Golden-section minimisation of `σ_min` on `[a, b]`.
fn golden(tp: &TruncatedProblem, mut a: f64, mut b: f64) -> Result<(f64, Shot)> {
    let g = 0.5 * (5f64.sqrt() - 1.0);
    let mut c = b - g * (b - a);
    let mut d = a + g * (b - a);
    let mut sc = shoot(tp, C64::from(c))?;
    let mut sd = shoot(tp, C64::from(d))?;
    for _ in 0..200 {
        if b - a <= 4.0 * f64::EPSILON * b.abs().max(1.0) {
            break;
        }
        if sc.sigma_min() < sd.sigma_min() {
            b = d;
            d = c;
            sd = sc;
            c = b - g * (b - a);
            sc = shoot(tp, C64::from(c))?;
        } else {
            a = c;
            c = d;
            sc = sd;
            d = a + g * (b - a);
            sd = shoot(tp, C64::from(d))?;
        }
    }
    Ok(if sc.sigma_min() < sd.sigma_min() { (c, sc) } else { (d, sd) })
}

fn real_search(tp: &TruncatedProblem, exec: Execution, notes: &mut Vec<String>) -> Result<Vec<Eigenvalue>> {
    let (a, b) = tp.window.re;
    let n = tp.settings.real_grid.max(3);
    let grid: Vec<f64> = (0..n).map(|i| a + (b - a) * i as f64 / (n - 1) as f64).collect();
    let shots = exec.map(&grid, |&x| shoot(tp, C64::from(x)));
    let shots: Vec<Shot> = shots.into_iter().collect::<Result<_>>()?;
    let f: Vec<f64> = shots.iter().map(|s| s.miss.mantissa.re).collect();
    let changes: Vec<usize> = (0..n - 1).filter(|&i| f[i] != 0.0 && (f[i] < 0.0) != (f[i + 1] < 0.0)).collect();
    let mut out = Vec::new();
    for (i, s) in shots.iter().enumerate() {
        if f[i] == 0.0 {
            out.push(eigen(C64::from(grid[i]), s, "grid"));
        }
    }
    let found = exec.map(&changes, |&i| {
        if f[i + 1] == 0.0 {
            return Ok(None);
        }
        bisect(tp, grid[i], grid[i + 1], f[i]).map(Some)
    });
    for r in found {
        if let Some((x, s)) = r? {
            out.push(eigen(C64::from(x), &s, "bisection"));
        }
    }
    // even-multiplicity roots: no sign change, but σ_min dips
    let ratio: Vec<f64> = shots.iter().map(Shot::sigma_min).collect();
    let dips: Vec<usize> = (1..n - 1)
        .filter(|&i| ratio[i] < ratio[i - 1] && ratio[i] <= ratio[i + 1])
        .filter(|&i| !changes.contains(&(i - 1)) && !changes.contains(&i) && f[i] != 0.0)
        .collect();
    let polished = exec.map(&dips, |&i| golden(tp, grid[i - 1], grid[i + 1]));
    for r in polished {
        let (x, s) = r?;
        if s.sigma_min() <= 1e-7 {
            out.push(eigen(C64::from(x), &s, "golden-section"));
        }
    }
    let tol = tp.settings.root_tol;
    out.retain(|e| {
        let keep = e.method == "bisection" || e.miss <= tol;
        if !keep {
            notes.push(format!("candidate {} dropped: normalised miss-distance {:e} above {tol:e}", e.lambda.re, e.miss));
        }
        keep
    });
    Ok(out)
}

fn scaled_d(tp: &TruncatedProblem, lambda: C64, log_ref: f64) -> Result<C64> {
    let s = shoot(tp, lambda)?;
    Ok(s.miss.mantissa * (s.miss.log_scale - log_ref).exp())
}

fn newton(tp: &TruncatedProblem, start: C64, roots: &[C64]) -> Result<(C64, Shot)> {
    let (c, d) = tp.window.im_range();
    let (a, b) = tp.window.re;
    let span = (b - a).max(d - c);
    let mut z = start;
    for _ in 0..80 {
        let shot = shoot(tp, z)?;
        if shot.miss.normalized() <= 1e-3 * tp.settings.root_tol {
            return Ok((z, shot));
        }
        let l0 = shot.miss.log_scale;
        let dz = shot.miss.mantissa;
        let h = 1e-6 * z.norm().max(1.0);
        let dp = (scaled_d(tp, z + h, l0)? - scaled_d(tp, z - h, l0)?) / (2.0 * h);
        let defl: C64 = roots.iter().map(|r| ONE / (z - r)).sum();
        let denom = dp - dz * defl;
        if denom.norm() == 0.0 || !denom.is_finite() {
            return Err(Error::Singular(format!("Newton derivative vanished near {z}")));
        }
        let step = dz / denom;
        z -= step;
        if z.re < a - span || z.re > b + span || z.im < c - span || z.im > d + span {
            return Err(Error::InvalidArgument(format!("Newton left the search region from {start}")));
        }
        if step.norm() <= 1e-13 * z.norm().max(1.0) {
            break;
        }
    }
    let shot = shoot(tp, z)?;
    Ok((z, shot))
}

fn complex_search(tp: &TruncatedProblem, exec: Execution, notes: &mut Vec<String>) -> Result<Vec<Eigenvalue>> {
    let (a, b) = tp.window.re;
    let (c, d) = tp.window.im_range();
    let n = tp.settings.complex_grid.max(3);
    let pts: Vec<C64> = (0..n * n)
        .map(|k| {
            let (i, j) = (k % n, k / n);
            let im = if d > c { c + (d - c) * j as f64 / (n - 1) as f64 } else { c };
            C64::new(a + (b - a) * i as f64 / (n - 1) as f64, im)
        })
        .collect();
    let vals: Vec<f64> = exec
        .map(&pts, |z| shoot(tp, *z).map(|s| s.miss.log_abs()))
        .into_iter()
        .collect::<Result<_>>()?;
    let mut cands: Vec<(f64, C64)> = Vec::new();
    for k in 0..n * n {
        let (i, j) = ((k % n) as isize, (k / n) as isize);
        let mut is_min = true;
        for di in -1..=1 {
            for dj in -1..=1 {
                let (ii, jj) = (i + di, j + dj);
                if (di, dj) == (0, 0) || ii < 0 || jj < 0 || ii >= n as isize || jj >= n as isize {
                    continue;
                }
                if vals[(jj as usize) * n + ii as usize] <= vals[k] {
                    is_min = false;
                }
            }
        }
        if is_min {
            cands.push((vals[k], pts[k]));
        }
    }
    cands.sort_by(|x, y| x.0.total_cmp(&y.0));
    cands.truncate(64);
    let mut roots: Vec<C64> = Vec::new();
    let mut out = Vec::new();
    for (_, z0) in cands {
        match newton(tp, z0, &roots) {
            Ok((z, shot)) => {
                let dup = roots.iter().any(|r| (r - z).norm() <= 1e-7 * z.norm().max(1.0));
                if dup {
                    continue;
                }
                if !tp.window.contains(z) {
                    continue;
                }
                if shot.miss.normalized() > tp.settings.root_tol {
                    notes.push(format!(
                        "candidate from {z0} dropped: normalised miss-distance {:e} at {z}",
                        shot.miss.normalized()
                    ));
                    continue;
                }
                roots.push(z);
                out.push(eigen(z, &shot, "newton"));
            }
            Err(e) => notes.push(format!("candidate from {z0} dropped: {e}")),
        }
    }
    Ok(out)
}

/// `truncated_eigenvalues`: all roots of `d` found in the window.
pub fn truncated_eigenvalues(tp: &TruncatedProblem, exec: Execution) -> Result<SpectralReport> {
    let class = tp.potential.symmetry_class();
    let mut notes = Vec::new();
    let (search, mut eigenvalues) = if class == SymmetryClass::SelfAdjoint {
        ("real bisection", real_search(tp, exec, &mut notes)?)
    } else {
        ("complex newton", complex_search(tp, exec, &mut notes)?)
    };
    eigenvalues.sort_by(|x, y| x.lambda.re.total_cmp(&y.lambda.re).then(x.lambda.im.total_cmp(&y.lambda.im)));
    eigenvalues.dedup_by(|x, y| (x.lambda - y.lambda).norm() <= 1e-9 * x.lambda.norm().max(1.0));
    if eigenvalues.is_empty() {
        notes.push("no eigenvalue found in the window".into());
    }
    Ok(SpectralReport {
        radius: tp.radius,
        window: tp.window,
        symmetry_class: class,
        search,
        root_tol: tp.settings.root_tol,
        eigenvalues,
        notes,
    })
}

/// Default FD grid for the oracle: odd, spacing about `0.02`.
pub fn default_fd_nodes(radius: f64) -> usize {
    2 * ((radius / 0.02).round() as usize).max(8) + 1
}

/// Compares every eigenvalue with FD eigenvalues at `nodes` and
/// `2·nodes + 1` nodes (Richardson, order 2).
pub fn annotate_oracle(report: &mut SpectralReport, tp: &TruncatedProblem, nodes: usize, exec: Execution) -> Result<()> {
    let coarse = discretize_fd(tp, nodes)?;
    let fine = discretize_fd(tp, 2 * nodes + 1)?;
    for w in coarse.warnings.iter().chain(&fine.warnings) {
        if !report.notes.contains(w) {
            report.notes.push(w.clone());
        }
    }
    let lambdas: Vec<C64> = report.eigenvalues.iter().map(|e| e.lambda).collect();
    let cmp = exec.map(&lambdas, |&l| -> Result<OracleComparison> {
        let c = fd_eigenvalue_near(&coarse, l)?;
        let f = fd_eigenvalue_near(&fine, l)?;
        let r = richardson(c, f);
        let deviation = (l - r.extrapolated).norm();
        Ok(OracleComparison {
            nodes,
            fd_coarse: c,
            fd_fine: f,
            extrapolated: r.extrapolated,
            error_bar: r.error_bar,
            deviation,
            agrees: deviation <= r.error_bar,
        })
    });
    for (e, c) in report.eigenvalues.iter_mut().zip(cmp) {
        e.oracle = Some(c?);
    }
    Ok(())
}

/// Recomputes at radius `R + dr` and records the shift of the nearest
/// eigenvalue.
pub fn annotate_r_stability(report: &mut SpectralReport, tp: &TruncatedProblem, dr: f64, exec: Execution) -> Result<()> {
    let wider = truncated_eigenvalues(&tp.with_radius(tp.radius + dr)?, exec)?;
    for e in &mut report.eigenvalues {
        e.radius_shift = wider
            .eigenvalues
            .iter()
            .map(|w| (w.lambda - e.lambda).norm())
            .min_by(f64::total_cmp);
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::potential::{MatrixFunction, Potential};
    use std::f64::consts::FRAC_PI_2;

    fn free(m: usize, r: f64, a: f64, b: f64) -> TruncatedProblem {
        TruncatedProblem::new(Potential::free(m), r, Window::real(a, b).unwrap()).unwrap()
    }

    #[test]
    fn free_miss_distance_values() {
        let tp = free(1, 1.3, 0.0, 1.0);
        let d = miss_distance(&tp, ZERO).unwrap();
        assert!((d.value() - 2.6).norm() < 1e-9);
        let tp = free(1, FRAC_PI_2, 0.0, 1.0);
        assert!(miss_distance(&tp, ONE).unwrap().value().norm() < 1e-9);
    }

    #[test]
    fn free_dirichlet_spectrum() {
        let tp = free(1, FRAC_PI_2, 0.5, 10.0);
        let r = truncated_eigenvalues(&tp, Execution::Parallel).unwrap();
        let got: Vec<f64> = r.eigenvalues.iter().map(|e| e.lambda.re).collect();
        assert_eq!(got.len(), 3, "{got:?}");
        for (g, want) in got.iter().zip([1.0, 4.0, 9.0]) {
            assert!((g - want).abs() < 1e-8, "{g}");
        }
    }

    #[test]
    fn doubled_free_spectrum_found_without_sign_change() {
        let tp = free(2, FRAC_PI_2, 0.5, 5.0);
        let r = truncated_eigenvalues(&tp, Execution::Parallel).unwrap();
        assert_eq!(r.eigenvalues.len(), 2, "{:?}", r.eigenvalues);
        for (e, want) in r.eigenvalues.iter().zip([1.0, 4.0]) {
            assert!((e.lambda.re - want).abs() < 1e-6);
            assert_eq!(e.multiplicity, 2);
        }
    }

    #[test]
    fn diagonal_system_factorises() {
        let q = MatrixFunction::step(
            0.0,
            CMatrix::zeros(2, 2),
            CMatrix::from_diagonal(&nalgebra::DVector::from_vec(vec![ZERO, C64::from(1.5)])),
        )
        .unwrap();
        let p = Potential::new(q, MatrixFunction::zero(2)).unwrap();
        let w = Window::real(0.0, 1.0).unwrap();
        let tp2 = TruncatedProblem::new(p, 2.0, w).unwrap();
        let tpa = TruncatedProblem::new(Potential::free(1), 2.0, w).unwrap();
        let tpb = TruncatedProblem::new(Potential::scalar_delta(0.0, C64::from(1.5)), 2.0, w).unwrap();
        for l in [C64::from(-0.3), C64::new(0.7, 0.2)] {
            let d2 = miss_distance(&tp2, l).unwrap().value();
            let da = miss_distance(&tpa, l).unwrap().value();
            let db = miss_distance(&tpb, l).unwrap().value();
            assert!((d2 - da * db).norm() < 1e-8 * d2.norm());
        }
    }

    #[test]
    fn delta_bound_state() {
        let p = Potential::scalar_delta(0.0, C64::from(-2.0));
        let tp = TruncatedProblem::new(p, 10.0, Window::real(-2.0, -0.5).unwrap()).unwrap();
        let r = truncated_eigenvalues(&tp, Execution::Parallel).unwrap();
        assert_eq!(r.eigenvalues.len(), 1, "{:?}", r.notes);
        assert!((r.eigenvalues[0].lambda.re + 1.0).abs() < 1e-6);
    }

    #[test]
    fn complex_window_for_complex_delta() {
        let p = Potential::scalar_delta(0.0, C64::new(0.0, 1.0));
        let tp = TruncatedProblem::new(p, 3.0, Window::rectangle((0.1, 2.0), (-0.2, 1.0)).unwrap()).unwrap();
        let r = truncated_eigenvalues(&tp, Execution::Parallel).unwrap();
        assert!(!r.eigenvalues.is_empty(), "{:?}", r.notes);
        assert!(r.eigenvalues.iter().any(|e| e.lambda.im > 1e-3));
        for e in &r.eigenvalues {
            assert!(e.miss <= 1e-9);
        }
    }
}
