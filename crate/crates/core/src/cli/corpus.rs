//! Canonical potentials with documented expectations. Every expectation is
//! re-derived numerically by `check_entry`, never stored as a verdict.

use serde::Serialize;

use crate::analysis::{accretivity_scan, default_family};
use crate::error::{Error, Result};
use crate::exec::Execution;
use crate::linalg::{CMatrix, C64, ZERO};
use crate::potential::{Extension, MatrixFunction, Potential, SymmetryClass};
use crate::spectral::{contraction_test, discretize_fd, truncated_eigenvalues, TruncatedProblem, Window};

/// An eigenvalue the truncated problem must have.
#[derive(Debug, Clone, Serialize)]
pub struct ExpectedEigenvalue {
    pub value: f64,
    pub tolerance: f64,
    pub basis: String,
}

#[derive(Debug, Clone, Serialize)]
pub struct Expectations {
    pub symmetry_class: SymmetryClass,
    pub accretive: bool,
    pub accretive_basis: &'static str,
    /// Truncation radius and window for the eigenvalue check; the window
    /// must contain exactly `bound_states`.
    pub radius: f64,
    pub window: Window,
    pub bound_states: Vec<ExpectedEigenvalue>,
}

#[derive(Debug, Clone, Serialize)]
pub struct CorpusEntry {
    pub name: &'static str,
    pub description: &'static str,
    #[serde(skip)]
    pub potential: Potential,
    pub expectations: Expectations,
}

fn diag(values: &[f64]) -> CMatrix {
    CMatrix::from_diagonal(&nalgebra::DVector::from_iterator(
        values.len(),
        values.iter().map(|v| C64::from(*v)),
    ))
}

fn heaviside(weight: CMatrix) -> Result<Potential> {
    let m = weight.nrows();
    Potential::new(
        MatrixFunction::step(0.0, CMatrix::zeros(m, m), weight)?,
        MatrixFunction::zero(m),
    )
}

/// `Q = −(x + 1)` on `[−1, 1]`, continued by constants: `q = −1` on the well.
fn step_well() -> Result<Potential> {
    let q = MatrixFunction::new(
        1,
        vec![-1.0, 1.0],
        vec![vec![CMatrix::zeros(1, 1), diag(&[-1.0])]],
        Extension::Constant,
    )?;
    Potential::new(q, MatrixFunction::zero(1))
}

/// Even bound state of the unit-depth, unit-half-width well:
/// `k·tan k = √(1 − k²)`, `λ = k² − 1`.
pub fn step_well_ground_state() -> f64 {
    let g = |k: f64| k * k.tan() - (1.0 - k * k).sqrt();
    let (mut lo, mut hi) = (1e-6, 1.0 - 1e-12);
    for _ in 0..200 {
        let mid = 0.5 * (lo + hi);
        if g(mid) > 0.0 {
            hi = mid;
        } else {
            lo = mid;
        }
    }
    let k = 0.5 * (lo + hi);
    k * k - 1.0
}

/// Degree-4 interpolant of `tanh` at Chebyshev–Lobatto points on pieces of
/// width 0.5 over `[−6, 6]`, continued by constants; `s = Q²`.
fn miura_tanh() -> Result<Potential> {
    let width = 0.5;
    let n_pieces = 24;
    let breaks: Vec<f64> = (0..=n_pieces).map(|i| -6.0 + width * i as f64).collect();
    let mut pieces = Vec::with_capacity(n_pieces);
    for &left in &breaks[..n_pieces] {
        let ts: Vec<f64> = (0..5)
            .map(|j| 0.5 * width * (1.0 - (std::f64::consts::PI * j as f64 / 4.0).cos()))
            .collect();
        let v = nalgebra::DMatrix::from_fn(5, 5, |i, j| ts[i].powi(j as i32));
        let rhs = nalgebra::DVector::from_iterator(5, ts.iter().map(|t| (left + t).tanh()));
        let c = v
            .lu()
            .solve(&rhs)
            .ok_or_else(|| Error::Singular("Vandermonde system".into()))?;
        pieces.push(c.iter().map(|ck| diag(&[*ck])).collect());
    }
    let q = MatrixFunction::new(1, breaks, pieces, Extension::Constant)?;
    let s = q.product(&q)?;
    Potential::new(q, s)
}

fn none(radius: f64, a: f64, b: f64) -> (f64, Window) {
    (radius, Window::real(a, b).expect("valid window"))
}

/// `corpus`: the canonical entries.
pub fn corpus() -> Vec<CorpusEntry> {
    let i = C64::new(0.0, 1.0);
    let complex_matrix = CMatrix::from_row_slice(2, 2, &[ZERO, i, i, ZERO]);
    let rotation = CMatrix::from_row_slice(2, 2, &[ZERO, C64::from(1.0), C64::from(-1.0), ZERO]);
    let delta_bound = |basis: &str| ExpectedEigenvalue {
        value: -1.0,
        tolerance: 1e-6,
        basis: basis.to_string(),
    };
    let complex_window = Window::rectangle((-2.0, -0.05), (-1.0, 1.0)).expect("valid window");
    let mk = |name, description, potential: Result<Potential>, class, accretive, accretive_basis, rw: (f64, Window), bound_states| {
        CorpusEntry {
            name,
            description,
            potential: potential.expect("corpus potential is valid"),
            expectations: Expectations {
                symmetry_class: class,
                accretive,
                accretive_basis,
                radius: rw.0,
                window: rw.1,
                bound_states,
            },
        }
    };
    vec![
        mk(
            "free",
            "q = 0, m = 1",
            Ok(Potential::free(1)),
            SymmetryClass::SelfAdjoint,
            true,
            "form is the kinetic term only",
            none(10.0, -4.0, -0.05),
            vec![],
        ),
        mk(
            "free2",
            "q = 0, m = 2",
            Ok(Potential::free(2)),
            SymmetryClass::SelfAdjoint,
            true,
            "form is the kinetic term only",
            none(10.0, -4.0, -0.05),
            vec![],
        ),
        mk(
            "delta-2",
            "q = −2δ (Q = −2H)",
            Ok(Potential::scalar_delta(0.0, C64::from(-2.0))),
            SymmetryClass::SelfAdjoint,
            false,
            "hat of half-width ω gives 2/ω − 2 < 0 for ω > 1",
            none(10.0, -2.0, -0.5),
            vec![delta_bound("bound state −α²/4 of e^{−|x|}")],
        ),
        mk(
            "delta+1",
            "q = δ (Q = H)",
            Ok(Potential::scalar_delta(0.0, C64::from(1.0))),
            SymmetryClass::SelfAdjoint,
            true,
            "form is ∫|w′|² + |w(0)|²",
            none(10.0, -4.0, -0.05),
            vec![],
        ),
        mk(
            "matrix-delta",
            "q = diag(−2, 1)δ",
            heaviside(diag(&[-2.0, 1.0])),
            SymmetryClass::SelfAdjoint,
            false,
            "first component is the attractive scalar delta",
            none(10.0, -2.0, -0.5),
            vec![delta_bound("decoupled copy of the α = −2 bound state")],
        ),
        mk(
            "step-well",
            "Q = −(x + 1) on [−1, 1], constant outside: q = −1 on [−1, 1]",
            step_well(),
            SymmetryClass::SelfAdjoint,
            false,
            "negative ground state",
            none(20.0, -1.0, -0.01),
            vec![ExpectedEigenvalue {
                value: step_well_ground_state(),
                tolerance: 1e-6,
                basis: "even well state: k·tan k = √(1 − k²), λ = k² − 1".into(),
            }],
        ),
        mk(
            "miura-tanh",
            "Q ≈ tanh(x) (piecewise quartic on [−6, 6]), s = Q²",
            miura_tanh(),
            SymmetryClass::SelfAdjoint,
            true,
            "form equals ∫|w′ − Qw|² for real Q with s = Q²",
            none(10.0, -2.0, -0.01),
            vec![],
        ),
        mk(
            "complex-delta",
            "q = iδ (Q = iH)",
            Ok(Potential::scalar_delta(0.0, i)),
            SymmetryClass::ComplexSymmetric,
            true,
            "Re form is ∫|w′|²",
            (8.0, complex_window),
            vec![],
        ),
        mk(
            "complex-matrix",
            "Q = [[0, i], [i, 0]]H",
            heaviside(complex_matrix),
            SymmetryClass::ComplexSymmetric,
            true,
            "Q-term is w(0)ᴴ K w(0), purely imaginary",
            (8.0, complex_window),
            vec![],
        ),
        mk(
            "nonsym",
            "Q = [[0, 1], [−1, 0]]H",
            heaviside(rotation),
            SymmetryClass::General,
            true,
            "Q-term is w(0)ᴴ K w(0) with K skew, purely imaginary",
            (8.0, complex_window),
            vec![],
        ),
    ]
}

pub fn corpus_entry(name: &str) -> Result<CorpusEntry> {
    corpus()
        .into_iter()
        .find(|e| e.name == name)
        .ok_or_else(|| Error::Config(format!("unknown corpus entry '{name}'")))
}

/// One re-derived expectation.
#[derive(Debug, Clone, Serialize)]
pub struct Check {
    pub what: String,
    pub expected: String,
    pub observed: String,
    pub passed: bool,
}

#[derive(Debug, Clone, Serialize)]
pub struct EntryCheck {
    pub name: &'static str,
    pub passed: bool,
    pub checks: Vec<Check>,
}

fn check(what: &str, expected: String, observed: String, passed: bool) -> Check {
    Check {
        what: what.into(),
        expected,
        observed,
        passed,
    }
}

/// Re-derives every expectation of `entry`.
pub fn check_entry(entry: &CorpusEntry, seed: u64, exec: Execution) -> EntryCheck {
    let p = &entry.potential;
    let ex = &entry.expectations;
    let mut checks = Vec::new();

    let class = p.symmetry_class();
    checks.push(check(
        "symmetry class",
        ex.symmetry_class.to_string(),
        class.to_string(),
        class == ex.symmetry_class,
    ));

    let scan = accretivity_scan(p, &default_family(p, seed), exec);
    let observed = format!(
        "minimum {:.6e} over {} forms, {} failures",
        scan.minimum,
        scan.evaluated,
        scan.failures.len()
    );
    let ok = scan.failures.is_empty() && scan.certified_non_accretive != ex.accretive;
    checks.push(check(
        "accretivity scan",
        if ex.accretive { "no negative form value".into() } else { "negative witness".into() },
        observed,
        ok,
    ));

    if ex.accretive {
        let outcome = TruncatedProblem::new(p.clone(), ex.radius, ex.window).and_then(|tp| {
            let fd = discretize_fd(&tp, 801)?;
            let m = p.dim();
            let u0 = fd.sample(|x| (0..m).map(|c| C64::from((-(x - 0.3 * c as f64).powi(2)).exp())).collect());
            contraction_test(&tp, &u0, 0.01, 200, 801)
        });
        let (observed, ok) = match outcome {
            Ok(r) => (
                format!(
                    "max step ratio {:.15}, accretive discretisation: {}",
                    r.max_step_ratio, r.accretive_discretization
                ),
                r.non_increasing && r.accretive_discretization,
            ),
            Err(e) => (e.to_string(), false),
        };
        checks.push(check("Crank–Nicolson contraction", "non-increasing norms".into(), observed, ok));
    }

    let spectral = TruncatedProblem::new(p.clone(), ex.radius, ex.window).and_then(|tp| truncated_eigenvalues(&tp, exec));
    match spectral {
        Ok(rep) => {
            let found: Vec<C64> = rep.eigenvalues.iter().map(|e| e.lambda).collect();
            let matched = ex.bound_states.iter().all(|b| {
                found.iter().any(|z| (z - C64::from(b.value)).norm() <= b.tolerance)
            });
            let expected: Vec<String> = ex.bound_states.iter().map(|b| format!("{:.9}", b.value)).collect();
            checks.push(check(
                "eigenvalues in window",
                format!("[{}]", expected.join(", ")),
                format!("{found:?}"),
                matched && found.len() == ex.bound_states.len(),
            ));
        }
        Err(e) => checks.push(check("eigenvalues in window", "search succeeds".into(), e.to_string(), false)),
    }

    EntryCheck {
        name: entry.name,
        passed: checks.iter().all(|c| c.passed),
        checks,
    }
}
