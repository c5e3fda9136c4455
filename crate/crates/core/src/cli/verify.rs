//! The acceptance suite behind `verify-all`: twelve numbered criteria plus a
//! re-derivation of every corpus expectation. Reports are deterministic for
//! a fixed seed; wall-clock times are kept out of the serialised form.

use std::f64::consts::PI;
use std::time::{Duration, Instant};

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use super::corpus::{check_entry, corpus, corpus_entry, CorpusEntry, EntryCheck};
use crate::analysis::{
    accretivity_scan, adjoint_pairing_residual, default_family, form_value, green_identity_residual,
    kernel_growth_test, l_pairing, sesquilinear_form, CompactTestFunction, FamilyMember, Operator,
};
use crate::cauchy::{solve_cauchy, CauchyData, Tolerances};
use crate::error::Result;
use crate::exec::Execution;
use crate::linalg::{norm, CMatrix, C64, ONE, ZERO};
use crate::potential::{Extension, MatrixFunction, Potential, Side, SymmetryClass};
use crate::spectral::{
    annotate_oracle, cayley_growth, contraction_test, default_fd_nodes, discretize_fd, fd_symmetry_ratio,
    j_symmetry_residual, truncated_eigenvalues, TruncatedProblem, Window,
};

#[derive(Debug, Clone, Serialize)]
pub struct Measurement {
    pub name: String,
    pub value: f64,
    pub bound: f64,
}

#[derive(Debug, Clone, Serialize)]
pub struct CriterionResult {
    pub id: u32,
    pub title: &'static str,
    pub requirement: &'static str,
    pub passed: bool,
    pub measurements: Vec<Measurement>,
    pub notes: Vec<String>,
    /// Wall-clock limit in seconds, when the criterion has one.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub time_limit: Option<f64>,
    #[serde(skip)]
    pub elapsed: Duration,
}

impl CriterionResult {
    fn new(id: u32, title: &'static str, requirement: &'static str) -> Self {
        CriterionResult {
            id,
            title,
            requirement,
            passed: true,
            measurements: Vec::new(),
            notes: Vec::new(),
            time_limit: None,
            elapsed: Duration::ZERO,
        }
    }

    /// Records `value ≤ bound`; NaN fails.
    fn at_most(&mut self, name: impl Into<String>, value: f64, bound: f64) {
        if !(value <= bound) {
            self.passed = false;
        }
        self.measurements.push(Measurement {
            name: name.into(),
            value,
            bound,
        });
    }

    fn require(&mut self, ok: bool, note: impl Into<String>) {
        if !ok {
            self.passed = false;
            self.notes.push(note.into());
        }
    }

    fn fail(&mut self, what: &str, e: impl std::fmt::Display) {
        self.passed = false;
        self.notes.push(format!("{what}: {e}"));
    }

    /// One line for terminal output.
    pub fn summary_line(&self) -> String {
        let worst = self
            .measurements
            .iter()
            .max_by(|a, b| (a.value / a.bound).total_cmp(&(b.value / b.bound)));
        let detail = match worst {
            Some(m) => format!("worst {} = {:.3e} (bound {:.1e})", m.name, m.value, m.bound),
            None => String::new(),
        };
        format!(
            "[{}] {:>2}. {} {} ({:.2} s)",
            if self.passed { "PASS" } else { "FAIL" },
            self.id,
            self.title,
            detail,
            self.elapsed.as_secs_f64()
        )
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct SuiteReport {
    pub seed: u64,
    pub passed: bool,
    pub criteria: Vec<CriterionResult>,
    pub corpus: Vec<EntryCheck>,
}

impl SuiteReport {
    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("suite report serialises")
    }
}

fn timed(limit: Option<f64>, f: impl FnOnce(&mut CriterionResult), mut c: CriterionResult) -> CriterionResult {
    let start = Instant::now();
    f(&mut c);
    c.elapsed = start.elapsed();
    if let Some(limit) = limit {
        c.time_limit = Some(limit);
        if c.elapsed.as_secs_f64() >= limit {
            c.passed = false;
        }
    }
    c
}

fn unit_complex(rng: &mut ChaCha8Rng, radius: f64) -> C64 {
    loop {
        let z = C64::new(rng.random_range(-1.0..1.0), rng.random_range(-1.0..1.0));
        if z.norm() <= 1.0 {
            return z * radius;
        }
    }
}

fn random_vec(rng: &mut ChaCha8Rng, m: usize) -> Vec<C64> {
    (0..m).map(|_| unit_complex(rng, 1.0)).collect()
}

fn random_matrix(rng: &mut ChaCha8Rng, m: usize, scale: f64) -> CMatrix {
    CMatrix::from_fn(m, m, |_, _| unit_complex(rng, scale))
}

/// A random piecewise-quadratic `Q` with jumps at 2 to 4 breakpoints in
/// `[−3, 3]` and a piecewise-linear `s` on the same breakpoints.
pub fn random_piecewise_potential(rng: &mut ChaCha8Rng) -> Potential {
    let m = rng.random_range(1..=2);
    let k = rng.random_range(2..=4);
    let mut breaks: Vec<f64> = (0..k).map(|i| -3.0 + 6.0 * (i as f64 + rng.random_range(0.1..0.9)) / k as f64).collect();
    breaks.sort_by(f64::total_cmp);
    let q_pieces: Vec<Vec<CMatrix>> = (0..=k)
        .map(|_| (0..3).map(|d| random_matrix(rng, m, 1.0 / (1 + d) as f64)).collect())
        .collect();
    let s_pieces: Vec<Vec<CMatrix>> = (0..=k).map(|_| (0..2).map(|_| random_matrix(rng, m, 0.5)).collect()).collect();
    let q = MatrixFunction::new(m, breaks.clone(), q_pieces, Extension::Constant).expect("valid Q");
    let s = MatrixFunction::new(m, breaks, s_pieces, Extension::Constant).expect("valid s");
    Potential::new(q, s).expect("valid potential")
}

fn e(m: usize, j: usize) -> Vec<C64> {
    let mut v = vec![ZERO; m];
    v[j] = ONE;
    v
}

fn criterion_1() -> CriterionResult {
    let c = CriterionResult::new(
        1,
        "free-particle exactness",
        "q = 0, λ = −1 on [−5, 5]: cosh/sinh closed forms within 1e-8, under 1 s",
    );
    timed(
        Some(1.0),
        |c| {
            let p = Potential::free(1);
            let tol = Tolerances::new(1e-12, 1e-14);
            let cases: [(&str, f64, f64, fn(f64) -> (f64, f64)); 2] = [
                ("u = cosh x", 1.0, 0.0, |x| (x.cosh(), x.sinh())),
                ("u = sinh x", 0.0, 1.0, |x| (x.sinh(), x.cosh())),
            ];
            for (name, c0, c1, exact) in cases {
                match solve_cauchy(&p, false, C64::from(-1.0), &CauchyData::scalar(0.0, c0, c1), None, (-5.0, 5.0), &tol) {
                    Ok(sol) => {
                        let mut err = 0.0f64;
                        for i in 0..=1000 {
                            let x = -5.0 + 0.01 * i as f64;
                            let st = sol.state(x).expect("inside interval");
                            let (u, u1) = exact(x);
                            err = err.max((st[0] - u).norm()).max((st[1] - u1).norm());
                        }
                        c.at_most(format!("{name}: max |error|"), err, 1e-8);
                    }
                    Err(e) => c.fail(name, e),
                }
            }
        },
        c,
    )
}

fn criterion_2(seed: u64) -> CriterionResult {
    let c = CriterionResult::new(
        2,
        "quasiderivative continuity and jump law",
        "20 random piecewise potentials: u^[1] continuous within 1e-8, u′ jumps by ΔQ·u within 1e-7",
    );
    timed(
        None,
        |c| {
            let mut rng = ChaCha8Rng::seed_from_u64(seed ^ 0x02);
            let tol = Tolerances::new(1e-11, 1e-13);
            let (mut cont, mut jump) = (0.0f64, 0.0f64);
            let mut points = 0;
            for draw in 0..20 {
                let p = random_piecewise_potential(&mut rng);
                let m = p.dim();
                let lambda = unit_complex(&mut rng, 1.0);
                let data = CauchyData::new(rng.random_range(-4.0..4.0), random_vec(&mut rng, m), random_vec(&mut rng, m));
                let sol = match solve_cauchy(&p, false, lambda, &data, None, (-4.0, 4.0), &tol) {
                    Ok(s) => s,
                    Err(e) => {
                        c.fail(&format!("draw {draw}"), e);
                        continue;
                    }
                };
                for x in p.breakpoints() {
                    let l = sol.u1_one_sided(x, Side::Left).expect("inside");
                    let r = sol.u1_one_sided(x, Side::Right).expect("inside");
                    let d: Vec<C64> = l.iter().zip(&r).map(|(a, b)| b - a).collect();
                    cont = cont.max(norm(&d));
                    let dl = sol.interpolant_derivative(x, Side::Left).expect("inside");
                    let dr = sol.interpolant_derivative(x, Side::Right).expect("inside");
                    let u = sol.u(x).expect("inside");
                    let dq = p.primitive().jump(x);
                    let expected = crate::linalg::mat_vec(&dq, &u);
                    let diff: Vec<C64> = (0..m).map(|i| (dr[i] - dl[i]) - expected[i]).collect();
                    jump = jump.max(norm(&diff));
                    points += 1;
                }
            }
            c.notes.push(format!("{points} breakpoints checked"));
            c.at_most("max ‖u^[1](x⁺) − u^[1](x⁻)‖", cont, 1e-8);
            c.at_most("max ‖Δu′ − ΔQ·u‖", jump, 1e-7);
        },
        c,
    )
}

fn criterion_3(exec: Execution) -> CriterionResult {
    let c = CriterionResult::new(
        3,
        "delta bound state",
        "Q = −2H, R = 10: eigenvalue within 1e-6 of −1 and inside the FD error bar, under 10 s",
    );
    timed(
        Some(10.0),
        |c| {
            let outcome = (|| -> Result<_> {
                let p = corpus_entry("delta-2")?.potential;
                let tp = TruncatedProblem::new(p, 10.0, Window::real(-2.0, -0.5)?)?;
                let mut rep = truncated_eigenvalues(&tp, exec)?;
                annotate_oracle(&mut rep, &tp, default_fd_nodes(10.0), exec)?;
                Ok(rep)
            })();
            match outcome {
                Ok(rep) => {
                    c.require(rep.eigenvalues.len() == 1, format!("{} eigenvalues in window", rep.eigenvalues.len()));
                    match rep.eigenvalues.first() {
                        Some(ev) => {
                            c.at_most("|λ + 1|", (ev.lambda + 1.0).norm(), 1e-6);
                            match ev.oracle {
                                Some(o) => {
                                    c.at_most("|λ − FD extrapolated| − error bar", o.deviation - o.error_bar, 0.0);
                                    c.notes.push(format!(
                                        "FD extrapolated {:.10}, error bar {:.2e}",
                                        o.extrapolated.re, o.error_bar
                                    ));
                                }
                                None => c.require(false, "no oracle comparison"),
                            }
                        }
                        None => c.require(false, "no eigenvalue found"),
                    }
                }
                Err(e) => c.fail("spectrum", e),
            }
        },
        c,
    )
}

fn criterion_4(exec: Execution) -> CriterionResult {
    let c = CriterionResult::new(
        4,
        "free Dirichlet spectrum",
        "q = 0 on an interval of length π: first three eigenvalues within 1e-6 of 1, 4, 9",
    );
    timed(
        None,
        |c| {
            let outcome = Window::real(0.5, 10.0)
                .and_then(|w| TruncatedProblem::new(Potential::free(1), PI / 2.0, w))
                .and_then(|tp| truncated_eigenvalues(&tp, exec));
            match outcome {
                Ok(rep) => {
                    let found: Vec<C64> = rep.eigenvalues.iter().map(|e| e.lambda).collect();
                    c.require(found.len() >= 3, format!("only {} eigenvalues found", found.len()));
                    for (k, z) in found.iter().take(3).enumerate() {
                        let n = (k + 1) as f64;
                        c.at_most(format!("|λ{} − {}|", k + 1, n * n), (z - n * n).norm(), 1e-6);
                    }
                }
                Err(e) => c.fail("spectrum", e),
            }
        },
        c,
    )
}

fn criterion_5(seed: u64) -> CriterionResult {
    let c = CriterionResult::new(
        5,
        "Green's identity",
        "50 random corpus draws with residual ≤ 1e-7; 20 mollified adjoint pairings ≤ 1e-7",
    );
    timed(
        None,
        |c| {
            let entries = corpus();
            let mut rng = ChaCha8Rng::seed_from_u64(seed ^ 0x05);
            let tol = Tolerances::default();
            let mut worst = 0.0f64;
            for draw in 0..50 {
                let entry = &entries[rng.random_range(0..entries.len())];
                let p = &entry.potential;
                let m = p.dim();
                let lu = unit_complex(&mut rng, 1.0);
                let lv = unit_complex(&mut rng, 1.0);
                let du = CauchyData::new(rng.random_range(-2.0..2.0), random_vec(&mut rng, m), random_vec(&mut rng, m));
                let dv = CauchyData::new(rng.random_range(-2.0..2.0), random_vec(&mut rng, m), random_vec(&mut rng, m));
                let (mut a, mut b): (f64, f64) = (rng.random_range(-2.0..2.0), rng.random_range(-2.0..2.0));
                if a > b {
                    std::mem::swap(&mut a, &mut b);
                }
                let res = solve_cauchy(p, false, lu, &du, None, (-2.0, 2.0), &tol).and_then(|u| {
                    let v = solve_cauchy(p, true, lv, &dv, None, (-2.0, 2.0), &tol)?;
                    green_identity_residual(&u, &v, a, b)
                });
                match res {
                    Ok(r) => worst = worst.max(r),
                    Err(e) => c.fail(&format!("draw {draw} ({})", entry.name), e),
                }
            }
            c.at_most("max Green residual", worst, 1e-7);

            let mut worst = 0.0f64;
            for draw in 0..20 {
                let entry = &entries[rng.random_range(0..entries.len())];
                let p = &entry.potential;
                let m = p.dim();
                let member = FamilyMember::MollifiedSolution {
                    lambda: unit_complex(&mut rng, 1.0),
                    data: CauchyData::new(rng.random_range(-1.0..1.0), random_vec(&mut rng, m), random_vec(&mut rng, m)),
                    support: (-2.5, 2.5),
                    ramp: 1.0,
                };
                let lv = unit_complex(&mut rng, 1.0);
                let dv = CauchyData::new(0.0, random_vec(&mut rng, m), random_vec(&mut rng, m));
                let res = member.build(p, Operator::Primal).and_then(|w| {
                    let v = solve_cauchy(p, true, lv, &dv, None, (-3.0, 3.0), &tol)?;
                    adjoint_pairing_residual(p, &w, &v)
                });
                match res {
                    Ok(r) => worst = worst.max(r),
                    Err(e) => c.fail(&format!("mollified draw {draw} ({})", entry.name), e),
                }
            }
            c.at_most("max adjoint pairing residual", worst, 1e-7);
        },
        c,
    )
}

fn criterion_6() -> CriterionResult {
    let c = CriterionResult::new(
        6,
        "form formula",
        "hat of half-width ω against αδ gives 2/ω + α within 1e-8; sin(πx) on [0, 1] gives π²/2",
    );
    timed(
        None,
        |c| {
            for alpha in [-2.0, 1.0] {
                let p = Potential::scalar_delta(0.0, C64::from(alpha));
                let mut worst = 0.0f64;
                for k in -2..=3 {
                    let w = 2f64.powi(k);
                    match CompactTestFunction::hat(0.0, w, vec![ONE]).and_then(|h| form_value(&p, &h)) {
                        Ok(f) => worst = worst.max((f.value - (2.0 / w + alpha)).norm()),
                        Err(e) => c.fail(&format!("α = {alpha}, ω = {w}"), e),
                    }
                }
                c.at_most(format!("α = {alpha}: max |B(w,w) − (2/ω + α)|"), worst, 1e-8);
            }
            match CompactTestFunction::sine_arch(0.0, 1.0, vec![ONE]).and_then(|s| form_value(&Potential::free(1), &s)) {
                Ok(f) => c.at_most("|B(sin πx) − π²/2|", (f.value - PI * PI / 2.0).norm(), 1e-8),
                Err(e) => c.fail("sine arch", e),
            }
        },
        c,
    )
}

fn criterion_7(seed: u64, exec: Execution) -> CriterionResult {
    let c = CriterionResult::new(
        7,
        "accretivity scan",
        "α = −2: certified negative witness, hat ω = 4 value ≤ −0.5; α = +1: no negative value",
    );
    timed(
        None,
        |c| {
            let p = Potential::scalar_delta(0.0, C64::from(-2.0));
            let scan = accretivity_scan(&p, &default_family(&p, seed), exec);
            c.require(scan.certified_non_accretive, "α = −2 scan did not certify a negative value");
            c.require(scan.failures.is_empty(), format!("α = −2 failures: {:?}", scan.failures));
            let hat4 = scan.entries.iter().find(|e| {
                e.operator == Operator::Primal
                    && matches!(&e.member, FamilyMember::Hat { center, width, direction }
                        if *center == 0.0 && *width == 4.0 && direction.len() == 1)
            });
            match hat4 {
                Some(e) => c.at_most("α = −2: Re B(hat ω = 4)", e.form.real_part, -0.5),
                None => c.require(false, "hat ω = 4 missing from the default family"),
            }
            c.notes.push(format!("α = −2 minimum {:.6}", scan.minimum));

            let p = Potential::scalar_delta(0.0, C64::from(1.0));
            let scan = accretivity_scan(&p, &default_family(&p, seed), exec);
            c.require(scan.failures.is_empty(), format!("α = +1 failures: {:?}", scan.failures));
            c.at_most("α = +1: −min Re B(w,w)", -scan.minimum, 0.0);
        },
        c,
    )
}

fn criterion_8(seed: u64) -> CriterionResult {
    let c = CriterionResult::new(
        8,
        "product rule",
        "mollified solutions: weak form and identity-computed l[φu] agree within 1e-8 on 10 probes",
    );
    timed(
        None,
        |c| {
            let mut rng = ChaCha8Rng::seed_from_u64(seed ^ 0x08);
            let names = ["delta-2", "matrix-delta", "step-well", "complex-delta", "nonsym"];
            let mut worst = 0.0f64;
            for probe in 0..10 {
                let entry = corpus_entry(names[probe % names.len()]).expect("corpus entry");
                let p = &entry.potential;
                let m = p.dim();
                let member = FamilyMember::MollifiedSolution {
                    lambda: unit_complex(&mut rng, 1.0),
                    data: CauchyData::new(rng.random_range(-1.0..1.0), random_vec(&mut rng, m), random_vec(&mut rng, m)),
                    support: (-3.0, 3.0),
                    ramp: 1.0,
                };
                let psi = CompactTestFunction::gaussian(
                    rng.random_range(-2.0..2.0),
                    rng.random_range(0.3..1.5),
                    rng.random_range(0..=2),
                    random_vec(&mut rng, m),
                );
                let res = member.build(p, Operator::Primal).and_then(|w| {
                    let psi = psi?;
                    let weak = sesquilinear_form(p, &w, &psi)?.value;
                    Ok((weak - l_pairing(&w, &psi)?).norm())
                });
                match res {
                    Ok(d) => worst = worst.max(d),
                    Err(e) => c.fail(&format!("probe {probe}"), e),
                }
            }
            c.at_most("max |B(φu, ψ) − ⟨l[φu], ψ⟩|", worst, 1e-8);
        },
        c,
    )
}

fn criterion_9(seed: u64, exec: Execution) -> CriterionResult {
    let c = CriterionResult::new(
        9,
        "kernel growth",
        "q = 0, v = 1: rₙ = n within 1e-10, increasing on 2..20; shifted δ: every direction excluded by n = 30",
    );
    timed(
        None,
        |c| {
            let tol = Tolerances::default();
            match kernel_growth_test(&Potential::free(1), 0.0, 20, 0, seed, &tol, exec) {
                Ok(rep) => {
                    let one = &rep.directions[0];
                    let err = one
                        .ratios
                        .iter()
                        .enumerate()
                        .map(|(i, r)| (r - (i + 1) as f64).abs())
                        .fold(0.0, f64::max);
                    c.at_most("v = 1: max |rₙ − n|", err, 1e-10);
                    let monotone = one.ratios[1..].windows(2).all(|w| w[1] > w[0]);
                    c.require(one.ratios.len() == 20 && monotone, "rₙ not increasing on 2..20");
                }
                Err(e) => c.fail("free kernel test", e),
            }
            let p = Potential::scalar_delta(0.0, C64::from(1.0));
            match kernel_growth_test(&p, -1.0, 30, 5, seed, &tol, exec) {
                Ok(rep) => {
                    for d in &rep.directions {
                        c.require(d.verdict.excludes_kernel(), format!("{}: {:?}", d.label, d.verdict));
                    }
                    let slowest = rep.directions.iter().map(|d| d.growth_rate).fold(f64::INFINITY, f64::min);
                    c.notes.push(format!(
                        "{} directions, slowest shell growth rate {:.4}",
                        rep.directions.len(),
                        slowest
                    ));
                }
                Err(e) => c.fail("shifted delta kernel test", e),
            }
        },
        c,
    )
}

fn gaussian_state(fd: &crate::spectral::FdMatrix) -> Vec<C64> {
    let m = fd.m;
    fd.sample(|x| (0..m).map(|k| C64::from((-(x - 0.3 * k as f64).powi(2)).exp())).collect())
}

fn criterion_10(exec: Execution) -> CriterionResult {
    let c = CriterionResult::new(
        10,
        "contraction",
        "accretive entries: Crank–Nicolson norms non-increasing within 1e-12 per step; δ α = −2 growth ratio within 1e-3 of the Cayley factor",
    );
    timed(
        None,
        |c| {
            let entries: Vec<CorpusEntry> = corpus().into_iter().filter(|e| e.expectations.accretive).collect();
            let results = exec.map(&entries, |entry| {
                TruncatedProblem::new(entry.potential.clone(), 10.0, Window::real(-1.0, 0.0)?).and_then(|tp| {
                    let fd = discretize_fd(&tp, 801)?;
                    contraction_test(&tp, &gaussian_state(&fd), 0.01, 200, 801)
                })
            });
            for (entry, r) in entries.iter().zip(results) {
                match r {
                    Ok(r) => {
                        c.at_most(format!("{}: max ‖u_{{k+1}}‖/‖u_k‖ − 1", entry.name), r.max_step_ratio - 1.0, 1e-12);
                        c.require(r.non_increasing, format!("{}: norms increased", entry.name));
                    }
                    Err(e) => c.fail(entry.name, e),
                }
            }
            let outcome = (|| -> Result<_> {
                let tp = TruncatedProblem::new(corpus_entry("delta-2")?.potential, 10.0, Window::real(-2.0, -0.5)?)?;
                let fd = discretize_fd(&tp, 1001)?;
                let u0 = fd.sample(|x| vec![C64::from((-x.abs()).exp())]);
                contraction_test(&tp, &u0, 0.01, 200, 1001)
            })();
            match outcome {
                Ok(r) => {
                    let target = cayley_growth(1.0, 0.01);
                    c.at_most("δ α = −2: |final step ratio − Cayley factor|", (r.final_step_ratio - target).abs(), 1e-3);
                }
                Err(e) => c.fail("delta-2 growth", e),
            }
        },
        c,
    )
}

fn criterion_11() -> CriterionResult {
    let c = CriterionResult::new(
        11,
        "J-symmetry",
        "complex-symmetric entries: conjugation residual ≤ 1e-8, FD ‖M − Mᵀ‖/‖M‖ ≤ 1e-12",
    );
    timed(
        None,
        |c| {
            let tol = Tolerances::default();
            for entry in corpus().iter().filter(|e| e.expectations.symmetry_class == SymmetryClass::ComplexSymmetric) {
                let p = &entry.potential;
                let m = p.dim();
                let mut worst = 0.0f64;
                for j in 0..2 * m {
                    let data = if j < m {
                        CauchyData::new(0.0, e(m, j), vec![ZERO; m])
                    } else {
                        CauchyData::new(0.0, vec![ZERO; m], e(m, j - m))
                    };
                    match j_symmetry_residual(p, &data, C64::new(0.0, 1.0), (-2.0, 2.0), &tol) {
                        Ok(r) => worst = worst.max(r.residual),
                        Err(e) => c.fail(entry.name, e),
                    }
                }
                c.at_most(format!("{}: conjugation residual", entry.name), worst, 1e-8);
                match Window::real(-1.0, 0.0)
                    .and_then(|w| TruncatedProblem::new(p.clone(), 8.0, w))
                    .and_then(|tp| discretize_fd(&tp, 801))
                {
                    Ok(fd) => c.at_most(format!("{}: ‖M − Mᵀ‖/‖M‖", entry.name), fd_symmetry_ratio(&fd), 1e-12),
                    Err(e) => c.fail(entry.name, e),
                }
            }
        },
        c,
    )
}

/// The seeded parts of the suite serialised in the given execution mode.
fn seeded_snapshot(seed: u64, exec: Execution) -> String {
    let parts = vec![
        criterion_2(seed),
        criterion_5(seed),
        criterion_7(seed, exec),
        criterion_8(seed),
        criterion_9(seed, exec),
    ];
    serde_json::to_string(&parts).expect("serialises")
}

fn criterion_12(seed: u64) -> CriterionResult {
    let c = CriterionResult::new(
        12,
        "determinism",
        "seeded criteria serialise byte-identically across repeated sequential and parallel runs",
    );
    timed(
        None,
        |c| {
            let a = seeded_snapshot(seed, Execution::Sequential);
            let b = seeded_snapshot(seed, Execution::Parallel);
            let d = seeded_snapshot(seed, Execution::Parallel);
            c.require(a == b, "sequential and parallel reports differ");
            c.require(b == d, "repeated parallel reports differ");
            c.notes.push(format!("{} bytes compared", a.len()));
        },
        c,
    )
}

/// Criterion `id` (1 to 12).
pub fn run_criterion(id: u32, seed: u64, exec: Execution) -> Option<CriterionResult> {
    Some(match id {
        1 => criterion_1(),
        2 => criterion_2(seed),
        3 => criterion_3(exec),
        4 => criterion_4(exec),
        5 => criterion_5(seed),
        6 => criterion_6(),
        7 => criterion_7(seed, exec),
        8 => criterion_8(seed),
        9 => criterion_9(seed, exec),
        10 => criterion_10(exec),
        11 => criterion_11(),
        12 => criterion_12(seed),
        _ => return None,
    })
}

/// Corpus expectations re-derived; entries fan out, each runs sequentially.
pub fn check_corpus(seed: u64, exec: Execution) -> Vec<EntryCheck> {
    let entries = corpus();
    exec.map(&entries, |e| check_entry(e, seed, Execution::Sequential))
}

/// `verify-all`: every criterion, then the corpus checks.
pub fn run_suite(seed: u64, exec: Execution) -> SuiteReport {
    let criteria: Vec<CriterionResult> = (1..=12).filter_map(|id| run_criterion(id, seed, exec)).collect();
    let corpus = check_corpus(seed, exec);
    let passed = criteria.iter().all(|c| c.passed) && corpus.iter().all(|e| e.passed);
    SuiteReport {
        seed,
        passed,
        criteria,
        corpus,
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn random_potentials_have_jumps() {
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        for _ in 0..5 {
            let p = random_piecewise_potential(&mut rng);
            let x = p.breakpoints()[0];
            assert!(crate::linalg::frobenius(&p.primitive().jump(x)) > 0.0);
        }
    }

    #[test]
    fn failing_measurement_flips_verdict() {
        let mut c = CriterionResult::new(0, "t", "r");
        c.at_most("a", 1.0, 2.0);
        assert!(c.passed);
        c.at_most("b", f64::NAN, 2.0);
        assert!(!c.passed);
        assert!(c.summary_line().starts_with("[FAIL]"));
    }

    #[test]
    fn unknown_criterion() {
        assert!(run_criterion(13, 0, Execution::Sequential).is_none());
    }
}
