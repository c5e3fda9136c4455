//! Command execution: one deterministic JSON report per run, optional CSV
//! tables and a short human-readable summary.

use std::fmt::Write as _;
use std::path::PathBuf;

use serde::Serialize;
use serde_json::{json, Value};

use super::config::{complex, ExperimentConfig, Format, InitialState};
use super::corpus::corpus;
use super::verify::run_suite;
use crate::analysis::{
    accretivity_scan, bracket_tail, default_family, form_value, green_identity, kernel_growth_test, FamilyMember,
    Operator,
};
use crate::cauchy::solve_cauchy;
use crate::error::{Error, Result};
use crate::exec::Execution;
use crate::linalg::{C64, ONE, ZERO};
use crate::potential::{Potential, PotentialConfig};
use crate::spectral::{
    annotate_oracle, annotate_r_stability, contraction_test, default_fd_nodes, discretize_fd, truncated_eigenvalues,
    SpectralSettings, TruncatedProblem, Window,
};

pub const EXIT_OK: i32 = 0;
pub const EXIT_VALIDATION: i32 = 2;
pub const EXIT_NUMERICAL: i32 = 3;
pub const EXIT_MISMATCH: i32 = 4;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, clap::ValueEnum)]
#[serde(rename_all = "kebab-case")]
pub enum Command {
    Solve,
    Spectrum,
    Form,
    Scan,
    GreenCheck,
    KernelGrowth,
    Semigroup,
    Corpus,
    VerifyAll,
}

impl Command {
    pub fn name(self) -> &'static str {
        match self {
            Command::Solve => "solve",
            Command::Spectrum => "spectrum",
            Command::Form => "form",
            Command::Scan => "scan",
            Command::GreenCheck => "green-check",
            Command::KernelGrowth => "kernel-growth",
            Command::Semigroup => "semigroup",
            Command::Corpus => "corpus",
            Command::VerifyAll => "verify-all",
        }
    }
}

/// Exit code for an error raised while running a command.
pub fn exit_code(e: &Error) -> i32 {
    if e.is_numerical() {
        EXIT_NUMERICAL
    } else {
        EXIT_VALIDATION
    }
}

/// Command-line overrides applied on top of a config file.
#[derive(Debug, Clone, Default)]
pub struct Overrides {
    pub seed: Option<u64>,
    /// Sets `rtol`; `atol` becomes `tol · 1e-2`.
    pub tol: Option<f64>,
    pub radius: Option<f64>,
    pub window: Option<String>,
    pub format: Option<Format>,
    pub out: Option<PathBuf>,
    pub corpus: Option<String>,
}

impl Overrides {
    pub fn apply(&self, cfg: &mut ExperimentConfig) -> Result<()> {
        if let Some(seed) = self.seed {
            cfg.seed = seed;
        }
        if let Some(tol) = self.tol {
            if !(tol > 0.0 && tol.is_finite()) {
                return Err(Error::Config(format!("--tol: must be positive, got {tol}")));
            }
            cfg.tolerances.rtol = tol;
            cfg.tolerances.atol = tol * 1e-2;
        }
        if let Some(r) = self.radius {
            cfg.spectrum.radius = r;
            cfg.semigroup.radius = r;
        }
        if let Some(w) = &self.window {
            let w = Window::parse(w).map_err(|e| Error::Config(format!("--window: {e}")))?;
            cfg.spectrum.window = match w.im {
                None => vec![w.re.0, w.re.1],
                Some(im) => vec![w.re.0, w.re.1, im.0, im.1],
            };
        }
        if let Some(f) = self.format {
            cfg.output.format = f;
        }
        if let Some(o) = &self.out {
            cfg.output.dir = Some(o.clone());
        }
        if let Some(name) = &self.corpus {
            cfg.potential = None;
            cfg.potential_file = None;
            cfg.corpus = Some(name.clone());
        }
        cfg.validate()
    }
}

/// Everything a run produces. `report` excludes timestamps and durations.
#[derive(Debug, Clone)]
pub struct RunOutput {
    pub command: Command,
    pub report: String,
    /// `(file name, contents)`.
    pub csv: Vec<(String, String)>,
    pub summary: String,
    pub exit_code: i32,
}

#[derive(Serialize)]
struct Envelope {
    command: &'static str,
    seed: u64,
    potential: Value,
    parameters: Value,
    failed: bool,
    #[serde(skip_serializing_if = "Option::is_none")]
    error: Option<String>,
    result: Value,
}

struct Outcome {
    result: Value,
    csv: Vec<(String, String)>,
    summary: String,
    mismatch: bool,
}

fn potential_json(cfg: &ExperimentConfig, p: &Potential) -> Value {
    let mut v = json!({ "definition": PotentialConfig::from_potential(p) });
    if let Some(name) = &cfg.corpus {
        v["corpus"] = json!(name);
    }
    if let Some(f) = &cfg.potential_file {
        v["file"] = json!(f);
    }
    v["symmetry_class"] = json!(p.symmetry_class());
    v
}

fn parameters(cmd: Command, cfg: &ExperimentConfig) -> Value {
    let section = match cmd {
        Command::Solve => json!(cfg.solve),
        Command::Spectrum => json!(cfg.spectrum),
        Command::Form => json!(cfg.form),
        Command::Scan => json!(cfg.scan),
        Command::GreenCheck => json!(cfg.green),
        Command::KernelGrowth => json!(cfg.kernel_growth),
        Command::Semigroup => json!(cfg.semigroup),
        Command::Corpus | Command::VerifyAll => json!({}),
    };
    json!({ "tolerances": cfg.tolerances, cmd.name(): section })
}

fn to_value<T: Serialize>(v: &T) -> Value {
    serde_json::to_value(v).expect("report serialises")
}

fn fmt_c(z: C64) -> String {
    if z.im == 0.0 {
        format!("{:.12}", z.re)
    } else {
        format!("{:.12}{:+.12}i", z.re, z.im)
    }
}

/// Runs `cmd`; never panics on bad input, mapping errors to exit codes.
pub fn run(cmd: Command, cfg: &ExperimentConfig, exec: Execution) -> RunOutput {
    let potential = cfg.build_potential();
    let (pot_json, outcome) = match potential {
        Ok(p) => (potential_json(cfg, &p), dispatch(cmd, cfg, &p, exec)),
        Err(e) => (Value::Null, Err(e)),
    };
    let (result, csv, summary, exit_code, error) = match outcome {
        Ok(o) => {
            let code = if o.mismatch { EXIT_MISMATCH } else { EXIT_OK };
            (o.result, o.csv, o.summary, code, None)
        }
        Err(e) => {
            let code = exit_code(&e);
            (Value::Null, Vec::new(), format!("{} failed: {e}\n", cmd.name()), code, Some(e.to_string()))
        }
    };
    let env = Envelope {
        command: cmd.name(),
        seed: cfg.seed,
        potential: pot_json,
        parameters: parameters(cmd, cfg),
        failed: exit_code == EXIT_NUMERICAL || exit_code == EXIT_VALIDATION,
        error,
        result,
    };
    let report = serde_json::to_string_pretty(&env).expect("report serialises") + "\n";
    let csv = if cfg.output.format.csv() { csv } else { Vec::new() };
    RunOutput {
        command: cmd,
        report,
        csv,
        summary,
        exit_code,
    }
}

fn dispatch(cmd: Command, cfg: &ExperimentConfig, p: &Potential, exec: Execution) -> Result<Outcome> {
    match cmd {
        Command::Solve => solve(cfg, p),
        Command::Spectrum => spectrum(cfg, p, exec),
        Command::Form => form(cfg, p),
        Command::Scan => scan(cfg, p, exec),
        Command::GreenCheck => green(cfg, p),
        Command::KernelGrowth => kernel(cfg, p, exec),
        Command::Semigroup => semigroup(cfg, p),
        Command::Corpus => Ok(list_corpus()),
        Command::VerifyAll => Ok(verify_all(cfg, exec)),
    }
}

fn plain(result: Value, summary: String) -> Outcome {
    Outcome {
        result,
        csv: Vec::new(),
        summary,
        mismatch: false,
    }
}

fn solve(cfg: &ExperimentConfig, p: &Potential) -> Result<Outcome> {
    let s = &cfg.solve;
    let data = s.data.build(p.dim(), "solve.data")?;
    let (a, b) = (s.interval[0], s.interval[1]);
    let sol = solve_cauchy(p, s.adjoint, complex(s.lambda), &data, None, (a, b), &cfg.tolerances())?;
    let n = s.samples.max(2);
    let xs: Vec<f64> = (0..n).map(|i| a + (b - a) * i as f64 / (n - 1) as f64).collect();
    let mut samples = Vec::with_capacity(n);
    for &x in &xs {
        let st = sol.state(x)?;
        let (u, u1) = st.split_at(p.dim());
        samples.push(json!({ "x": x, "u": u, "u1": u1 }));
    }
    let end = sol.state(b)?;
    let result = json!({
        "mesh_nodes": sol.nodes().len(),
        "local_error_estimate": sol.local_error_estimate(),
        "interpolation_order": sol.interpolation_order(),
        "endpoint": { "x": b, "state": end },
        "samples": samples,
    });
    let mut summary = format!(
        "solved {} on [{a}, {b}] at λ = {} with {} mesh nodes\n",
        if s.adjoint { "l⁺[u] = λu" } else { "l[u] = λu" },
        fmt_c(complex(s.lambda)),
        sol.nodes().len()
    );
    for (i, z) in end.iter().enumerate() {
        let name = if i < p.dim() { format!("u_{}", i + 1) } else { format!("u^[1]_{}", i - p.dim() + 1) };
        let _ = writeln!(summary, "  {name}({b}) = {}", fmt_c(*z));
    }
    Ok(Outcome {
        result,
        csv: vec![("solve.csv".into(), sol.to_csv(Some(&xs))?)],
        summary,
        mismatch: false,
    })
}

fn spectrum(cfg: &ExperimentConfig, p: &Potential, exec: Execution) -> Result<Outcome> {
    let sp = &cfg.spectrum;
    let settings = SpectralSettings {
        tolerances: cfg.tolerances(),
        real_grid: sp.real_grid,
        complex_grid: sp.complex_grid,
        ..SpectralSettings::default()
    };
    let tp = TruncatedProblem::new(p.clone(), sp.radius, sp.window()?)?.with_settings(settings);
    let mut rep = truncated_eigenvalues(&tp, exec)?;
    if sp.oracle {
        annotate_oracle(&mut rep, &tp, sp.fd_nodes.unwrap_or_else(|| default_fd_nodes(sp.radius)), exec)?;
    }
    if sp.radius_step > 0.0 {
        annotate_r_stability(&mut rep, &tp, sp.radius_step, exec)?;
    }
    let mut summary = format!(
        "{} eigenvalue(s) in {:?} at R = {} ({}, {})\n",
        rep.eigenvalues.len(),
        rep.window,
        rep.radius,
        rep.symmetry_class,
        rep.search
    );
    let mut csv = String::from("re,im,miss,multiplicity,fd_extrapolated_re,fd_extrapolated_im,fd_error_bar,radius_shift\n");
    for e in &rep.eigenvalues {
        let (ore, oim, bar) = e
            .oracle
            .map(|o| (o.extrapolated.re.to_string(), o.extrapolated.im.to_string(), o.error_bar.to_string()))
            .unwrap_or_default();
        let shift = e.radius_shift.map(|s| s.to_string()).unwrap_or_default();
        let _ = writeln!(csv, "{},{},{},{},{ore},{oim},{bar},{shift}", e.lambda.re, e.lambda.im, e.miss, e.multiplicity);
        let _ = writeln!(
            summary,
            "  λ = {:<36} miss {:.1e}  mult {}{}",
            fmt_c(e.lambda),
            e.miss,
            e.multiplicity,
            e.oracle
                .map(|o| format!("  FD {} ± {:.1e}", fmt_c(o.extrapolated), o.error_bar))
                .unwrap_or_default()
        );
    }
    for n in &rep.notes {
        let _ = writeln!(summary, "  note: {n}");
    }
    Ok(Outcome {
        result: to_value(&rep),
        csv: vec![("spectrum.csv".into(), csv)],
        summary,
        mismatch: false,
    })
}

fn form(cfg: &ExperimentConfig, p: &Potential) -> Result<Outcome> {
    let m = p.dim();
    let mut e1 = vec![ZERO; m];
    e1[0] = ONE;
    let member = cfg.form.test_function.clone().unwrap_or(FamilyMember::Hat {
        center: 0.0,
        width: 1.0,
        direction: e1,
    });
    let op = cfg.form.operator.unwrap_or(Operator::Primal);
    let w = member.build(p, op)?;
    let target = if op == Operator::Adjoint { p.adjoint() } else { p.clone() };
    let f = form_value(&target, &w)?;
    let summary = format!(
        "B(w, w) = {}  (kinetic {}, Q-terms {}, s-term {}, quadrature error {:.1e})\n",
        fmt_c(f.value),
        fmt_c(f.kinetic),
        fmt_c(f.q_term),
        fmt_c(f.s_term),
        f.quadrature_error
    );
    Ok(plain(json!({ "test_function": member, "operator": op, "form": f }), summary))
}

fn scan(cfg: &ExperimentConfig, p: &Potential, exec: Execution) -> Result<Outcome> {
    let family = match &cfg.scan.family {
        Some(f) => f.clone(),
        None => default_family(p, cfg.seed),
    };
    let rep = accretivity_scan(p, &family, exec);
    let mut csv = String::from("operator,member,re,im,quadrature_error\n");
    for e in &rep.entries {
        let member = serde_json::to_string(&e.member).expect("serialises").replace('"', "'");
        let _ = writeln!(
            csv,
            "{:?},\"{member}\",{},{},{}",
            e.operator, e.form.value.re, e.form.value.im, e.form.quadrature_error
        );
    }
    let mut summary = format!(
        "{} forms evaluated; min Re B = {:.6e} (primal {:.6e}, adjoint {:.6e})\n  {}\n",
        rep.evaluated, rep.minimum, rep.minimum_primal, rep.minimum_adjoint, rep.conclusion
    );
    for f in &rep.failures {
        let _ = writeln!(summary, "  failure: {f}");
    }
    Ok(Outcome {
        result: to_value(&rep),
        csv: vec![("scan.csv".into(), csv)],
        summary,
        mismatch: false,
    })
}

fn green(cfg: &ExperimentConfig, p: &Potential) -> Result<Outcome> {
    let g = &cfg.green;
    let interval = (g.interval[0], g.interval[1]);
    let tol = cfg.tolerances();
    let u = solve_cauchy(p, false, complex(g.lambda_u), &g.data_u.build(p.dim(), "green.data_u")?, None, interval, &tol)?;
    let v = solve_cauchy(p, true, complex(g.lambda_v), &g.data_v.build(p.dim(), "green.data_v")?, None, interval, &tol)?;
    let rep = green_identity(&u, &v, g.check[0], g.check[1])?;
    let radii: Vec<f64> = g
        .tail_radii
        .iter()
        .copied()
        .filter(|r| -r >= interval.0 && *r <= interval.1)
        .collect();
    let tail = bracket_tail(&u, &v, &radii)?;
    let mut summary = format!(
        "Green's identity on [{}, {}]: residual {:.3e} (quadrature error {:.1e})\n  ∫(l[u],v) − ∫(u,l⁺[v]) = {}\n  [u,v](b) − [u,v](a)    = {}\n",
        g.check[0],
        g.check[1],
        rep.residual,
        rep.quadrature_error,
        fmt_c(rep.integral_difference),
        fmt_c(rep.bracket_difference)
    );
    for t in &tail {
        let _ = writeln!(summary, "  r = {:<5} [u,v](−r) = {}  [u,v](r) = {}", t.radius, fmt_c(t.left), fmt_c(t.right));
    }
    Ok(plain(json!({ "green": rep, "bracket_tail": tail }), summary))
}

fn kernel(cfg: &ExperimentConfig, p: &Potential, exec: Execution) -> Result<Outcome> {
    let k = &cfg.kernel_growth;
    let rep = kernel_growth_test(p, k.shift, k.n_max, k.random, cfg.seed, &cfg.tolerances(), exec)?;
    let mut csv = String::from("direction,n,ratio,shell_mass\n");
    let mut summary = format!(
        "l⁺[v] = {}·v, n ≤ {}, kernel bound C² = {}\n",
        k.shift, k.n_max, rep.kernel_bound
    );
    for d in &rep.directions {
        for (i, (r, s)) in d.ratios.iter().zip(&d.shell_masses).enumerate() {
            let _ = writeln!(csv, "\"{}\",{},{r},{s}", d.label, i + 1);
        }
        let _ = writeln!(
            summary,
            "  {:<16} {:?}  last rₙ {:.4e}  growth rate {:.4}",
            d.label,
            d.verdict,
            d.ratios.last().copied().unwrap_or(f64::NAN),
            d.growth_rate
        );
    }
    let _ = writeln!(summary, "  trivial kernel evidence: {}", rep.trivial_kernel_evidence);
    Ok(Outcome {
        result: to_value(&rep),
        csv: vec![("kernel_growth.csv".into(), csv)],
        summary,
        mismatch: false,
    })
}

fn semigroup(cfg: &ExperimentConfig, p: &Potential) -> Result<Outcome> {
    let sg = &cfg.semigroup;
    let tp = TruncatedProblem::new(p.clone(), sg.radius, Window::real(-1.0, 0.0)?)?;
    let fd = discretize_fd(&tp, sg.nodes)?;
    let m = p.dim();
    let u0 = match sg.initial {
        InitialState::Gaussian { center, width } => {
            fd.sample(|x| vec![C64::from((-((x - center) / width).powi(2)).exp()); m])
        }
        InitialState::Exponential { rate } => fd.sample(|x| vec![C64::from((-rate * x.abs()).exp()); m]),
    };
    let rep = contraction_test(&tp, &u0, sg.dt, sg.steps, sg.nodes)?;
    let mut csv = String::from("step,t,norm\n");
    for (k, n) in rep.norms.iter().enumerate() {
        let _ = writeln!(csv, "{k},{},{n}", k as f64 * sg.dt);
    }
    let mut summary = format!(
        "Crank–Nicolson, {} steps of dt = {}: max step ratio {:.15}, final {:.15}\n  non-increasing: {}, discretisation accretive: {} ({} negative Hermitian eigenvalues)\n",
        rep.steps,
        rep.dt,
        rep.max_step_ratio,
        rep.final_step_ratio,
        rep.non_increasing,
        rep.accretive_discretization,
        rep.hermitian_negative_count
    );
    for w in &rep.warnings {
        let _ = writeln!(summary, "  warning: {w}");
    }
    Ok(Outcome {
        result: to_value(&rep),
        csv: vec![("semigroup.csv".into(), csv)],
        summary,
        mismatch: false,
    })
}

fn list_corpus() -> Outcome {
    let entries = corpus();
    let mut summary = format!("{:<15} {:<18} {:<10} {}\n", "name", "class", "accretive", "bound states");
    let mut list = Vec::new();
    for e in &entries {
        let ex = &e.expectations;
        let bs: Vec<String> = ex.bound_states.iter().map(|b| format!("{:.9}", b.value)).collect();
        let _ = writeln!(
            summary,
            "{:<15} {:<18} {:<10} [{}]",
            e.name,
            ex.symmetry_class.to_string(),
            ex.accretive,
            bs.join(", ")
        );
        let mut v = to_value(e);
        v["potential"] = to_value(&PotentialConfig::from_potential(&e.potential));
        list.push(v);
    }
    plain(Value::Array(list), summary)
}

fn verify_all(cfg: &ExperimentConfig, exec: Execution) -> Outcome {
    let rep = run_suite(cfg.seed, exec);
    let mut summary = String::new();
    for c in &rep.criteria {
        let _ = writeln!(summary, "{}", c.summary_line());
        for n in c.notes.iter().filter(|_| !c.passed) {
            let _ = writeln!(summary, "       {n}");
        }
    }
    for e in &rep.corpus {
        let _ = writeln!(summary, "[{}] corpus {}", if e.passed { "PASS" } else { "FAIL" }, e.name);
        for ch in e.checks.iter().filter(|c| !c.passed) {
            let _ = writeln!(summary, "       {}: expected {}, observed {}", ch.what, ch.expected, ch.observed);
        }
    }
    let _ = writeln!(summary, "{}", if rep.passed { "all checks passed" } else { "SOME CHECKS FAILED" });
    Outcome {
        result: to_value(&rep),
        csv: Vec::new(),
        summary,
        mismatch: !rep.passed,
    }
}

/// Wall-clock metadata kept outside the compared report.
pub fn metadata(cmd: Command, started: std::time::SystemTime, elapsed: std::time::Duration, exec: Execution) -> String {
    let since = started.duration_since(std::time::UNIX_EPOCH).unwrap_or_default();
    let v = json!({
        "command": cmd.name(),
        "started_unix_seconds": since.as_secs_f64(),
        "elapsed_seconds": elapsed.as_secs_f64(),
        "parallel": exec.is_parallel(),
        "version": env!("CARGO_PKG_VERSION"),
    });
    serde_json::to_string_pretty(&v).expect("serialises") + "\n"
}
