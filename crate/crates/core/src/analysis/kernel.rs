//! Kernel-growth diagnostic: for solutions of `l⁺[v] = shift·v`, the ratio
//! `rₙ = ∫_{−n}^{n} |v|² / ∫_{n≤|x|≤n+1} |v|²`. A square-integrable kernel
//! element must satisfy `rₙ ≤ C²` (`C` the cutoff slope bound) for every
//! `n`, so ratios exceeding `C²` or exponentially growing shell masses rule
//! a direction out.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use super::{solution_splits, RampProfile};
use crate::cauchy::{solve_cauchy, CauchyData, QuasiSolution, Tolerances};
use crate::error::{Error, Result};
use crate::exec::Execution;
use crate::linalg::{C64, ONE, ZERO};
use crate::potential::Potential;
use crate::quadrature::{integrate, QuadOptions};

/// Shell masses must grow at least this fast (log per unit length) over the
/// last `TAIL` shells to count as exponential growth.
pub const GROWTH_RATE_THRESHOLD: f64 = 0.5;
const TAIL: usize = 5;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum GrowthVerdict {
    /// Integration overflowed: not square integrable.
    BlowUp,
    /// Shell masses grow exponentially: not square integrable.
    ExponentialGrowth,
    /// `rₙ` exceeds `C²` and keeps increasing: violates the kernel bound.
    UnboundedRatio,
    /// `rₙ ≤ C²` with no growth detected: could be a kernel element.
    BoundedCandidate,
    Inconclusive,
}

impl GrowthVerdict {
    /// The direction cannot belong to an `L²` kernel.
    pub fn excludes_kernel(self) -> bool {
        matches!(
            self,
            GrowthVerdict::BlowUp | GrowthVerdict::ExponentialGrowth | GrowthVerdict::UnboundedRatio
        )
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct DirectionReport {
    pub label: String,
    pub data: CauchyData,
    /// `rₙ` for `n = 1..=n_max`.
    pub ratios: Vec<f64>,
    /// `∫_{k≤|x|≤k+1} |v|²` for `k = 0..=n_max`.
    pub shell_masses: Vec<f64>,
    /// Mean of `ln S_{k+1} − ln S_k` over the last shells.
    pub growth_rate: f64,
    pub verdict: GrowthVerdict,
    pub note: Option<String>,
}

#[derive(Debug, Clone, Serialize)]
pub struct KernelGrowthReport {
    pub shift: f64,
    pub n_max: usize,
    pub seed: u64,
    /// `C²` for the default quintic cutoff.
    pub kernel_bound: f64,
    pub directions: Vec<DirectionReport>,
    /// Every direction is ruled out.
    pub trivial_kernel_evidence: bool,
}

fn shell_masses(v: &QuasiSolution, n_max: usize) -> Result<Vec<f64>> {
    let opts = QuadOptions {
        abs_tol: 0.0,
        ..QuadOptions::default()
    };
    let mass = |a: f64, b: f64| -> Result<f64> {
        let splits = solution_splits(&[v], a, b);
        Ok(integrate(
            |x| v.u(x).expect("inside interval").iter().map(|z| z.norm_sqr()).sum::<f64>(),
            a,
            b,
            &splits,
            &opts,
        )?
        .value)
    };
    (0..=n_max)
        .map(|k| {
            let k = k as f64;
            Ok(mass(-k - 1.0, -k)? + mass(k, k + 1.0)?)
        })
        .collect()
}

fn classify(ratios: &[f64], masses: &[f64], bound: f64) -> (f64, GrowthVerdict) {
    let tail = TAIL.min(masses.len().saturating_sub(1));
    if tail == 0 || masses.iter().any(|s| !(*s > 0.0)) {
        return (f64::NAN, GrowthVerdict::Inconclusive);
    }
    let logs: Vec<f64> = masses[masses.len() - tail - 1..].iter().map(|s| s.ln()).collect();
    let rates: Vec<f64> = logs.windows(2).map(|w| w[1] - w[0]).collect();
    let rate = rates.iter().sum::<f64>() / rates.len() as f64;
    if rates.iter().all(|r| *r >= GROWTH_RATE_THRESHOLD) {
        return (rate, GrowthVerdict::ExponentialGrowth);
    }
    let rt = &ratios[ratios.len().saturating_sub(tail)..];
    let increasing = rt.windows(2).all(|w| w[1] > w[0]);
    let last = *ratios.last().unwrap_or(&0.0);
    let verdict = if last > bound && increasing {
        GrowthVerdict::UnboundedRatio
    } else if last <= bound && rate < GROWTH_RATE_THRESHOLD {
        GrowthVerdict::BoundedCandidate
    } else {
        GrowthVerdict::Inconclusive
    };
    (rate, verdict)
}

fn analyse(p: &Potential, shift: f64, n_max: usize, tol: &Tolerances, label: String, data: CauchyData) -> DirectionReport {
    let bound = RampProfile::Quintic.slope_bound().powi(2);
    let r = (n_max + 1) as f64;
    let outcome = solve_cauchy(p, true, C64::from(shift), &data, None, (-r, r), tol)
        .and_then(|v| shell_masses(&v, n_max));
    match outcome {
        Ok(masses) => {
            let mut inner = 0.0;
            let ratios: Vec<f64> = (1..=n_max)
                .map(|n| {
                    inner += masses[n - 1];
                    inner / masses[n]
                })
                .collect();
            let (growth_rate, verdict) = classify(&ratios, &masses, bound);
            DirectionReport {
                label,
                data,
                ratios,
                shell_masses: masses,
                growth_rate,
                verdict,
                note: None,
            }
        }
        Err(e @ Error::BlowUp { .. }) => DirectionReport {
            label,
            data,
            ratios: vec![],
            shell_masses: vec![],
            growth_rate: f64::INFINITY,
            verdict: GrowthVerdict::BlowUp,
            note: Some(format!("non-square-integrable direction: {e}")),
        },
        Err(e) => DirectionReport {
            label,
            data,
            ratios: vec![],
            shell_masses: vec![],
            growth_rate: f64::NAN,
            verdict: GrowthVerdict::Inconclusive,
            note: Some(e.to_string()),
        },
    }
}

/// `kernel_growth_test` over the `2m` canonical Cauchy directions at 0 and
/// `random` seeded complex combinations of them.
pub fn kernel_growth_test(
    p: &Potential,
    shift: f64,
    n_max: usize,
    random: usize,
    seed: u64,
    tol: &Tolerances,
    exec: Execution,
) -> Result<KernelGrowthReport> {
    if n_max < 1 {
        return Err(Error::InvalidArgument("n_max must be at least 1".into()));
    }
    let m = p.dim();
    let mut jobs = Vec::new();
    for j in 0..2 * m {
        let mut y = vec![ZERO; 2 * m];
        y[j] = ONE;
        let name = if j < m { format!("u(0) = e{}", j + 1) } else { format!("u^[1](0) = e{}", j - m + 1) };
        jobs.push((name, y));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    for k in 0..random {
        let y = (0..2 * m)
            .map(|_| C64::new(rng.random::<f64>() * 2.0 - 1.0, rng.random::<f64>() * 2.0 - 1.0))
            .collect();
        jobs.push((format!("random {}", k + 1), y));
    }
    let directions = exec.map(&jobs, |(label, y)| {
        let data = CauchyData::new(0.0, y[..m].to_vec(), y[m..].to_vec());
        analyse(p, shift, n_max, tol, label.clone(), data)
    });
    let trivial = directions.iter().all(|d| d.verdict.excludes_kernel());
    Ok(KernelGrowthReport {
        shift,
        n_max,
        seed,
        kernel_bound: RampProfile::Quintic.slope_bound().powi(2),
        directions,
        trivial_kernel_evidence: trivial,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn free_constant_and_linear() {
        let r = kernel_growth_test(&Potential::free(1), 0.0, 12, 0, 0, &Tolerances::default(), Execution::Sequential).unwrap();
        let one = &r.directions[0];
        for (i, rn) in one.ratios.iter().enumerate() {
            assert!((rn - (i + 1) as f64).abs() < 1e-9, "{rn}");
        }
        assert_eq!(one.verdict, GrowthVerdict::UnboundedRatio);
        let lin = &r.directions[1];
        // (2n³/3) / (2((n+1)³ − n³)/3)
        for (i, rn) in lin.ratios.iter().enumerate() {
            let n = (i + 1) as f64;
            let exact = n.powi(3) / ((n + 1.0).powi(3) - n.powi(3));
            assert!((rn - exact).abs() < 1e-8 * exact);
        }
        assert!(r.trivial_kernel_evidence);
    }

    #[test]
    fn shifted_delta_grows_exponentially() {
        let p = Potential::scalar_delta(0.0, C64::from(1.0));
        let r = kernel_growth_test(&p, -1.0, 15, 2, 1, &Tolerances::default(), Execution::Parallel).unwrap();
        assert_eq!(r.directions.len(), 4);
        for d in &r.directions {
            assert_eq!(d.verdict, GrowthVerdict::ExponentialGrowth, "{}", d.label);
            assert!((d.growth_rate - 2.0).abs() < 0.05);
        }
    }

    #[test]
    fn decaying_masses_are_candidates() {
        let (v, ve) = classify(&[0.5, 0.6, 0.7], &[1.0, 0.1, 0.01, 0.001], 3.5);
        assert!(v < 0.0);
        assert_eq!(ve, GrowthVerdict::BoundedCandidate);
    }
}
