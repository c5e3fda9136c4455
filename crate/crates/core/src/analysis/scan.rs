//! Accretivity scans: minimum of `Re B(w, w)` over a family of test
//! functions, for `l` and for `l⁺`.

use std::sync::Arc;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use super::{form_value, Bump, CompactTestFunction, FormReport};
use crate::cauchy::{mollify_to_domain, solve_cauchy, CauchyData, Tolerances};
use crate::error::Result;
use crate::exec::Execution;
use crate::linalg::{C64, ONE, ZERO};
use crate::potential::Potential;

/// Which preminimal operator a form value belongs to.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Operator {
    Primal,
    Adjoint,
}

/// Parameters of one scanned test function.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum FamilyMember {
    Hat {
        center: f64,
        width: f64,
        direction: Vec<C64>,
    },
    Gaussian {
        center: f64,
        sigma: f64,
        degree: u32,
        direction: Vec<C64>,
    },
    /// `φ·u` with `u` solving `l[u] = λu` (or `l⁺`) from `data`, `φ` a
    /// plateau bump on `support`.
    MollifiedSolution {
        lambda: C64,
        data: CauchyData,
        support: (f64, f64),
        ramp: f64,
    },
}

impl FamilyMember {
    /// Builds the test function; mollified solutions solve for `op`.
    pub fn build(&self, p: &Potential, op: Operator) -> Result<CompactTestFunction> {
        match self {
            FamilyMember::Hat { center, width, direction } => CompactTestFunction::hat(*center, *width, direction.clone()),
            FamilyMember::Gaussian { center, sigma, degree, direction } => {
                CompactTestFunction::gaussian(*center, *sigma, *degree, direction.clone())
            }
            FamilyMember::MollifiedSolution { lambda, data, support, ramp } => {
                let sol = solve_cauchy(p, op == Operator::Adjoint, *lambda, data, None, *support, &Tolerances::default())?;
                mollify_to_domain(&Arc::new(sol), Bump::new(support.0, support.1, *ramp)?)
            }
        }
    }
}

/// One evaluated member.
#[derive(Debug, Clone, Serialize)]
pub struct ScanEntry {
    pub operator: Operator,
    pub member: FamilyMember,
    pub form: FormReport,
}

/// Outcome of `accretivity_scan`.
#[derive(Debug, Clone, Serialize)]
pub struct ScanReport {
    pub evaluated: usize,
    pub minimum: f64,
    pub argmin: Option<ScanEntry>,
    pub minimum_primal: f64,
    pub minimum_adjoint: f64,
    /// Minimum plus its quadrature error is still negative.
    pub certified_non_accretive: bool,
    pub conclusion: String,
    pub failures: Vec<String>,
    pub entries: Vec<ScanEntry>,
}

fn unit(m: usize, j: usize) -> Vec<C64> {
    let mut v = vec![ZERO; m];
    v[j] = ONE;
    v
}

fn directions(m: usize, rng: &mut ChaCha8Rng) -> Vec<Vec<C64>> {
    let mut out: Vec<Vec<C64>> = (0..m).map(|j| unit(m, j)).collect();
    let r = std::f64::consts::FRAC_1_SQRT_2;
    for i in 0..m {
        for j in i + 1..m {
            let mut a = vec![ZERO; m];
            a[i] = C64::from(r);
            a[j] = C64::from(r);
            out.push(a.clone());
            a[j] = C64::new(0.0, r);
            out.push(a);
        }
    }
    for _ in 0..2 {
        let mut v: Vec<C64> = (0..m)
            .map(|_| C64::new(rng.random::<f64>() - 0.5, rng.random::<f64>() - 0.5))
            .collect();
        let n = crate::linalg::norm(&v);
        v.iter_mut().for_each(|z| *z /= n);
        out.push(v);
    }
    out
}

/// Default family: hats of half-width `2^k` (`k = −3..6`), Gaussians times
/// low-degree monomials, and bump-mollified Cauchy solutions, centred at
/// the origin, at up to three jumps of `Q` and at one seeded random point.
pub fn default_family(p: &Potential, seed: u64) -> Vec<FamilyMember> {
    let m = p.dim();
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let dirs = directions(m, &mut rng);
    let mut centers = vec![0.0];
    for x in p.primitive().jump_points().into_iter().take(3) {
        if !centers.contains(&x) {
            centers.push(x);
        }
    }
    centers.push(rng.random_range(-3.0..3.0));

    let mut fam = Vec::new();
    for &c in &centers {
        for k in -3..=6 {
            for d in &dirs {
                fam.push(FamilyMember::Hat {
                    center: c,
                    width: 2f64.powi(k),
                    direction: d.clone(),
                });
            }
        }
        for sigma in [0.25, 0.5, 1.0, 2.0, 4.0] {
            for degree in 0..=2 {
                for d in &dirs {
                    fam.push(FamilyMember::Gaussian {
                        center: c,
                        sigma,
                        degree,
                        direction: d.clone(),
                    });
                }
            }
        }
    }
    for &c in &centers[..1] {
        for lambda in [-1.0, 0.0, 1.0] {
            for j in 0..m {
                for (c0, c1) in [(unit(m, j), vec![ZERO; m]), (vec![ZERO; m], unit(m, j))] {
                    fam.push(FamilyMember::MollifiedSolution {
                        lambda: C64::from(lambda),
                        data: CauchyData::new(c, c0, c1),
                        support: (c - 3.0, c + 3.0),
                        ramp: 1.0,
                    });
                }
            }
        }
    }
    fam
}

/// `accretivity_scan`: evaluates every member for `l` and `l⁺`. A negative
/// minimum certifies non-accretivity; a nonnegative one is evidence only.
pub fn accretivity_scan(p: &Potential, family: &[FamilyMember], exec: Execution) -> ScanReport {
    let adj = p.adjoint();
    let jobs: Vec<(Operator, &FamilyMember)> = [Operator::Primal, Operator::Adjoint]
        .into_iter()
        .flat_map(|op| family.iter().map(move |f| (op, f)))
        .collect();
    let results = exec.map(&jobs, |(op, member)| {
        let target = if *op == Operator::Primal { p } else { &adj };
        member.build(p, *op).and_then(|w| form_value(target, &w)).map(|form| ScanEntry {
            operator: *op,
            member: (*member).clone(),
            form,
        })
    });
    let mut entries = Vec::new();
    let mut failures = Vec::new();
    for (r, (op, member)) in results.into_iter().zip(&jobs) {
        match r {
            Ok(e) => entries.push(e),
            Err(e) => failures.push(format!("{op:?} {member:?}: {e}")),
        }
    }
    let min_of = |op: Option<Operator>| {
        entries
            .iter()
            .filter(|e| op.is_none_or(|o| e.operator == o))
            .map(|e| e.form.real_part)
            .fold(f64::INFINITY, f64::min)
    };
    let argmin = entries
        .iter()
        .min_by(|a, b| a.form.real_part.total_cmp(&b.form.real_part))
        .cloned();
    let certified = argmin
        .as_ref()
        .is_some_and(|e| e.form.real_part + e.form.quadrature_error < 0.0);
    let conclusion = if certified {
        "non-accretive: negative form value found".to_string()
    } else {
        "no negative form value found (evidence of accretivity, not a proof)".to_string()
    };
    ScanReport {
        evaluated: entries.len(),
        minimum: min_of(None),
        argmin,
        minimum_primal: min_of(Some(Operator::Primal)),
        minimum_adjoint: min_of(Some(Operator::Adjoint)),
        certified_non_accretive: certified,
        conclusion,
        failures,
        entries,
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn hats(widths: &[f64]) -> Vec<FamilyMember> {
        widths
            .iter()
            .map(|&w| FamilyMember::Hat {
                center: 0.0,
                width: w,
                direction: vec![ONE],
            })
            .collect()
    }

    #[test]
    fn attractive_delta_is_certified() {
        let p = Potential::scalar_delta(0.0, C64::from(-2.0));
        let r = accretivity_scan(&p, &hats(&[0.5, 1.0, 2.0, 4.0]), Execution::Sequential);
        assert!(r.certified_non_accretive);
        assert!((r.minimum - (0.5 - 2.0)).abs() < 1e-12);
        let e = r.argmin.unwrap();
        let w = e.member.build(&p, e.operator).unwrap();
        assert_eq!(form_value(&p, &w).unwrap().real_part, e.form.real_part);
    }

    #[test]
    fn free_family_is_nonnegative_and_mode_independent() {
        let p = Potential::free(2);
        let fam = default_family(&p, 7);
        let a = accretivity_scan(&p, &fam, Execution::Sequential);
        let b = accretivity_scan(&p, &fam, Execution::Parallel);
        assert!(a.failures.is_empty());
        assert!(a.minimum >= 0.0);
        assert!(!a.certified_non_accretive);
        assert_eq!(serde_json::to_string(&a).unwrap(), serde_json::to_string(&b).unwrap());
    }

    #[test]
    fn family_is_seeded() {
        let p = Potential::scalar_delta(0.5, C64::from(1.0));
        assert_eq!(default_family(&p, 3), default_family(&p, 3));
        assert_ne!(default_family(&p, 3), default_family(&p, 4));
    }
}
