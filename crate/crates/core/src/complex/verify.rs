//! Structural and probabilistic checks on free complexes.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::Serialize;

use super::FreeComplex;
use crate::error::{Error, Result};
use crate::linalg::{is_prime, rank_mod_p};

/// One failed check at entry `(row, col)` of `d_step` (or of
/// `d_step · d_{step+1}` for `d-squared`).
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct Violation {
    pub check: &'static str,
    pub step: usize,
    pub row: usize,
    pub col: usize,
    pub detail: String,
}

#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize)]
pub struct ComplexReport {
    pub ranks: Vec<usize>,
    pub violations: Vec<Violation>,
}

impl ComplexReport {
    pub fn passed(&self) -> bool {
        self.violations.is_empty()
    }

    pub fn count(&self, check: &str) -> usize {
        self.violations.iter().filter(|v| v.check == check).count()
    }
}

/// Exact checks: `d² = 0`, homogeneity of every entry against the shifts,
/// and minimality (no non-zero constant terms). Steps run in parallel; the
/// report is ordered by check, then step, row and column.
pub fn verify_complex(f: &FreeComplex) -> Result<ComplexReport> {
    let names = f.ring().names();
    let w = f.ring().weights();
    let per_step: Vec<Vec<Violation>> = (1..=f.length())
        .into_par_iter()
        .map(|i| -> Result<Vec<Violation>> {
            let d = f.d(i);
            let mut out = Vec::new();
            if i < f.length() {
                let prod = d.mul(f.d(i + 1))?;
                for ((r, c), p) in prod.iter() {
                    out.push(Violation {
                        check: "d-squared",
                        step: i,
                        row: r,
                        col: c,
                        detail: format!("(d{i}·d{}) = {}", i + 1, p.render(names)),
                    });
                }
            }
            for ((r, c), p) in d.iter() {
                let want = f.shifts()[i][c] as i128 - f.shifts()[i - 1][r] as i128;
                let degs = p.degrees(w);
                if degs.len() != 1 || degs[0] as i128 != want {
                    out.push(Violation {
                        check: "homogeneity",
                        step: i,
                        row: r,
                        col: c,
                        detail: format!("expected degree {want}, found {degs:?}"),
                    });
                }
                let c0 = p.constant_term();
                if c0 != 0 {
                    out.push(Violation {
                        check: "minimality",
                        step: i,
                        row: r,
                        col: c,
                        detail: format!("constant term {c0}"),
                    });
                }
            }
            Ok(out)
        })
        .collect::<Result<_>>()?;
    let mut violations: Vec<Violation> = per_step.into_iter().flatten().collect();
    let order = |c: &str| match c {
        "d-squared" => 0,
        "homogeneity" => 1,
        _ => 2,
    };
    violations.sort_by_key(|v| (order(v.check), v.step, v.row, v.col));
    Ok(ComplexReport {
        ranks: f.ranks(),
        violations,
    })
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum ExactnessStatus {
    /// Some evaluation achieved the ranks of an acyclic complex.
    Pass,
    /// Ranks fell short in every trial, identically in at least two.
    Fail,
    Inconclusive,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct ExactnessReport {
    pub status: ExactnessStatus,
    pub prime: u64,
    pub trials: usize,
    /// Best rank of each `d_i` over all trials (index 0 is `d_1`).
    pub ranks: Vec<usize>,
    pub module_ranks: Vec<usize>,
    /// Per-trial ranks.
    pub per_trial: Vec<Vec<usize>>,
    pub detail: String,
}

/// Rank condition of the Buchsbaum–Eisenbud criterion at random points.
///
/// With `d² = 0` known, every point gives lower bounds on the generic ranks
/// and the condition `rank d_k + rank d_{k+1} = rank F_k` (k ≥ 1, with
/// `rank d_1 = 1` for a cyclic module) is an upper bound, so one trial that
/// attains it certifies it. The depth half of the criterion is not checked.
pub fn verify_exactness_probabilistic(
    f: &FreeComplex,
    prime: u64,
    trials: usize,
) -> Result<ExactnessReport> {
    verify_exactness_with_seed(f, prime, trials, 0x005e_ed0f_c0e5)
}

pub fn verify_exactness_with_seed(
    f: &FreeComplex,
    prime: u64,
    trials: usize,
    seed: u64,
) -> Result<ExactnessReport> {
    if !is_prime(prime) || prime >= 1 << 31 {
        return Err(Error::arg(format!("{prime} is not a prime below 2^31")));
    }
    if trials == 0 {
        return Err(Error::arg("at least one trial is needed"));
    }
    let module_ranks = f.ranks();
    let len = f.length();
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let points: Vec<Vec<u64>> = (0..trials)
        .map(|_| (0..f.ring().nvars()).map(|_| rng.gen_range(1..prime)).collect())
        .collect();
    let per_trial: Vec<Vec<usize>> = points
        .par_iter()
        .map(|pt| {
            (1..=len)
                .map(|i| rank_mod_p(&mut f.d(i).eval_mod(pt, prime), prime))
                .collect()
        })
        .collect();
    let ranks: Vec<usize> = (0..len)
        .map(|i| per_trial.iter().map(|t| t[i]).max().unwrap_or(0))
        .collect();

    let satisfied = |r: &[usize]| -> Option<String> {
        if module_ranks[0] != 1 {
            return Some(format!("F_0 has rank {}", module_ranks[0]));
        }
        if len == 0 {
            return None;
        }
        if r[0] != 1 {
            return Some(format!("rank d1 = {} instead of 1", r[0]));
        }
        for k in 1..=len {
            let next = if k < len { r[k] } else { 0 };
            if r[k - 1] + next != module_ranks[k] {
                return Some(format!(
                    "rank d{k} + rank d{} = {} but rank F_{k} = {}",
                    k + 1,
                    r[k - 1] + next,
                    module_ranks[k]
                ));
            }
        }
        None
    };

    let (status, detail) = match satisfied(&ranks) {
        None => (ExactnessStatus::Pass, "rank condition attained".to_string()),
        Some(why) => {
            let stable = trials >= 2 && per_trial.iter().all(|t| *t == per_trial[0]);
            if stable {
                (ExactnessStatus::Fail, why)
            } else {
                let note = if trials < 2 {
                    "a single trial cannot rule out an unlucky point"
                } else {
                    "ranks varied between trials"
                };
                (ExactnessStatus::Inconclusive, format!("{why}; {note}"))
            }
        }
    };
    Ok(ExactnessReport {
        status,
        prime,
        trials,
        ranks,
        module_ranks,
        per_trial,
        detail,
    })
}
