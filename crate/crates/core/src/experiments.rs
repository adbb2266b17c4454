//! Success bounds and seeded Monte-Carlo runs of the solvers.
//!
//! Trial `i` of a run with master seed `s` draws from ChaCha8 stream `i` of
//! seed `s`, so reports do not depend on thread scheduling.

use std::collections::BTreeSet;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::group::{Element, GroupSpec};
use crate::oracle::{self, HidingFunction, HidingOracle, QueryCounter};
use crate::qsim::{self, Decision, RoundOutcome};
use crate::subgroups::{self, SubgroupDesc};

/// Default number of trials per scenario.
pub const DEFAULT_TRIALS: u64 = 10_000;

/// Ceiling on `p^(2k)` for exhaustive enumeration of round outcomes.
pub const MAX_ENUMERATION: u64 = 50_000_000;

fn check_pk(p: u64, k: u32) -> Result<()> {
    if p < 3 || !crate::modmath::is_prime(p) {
        return Err(Error::domain(format!("p = {p} must be an odd prime")));
    }
    if k == 0 {
        return Err(Error::domain("k must be at least 1"));
    }
    Ok(())
}

/// `1 - (2^k p - p + 1) / p^k`.
pub fn success_bound(p: u64, k: u32) -> Result<f64> {
    check_pk(p, k)?;
    let (pf, k) = (p as f64, k as i32);
    Ok(1.0 - (2f64.powi(k) * pf - pf + 1.0) / pf.powi(k))
}

/// `(2^k - 1) / p^(k-1)`.
pub fn cyclic_error_bound(p: u64, k: u32) -> Result<f64> {
    check_pk(p, k)?;
    Ok((2f64.powi(k as i32) - 1.0) / (p as f64).powi(k as i32 - 1))
}

/// Exact verdict frequencies of [`qsim::decide`] on one batch of `k`
/// rounds when `(c, d)` is uniform on `Z_p x Z_p`, as counts out of `p^(2k)`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub struct CyclicDecisionCounts {
    pub total: u64,
    /// Batches that would be reported as `T(t,s,h)`.
    pub two_gen: u64,
    pub no_survivors: u64,
    pub cyclic: u64,
}

impl CyclicDecisionCounts {
    /// Probability of the wrong verdict.
    pub fn error(&self) -> f64 {
        self.two_gen as f64 / self.total as f64
    }
}

/// Enumerates all `p^(2k)` outcome tuples of the cyclic case.
pub fn exact_cyclic_decision(p: u64, k: u32) -> Result<CyclicDecisionCounts> {
    check_pk(p, k)?;
    let total = p
        .checked_pow(2 * k)
        .filter(|&t| t <= MAX_ENUMERATION)
        .ok_or(Error::BoundExceeded {
            what: "p^(2k) outcome tuples",
            value: u64::MAX,
            limit: MAX_ENUMERATION,
        })?;
    let outcomes: Vec<RoundOutcome> = (0..p * p)
        .map(|i| RoundOutcome::from_measurement(i / p, i % p, p, 0))
        .collect();
    let mut counts = CyclicDecisionCounts {
        total,
        two_gen: 0,
        no_survivors: 0,
        cyclic: 0,
    };
    let mut digits = vec![0usize; k as usize];
    let mut rounds = vec![outcomes[0]; k as usize];
    for _ in 0..total {
        for (slot, &d) in rounds.iter_mut().zip(&digits) {
            *slot = outcomes[d];
        }
        match qsim::decide(&rounds) {
            Decision::TwoGen(_) => counts.two_gen += 1,
            Decision::NoSurvivors => counts.no_survivors += 1,
            Decision::Cyclic => counts.cyclic += 1,
        }
        for d in digits.iter_mut() {
            *d += 1;
            if *d < outcomes.len() {
                break;
            }
            *d = 0;
        }
    }
    Ok(counts)
}

/// Which part of a wrong answer was wrong.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct FailureCounts {
    /// Right `H ∩ <x>` and right shape, wrong `y`-coset.
    pub wrong_h: u64,
    /// Right `H ∩ <x>`, but cyclic reported for two-generator or vice versa.
    pub wrong_family: u64,
    /// Wrong `H ∩ <x>`.
    pub wrong_intersection: u64,
    /// Both batches measured `c = 0` throughout.
    pub all_rounds_failed: u64,
    pub other_error: u64,
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct QueryStats {
    pub min: u64,
    pub max: u64,
    pub mean: f64,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Solver {
    #[serde(rename = "solve_2pr")]
    Solve2pr,
    SolveGeneral,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ExperimentReport {
    pub spec: GroupSpec,
    pub hidden: SubgroupDesc,
    pub solver: Solver,
    pub k: u32,
    pub trials: u64,
    pub seed: u64,
    pub successes: u64,
    pub success_rate: f64,
    /// `sqrt(q (1 - q) / trials)` at the empirical rate `q`.
    pub sigma: f64,
    pub success_bound: f64,
    pub cyclic_error_bound: f64,
    pub failures: FailureCounts,
    pub queries: QueryStats,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub wall_clock_ms: Option<f64>,
}

impl ExperimentReport {
    pub const CSV_HEADER: &'static str = "N,p,phi11,hidden,solver,k,trials,seed,successes,success_rate,sigma,success_bound,cyclic_error_bound,wrong_h,wrong_family,wrong_intersection,all_rounds_failed,other_error,queries_min,queries_max,queries_mean";

    pub fn csv_row(&self) -> String {
        let solver = match self.solver {
            Solver::Solve2pr => "solve_2pr",
            Solver::SolveGeneral => "solve_general",
        };
        let f = &self.failures;
        format!(
            "{},{},{},\"{}\",{solver},{},{},{},{},{},{},{},{},{},{},{},{},{},{},{},{}",
            self.spec.n(),
            self.spec.p(),
            self.spec.phi11(),
            self.hidden,
            self.k,
            self.trials,
            self.seed,
            self.successes,
            self.success_rate,
            self.sigma,
            self.success_bound,
            self.cyclic_error_bound,
            f.wrong_h,
            f.wrong_family,
            f.wrong_intersection,
            f.all_rounds_failed,
            f.other_error,
            self.queries.min,
            self.queries.max,
            self.queries.mean,
        )
    }
}

/// Per-trial query counter over a shared coset table.
struct TrialOracle<'a> {
    table: &'a HidingOracle,
    counter: QueryCounter,
}

impl HidingFunction for TrialOracle<'_> {
    fn spec(&self) -> &GroupSpec {
        self.table.spec()
    }

    fn eval(&self, g: Element) -> u64 {
        self.table.eval(g)
    }

    fn counter(&self) -> &QueryCounter {
        &self.counter
    }
}

enum TrialResult {
    Success,
    Wrong(BTreeSet<Element>),
    AllRoundsFailed,
    OtherError,
}

fn x_part(set: &BTreeSet<Element>) -> BTreeSet<Element> {
    set.iter().copied().filter(|g| g.b == 0).collect()
}

fn has_y_part(set: &BTreeSet<Element>) -> bool {
    set.iter().any(|g| g.b != 0)
}

/// Runs the matching solver `trials` times on a fresh counter each time.
/// Solver errors are tallied, not returned.
pub fn estimate_success(
    spec: &GroupSpec,
    hidden: &SubgroupDesc,
    k: u32,
    trials: u64,
    seed: u64,
) -> Result<ExperimentReport> {
    if trials == 0 {
        return Err(Error::domain("trials must be at least 1"));
    }
    if k == 0 {
        return Err(Error::domain("k must be at least 1"));
    }
    let table = oracle::make_oracle(spec, hidden)?;
    let truth: BTreeSet<Element> = hidden.elements(spec)?.into_iter().collect();
    let solver = if spec.family().is_some() {
        Solver::Solve2pr
    } else {
        Solver::SolveGeneral
    };

    let outcomes: Vec<(TrialResult, u64)> = (0..trials)
        .into_par_iter()
        .map(|i| {
            let oracle = TrialOracle {
                table: &table,
                counter: QueryCounter::default(),
            };
            let mut rng = qsim::derive_rng(seed, i);
            let got = match solver {
                Solver::Solve2pr => qsim::solve_2pr(spec, &oracle, k as usize, &mut rng)
                    .and_then(|s| s.subgroup.elements(spec))
                    .map(|v| v.into_iter().collect::<BTreeSet<_>>()),
                Solver::SolveGeneral => {
                    qsim::solve_general(spec, &oracle, k as usize, &mut rng, false)
                        .and_then(|s| s.elements(spec))
                }
            };
            let result = match got {
                Ok(set) if set == truth => TrialResult::Success,
                Ok(set) => TrialResult::Wrong(set),
                Err(Error::AllRoundsFailed { .. }) => TrialResult::AllRoundsFailed,
                Err(_) => TrialResult::OtherError,
            };
            (result, oracle.query_count())
        })
        .collect();

    let mut failures = FailureCounts::default();
    let mut successes = 0;
    for (result, _) in &outcomes {
        match result {
            TrialResult::Success => successes += 1,
            TrialResult::Wrong(set) if x_part(set) != x_part(&truth) => {
                failures.wrong_intersection += 1
            }
            TrialResult::Wrong(set) if has_y_part(set) && has_y_part(&truth) => {
                failures.wrong_h += 1
            }
            TrialResult::Wrong(_) => failures.wrong_family += 1,
            TrialResult::AllRoundsFailed => failures.all_rounds_failed += 1,
            TrialResult::OtherError => failures.other_error += 1,
        }
    }
    let counts = outcomes.iter().map(|&(_, q)| q);
    let queries = QueryStats {
        min: counts.clone().min().unwrap_or(0),
        max: counts.clone().max().unwrap_or(0),
        mean: counts.sum::<u64>() as f64 / trials as f64,
    };
    let rate = successes as f64 / trials as f64;
    Ok(ExperimentReport {
        spec: spec.clone(),
        hidden: hidden.clone(),
        solver,
        k,
        trials,
        seed,
        successes,
        success_rate: rate,
        sigma: (rate * (1.0 - rate) / trials as f64).sqrt(),
        success_bound: success_bound(spec.p(), k)?,
        cyclic_error_bound: cyclic_error_bound(spec.p(), k)?,
        failures,
        queries,
        wall_clock_ms: None,
    })
}

/// Mean query count of one spec, normalised by `k + log2 N`.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct QueryGrowthRow {
    pub spec: GroupSpec,
    pub k: u32,
    pub mean_queries: f64,
    pub scale: f64,
    pub ratio: f64,
}

/// Query counts for recovering the trivial subgroup, which exercises every
/// stage of the solver, on each spec.
pub fn measure_query_growth(
    specs: &[GroupSpec],
    k: u32,
    trials: u64,
    seed: u64,
) -> Result<Vec<QueryGrowthRow>> {
    specs
        .iter()
        .map(|spec| {
            let trivial = SubgroupDesc::ExplicitSet(BTreeSet::from([Element::IDENTITY]));
            let hidden = subgroups::classify(&BTreeSet::from([Element::IDENTITY]), spec)
                .unwrap_or(trivial);
            let report = estimate_success(spec, &hidden, k, trials, seed)?;
            let scale = k as f64 + (spec.n() as f64).log2();
            Ok(QueryGrowthRow {
                spec: spec.clone(),
                k,
                mean_queries: report.queries.mean,
                scale,
                ratio: report.queries.mean / scale,
            })
        })
        .collect()
}
