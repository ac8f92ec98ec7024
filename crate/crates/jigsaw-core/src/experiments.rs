//! Monte Carlo drivers: percolation probability estimation, critical-product
//! bisection, the n·ln n scaling study, the cycle-puzzle threshold, and
//! cluster statistics.
//!
//! Determinism contract: trial i of a batch draws from seed.child(i) and
//! batches merge in trial order, so outcome vectors are identical for any
//! rayon worker count. The bisection treats each probe's estimate as exact;
//! sampling noise is controlled by trials_per_probe rather than sequential
//! testing, which keeps the whole search reproducible from one seed.

use std::collections::BTreeMap;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::cycle::cycle_percolates_sampled;
use crate::random::{gen_double, ERParams, ParamError, SeedSpec};
use crate::solver::solve_fast;

#[derive(Debug, Error)]
pub enum ExperimentError {
    #[error(
        "no bracket straddling 1/2 within {MAX_DOUBLINGS} doublings of q0={q0:.4e} \
         (reached [{q_lo:.4e}, {q_hi:.4e}])"
    )]
    BracketNotFound { q0: f64, q_lo: f64, q_hi: f64 },
    #[error("threshold search needs n >= {min}, got {n}")]
    TooSmall { n: u32, min: u32 },
    #[error(transparent)]
    Param(#[from] ParamError),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct TrialOutcome {
    pub percolated: bool,
    pub rounds: usize,
    pub largest_cluster: u32,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct TrialBatch {
    pub params: ERParams,
    pub trials: u64,
    pub seed: SeedSpec,
    pub outcomes: Vec<TrialOutcome>,
}

impl TrialBatch {
    pub fn successes(&self) -> u64 {
        self.outcomes.iter().filter(|o| o.percolated).count() as u64
    }

    pub fn success_fraction(&self) -> f64 {
        self.successes() as f64 / self.trials as f64
    }
}

/// Solve `trials` independent draws of the double graph ensemble.
pub fn run_trials(params: ERParams, trials: u64, seed: SeedSpec) -> TrialBatch {
    let outcomes: Vec<TrialOutcome> = (0..trials)
        .into_par_iter()
        .map(|i| {
            let dg = gen_double(params, seed.child(i));
            let res = solve_fast(&dg);
            let largest = res
                .final_blocks()
                .iter()
                .map(|b| b.len() as u32)
                .max()
                .unwrap_or(0);
            TrialOutcome {
                percolated: res.percolates(),
                rounds: res.rounds,
                largest_cluster: largest,
            }
        })
        .collect();
    TrialBatch {
        params,
        trials,
        seed,
        outcomes,
    }
}

const Z95: f64 = 1.959963984540054;

/// 95% Wilson score interval for a binomial proportion.
pub fn wilson_interval(successes: u64, trials: u64) -> (f64, f64) {
    assert!(trials >= 1 && successes <= trials);
    let (s, t) = (successes as f64, trials as f64);
    let phat = s / t;
    let z2 = Z95 * Z95;
    let denom = 1.0 + z2 / t;
    let center = (phat + z2 / (2.0 * t)) / denom;
    let half = Z95 * (phat * (1.0 - phat) / t + z2 / (4.0 * t * t)).sqrt() / denom;
    ((center - half).max(0.0), (center + half).min(1.0))
}

/// Worst-case (at 1/2) half-width of the probe interval.
pub fn probe_half_width(trials_per_probe: u64) -> f64 {
    let t = trials_per_probe as f64;
    Z95 / (2.0 * (t + Z95 * Z95).sqrt())
}

pub fn estimate_percolation_prob(
    params: ERParams,
    trials: u64,
    seed: SeedSpec,
) -> (f64, (f64, f64)) {
    assert!(trials >= 1);
    let batch = run_trials(params, trials, seed);
    let ci = wilson_interval(batch.successes(), trials);
    (batch.success_fraction(), ci)
}

/// How a probed product q is split into the two edge densities.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub enum RatioPolicy {
    /// p1 = p2 = √q. Default: the threshold is stated for the product, and
    /// symmetry keeps both densities far from the connectivity floor.
    Symmetric,
    /// p1 held fixed, p2 = q / p1, for asymmetric regimes.
    FixedP1(f64),
}

impl RatioPolicy {
    pub fn params(&self, n: u32, q: f64) -> Result<ERParams, ParamError> {
        match *self {
            RatioPolicy::Symmetric => ERParams::symmetric(n, q),
            RatioPolicy::FixedP1(p1) => ERParams::new(n, p1, q / p1),
        }
    }

    /// Largest product representable under the policy.
    fn q_max(&self) -> f64 {
        match *self {
            RatioPolicy::Symmetric => 1.0,
            RatioPolicy::FixedP1(p1) => p1,
        }
    }
}

/// What quantity a threshold search bisected on.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub enum SearchVariable {
    /// q = p1·p2 on independent double graphs.
    Product(RatioPolicy),
    /// Red density p with the blue graph fixed to the n-cycle.
    CycleRedDensity,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct ThresholdEstimate {
    pub n: u32,
    pub variable: SearchVariable,
    /// Final bracket: estimate < 1/2 at q_lo, >= 1/2 at q_hi.
    pub q_lo: f64,
    pub q_hi: f64,
    /// Probe estimates recorded at the final bracket endpoints.
    pub est_lo: f64,
    pub est_hi: f64,
    /// Geometric midpoint of the final bracket.
    pub q_hat: f64,
    pub trials_per_probe: u64,
    pub probes: u32,
    pub note: String,
}

impl ThresholdEstimate {
    /// n·q̂·ln n for product searches, q̂·ln n for the cycle puzzle. Flat in
    /// n when the corresponding threshold law holds.
    pub fn normalized(&self) -> f64 {
        let ln_n = (self.n as f64).ln();
        match self.variable {
            SearchVariable::Product(_) => self.n as f64 * self.q_hat * ln_n,
            SearchVariable::CycleRedDensity => self.q_hat * ln_n,
        }
    }
}

const TARGET: f64 = 0.5;
const MAX_DOUBLINGS: u32 = 40;
/// Bracket relative width at which bisection stops. An artifact choice: the
/// width of the true critical window is not part of the contract.
pub const DEFAULT_REL_TOL: f64 = 0.05;
/// Probe half-widths above this put a warning in the estimate's note.
const WIDE_PROBE_HALF_WIDTH: f64 = 0.15;

fn probe_note(trials_per_probe: u64) -> String {
    let half = probe_half_width(trials_per_probe);
    if half > WIDE_PROBE_HALF_WIDTH {
        format!("95% probe half-width at 1/2 is {half:.3}; wide, increase trials per probe")
    } else {
        format!("95% probe half-width at 1/2 is {half:.3}")
    }
}

struct Bracket {
    q_lo: f64,
    q_hi: f64,
    est_lo: f64,
    est_hi: f64,
    probes: u32,
}

/// Double outward from q0 until probe estimates straddle 1/2, then bisect
/// geometrically until the bracket relative width is at most rel_tol.
fn bracket_and_bisect(
    q0: f64,
    q_max: f64,
    rel_tol: f64,
    mut probe: impl FnMut(f64) -> Result<f64, ExperimentError>,
) -> Result<Bracket, ExperimentError> {
    assert!(rel_tol > 0.0 && rel_tol < 1.0, "rel_tol must lie in (0,1)");
    let mut probes = 1u32;
    let est0 = probe(q0)?;
    let (mut q_lo, mut q_hi, mut est_lo, mut est_hi);
    if est0 >= TARGET {
        q_hi = q0;
        est_hi = est0;
        let mut doublings = 0;
        loop {
            if doublings >= MAX_DOUBLINGS {
                return Err(ExperimentError::BracketNotFound {
                    q0,
                    q_lo: q_hi,
                    q_hi: q0,
                });
            }
            let q = q_hi / 2.0;
            doublings += 1;
            let est = probe(q)?;
            probes += 1;
            if est < TARGET {
                q_lo = q;
                est_lo = est;
                break;
            }
            q_hi = q;
            est_hi = est;
        }
    } else {
        q_lo = q0;
        est_lo = est0;
        let mut doublings = 0;
        loop {
            if doublings >= MAX_DOUBLINGS || q_lo >= q_max {
                return Err(ExperimentError::BracketNotFound {
                    q0,
                    q_lo: q0,
                    q_hi: q_lo,
                });
            }
            let q = (q_lo * 2.0).min(q_max);
            doublings += 1;
            let est = probe(q)?;
            probes += 1;
            if est >= TARGET {
                q_hi = q;
                est_hi = est;
                break;
            }
            q_lo = q;
            est_lo = est;
        }
    }
    while q_hi - q_lo > rel_tol * q_hi {
        let mid = (q_lo * q_hi).sqrt();
        if !(q_lo < mid && mid < q_hi) {
            break; // float resolution exhausted
        }
        let est = probe(mid)?;
        probes += 1;
        if est >= TARGET {
            q_hi = mid;
            est_hi = est;
        } else {
            q_lo = mid;
            est_lo = est;
        }
    }
    Ok(Bracket {
        q_lo,
        q_hi,
        est_lo,
        est_hi,
        probes,
    })
}

/// Bisect the product q = p1·p2 for the density at which half the draws
/// percolate, starting from q0 = 1/(n ln n).
pub fn estimate_critical_product(
    n: u32,
    ratio_policy: RatioPolicy,
    trials_per_probe: u64,
    rel_tol: f64,
    seed: SeedSpec,
) -> Result<ThresholdEstimate, ExperimentError> {
    if n < 64 {
        return Err(ExperimentError::TooSmall { n, min: 64 });
    }
    assert!(trials_per_probe >= 1);
    let q0 = 1.0 / (n as f64 * (n as f64).ln());
    let mut probe_index = 0u64;
    let bracket = bracket_and_bisect(q0, ratio_policy.q_max(), rel_tol, |q| {
        let params = ratio_policy.params(n, q)?;
        let batch = run_trials(params, trials_per_probe, seed.child(probe_index));
        probe_index += 1;
        Ok(batch.success_fraction())
    })?;
    Ok(ThresholdEstimate {
        n,
        variable: SearchVariable::Product(ratio_policy),
        q_lo: bracket.q_lo,
        q_hi: bracket.q_hi,
        est_lo: bracket.est_lo,
        est_hi: bracket.est_hi,
        q_hat: (bracket.q_lo * bracket.q_hi).sqrt(),
        trials_per_probe,
        probes: bracket.probes,
        note: probe_note(trials_per_probe),
    })
}

/// The constant the normalized cycle threshold p̂·ln n approaches from the
/// known cycle-puzzle law, π²/6.
pub const CYCLE_THRESHOLD_CONSTANT: f64 =
    std::f64::consts::PI * std::f64::consts::PI / 6.0;

/// Threshold of the cycle puzzle: blue graph the n-cycle, red graph G(n,p),
/// bisecting p from p0 = 1/ln n. The normalized value p̂·ln n lands near
/// π²/6 up to substantial finite-size corrections.
pub fn cycle_puzzle_threshold(
    n: u32,
    trials_per_probe: u64,
    seed: SeedSpec,
) -> Result<ThresholdEstimate, ExperimentError> {
    if n < 1024 {
        return Err(ExperimentError::TooSmall { n, min: 1024 });
    }
    assert!(trials_per_probe >= 1);
    let p0 = 1.0 / (n as f64).ln();
    let mut probe_index = 0u64;
    let bracket = bracket_and_bisect(p0, 1.0, DEFAULT_REL_TOL, |p| {
        let probe_seed = seed.child(probe_index);
        probe_index += 1;
        let hits: u64 = (0..trials_per_probe)
            .into_par_iter()
            .map(|i| cycle_percolates_sampled(n, p, probe_seed.child(i)).percolates as u64)
            .sum();
        Ok(hits as f64 / trials_per_probe as f64)
    })?;
    Ok(ThresholdEstimate {
        n,
        variable: SearchVariable::CycleRedDensity,
        q_lo: bracket.q_lo,
        q_hi: bracket.q_hi,
        est_lo: bracket.est_lo,
        est_hi: bracket.est_hi,
        q_hat: (bracket.q_lo * bracket.q_hi).sqrt(),
        trials_per_probe,
        probes: bracket.probes,
        note: probe_note(trials_per_probe),
    })
}

#[derive(Debug, Clone, Copy, Serialize, Deserialize)]
pub struct ScalingRow {
    pub n: u32,
    pub q_hat: f64,
    /// n·q̂·ln n; flat across n when the threshold scales as 1/(n ln n).
    pub normalized: f64,
}

impl ScalingRow {
    pub fn new(n: u32, q_hat: f64) -> Self {
        let nf = n as f64;
        ScalingRow {
            n,
            q_hat,
            normalized: nf * q_hat * nf.ln(),
        }
    }
}

/// Max/min ratio of the normalized column; 1 means perfect n·ln n scaling.
pub fn normalized_spread(rows: &[ScalingRow]) -> f64 {
    let max = rows.iter().map(|r| r.normalized).fold(f64::MIN, f64::max);
    let min = rows.iter().map(|r| r.normalized).fold(f64::MAX, f64::min);
    max / min
}

/// Critical-product estimate per n (symmetric policy). Each n gets its own
/// seed stream, so rows do not change when the list is extended.
pub fn scaling_study(
    ns: &[u32],
    trials_per_probe: u64,
    rel_tol: f64,
    seed: SeedSpec,
) -> Result<Vec<ScalingRow>, ExperimentError> {
    ns.iter()
        .map(|&n| {
            let est = estimate_critical_product(
                n,
                RatioPolicy::Symmetric,
                trials_per_probe,
                rel_tol,
                seed.child(n as u64),
            )?;
            Ok(ScalingRow::new(n, est.q_hat))
        })
        .collect()
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct ClusterStats {
    pub params: ERParams,
    pub trials: u64,
    pub seed: SeedSpec,
    pub percolated: u64,
    /// (largest final cluster size, trial count), ascending in size.
    pub largest_hist: Vec<(u32, u64)>,
    /// (rounds to termination, trial count), ascending.
    pub rounds_hist: Vec<(usize, u64)>,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct StatsSummary {
    pub largest_min: u32,
    pub largest_p25: u32,
    pub largest_p50: u32,
    pub largest_p75: u32,
    pub largest_max: u32,
    pub rounds_min: usize,
    pub rounds_p50: usize,
    pub rounds_max: usize,
}

fn histogram<T: Ord + Copy>(values: impl Iterator<Item = T>) -> Vec<(T, u64)> {
    let mut map = BTreeMap::new();
    for v in values {
        *map.entry(v).or_insert(0u64) += 1;
    }
    map.into_iter().collect()
}

/// Nearest-rank quantile over a sorted histogram.
fn hist_quantile<T: Copy>(hist: &[(T, u64)], total: u64, q: f64) -> T {
    assert!((0.0..=1.0).contains(&q) && total > 0);
    let rank = ((q * total as f64).ceil() as u64).max(1);
    let mut cum = 0;
    for &(v, c) in hist {
        cum += c;
        if cum >= rank {
            return v;
        }
    }
    hist.last().expect("histogram of a nonempty batch").0
}

impl ClusterStats {
    pub fn from_batch(batch: &TrialBatch) -> ClusterStats {
        ClusterStats {
            params: batch.params,
            trials: batch.trials,
            seed: batch.seed,
            percolated: batch.successes(),
            largest_hist: histogram(batch.outcomes.iter().map(|o| o.largest_cluster)),
            rounds_hist: histogram(batch.outcomes.iter().map(|o| o.rounds)),
        }
    }

    pub fn largest_quantile(&self, q: f64) -> u32 {
        hist_quantile(&self.largest_hist, self.trials, q)
    }

    pub fn rounds_quantile(&self, q: f64) -> usize {
        hist_quantile(&self.rounds_hist, self.trials, q)
    }

    pub fn summary(&self) -> StatsSummary {
        StatsSummary {
            largest_min: self.largest_quantile(0.0),
            largest_p25: self.largest_quantile(0.25),
            largest_p50: self.largest_quantile(0.5),
            largest_p75: self.largest_quantile(0.75),
            largest_max: self.largest_quantile(1.0),
            rounds_min: self.rounds_quantile(0.0),
            rounds_p50: self.rounds_quantile(0.5),
            rounds_max: self.rounds_quantile(1.0),
        }
    }

    /// Fixed-header CSV: `stat,value,count` with stat in
    /// {percolated, largest_cluster, rounds}.
    pub fn to_csv(&self) -> String {
        let mut out = String::from("stat,value,count\n");
        out.push_str(&format!("percolated,0,{}\n", self.trials - self.percolated));
        out.push_str(&format!("percolated,1,{}\n", self.percolated));
        for &(v, c) in &self.largest_hist {
            out.push_str(&format!("largest_cluster,{v},{c}\n"));
        }
        for &(v, c) in &self.rounds_hist {
            out.push_str(&format!("rounds,{v},{c}\n"));
        }
        out
    }
}

pub fn cluster_stats(params: ERParams, trials: u64, seed: SeedSpec) -> ClusterStats {
    assert!(trials >= 1);
    ClusterStats::from_batch(&run_trials(params, trials, seed))
}
