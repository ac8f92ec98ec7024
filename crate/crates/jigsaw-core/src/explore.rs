//! Staged edge-exposure algorithms that certify percolation constructively.
//!
//! Stage 1 grows an internally spanned trial set one vertex at a time,
//! discarding the trial set between rounds. Stage 2 doubles a spanned seed
//! set using fresh second-sprinkle edges into the newest layer. Stage 3
//! checks that every remaining vertex attaches to the grown set by one red
//! and one blue third-sprinkle edge, which forces full percolation.
//!
//! Every potential edge query goes through a `RevealLedger` that hard-asserts
//! the query was not made before: the staged argument is only sound if each
//! (color, pair) is examined at most once, so a repeat is a defect, not a
//! recoverable condition.

use serde::Serialize;
use thiserror::Error;

use crate::graph::{Color, DoubleGraph, GraphError, Vertex};
use crate::random::{gen_sprinkles, regime_check, sprinkle_seeds, ERParams, ParamError,
    RegimeReport, SeedSpec};
use crate::solver::{is_internally_spanned, percolates, SpannedWitness};

#[derive(Debug, Error, PartialEq)]
pub enum ExploreError {
    #[error("staged exploration needs n >= 3, got {0}")]
    TooSmall(u32),
    #[error("doubling seed set has size {got}, need exactly {expected}")]
    SeedSetSize { got: usize, expected: usize },
    #[error("doubling seed set is not internally spanned in the given graph")]
    SeedSetNotSpanned,
    #[error("double graphs disagree on vertex count: {0} vs {1}")]
    MismatchedSizes(u32, u32),
    #[error(transparent)]
    Graph(#[from] GraphError),
    #[error(transparent)]
    Params(#[from] ParamError),
}

/// Tracks every (color, unordered pair) queried against one sprinkle and
/// asserts no pair is queried twice in the same color.
#[derive(Debug, Clone)]
pub struct RevealLedger {
    n: u32,
    bits: Vec<u64>,
    queries: u64,
}

impl RevealLedger {
    pub fn new(n: u32) -> Self {
        let pairs = crate::random::pair_count(n);
        let words = (2 * pairs).div_ceil(64) as usize;
        RevealLedger {
            n,
            bits: vec![0; words],
            queries: 0,
        }
    }

    fn bit_index(&self, color: Color, u: Vertex, v: Vertex) -> u64 {
        debug_assert!(u != v && u >= 1 && v >= 1 && u <= self.n && v <= self.n);
        let (a, b) = if u < v { (u, v) } else { (v, u) };
        let idx = (a as u64 - 1) * self.n as u64 - (a as u64 - 1) * a as u64 / 2
            + (b as u64 - a as u64 - 1);
        2 * idx + (color == Color::Blue) as u64
    }

    /// Record a query, asserting it is the first for this (color, pair).
    pub fn record(&mut self, color: Color, u: Vertex, v: Vertex) {
        let bit = self.bit_index(color, u, v);
        let (word, mask) = ((bit / 64) as usize, 1u64 << (bit % 64));
        assert!(
            self.bits[word] & mask == 0,
            "repeated reveal of {color:?} pair ({u},{v})"
        );
        self.bits[word] |= mask;
        self.queries += 1;
    }

    pub fn seen(&self, color: Color, u: Vertex, v: Vertex) -> bool {
        let bit = self.bit_index(color, u, v);
        self.bits[(bit / 64) as usize] & (1 << (bit % 64)) != 0
    }

    pub fn queries(&self) -> u64 {
        self.queries
    }
}

/// Step and round caps for the staged run, all in natural log.
///
/// t1 and the doubling target are ceilings (thresholds that must be
/// reached), k_cap and the per-step crowding cap are floors (resource
/// budgets), so the continuous inequalities they come from stay safe after
/// rounding. t0 splits the per-step success bounds by regime and is used
/// only by the bound evaluators; it is clamped into [1, t1] because the raw
/// expression rounds outside that range at tiny n or extreme c.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct ExplorationParams {
    pub n: u32,
    /// ceil(ln n / c), clamped into [1, t1].
    pub t0: usize,
    /// ceil((ln n)^{3/2}): trial-set size that ends stage 1 successfully.
    pub t1: usize,
    /// floor(n / (2 (ln n)^{3/2})): round budget for stage 1.
    pub k_cap: usize,
}

impl ExplorationParams {
    pub fn new(n: u32, implied_c: f64) -> Result<Self, ExploreError> {
        if n < 3 {
            return Err(ExploreError::TooSmall(n));
        }
        let ln_n = (n as f64).ln();
        let pow = ln_n.powf(1.5);
        let t1 = pow.ceil() as usize;
        let k_cap = (n as f64 / (2.0 * pow)).floor() as usize;
        if k_cap < 1 || t1 >= n as usize {
            return Err(ExploreError::TooSmall(n));
        }
        let t0_raw = if implied_c > 0.0 {
            (ln_n / implied_c).ceil()
        } else {
            f64::INFINITY
        };
        let t0 = if t0_raw.is_finite() {
            (t0_raw as usize).clamp(1, t1)
        } else {
            t1
        };
        Ok(ExplorationParams { n, t0, t1, k_cap })
    }
}

/// Per-step reveal outcome sizes: |R| vertices hit by a red edge to the
/// newest trial vertex, |B| of those with a blue edge into the trial set.
#[derive(Debug, Clone, Copy, Serialize)]
pub struct StepTrace {
    pub t: usize,
    pub r_size: usize,
    pub b_size: usize,
}

#[derive(Debug, Clone, Serialize)]
pub struct RoundTrace {
    pub k: usize,
    pub steps: Vec<StepTrace>,
    pub succeeded: bool,
}

/// Outcome of a full stage-1 run.
#[derive(Debug, Clone, Serialize)]
pub struct OneByOneRun {
    /// Trial set of the successful round (size t1 + 1), if any.
    pub witness: Option<SpannedWitness>,
    /// Trial vertices of the successful round in insertion order; every
    /// prefix is internally spanned, since each vertex arrived on one red
    /// and one blue edge into its predecessors.
    pub trial_order: Vec<Vertex>,
    pub rounds: Vec<RoundTrace>,
    /// Steps whose red hit count exceeded the crowding cap floor(n/(4t)).
    /// Diagnostic only; the staged analysis treats such rounds as failed
    /// but the run itself keeps going.
    pub crowding_violations: u64,
    #[serde(skip)]
    pub ledger: RevealLedger,
}

impl OneByOneRun {
    pub fn succeeded(&self) -> bool {
        self.witness.is_some()
    }
}

/// Vertex status during one stage-1 round. Trial, round-active, and
/// round-discarded sets partition the round's starting active set.
#[derive(Clone, Copy, PartialEq)]
enum Status {
    Active,
    Trial,
    RoundDiscard,
    PermDiscard,
}

/// Stage 1: grow a trial set one vertex at a time.
///
/// Each step reveals all red edges from the active set to the newest trial
/// vertex, then all blue edges from the red hits to the whole trial set.
/// The smallest-labelled blue hit joins the trial set; the other red hits
/// are set aside for the round. A step with no blue hit ends the round:
/// the trial set is discarded permanently, the set-aside vertices return
/// to play. Success stops the run once the trial set passes t1 vertices;
/// failure stops it after k_cap rounds.
///
/// `_tie_seed` is reserved for alternative tie-break rules; the default
/// smallest-label rule is deterministic and ignores it.
pub fn one_by_one(
    g1: &DoubleGraph,
    params: &ExplorationParams,
    _tie_seed: SeedSpec,
) -> OneByOneRun {
    let n = params.n;
    assert_eq!(g1.n(), n, "graph and params disagree on n");
    let red = g1.red();
    let blue = g1.blue();
    let mut ledger = RevealLedger::new(n);
    let mut status = vec![Status::Active; n as usize + 1];
    let mut perm_active = n as usize;
    let mut rounds = Vec::new();
    let mut crowding_violations = 0u64;

    for k in 1..=params.k_cap {
        // round entry size bound: at most t1 vertices leave play per round
        assert!(
            2 * perm_active >= n as usize,
            "active set dropped below n/2 at round {k}"
        );
        let mut active: Vec<Vertex> =
            (1..=n).filter(|&v| status[v as usize] == Status::Active).collect();
        let first = active[0];
        status[first as usize] = Status::Trial;
        active.remove(0);
        let mut trial: Vec<Vertex> = vec![first];
        let mut steps = Vec::new();
        let mut succeeded = false;

        for t in 1..=params.t1 {
            debug_assert_eq!(trial.len(), t);
            let newest = trial[t - 1];
            // red reveals: active set against the newest trial vertex
            let mut red_hits: Vec<Vertex> = Vec::new();
            for &x in &active {
                ledger.record(Color::Red, x, newest);
                if red.has_edge(x, newest) {
                    red_hits.push(x);
                }
            }
            if red_hits.len() > n as usize / (4 * t) {
                crowding_violations += 1;
            }
            // blue reveals: every red hit against the whole trial set
            let mut chosen: Option<Vertex> = None;
            let mut b_size = 0usize;
            for &x in &red_hits {
                let mut hit = false;
                for &y in &trial {
                    ledger.record(Color::Blue, x, y);
                    if blue.has_edge(x, y) {
                        hit = true;
                    }
                }
                if hit {
                    b_size += 1;
                    if chosen.is_none() {
                        chosen = Some(x); // red_hits ascending: smallest wins
                    }
                }
            }
            steps.push(StepTrace { t, r_size: red_hits.len(), b_size });
            let Some(next) = chosen else { break };
            for &x in &red_hits {
                status[x as usize] = Status::RoundDiscard;
            }
            status[next as usize] = Status::Trial;
            trial.push(next);
            active.retain(|&x| status[x as usize] == Status::Active);
            if t >= params.t1 {
                succeeded = true;
                break;
            }
        }

        rounds.push(RoundTrace { k, steps, succeeded });
        // the trial set leaves play permanently; round discards return
        perm_active -= trial.len();
        for v in 1..=n as usize {
            status[v] = match status[v] {
                Status::Trial | Status::PermDiscard => Status::PermDiscard,
                _ => Status::Active,
            };
        }
        if succeeded {
            return OneByOneRun {
                witness: Some(SpannedWitness {
                    size: trial.len(),
                    vertices: {
                        let mut v = trial.clone();
                        v.sort_unstable();
                        v
                    },
                }),
                trial_order: trial,
                rounds,
                crowding_violations,
                ledger,
            };
        }
    }

    OneByOneRun {
        witness: None,
        trial_order: Vec::new(),
        rounds,
        crowding_violations,
        ledger,
    }
}

#[derive(Debug, Clone, Copy, Serialize)]
pub struct DoublingStepTrace {
    pub t: usize,
    /// Trial-set size entering the step (2^t times the seed size).
    pub x_t: u64,
    pub b_size: usize,
    pub doubled: bool,
}

#[derive(Debug, Clone, Serialize)]
pub struct DoublingRun {
    /// Grown set with 16·|X| ≥ n on success, sorted.
    pub final_set: Option<Vec<Vertex>>,
    pub steps: Vec<DoublingStepTrace>,
    #[serde(skip)]
    pub ledger: RevealLedger,
}

impl DoublingRun {
    pub fn succeeded(&self) -> bool {
        self.final_set.is_some()
    }
}

/// Stage 2: double a spanned seed set until it covers n/16 vertices.
///
/// `g12` is the graph the trial set must stay internally spanned in (the
/// union of the first two sprinkles); `g2_only` supplies the fresh edges
/// revealed during the run (the second sprinkle alone). Step t reveals all
/// second-sprinkle edges of both colors between the active set and the
/// layer added at step t-1 (the whole seed set at t=0); active vertices
/// with at least one red and one blue edge into that layer are candidates,
/// and the x_t smallest join as the next layer. The step fails unless
/// candidates strictly outnumber the trial set.
///
/// The seed set must have exactly ceil((ln n)^{3/2}) vertices and be
/// internally spanned in `g12`; each doubling step preserves spanning
/// because every new vertex attaches to the previous layer in both colors.
pub fn doubling(
    g12: &DoubleGraph,
    g2_only: &DoubleGraph,
    seed_set: &[Vertex],
) -> Result<DoublingRun, ExploreError> {
    let n = g12.n();
    if g2_only.n() != n {
        return Err(ExploreError::MismatchedSizes(n, g2_only.n()));
    }
    let params = ExplorationParams::new(n, 1.0)?;
    if seed_set.len() != params.t1 {
        return Err(ExploreError::SeedSetSize {
            got: seed_set.len(),
            expected: params.t1,
        });
    }
    if !is_internally_spanned(g12, seed_set)? {
        return Err(ExploreError::SeedSetNotSpanned);
    }

    let mut ledger = RevealLedger::new(n);
    let mut in_trial = vec![false; n as usize + 1];
    for &v in seed_set {
        in_trial[v as usize] = true;
    }
    let mut layer: Vec<Vertex> = {
        let mut l = seed_set.to_vec();
        l.sort_unstable();
        l
    };
    let mut trial_size = seed_set.len() as u64;
    let mut steps = Vec::new();

    if 16 * trial_size >= n as u64 {
        // the seed set already covers n/16; nothing to grow
        return Ok(DoublingRun {
            final_set: Some(layer),
            steps,
            ledger,
        });
    }

    for t in 0.. {
        debug_assert_eq!(trial_size, (seed_set.len() as u64) << t);
        let (red, blue) = (g2_only.red(), g2_only.blue());
        let mut candidates: Vec<Vertex> = Vec::new();
        for v in 1..=n {
            if in_trial[v as usize] {
                continue;
            }
            let (mut has_red, mut has_blue) = (false, false);
            for &u in &layer {
                ledger.record(Color::Red, v, u);
                if red.has_edge(v, u) {
                    has_red = true;
                }
                ledger.record(Color::Blue, v, u);
                if blue.has_edge(v, u) {
                    has_blue = true;
                }
            }
            if has_red && has_blue {
                candidates.push(v); // ascending scan keeps this sorted
            }
        }
        let doubled = candidates.len() as u64 > trial_size;
        steps.push(DoublingStepTrace {
            t,
            x_t: trial_size,
            b_size: candidates.len(),
            doubled,
        });
        if !doubled {
            return Ok(DoublingRun {
                final_set: None,
                steps,
                ledger,
            });
        }
        candidates.truncate(trial_size as usize);
        for &v in &candidates {
            in_trial[v as usize] = true;
        }
        layer = candidates;
        trial_size *= 2;
        if 16 * trial_size >= n as u64 {
            let final_set: Vec<Vertex> =
                (1..=n).filter(|&v| in_trial[v as usize]).collect();
            return Ok(DoublingRun {
                final_set: Some(final_set),
                steps,
                ledger,
            });
        }
    }
    unreachable!("doubling terminates: the trial set grows every step");
}

/// Stage 3: does every vertex outside `x_set` have at least one red and one
/// blue edge of `g3` into `x_set`? When it does, the outside vertices all
/// merge into the spanned set in one further percolation round.
pub fn third_sprinkle_completion(x_set: &[Vertex], g3: &DoubleGraph) -> bool {
    let n = g3.n();
    assert!(
        16 * x_set.len() as u64 >= n as u64,
        "completion stage expects a set of size at least n/16"
    );
    let mut inside = vec![false; n as usize + 1];
    for &v in x_set {
        assert!(v >= 1 && v <= n, "vertex {v} out of range");
        inside[v as usize] = true;
    }
    for v in 1..=n {
        if inside[v as usize] {
            continue;
        }
        let red_ok = g3.red().neighbors(v).iter().any(|&u| inside[u as usize]);
        let blue_ok = g3.blue().neighbors(v).iter().any(|&u| inside[u as usize]);
        if !(red_ok && blue_ok) {
            return false;
        }
    }
    true
}

/// Full three-stage record: what each stage produced, the seeds that
/// reproduce the sprinkles, and the solver's verdict on the final union.
#[derive(Debug, Clone, Serialize)]
pub struct PercolationCertificate {
    pub params: ERParams,
    pub seed: SeedSpec,
    pub sprinkle_seeds: [SeedSpec; 3],
    pub regime: RegimeReport,
    /// Stage-1 witness (sorted), if that stage succeeded.
    pub stage1_witness: Option<Vec<Vertex>>,
    /// Stage-2 grown set covering n/16, if reached and successful.
    pub stage2_set: Option<Vec<Vertex>>,
    /// Stage-3 completion verdict, if reached.
    pub stage3_complete: Option<bool>,
    /// Exact solver verdict on the union of all three sprinkles; filled on
    /// full success, where it is guaranteed true.
    pub union_percolates: Option<bool>,
    pub stage1_queries: u64,
    pub stage2_queries: u64,
}

impl PercolationCertificate {
    pub fn success(&self) -> bool {
        self.union_percolates == Some(true)
    }
}

/// Reveal-level record behind a certificate: per-round step sizes from the
/// one-by-one stage and per-step layer sizes from the doubling stage.
#[derive(Debug, Clone, Serialize)]
pub struct ExploreTrace {
    pub stage1_rounds: Vec<RoundTrace>,
    pub stage1_crowding_violations: u64,
    /// Empty when stage 1 already failed.
    pub stage2_steps: Vec<DoublingStepTrace>,
}

/// Run the full three-stage certificate: sample three sprinkles, grow a
/// spanned seed set from the first, double it on the second, and complete
/// on the third. Stage failures are recorded in the certificate; only
/// malformed inputs error. The regime report is advisory: out-of-regime
/// parameters run anyway (degenerate inputs are how the failure paths are
/// exercised), they are just unlikely to succeed.
pub fn run_three_stage(
    params: ERParams,
    seed: SeedSpec,
) -> Result<PercolationCertificate, ExploreError> {
    run_three_stage_traced(params, seed).map(|(cert, _)| cert)
}

/// `run_three_stage` plus the reveal-level trace that produced the verdicts.
pub fn run_three_stage_traced(
    params: ERParams,
    seed: SeedSpec,
) -> Result<(PercolationCertificate, ExploreTrace), ExploreError> {
    let regime = regime_check(params)?;
    let eparams = ExplorationParams::new(params.n, regime.implied_c.max(0.0))?;
    let sprinkles = gen_sprinkles(params, seed);

    let mut cert = PercolationCertificate {
        params,
        seed,
        sprinkle_seeds: sprinkle_seeds(seed),
        regime,
        stage1_witness: None,
        stage2_set: None,
        stage3_complete: None,
        union_percolates: None,
        stage1_queries: 0,
        stage2_queries: 0,
    };

    let stage1 = one_by_one(&sprinkles.draws[0], &eparams, seed.child(2));
    cert.stage1_queries = stage1.ledger.queries();
    let mut trace = ExploreTrace {
        stage1_rounds: stage1.rounds,
        stage1_crowding_violations: stage1.crowding_violations,
        stage2_steps: Vec::new(),
    };
    if stage1.witness.is_none() {
        return Ok((cert, trace));
    }
    cert.stage1_witness = stage1.witness.as_ref().map(|w| w.vertices.clone());

    // the first t1 trial vertices form a spanned set of exactly the size
    // the doubling stage wants; prefixes of the trial order stay spanned
    let mut seed_set: Vec<Vertex> = stage1.trial_order[..eparams.t1].to_vec();
    seed_set.sort_unstable();
    let stage2 = doubling(sprinkles.cumulative(1), &sprinkles.draws[1], &seed_set)?;
    cert.stage2_queries = stage2.ledger.queries();
    trace.stage2_steps = stage2.steps;
    let Some(grown) = stage2.final_set else {
        return Ok((cert, trace));
    };

    let complete = third_sprinkle_completion(&grown, &sprinkles.draws[2]);
    cert.stage2_set = Some(grown);
    cert.stage3_complete = Some(complete);
    if complete {
        let did = percolates(sprinkles.cumulative(2));
        assert!(did, "three successful stages force percolation");
        cert.union_percolates = Some(did);
    }
    Ok((cert, trace))
}
