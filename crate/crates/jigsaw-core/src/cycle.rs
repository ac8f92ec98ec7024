//! Specialized percolation dynamics for the cycle puzzle: blue graph fixed
//! to the n-cycle, red graph Erdős-Rényi.
//!
//! With the blue graph a cycle, every cluster stays a contiguous arc: merges
//! need a blue edge between the clusters, the only blue edges run between
//! cycle neighbors, so only adjacent arcs can merge and their union is again
//! an arc. A round therefore reduces to one check per arc boundary ("is
//! there at least one red edge between the two adjacent arcs?"), followed by
//! merging maximal runs of positive checks.
//!
//! That makes a lazy red graph exact: a boundary check is a Bernoulli draw
//! on the not-yet-revealed cross pairs only. A negative check resolves all
//! current cross pairs of that boundary as absent (recorded per boundary); a
//! positive check merges the arcs, burying its undetermined pairs inside one
//! cluster where no later check can touch them, since checks only concern
//! pairs between distinct arcs and arcs only grow. So the sampled process
//! has exactly the G(n,p) percolation distribution without materializing
//! the ~pn²/2 red edges.
//!
//! Rounds are driven event-style: a boundary is rechecked only when one of
//! its flanking arcs changed, i.e. when an adjacent boundary was removed in
//! the previous round. For an unchanged boundary the last verdict stands
//! (all its cross pairs are revealed absent, fresh count zero), so skipping
//! it draws nothing and alters no outcome; it only avoids the quadratic
//! cost of re-scanning stalled boundaries while a few survivor fronts crawl
//! around the ring.

use std::collections::{BTreeMap, BTreeSet};

use rand::Rng;

use crate::graph::Graph;
use crate::random::SeedSpec;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct CycleOutcome {
    pub percolates: bool,
    /// Rounds that performed at least one merge (solver convention).
    pub rounds: usize,
    pub final_arcs: usize,
}

/// Arc partition of the cycle as its set of active boundaries. The boundary
/// at position b sits between vertex b and vertex b+1 (position n wraps to
/// vertex 1), and the arc "ending at" an active position b is the vertex
/// interval from the previous active position (exclusive) to b (inclusive).
pub struct ArcLayout {
    n: u32,
    set: BTreeSet<u32>,
    /// Cross pairs already revealed absent, indexed by position - 1.
    absent: Vec<u64>,
}

impl ArcLayout {
    fn new(n: u32) -> Self {
        ArcLayout {
            n,
            set: (1..=n).collect(),
            absent: vec![0; n as usize],
        }
    }

    pub fn arc_count(&self) -> usize {
        self.set.len()
    }

    /// Active boundary strictly before position b, wrapping.
    fn pred(&self, b: u32) -> u32 {
        match self.set.range(..b).next_back() {
            Some(&p) => p,
            None => *self.set.iter().next_back().expect("nonempty layout"),
        }
    }

    /// Active boundary strictly after position b, wrapping.
    fn succ(&self, b: u32) -> u32 {
        match self.set.range(b + 1..).next() {
            Some(&s) => s,
            None => *self.set.iter().next().expect("nonempty layout"),
        }
    }

    /// The arc containing vertex v, identified by its ending boundary: the
    /// first active position at or after v, wrapping.
    pub fn arc_of(&self, v: u32) -> u32 {
        debug_assert!(v >= 1 && v <= self.n);
        match self.set.range(v..).next() {
            Some(&b) => b,
            None => *self.set.iter().next().expect("nonempty layout"),
        }
    }

    /// Length of the arc ending at active position b.
    pub fn arc_len(&self, b: u32) -> u64 {
        let lo = self.pred(b);
        if b > lo {
            (b - lo) as u64
        } else {
            (b + self.n - lo) as u64
        }
    }

    fn absent_at(&self, b: u32) -> u64 {
        self.absent[(b - 1) as usize]
    }

    /// Cross pairs between the two arcs flanking boundary b.
    fn cross_pairs(&self, b: u32) -> u64 {
        self.arc_len(b) * self.arc_len(self.succ(b))
    }
}

/// Drive rounds until no boundary check succeeds or one arc remains. The
/// sweep callback answers the round's checks, given as (boundary position,
/// fresh cross pairs) in ascending position order; with two arcs left the
/// single entry is their joint check over both boundaries.
fn run_rounds(n: u32, mut sweep: impl FnMut(&ArcLayout, &[(u32, u64)]) -> Vec<bool>) -> CycleOutcome {
    assert!(n >= 3, "cycle needs at least 3 vertices");
    let mut layout = ArcLayout::new(n);
    let mut rounds = 0usize;
    let mut due: Vec<u32> = (1..=n).collect();
    loop {
        let m = layout.arc_count();
        if m <= 1 {
            return CycleOutcome {
                percolates: true,
                rounds,
                final_arcs: 1,
            };
        }
        let checks: Vec<(u32, u64)> = if m == 2 {
            let mut it = layout.set.iter();
            let (&b0, &b1) = (it.next().unwrap(), it.next().unwrap());
            let total = layout.arc_len(b0) * layout.arc_len(b1);
            let fresh = total - layout.absent_at(b0) - layout.absent_at(b1);
            if fresh == 0 {
                return CycleOutcome {
                    percolates: false,
                    rounds,
                    final_arcs: 2,
                };
            }
            vec![(b0, fresh)]
        } else {
            due.iter()
                .map(|&b| (b, layout.cross_pairs(b) - layout.absent_at(b)))
                .collect()
        };
        if checks.is_empty() {
            return CycleOutcome {
                percolates: false,
                rounds,
                final_arcs: m,
            };
        }
        let yes = sweep(&layout, &checks);
        debug_assert_eq!(yes.len(), checks.len());
        if yes.iter().all(|&v| !v) {
            return CycleOutcome {
                percolates: false,
                rounds,
                final_arcs: m,
            };
        }
        rounds += 1;
        if m == 2 {
            // joint success merges the last two arcs
            layout.set.clear();
            continue;
        }
        let mut removed = Vec::new();
        for (k, &(b, fresh)) in checks.iter().enumerate() {
            if yes[k] {
                removed.push(b);
            } else {
                // failed check resolves every remaining cross pair
                layout.absent[(b - 1) as usize] += fresh;
            }
        }
        for &b in &removed {
            layout.set.remove(&b);
        }
        if layout.set.is_empty() {
            continue; // every boundary fired; single cluster
        }
        // recheck only boundaries whose flanking arc just grew: the
        // surviving neighbors of each removed position
        let mut next_due = BTreeSet::new();
        for &b in &removed {
            next_due.insert(layout.pred(b));
            next_due.insert(layout.arc_of(b));
        }
        due = next_due.into_iter().collect();
    }
}

/// Percolation outcome of the cycle puzzle with a lazily sampled red
/// G(n,p), exact in distribution. One uniform draw per checked boundary
/// with fresh pairs, in ascending position order, so outcomes are
/// reproducible from the seed alone.
pub fn cycle_percolates_sampled(n: u32, p: f64, seed: SeedSpec) -> CycleOutcome {
    assert!((0.0..=1.0).contains(&p), "probability out of range");
    let mut rng = seed.rng();
    let ln_q = (-p).ln_1p(); // ln(1-p)
    run_rounds(n, |_, checks| {
        checks
            .iter()
            .map(|&(_, fresh)| {
                if fresh == 0 {
                    return false;
                }
                let miss = (fresh as f64 * ln_q).exp(); // (1-p)^fresh
                rng.random::<f64>() >= miss
            })
            .collect()
    })
}

/// Same dynamics against a materialized red graph. Used to cross-validate
/// the sampled version: on (red, n-cycle) double graphs this must agree
/// with the general solver exactly.
pub fn cycle_percolates_exact(red: &Graph) -> CycleOutcome {
    run_rounds(red.n(), |layout, checks| {
        let m = layout.arc_count();
        let idx: BTreeMap<u32, usize> =
            checks.iter().enumerate().map(|(k, &(b, _))| (b, k)).collect();
        let mut yes = vec![false; checks.len()];
        for &(u, v) in red.edges() {
            let (a, b) = (layout.arc_of(u), layout.arc_of(v));
            if a == b {
                continue;
            }
            if m == 2 {
                yes[0] = true;
            } else if layout.succ(a) == b {
                if let Some(&k) = idx.get(&a) {
                    yes[k] = true;
                }
            } else if layout.succ(b) == a {
                if let Some(&k) = idx.get(&b) {
                    yes[k] = true;
                }
            }
        }
        yes
    })
}
