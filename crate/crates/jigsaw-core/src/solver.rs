//! Exact solvers for the jigsaw percolation dynamics.
//!
//! One round: build the auxiliary graph on current clusters whose edges are
//! the cluster pairs joined by at least one red and at least one blue edge,
//! then replace every connected component of that auxiliary graph by a
//! single merged cluster. The process stops when the auxiliary graph has no
//! edges or a single cluster remains; the double graph is solved
//! (percolates) when one cluster covers all vertices.
//!
//! `solve_reference` executes the round definition literally (scan all
//! cluster pairs against all edges). `solve_fast` maintains surviving
//! cross-cluster edges bucketed by canonical cluster-root pair per color and
//! intersects the two key sets, rebuilding buckets only for clusters touched
//! by a merge. Both produce identical results; the reference solver is the
//! oracle in tests.

use std::collections::{HashMap, HashSet, VecDeque};

use serde::Serialize;
use thiserror::Error;

use crate::graph::{induce, DoubleGraph, Graph, GraphError, Partition, Vertex};

#[derive(Debug, Error, PartialEq, Eq)]
pub enum SolverError {
    #[error("exhaustive scan limited to n <= {guard}, got n = {n}")]
    TooLargeForExhaustive { n: u32, guard: u32 },
    #[error(transparent)]
    Graph(#[from] GraphError),
}

/// Clusters merged in one round: `clusters` holds the canonical ids
/// (smallest member vertex) of the constituents of one auxiliary-graph
/// component, sorted; `links` is a spanning tree of that component in
/// traversal order, each pair oriented (already-walked cluster, new
/// cluster). Every link is certified by one red and one blue cross edge.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct MergeRecord {
    pub round: usize,
    pub clusters: Vec<u32>,
    pub links: Vec<(u32, u32)>,
}

#[derive(Debug, Clone)]
pub struct SolveResult {
    pub partition: Partition,
    /// Number of rounds that performed at least one merge.
    pub rounds: usize,
    /// Cluster count before any round and after each merging round.
    pub cluster_counts: Vec<usize>,
    pub merge_trace: Vec<MergeRecord>,
}

impl SolveResult {
    pub fn percolates(&self) -> bool {
        self.partition.cluster_count() == 1
    }

    pub fn final_blocks(&self) -> Vec<Vec<Vertex>> {
        self.partition.clone().blocks()
    }

    pub fn report(&self) -> SolveReport {
        SolveReport {
            percolates: self.percolates(),
            rounds: self.rounds,
            cluster_counts: self.cluster_counts.clone(),
            final_blocks: self.final_blocks(),
            merge_trace: self.merge_trace.clone(),
        }
    }
}

/// Serialization view of a solve: this struct is the documented JSON shape.
#[derive(Debug, Clone, Serialize)]
pub struct SolveReport {
    pub percolates: bool,
    pub rounds: usize,
    pub cluster_counts: Vec<usize>,
    pub final_blocks: Vec<Vec<Vertex>>,
    pub merge_trace: Vec<MergeRecord>,
}

/// An internally spanned vertex set: the induced double graph percolates.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct SpannedWitness {
    pub vertices: Vec<Vertex>,
    pub size: usize,
}

impl SpannedWitness {
    fn new(mut vertices: Vec<Vertex>) -> Self {
        vertices.sort_unstable();
        let size = vertices.len();
        SpannedWitness { vertices, size }
    }
}

struct GammaComponent {
    clusters: Vec<u32>,
    links: Vec<(u32, u32)>,
}

/// Components of the auxiliary graph restricted to nodes with incident
/// edges. Deterministic: traversal starts at the smallest id of each
/// component and explores sorted adjacency breadth-first, so both solvers
/// produce identical records for the same auxiliary edge set.
fn components_with_trees(nodes: &[u32], edges: &[(u32, u32)]) -> Vec<GammaComponent> {
    let mut adj: HashMap<u32, Vec<u32>> = HashMap::new();
    for &(a, b) in edges {
        adj.entry(a).or_default().push(b);
        adj.entry(b).or_default().push(a);
    }
    for list in adj.values_mut() {
        list.sort_unstable();
        list.dedup();
    }
    let mut seen: HashSet<u32> = HashSet::new();
    let mut out = Vec::new();
    for &start in nodes {
        if !adj.contains_key(&start) || seen.contains(&start) {
            continue;
        }
        seen.insert(start);
        let mut queue = VecDeque::from([start]);
        let mut clusters = Vec::new();
        let mut links = Vec::new();
        while let Some(x) = queue.pop_front() {
            clusters.push(x);
            for &y in &adj[&x] {
                if seen.insert(y) {
                    links.push((x, y));
                    queue.push_back(y);
                }
            }
        }
        clusters.sort_unstable();
        out.push(GammaComponent { clusters, links });
    }
    out
}

/// Literal implementation of the round dynamics: every round scans all
/// cluster pairs and, per pair, all edges of each color. Quadratic in the
/// cluster count; intended as the oracle for `solve_fast`.
pub fn solve_reference(dg: &DoubleGraph) -> SolveResult {
    let n = dg.n();
    let mut clusters: Vec<Vec<Vertex>> = (1..=n).map(|v| vec![v]).collect();
    let mut parts = Partition::singletons(n);
    let mut cluster_counts = vec![n as usize];
    let mut merge_trace = Vec::new();
    let mut round = 0usize;

    while clusters.len() > 1 {
        let mut cl = vec![u32::MAX; n as usize + 1];
        for (i, c) in clusters.iter().enumerate() {
            for &v in c {
                cl[v as usize] = i as u32;
            }
        }
        let ids: Vec<u32> = clusters.iter().map(|c| c[0]).collect();
        let crosses = |g: &Graph, i: u32, j: u32| {
            g.edges().iter().any(|&(u, v)| {
                let (a, b) = (cl[u as usize], cl[v as usize]);
                (a == i && b == j) || (a == j && b == i)
            })
        };
        let mut gamma: Vec<(u32, u32)> = Vec::new();
        for i in 0..clusters.len() {
            for j in i + 1..clusters.len() {
                if crosses(dg.red(), i as u32, j as u32) && crosses(dg.blue(), i as u32, j as u32)
                {
                    gamma.push((ids[i], ids[j]));
                }
            }
        }
        if gamma.is_empty() {
            break;
        }
        let comps = components_with_trees(&ids, &gamma);
        let mut merged_indices: HashSet<u32> = HashSet::new();
        let mut next: Vec<Vec<Vertex>> = Vec::new();
        let id_to_index: HashMap<u32, u32> = ids
            .iter()
            .enumerate()
            .map(|(i, &id)| (id, i as u32))
            .collect();
        for comp in &comps {
            let mut members = Vec::new();
            for &id in &comp.clusters {
                let idx = id_to_index[&id];
                merged_indices.insert(idx);
                members.extend_from_slice(&clusters[idx as usize]);
                parts.union(comp.clusters[0], id);
            }
            members.sort_unstable();
            next.push(members);
            merge_trace.push(MergeRecord {
                round,
                clusters: comp.clusters.clone(),
                links: comp.links.clone(),
            });
        }
        for (i, c) in clusters.iter().enumerate() {
            if !merged_indices.contains(&(i as u32)) {
                next.push(c.clone());
            }
        }
        next.sort_by_key(|c| c[0]);
        clusters = next;
        cluster_counts.push(clusters.len());
        round += 1;
    }

    SolveResult {
        partition: parts,
        rounds: round,
        cluster_counts,
        merge_trace,
    }
}

/// Surviving cross-cluster edges of one color, bucketed by the canonical
/// (ordered) pair of current cluster roots.
struct ColorBuckets {
    endpoints: Vec<(Vertex, Vertex)>,
    alive: Vec<bool>,
    /// Round stamp; an edge index is processed at most once per round even
    /// when reachable from both endpoint roots.
    stamp: Vec<u32>,
    /// Edge indices incident to a cluster root. Entries can be stale (dead
    /// or re-rooted); they are skipped or compacted when the root's cluster
    /// next merges.
    incident: HashMap<u32, Vec<u32>>,
    pair_count: HashMap<(u32, u32), u32>,
}

impl ColorBuckets {
    fn new(g: &Graph) -> Self {
        let m = g.edge_count();
        let mut incident: HashMap<u32, Vec<u32>> = HashMap::new();
        let mut pair_count = HashMap::with_capacity(m);
        let endpoints = g.edges().to_vec();
        for (idx, &(u, v)) in endpoints.iter().enumerate() {
            incident.entry(u).or_default().push(idx as u32);
            incident.entry(v).or_default().push(idx as u32);
            pair_count.insert((u, v), 1u32);
        }
        ColorBuckets {
            alive: vec![true; m],
            stamp: vec![0; m],
            endpoints,
            incident,
            pair_count,
        }
    }

    /// Detaches all live edges hanging off `root`, removing them from the
    /// bucket map under their current (pre-merge) keys. Returns the indices
    /// for re-keying after the merge.
    fn detach(&mut self, root: u32, round_stamp: u32, parts: &mut Partition, moved: &mut Vec<u32>) {
        let Some(list) = self.incident.remove(&root) else {
            return;
        };
        for idx in list {
            let i = idx as usize;
            if !self.alive[i] || self.stamp[i] == round_stamp {
                continue;
            }
            self.stamp[i] = round_stamp;
            let (u, v) = self.endpoints[i];
            let (ru, rv) = (parts.find(u), parts.find(v));
            debug_assert_ne!(ru, rv, "live bucket edge must be cross-cluster");
            let key = (ru.min(rv), ru.max(rv));
            let cnt = self
                .pair_count
                .get_mut(&key)
                .expect("live edge has a bucket");
            *cnt -= 1;
            if *cnt == 0 {
                self.pair_count.remove(&key);
            }
            moved.push(idx);
        }
    }

    /// Re-keys a detached edge under the post-merge roots; drops it if it
    /// became intra-cluster. Returns the new key if the edge survived.
    fn reattach(&mut self, idx: u32, parts: &mut Partition) -> Option<(u32, u32)> {
        let i = idx as usize;
        let (u, v) = self.endpoints[i];
        let (ru, rv) = (parts.find(u), parts.find(v));
        if ru == rv {
            self.alive[i] = false;
            return None;
        }
        let key = (ru.min(rv), ru.max(rv));
        *self.pair_count.entry(key).or_insert(0) += 1;
        self.incident.entry(ru).or_default().push(idx);
        self.incident.entry(rv).or_default().push(idx);
        Some(key)
    }
}

/// Bucket-intersection implementation of the round dynamics. Identical
/// output to `solve_reference` on every input.
pub fn solve_fast(dg: &DoubleGraph) -> SolveResult {
    let n = dg.n();
    let mut parts = Partition::singletons(n);
    let mut min_vertex: Vec<u32> = (0..=n).collect();
    let mut red = ColorBuckets::new(dg.red());
    let mut blue = ColorBuckets::new(dg.blue());
    let mut cluster_counts = vec![n as usize];
    let mut merge_trace = Vec::new();
    let mut round = 0usize;

    // Initial auxiliary edges: vertex pairs carrying both colors. Both edge
    // lists are sorted, so a two-pointer intersection is enough.
    let mut gamma: Vec<(u32, u32)> = Vec::new();
    {
        let (re, be) = (dg.red().edges(), dg.blue().edges());
        let (mut i, mut j) = (0, 0);
        while i < re.len() && j < be.len() {
            match re[i].cmp(&be[j]) {
                std::cmp::Ordering::Less => i += 1,
                std::cmp::Ordering::Greater => j += 1,
                std::cmp::Ordering::Equal => {
                    gamma.push(re[i]);
                    i += 1;
                    j += 1;
                }
            }
        }
    }

    while !gamma.is_empty() && parts.cluster_count() > 1 {
        let round_stamp = round as u32 + 1;
        let nodes: Vec<u32> = {
            let mut v: Vec<u32> = gamma.iter().flat_map(|&(a, b)| [a, b]).collect();
            v.sort_unstable();
            v.dedup();
            v
        };
        let comps = components_with_trees(&nodes, &gamma);

        // Detach affected buckets before any union so pre-merge keys are
        // still computable.
        let mut moved_red = Vec::new();
        let mut moved_blue = Vec::new();
        for comp in &comps {
            for &id in &comp.clusters {
                let root = parts.find(id);
                red.detach(root, round_stamp, &mut parts, &mut moved_red);
                blue.detach(root, round_stamp, &mut parts, &mut moved_blue);
            }
        }

        for comp in &comps {
            for &id in &comp.clusters[1..] {
                parts.union(comp.clusters[0], id);
            }
            let new_root = parts.find(comp.clusters[0]);
            min_vertex[new_root as usize] = comp.clusters[0];
            merge_trace.push(MergeRecord {
                round,
                clusters: comp.clusters.clone(),
                links: comp.links.clone(),
            });
        }

        // Re-key and collect next round's auxiliary edges: a key becomes an
        // auxiliary edge when present in both colors. Blue re-keys second,
        // so checking the opposite map at insertion sees every pairing.
        let mut candidates: Vec<(u32, u32)> = Vec::new();
        for idx in moved_red {
            if let Some(key) = red.reattach(idx, &mut parts) {
                if blue.pair_count.contains_key(&key) {
                    candidates.push(key);
                }
            }
        }
        for idx in moved_blue {
            if let Some(key) = blue.reattach(idx, &mut parts) {
                if red.pair_count.contains_key(&key) {
                    candidates.push(key);
                }
            }
        }
        candidates.sort_unstable();
        candidates.dedup();
        // Translate root pairs to canonical cluster ids for the next round.
        gamma = candidates
            .into_iter()
            .map(|(ra, rb)| {
                let (a, b) = (min_vertex[ra as usize], min_vertex[rb as usize]);
                (a.min(b), a.max(b))
            })
            .collect();
        gamma.sort_unstable();

        cluster_counts.push(parts.cluster_count());
        round += 1;
    }

    SolveResult {
        partition: parts,
        rounds: round,
        cluster_counts,
        merge_trace,
    }
}

pub fn percolates(dg: &DoubleGraph) -> bool {
    solve_fast(dg).percolates()
}

/// Whether the double graph induced on `u_set` percolates.
pub fn is_internally_spanned(dg: &DoubleGraph, u_set: &[Vertex]) -> Result<bool, GraphError> {
    Ok(percolates(&induce(dg, u_set)?.dg))
}

/// History-based detector: returns a smallest cluster of size ≥ m appearing
/// in the merge history of `solve_fast(dg)`, walking each merged component's
/// spanning tree two clusters at a time so intermediate unions count as
/// history clusters too. First qualifying cluster wins ties. Every walk
/// prefix is a union of internally spanned clusters chained by bi-colored
/// links, hence itself internally spanned.
pub fn spanned_witness_from_history(dg: &DoubleGraph, m: usize) -> Option<SpannedWitness> {
    let n = dg.n() as usize;
    assert!(m >= 1 && m <= n, "witness size must satisfy 1 <= m <= n");
    if m == 1 {
        return Some(SpannedWitness::new(vec![1]));
    }
    let result = solve_fast(dg);
    let mut sets: HashMap<u32, Vec<Vertex>> = HashMap::new();
    let members = |sets: &HashMap<u32, Vec<Vertex>>, id: u32| -> Vec<Vertex> {
        sets.get(&id).cloned().unwrap_or_else(|| vec![id])
    };
    let mut best: Option<Vec<Vertex>> = None;
    for rec in &result.merge_trace {
        let mut acc = members(&sets, rec.clusters[0]);
        // Constituents of size ≥ m were candidates when they formed; only
        // the running unions are new here.
        for &(_, to) in &rec.links {
            let mut addition = members(&sets, to);
            acc.append(&mut addition);
            let better = match &best {
                Some(b) => acc.len() < b.len(),
                None => true,
            };
            if acc.len() >= m && better {
                let mut snapshot = acc.clone();
                snapshot.sort_unstable();
                best = Some(snapshot);
            }
        }
        acc.sort_unstable();
        sets.insert(rec.clusters[0], acc);
    }
    best.map(SpannedWitness::new)
}

const EXHAUSTIVE_GUARD: u32 = 20;

/// Literal exponential oracle: scans subsets of size ≥ m, smallest size
/// first and lexicographic within a size, returning the first internally
/// spanned one.
pub fn exhaustive_spanned(
    dg: &DoubleGraph,
    m: usize,
) -> Result<Option<SpannedWitness>, SolverError> {
    let n = dg.n();
    if n > EXHAUSTIVE_GUARD {
        return Err(SolverError::TooLargeForExhaustive {
            n,
            guard: EXHAUSTIVE_GUARD,
        });
    }
    assert!(m >= 1 && m <= n as usize, "1 <= m <= n required");
    for size in m..=n as usize {
        let mut subset: Vec<Vertex> = (1..=size as Vertex).collect();
        loop {
            if is_internally_spanned(dg, &subset).expect("valid subset") {
                return Ok(Some(SpannedWitness::new(subset)));
            }
            if !next_combination(&mut subset, n) {
                break;
            }
        }
    }
    Ok(None)
}

/// Advances to the lexicographically next k-combination of 1..=n; false
/// once the last combination has been visited.
fn next_combination(subset: &mut [Vertex], n: u32) -> bool {
    let k = subset.len();
    let mut i = k;
    while i > 0 {
        i -= 1;
        if subset[i] < n - (k - 1 - i) as u32 {
            subset[i] += 1;
            for j in i + 1..k {
                subset[j] = subset[j - 1] + 1;
            }
            return true;
        }
    }
    false
}

/// Contrast model: coarsest partition whose blocks induce connected
/// subgraphs in both colors, by iterated refinement (split each block by
/// red components, then blue, until stable).
pub fn mutually_connected_clusters(dg: &DoubleGraph) -> Partition {
    let n = dg.n();
    let mut blocks: Vec<Vec<Vertex>> = vec![(1..=n).collect()];
    let mut in_block = vec![0u32; n as usize + 1];
    loop {
        let mut changed = false;
        for g in [dg.red(), dg.blue()] {
            let mut next: Vec<Vec<Vertex>> = Vec::with_capacity(blocks.len());
            for (bi, block) in blocks.iter().enumerate() {
                for &v in block {
                    in_block[v as usize] = bi as u32;
                }
            }
            for (bi, block) in blocks.iter().enumerate() {
                if block.len() == 1 {
                    next.push(block.clone());
                    continue;
                }
                let mut local = Partition::singletons(n);
                for &v in block {
                    for &w in g.neighbors(v) {
                        if w > v && in_block[w as usize] == bi as u32 {
                            local.union(v, w);
                        }
                    }
                }
                let mut by_root: HashMap<u32, Vec<Vertex>> = HashMap::new();
                for &v in block {
                    by_root.entry(local.find(v)).or_default().push(v);
                }
                if by_root.len() > 1 {
                    changed = true;
                }
                let mut pieces: Vec<Vec<Vertex>> = by_root.into_values().collect();
                for p in &mut pieces {
                    p.sort_unstable();
                }
                pieces.sort_by_key(|p| p[0]);
                next.extend(pieces);
            }
            blocks = next;
        }
        if !changed {
            break;
        }
    }
    let mut parts = Partition::singletons(n);
    for block in &blocks {
        for &v in &block[1..] {
            parts.union(block[0], v);
        }
    }
    parts
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::graph::{is_connected, DoubleGraph};

    fn dg(n: u32, red: &[(u32, u32)], blue: &[(u32, u32)]) -> DoubleGraph {
        DoubleGraph::new(
            Graph::new(n, red.iter().copied()).unwrap(),
            Graph::new(n, blue.iter().copied()).unwrap(),
        )
        .unwrap()
    }

    fn assert_same_result(a: &SolveResult, b: &SolveResult) {
        assert_eq!(a.final_blocks(), b.final_blocks());
        assert_eq!(a.cluster_counts, b.cluster_counts);
        assert_eq!(a.rounds, b.rounds);
        assert_eq!(a.merge_trace, b.merge_trace);
    }

    #[test]
    fn identical_paths_solve_in_one_round() {
        let path = &[(1, 2), (2, 3), (3, 4)];
        let d = dg(4, path, path);
        for res in [solve_reference(&d), solve_fast(&d)] {
            assert!(res.percolates());
            assert_eq!(res.rounds, 1);
            assert_eq!(res.cluster_counts, vec![4, 1]);
        }
    }

    #[test]
    fn edge_disjoint_stops_at_singletons() {
        let d = dg(4, &[(1, 2), (3, 4)], &[(1, 3), (2, 4)]);
        for res in [solve_reference(&d), solve_fast(&d)] {
            assert!(!res.percolates());
            assert_eq!(res.rounds, 0);
            assert_eq!(res.cluster_counts, vec![4]);
            assert_eq!(res.partition.cluster_count(), 4);
            assert!(res.merge_trace.is_empty());
        }
    }

    #[test]
    fn hand_trace_star_red_path_blue() {
        // red star at 1, blue path: merges {1,2}, then {1,2,3}, then all
        let d = dg(4, &[(1, 2), (1, 3), (1, 4)], &[(1, 2), (2, 3), (3, 4)]);
        let reference = solve_reference(&d);
        let fast = solve_fast(&d);
        assert_same_result(&reference, &fast);
        assert!(fast.percolates());
        assert_eq!(fast.cluster_counts, vec![4, 3, 2, 1]);
        assert_eq!(fast.rounds, 3);
        let rounds_and_clusters: Vec<(usize, Vec<u32>)> = fast
            .merge_trace
            .iter()
            .map(|r| (r.round, r.clusters.clone()))
            .collect();
        assert_eq!(
            rounds_and_clusters,
            vec![(0, vec![1, 2]), (1, vec![1, 3]), (2, vec![1, 4])]
        );
    }

    #[test]
    fn single_vertex_percolates() {
        let d = dg(1, &[], &[]);
        let res = solve_reference(&d);
        assert!(res.percolates());
        assert_eq!(res.rounds, 0);
        assert_eq!(res.cluster_counts, vec![1]);
        assert!(percolates(&d));
    }

    #[test]
    fn complete_double_graph_one_round() {
        let n = 1000;
        let d = DoubleGraph::new(Graph::complete(n).unwrap(), Graph::complete(n).unwrap()).unwrap();
        let res = solve_fast(&d);
        assert!(res.percolates());
        assert_eq!(res.rounds, 1);
        assert_eq!(res.cluster_counts, vec![n as usize, 1]);
    }

    #[test]
    fn percolates_examples() {
        // edge-disjoint connected pair: red path, blue shifted path
        let d = dg(4, &[(1, 2), (2, 3), (3, 4)], &[(1, 3), (2, 4), (1, 4)]);
        assert!(is_connected(&Graph::new(4, [(1, 3), (2, 4), (1, 4)]).unwrap()));
        assert!(!percolates(&d));

        let conn = &[(1, 2), (2, 3), (3, 4)];
        assert!(percolates(&dg(4, conn, conn)));
    }

    #[test]
    fn internally_spanned_examples() {
        let d = dg(4, &[(1, 2), (1, 3)], &[(1, 2), (2, 4)]);
        assert!(is_internally_spanned(&d, &[3]).unwrap());
        assert!(is_internally_spanned(&d, &[1, 2]).unwrap());
        // red-only pair
        assert!(!is_internally_spanned(&d, &[1, 3]).unwrap());
        assert!(is_internally_spanned(&d, &[]).is_err());
    }

    #[test]
    fn witness_m1_and_full() {
        let path = &[(1, 2), (2, 3), (3, 4)];
        let d = dg(4, path, path);
        let w = spanned_witness_from_history(&d, 1).unwrap();
        assert_eq!(w.size, 1);
        let w = spanned_witness_from_history(&d, 4).unwrap();
        assert_eq!(w.vertices, vec![1, 2, 3, 4]);
    }

    #[test]
    fn witness_intermediate_size_exists_when_component_jumps() {
        // one round merges everything; the tree walk must still expose an
        // intermediate cluster of size in [m, 2m)
        let path = &[(1, 2), (2, 3), (3, 4), (4, 5), (5, 6)];
        let d = dg(6, path, path);
        let res = solve_fast(&d);
        assert_eq!(res.rounds, 1);
        let w = spanned_witness_from_history(&d, 3).unwrap();
        assert!(w.size >= 3 && w.size < 6, "walk skipped sizes: {:?}", w);
        assert!(is_internally_spanned(&d, &w.vertices).unwrap());
    }

    #[test]
    fn exhaustive_examples() {
        let d = dg(4, &[(1, 2), (3, 4)], &[(1, 3), (2, 4)]);
        assert_eq!(
            exhaustive_spanned(&d, 1).unwrap().unwrap().size,
            1,
            "singletons are internally spanned"
        );
        assert!(exhaustive_spanned(&d, 2).unwrap().is_none());

        let big = DoubleGraph::new(Graph::empty(21).unwrap(), Graph::empty(21).unwrap()).unwrap();
        assert!(matches!(
            exhaustive_spanned(&big, 1),
            Err(SolverError::TooLargeForExhaustive { n: 21, guard: 20 })
        ));
    }

    #[test]
    fn exhaustive_is_lexicographic_smallest_first() {
        // only {2,3} is internally spanned among pairs; {1} wins at m=1
        let d = dg(3, &[(2, 3)], &[(2, 3)]);
        let w = exhaustive_spanned(&d, 2).unwrap().unwrap();
        assert_eq!(w.vertices, vec![2, 3]);
        let w = exhaustive_spanned(&d, 1).unwrap().unwrap();
        assert_eq!(w.vertices, vec![1]);
    }

    #[test]
    fn mutually_connected_examples() {
        // edge-disjoint, both connected: one block
        let d = dg(4, &[(1, 2), (2, 3), (3, 4)], &[(1, 3), (2, 4), (1, 4)]);
        let p = mutually_connected_clusters(&d);
        assert_eq!(p.cluster_count(), 1);
        // jigsaw contrast on the same instance: all singletons
        assert_eq!(solve_fast(&d).partition.cluster_count(), 4);

        let two = &[(1, 2), (3, 4)];
        let d = dg(4, two, two);
        let mut p = mutually_connected_clusters(&d);
        assert_eq!(p.blocks(), vec![vec![1, 2], vec![3, 4]]);

        let d = dg(3, &[(1, 2), (2, 3)], &[(1, 2)]);
        let mut p = mutually_connected_clusters(&d);
        assert_eq!(p.blocks(), vec![vec![1, 2], vec![3]]);
    }

    #[test]
    fn report_json_shape() {
        let d = dg(4, &[(1, 2), (1, 3), (1, 4)], &[(1, 2), (2, 3), (3, 4)]);
        let rep = solve_fast(&d).report();
        let json = serde_json::to_value(&rep).unwrap();
        assert_eq!(json["percolates"], serde_json::json!(true));
        assert_eq!(json["rounds"], serde_json::json!(3));
        assert_eq!(json["cluster_counts"], serde_json::json!([4, 3, 2, 1]));
        assert_eq!(
            json["final_blocks"],
            serde_json::json!([[1, 2, 3, 4]])
        );
        assert_eq!(json["merge_trace"][0]["round"], serde_json::json!(0));
        assert_eq!(
            json["merge_trace"][0]["clusters"],
            serde_json::json!([1, 2])
        );
    }
}
