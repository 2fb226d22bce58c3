//! Noise sampling and minimum-weight perfect-matching decoding on periodic
//! syndrome lattices.
//!
//! Decoding works on integer (fixed-point) edge weights so that matching
//! optimality is exact. Erased edges weigh zero. The pipeline per sample:
//!
//! 1. Defects joined by zero-weight paths are paired immediately along a
//!    spanning tree of their zero-weight cluster (this never increases the
//!    optimum, since such defects are at distance zero).
//! 2. The remaining defects get a sparse candidate graph from truncated
//!    Dijkstra searches to their nearest defects.
//! 3. A blossom solve gives a perfect matching on the candidate graph; its dual
//!    solution is then checked against every defect pair that could violate
//!    it, missing pairs are added, and the solve repeats until the duals
//!    certify optimality on the complete defect graph.

pub mod blossom;
pub mod homology;
pub mod noise;

use std::cmp::Reverse;
use std::collections::{BTreeMap, BinaryHeap};

use thiserror::Error;

pub use homology::{lifted_offset, logical_failure, percolation_check, winding_mask};
pub use noise::{collapse, quantize, sample, Collapse, NoiseError, NoiseParams, NoiseSample, NoisyLattice};

use noise::IMPASSABLE;

const NONE: usize = usize::MAX;

#[derive(Debug, Error, PartialEq, Eq)]
pub enum DecodeError {
    #[error("edge set has {0} boundary vertices")]
    OpenChain(usize),
    #[error("odd number of defects ({0})")]
    OddDefects(usize),
    #[error("defect at vertex {0} cannot reach any partner")]
    Unmatchable(usize),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum FailureCause {
    None,
    Homology,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct DecodeResult {
    pub correction: Vec<usize>,
    pub failed: bool,
    pub failure_cause: FailureCause,
    /// Total shortest-path distance of the chosen pairing, in quantised units.
    pub matching_weight: i64,
}

#[derive(Debug, Clone, Copy)]
pub struct DecoderOptions {
    /// Nearest defects each defect is initially connected to.
    pub neighbors: usize,
}

impl Default for DecoderOptions {
    fn default() -> Self {
        Self { neighbors: 6 }
    }
}

/// Reusable per-thread buffers.
#[derive(Debug, Default)]
pub struct Scratch {
    weight: Vec<i64>,
    dist: Vec<i64>,
    pred: Vec<usize>,
    seen: Vec<u32>,
    epoch: u32,
    heap: BinaryHeap<Reverse<(i64, usize)>>,
    slot: Vec<usize>,
    charge: Vec<bool>,
    in_tree: Vec<bool>,
    order: Vec<usize>,
    toggle: Vec<bool>,
}

impl Scratch {
    pub fn new() -> Self {
        Self::default()
    }

    fn prepare(&mut self, n: usize, m: usize) {
        if self.dist.len() != n {
            self.dist = vec![0; n];
            self.pred = vec![NONE; n];
            self.seen = vec![0; n];
            self.epoch = 0;
            self.slot = vec![NONE; n];
            self.charge = vec![false; n];
            self.in_tree = vec![false; n];
        }
        if self.toggle.len() != m {
            self.toggle = vec![false; m];
        }
    }

    fn next_epoch(&mut self) {
        self.epoch = self.epoch.wrapping_add(1);
        if self.epoch == 0 {
            self.seen.iter_mut().for_each(|s| *s = 0);
            self.epoch = 1;
        }
        self.heap.clear();
    }
}

enum Step {
    Continue,
    Stop,
}

/// Dijkstra from `src` over the per-sample weights. `visit` is called for each
/// vertex when it is settled, in order of (distance, vertex index).
fn dijkstra<F>(lattice: &crate::lattice::PeriodicSyndromeLattice, s: &mut Scratch, src: usize, mut visit: F)
where
    F: FnMut(usize, i64) -> Step,
{
    s.next_epoch();
    let epoch = s.epoch;
    s.dist[src] = 0;
    s.pred[src] = NONE;
    s.seen[src] = epoch;
    s.heap.push(Reverse((0, src)));
    while let Some(Reverse((d, v))) = s.heap.pop() {
        if d > s.dist[v] {
            continue;
        }
        if let Step::Stop = visit(v, d) {
            return;
        }
        for &(u, e) in lattice.neighbors(v) {
            let w = s.weight[e];
            if w == IMPASSABLE {
                continue;
            }
            let nd = d + w;
            if s.seen[u] != epoch || nd < s.dist[u] {
                s.seen[u] = epoch;
                s.dist[u] = nd;
                s.pred[u] = e;
                s.heap.push(Reverse((nd, u)));
            }
        }
    }
}

fn other_end(lattice: &crate::lattice::PeriodicSyndromeLattice, e: usize, v: usize) -> usize {
    let edge = lattice.edges()[e];
    if edge.u == v {
        edge.v
    } else {
        edge.u
    }
}

pub fn decode(noisy: &NoisyLattice<'_>, sample: &NoiseSample) -> Result<DecodeResult, DecodeError> {
    decode_with(noisy, sample, DecoderOptions::default(), &mut Scratch::new())
}

pub fn decode_with(
    noisy: &NoisyLattice<'_>,
    sample: &NoiseSample,
    options: DecoderOptions,
    s: &mut Scratch,
) -> Result<DecodeResult, DecodeError> {
    let lattice = noisy.lattice;
    let n = lattice.num_vertices();
    let m = lattice.num_edges();
    if !sample.defects.len().is_multiple_of(2) {
        return Err(DecodeError::OddDefects(sample.defects.len()));
    }
    s.prepare(n, m);
    s.weight.clone_from(&noisy.weights);
    for &e in &sample.erased {
        s.weight[e] = 0;
    }

    let mut touched: Vec<usize> = Vec::new();
    let mut toggle_edge = |s: &mut Scratch, e: usize| {
        if !s.toggle[e] {
            touched.push(e);
        }
        s.toggle[e] ^= true;
    };

    // Pair defects inside zero-weight clusters.
    for &d in &sample.defects {
        s.charge[d] = true;
    }
    let mut residual = Vec::new();
    for &root in &sample.defects {
        if s.in_tree[root] {
            continue;
        }
        s.order.clear();
        s.order.push(root);
        s.in_tree[root] = true;
        s.pred[root] = NONE;
        let mut head = 0;
        while head < s.order.len() {
            let v = s.order[head];
            head += 1;
            for &(u, e) in lattice.neighbors(v) {
                if s.weight[e] == 0 && !s.in_tree[u] {
                    s.in_tree[u] = true;
                    s.pred[u] = e;
                    s.order.push(u);
                }
            }
        }
        for idx in (1..s.order.len()).rev() {
            let v = s.order[idx];
            if s.charge[v] {
                let e = s.pred[v];
                toggle_edge(s, e);
                s.charge[v] = false;
                let p = other_end(lattice, e, v);
                s.charge[p] ^= true;
            }
        }
        if s.charge[root] {
            residual.push(root);
        }
        // Leave the cluster marked so later defects inside it are skipped.
        for idx in 0..s.order.len() {
            let v = s.order[idx];
            s.charge[v] = false;
        }
    }
    for &d in &sample.defects {
        clear_cluster(lattice, s, d);
    }

    let mut matching_weight = 0i64;
    if !residual.is_empty() {
        residual.sort_unstable();
        let pairs = match_residual(lattice, s, &residual, options)?;
        for (a, b, d) in pairs {
            matching_weight += d;
            let target = residual[b];
            dijkstra(lattice, s, residual[a], |v, _| if v == target { Step::Stop } else { Step::Continue });
            let mut v = target;
            while v != residual[a] {
                let e = s.pred[v];
                toggle_edge(s, e);
                v = other_end(lattice, e, v);
            }
        }
    }

    let mut correction: Vec<usize> = touched.into_iter().filter(|&e| s.toggle[e]).collect();
    for &e in &correction {
        s.toggle[e] = false;
    }
    correction.sort_unstable();
    correction.dedup();
    let mask = winding_mask(lattice, &sample.flipped) ^ winding_mask(lattice, &correction);
    let failed = mask != 0;
    Ok(DecodeResult {
        correction,
        failed,
        failure_cause: if failed { FailureCause::Homology } else { FailureCause::None },
        matching_weight,
    })
}

fn clear_cluster(lattice: &crate::lattice::PeriodicSyndromeLattice, s: &mut Scratch, start: usize) {
    if !s.in_tree[start] {
        return;
    }
    let mut stack = vec![start];
    s.in_tree[start] = false;
    while let Some(v) = stack.pop() {
        for &(u, e) in lattice.neighbors(v) {
            if s.weight[e] == 0 && s.in_tree[u] {
                s.in_tree[u] = false;
                stack.push(u);
            }
        }
    }
}

/// Minimum-weight perfect matching of `residual` under shortest-path distance.
/// Returns `(a, b, distance)` with `a < b` indices into `residual`.
fn match_residual(
    lattice: &crate::lattice::PeriodicSyndromeLattice,
    s: &mut Scratch,
    residual: &[usize],
    options: DecoderOptions,
) -> Result<Vec<(usize, usize, i64)>, DecodeError> {
    let mut slot = std::mem::take(&mut s.slot);
    for (i, &v) in residual.iter().enumerate() {
        slot[v] = i;
    }
    let result = match_slots(lattice, s, residual, &slot, options);
    for &v in residual {
        slot[v] = NONE;
    }
    s.slot = slot;
    result
}

/// Offset turning distances into matching weights `BIG − d`. Using one
/// constant everywhere keeps the duals of separately solved components
/// consistent with each other, so they combine into a single certificate.
const BIG: i64 = 1 << 50;

struct Solved {
    members: Vec<usize>,
    matching: blossom::Matching,
}

fn find(parent: &mut [usize], mut v: usize) -> usize {
    while parent[v] != v {
        parent[v] = parent[parent[v]];
        v = parent[v];
    }
    v
}

/// Adds edges from `i` to its `want` nearest residual defects.
fn nearest_defects(
    lattice: &crate::lattice::PeriodicSyndromeLattice,
    s: &mut Scratch,
    residual: &[usize],
    slot: &[usize],
    i: usize,
    want: usize,
    candidates: &mut BTreeMap<(usize, usize), i64>,
) -> Result<(), DecodeError> {
    let mut found = 0;
    dijkstra(lattice, s, residual[i], |v, d| {
        let j = slot[v];
        if j != NONE && j != i {
            candidates.insert((i.min(j), i.max(j)), d);
            found += 1;
            if found >= want {
                return Step::Stop;
            }
        }
        Step::Continue
    });
    if found == 0 {
        return Err(DecodeError::Unmatchable(residual[i]));
    }
    Ok(())
}

fn match_slots(
    lattice: &crate::lattice::PeriodicSyndromeLattice,
    s: &mut Scratch,
    residual: &[usize],
    slot: &[usize],
    options: DecoderOptions,
) -> Result<Vec<(usize, usize, i64)>, DecodeError> {
    let k = residual.len();
    let mut candidates: BTreeMap<(usize, usize), i64> = BTreeMap::new();
    let mut want = vec![options.neighbors.max(1); k];
    for i in 0..k {
        nearest_defects(lattice, s, residual, slot, i, want[i], &mut candidates)?;
    }
    let mut parent: Vec<usize> = (0..k).collect();
    for &(a, b) in candidates.keys() {
        let (ra, rb) = (find(&mut parent, a), find(&mut parent, b));
        parent[ra.max(rb)] = ra.min(rb);
    }
    let mut solved: BTreeMap<usize, Solved> = BTreeMap::new();
    loop {
        // Solve every component that changed since the last round.
        let mut groups: BTreeMap<usize, Vec<usize>> = BTreeMap::new();
        for i in 0..k {
            let r = find(&mut parent, i);
            if !solved.contains_key(&r) {
                groups.entry(r).or_default().push(i);
            }
        }
        let mut grew = false;
        for (root, members) in groups {
            let mut local = BTreeMap::new();
            for (li, &g) in members.iter().enumerate() {
                local.insert(g, li);
            }
            let mut edges = Vec::new();
            for &g in &members {
                for (&(a, b), &d) in candidates.range((g, 0)..(g + 1, 0)) {
                    if let Some(&lb) = local.get(&b) {
                        edges.push((local[&a], lb, BIG - d));
                    }
                }
            }
            let matching = if members.len() % 2 == 0 {
                Some(blossom::max_weight_matching(members.len(), &edges, true))
                    .filter(|m| m.cardinality() * 2 == members.len())
            } else {
                None
            };
            match matching {
                Some(matching) => {
                    solved.insert(root, Solved { members, matching });
                }
                None => {
                    // No perfect matching inside: widen the neighbourhoods.
                    for &g in &members {
                        want[g] = (want[g] * 2).min(k - 1);
                        nearest_defects(lattice, s, residual, slot, g, want[g], &mut candidates)?;
                    }
                    grew = true;
                }
            }
        }
        if grew {
            for &(a, b) in candidates.keys() {
                let (ra, rb) = (find(&mut parent, a), find(&mut parent, b));
                if ra != rb {
                    solved.remove(&ra);
                    solved.remove(&rb);
                    parent[ra.max(rb)] = ra.min(rb);
                }
            }
            continue;
        }

        // Check the combined dual solution against every pair that could violate it.
        let mut dual = vec![0i64; k];
        let mut local_index = vec![0usize; k];
        for sol in solved.values() {
            for (li, &g) in sol.members.iter().enumerate() {
                dual[g] = sol.matching.dual[li];
                local_index[g] = li;
            }
        }
        // A pair violates its constraint only if 2d < ρ_i + ρ_j, which implies
        // d < max(ρ_i, ρ_j): searching from each defect to radius ρ_i finds it.
        let rho: Vec<i64> = dual.iter().map(|&u| BIG - u).collect();
        let mut violations = Vec::new();
        for i in 0..k {
            let ri = find(&mut parent, i);
            let mut found = Vec::new();
            dijkstra(lattice, s, residual[i], |v, d| {
                if d >= rho[i] {
                    return Step::Stop;
                }
                let j = slot[v];
                if j != NONE && j != i && rho[j] <= rho[i] {
                    found.push((j, d));
                }
                Step::Continue
            });
            for (j, d) in found {
                if candidates.contains_key(&(i.min(j), i.max(j))) || 2 * d >= rho[i] + rho[j] {
                    continue;
                }
                let rj = find(&mut parent, j);
                let slack = if ri == rj {
                    solved[&ri].matching.slack(local_index[i], local_index[j], BIG - d)
                } else {
                    dual[i] + dual[j] - 2 * (BIG - d)
                };
                if slack < 0 {
                    violations.push((i.min(j), i.max(j), d));
                }
            }
        }
        if violations.is_empty() {
            let mut pairs = Vec::with_capacity(k / 2);
            for sol in solved.values() {
                for (li, &g) in sol.members.iter().enumerate() {
                    let lj = sol.matching.mate[li].unwrap();
                    let h = sol.members[lj];
                    if g < h {
                        pairs.push((g, h, candidates[&(g, h)]));
                    }
                }
            }
            pairs.sort_unstable();
            return Ok(pairs);
        }
        for (i, j, d) in violations {
            candidates.insert((i, j), d);
            let (ri, rj) = (find(&mut parent, i), find(&mut parent, j));
            solved.remove(&ri);
            solved.remove(&rj);
            parent[ri.max(rj)] = ri.min(rj);
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::lattice::{build_cubic, build_four_qubit, build_ten_qubit};
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    #[test]
    fn empty_sample_decodes_to_nothing() {
        let lat = build_cubic(4).unwrap();
        let noisy = NoisyLattice::new(&lat, NoiseParams::new(0.1, 0.0).unwrap());
        let r = decode(&noisy, &NoiseSample::default()).unwrap();
        assert!(r.correction.is_empty());
        assert!(!r.failed);
    }

    #[test]
    fn single_edge_is_corrected_by_itself() {
        let lat = build_ten_qubit(4).unwrap();
        let noisy = NoisyLattice::new(&lat, NoiseParams::new(0.05, 0.0).unwrap());
        for e in [0, 7, 33, 100] {
            if lat.edges()[e].multiplicity != 1 {
                continue;
            }
            let s = NoiseSample::from_edges(&lat, vec![], vec![e]);
            let r = decode(&noisy, &s).unwrap();
            assert_eq!(r.correction, vec![e]);
            assert!(!r.failed);
        }
    }

    #[test]
    fn corrections_close_every_syndrome() {
        let lat = build_four_qubit(6).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(9);
        let mut scratch = Scratch::new();
        for &(pe, pz) in &[(0.01, 0.0), (0.02, 0.1), (0.0, 0.2), (0.05, 0.3)] {
            let noisy = NoisyLattice::new(&lat, NoiseParams::new(pe, pz).unwrap());
            for _ in 0..40 {
                let smp = sample(&noisy, &mut rng);
                let r = decode_with(&noisy, &smp, DecoderOptions::default(), &mut scratch).unwrap();
                let mut all = smp.flipped.clone();
                all.extend(&r.correction);
                assert!(lat.boundary(&all).is_empty());
                assert_eq!(r.failed, logical_failure(&lat, &all).unwrap());
            }
        }
    }

    /// Complete-graph reference: plain Dijkstra distances between all defect
    /// pairs, then one blossom solve on the full graph.
    fn reference_weight(noisy: &NoisyLattice<'_>, smp: &NoiseSample) -> i64 {
        let lat = noisy.lattice;
        let mut w = noisy.weights.clone();
        for &e in &smp.erased {
            w[e] = 0;
        }
        let dist_from = |src: usize| {
            let mut dist = vec![i64::MAX; lat.num_vertices()];
            let mut heap = BinaryHeap::new();
            dist[src] = 0;
            heap.push(Reverse((0i64, src)));
            while let Some(Reverse((d, v))) = heap.pop() {
                if d > dist[v] {
                    continue;
                }
                for &(u, e) in lat.neighbors(v) {
                    if w[e] != IMPASSABLE && d + w[e] < dist[u] {
                        dist[u] = d + w[e];
                        heap.push(Reverse((dist[u], u)));
                    }
                }
            }
            dist
        };
        let k = smp.defects.len();
        let mut edges = Vec::new();
        let mut maxd = 0;
        let rows: Vec<Vec<i64>> = smp.defects.iter().map(|&d| dist_from(d)).collect();
        for i in 0..k {
            for j in i + 1..k {
                maxd = maxd.max(rows[i][smp.defects[j]]);
            }
        }
        for i in 0..k {
            for j in i + 1..k {
                edges.push((i, j, maxd + 1 - rows[i][smp.defects[j]]));
            }
        }
        let m = blossom::max_weight_matching(k, &edges, true);
        (0..k).filter_map(|i| m.mate[i].filter(|&j| j > i).map(|j| rows[i][smp.defects[j]])).sum()
    }

    #[test]
    fn certified_matching_equals_complete_graph_solve() {
        let mut rng = ChaCha8Rng::seed_from_u64(17);
        let mut scratch = Scratch::new();
        for lat in [build_four_qubit(6).unwrap(), build_ten_qubit(6).unwrap(), build_cubic(5).unwrap()] {
            for &(pe, pz) in &[(0.02, 0.0), (0.05, 0.0), (0.03, 0.15), (0.1, 0.0)] {
                let noisy = NoisyLattice::new(&lat, NoiseParams::new(pe, pz).unwrap());
                for neighbors in [1, 3, 6] {
                    for _ in 0..8 {
                        let smp = sample(&noisy, &mut rng);
                        let r = decode_with(&noisy, &smp, DecoderOptions { neighbors }, &mut scratch).unwrap();
                        assert_eq!(r.matching_weight, reference_weight(&noisy, &smp));
                    }
                }
            }
        }
    }

    #[test]
    fn odd_defects_rejected() {
        let lat = build_cubic(4).unwrap();
        let noisy = NoisyLattice::new(&lat, NoiseParams::new(0.1, 0.0).unwrap());
        let s = NoiseSample { erased: vec![], flipped: vec![], defects: vec![3] };
        assert_eq!(decode(&noisy, &s), Err(DecodeError::OddDefects(1)));
    }
}
