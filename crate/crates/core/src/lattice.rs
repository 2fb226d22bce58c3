//! Explicit periodic syndrome lattices.
//!
//! Vertices sit at integer points `(x, y, z)` of an `L × L × L` torus and are
//! indexed as `x + L·(y + L·z)`. Every undirected edge is stored once, with the
//! number of parallel fusion observables it bundles (`multiplicity`) and a
//! bitmask of the three cut planes `x = L−½`, `y = L−½`, `z = L−½` it crosses.
//! The cut mask is what the homology test in the decoder works with.

use std::collections::BTreeMap;
use std::fmt::Write as _;
use std::str::FromStr;

use thiserror::Error;

#[derive(Debug, Error, PartialEq, Eq)]
pub enum LatticeError {
    #[error("lattice size {0} must be even")]
    OddSize(usize),
    #[error("lattice size {size} is below the minimum of {min}")]
    TooSmall { size: usize, min: usize },
    #[error("edge rule produced a self-loop at vertex {0}")]
    SelfLoop(usize),
    #[error("edge rule produced conflicting multiplicities {0} and {1} for one vertex pair")]
    MultiplicityConflict(u32, u32),
    #[error("size mismatch: lattice has {lattice} vertices, derived graph has {derived}")]
    SizeMismatch { lattice: usize, derived: usize },
    #[error("unknown lattice model `{0}`")]
    UnknownModel(String),
}

/// Which family of syndrome lattice to build.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum LatticeModel {
    FourQubit,
    /// Ten-qubit lattice including the same-layer diagonal edges that the
    /// fusion network itself produces (see [`build_ten_qubit_derived`]).
    TenQubit,
    /// Ten-qubit lattice from the planar and vertical rules alone
    /// ([`build_ten_qubit`]).
    TenQubitPlanar,
    Cubic,
}

impl LatticeModel {
    pub fn name(self) -> &'static str {
        match self {
            LatticeModel::FourQubit => "four_qubit",
            LatticeModel::TenQubit => "ten_qubit",
            LatticeModel::TenQubitPlanar => "ten_qubit_planar",
            LatticeModel::Cubic => "cubic",
        }
    }

    pub fn build(self, l: usize) -> Result<PeriodicSyndromeLattice, LatticeError> {
        match self {
            LatticeModel::FourQubit => build_four_qubit(l),
            LatticeModel::TenQubit => build_ten_qubit_derived(l),
            LatticeModel::TenQubitPlanar => build_ten_qubit(l),
            LatticeModel::Cubic => build_cubic(l),
        }
    }
}

impl std::fmt::Display for LatticeModel {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for LatticeModel {
    type Err = LatticeError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s.trim() {
            "four_qubit" | "four-qubit" | "4q" => Ok(LatticeModel::FourQubit),
            "ten_qubit" | "ten-qubit" | "10q" => Ok(LatticeModel::TenQubit),
            "ten_qubit_planar" | "ten-qubit-planar" => Ok(LatticeModel::TenQubitPlanar),
            "cubic" => Ok(LatticeModel::Cubic),
            other => Err(LatticeError::UnknownModel(other.to_string())),
        }
    }
}

pub const CUT_X: u8 = 0b001;
pub const CUT_Y: u8 = 0b010;
pub const CUT_Z: u8 = 0b100;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct LatticeEdge {
    /// Smaller endpoint index.
    pub u: usize,
    pub v: usize,
    pub multiplicity: u32,
    /// Cut planes crossed, see [`CUT_X`], [`CUT_Y`], [`CUT_Z`].
    pub cuts: u8,
}

#[derive(Debug, Clone)]
pub struct PeriodicSyndromeLattice {
    size: usize,
    model: LatticeModel,
    edges: Vec<LatticeEdge>,
    // CSR adjacency: neighbours of v are adj[offsets[v]..offsets[v + 1]] as (vertex, edge id).
    offsets: Vec<usize>,
    adj: Vec<(usize, usize)>,
}

impl PeriodicSyndromeLattice {
    fn from_rule<F>(size: usize, model: LatticeModel, mut rule: F) -> Result<Self, LatticeError>
    where
        F: FnMut(i64, i64, i64, &mut Vec<([i64; 3], u32)>),
    {
        let n = size * size * size;
        let l = size as i64;
        // (u, v) -> (multiplicity, cuts), u < v
        let mut pairs: BTreeMap<(usize, usize), (u32, u8)> = BTreeMap::new();
        let mut offsets = Vec::new();
        for z in 0..l {
            for y in 0..l {
                for x in 0..l {
                    offsets.clear();
                    rule(x, y, z, &mut offsets);
                    let a = index3(size, x, y, z);
                    for &([dx, dy, dz], m) in offsets.iter() {
                        let (tx, ty, tz) = (x + dx, y + dy, z + dz);
                        let b = index3(size, tx.rem_euclid(l), ty.rem_euclid(l), tz.rem_euclid(l));
                        if a == b {
                            return Err(LatticeError::SelfLoop(a));
                        }
                        let mut cuts = 0u8;
                        if !(0..l).contains(&tx) {
                            cuts |= CUT_X;
                        }
                        if !(0..l).contains(&ty) {
                            cuts |= CUT_Y;
                        }
                        if !(0..l).contains(&tz) {
                            cuts |= CUT_Z;
                        }
                        let key = (a.min(b), a.max(b));
                        match pairs.get(&key) {
                            Some(&(m0, _)) if m0 != m => {
                                return Err(LatticeError::MultiplicityConflict(m0, m))
                            }
                            Some(_) => {}
                            None => {
                                pairs.insert(key, (m, cuts));
                            }
                        }
                    }
                }
            }
        }
        let edges: Vec<LatticeEdge> = pairs
            .into_iter()
            .map(|((u, v), (multiplicity, cuts))| LatticeEdge { u, v, multiplicity, cuts })
            .collect();
        Ok(Self::from_edges(size, model, n, edges))
    }

    fn from_edges(size: usize, model: LatticeModel, n: usize, edges: Vec<LatticeEdge>) -> Self {
        let mut degree = vec![0usize; n];
        for e in &edges {
            degree[e.u] += 1;
            degree[e.v] += 1;
        }
        let mut offsets = Vec::with_capacity(n + 1);
        offsets.push(0);
        for d in &degree {
            offsets.push(offsets.last().unwrap() + d);
        }
        let mut fill = offsets.clone();
        let mut adj = vec![(0, 0); 2 * edges.len()];
        for (id, e) in edges.iter().enumerate() {
            adj[fill[e.u]] = (e.v, id);
            fill[e.u] += 1;
            adj[fill[e.v]] = (e.u, id);
            fill[e.v] += 1;
        }
        Self { size, model, edges, offsets, adj }
    }

    pub fn size(&self) -> usize {
        self.size
    }

    pub fn model(&self) -> LatticeModel {
        self.model
    }

    pub fn num_vertices(&self) -> usize {
        self.size * self.size * self.size
    }

    pub fn edges(&self) -> &[LatticeEdge] {
        &self.edges
    }

    pub fn num_edges(&self) -> usize {
        self.edges.len()
    }

    /// `(neighbour, edge id)` pairs incident to `v`.
    pub fn neighbors(&self, v: usize) -> &[(usize, usize)] {
        &self.adj[self.offsets[v]..self.offsets[v + 1]]
    }

    pub fn degree(&self, v: usize) -> usize {
        self.offsets[v + 1] - self.offsets[v]
    }

    pub fn coords(&self, v: usize) -> (usize, usize, usize) {
        let l = self.size;
        (v % l, (v / l) % l, v / (l * l))
    }

    pub fn index(&self, x: usize, y: usize, z: usize) -> usize {
        x + self.size * (y + self.size * z)
    }

    /// Sorted multiplicities of the edges incident to `v`.
    pub fn multiplicity_profile(&self, v: usize) -> Vec<u32> {
        let mut p: Vec<u32> =
            self.neighbors(v).iter().map(|&(_, e)| self.edges[e].multiplicity).collect();
        p.sort_unstable();
        p
    }

    /// Odd-parity vertices of an edge set, sorted.
    pub fn boundary(&self, edge_ids: &[usize]) -> Vec<usize> {
        let mut parity = vec![false; self.num_vertices()];
        for &e in edge_ids {
            let edge = &self.edges[e];
            parity[edge.u] ^= true;
            parity[edge.v] ^= true;
        }
        parity.iter().enumerate().filter_map(|(v, &odd)| odd.then_some(v)).collect()
    }

    /// Text export: header `L <size> MODEL <name>` then `x1 y1 z1 x2 y2 z2 m` per edge.
    pub fn to_edge_list(&self) -> String {
        let mut out = String::new();
        writeln!(out, "L {} MODEL {}", self.size, self.model.name()).unwrap();
        for e in &self.edges {
            let (x1, y1, z1) = self.coords(e.u);
            let (x2, y2, z2) = self.coords(e.v);
            writeln!(out, "{x1} {y1} {z1} {x2} {y2} {z2} {}", e.multiplicity).unwrap();
        }
        out
    }
}

fn index3(size: usize, x: i64, y: i64, z: i64) -> usize {
    x as usize + size * (y as usize + size * z as usize)
}

fn check_model_size(l: usize) -> Result<(), LatticeError> {
    if !l.is_multiple_of(2) {
        return Err(LatticeError::OddSize(l));
    }
    if l < 4 {
        return Err(LatticeError::TooSmall { size: l, min: 4 });
    }
    Ok(())
}

const PLANAR: [[i64; 3]; 4] = [[1, 0, 0], [-1, 0, 0], [0, 1, 0], [0, -1, 0]];
const VERTICAL: [[i64; 3]; 2] = [[0, 0, 1], [0, 0, -1]];
const DIAGONAL: [[i64; 2]; 4] = [[1, 1], [1, -1], [-1, 1], [-1, -1]];

fn planar_and_vertical(x: i64, y: i64, out: &mut Vec<([i64; 3], u32)>) {
    out.extend(PLANAR.iter().map(|&d| (d, 1)));
    if (x + y).rem_euclid(2) == 0 {
        out.extend(VERTICAL.iter().map(|&d| (d, 4)));
    }
}

/// Ten-qubit syndrome lattice: every vertex has four planar `m = 1` edges,
/// vertices with `x + y` even also have two vertical `m = 4` edges.
pub fn build_ten_qubit(l: usize) -> Result<PeriodicSyndromeLattice, LatticeError> {
    check_model_size(l)?;
    PeriodicSyndromeLattice::from_rule(l, LatticeModel::TenQubitPlanar, |x, y, _z, out| {
        planar_and_vertical(x, y, out);
    })
}

/// [`build_ten_qubit`] plus `m = 1` edges from every `x + y` even vertex to its
/// same-layer diagonal neighbours `(x ± 1, y ± 1, z)`.
///
/// This is the graph obtained from the ten-qubit fusion network: the
/// absorbed line fusions leave each detector cell sharing one observable with
/// each of its four diagonal neighbours in the same round, so even vertices
/// carry 8 edges of multiplicity 1 and 2 of multiplicity 4.
pub fn build_ten_qubit_derived(l: usize) -> Result<PeriodicSyndromeLattice, LatticeError> {
    check_model_size(l)?;
    PeriodicSyndromeLattice::from_rule(l, LatticeModel::TenQubit, |x, y, _z, out| {
        planar_and_vertical(x, y, out);
        if (x + y).rem_euclid(2) == 0 {
            out.extend(DIAGONAL.iter().map(|&[dx, dy]| ([dx, dy, 0], 1)));
        }
    })
}

/// Four-qubit syndrome lattice.
///
/// On top of the planar/vertical rules, an `x + y` even vertex gets `m = 3`
/// edges to `(x ± 1, y ± 1, z)` and `m = 1` edges to `(x ± 1, y ± 1, z + 1)` when
/// `y` is even or `(x ± 1, y ± 1, z − 1)` when `y` is odd.
pub fn build_four_qubit(l: usize) -> Result<PeriodicSyndromeLattice, LatticeError> {
    check_model_size(l)?;
    PeriodicSyndromeLattice::from_rule(l, LatticeModel::FourQubit, |x, y, _z, out| {
        planar_and_vertical(x, y, out);
        if (x + y).rem_euclid(2) == 0 {
            let dz = if y.rem_euclid(2) == 0 { 1 } else { -1 };
            for &[dx, dy] in DIAGONAL.iter() {
                out.push(([dx, dy, 0], 3));
                out.push(([dx, dy, dz], 1));
            }
        }
    })
}

/// Simple cubic torus, all edges `m = 1`.
pub fn build_cubic(l: usize) -> Result<PeriodicSyndromeLattice, LatticeError> {
    if l < 3 {
        return Err(LatticeError::TooSmall { size: l, min: 3 });
    }
    PeriodicSyndromeLattice::from_rule(l, LatticeModel::Cubic, |_x, _y, _z, out| {
        out.extend([[1, 0, 0], [0, 1, 0], [0, 0, 1]].iter().map(|&d| (d, 1)));
    })
}

/// Structural comparison of an explicit lattice with a derived syndrome graph.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CrossValidation {
    pub passed: bool,
    /// Derived components whose vertex count equals the lattice's.
    pub components_checked: usize,
    /// Vertices per sorted multiplicity profile.
    pub lattice_profiles: BTreeMap<Vec<u32>, usize>,
    pub derived_profiles: Vec<BTreeMap<Vec<u32>, usize>>,
    /// Edges per multiplicity.
    pub lattice_edge_classes: BTreeMap<u32, usize>,
    pub derived_edge_classes: Vec<BTreeMap<u32, usize>>,
    pub differences: Vec<String>,
}

fn histogram<K: Ord + Clone>(items: impl IntoIterator<Item = K>) -> BTreeMap<K, usize> {
    let mut h = BTreeMap::new();
    for k in items {
        *h.entry(k).or_insert(0) += 1;
    }
    h
}

fn describe_diff<K: Ord + std::fmt::Debug>(what: &str, a: &BTreeMap<K, usize>, b: &BTreeMap<K, usize>, out: &mut Vec<String>) {
    for k in a.keys().chain(b.keys()).collect::<std::collections::BTreeSet<_>>() {
        let (x, y) = (a.get(k).copied().unwrap_or(0), b.get(k).copied().unwrap_or(0));
        if x != y {
            out.push(format!("{what} {k:?}: lattice {x}, derived {y}"));
        }
    }
}

/// Compares every connected component of `derived` that has as many
/// vertices as `lattice` against it: the multiset of per-vertex
/// multiplicity profiles, the number of edges of each multiplicity and the
/// absence of dangling edges must all agree.
pub fn cross_validate(
    lattice: &PeriodicSyndromeLattice,
    derived: &crate::network::SyndromeGraph,
) -> Result<CrossValidation, LatticeError> {
    let lattice_profiles = histogram((0..lattice.num_vertices()).map(|v| lattice.multiplicity_profile(v)));
    let lattice_edge_classes = histogram(lattice.edges().iter().map(|e| e.multiplicity));
    let components: Vec<Vec<usize>> =
        derived.components().into_iter().filter(|c| c.len() == lattice.num_vertices()).collect();
    if components.is_empty() {
        let largest = derived.components().iter().map(Vec::len).max().unwrap_or(0);
        return Err(LatticeError::SizeMismatch { lattice: lattice.num_vertices(), derived: largest });
    }
    let mut differences = Vec::new();
    let mut derived_profiles = Vec::new();
    let mut derived_edge_classes = Vec::new();
    for (i, comp) in components.iter().enumerate() {
        let sub = derived.subgraph(comp);
        let profiles = histogram(sub.profiles());
        let classes = sub.edge_classes();
        let mut diff = Vec::new();
        describe_diff("profile", &lattice_profiles, &profiles, &mut diff);
        describe_diff("multiplicity", &lattice_edge_classes, &classes, &mut diff);
        if sub.num_dangling() > 0 {
            diff.push(format!("{} dangling observables", sub.num_dangling()));
        }
        differences.extend(diff.into_iter().map(|d| format!("component {i}: {d}")));
        derived_profiles.push(profiles);
        derived_edge_classes.push(classes);
    }
    Ok(CrossValidation {
        passed: differences.is_empty(),
        components_checked: components.len(),
        lattice_profiles,
        derived_profiles,
        lattice_edge_classes,
        derived_edge_classes,
        differences,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn profile_counts(lat: &PeriodicSyndromeLattice, v: usize) -> BTreeMap<u32, usize> {
        let mut counts = BTreeMap::new();
        for m in lat.multiplicity_profile(v) {
            *counts.entry(m).or_insert(0) += 1;
        }
        counts
    }

    #[test]
    fn ten_qubit_degree_profiles() {
        let lat = build_ten_qubit(4).unwrap();
        let even = profile_counts(&lat, lat.index(0, 0, 0));
        assert_eq!(even, BTreeMap::from([(1, 4), (4, 2)]));
        let odd = profile_counts(&lat, lat.index(1, 0, 0));
        assert_eq!(odd, BTreeMap::from([(1, 4)]));
        assert_eq!(lat.num_edges(), 160);
    }

    #[test]
    fn ten_qubit_derived_degree_profiles() {
        let lat = build_ten_qubit_derived(4).unwrap();
        let even = profile_counts(&lat, lat.index(2, 0, 3));
        assert_eq!(even, BTreeMap::from([(1, 8), (4, 2)]));
        let odd = profile_counts(&lat, lat.index(1, 2, 1));
        assert_eq!(odd, BTreeMap::from([(1, 4)]));
    }

    #[test]
    fn four_qubit_degree_profiles() {
        let lat = build_four_qubit(4).unwrap();
        for v in 0..lat.num_vertices() {
            let (x, y, _) = lat.coords(v);
            let counts = profile_counts(&lat, v);
            if (x + y) % 2 == 0 {
                assert_eq!(counts, BTreeMap::from([(1, 8), (3, 4), (4, 2)]), "vertex {v}");
            } else {
                assert_eq!(counts, BTreeMap::from([(1, 4)]), "vertex {v}");
            }
        }
    }

    #[test]
    fn four_qubit_translation_period_two() {
        let lat = build_four_qubit(6).unwrap();
        for v in 0..lat.num_vertices() {
            let (x, y, z) = lat.coords(v);
            let shifted = lat.index((x + 2) % 6, y, z);
            assert_eq!(lat.multiplicity_profile(v), lat.multiplicity_profile(shifted));
        }
    }

    #[test]
    fn cubic_counts_and_bipartiteness() {
        let lat = build_cubic(3).unwrap();
        assert_eq!(lat.num_vertices(), 27);
        assert_eq!(lat.num_edges(), 81);
        assert!((0..27).all(|v| lat.degree(v) == 6));
        for l in 3..=6 {
            let lat = build_cubic(l).unwrap();
            let bipartite = lat.edges().iter().all(|e| {
                let (a, b, c) = lat.coords(e.u);
                let (d, f, g) = lat.coords(e.v);
                (a + b + c + d + f + g) % 2 == 1
            });
            assert_eq!(bipartite, l % 2 == 0, "L = {l}");
        }
    }

    #[test]
    fn rejects_bad_sizes() {
        assert_eq!(build_ten_qubit(5).unwrap_err(), LatticeError::OddSize(5));
        assert_eq!(build_four_qubit(2).unwrap_err(), LatticeError::TooSmall { size: 2, min: 4 });
        assert!(build_cubic(2).is_err());
    }

    #[test]
    fn handshake_sums() {
        for lat in [build_four_qubit(4).unwrap(), build_ten_qubit_derived(6).unwrap()] {
            let deg: usize = (0..lat.num_vertices()).map(|v| lat.degree(v)).sum();
            assert_eq!(deg, 2 * lat.num_edges());
            let mult: u32 =
                (0..lat.num_vertices()).map(|v| lat.multiplicity_profile(v).iter().sum::<u32>()).sum();
            let edge_mult: u32 = lat.edges().iter().map(|e| e.multiplicity).sum();
            assert_eq!(mult, 2 * edge_mult);
        }
    }

    #[test]
    fn edge_list_export_format() {
        let lat = build_cubic(3).unwrap();
        let text = lat.to_edge_list();
        let mut lines = text.lines();
        assert_eq!(lines.next(), Some("L 3 MODEL cubic"));
        assert_eq!(lines.count(), 81);
    }

    #[test]
    fn edges_sorted_and_crossings_marked() {
        let lat = build_cubic(4).unwrap();
        let mut prev = (0, 0);
        for (i, e) in lat.edges().iter().enumerate() {
            assert!(e.u < e.v);
            if i > 0 {
                assert!((e.u, e.v) > prev);
            }
            prev = (e.u, e.v);
            let (x1, y1, z1) = lat.coords(e.u);
            let (x2, y2, z2) = lat.coords(e.v);
            let wraps_x = x1.abs_diff(x2) > 1;
            assert_eq!(e.cuts & CUT_X != 0, wraps_x);
            assert_eq!(e.cuts & CUT_Y != 0, y1.abs_diff(y2) > 1);
            assert_eq!(e.cuts & CUT_Z != 0, z1.abs_diff(z2) > 1);
        }
    }
}
