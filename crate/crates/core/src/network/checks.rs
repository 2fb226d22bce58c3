//! The check group `C = R ∩ F` of a Clifford fusion network and a sparse
//! generating set for it.
//!
//! A subset `k` of observables is a check exactly when `∏_{j∈k} f_j` lies in
//! the resource group `R` up to sign, i.e. when it commutes with the
//! symplectic complement of `R`. That complement is generated by the
//! complement of each resource state's group on its own qubits plus the full
//! single-qubit Pauli group on input ports, so `C` is the kernel of a sparse
//! GF(2) matrix with one row per complement generator and one column per
//! observable.
//!
//! Generators are chosen locally: from every observable the search grows a
//! ball of nearby observables, computes the kernel restricted to the ball and
//! keeps the lightest kernel elements containing the seed. A weight-ordered
//! greedy pass turns the candidates into a basis; the one dependent element
//! per closed component (the missing cell) is then re-added, so that every
//! observable ends up in at most two checks where the geometry allows it.
//! Generators with no local representative are reported separately.

use std::collections::{BTreeMap, BTreeSet};

use super::{FusionNetwork, NetworkError, Slot};
use crate::gf2::{bit, count, nullspace, ones, set, unit, xor_into, zeros, Echelon};
use crate::pauli::{PauliOperator, SpanBasis};

/// One check: `operator` is the ordered product of the observables listed in
/// `decomposition`, and `expected_sign · operator` is an element of the
/// resource group. In a noiseless run the product of the measured
/// eigenvalues therefore equals `expected_sign`.
#[derive(Debug, Clone, PartialEq)]
pub struct Check {
    pub operator: PauliOperator,
    pub expected_sign: i8,
    pub decomposition: Vec<usize>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct CheckGroup {
    /// Local generators; every observable lies in at most two of them when
    /// the network has a syndrome-graph structure.
    pub checks: Vec<Check>,
    /// Further generators needed to span `C` that have no local
    /// representative, such as closed membranes of a periodic network.
    pub global: Vec<Check>,
    pub num_observables: usize,
    /// Rank of `C`. Dependent cells added to close components make
    /// `checks.len() + global.len()` exceed it by one per closed component.
    pub dimension: usize,
}

impl CheckGroup {
    /// Number of local checks containing each observable.
    pub fn coverage(&self) -> Vec<usize> {
        let mut c = vec![0; self.num_observables];
        for check in &self.checks {
            for &j in &check.decomposition {
                c[j] += 1;
            }
        }
        c
    }
}

const MAX_RADIUS: usize = 12;
const MAX_BALL: usize = 1500;
const MAX_ENUMERATION_DIM: usize = 16;

struct Kernel {
    m: usize,
    /// Constraint rows with odd symplectic product, per observable.
    cols: Vec<Vec<usize>>,
    /// Observables per constraint row.
    rows: Vec<Vec<usize>>,
}

impl Kernel {
    fn build(net: &FusionNetwork) -> Result<Self, NetworkError> {
        let slots = net.slots()?;
        // Sparse constraint rows as (qubit, x, z) factors.
        let mut constraints: Vec<Vec<(usize, bool, bool)>> = Vec::new();
        for res in net.resources() {
            if res.decoration.is_some() {
                return Err(NetworkError::NonCliffordResource);
            }
            let k = res.qubits.len();
            let gens = res.group.generators();
            let local: Vec<Vec<(usize, bool, bool)>> = if gens.len() == k {
                gens.iter()
                    .map(|g| (0..k).filter(|&q| g.x_bit(q) || g.z_bit(q)).map(|q| (q, g.x_bit(q), g.z_bit(q))).collect())
                    .collect()
            } else {
                // Rows swapped to (z | x) so that the ordinary dot product is symplectic.
                let rows: Vec<Vec<u64>> = gens
                    .iter()
                    .map(|g| {
                        let mut v = zeros(2 * k);
                        for q in 0..k {
                            if g.z_bit(q) {
                                set(&mut v, q);
                            }
                            if g.x_bit(q) {
                                set(&mut v, k + q);
                            }
                        }
                        v
                    })
                    .collect();
                nullspace(&rows, 2 * k)
                    .iter()
                    .map(|v| {
                        (0..k).filter(|&q| bit(v, q) || bit(v, k + q)).map(|q| (q, bit(v, q), bit(v, k + q))).collect()
                    })
                    .collect()
            };
            for row in local {
                constraints.push(row.into_iter().map(|(q, x, z)| (res.qubits[q], x, z)).collect());
            }
        }
        for (q, s) in slots.iter().enumerate() {
            if let Slot::Input(_) = s {
                constraints.push(vec![(q, true, false)]);
                constraints.push(vec![(q, false, true)]);
            }
        }
        let mut touching: Vec<Vec<(usize, bool, bool)>> = vec![Vec::new(); net.num_qubits()];
        for (i, row) in constraints.iter().enumerate() {
            for &(q, x, z) in row {
                touching[q].push((i, x, z));
            }
        }
        let m = net.num_observables();
        let mut cols = Vec::with_capacity(m);
        let mut rows = vec![Vec::new(); constraints.len()];
        for j in 0..m {
            let mut parity: BTreeMap<usize, bool> = BTreeMap::new();
            for (q, p) in net.observable_factors(j) {
                let (px, pz) = p.bits();
                for &(i, cx, cz) in &touching[q] {
                    if (cx && pz) ^ (cz && px) {
                        *parity.entry(i).or_insert(false) ^= true;
                    }
                }
            }
            let col: Vec<usize> = parity.into_iter().filter(|&(_, odd)| odd).map(|(i, _)| i).collect();
            for &i in &col {
                rows[i].push(j);
            }
            cols.push(col);
        }
        Ok(Self { m, cols, rows })
    }

    fn neighbours(&self, j: usize) -> impl Iterator<Item = usize> + '_ {
        self.cols[j].iter().flat_map(move |&i| self.rows[i].iter().copied())
    }

    /// Dimension of the full kernel and a basis of it.
    fn global(&self) -> (usize, Vec<Vec<u64>>) {
        let mut ech = Echelon::new(self.m);
        let nrows = self.rows.len();
        let mut basis = Vec::new();
        for j in 0..self.m {
            let mut v = zeros(nrows);
            for &i in &self.cols[j] {
                set(&mut v, i);
            }
            if let Err(combo) = ech.insert(v, unit(self.m, j)) {
                basis.push(combo);
            }
        }
        (basis.len(), basis)
    }

    /// Lightest admissible kernel elements containing `seed`, within the
    /// smallest ball around it that supports any.
    fn lightest_around(&self, seed: usize, admissible: &dyn Fn(&[usize]) -> bool) -> Vec<Vec<usize>> {
        let mut ball = vec![seed];
        let mut inside: BTreeSet<usize> = BTreeSet::from([seed]);
        let mut frontier = vec![seed];
        for _ in 0..MAX_RADIUS {
            let mut next = Vec::new();
            for &j in &frontier {
                for n in self.neighbours(j) {
                    if inside.insert(n) {
                        next.push(n);
                    }
                }
            }
            ball.extend(&next);
            frontier = next;
            if ball.len() > MAX_BALL {
                return Vec::new();
            }
            let found = self.lightest_in(&ball, admissible);
            if !found.is_empty() {
                return found;
            }
            if frontier.is_empty() {
                return Vec::new();
            }
        }
        Vec::new()
    }

    fn lightest_in(&self, ball: &[usize], admissible: &dyn Fn(&[usize]) -> bool) -> Vec<Vec<usize>> {
        let w = ball.len();
        let mut row_index: BTreeMap<usize, usize> = BTreeMap::new();
        for &j in ball {
            for &i in &self.cols[j] {
                let next = row_index.len();
                row_index.entry(i).or_insert(next);
            }
        }
        let nr = row_index.len();
        let mut ech = Echelon::new(w);
        let mut basis: Vec<Vec<u64>> = Vec::new();
        for (k, &j) in ball.iter().enumerate() {
            let mut v = zeros(nr);
            for i in &self.cols[j] {
                set(&mut v, row_index[i]);
            }
            if let Err(combo) = ech.insert(v, unit(w, k)) {
                basis.push(combo);
            }
        }
        if !basis.iter().any(|b| bit(b, 0)) {
            return Vec::new();
        }
        let globalize = |v: &[u64]| -> Vec<usize> {
            let mut s: Vec<usize> = ones(v).into_iter().map(|k| ball[k]).collect();
            s.sort_unstable();
            s
        };
        let mut best = usize::MAX;
        let mut out: Vec<Vec<u64>> = Vec::new();
        let consider = |v: &Vec<u64>, best: &mut usize, out: &mut Vec<Vec<u64>>| {
            if !bit(v, 0) {
                return;
            }
            let c = count(v);
            if c > *best || !admissible(&globalize(v)) {
                return;
            }
            if c < *best {
                *best = c;
                out.clear();
            }
            if !out.contains(v) {
                out.push(v.clone());
            }
        };
        let d = basis.len();
        if d <= MAX_ENUMERATION_DIM {
            let mut cur = zeros(w);
            for g in 1u64..(1u64 << d) {
                xor_into(&mut cur, &basis[g.trailing_zeros() as usize]);
                consider(&cur, &mut best, &mut out);
            }
        } else {
            for start in basis.iter().filter(|b| bit(b, 0)) {
                let mut cur = start.clone();
                loop {
                    let mut improved = false;
                    for b in &basis {
                        let mut t = cur.clone();
                        xor_into(&mut t, b);
                        if bit(&t, 0) && count(&t) < count(&cur) {
                            cur = t;
                            improved = true;
                        }
                    }
                    if !improved {
                        break;
                    }
                }
                consider(&cur, &mut best, &mut out);
            }
        }
        out.iter().map(|v| globalize(v)).collect()
    }
}

fn as_bits(m: usize, set_: &[usize]) -> Vec<u64> {
    let mut v = zeros(m);
    for &j in set_ {
        set(&mut v, j);
    }
    v
}

/// Computes the check group of a Clifford network together with a sparse
/// generating set and the expected sign of every check.
pub fn compute_check_group(network: &FusionNetwork) -> Result<CheckGroup, NetworkError> {
    network.validate()?;
    if !network.is_clifford() {
        return Err(NetworkError::NonCliffordResource);
    }
    let kernel = Kernel::build(network)?;
    let m = kernel.m;
    let (dimension, dense) = kernel.global();

    let mut selected: Vec<Vec<usize>> = Vec::new();
    let mut ech = Echelon::new(0);
    let mut coverage = vec![0usize; m];
    let accept = |s: Vec<usize>, ech: &mut Echelon, selected: &mut Vec<Vec<usize>>, coverage: &mut Vec<usize>| {
        if ech.insert(as_bits(m, &s), vec![0]).is_ok() {
            for &j in &s {
                coverage[j] += 1;
            }
            selected.push(s);
            true
        } else {
            false
        }
    };

    let mut candidates: BTreeSet<(usize, Vec<usize>)> = BTreeSet::new();
    let mut hits = vec![0usize; m];
    for j in 0..m {
        if hits[j] >= 2 {
            continue;
        }
        for s in kernel.lightest_around(j, &|_| true) {
            for &o in &s {
                hits[o] += 1;
            }
            candidates.insert((s.len(), s));
        }
    }
    for (_, s) in candidates {
        accept(s, &mut ech, &mut selected, &mut coverage);
    }

    // Cells missed above, including the dependent cell of each closed
    // component: lightest local elements made only of observables that are
    // still covered once.
    for j in 0..m {
        if coverage[j] != 1 {
            continue;
        }
        let once = |s: &[usize]| s.iter().all(|&o| coverage[o] == 1) && !selected.iter().any(|t| t == s);
        if let Some(s) = kernel.lightest_around(j, &once).into_iter().next() {
            for &o in &s {
                coverage[o] += 1;
            }
            let _ = ech.insert(as_bits(m, &s), vec![0]);
            selected.push(s);
        }
    }
    recombine(&mut selected, m);

    // Whatever the local checks miss is non-local (e.g. closed membranes of
    // a periodic network); complete the basis and shorten those elements
    // with local checks where possible.
    let mut global: Vec<Vec<usize>> = Vec::new();
    for v in dense {
        if ech.rank() == dimension {
            break;
        }
        let mut bits = v;
        if ech.insert(bits.clone(), vec![0]).is_err() {
            continue;
        }
        loop {
            let mut improved = false;
            for s in &selected {
                let mut t = bits.clone();
                xor_into(&mut t, &as_bits(m, s));
                if count(&t) < count(&bits) {
                    bits = t;
                    improved = true;
                }
            }
            if !improved {
                break;
            }
        }
        global.push(ones(&bits));
    }

    let rgroup = network.resource_group()?;
    let rspan = SpanBasis::new(&rgroup);
    let observables = network.observables();
    selected.sort();
    let signed = |sets: Vec<Vec<usize>>| -> Result<Vec<Check>, NetworkError> {
        sets.into_iter()
            .map(|s| {
                let mut op = PauliOperator::identity(network.num_qubits());
                for &j in &s {
                    op = op.multiply(&observables[j])?;
                }
                let d = rspan
                    .decompose(&op)?
                    .ok_or_else(|| NetworkError::Invalid("selected check lies outside the resource group".into()))?;
                Ok(Check { operator: op, expected_sign: d.sign, decomposition: s })
            })
            .collect()
    };
    Ok(CheckGroup { checks: signed(selected)?, global: signed(global)?, num_observables: m, dimension })
}

/// Greedy recombination: while some observable sits in three or more checks,
/// replace one of them by its sum with another when that lowers the total
/// excess coverage.
fn recombine(selected: &mut [Vec<usize>], m: usize) {
    let excess = |sel: &[Vec<usize>]| -> usize {
        let mut c = vec![0usize; m];
        for s in sel {
            for &j in s {
                c[j] += 1;
            }
        }
        c.iter().map(|&k| k.saturating_sub(2)).sum()
    };
    let mut current = excess(selected);
    let mut rounds = 0;
    while current > 0 && rounds < 64 {
        rounds += 1;
        let mut best: Option<(usize, usize, usize)> = None;
        for a in 0..selected.len() {
            for b in 0..selected.len() {
                if a == b {
                    continue;
                }
                let sa: BTreeSet<usize> = selected[a].iter().copied().collect();
                let sb: BTreeSet<usize> = selected[b].iter().copied().collect();
                if sa.is_disjoint(&sb) {
                    continue;
                }
                let sum: Vec<usize> = sa.symmetric_difference(&sb).copied().collect();
                let old = std::mem::replace(&mut selected[a], sum);
                let e = excess(selected);
                selected[a] = old;
                if e < best.map_or(current, |x| x.2) {
                    best = Some((a, b, e));
                }
            }
        }
        let Some((a, b, e)) = best else { break };
        let sa: BTreeSet<usize> = selected[a].iter().copied().collect();
        let sb: BTreeSet<usize> = selected[b].iter().copied().collect();
        selected[a] = sa.symmetric_difference(&sb).copied().collect();
        current = e;
    }
}
