use rand::Rng;
use thiserror::Error;

use crate::lattice::PeriodicSyndromeLattice;

/// Fixed-point scale applied to log-likelihood weights before matching.
pub const WEIGHT_SCALE: f64 = (1u64 << 20) as f64;

/// Sentinel for an edge that can never flip unless erased.
pub const IMPASSABLE: i64 = i64::MAX;

#[derive(Debug, Error, PartialEq)]
pub enum NoiseError {
    #[error("p_error = {0} outside [0, 0.5]")]
    ErrorRate(f64),
    #[error("p_erasure = {0} outside [0, 1]")]
    ErasureRate(f64),
    #[error("multiplicity must be at least 1")]
    ZeroMultiplicity,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct NoiseParams {
    pub p_error: f64,
    pub p_erasure: f64,
}

impl NoiseParams {
    pub fn new(p_error: f64, p_erasure: f64) -> Result<Self, NoiseError> {
        if !(0.0..=0.5).contains(&p_error) {
            return Err(NoiseError::ErrorRate(p_error));
        }
        if !(0.0..=1.0).contains(&p_erasure) {
            return Err(NoiseError::ErasureRate(p_erasure));
        }
        Ok(Self { p_error, p_erasure })
    }
}

/// Effective parameters of `m` parallel observables merged into one edge.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Collapse {
    pub p_err: f64,
    pub p_ers: f64,
    /// `ln((1 − p_err)/p_err)`; `+∞` when `p_err = 0`.
    pub weight: f64,
}

pub fn collapse(m: u32, params: NoiseParams) -> Result<Collapse, NoiseError> {
    if m == 0 {
        return Err(NoiseError::ZeroMultiplicity);
    }
    let m = m as i32;
    let p_err = (1.0 - (1.0 - 2.0 * params.p_error).powi(m)) / 2.0;
    let p_ers = 1.0 - (1.0 - params.p_erasure).powi(m);
    let weight = if p_err == 0.0 { f64::INFINITY } else { ((1.0 - p_err) / p_err).ln() };
    Ok(Collapse { p_err, p_ers, weight })
}

/// Quantised matching weight, [`IMPASSABLE`] for infinite weights.
pub fn quantize(weight: f64) -> i64 {
    if weight.is_finite() {
        (weight * WEIGHT_SCALE).round().max(0.0) as i64
    } else {
        IMPASSABLE
    }
}

/// A lattice together with the collapsed per-edge noise for one parameter point.
#[derive(Debug, Clone)]
pub struct NoisyLattice<'a> {
    pub lattice: &'a PeriodicSyndromeLattice,
    pub params: NoiseParams,
    pub collapsed: Vec<Collapse>,
    /// Quantised weight of each edge when not erased.
    pub weights: Vec<i64>,
}

impl<'a> NoisyLattice<'a> {
    pub fn new(lattice: &'a PeriodicSyndromeLattice, params: NoiseParams) -> Self {
        // Only a handful of distinct multiplicities occur, so cache by m.
        let mut cache: Vec<Option<Collapse>> = Vec::new();
        let mut collapsed = Vec::with_capacity(lattice.num_edges());
        for e in lattice.edges() {
            let m = e.multiplicity as usize;
            if cache.len() <= m {
                cache.resize(m + 1, None);
            }
            let c = *cache[m].get_or_insert_with(|| collapse(e.multiplicity, params).unwrap());
            collapsed.push(c);
        }
        let weights = collapsed.iter().map(|c| quantize(c.weight)).collect();
        Self { lattice, params, collapsed, weights }
    }
}

#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct NoiseSample {
    pub erased: Vec<usize>,
    pub flipped: Vec<usize>,
    pub defects: Vec<usize>,
}

impl NoiseSample {
    /// Builds a sample from explicit erased/flipped edge sets, deriving defects.
    pub fn from_edges(lattice: &PeriodicSyndromeLattice, mut erased: Vec<usize>, mut flipped: Vec<usize>) -> Self {
        erased.sort_unstable();
        erased.dedup();
        flipped.sort_unstable();
        flipped.dedup();
        let defects = lattice.boundary(&flipped);
        Self { erased, flipped, defects }
    }

    pub fn debug_dump(&self, lattice: &PeriodicSyndromeLattice, correction: &[usize]) -> String {
        use std::fmt::Write as _;
        let mut out = String::new();
        let mut line = |tag: &str, ids: &[usize]| {
            write!(out, "{tag}").unwrap();
            for &id in ids {
                let e = lattice.edges()[id];
                write!(out, " {:?}-{:?}", lattice.coords(e.u), lattice.coords(e.v)).unwrap();
            }
            out.push('\n');
        };
        line("erased", &self.erased);
        line("flipped", &self.flipped);
        line("correction", correction);
        out
    }
}

/// Draws erasures and flips independently per edge. An erased edge's flip is a
/// fair coin.
pub fn sample<R: Rng + ?Sized>(noisy: &NoisyLattice<'_>, rng: &mut R) -> NoiseSample {
    let mut erased = Vec::new();
    let mut flipped = Vec::new();
    let n = noisy.lattice.num_vertices();
    let mut parity = vec![false; n];
    for (id, (c, e)) in noisy.collapsed.iter().zip(noisy.lattice.edges()).enumerate() {
        let flip = if c.p_ers > 0.0 && rng.random::<f64>() < c.p_ers {
            erased.push(id);
            rng.random::<bool>()
        } else {
            c.p_err > 0.0 && rng.random::<f64>() < c.p_err
        };
        if flip {
            flipped.push(id);
            parity[e.u] ^= true;
            parity[e.v] ^= true;
        }
    }
    let defects = parity.iter().enumerate().filter_map(|(v, &odd)| odd.then_some(v)).collect();
    NoiseSample { erased, flipped, defects }
}
