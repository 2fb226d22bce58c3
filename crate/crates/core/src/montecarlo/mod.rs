//! Monte Carlo estimation of decoding success probabilities along rays
//! `(p_error, p_erasure) = (c_error·x, c_erasure·x)`.

pub mod plot;
pub mod threshold;

use std::collections::BTreeSet;
use std::fs;
use std::path::Path;

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::decoder::{decode_with, sample, DecoderOptions, NoiseParams, NoisyLattice, Scratch};
use crate::lattice::{LatticeError, LatticeModel, PeriodicSyndromeLattice};

pub use threshold::{estimate_threshold, ThresholdEstimate, ThresholdOptions};

pub const CSV_HEADER: [&str; 11] =
    ["model", "L", "c_error", "c_erasure", "x", "p_error", "p_erasure", "samples", "failures", "pi_hat", "stderr"];

#[derive(Debug, Error)]
pub enum McError {
    #[error("ray coefficients must be non-negative and not both zero")]
    BadRay,
    #[error("x = {x} gives out-of-range probabilities ({p_error}, {p_erasure})")]
    OutOfRange { x: f64, p_error: f64, p_erasure: f64 },
    #[error("unknown model `{0}`")]
    Model(String),
    #[error(transparent)]
    Lattice(#[from] LatticeError),
    #[error("decoder failure: {0}")]
    Decode(#[from] crate::decoder::DecodeError),
    #[error("csv: {0}")]
    Csv(#[from] csv::Error),
    #[error("io: {0}")]
    Io(#[from] std::io::Error),
    #[error("config: {0}")]
    Config(#[from] toml::de::Error),
    #[error("{0}")]
    Data(String),
}

/// One ray scan: the sweep configuration file maps onto this directly.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RayConfig {
    pub model: String,
    #[serde(rename = "L_list")]
    pub l_list: Vec<usize>,
    pub c_error: f64,
    pub c_erasure: f64,
    pub x_grid: Vec<f64>,
    pub samples: u64,
    pub master_seed: u64,
}

impl RayConfig {
    pub fn from_toml(text: &str) -> Result<Self, McError> {
        let cfg: RayConfig = toml::from_str(text)?;
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn lattice_model(&self) -> Result<LatticeModel, McError> {
        self.model.parse().map_err(|_| McError::Model(self.model.clone()))
    }

    pub fn validate(&self) -> Result<(), McError> {
        self.lattice_model()?;
        if self.c_error < 0.0 || self.c_erasure < 0.0 || (self.c_error == 0.0 && self.c_erasure == 0.0) {
            return Err(McError::BadRay);
        }
        for &x in &self.x_grid {
            ray_params(self.c_error, self.c_erasure, x)?;
        }
        Ok(())
    }
}

pub fn ray_params(c_error: f64, c_erasure: f64, x: f64) -> Result<NoiseParams, McError> {
    let (p_error, p_erasure) = (c_error * x, c_erasure * x);
    NoiseParams::new(p_error, p_erasure).map_err(|_| McError::OutOfRange { x, p_error, p_erasure })
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CurvePoint {
    pub model: String,
    #[serde(rename = "L")]
    pub l: usize,
    pub c_error: f64,
    pub c_erasure: f64,
    pub x: f64,
    pub p_error: f64,
    pub p_erasure: f64,
    pub samples: u64,
    pub failures: u64,
    pub pi_hat: f64,
    pub stderr: f64,
}

impl CurvePoint {
    pub fn new(model: &str, l: usize, c_error: f64, c_erasure: f64, x: f64, samples: u64, failures: u64) -> Self {
        let pi_hat = 1.0 - failures as f64 / samples as f64;
        Self {
            model: model.to_string(),
            l,
            c_error,
            c_erasure,
            x,
            p_error: c_error * x,
            p_erasure: c_erasure * x,
            samples,
            failures,
            pi_hat,
            stderr: (pi_hat * (1.0 - pi_hat) / samples as f64).sqrt(),
        }
    }
}

fn splitmix64(mut z: u64) -> u64 {
    z = z.wrapping_add(0x9E37_79B9_7F4A_7C15);
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

/// Seed of the RNG stream for one sample, a pure function of its coordinates.
pub fn sample_seed(master_seed: u64, l: usize, x_index: usize, sample_index: u64) -> u64 {
    let mut h = splitmix64(master_seed);
    for part in [l as u64, x_index as u64, sample_index] {
        h = splitmix64(h ^ part);
    }
    h
}

/// Counts decoding failures for samples `0..samples` at one parameter point.
pub fn count_failures(
    lattice: &PeriodicSyndromeLattice,
    params: NoiseParams,
    samples: u64,
    master_seed: u64,
    x_index: usize,
) -> Result<u64, McError> {
    let noisy = NoisyLattice::new(lattice, params);
    let l = lattice.size();
    (0..samples)
        .into_par_iter()
        .map_init(Scratch::new, |scratch, i| {
            let mut rng = ChaCha8Rng::seed_from_u64(sample_seed(master_seed, l, x_index, i));
            let s = sample(&noisy, &mut rng);
            decode_with(&noisy, &s, DecoderOptions::default(), scratch).map(|r| r.failed as u64)
        })
        .try_reduce(|| 0, |a, b| Ok(a + b))
        .map_err(McError::from)
}

/// Evaluates one `(L, x)` point. `x_index` is the position of `x` in the grid
/// and feeds the per-sample seeds.
#[allow(clippy::too_many_arguments)]
pub fn run_point(
    model: LatticeModel,
    l: usize,
    c_error: f64,
    c_erasure: f64,
    x: f64,
    x_index: usize,
    samples: u64,
    master_seed: u64,
) -> Result<CurvePoint, McError> {
    let params = ray_params(c_error, c_erasure, x)?;
    let lattice = model.build(l)?;
    let failures = count_failures(&lattice, params, samples, master_seed, x_index)?;
    Ok(CurvePoint::new(model.name(), l, c_error, c_erasure, x, samples, failures))
}

/// All points of a configuration in output order (L-major, then x).
pub fn sweep(cfg: &RayConfig) -> Result<Vec<CurvePoint>, McError> {
    sweep_resuming(cfg, &[])
}

/// Like [`sweep`] but reuses points already present in `done` (matched on
/// model, L, ray and x).
pub fn sweep_resuming(cfg: &RayConfig, done: &[CurvePoint]) -> Result<Vec<CurvePoint>, McError> {
    cfg.validate()?;
    let model = cfg.lattice_model()?;
    let mut out = Vec::new();
    for &l in &cfg.l_list {
        let mut lattice = None;
        for (xi, &x) in cfg.x_grid.iter().enumerate() {
            let existing = done.iter().find(|p| {
                p.model == model.name()
                    && p.l == l
                    && p.c_error == cfg.c_error
                    && p.c_erasure == cfg.c_erasure
                    && p.x == x
                    && p.samples == cfg.samples
            });
            if let Some(p) = existing {
                out.push(p.clone());
                continue;
            }
            if lattice.is_none() {
                lattice = Some(model.build(l)?);
            }
            let params = ray_params(cfg.c_error, cfg.c_erasure, x)?;
            let failures = count_failures(lattice.as_ref().unwrap(), params, cfg.samples, cfg.master_seed, xi)?;
            out.push(CurvePoint::new(model.name(), l, cfg.c_error, cfg.c_erasure, x, cfg.samples, failures));
        }
    }
    Ok(out)
}

pub fn write_csv<W: std::io::Write>(points: &[CurvePoint], writer: W) -> Result<(), McError> {
    let mut w = csv::WriterBuilder::new().has_headers(false).from_writer(writer);
    w.write_record(CSV_HEADER)?;
    for p in points {
        w.serialize(p)?;
    }
    w.flush()?;
    Ok(())
}

pub fn read_csv<R: std::io::Read>(reader: R) -> Result<Vec<CurvePoint>, McError> {
    let mut r = csv::Reader::from_reader(reader);
    let header: Vec<String> = r.headers()?.iter().map(str::to_string).collect();
    if header != CSV_HEADER {
        return Err(McError::Data(format!("unexpected csv header {header:?}")));
    }
    let mut out = Vec::new();
    for row in r.deserialize() {
        out.push(row?);
    }
    if out.is_empty() {
        return Err(McError::Data("csv has no data rows".into()));
    }
    Ok(out)
}

/// Runs a sweep into `path`. Rows already there are reused when they match
/// the configuration; rows of other rays or models are kept in front.
pub fn sweep_to_file(cfg: &RayConfig, path: &Path) -> Result<Vec<CurvePoint>, McError> {
    let done = match fs::File::open(path) {
        Ok(f) => read_csv(f).unwrap_or_default(),
        Err(_) => Vec::new(),
    };
    let name = cfg.lattice_model()?.name();
    let points = sweep_resuming(cfg, &done)?;
    let mut all: Vec<CurvePoint> = done
        .into_iter()
        .filter(|p| !(p.model == name && p.c_error == cfg.c_error && p.c_erasure == cfg.c_erasure))
        .collect();
    all.extend(points.iter().cloned());
    let tmp = path.with_extension("csv.partial");
    write_csv(&all, fs::File::create(&tmp)?)?;
    fs::rename(&tmp, path)?;
    Ok(points)
}

/// Distinct `(model, c_error, c_erasure)` rays in a dataset, in first-seen order.
pub fn rays(points: &[CurvePoint]) -> Vec<(String, f64, f64)> {
    let mut seen = BTreeSet::new();
    let mut out = Vec::new();
    for p in points {
        let key = (p.model.clone(), p.c_error.to_bits(), p.c_erasure.to_bits());
        if seen.insert(key) {
            out.push((p.model.clone(), p.c_error, p.c_erasure));
        }
    }
    out
}
