use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Binomial, Distribution};

use super::{CurvePoint, McError};

pub const METHOD: &str = "logistic-mle-crossings+parametric-bootstrap";

#[derive(Debug, Clone, Copy)]
pub struct ThresholdOptions {
    pub bootstrap: usize,
    pub confidence: f64,
    pub seed: u64,
}

impl Default for ThresholdOptions {
    fn default() -> Self {
        Self { bootstrap: 400, confidence: 0.95, seed: 0x5eed }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct ThresholdEstimate {
    pub model: String,
    pub c_error: f64,
    pub c_erasure: f64,
    pub x_th: f64,
    pub p_error_th: f64,
    pub p_erasure_th: f64,
    pub ci: (f64, f64),
    /// Crossing abscissa of every pair of sizes that cross inside the grid.
    pub crossings: Vec<(usize, usize, f64)>,
    pub method: &'static str,
}

/// Failure probability model `σ(a + b·x)` for one lattice size.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LogisticFit {
    pub a: f64,
    pub b: f64,
}

impl LogisticFit {
    pub fn failure_probability(&self, x: f64) -> f64 {
        1.0 / (1.0 + (-(self.a + self.b * x)).exp())
    }
}

/// Maximum-likelihood logistic fit of binomial failure counts by damped Newton.
pub fn fit_logistic(xs: &[f64], trials: &[u64], failures: &[u64]) -> LogisticFit {
    let n = xs.len() as f64;
    let mean = xs.iter().sum::<f64>() / n;
    let sd = (xs.iter().map(|x| (x - mean).powi(2)).sum::<f64>() / n).sqrt().max(1e-12);
    let ts: Vec<f64> = xs.iter().map(|x| (x - mean) / sd).collect();
    // Tiny ridge keeps the Hessian invertible when the data separate perfectly.
    let ridge = 1e-6;
    let loglik = |a: f64, b: f64| -> f64 {
        let mut ll = -0.5 * ridge * (a * a + b * b);
        for ((t, &m), &k) in ts.iter().zip(trials).zip(failures) {
            let eta = a + b * t;
            // log σ(η) = −softplus(−η), log(1 − σ(η)) = −softplus(η)
            ll -= k as f64 * softplus(-eta) + (m - k) as f64 * softplus(eta);
        }
        ll
    };
    let (mut a, mut b) = (0.0, 0.0);
    let mut ll = loglik(a, b);
    for _ in 0..200 {
        let (mut ga, mut gb) = (-ridge * a, -ridge * b);
        let (mut haa, mut hab, mut hbb) = (ridge, 0.0, ridge);
        for ((t, &m), &k) in ts.iter().zip(trials).zip(failures) {
            let p = 1.0 / (1.0 + (-(a + b * t)).exp());
            let r = k as f64 - m as f64 * p;
            ga += r;
            gb += r * t;
            let w = m as f64 * p * (1.0 - p);
            haa += w;
            hab += w * t;
            hbb += w * t * t;
        }
        let det = haa * hbb - hab * hab;
        let da = (hbb * ga - hab * gb) / det;
        let db = (haa * gb - hab * ga) / det;
        let mut step = 1.0;
        let mut improved = false;
        while step > 1e-10 {
            let (na, nb) = (a + step * da, b + step * db);
            let nll = loglik(na, nb);
            if nll >= ll {
                a = na;
                b = nb;
                improved = nll - ll > 1e-13 * ll.abs().max(1.0);
                ll = nll;
                break;
            }
            step *= 0.5;
        }
        if !improved {
            break;
        }
    }
    LogisticFit { a: a - b * mean / sd, b: b / sd }
}

fn softplus(z: f64) -> f64 {
    if z > 0.0 {
        z + (-z).exp().ln_1p()
    } else {
        z.exp().ln_1p()
    }
}

struct Curve {
    l: usize,
    xs: Vec<f64>,
    trials: Vec<u64>,
    failures: Vec<u64>,
}

fn crossings(curves: &[Curve], fits: &[LogisticFit], lo: f64, hi: f64) -> Vec<(usize, usize, f64)> {
    let mut out = Vec::new();
    for i in 0..fits.len() {
        for j in i + 1..fits.len() {
            let db = fits[i].b - fits[j].b;
            if db.abs() < 1e-300 {
                continue;
            }
            let x = (fits[j].a - fits[i].a) / db;
            if x.is_finite() && x >= lo && x <= hi {
                out.push((curves[i].l, curves[j].l, x));
            }
        }
    }
    out
}

fn mean_crossing(c: &[(usize, usize, f64)]) -> Option<f64> {
    (!c.is_empty()).then(|| c.iter().map(|t| t.2).sum::<f64>() / c.len() as f64)
}

/// Threshold along a single ray from curves of at least two sizes.
pub fn estimate_threshold(points: &[CurvePoint], options: ThresholdOptions) -> Result<ThresholdEstimate, McError> {
    let first = points.first().ok_or_else(|| McError::Data("no points".into()))?;
    if points
        .iter()
        .any(|p| p.model != first.model || p.c_error != first.c_error || p.c_erasure != first.c_erasure)
    {
        return Err(McError::Data("points mix several rays".into()));
    }
    let mut sizes: Vec<usize> = points.iter().map(|p| p.l).collect();
    sizes.sort_unstable();
    sizes.dedup();
    if sizes.len() < 2 {
        return Err(McError::Data("need at least two lattice sizes".into()));
    }
    let curves: Vec<Curve> = sizes
        .iter()
        .map(|&l| {
            let mut pts: Vec<&CurvePoint> = points.iter().filter(|p| p.l == l).collect();
            pts.sort_by(|a, b| a.x.total_cmp(&b.x));
            Curve {
                l,
                xs: pts.iter().map(|p| p.x).collect(),
                trials: pts.iter().map(|p| p.samples).collect(),
                failures: pts.iter().map(|p| p.failures).collect(),
            }
        })
        .collect();
    let lo = points.iter().map(|p| p.x).fold(f64::INFINITY, f64::min);
    let hi = points.iter().map(|p| p.x).fold(f64::NEG_INFINITY, f64::max);
    let fits: Vec<LogisticFit> = curves.iter().map(|c| fit_logistic(&c.xs, &c.trials, &c.failures)).collect();
    let cross = crossings(&curves, &fits, lo, hi);
    let x_th = mean_crossing(&cross).ok_or_else(|| McError::Data("no crossing in range".into()))?;

    let mut rng = ChaCha8Rng::seed_from_u64(options.seed);
    let mut boot = Vec::with_capacity(options.bootstrap);
    for _ in 0..options.bootstrap {
        let fits: Vec<LogisticFit> = curves
            .iter()
            .map(|c| {
                let resampled: Vec<u64> = c
                    .trials
                    .iter()
                    .zip(&c.failures)
                    .map(|(&m, &k)| Binomial::new(m, k as f64 / m as f64).unwrap().sample(&mut rng))
                    .collect();
                fit_logistic(&c.xs, &c.trials, &resampled)
            })
            .collect();
        if let Some(x) = mean_crossing(&crossings(&curves, &fits, lo, hi)) {
            boot.push(x);
        }
    }
    let ci = if boot.is_empty() {
        (x_th, x_th)
    } else {
        boot.sort_by(f64::total_cmp);
        let tail = (1.0 - options.confidence) / 2.0;
        let q = |f: f64| boot[((f * (boot.len() - 1) as f64).round() as usize).min(boot.len() - 1)];
        (q(tail).min(x_th), q(1.0 - tail).max(x_th))
    };
    Ok(ThresholdEstimate {
        model: first.model.clone(),
        c_error: first.c_error,
        c_erasure: first.c_erasure,
        x_th,
        p_error_th: first.c_error * x_th,
        p_erasure_th: first.c_erasure * x_th,
        ci,
        crossings: cross,
        method: METHOD,
    })
}

/// Splits a dataset by ray and estimates each threshold.
pub fn estimate_all(points: &[CurvePoint], options: ThresholdOptions) -> Vec<(String, f64, f64, Result<ThresholdEstimate, McError>)> {
    super::rays(points)
        .into_iter()
        .map(|(model, ce, cz)| {
            let subset: Vec<CurvePoint> = points
                .iter()
                .filter(|p| p.model == model && p.c_error == ce && p.c_erasure == cz)
                .cloned()
                .collect();
            let est = estimate_threshold(&subset, options);
            (model, ce, cz, est)
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    fn planted(x0: f64, sizes: &[usize], xs: &[f64], samples: u64) -> Vec<CurvePoint> {
        let mut out = Vec::new();
        for &l in sizes {
            for &x in xs {
                let fail = 1.0 / (1.0 + (-(x - x0) * l as f64 * 40.0).exp());
                let failures = (fail * samples as f64).round() as u64;
                out.push(CurvePoint::new("cubic", l, 0.0, 1.0, x, samples, failures));
            }
        }
        out
    }

    #[test]
    fn recovers_planted_crossing() {
        let xs: Vec<f64> = (0..9).map(|i| 0.08 + 0.005 * i as f64).collect();
        let pts = planted(0.1, &[8, 12, 16], &xs, 100_000);
        let est = estimate_threshold(&pts, ThresholdOptions::default()).unwrap();
        assert!((est.x_th - 0.1).abs() < 0.002, "{}", est.x_th);
        assert!(est.ci.0 <= est.x_th && est.x_th <= est.ci.1);
        assert_eq!(est.crossings.len(), 3);
        assert_eq!(est.p_erasure_th, est.x_th);
    }

    #[test]
    fn fit_recovers_parameters() {
        let xs: Vec<f64> = (0..20).map(|i| i as f64 * 0.05).collect();
        let truth = LogisticFit { a: -3.0, b: 6.0 };
        let trials = vec![1_000_000u64; xs.len()];
        let fails: Vec<u64> =
            xs.iter().map(|&x| (truth.failure_probability(x) * 1e6).round() as u64).collect();
        let fit = fit_logistic(&xs, &trials, &fails);
        assert!((fit.a - truth.a).abs() < 1e-2 && (fit.b - truth.b).abs() < 1e-2, "{fit:?}");
    }

    #[test]
    fn no_crossing_is_an_error() {
        let mut pts = Vec::new();
        for (l, shift) in [(8usize, 0.0), (12, 0.05)] {
            for i in 0..5 {
                let x = 0.1 + 0.01 * i as f64;
                let f = (0.1 + shift + 0.05 * i as f64).min(1.0);
                pts.push(CurvePoint::new("cubic", l, 1.0, 0.0, x, 1000, (f * 1000.0) as u64));
            }
        }
        assert!(estimate_threshold(&pts, ThresholdOptions::default()).is_err());
    }
}
