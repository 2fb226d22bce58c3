//! End-to-end acceptance run. Prints one PASS/FAIL line per criterion and
//! exits non-zero if any criterion fails.

use std::cmp::Reverse;
use std::collections::BinaryHeap;
use std::panic::{self, AssertUnwindSafe};
use std::path::PathBuf;
use std::process::{Command, ExitCode};
use std::time::{Duration, Instant};

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use ftfn::decoder::{collapse, decode, sample, NoiseParams, NoiseSample, NoisyLattice};
use ftfn::lattice::{build_cubic, build_four_qubit, build_ten_qubit, build_ten_qubit_derived, cross_validate, LatticeModel};
use ftfn::montecarlo::{self, estimate_threshold, CurvePoint, RayConfig, ThresholdEstimate, ThresholdOptions};
use ftfn::network::{
    build_foliated_network, build_foliated_network_with, build_raussendorf_equivalent, compute_check_group,
    extract_syndrome_graph, FoliationOptions, NetworkModel, SurfaceCode, TimeBoundary,
};
use ftfn::verify::{algebra_suite, cyclization_check, validate_check_group};

struct Outcome {
    passed: bool,
    detail: String,
}

fn outcome(passed: bool, detail: impl Into<String>) -> Outcome {
    Outcome { passed, detail: detail.into() }
}

fn within_budget(elapsed: Duration, minutes: u64) -> bool {
    elapsed <= Duration::from_secs(60 * minutes)
}

fn algebra() -> Outcome {
    let t = Instant::now();
    let items = algebra_suite(&mut ChaCha8Rng::seed_from_u64(101)).unwrap();
    let elapsed = t.elapsed();
    let failed: Vec<String> = items.iter().filter(|i| !i.passed).map(|i| format!("{} ({})", i.name, i.detail)).collect();
    let worst: Vec<&str> = items.iter().map(|i| i.detail.as_str()).collect();
    outcome(
        failed.is_empty() && items.len() == 6 && within_budget(elapsed, 1),
        if failed.is_empty() {
            format!("{} identities in {elapsed:.1?}: {}", items.len(), worst.join("; "))
        } else {
            format!("failed: {}", failed.join("; "))
        },
    )
}

fn cyclization() -> Outcome {
    let t = Instant::now();
    let r = cyclization_check(1000, &mut ChaCha8Rng::seed_from_u64(102)).unwrap();
    let elapsed = t.elapsed();
    outcome(
        r.passed() && r.runs == 1000 && within_budget(elapsed, 1),
        format!(
            "{} runs in {elapsed:.1?}: parity projection {}/{} cyclized, {}/{} plain; loop check +1 in {}/{}; \
             eigenspace counts {:?}",
            r.runs, r.cyclized_matches, r.runs, r.plain_matches, r.runs, r.checks_satisfied, r.runs, r.projections
        ),
    )
}

fn check_group_oracle() -> Outcome {
    let t = Instant::now();
    let mut ok = true;
    let mut parts = Vec::new();
    for model in [NetworkModel::FourQubit, NetworkModel::TenQubit] {
        let net = build_foliated_network(2, 2, 1, model).unwrap();
        let cg = compute_check_group(&net).unwrap();
        let v = validate_check_group(&net, &cg).unwrap();
        ok &= v.passed() && !cg.checks.is_empty();
        parts.push(format!(
            "{model:?}: dim C {} (intersection {}), {} generators, {} negative, {} failing in_span",
            v.dimension, v.intersection_rank, v.checks, v.negative_signs, v.invalid
        ));
    }
    let elapsed = t.elapsed();
    outcome(ok && within_budget(elapsed, 5), format!("{} in {elapsed:.1?}", parts.join("; ")))
}

fn lattice_equivalence() -> Outcome {
    let t = Instant::now();
    let code = SurfaceCode::rotated(4, 4).unwrap();
    let derived = |model| {
        let net = build_foliated_network_with(&code, FoliationOptions { model, rounds: 4, time: TimeBoundary::Periodic })
            .unwrap();
        extract_syndrome_graph(&compute_check_group(&net).unwrap()).unwrap()
    };
    let four = derived(NetworkModel::FourQubit);
    let ten = derived(NetworkModel::TenQubit);
    let layered = extract_syndrome_graph(&compute_check_group(&build_raussendorf_equivalent(4, 4, 4).unwrap()).unwrap())
        .unwrap();
    let r4 = cross_validate(&build_four_qubit(4).unwrap(), &four).unwrap();
    let r10 = cross_validate(&build_ten_qubit_derived(4).unwrap(), &ten).unwrap();
    let rc = cross_validate(&build_cubic(4).unwrap(), &layered).unwrap();
    // The planar-only ten-qubit rules must be told apart from the network.
    let planar = cross_validate(&build_ten_qubit(4).unwrap(), &ten).unwrap();
    let elapsed = t.elapsed();
    let passed = r4.passed
        && r10.passed
        && rc.passed
        && !planar.passed
        && [&r4, &r10, &rc].iter().all(|r| r.components_checked == 2)
        && within_budget(elapsed, 5);
    let mut detail = format!(
        "L=4 in {elapsed:.1?}: four-qubit {:?} {}, ten-qubit {:?} {}, cubic {:?} {}; \
         planar-only ten-qubit rules {} (network adds diagonal m=1 edges: {:?} vs {:?})",
        r4.lattice_edge_classes,
        verdict(r4.passed),
        r10.lattice_edge_classes,
        verdict(r10.passed),
        rc.lattice_edge_classes,
        verdict(rc.passed),
        if planar.passed { "match (unexpected)" } else { "rejected" },
        planar.derived_edge_classes,
        planar.lattice_edge_classes,
    );
    for r in [&r4, &r10, &rc] {
        if !r.passed {
            detail.push_str(&format!("; differences: {}", r.differences.join(", ")));
        }
    }
    outcome(passed, detail)
}

fn verdict(ok: bool) -> &'static str {
    if ok {
        "match"
    } else {
        "MISMATCH"
    }
}

/// Shortest-path distances from `src` with erased edges at zero weight.
fn distances(noisy: &NoisyLattice<'_>, erased: &[usize], src: usize) -> Vec<Option<i64>> {
    let lat = noisy.lattice;
    let mut dist = vec![None; lat.num_vertices()];
    let mut heap = BinaryHeap::from([Reverse((0i64, src))]);
    while let Some(Reverse((d, v))) = heap.pop() {
        if dist[v].is_some() {
            continue;
        }
        dist[v] = Some(d);
        for &(u, e) in lat.neighbors(v) {
            let w = if erased.contains(&e) { Some(0) } else { collapse_weight(noisy, e) };
            if let (Some(w), None) = (w, dist[u]) {
                heap.push(Reverse((d + w, u)));
            }
        }
    }
    dist
}

fn collapse_weight(noisy: &NoisyLattice<'_>, e: usize) -> Option<i64> {
    let w = noisy.weights[e];
    (w != i64::MAX).then_some(w)
}

/// Minimum over all perfect pairings, by exhaustive recursion.
fn brute_force_pairing(d: &[Vec<Option<i64>>], left: &mut Vec<usize>) -> Option<i64> {
    let Some(first) = left.pop() else { return Some(0) };
    let mut best: Option<i64> = None;
    for i in 0..left.len() {
        let other = left.remove(i);
        if let (Some(w), Some(rest)) = (d[first][other], brute_force_pairing(d, left)) {
            best = Some(best.map_or(w + rest, |b| b.min(w + rest)));
        }
        left.insert(i, other);
    }
    left.push(first);
    best
}

fn decoder_exactness() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(105);
    let models = [LatticeModel::FourQubit, LatticeModel::TenQubit, LatticeModel::Cubic];
    let lattices: Vec<_> = models.iter().map(|m| m.build(6).unwrap()).collect();
    let (mut agree, mut total, mut defect_hist) = (0, 0, [0usize; 5]);
    let mut mismatch = Vec::new();
    while total < 200 {
        let lat = &lattices[total % 3];
        let p_error = rng.random_range(0.002..0.02);
        let p_erasure = if rng.random_bool(0.5) { rng.random_range(0.0..0.15) } else { 0.0 };
        let noisy = NoisyLattice::new(lat, NoiseParams::new(p_error, p_erasure).unwrap());
        let smp: NoiseSample = sample(&noisy, &mut rng);
        if smp.defects.is_empty() || smp.defects.len() > 8 {
            continue;
        }
        let d: Vec<Vec<Option<i64>>> = smp
            .defects
            .iter()
            .map(|&a| {
                let row = distances(&noisy, &smp.erased, a);
                smp.defects.iter().map(|&b| row[b]).collect()
            })
            .collect();
        let mut idx: Vec<usize> = (0..smp.defects.len()).collect();
        let brute = brute_force_pairing(&d, &mut idx).expect("a pairing exists");
        let got = decode(&noisy, &smp).unwrap().matching_weight;
        defect_hist[smp.defects.len() / 2] += 1;
        if got == brute {
            agree += 1;
        } else if mismatch.len() < 3 {
            mismatch.push(format!("{} defects: mwpm {got} vs brute {brute}", smp.defects.len()));
        }
        total += 1;
    }
    outcome(
        agree == 200,
        format!(
            "{agree}/200 exact on L=6 (four/ten/cubic), instances by defect count 2/4/6/8: {:?}{}",
            &defect_hist[1..],
            if mismatch.is_empty() { String::new() } else { format!("; {}", mismatch.join("; ")) }
        ),
    )
}

fn formula_checks() -> Outcome {
    let draws = 1_000_000u64;
    let mut rng = ChaCha8Rng::seed_from_u64(106);
    let mut worst: f64 = 0.0;
    let mut ok = true;
    for &(pe, pz) in &[(0.02, 0.05), (0.15, 0.3)] {
        for m in [1u32, 3, 4] {
            let c = collapse(m, NoiseParams::new(pe, pz).unwrap()).unwrap();
            let (mut odd, mut erased) = (0u64, 0u64);
            for _ in 0..draws {
                let (mut parity, mut any) = (false, false);
                for _ in 0..m {
                    parity ^= rng.random::<f64>() < pe;
                    any |= rng.random::<f64>() < pz;
                }
                odd += parity as u64;
                erased += any as u64;
            }
            for (count, p) in [(odd, c.p_err), (erased, c.p_ers)] {
                let sigma = (p * (1.0 - p) / draws as f64).sqrt();
                let z = (count as f64 / draws as f64 - p).abs() / sigma;
                worst = worst.max(z);
                ok &= z <= 4.0;
            }
        }
    }
    outcome(ok, format!("m in {{1,3,4}} at two (p_error, p_erasure) points, 10^6 draws each: max deviation {worst:.2} sigma"))
}

struct Ray {
    model: LatticeModel,
    c_error: f64,
    c_erasure: f64,
}

fn run_ray(ray: &Ray, l_list: &[usize], x_grid: Vec<f64>, samples: u64, seed: u64) -> Vec<CurvePoint> {
    let cfg = RayConfig {
        model: ray.model.name().to_string(),
        l_list: l_list.to_vec(),
        c_error: ray.c_error,
        c_erasure: ray.c_erasure,
        x_grid,
        samples,
        master_seed: seed,
    };
    montecarlo::sweep(&cfg).unwrap()
}

fn grid(lo: f64, hi: f64, n: usize) -> Vec<f64> {
    (0..n).map(|i| lo + (hi - lo) * i as f64 / (n - 1) as f64).collect()
}

fn threshold(points: &[CurvePoint], seed: u64) -> Result<ThresholdEstimate, String> {
    estimate_threshold(points, ThresholdOptions { bootstrap: 200, confidence: 0.95, seed }).map_err(|e| e.to_string())
}

/// Axis-ray data shared between the threshold and boundary criteria:
/// (ray, points at L = 8, 12, 16).
fn axis_rays() -> Vec<(Ray, Vec<CurvePoint>, f64, f64)> {
    // (model, pure erasure?, reference threshold, tolerance, scan window)
    let specs = [
        (LatticeModel::TenQubit, true, 0.128, 0.007, (0.110, 0.146)),
        (LatticeModel::TenQubit, false, 0.0133, 0.0015, (0.0109, 0.0157)),
        (LatticeModel::FourQubit, true, 0.064, 0.005, (0.055, 0.073)),
        (LatticeModel::FourQubit, false, 0.0058, 0.0010, (0.0049, 0.0067)),
    ];
    specs
        .iter()
        .enumerate()
        .map(|(i, &(model, erasure, target, tol, (lo, hi)))| {
            let ray = Ray { model, c_error: if erasure { 0.0 } else { 1.0 }, c_erasure: if erasure { 1.0 } else { 0.0 } };
            let pts = run_ray(&ray, &[8, 12, 16], grid(lo, hi, 7), 4000, 700 + i as u64);
            (ray, pts, target, tol)
        })
        .collect()
}

fn ray_label(ray: &Ray) -> String {
    let kind = match (ray.c_error > 0.0, ray.c_erasure > 0.0) {
        (true, false) => "pure error".to_string(),
        (false, true) => "pure erasure".to_string(),
        _ => format!("ray {}:{}", ray.c_error, ray.c_erasure),
    };
    format!("{} {kind}", ray.model)
}

fn threshold_reproduction(axes: &[(Ray, Vec<CurvePoint>, f64, f64)], elapsed: Duration) -> Outcome {
    let mut ok = true;
    let mut parts = Vec::new();
    for (i, (ray, pts, target, tol)) in axes.iter().enumerate() {
        match threshold(pts, 900 + i as u64) {
            Ok(est) => {
                let good = (est.x_th - target).abs() <= *tol;
                ok &= good;
                parts.push(format!(
                    "{}: {:.3}% (95% CI {:.3}-{:.3}%, target {:.2}±{:.2}%) {}",
                    ray_label(ray),
                    100.0 * est.x_th,
                    100.0 * est.ci.0,
                    100.0 * est.ci.1,
                    100.0 * target,
                    100.0 * tol,
                    if good { "ok" } else { "OUT OF TOLERANCE" }
                ));
            }
            Err(e) => {
                ok = false;
                parts.push(format!("{}: no estimate ({e})", ray_label(ray)));
            }
        }
    }
    outcome(ok, format!("L=8/12/16, 4000 samples/point, {elapsed:.0?}: {}", parts.join("; ")))
}

fn boundary_sanity(axes: &[(Ray, Vec<CurvePoint>, f64, f64)]) -> Outcome {
    let sizes = [8usize, 12];
    let slopes = [3.0, 10.0, 30.0];
    let mut ok = true;
    let mut lines = Vec::new();
    let mut boundaries: Vec<Vec<Option<ThresholdEstimate>>> = Vec::new();
    for model in [LatticeModel::FourQubit, LatticeModel::TenQubit] {
        let axis = |erasure: bool| {
            axes.iter()
                .find(|(r, ..)| r.model == model && (r.c_erasure > 0.0) == erasure)
                .map(|(_, pts, ..)| pts.iter().filter(|p| sizes.contains(&p.l)).cloned().collect::<Vec<_>>())
                .unwrap()
        };
        let error_axis = threshold(&axis(false), 31).ok();
        let erasure_axis = threshold(&axis(true), 32).ok();
        let (Some(e_th), Some(z_th)) = (error_axis.as_ref().map(|e| e.x_th), erasure_axis.as_ref().map(|e| e.x_th))
        else {
            ok = false;
            lines.push(format!("{model}: axis thresholds missing"));
            boundaries.push(Vec::new());
            continue;
        };
        let mut row = vec![error_axis.clone()];
        for (i, &k) in slopes.iter().enumerate() {
            let ray = Ray { model, c_error: 1.0, c_erasure: k };
            let guess = 1.0 / (1.0 / e_th + k / z_th);
            let pts = run_ray(&ray, &sizes, grid(0.6 * guess, 1.4 * guess, 9), 2000, 800 + 10 * i as u64);
            row.push(threshold(&pts, 40 + i as u64).ok());
        }
        row.push(erasure_axis.clone());
        let mut monotone = row.iter().all(Option::is_some);
        if monotone {
            let pts: Vec<(f64, f64)> =
                row.iter().map(|e| e.as_ref().map(|e| (e.p_error_th, e.p_erasure_th)).unwrap()).collect();
            monotone = pts.windows(2).all(|w| w[1].0 <= w[0].0 && w[1].1 >= w[0].1);
            lines.push(format!(
                "{model} boundary (p_error%, p_erasure%): {}{}",
                pts.iter().map(|(a, b)| format!("({:.3}, {:.2})", 100.0 * a, 100.0 * b)).collect::<Vec<_>>().join(" "),
                if monotone { "" } else { " NOT MONOTONE" }
            ));
        } else {
            lines.push(format!("{model}: some ray had no crossing"));
        }
        ok &= monotone;
        boundaries.push(row);
    }
    if boundaries.iter().all(|b| b.len() == 5 && b.iter().all(Option::is_some)) {
        let contained = (0..5).all(|i| {
            let four = boundaries[0][i].as_ref().unwrap();
            let ten = boundaries[1][i].as_ref().unwrap();
            ten.ci.0 > four.ci.1
        });
        ok &= contained;
        lines.push(format!(
            "ten-qubit region {} the four-qubit region on every ray",
            if contained { "strictly contains" } else { "does NOT strictly contain" }
        ));
    } else {
        ok = false;
    }
    outcome(ok, format!("5 rays per model, L=8/12: {}", lines.join("; ")))
}

fn determinism() -> Outcome {
    let dir = std::env::temp_dir().join(format!("ftfn-acceptance-{}", std::process::id()));
    std::fs::create_dir_all(&dir).unwrap();
    let config = dir.join("ray.toml");
    std::fs::write(
        &config,
        "model = \"four_qubit\"\nL_list = [4, 6, 8]\nc_error = 1.0\nc_erasure = 5.0\n\
         x_grid = [0.003, 0.005, 0.007]\nsamples = 400\nmaster_seed = 2024\n",
    )
    .unwrap();
    let run = |threads: usize, tag: &str| -> Vec<u8> {
        let out: PathBuf = dir.join(format!("{tag}.csv"));
        let status = Command::new(env!("CARGO_BIN_EXE_ftfn"))
            .args(["simulate", "--config"])
            .arg(&config)
            .arg("--out")
            .arg(&out)
            .args(["--threads", &threads.to_string()])
            .status()
            .unwrap();
        assert!(status.success());
        std::fs::read(out).unwrap()
    };
    let a = run(1, "one-a");
    let b = run(1, "one-b");
    let c = run(8, "eight");
    std::fs::remove_dir_all(&dir).unwrap();
    let rows = a.iter().filter(|&&ch| ch == b'\n').count();
    outcome(
        a == b && a == c && rows == 10,
        format!(
            "{} bytes, {rows} lines; repeat with 1 thread {}, 8 threads {}",
            a.len(),
            if a == b { "identical" } else { "DIFFERS" },
            if a == c { "identical" } else { "DIFFERS" }
        ),
    )
}

fn guarded(f: impl FnOnce() -> Outcome) -> Outcome {
    match panic::catch_unwind(AssertUnwindSafe(f)) {
        Ok(o) => o,
        Err(e) => {
            let msg = e
                .downcast_ref::<String>()
                .cloned()
                .or_else(|| e.downcast_ref::<&str>().map(|s| s.to_string()))
                .unwrap_or_default();
            outcome(false, format!("panicked: {msg}"))
        }
    }
}

fn main() -> ExitCode {
    let mut all = true;
    let mut report = |n: usize, name: &str, o: Outcome| {
        println!("[{}] criterion {n}: {name}: {}", if o.passed { "PASS" } else { "FAIL" }, o.detail);
        all &= o.passed;
    };
    report(1, "algebraic verification suite", guarded(algebra));
    report(2, "cyclization semantics and loop check", guarded(cyclization));
    report(3, "check group of the smallest periodic networks", guarded(check_group_oracle));
    report(4, "derived syndrome graphs equal the explicit lattices", guarded(lattice_equivalence));
    report(5, "MWPM weight equals brute-force pairing", guarded(decoder_exactness));
    report(6, "composite-edge formulas against sampling", guarded(formula_checks));
    let t = Instant::now();
    let axes = panic::catch_unwind(axis_rays).ok();
    let elapsed = t.elapsed();
    match &axes {
        Some(axes) => {
            report(7, "threshold reproduction", guarded(|| threshold_reproduction(axes, elapsed)));
            report(8, "correctable-region boundary", guarded(|| boundary_sanity(axes)));
        }
        None => {
            report(7, "threshold reproduction", outcome(false, "sweep panicked"));
            report(8, "correctable-region boundary", outcome(false, "axis sweeps unavailable"));
        }
    }
    report(9, "simulate output independent of thread count", guarded(determinism));
    if all {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}
