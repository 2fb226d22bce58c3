//! Monte Carlo sweeps: reproducibility across thread counts, resumable output
//! files and the CSV contract.

use ftfn::montecarlo::*;

fn config() -> RayConfig {
    RayConfig::from_toml(
        r#"
model = "four_qubit"
L_list = [4, 6]
c_error = 1.0
c_erasure = 4.0
x_grid = [0.004, 0.008, 0.012]
samples = 150
master_seed = 11
"#,
    )
    .unwrap()
}

fn in_pool<T: Send>(threads: usize, f: impl FnOnce() -> T + Send) -> T {
    rayon::ThreadPoolBuilder::new().num_threads(threads).build().unwrap().install(f)
}

#[test]
fn sweep_is_independent_of_thread_count() {
    let cfg = config();
    let one = in_pool(1, || sweep(&cfg).unwrap());
    let four = in_pool(4, || sweep(&cfg).unwrap());
    assert_eq!(one, four);
    assert_eq!(one.len(), 6);
    assert!(one.iter().any(|p| p.failures > 0));
}

#[test]
fn different_seeds_give_different_samples() {
    let mut cfg = config();
    let a = sweep(&cfg).unwrap();
    cfg.master_seed = 12;
    let b = sweep(&cfg).unwrap();
    assert_ne!(a.iter().map(|p| p.failures).collect::<Vec<_>>(), b.iter().map(|p| p.failures).collect::<Vec<_>>());
}

#[test]
fn sweep_file_keeps_other_rays_and_reuses_rows() {
    let dir = tempdir();
    let path = dir.join("sweep.csv");
    let cfg = config();
    let mut other = cfg.clone();
    other.c_erasure = 0.0;
    other.l_list = vec![4];
    sweep_to_file(&other, &path).unwrap();
    let first = sweep_to_file(&cfg, &path).unwrap();
    let again = sweep_to_file(&cfg, &path).unwrap();
    assert_eq!(first, again);
    let all = read_csv(std::fs::File::open(&path).unwrap()).unwrap();
    assert_eq!(all.len(), 3 + 6);
    assert_eq!(rays(&all).len(), 2);
    let text = std::fs::read_to_string(&path).unwrap();
    assert_eq!(text.lines().next().unwrap(), CSV_HEADER.join(","));
    std::fs::remove_dir_all(dir).unwrap();
}

#[test]
fn curve_point_statistics() {
    let p = CurvePoint::new("cubic", 8, 1.0, 2.0, 0.01, 400, 100);
    assert_eq!(p.pi_hat, 0.75);
    assert!((p.stderr - (0.75f64 * 0.25 / 400.0).sqrt()).abs() < 1e-15);
    assert_eq!((p.p_error, p.p_erasure), (0.01, 0.02));
}

fn tempdir() -> std::path::PathBuf {
    let d = std::env::temp_dir().join(format!("ftfn-mc-{}", std::process::id()));
    std::fs::create_dir_all(&d).unwrap();
    d
}
