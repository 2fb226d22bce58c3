use std::fs;
use std::io::{self, Write};
use std::path::PathBuf;
use std::process::ExitCode;

use anyhow::{bail, Context, Result};
use clap::{Parser, Subcommand, ValueEnum};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use ftfn::lattice::{build_cubic, build_four_qubit, build_ten_qubit_derived, cross_validate, LatticeModel};
use ftfn::montecarlo::{self, plot, threshold, RayConfig, ThresholdOptions};
use ftfn::network::{
    build_foliated_network_with, build_raussendorf_equivalent, compute_check_group, extract_syndrome_graph,
    FoliationOptions, NetworkModel, SurfaceCode, TimeBoundary,
};
use ftfn::verify::{algebra_suite, network_suite, SuiteItem};

#[derive(Parser)]
#[command(name = "ftfn", version, about = "Fusion networks built by gate teleportation")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Clone, Copy, ValueEnum)]
enum Layout {
    Square,
    Rotated,
    Layered,
}

#[derive(Subcommand)]
enum Command {
    /// Run the algebraic, simulation and structural verification suite.
    Verify {
        /// Simulated runs of the cyclized parity check.
        #[arg(long, default_value_t = 1000)]
        runs: usize,
        #[arg(long, default_value_t = 1)]
        seed: u64,
    },
    /// Export a periodic syndrome lattice as an edge list.
    Build {
        /// four_qubit, ten_qubit, ten_qubit_planar or cubic.
        #[arg(long)]
        model: LatticeModel,
        #[arg(long = "L")]
        l: usize,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Export a foliated (or layered) fusion network in text form.
    Network {
        #[arg(long, value_enum, default_value = "square")]
        layout: Layout,
        /// four_qubit or ten_qubit (ignored for the layered layout).
        #[arg(long, default_value = "four_qubit")]
        model: String,
        #[arg(long = "L")]
        l: usize,
        #[arg(long, default_value_t = 1)]
        rounds: usize,
        /// Leave the time direction open instead of periodic.
        #[arg(long)]
        open: bool,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Monte Carlo sweep of one ray described by a TOML file.
    Simulate {
        #[arg(long)]
        config: PathBuf,
        /// CSV output; existing rows for the same points are reused.
        #[arg(long)]
        out: Option<PathBuf>,
        #[arg(long)]
        threads: Option<usize>,
    },
    /// Threshold estimate for every ray in a sweep CSV.
    Threshold {
        #[arg(long = "in")]
        input: PathBuf,
        #[arg(long, default_value_t = 400)]
        bootstrap: usize,
    },
    /// SVG plot of failure rate against x, one curve per L.
    Plot {
        #[arg(long = "in")]
        input: PathBuf,
        #[arg(long)]
        out: PathBuf,
    },
}

fn emit(text: &str, out: Option<&PathBuf>) -> Result<()> {
    match out {
        Some(path) => fs::write(path, text).with_context(|| format!("writing {}", path.display())),
        None => io::stdout().write_all(text.as_bytes()).context("writing to stdout"),
    }
}

fn print_items(items: &[SuiteItem]) -> bool {
    let mut ok = true;
    for it in items {
        println!("[{}] {}: {}", if it.passed { "PASS" } else { "FAIL" }, it.name, it.detail);
        ok &= it.passed;
    }
    ok
}

fn structural_items() -> Result<Vec<SuiteItem>> {
    let code = SurfaceCode::rotated(4, 4)?;
    let mut items = Vec::new();
    let cases = [
        ("four-qubit", Some(NetworkModel::FourQubit), build_four_qubit(4)?),
        ("ten-qubit", Some(NetworkModel::TenQubit), build_ten_qubit_derived(4)?),
        ("layered", None, build_cubic(4)?),
    ];
    for (name, model, lattice) in cases {
        let net = match model {
            Some(model) => build_foliated_network_with(
                &code,
                FoliationOptions { model, rounds: 4, time: TimeBoundary::Periodic },
            )?,
            None => build_raussendorf_equivalent(4, 4, 4)?,
        };
        let graph = extract_syndrome_graph(&compute_check_group(&net)?)?;
        let report = cross_validate(&lattice, &graph)?;
        items.push(SuiteItem {
            name: format!("derived syndrome graph ({name}) matches {} lattice, L=4", lattice.model()),
            passed: report.passed && report.components_checked == 2,
            detail: if report.passed {
                format!("{} components, edge classes {:?}", report.components_checked, report.lattice_edge_classes)
            } else {
                report.differences.join("; ")
            },
        });
    }
    Ok(items)
}

fn run(cli: Cli) -> Result<bool> {
    match cli.command {
        Command::Verify { runs, seed } => {
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            let mut ok = print_items(&algebra_suite(&mut rng)?);
            ok &= print_items(&network_suite(runs, &mut rng)?);
            ok &= print_items(&structural_items()?);
            println!("{}", if ok { "all checks passed" } else { "some checks FAILED" });
            Ok(ok)
        }
        Command::Build { model, l, out } => {
            emit(&model.build(l)?.to_edge_list(), out.as_ref())?;
            Ok(true)
        }
        Command::Network { layout, model, l, rounds, open, out } => {
            let time = if open { TimeBoundary::Open } else { TimeBoundary::Periodic };
            let net_model = match model.as_str() {
                "four_qubit" | "four-qubit" => NetworkModel::FourQubit,
                "ten_qubit" | "ten-qubit" => NetworkModel::TenQubit,
                other => bail!("unknown network model `{other}`"),
            };
            let opts = FoliationOptions { model: net_model, rounds, time };
            let net = match layout {
                Layout::Square => build_foliated_network_with(&SurfaceCode::square(l, l)?, opts)?,
                Layout::Rotated => build_foliated_network_with(&SurfaceCode::rotated(l, l)?, opts)?,
                Layout::Layered => {
                    if open {
                        bail!("the layered network is always periodic in time");
                    }
                    build_raussendorf_equivalent(l, l, rounds)?
                }
            };
            emit(&net.to_text(), out.as_ref())?;
            Ok(true)
        }
        Command::Simulate { config, out, threads } => {
            let text = fs::read_to_string(&config).with_context(|| format!("reading {}", config.display()))?;
            let cfg = RayConfig::from_toml(&text)?;
            let mut builder = rayon::ThreadPoolBuilder::new();
            if let Some(t) = threads {
                builder = builder.num_threads(t);
            }
            let pool = builder.build()?;
            pool.install(|| -> Result<()> {
                match &out {
                    Some(path) => {
                        montecarlo::sweep_to_file(&cfg, path)?;
                    }
                    None => montecarlo::write_csv(&montecarlo::sweep(&cfg)?, io::stdout())?,
                }
                Ok(())
            })?;
            Ok(true)
        }
        Command::Threshold { input, bootstrap } => {
            let points = montecarlo::read_csv(fs::File::open(&input).with_context(|| format!("opening {}", input.display()))?)?;
            let options = ThresholdOptions { bootstrap, ..ThresholdOptions::default() };
            let mut ok = true;
            for (model, ce, cz, est) in threshold::estimate_all(&points, options) {
                match est {
                    Ok(e) => println!(
                        "{model} ray ({ce}, {cz}): x_th = {:.5} [{:.5}, {:.5}]  p_error = {:.5}  p_erasure = {:.5}  ({})",
                        e.x_th, e.ci.0, e.ci.1, e.p_error_th, e.p_erasure_th, e.method
                    ),
                    Err(err) => {
                        ok = false;
                        println!("{model} ray ({ce}, {cz}): no estimate ({err})");
                    }
                }
            }
            Ok(ok)
        }
        Command::Plot { input, out } => {
            let points = montecarlo::read_csv(fs::File::open(&input).with_context(|| format!("opening {}", input.display()))?)?;
            fs::write(&out, plot::render_svg(&points)?).with_context(|| format!("writing {}", out.display()))?;
            Ok(true)
        }
    }
}

fn main() -> ExitCode {
    match run(Cli::parse()) {
        Ok(true) => ExitCode::SUCCESS,
        Ok(false) => ExitCode::FAILURE,
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::from(2)
        }
    }
}
