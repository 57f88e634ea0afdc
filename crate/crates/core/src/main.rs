use std::path::PathBuf;
use std::process::ExitCode;

use clap::Parser;

use irvs_sim::runner::dump_channels;
use irvs_sim::{run_experiment, write_results, ExperimentSpec, Scheme, SystemConfig};

/// Sum spectral efficiency of a downlink aided by vehicle-mounted
/// reflecting surfaces, by Monte Carlo simulation.
#[derive(Debug, Parser)]
#[command(name = "irvs-sim", version)]
struct Cli {
    /// TOML file with SystemConfig keys; flags below override it.
    #[arg(long)]
    config: Option<PathBuf>,
    #[arg(long)]
    drops: Option<u64>,
    #[arg(long)]
    seed: Option<u64>,
    #[arg(long)]
    users: Option<usize>,
    #[arg(long)]
    surfaces: Option<usize>,
    /// Reflecting elements on every surface.
    #[arg(long)]
    elements: Option<usize>,
    /// Quantizer bits for `DPS` / `RPS-D` given without an explicit width.
    #[arg(long)]
    bits: Option<u32>,
    /// Comma-separated list, e.g. `TDMA,NOMA,RPS,DPS-1bit,DPS-2bit,CPS`.
    #[arg(long)]
    schemes: Option<String>,
    #[arg(long, default_value = "results")]
    out: PathBuf,
    /// Worker threads (default: all cores).
    #[arg(long)]
    workers: Option<usize>,
    /// Also write `cdf_<scheme>.csv` files.
    #[arg(long)]
    emit_cdf: bool,
    /// Write the channels of this drop to `<out>/channels_drop<N>.txt`.
    #[arg(long)]
    dump_drop: Option<u64>,
}

fn build_spec(cli: &Cli) -> irvs_sim::Result<ExperimentSpec> {
    let mut config = match &cli.config {
        Some(path) => SystemConfig::from_file(path)?,
        None => SystemConfig::default(),
    };
    if let Some(n) = cli.drops {
        config.n_drops = n;
    }
    if let Some(s) = cli.seed {
        config.master_seed = s;
    }
    if let Some(k) = cli.users {
        config.n_users = k;
    }
    if cli.surfaces.is_some() || cli.elements.is_some() {
        config.set_surfaces(cli.surfaces.unwrap_or(config.n_surfaces), cli.elements);
    }
    if let Some(b) = cli.bits {
        config.quantizer_bits = b;
    }
    let schemes = match &cli.schemes {
        Some(list) => Scheme::parse_list(list, config.quantizer_bits)?,
        None => Scheme::reference_set(),
    };
    Ok(ExperimentSpec {
        config,
        schemes,
        output_dir: cli.out.clone(),
        emit_cdf: cli.emit_cdf,
        workers: cli.workers,
    })
}

fn run(cli: &Cli) -> irvs_sim::Result<()> {
    let spec = build_spec(cli)?;
    let out = run_experiment(&spec)?;
    write_results(&out.drops, &out.summaries, &spec.output_dir, spec.emit_cdf)?;
    if let Some(drop) = cli.dump_drop {
        if drop >= spec.config.n_drops {
            return Err(irvs_sim::Error::InvalidConfig(format!(
                "dump drop {drop} is outside 0..{}",
                spec.config.n_drops
            )));
        }
        dump_channels(&spec.config, drop, &spec.output_dir.join(format!("channels_drop{drop}.txt")))?;
    }
    println!("{:<10} {:>8} {:>10} {:>10}", "scheme", "samples", "p5", "median");
    for s in &out.summaries {
        println!("{:<10} {:>8} {:>10.3} {:>10.3}", s.scheme.to_string(), s.samples, s.p5, s.p50);
    }
    println!("results written to {}", spec.output_dir.display());
    Ok(())
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(&cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::FAILURE
        }
    }
}
