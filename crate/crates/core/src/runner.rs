//! Monte Carlo experiment driver.
//!
//! Each drop samples one geometry and one channel realization, and every
//! requested scheme is evaluated on that same realization. Drops are
//! independent; with the `parallel` feature they run on a rayon pool.

use std::fmt::Write as _;
use std::fs;
use std::path::{Path, PathBuf};

use crate::baselines::{noma_rates, rps_rate, tdma_rates_no_irs};
use crate::beamforming::{alternating_optimize, quantize_and_match, AoOptions, AoResult};
use crate::channel::{realize_channels, ChannelRealization};
use crate::error::{Error, Result};
use crate::metrics::{empirical_cdf, noise_power, rate_from_gain, summarize, CdfSummary, DropResult, Scheme};
use crate::reflection::DiscretePhaseSet;
use crate::rng::{substream, StreamTag};
use crate::scenario::{sample_geometry, SystemConfig};

#[derive(Debug, Clone)]
pub struct ExperimentSpec {
    pub config: SystemConfig,
    pub schemes: Vec<Scheme>,
    pub output_dir: PathBuf,
    pub emit_cdf: bool,
    /// Thread count; `None` lets rayon decide. Ignored without `parallel`.
    pub workers: Option<usize>,
}

impl ExperimentSpec {
    pub fn validate(&self) -> Result<()> {
        self.config.validate()?;
        if self.schemes.is_empty() {
            return Err(Error::InvalidConfig("no schemes requested".into()));
        }
        for s in &self.schemes {
            if let Scheme::Dps(b) | Scheme::RpsDiscrete(b) = s {
                if !(1..=16).contains(b) {
                    return Err(Error::InvalidConfig(format!("{s}: bits must be in 1..=16")));
                }
            }
        }
        Ok(())
    }
}

#[derive(Debug, Clone)]
pub struct ExperimentOutput {
    /// Sorted by drop, then by scheme in request order.
    pub drops: Vec<DropResult>,
    pub summaries: Vec<CdfSummary>,
}

/// The geometry and channels a drop evaluates on.
pub fn drop_channels(config: &SystemConfig, drop_index: u64) -> ChannelRealization {
    let geometry = sample_geometry(config, drop_index);
    let mut rng = substream(config.master_seed, drop_index, StreamTag::Channel, 0);
    realize_channels(config, &geometry, &mut rng)
}

fn random_phase_stream(scheme: Scheme, user: usize) -> u64 {
    let code = match scheme {
        Scheme::RpsDiscrete(b) => u64::from(b),
        _ => 0,
    };
    (code << 32) | user as u64
}

/// Evaluates every scheme on one drop.
pub fn evaluate_drop(config: &SystemConfig, schemes: &[Scheme], drop_index: u64) -> Result<Vec<DropResult>> {
    let ch = drop_channels(config, drop_index);
    let k = config.n_users;
    let p = config.tx_power_watts;
    let noise = noise_power(config.bandwidth_hz, config.temperature_k, config.noise_figure_db);
    let opts = AoOptions {
        iterations: config.ao_iterations,
        tolerance: config.ao_tolerance,
    };

    let needs_ao = schemes.iter().any(|s| matches!(s, Scheme::Cps | Scheme::Dps(_)));
    let ao: Vec<AoResult> = if needs_ao {
        (0..k)
            .map(|u| alternating_optimize(&ch.stacked_g[u], &ch.stacked_h, &ch.direct[u], &opts))
            .collect()
    } else {
        Vec::new()
    };

    let mut out = Vec::with_capacity(schemes.len());
    for &scheme in schemes {
        let rates: Vec<f64> = match scheme {
            Scheme::Tdma => tdma_rates_no_irs(&ch.direct, p, noise),
            Scheme::Noma => noma_rates(&ch.direct, p, noise, config.noma_interference),
            Scheme::Cps => ao.iter().map(|r| rate_from_gain(r.objective(), p, noise, k)).collect(),
            Scheme::Dps(bits) => {
                let set = DiscretePhaseSet::new(bits);
                (0..k)
                    .map(|u| {
                        let (_, _, obj) = quantize_and_match(
                            &ch.stacked_g[u],
                            &ch.stacked_h,
                            &ch.direct[u],
                            &ao[u].phases,
                            &set,
                        );
                        rate_from_gain(obj, p, noise, k)
                    })
                    .collect()
            }
            Scheme::Rps | Scheme::RpsDiscrete(_) => {
                let set = match scheme {
                    Scheme::RpsDiscrete(b) => Some(DiscretePhaseSet::new(b)),
                    _ => None,
                };
                (0..k)
                    .map(|u| {
                        let mut rng = substream(
                            config.master_seed,
                            drop_index,
                            StreamTag::RandomPhase,
                            random_phase_stream(scheme, u),
                        );
                        rps_rate(
                            &ch.stacked_g[u],
                            &ch.stacked_h,
                            &ch.direct[u],
                            set.as_ref(),
                            p,
                            noise,
                            k,
                            &mut rng,
                        )
                    })
                    .collect()
            }
        };
        let result = DropResult::new(drop_index, scheme, rates);
        if !result.sum_rate.is_finite() || result.per_user_rates.iter().any(|r| !r.is_finite()) {
            return Err(Error::NonFinite {
                drop: drop_index,
                scheme: scheme.to_string(),
            });
        }
        out.push(result);
    }
    Ok(out)
}

fn collect(per_drop: Vec<Result<Vec<DropResult>>>) -> Result<Vec<DropResult>> {
    let mut all = Vec::new();
    for r in per_drop {
        all.extend(r?);
    }
    Ok(all)
}

/// Runs all drops on the calling thread.
pub fn run_drops_serial(config: &SystemConfig, schemes: &[Scheme]) -> Result<Vec<DropResult>> {
    collect(
        (0..config.n_drops)
            .map(|d| evaluate_drop(config, schemes, d))
            .collect(),
    )
}

/// Runs all drops, in parallel when the `parallel` feature is enabled.
/// Output order (and content) never depends on the worker count.
#[cfg(feature = "parallel")]
pub fn run_drops(config: &SystemConfig, schemes: &[Scheme], workers: Option<usize>) -> Result<Vec<DropResult>> {
    use rayon::prelude::*;

    if workers == Some(1) {
        return run_drops_serial(config, schemes);
    }
    let work = || -> Vec<Result<Vec<DropResult>>> {
        (0..config.n_drops)
            .into_par_iter()
            .map(|d| evaluate_drop(config, schemes, d))
            .collect()
    };
    let per_drop = match workers {
        Some(n) => rayon::ThreadPoolBuilder::new()
            .num_threads(n)
            .build()
            .map_err(|e| Error::InvalidConfig(format!("thread pool: {e}")))?
            .install(work),
        None => work(),
    };
    collect(per_drop)
}

#[cfg(not(feature = "parallel"))]
pub fn run_drops(config: &SystemConfig, schemes: &[Scheme], _workers: Option<usize>) -> Result<Vec<DropResult>> {
    run_drops_serial(config, schemes)
}

pub fn run_experiment(spec: &ExperimentSpec) -> Result<ExperimentOutput> {
    spec.validate()?;
    let drops = run_drops(&spec.config, &spec.schemes, spec.workers)?;
    let summaries = summarize(&drops, &spec.schemes)?;
    Ok(ExperimentOutput { drops, summaries })
}

/// Contents of `drops.csv`.
pub fn drops_csv(results: &[DropResult]) -> String {
    let mut s = String::from("drop,scheme,sum_rate_bpshz\n");
    for r in results {
        let _ = writeln!(s, "{},{},{:.6}", r.drop_index, r.scheme, r.sum_rate);
    }
    s
}

/// Contents of `summary.csv`.
pub fn summary_csv(summaries: &[CdfSummary]) -> String {
    let mut s = String::from("scheme,samples,p5_bpshz,p50_bpshz\n");
    for c in summaries {
        let _ = writeln!(s, "{},{},{:.6},{:.6}", c.scheme, c.samples, c.p5, c.p50);
    }
    s
}

/// Contents of `cdf_<scheme>.csv`.
pub fn cdf_csv(samples: &[f64]) -> String {
    let mut s = String::from("sum_rate_bpshz,cdf\n");
    for (x, p) in empirical_cdf(samples) {
        let _ = writeln!(s, "{x:.6},{p:.6}");
    }
    s
}

fn write_file(path: PathBuf, contents: &str) -> Result<()> {
    fs::write(&path, contents).map_err(|e| Error::io(path, e))
}

/// Writes `drops.csv`, `summary.csv` and optionally one `cdf_<scheme>.csv`
/// per scheme into `output_dir` (created if missing).
pub fn write_results(
    results: &[DropResult],
    summaries: &[CdfSummary],
    output_dir: &Path,
    emit_cdf: bool,
) -> Result<()> {
    if results.is_empty() {
        return Err(Error::NoData);
    }
    fs::create_dir_all(output_dir).map_err(|e| Error::io(output_dir, e))?;
    write_file(output_dir.join("drops.csv"), &drops_csv(results))?;
    write_file(output_dir.join("summary.csv"), &summary_csv(summaries))?;
    if emit_cdf {
        for c in summaries {
            let samples: Vec<f64> = results
                .iter()
                .filter(|r| r.scheme == c.scheme)
                .map(|r| r.sum_rate)
                .collect();
            write_file(output_dir.join(format!("cdf_{}.csv", c.scheme)), &cdf_csv(&samples))?;
        }
    }
    Ok(())
}

/// Writes the channels of one drop as text (see
/// [`ChannelRealization::write_text`]).
pub fn dump_channels(config: &SystemConfig, drop_index: u64, path: &Path) -> Result<()> {
    let ch = drop_channels(config, drop_index);
    let mut buf = Vec::new();
    ch.write_text(&mut buf).map_err(|e| Error::io(path, e))?;
    fs::write(path, buf).map_err(|e| Error::io(path, e))
}
