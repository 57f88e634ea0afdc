//! Monte Carlo simulation of a multi-antenna downlink aided by reflecting
//! surfaces mounted on vehicles.
//!
//! A run draws random drops (user and surface positions), synthesizes
//! fading channels, optimizes the base-station beam and the surface phases
//! per user slot, and reports sum spectral efficiency for:
//!
//! * `CPS`: continuous phases from alternating optimization,
//! * `DPS-b`: the same phases quantized to `b` bits,
//! * `RPS`: random phases with MRT,
//! * `TDMA` and `NOMA` over the direct links only.
//!
//! ```no_run
//! use irvs_sim::{run_experiment, ExperimentSpec, Scheme, SystemConfig};
//!
//! let spec = ExperimentSpec {
//!     config: SystemConfig { n_drops: 200, ..SystemConfig::default() },
//!     schemes: Scheme::reference_set(),
//!     output_dir: "results".into(),
//!     emit_cdf: true,
//!     workers: None,
//! };
//! let out = run_experiment(&spec)?;
//! for s in &out.summaries {
//!     println!("{}: p5 {:.2} median {:.2}", s.scheme, s.p5, s.p50);
//! }
//! # Ok::<(), irvs_sim::Error>(())
//! ```

pub mod baselines;
pub mod beamforming;
pub mod channel;
pub mod error;
pub mod linalg;
pub mod metrics;
pub mod reflection;
pub mod rng;
pub mod runner;
pub mod scenario;

pub use error::{Error, Result};
pub use metrics::{CdfSummary, DropResult, Scheme};
pub use runner::{run_experiment, write_results, ExperimentOutput, ExperimentSpec};
pub use scenario::{DropGeometry, Point2, SystemConfig};
