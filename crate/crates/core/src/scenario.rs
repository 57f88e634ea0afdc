//! Simulation parameters and per-drop geometry.

use std::path::Path;

use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::baselines::NomaInterference;
use crate::channel::{LevelUnit, LosLaw};
use crate::error::{Error, Result};
use crate::rng::{substream, StreamTag};

/// A point in the horizontal plane, meters.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(from = "[f64; 2]", into = "[f64; 2]")]
pub struct Point2 {
    pub x: f64,
    pub y: f64,
}

impl Point2 {
    pub const fn new(x: f64, y: f64) -> Self {
        Self { x, y }
    }
}

impl From<[f64; 2]> for Point2 {
    fn from([x, y]: [f64; 2]) -> Self {
        Self { x, y }
    }
}

impl From<Point2> for [f64; 2] {
    fn from(p: Point2) -> Self {
        [p.x, p.y]
    }
}

/// Horizontal Euclidean distance. Antenna heights never enter here; they
/// only shape the COST-Hata constant.
pub fn planar_distance(a: Point2, b: Point2) -> f64 {
    (a.x - b.x).hypot(a.y - b.y)
}

/// Every scalar that defines an experiment.
///
/// Field names double as the keys of the TOML config file. Missing keys
/// fall back to [`SystemConfig::default`], which is the two-user,
/// two-surface reference scenario.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct SystemConfig {
    pub n_bs_antennas: usize,
    pub n_users: usize,
    pub n_surfaces: usize,
    /// One entry per surface.
    pub elements_per_surface: Vec<usize>,
    pub tx_power_watts: f64,
    pub bandwidth_hz: f64,
    pub carrier_freq_mhz: f64,
    pub bs_height_m: f64,
    pub surface_height_m: f64,
    pub ue_height_m: f64,
    /// Side of the square service area.
    pub area_m: f64,
    pub bs_position: Point2,
    pub breakpoint_d0_km: f64,
    pub breakpoint_d1_km: f64,
    pub shadow_sigma_db: f64,
    pub rician_factor: f64,
    /// Reference level of the BS-surface line-of-sight law at 1 m.
    pub los_ref_loss_db: f64,
    pub los_exponent: f64,
    /// How `los_ref_loss_db` converts to a linear factor.
    pub los_ref_unit: LevelUnit,
    /// Distance law of the BS-surface link.
    pub los_law: LosLaw,
    pub noise_figure_db: f64,
    pub temperature_k: f64,
    /// Bits used by schemes that do not name their own resolution.
    pub quantizer_bits: u32,
    pub ao_iterations: usize,
    /// Optional early stop on relative objective change; `None` runs the
    /// fixed iteration count.
    pub ao_tolerance: Option<f64>,
    pub noma_interference: NomaInterference,
    pub n_drops: u64,
    pub master_seed: u64,
}

impl Default for SystemConfig {
    fn default() -> Self {
        Self {
            n_bs_antennas: 16,
            n_users: 2,
            n_surfaces: 2,
            elements_per_surface: vec![200, 200],
            tx_power_watts: 20.0,
            bandwidth_hz: 20e6,
            carrier_freq_mhz: 1900.0,
            bs_height_m: 5.0,
            surface_height_m: 3.0,
            ue_height_m: 1.65,
            area_m: 1000.0,
            bs_position: Point2::new(500.0, 500.0),
            breakpoint_d0_km: 0.01,
            breakpoint_d1_km: 0.05,
            shadow_sigma_db: 8.0,
            rician_factor: 5.0,
            los_ref_loss_db: -30.0,
            los_exponent: 2.5,
            los_ref_unit: LevelUnit::Dbm,
            los_law: LosLaw::Printed,
            noise_figure_db: 9.0,
            temperature_k: 290.0,
            quantizer_bits: 1,
            ao_iterations: 3,
            ao_tolerance: None,
            noma_interference: NomaInterference::SharedGain,
            n_drops: 1000,
            master_seed: 42,
        }
    }
}

impl SystemConfig {
    /// Reads a TOML file; absent keys keep their defaults.
    pub fn from_file(path: impl AsRef<Path>) -> Result<Self> {
        let path = path.as_ref();
        let text = std::fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
        toml::from_str(&text).map_err(|source| Error::ConfigParse {
            path: path.to_path_buf(),
            source,
        })
    }

    /// Total reflecting elements over all surfaces.
    pub fn total_elements(&self) -> usize {
        self.elements_per_surface.iter().sum()
    }

    /// Resizes `elements_per_surface` to `n_surfaces`, repeating `per_surface`
    /// (or the first existing entry) for new surfaces.
    pub fn set_surfaces(&mut self, n_surfaces: usize, per_surface: Option<usize>) {
        let fill = per_surface
            .or_else(|| self.elements_per_surface.first().copied())
            .unwrap_or(1);
        self.n_surfaces = n_surfaces;
        if let Some(n) = per_surface {
            self.elements_per_surface = vec![n; n_surfaces];
        } else {
            self.elements_per_surface.resize(n_surfaces, fill);
        }
    }

    pub fn validate(&self) -> Result<()> {
        let fail = |msg: String| Err(Error::InvalidConfig(msg));
        for (name, v) in [
            ("n_bs_antennas", self.n_bs_antennas),
            ("n_users", self.n_users),
            ("n_surfaces", self.n_surfaces),
            ("ao_iterations", self.ao_iterations),
        ] {
            if v == 0 {
                return fail(format!("{name} must be at least 1"));
            }
        }
        if self.n_drops == 0 {
            return fail("n_drops must be at least 1".into());
        }
        if self.elements_per_surface.len() != self.n_surfaces {
            return fail(format!(
                "elements_per_surface has {} entries for {} surfaces",
                self.elements_per_surface.len(),
                self.n_surfaces
            ));
        }
        if self.elements_per_surface.contains(&0) {
            return fail("every surface needs at least one element".into());
        }
        for (name, v) in [
            ("tx_power_watts", self.tx_power_watts),
            ("bandwidth_hz", self.bandwidth_hz),
            ("carrier_freq_mhz", self.carrier_freq_mhz),
            ("bs_height_m", self.bs_height_m),
            ("surface_height_m", self.surface_height_m),
            ("ue_height_m", self.ue_height_m),
            ("area_m", self.area_m),
            ("breakpoint_d0_km", self.breakpoint_d0_km),
            ("temperature_k", self.temperature_k),
        ] {
            if !(v > 0.0 && v.is_finite()) {
                return fail(format!("{name} must be positive and finite, got {v}"));
            }
        }
        if [self.rician_factor, self.shadow_sigma_db].iter().any(|v| v.is_nan() || *v < 0.0) {
            return fail("rician_factor and shadow_sigma_db must be non-negative".into());
        }
        if self.breakpoint_d0_km >= self.breakpoint_d1_km {
            return fail("breakpoint_d0_km must be below breakpoint_d1_km".into());
        }
        if !(1..=16).contains(&self.quantizer_bits) {
            return fail(format!(
                "quantizer_bits must be in 1..=16, got {}",
                self.quantizer_bits
            ));
        }
        let inside = |v: f64| (0.0..=self.area_m).contains(&v);
        if !inside(self.bs_position.x) || !inside(self.bs_position.y) {
            return fail("bs_position lies outside the service area".into());
        }
        if let Some(tol) = self.ao_tolerance {
            if tol.is_nan() || tol <= 0.0 {
                return fail("ao_tolerance must be positive".into());
            }
        }
        Ok(())
    }
}

/// Positions of every node in one Monte Carlo drop.
#[derive(Debug, Clone, PartialEq)]
pub struct DropGeometry {
    pub bs: Point2,
    pub users: Vec<Point2>,
    pub surfaces: Vec<Point2>,
}

/// Places users and surfaces uniformly over the square service area.
///
/// The draw depends only on `(master_seed, drop_index)`.
pub fn sample_geometry(config: &SystemConfig, drop_index: u64) -> DropGeometry {
    debug_assert!(drop_index < config.n_drops);
    let mut rng = substream(config.master_seed, drop_index, StreamTag::Geometry, 0);
    let side = config.area_m;
    let mut point = || Point2::new(rng.random::<f64>() * side, rng.random::<f64>() * side);
    let users = (0..config.n_users).map(|_| point()).collect();
    let surfaces = (0..config.n_surfaces).map(|_| point()).collect();
    DropGeometry {
        bs: config.bs_position,
        users,
        surfaces,
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn planar_distance_examples() {
        assert_eq!(planar_distance(Point2::new(0.0, 0.0), Point2::new(3.0, 4.0)), 5.0);
        let c = Point2::new(500.0, 500.0);
        assert_eq!(planar_distance(c, c), 0.0);
        let d = planar_distance(Point2::new(0.0, 0.0), Point2::new(1000.0, 1000.0));
        assert!((d - 1000.0 * 2f64.sqrt()).abs() < 1e-9);
    }

    #[test]
    fn geometry_stays_in_area() {
        let cfg = SystemConfig {
            n_users: 20,
            ..SystemConfig::default()
        };
        for drop in 0..50 {
            let g = sample_geometry(&cfg, drop);
            assert_eq!(g.bs, cfg.bs_position);
            assert_eq!(g.users.len(), 20);
            assert_eq!(g.surfaces.len(), 2);
            for p in g.users.iter().chain(&g.surfaces) {
                assert!((0.0..=1000.0).contains(&p.x) && (0.0..=1000.0).contains(&p.y));
            }
        }
    }

    #[test]
    fn geometry_is_a_function_of_seed_and_drop() {
        let cfg = SystemConfig::default();
        assert_eq!(sample_geometry(&cfg, 0), sample_geometry(&cfg, 0));
        assert_ne!(sample_geometry(&cfg, 0), sample_geometry(&cfg, 1));
        let other = SystemConfig {
            master_seed: 43,
            ..cfg.clone()
        };
        assert_ne!(sample_geometry(&cfg, 0), sample_geometry(&other, 0));
    }

    #[test]
    fn coordinates_are_uniform() {
        let cfg = SystemConfig {
            n_drops: 10_000,
            n_users: 1,
            ..SystemConfig::default()
        };
        let n = cfg.n_drops as f64;
        let (mut sx, mut sy) = (0.0, 0.0);
        for drop in 0..cfg.n_drops {
            let p = sample_geometry(&cfg, drop).users[0];
            sx += p.x;
            sy += p.y;
        }
        // Uniform on [0, 1000]: std = 1000/sqrt(12).
        let se = 1000.0 / 12f64.sqrt() / n.sqrt();
        assert!((sx / n - 500.0).abs() < 3.0 * se);
        assert!((sy / n - 500.0).abs() < 3.0 * se);
    }

    #[test]
    fn validation_rejects_bad_values() {
        assert!(SystemConfig::default().validate().is_ok());
        let bad = [
            SystemConfig {
                n_users: 0,
                ..Default::default()
            },
            SystemConfig {
                tx_power_watts: 0.0,
                ..Default::default()
            },
            SystemConfig {
                breakpoint_d0_km: 0.05,
                ..Default::default()
            },
            SystemConfig {
                rician_factor: -1.0,
                ..Default::default()
            },
            SystemConfig {
                elements_per_surface: vec![200],
                ..Default::default()
            },
            SystemConfig {
                quantizer_bits: 0,
                ..Default::default()
            },
        ];
        for cfg in bad {
            assert!(matches!(cfg.validate(), Err(Error::InvalidConfig(_))), "{cfg:?}");
        }
    }

    #[test]
    fn set_surfaces_keeps_lengths_consistent() {
        let mut cfg = SystemConfig::default();
        cfg.set_surfaces(5, None);
        assert_eq!(cfg.elements_per_surface, vec![200; 5]);
        cfg.set_surfaces(3, Some(64));
        assert_eq!(cfg.elements_per_surface, vec![64; 3]);
        assert_eq!(cfg.total_elements(), 192);
    }

    #[test]
    fn partial_toml_keeps_defaults() {
        let cfg: SystemConfig = toml::from_str(
            "n_users = 20\nn_surfaces = 5\nelements_per_surface = [200, 200, 200, 200, 200]\nbs_position = [400.0, 600.0]\n",
        )
        .unwrap();
        assert_eq!(cfg.n_users, 20);
        assert_eq!(cfg.bs_position, Point2::new(400.0, 600.0));
        assert_eq!(cfg.n_bs_antennas, 16);
        cfg.validate().unwrap();
        assert!(toml::from_str::<SystemConfig>("no_such_key = 1").is_err());
    }
}
