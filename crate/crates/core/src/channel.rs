//! Large-scale and small-scale channel synthesis.
//!
//! BS-UE and surface-UE links: COST-Hata three-slope path loss, lognormal
//! shadowing, Rayleigh fading. BS-surface links: line-of-sight power law,
//! Rician fading, no shadowing.

use std::io::{self, Write};

use rand::Rng;
use rand_distr::StandardNormal;
use serde::{Deserialize, Serialize};

use crate::linalg::{CMatrix, C64};
use crate::scenario::{planar_distance, DropGeometry, SystemConfig};

/// COST-Hata constant `L` in dB. `fc_mhz` in MHz, heights in meters; the
/// transmitter height is the BS for direct links and the surface for
/// reflected links.
pub fn cost_hata_constant(fc_mhz: f64, tx_height_m: f64, rx_height_m: f64) -> f64 {
    let lf = fc_mhz.log10();
    46.3 + 33.9 * lf - 13.82 * tx_height_m.log10() - (1.1 * lf - 0.7) * rx_height_m + 1.56 * lf
        - 0.8
}

/// Three-slope path loss in dB (a negative number). All distances in km.
pub fn three_slope_pathloss_db(d_km: f64, l_db: f64, d0_km: f64, d1_km: f64) -> f64 {
    if d_km > d1_km {
        -l_db - 35.0 * d_km.log10()
    } else if d_km > d0_km {
        -l_db - 15.0 * d1_km.log10() - 20.0 * d_km.log10()
    } else {
        -l_db - 15.0 * d1_km.log10() - 20.0 * d0_km.log10()
    }
}

/// Linear power gain `10^((P + S)/10)` with `S ~ N(0, sigma_sd_db²)`.
pub fn shadowed_gain<R: Rng + ?Sized>(pathloss_db: f64, sigma_sd_db: f64, rng: &mut R) -> f64 {
    let s: f64 = rng.sample::<f64, _>(StandardNormal) * sigma_sd_db;
    10f64.powf((pathloss_db + s) / 10.0)
}

/// Decaying line-of-sight law `10^(L0/10) · d^-α` with a 1 m reference.
/// Distances under the reference are clamped to it.
pub fn los_pathloss_linear(d_m: f64, l0_db: f64, alpha: f64) -> f64 {
    10f64.powf(l0_db / 10.0) * d_m.max(1.0).powf(-alpha)
}

/// Distance law of the BS-surface link.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum LosLaw {
    /// `ref / d^-α`, i.e. `ref · d^α`. Reproduces the published reference
    /// results together with [`LevelUnit::Dbm`].
    Printed,
    /// `ref · d^-α`, a conventional decaying power law.
    Decaying,
}

/// How a reference level in config converts to a linear factor.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum LevelUnit {
    /// `10^(x/10)`
    Db,
    /// `10^((x - 30)/10)`, i.e. the value is a power level in dBm.
    Dbm,
}

impl LevelUnit {
    pub fn to_linear(self, level: f64) -> f64 {
        match self {
            LevelUnit::Db => 10f64.powf(level / 10.0),
            LevelUnit::Dbm => 10f64.powf((level - 30.0) / 10.0),
        }
    }
}

/// BS-surface large-scale gain `σ_s²` under the configured law.
pub fn bs_surface_gain(d_m: f64, l0: f64, unit: LevelUnit, alpha: f64, law: LosLaw) -> f64 {
    let d = d_m.max(1.0);
    let reference = unit.to_linear(l0);
    match law {
        LosLaw::Printed => reference / d.powf(-alpha),
        LosLaw::Decaying => reference * d.powf(-alpha),
    }
}

#[inline]
fn cn<R: Rng + ?Sized>(rng: &mut R, std_per_component: f64) -> C64 {
    let re: f64 = rng.sample(StandardNormal);
    let im: f64 = rng.sample(StandardNormal);
    C64::new(re * std_per_component, im * std_per_component)
}

/// `n` i.i.d. draws from `CN(0, variance)`.
pub fn rayleigh_vector<R: Rng + ?Sized>(n: usize, variance: f64, rng: &mut R) -> Vec<C64> {
    debug_assert!(variance > 0.0);
    let s = (variance / 2.0).sqrt();
    (0..n).map(|_| cn(rng, s)).collect()
}

/// Rician matrix with an all-ones line-of-sight component.
pub fn rician_matrix<R: Rng + ?Sized>(
    n_rows: usize,
    n_cols: usize,
    variance: f64,
    rician_factor: f64,
    rng: &mut R,
) -> CMatrix {
    let los = (rician_factor * variance / (rician_factor + 1.0)).sqrt();
    let nlos = (variance / (rician_factor + 1.0)).sqrt();
    let s = std::f64::consts::FRAC_1_SQRT_2;
    let data = (0..n_rows * n_cols)
        .map(|_| C64::new(los, 0.0) + cn(rng, s) * nlos)
        .collect();
    CMatrix::from_rows(n_rows, n_cols, data)
}

/// Linear large-scale power gains of one drop.
#[derive(Debug, Clone, PartialEq)]
pub struct LargeScaleGains {
    /// BS-UE, one per user.
    pub bs_ue_var: Vec<f64>,
    /// Surface-UE, indexed `[surface][user]`.
    pub surf_ue_var: Vec<Vec<f64>>,
    /// BS-surface, one per surface.
    pub bs_surf_var: Vec<f64>,
}

impl LargeScaleGains {
    pub fn all_positive_finite(&self) -> bool {
        self.bs_ue_var
            .iter()
            .chain(self.surf_ue_var.iter().flatten())
            .chain(&self.bs_surf_var)
            .all(|v| *v > 0.0 && v.is_finite())
    }
}

pub fn large_scale_gains<R: Rng + ?Sized>(
    config: &SystemConfig,
    geometry: &DropGeometry,
    rng: &mut R,
) -> LargeScaleGains {
    let l_bs = cost_hata_constant(config.carrier_freq_mhz, config.bs_height_m, config.ue_height_m);
    let l_surf = cost_hata_constant(
        config.carrier_freq_mhz,
        config.surface_height_m,
        config.ue_height_m,
    );
    let mut link = |from, to, l_db| {
        let d_km = planar_distance(from, to) / 1000.0;
        let p = three_slope_pathloss_db(d_km, l_db, config.breakpoint_d0_km, config.breakpoint_d1_km);
        shadowed_gain(p, config.shadow_sigma_db, rng)
    };
    let bs_ue_var = geometry
        .users
        .iter()
        .map(|&u| link(geometry.bs, u, l_bs))
        .collect();
    let surf_ue_var = geometry
        .surfaces
        .iter()
        .map(|&s| geometry.users.iter().map(|&u| link(s, u, l_surf)).collect())
        .collect();
    let bs_surf_var = geometry
        .surfaces
        .iter()
        .map(|&s| {
            bs_surface_gain(
                planar_distance(geometry.bs, s),
                config.los_ref_loss_db,
                config.los_ref_unit,
                config.los_exponent,
                config.los_law,
            )
        })
        .collect();
    LargeScaleGains {
        bs_ue_var,
        surf_ue_var,
        bs_surf_var,
    }
}

/// Complex channels of one drop, per-surface and stacked.
#[derive(Debug, Clone, PartialEq)]
pub struct ChannelRealization {
    /// `f_k`, length `N_b`, one per user.
    pub direct: Vec<Vec<C64>>,
    /// `g_sk`, indexed `[surface][user]`, length `N_s`.
    pub surf_ue: Vec<Vec<Vec<C64>>>,
    /// `H_s`, `N_s × N_b`.
    pub bs_surf: Vec<CMatrix>,
    /// All `H_s` stacked in surface order, `N_r × N_b`.
    pub stacked_h: CMatrix,
    /// `g_k`: the `g_sk` of user `k` concatenated over surfaces.
    pub stacked_g: Vec<Vec<C64>>,
}

impl ChannelRealization {
    /// Builds the stacked forms from per-surface blocks.
    pub fn from_parts(
        direct: Vec<Vec<C64>>,
        surf_ue: Vec<Vec<Vec<C64>>>,
        bs_surf: Vec<CMatrix>,
        n_bs_antennas: usize,
    ) -> Self {
        let stacked_h = CMatrix::vstack(&bs_surf, n_bs_antennas);
        let stacked_g = (0..direct.len())
            .map(|k| surf_ue.iter().flat_map(|per_user| per_user[k].iter().copied()).collect())
            .collect();
        Self {
            direct,
            surf_ue,
            bs_surf,
            stacked_h,
            stacked_g,
        }
    }

    pub fn n_users(&self) -> usize {
        self.direct.len()
    }

    pub fn n_elements(&self) -> usize {
        self.stacked_h.rows()
    }

    /// Splits `stacked_h` back into per-surface blocks of the given sizes.
    pub fn unstack_h(&self, elements_per_surface: &[usize]) -> Vec<CMatrix> {
        let cols = self.stacked_h.cols();
        let mut offset = 0;
        elements_per_surface
            .iter()
            .map(|&n| {
                let data = self.stacked_h.as_slice()[offset * cols..(offset + n) * cols].to_vec();
                offset += n;
                CMatrix::from_rows(n, cols, data)
            })
            .collect()
    }

    pub fn is_finite(&self) -> bool {
        let ok = |z: &C64| z.re.is_finite() && z.im.is_finite();
        self.direct.iter().flatten().all(ok)
            && self.stacked_g.iter().flatten().all(ok)
            && self.stacked_h.as_slice().iter().all(ok)
    }

    /// Plain-text dump: one `[section]` header per vector or matrix, then
    /// one line per row of space-separated `re,im` pairs.
    pub fn write_text<W: Write>(&self, mut out: W) -> io::Result<()> {
        let line = |out: &mut W, row: &[C64]| -> io::Result<()> {
            let cells: Vec<String> = row.iter().map(|z| format!("{:e},{:e}", z.re, z.im)).collect();
            writeln!(out, "{}", cells.join(" "))
        };
        writeln!(
            out,
            "users {} surfaces {} bs_antennas {}",
            self.n_users(),
            self.bs_surf.len(),
            self.stacked_h.cols()
        )?;
        for (k, f) in self.direct.iter().enumerate() {
            writeln!(out, "[direct k={k}]")?;
            line(&mut out, f)?;
        }
        for (s, per_user) in self.surf_ue.iter().enumerate() {
            for (k, g) in per_user.iter().enumerate() {
                writeln!(out, "[surf_ue s={s} k={k}]")?;
                line(&mut out, g)?;
            }
        }
        for (s, h) in self.bs_surf.iter().enumerate() {
            writeln!(out, "[bs_surf s={s} rows={} cols={}]", h.rows(), h.cols())?;
            for row in h.iter_rows() {
                line(&mut out, row)?;
            }
        }
        Ok(())
    }
}

/// Draws small-scale fading on top of given large-scale gains.
pub fn realize_fading<R: Rng + ?Sized>(
    config: &SystemConfig,
    gains: &LargeScaleGains,
    rng: &mut R,
) -> ChannelRealization {
    let nb = config.n_bs_antennas;
    let direct = gains
        .bs_ue_var
        .iter()
        .map(|&v| rayleigh_vector(nb, v, rng))
        .collect();
    let surf_ue = gains
        .surf_ue_var
        .iter()
        .zip(&config.elements_per_surface)
        .map(|(per_user, &ns)| per_user.iter().map(|&v| rayleigh_vector(ns, v, rng)).collect())
        .collect();
    let bs_surf = gains
        .bs_surf_var
        .iter()
        .zip(&config.elements_per_surface)
        .map(|(&v, &ns)| rician_matrix(ns, nb, v, config.rician_factor, rng))
        .collect();
    ChannelRealization::from_parts(direct, surf_ue, bs_surf, nb)
}

pub fn realize_channels<R: Rng + ?Sized>(
    config: &SystemConfig,
    geometry: &DropGeometry,
    rng: &mut R,
) -> ChannelRealization {
    let gains = large_scale_gains(config, geometry, rng);
    realize_fading(config, &gains, rng)
}
