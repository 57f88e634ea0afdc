//! Noise, rates and distribution statistics.

use std::fmt;
use std::str::FromStr;

use crate::error::{Error, Result};
use crate::linalg::{dot, C64};

/// Boltzmann constant, J/K.
pub const BOLTZMANN: f64 = 1.380649e-23;

/// Thermal noise power `κ·B·T·NF` in watts.
pub fn noise_power(bandwidth_hz: f64, temperature_k: f64, noise_figure_db: f64) -> f64 {
    BOLTZMANN * bandwidth_hz * temperature_k * 10f64.powf(noise_figure_db / 10.0)
}

/// `(1/K)·log2(1 + gain·P/σ²)`.
#[inline]
pub fn rate_from_gain(gain: f64, tx_power: f64, noise_var: f64, n_users: usize) -> f64 {
    (gain * tx_power / noise_var).ln_1p() / std::f64::consts::LN_2 / n_users as f64
}

/// Slot rate of one user served with beam `w` over `effective`.
pub fn user_rate(effective: &[C64], w: &[C64], tx_power: f64, noise_var: f64, n_users: usize) -> f64 {
    rate_from_gain(dot(effective, w).norm_sqr(), tx_power, noise_var, n_users)
}

/// Per-user rates already carry their slot share, so this is a plain sum.
pub fn sum_rate(per_user_rates: &[f64]) -> f64 {
    per_user_rates.iter().sum()
}

/// Nearest-rank percentile: the `⌈q·N⌉`-th smallest sample (1-based).
pub fn percentile(samples: &[f64], q: f64) -> Result<f64> {
    if samples.is_empty() {
        return Err(Error::NoData);
    }
    let mut sorted = samples.to_vec();
    sorted.sort_by(f64::total_cmp);
    Ok(percentile_sorted(&sorted, q))
}

fn percentile_sorted(sorted: &[f64], q: f64) -> f64 {
    debug_assert!(q > 0.0 && q < 1.0);
    let n = sorted.len();
    // The epsilon keeps q·N = 5.000000000000001 from becoming rank 6.
    let rank = ((q * n as f64) - 1e-9).ceil().clamp(1.0, n as f64) as usize;
    sorted[rank - 1]
}

/// Evaluated transmission scheme.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Scheme {
    Tdma,
    Noma,
    /// Random continuous phases.
    Rps,
    /// Random phases from a `b`-bit set.
    RpsDiscrete(u32),
    /// Optimized phases quantized to `b` bits.
    Dps(u32),
    /// Optimized continuous phases.
    Cps,
}

impl Scheme {
    /// The reference comparison set: TDMA, NOMA, RPS, DPS 1/2-bit, CPS.
    pub fn reference_set() -> Vec<Scheme> {
        vec![
            Scheme::Tdma,
            Scheme::Noma,
            Scheme::Rps,
            Scheme::Dps(1),
            Scheme::Dps(2),
            Scheme::Cps,
        ]
    }

    pub fn uses_surfaces(self) -> bool {
        !matches!(self, Scheme::Tdma | Scheme::Noma)
    }

    /// Parses one scheme name; `DPS`/`RPS-D` without bits take `default_bits`.
    pub fn parse_with_bits(s: &str, default_bits: u32) -> Result<Scheme> {
        let upper = s.trim().to_ascii_uppercase();
        let bits = |rest: &str| -> Result<u32> {
            let digits = rest.trim_start_matches('-').trim_end_matches("BIT");
            match digits.parse::<u32>() {
                Ok(b) if (1..=16).contains(&b) => Ok(b),
                _ => Err(Error::UnknownScheme(s.to_string())),
            }
        };
        Ok(match upper.as_str() {
            "TDMA" => Scheme::Tdma,
            "NOMA" => Scheme::Noma,
            "RPS" => Scheme::Rps,
            "CPS" => Scheme::Cps,
            "DPS" => Scheme::Dps(default_bits),
            "RPS-D" => Scheme::RpsDiscrete(default_bits),
            other => {
                if let Some(rest) = other.strip_prefix("DPS") {
                    Scheme::Dps(bits(rest)?)
                } else if let Some(rest) = other.strip_prefix("RPS") {
                    Scheme::RpsDiscrete(bits(rest)?)
                } else {
                    return Err(Error::UnknownScheme(s.to_string()));
                }
            }
        })
    }

    pub fn parse_list(list: &str, default_bits: u32) -> Result<Vec<Scheme>> {
        let mut out = Vec::new();
        for item in list.split(',').filter(|s| !s.trim().is_empty()) {
            let scheme = Scheme::parse_with_bits(item, default_bits)?;
            if !out.contains(&scheme) {
                out.push(scheme);
            }
        }
        Ok(out)
    }
}

impl fmt::Display for Scheme {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Scheme::Tdma => f.write_str("TDMA"),
            Scheme::Noma => f.write_str("NOMA"),
            Scheme::Rps => f.write_str("RPS"),
            Scheme::RpsDiscrete(b) => write!(f, "RPS-{b}bit"),
            Scheme::Dps(b) => write!(f, "DPS-{b}bit"),
            Scheme::Cps => f.write_str("CPS"),
        }
    }
}

impl FromStr for Scheme {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        Scheme::parse_with_bits(s, 1)
    }
}

/// Sum rate of one scheme in one drop.
#[derive(Debug, Clone, PartialEq)]
pub struct DropResult {
    pub drop_index: u64,
    pub scheme: Scheme,
    pub per_user_rates: Vec<f64>,
    pub sum_rate: f64,
}

impl DropResult {
    pub fn new(drop_index: u64, scheme: Scheme, per_user_rates: Vec<f64>) -> Self {
        let sum_rate = sum_rate(&per_user_rates);
        Self {
            drop_index,
            scheme,
            per_user_rates,
            sum_rate,
        }
    }
}

/// 5th-percentile ("95%-likely") and median sum rate of one scheme.
#[derive(Debug, Clone, PartialEq)]
pub struct CdfSummary {
    pub scheme: Scheme,
    pub p5: f64,
    pub p50: f64,
    pub samples: usize,
}

impl CdfSummary {
    pub fn from_samples(scheme: Scheme, samples: &[f64]) -> Result<Self> {
        if samples.is_empty() {
            return Err(Error::NoData);
        }
        let mut sorted = samples.to_vec();
        sorted.sort_by(f64::total_cmp);
        Ok(Self {
            scheme,
            p5: percentile_sorted(&sorted, 0.05),
            p50: percentile_sorted(&sorted, 0.50),
            samples: sorted.len(),
        })
    }
}

/// One summary per scheme, in the order `schemes` lists them.
pub fn summarize(results: &[DropResult], schemes: &[Scheme]) -> Result<Vec<CdfSummary>> {
    schemes
        .iter()
        .map(|&s| {
            let samples: Vec<f64> = results
                .iter()
                .filter(|r| r.scheme == s)
                .map(|r| r.sum_rate)
                .collect();
            CdfSummary::from_samples(s, &samples)
        })
        .collect()
}

/// Sorted samples paired with the empirical CDF `i/N`.
pub fn empirical_cdf(samples: &[f64]) -> Vec<(f64, f64)> {
    let mut sorted = samples.to_vec();
    sorted.sort_by(f64::total_cmp);
    let n = sorted.len() as f64;
    sorted
        .into_iter()
        .enumerate()
        .map(|(i, x)| (x, (i + 1) as f64 / n))
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::beamforming::mrt;
    use proptest::prelude::*;

    #[test]
    fn noise_power_examples() {
        let n = noise_power(20e6, 290.0, 9.0);
        assert!((n / 6.36e-13 - 1.0).abs() < 0.005, "{n}");
        let dbm = 10.0 * (n / 1e-3).log10();
        assert!((dbm + 91.97).abs() < 0.01);
        assert_eq!(noise_power(20e6, 290.0, 0.0), BOLTZMANN * 20e6 * 290.0);
        assert!((noise_power(40e6, 290.0, 9.0) / n - 2.0).abs() < 1e-12);
    }

    #[test]
    fn user_rate_examples() {
        let e = [C64::new(3f64.sqrt(), 0.0)];
        let w = mrt(&e).w;
        assert!((user_rate(&e, &w, 1.0, 1.0, 1) - 2.0).abs() < 1e-12);
        assert_eq!(user_rate(&[C64::new(0.0, 0.0)], &[C64::new(1.0, 0.0)], 1.0, 1.0, 1), 0.0);
        let r1 = user_rate(&e, &w, 1.0, 1.0, 1);
        assert!((user_rate(&e, &w, 1.0, 1.0, 4) - r1 / 4.0).abs() < 1e-15);
    }

    #[test]
    fn mrt_rate_matches_norm_form() {
        let e = [C64::new(0.3, -1.2), C64::new(2.0, 0.7), C64::new(-0.1, 0.0)];
        let w = mrt(&e).w;
        let direct = user_rate(&e, &w, 20.0, 0.5, 3);
        let norm_form = rate_from_gain(crate::linalg::norm_sqr(&e), 20.0, 0.5, 3);
        assert!((direct - norm_form).abs() < 1e-10);
    }

    #[test]
    fn sum_rate_examples() {
        assert_eq!(sum_rate(&[1.5, 1.5]), 3.0);
        assert_eq!(sum_rate(&[]), 0.0);
        assert!((sum_rate(&[0.25, 1.125, 2.5]) - 3.875).abs() < 1e-15);
    }

    #[test]
    fn percentile_examples() {
        let s: Vec<f64> = (1..=100).map(|i| 10.0 * i as f64).collect();
        assert_eq!(percentile(&s, 0.05).unwrap(), 50.0);
        assert_eq!(percentile(&s, 0.50).unwrap(), 500.0);
        assert_eq!(percentile(&[7.5], 0.05).unwrap(), 7.5);
        assert_eq!(percentile(&[7.5], 0.5).unwrap(), 7.5);
        assert!(matches!(percentile(&[], 0.5), Err(Error::NoData)));
    }

    #[test]
    fn scheme_names_round_trip() {
        let all = [
            Scheme::Tdma,
            Scheme::Noma,
            Scheme::Rps,
            Scheme::RpsDiscrete(2),
            Scheme::Dps(1),
            Scheme::Dps(3),
            Scheme::Cps,
        ];
        for s in all {
            assert_eq!(s.to_string().parse::<Scheme>().unwrap(), s);
        }
        assert_eq!(Scheme::parse_with_bits("dps", 2).unwrap(), Scheme::Dps(2));
        assert_eq!(Scheme::parse_with_bits("rps-d", 1).unwrap(), Scheme::RpsDiscrete(1));
        assert_eq!(
            Scheme::parse_list("tdma, CPS,DPS-2bit,cps", 1).unwrap(),
            vec![Scheme::Tdma, Scheme::Cps, Scheme::Dps(2)]
        );
        assert!(Scheme::parse_with_bits("FDMA", 1).is_err());
        assert!(Scheme::parse_with_bits("DPS-0bit", 1).is_err());
    }

    #[test]
    fn cdf_ends_at_one() {
        let cdf = empirical_cdf(&[3.0, 1.0, 2.0]);
        assert_eq!(cdf, vec![(1.0, 1.0 / 3.0), (2.0, 2.0 / 3.0), (3.0, 1.0)]);
    }

    proptest! {
        #[test]
        fn percentile_monotone_and_order_free(
            mut v in prop::collection::vec(-1e3f64..1e3, 1..200),
            q1 in 0.01f64..0.99,
            q2 in 0.01f64..0.99,
        ) {
            let (lo, hi) = if q1 <= q2 { (q1, q2) } else { (q2, q1) };
            let a = percentile(&v, lo).unwrap();
            let b = percentile(&v, hi).unwrap();
            prop_assert!(a <= b);
            v.reverse();
            prop_assert_eq!(percentile(&v, lo).unwrap(), a);
        }
    }
}
