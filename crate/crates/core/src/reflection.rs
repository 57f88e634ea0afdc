//! Phase-shift configurations of the reflecting elements.
//!
//! Amplitudes are fixed at one, so a configuration is fully described by
//! its phases. All phases are kept in `[0, 2π)`.

use std::f64::consts::{PI, TAU};

use rand::Rng;

use crate::linalg::C64;

/// Reduces an angle into `[0, 2π)`.
#[inline]
pub fn wrap_phase(phi: f64) -> f64 {
    let r = phi.rem_euclid(TAU);
    // rem_euclid can round up to exactly 2π for tiny negative inputs.
    if r >= TAU {
        0.0
    } else {
        r
    }
}

/// Signed angular difference reduced into `[-π, π)`.
#[inline]
pub fn angle_diff(a: f64, b: f64) -> f64 {
    (a - b + PI).rem_euclid(TAU) - PI
}

/// Phases of all elements, flattened over surfaces in surface order.
#[derive(Debug, Clone, PartialEq)]
pub struct PhaseVector(Vec<f64>);

impl PhaseVector {
    pub fn new(phases: impl IntoIterator<Item = f64>) -> Self {
        Self(phases.into_iter().map(wrap_phase).collect())
    }

    pub fn zeros(n: usize) -> Self {
        Self(vec![0.0; n])
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn as_slice(&self) -> &[f64] {
        &self.0
    }

    /// Diagonal of the reflection matrix: `e^{jφ_n}`.
    pub fn reflection_coefficients(&self) -> Vec<C64> {
        self.0.iter().map(|&p| C64::from_polar(1.0, p)).collect()
    }

    pub fn quantized(&self, set: &DiscretePhaseSet) -> PhaseVector {
        Self(self.0.iter().map(|&p| set.quantize(p)).collect())
    }
}

/// `{0, Δθ, …, (L-1)Δθ}` with `L = 2^bits` and `Δθ = 2π/L`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct DiscretePhaseSet {
    bits: u32,
}

impl DiscretePhaseSet {
    pub fn new(bits: u32) -> Self {
        assert!((1..=16).contains(&bits), "quantizer bits must be in 1..=16");
        Self { bits }
    }

    pub fn bits(&self) -> u32 {
        self.bits
    }

    pub fn levels(&self) -> u64 {
        1 << self.bits
    }

    pub fn step(&self) -> f64 {
        TAU / self.levels() as f64
    }

    pub fn level(&self, index: u64) -> f64 {
        (index % self.levels()) as f64 * self.step()
    }

    pub fn members(&self) -> impl Iterator<Item = f64> + '_ {
        (0..self.levels()).map(|i| self.level(i))
    }

    /// Mid-tread rounding `Δθ·⌊φ/Δθ + 0.5⌋`, reduced so the result is a member
    /// of the set (a result of `2π` maps to `0`).
    pub fn quantize(&self, phi: f64) -> f64 {
        let idx = (phi / self.step() + 0.5).floor() as i64;
        self.level(idx.rem_euclid(self.levels() as i64) as u64)
    }
}

/// Continuous (`None`) or discrete random phases.
pub fn random_phases<R: Rng + ?Sized>(
    n: usize,
    set: Option<&DiscretePhaseSet>,
    rng: &mut R,
) -> PhaseVector {
    match set {
        None => PhaseVector((0..n).map(|_| rng.random::<f64>() * TAU).collect()),
        Some(set) => {
            PhaseVector((0..n).map(|_| set.level(rng.random_range(0..set.levels()))).collect())
        }
    }
}
