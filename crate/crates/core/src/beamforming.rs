//! Joint active/passive beamforming for one user slot.
//!
//! The objective is `|(g^T Φ H + f^T) w|²` subject to `‖w‖ ≤ 1` and unit
//! modulus reflection. Alternating optimization fixes `w` and aligns every
//! reflected term to the direct path in closed form, then fixes the phases
//! and applies maximal-ratio transmission. Neither half-step can lower the
//! objective.

use crate::linalg::{dot, norm, CMatrix, C64};
use crate::reflection::{wrap_phase, DiscretePhaseSet, PhaseVector};

/// Transmit vector at the base station.
#[derive(Debug, Clone, PartialEq)]
pub struct Beamformer {
    pub w: Vec<C64>,
    /// Set when MRT was asked to match an all-zero channel and fell back to
    /// the first basis vector.
    pub degenerate: bool,
}

impl Beamformer {
    pub fn norm(&self) -> f64 {
        norm(&self.w)
    }
}

/// Composite row vector `g^T Φ H + f^T`.
pub fn effective_channel(g: &[C64], phases: &PhaseVector, h: &CMatrix, f: &[C64]) -> Vec<C64> {
    assert_eq!(g.len(), h.rows(), "g and H disagree on element count");
    assert_eq!(phases.len(), h.rows(), "phase vector length mismatch");
    assert_eq!(f.len(), h.cols(), "f and H disagree on antenna count");
    let mut out = f.to_vec();
    for ((gn, &phi), row) in g.iter().zip(phases.as_slice()).zip(h.iter_rows()) {
        let c = gn * C64::from_polar(1.0, phi);
        for (o, hv) in out.iter_mut().zip(row) {
            *o += c * hv;
        }
    }
    out
}

/// `χ = diag(g) H w`: per-element reflected contribution before phasing.
pub fn reflected_terms(g: &[C64], h: &CMatrix, w: &[C64]) -> Vec<C64> {
    g.iter().zip(h.iter_rows()).map(|(gn, row)| gn * dot(row, w)).collect()
}

/// Received amplitude objective `|e · w|²`.
pub fn objective(effective: &[C64], w: &[C64]) -> f64 {
    dot(effective, w).norm_sqr()
}

/// Closed-form phase step: rotate every reflected term onto the phase of
/// the direct path `arg(f^T w)` (taken as 0 when `f^T w = 0`).
pub fn optimal_phases_given_w(g: &[C64], h: &CMatrix, f: &[C64], w: &[C64]) -> PhaseVector {
    let direct = dot(f, w);
    let phi0 = if direct == C64::new(0.0, 0.0) {
        0.0
    } else {
        direct.arg()
    };
    let phases = reflected_terms(g, h, w).into_iter().map(|chi| {
        if chi == C64::new(0.0, 0.0) {
            phi0
        } else {
            phi0 - chi.arg()
        }
    });
    PhaseVector::new(phases.map(wrap_phase))
}

/// Maximal-ratio transmission `w = e^H / ‖e‖`.
pub fn mrt(effective: &[C64]) -> Beamformer {
    let n = norm(effective);
    if n == 0.0 || !n.is_finite() {
        let mut w = vec![C64::new(0.0, 0.0); effective.len()];
        if let Some(first) = w.first_mut() {
            *first = C64::new(1.0, 0.0);
        }
        return Beamformer { w, degenerate: true };
    }
    Beamformer {
        w: effective.iter().map(|z| z.conj() / n).collect(),
        degenerate: false,
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct AoOptions {
    /// Iteration count, or the cap when `tolerance` is set.
    pub iterations: usize,
    /// Stop once the relative objective change drops below this.
    pub tolerance: Option<f64>,
}

impl Default for AoOptions {
    fn default() -> Self {
        Self {
            iterations: 3,
            tolerance: None,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct AoResult {
    pub phases: PhaseVector,
    pub w: Beamformer,
    /// Objective after each full iteration.
    pub objective_trace: Vec<f64>,
}

impl AoResult {
    pub fn objective(&self) -> f64 {
        *self.objective_trace.last().expect("at least one iteration")
    }
}

/// Alternating optimization warm-started from MRT on the direct channel.
pub fn alternating_optimize(g: &[C64], h: &CMatrix, f: &[C64], opts: &AoOptions) -> AoResult {
    assert!(opts.iterations >= 1, "need at least one iteration");
    let mut w = mrt(f);
    let mut phases = PhaseVector::zeros(h.rows());
    let mut trace: Vec<f64> = Vec::with_capacity(opts.iterations);
    for _ in 0..opts.iterations {
        phases = optimal_phases_given_w(g, h, f, &w.w);
        let e = effective_channel(g, &phases, h, f);
        w = mrt(&e);
        let obj = objective(&e, &w.w);
        let converged = match (opts.tolerance, trace.last()) {
            (Some(tol), Some(&prev)) => (obj - prev).abs() <= tol * prev.abs().max(f64::MIN_POSITIVE),
            _ => false,
        };
        trace.push(obj);
        if converged {
            break;
        }
    }
    AoResult {
        phases,
        w,
        objective_trace: trace,
    }
}

/// Quantizes continuous phases once and re-applies MRT on the quantized
/// effective channel. Returns the phases, beamformer and objective.
pub fn quantize_and_match(
    g: &[C64],
    h: &CMatrix,
    f: &[C64],
    continuous: &PhaseVector,
    set: &DiscretePhaseSet,
) -> (PhaseVector, Beamformer, f64) {
    let phases = continuous.quantized(set);
    let e = effective_channel(g, &phases, h, f);
    let w = mrt(&e);
    let obj = objective(&e, &w.w);
    (phases, w, obj)
}

/// Upper bound `(‖f‖ + Σ_n |g_n| ‖h_n‖)²` on the objective over all phases
/// and unit-norm beams.
pub fn objective_upper_bound(g: &[C64], h: &CMatrix, f: &[C64]) -> f64 {
    let reflected: f64 = g.iter().zip(h.iter_rows()).map(|(gn, row)| gn.norm() * norm(row)).sum();
    (norm(f) + reflected).powi(2)
}
