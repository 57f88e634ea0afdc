//! Comparison schemes: TDMA and NOMA over the direct links only, and
//! random surface phases followed by MRT.

use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::beamforming::{effective_channel, mrt};
use crate::linalg::{dot, norm_sqr, CMatrix, C64};
use crate::metrics::{rate_from_gain, user_rate};
use crate::reflection::{random_phases, DiscretePhaseSet};

/// TDMA without surfaces: MRT on each direct channel, `1/K` slot share.
pub fn tdma_rates_no_irs(direct: &[Vec<C64>], tx_power: f64, noise_var: f64) -> Vec<f64> {
    let k = direct.len();
    direct
        .iter()
        .map(|f| rate_from_gain(norm_sqr(f), tx_power, noise_var, k))
        .collect()
}

/// Power split and SIC order for downlink NOMA.
#[derive(Debug, Clone, PartialEq)]
pub struct NomaAllocation {
    /// User indices from weakest to strongest direct-channel gain.
    pub order: Vec<usize>,
    /// Power fraction of the user at each position of `order`.
    pub coefficients: Vec<f64>,
}

impl NomaAllocation {
    /// Coefficients `2k/(K(K+1))`, `k = 1..K`, with the largest going to the
    /// weakest user. Gain ties go to the lower user index as the weaker one.
    pub fn for_channels(direct: &[Vec<C64>]) -> Self {
        let gains: Vec<f64> = direct.iter().map(|f| norm_sqr(f)).collect();
        let mut order: Vec<usize> = (0..direct.len()).collect();
        order.sort_by(|&a, &b| gains[a].total_cmp(&gains[b]).then(a.cmp(&b)));
        let k = direct.len() as f64;
        let coefficients = (0..direct.len())
            .map(|pos| 2.0 * (k - pos as f64) / (k * (k + 1.0)))
            .collect();
        Self {
            order,
            coefficients,
        }
    }
}

/// How residual (not yet cancelled) NOMA layers reach a receiver.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum NomaInterference {
    /// Every layer arrives with the receiver's own matched gain `‖f_i‖²`,
    /// the degraded-broadcast model. Reproduces the published baseline.
    SharedGain,
    /// Layer `j` arrives through its own MRT beam: `|f_i^T w_j|²`.
    CrossBeam,
}

/// Per-user NOMA rates (indexed like `direct`). No `1/K` factor: every user
/// is served over the whole frame.
pub fn noma_rates(
    direct: &[Vec<C64>],
    tx_power: f64,
    noise_var: f64,
    model: NomaInterference,
) -> Vec<f64> {
    let alloc = NomaAllocation::for_channels(direct);
    let beams: Vec<Vec<C64>> = alloc.order.iter().map(|&u| mrt(&direct[u]).w).collect();
    let mut rates = vec![0.0; direct.len()];
    for (pos, &user) in alloc.order.iter().enumerate() {
        let f = &direct[user];
        let gain_via = |j: usize| match model {
            NomaInterference::SharedGain => norm_sqr(f),
            NomaInterference::CrossBeam => dot(f, &beams[j]).norm_sqr(),
        };
        let signal = alloc.coefficients[pos] * tx_power * gain_via(pos);
        let interference: f64 = (pos + 1..direct.len())
            .map(|j| alloc.coefficients[j] * tx_power * gain_via(j))
            .sum();
        rates[user] = (1.0 + signal / (interference + noise_var)).log2();
    }
    rates
}

/// Random phases (continuous when `set` is `None`) followed by MRT on the
/// resulting effective channel.
#[allow(clippy::too_many_arguments)]
pub fn rps_rate<R: Rng + ?Sized>(
    g: &[C64],
    h: &CMatrix,
    f: &[C64],
    set: Option<&DiscretePhaseSet>,
    tx_power: f64,
    noise_var: f64,
    n_users: usize,
    rng: &mut R,
) -> f64 {
    let phases = random_phases(h.rows(), set, rng);
    let e = effective_channel(g, &phases, h, f);
    let w = mrt(&e);
    user_rate(&e, &w.w, tx_power, noise_var, n_users)
}
