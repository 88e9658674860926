// Copyright 2026 Pblockade Contributors
// SPDX-License-Identifier: Apache-2.0

//! Phonon statistics of a steady state.
//!
//! All quantities refer to the squeezed-frame mode `a_s` and trace out the
//! spin. Blockade criteria are strict inequalities with no tolerance; the raw
//! margins are reported next to the flags.

use ndarray::Array2;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::dynamics::MIN_MEAN_PHONON;
use crate::qcore::{annihilation, number, trace_of_product, DensityMatrix, Spin, C64};

/// Poisson probabilities below this value are ignored by the distribution test.
pub const POISSON_FLOOR: f64 = 1e-12;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum StatsError {
    #[error("mean phonon number {0:.3e} is zero; normalized correlation undefined")]
    ZeroMeanPhononNumber(f64),
    #[error("correlation order must be at least 1")]
    InvalidOrder,
}

/// `⟨a†a⟩`.
pub fn mean_phonon_number(rho: &DensityMatrix) -> f64 {
    trace_of_product(rho.matrix().view(), number(rho.space()).matrix().view()).re
}

/// `g^(μ)(0) = ⟨a†^μ a^μ⟩ / ⟨a†a⟩^μ`.
pub fn g_mu(rho: &DensityMatrix, mu: usize) -> Result<f64, StatsError> {
    if mu == 0 {
        return Err(StatsError::InvalidOrder);
    }
    let n = mean_phonon_number(rho);
    if n <= MIN_MEAN_PHONON {
        return Err(StatsError::ZeroMeanPhononNumber(n));
    }
    let a = annihilation(rho.space());
    let d = rho.space().dim();
    let mut a_mu: Array2<C64> = Array2::eye(d);
    for _ in 0..mu {
        a_mu = a_mu.dot(a.matrix());
    }
    let op = a_mu.t().mapv(|z| z.conj()).dot(&a_mu);
    let moment = trace_of_product(rho.matrix().view(), op.view()).re;
    Ok(moment.max(0.0) / n.powi(mu as i32))
}

/// `P(m) = Σ_s ⟨m, s|ρ|m, s⟩` for `m = 0..N−1`.
pub fn phonon_distribution(rho: &DensityMatrix) -> Vec<f64> {
    let fock = rho.space().fock_dim();
    (0..fock)
        .map(|m| {
            rho.population(m, Spin::Dark).unwrap_or(0.0)
                + rho.population(m, Spin::Excited).unwrap_or(0.0)
        })
        .collect()
}

/// `𝒫(m) = n̄^m e^{−n̄}/m!` for `m = 0..len−1`.
pub fn poisson_reference(n_mean: f64, len: usize) -> Vec<f64> {
    let mut out = Vec::with_capacity(len);
    let mut term = (-n_mean).exp();
    for m in 0..len {
        if m > 0 {
            term *= n_mean / m as f64;
        }
        out.push(term);
    }
    out
}

/// Poisson weight beyond the truncation, `1 − Σ_{m<len} 𝒫(m)`.
pub fn poisson_tail(n_mean: f64, len: usize) -> f64 {
    (1.0 - poisson_reference(n_mean, len).iter().sum::<f64>()).max(0.0)
}

/// Relative deviation `[P(m) − 𝒫(m)]/𝒫(m)`, `None` where `𝒫(m) = 0`.
pub fn poisson_deviation(p: &[f64], poisson: &[f64]) -> Vec<Option<f64>> {
    p.iter()
        .zip(poisson)
        .map(|(&x, &q)| if q > 0.0 { Some((x - q) / q) } else { None })
        .collect()
}

/// Correlation form of the `n`-phonon blockade test:
/// (i) `g^(n+1) < e^{−n̄}`, (ii) `g^(n) ≥ e^{−n̄} + n̄ g^(n+1)`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct CorrelationCriteria {
    pub criterion_i: bool,
    pub criterion_ii: bool,
    /// `e^{−n̄} − g^(n+1)`; positive when (i) holds.
    pub margin_i: f64,
    /// `g^(n) − e^{−n̄} − n̄ g^(n+1)`; non-negative when (ii) holds.
    pub margin_ii: f64,
    /// Threshold of (ii).
    pub threshold_ii: f64,
}

pub fn correlation_criteria(n_mean: f64, g_n: f64, g_n1: f64) -> CorrelationCriteria {
    let f = (-n_mean).exp();
    let threshold_ii = f + n_mean * g_n1;
    CorrelationCriteria {
        criterion_i: g_n1 < f,
        criterion_ii: g_n >= threshold_ii,
        margin_i: f - g_n1,
        margin_ii: g_n - threshold_ii,
        threshold_ii,
    }
}

/// Single-phonon blockade test from `g¹`, `g²` and `n̄`.
pub fn blockade_criteria(n_mean: f64, g1: f64, g2: f64) -> CorrelationCriteria {
    correlation_criteria(n_mean, g1, g2)
}

/// Distribution form of the `n`-phonon blockade test:
/// (i) `P(m) < 𝒫(m)` for every `m > n` with `𝒫(m) > POISSON_FLOOR`,
/// (ii) `P(n) ≥ 𝒫(n)`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct DistributionCriteria {
    pub sub_poissonian_above: bool,
    pub super_poissonian_at: bool,
}

pub fn distribution_criteria(p: &[f64], poisson: &[f64], n: usize) -> DistributionCriteria {
    let sub = p
        .iter()
        .zip(poisson)
        .enumerate()
        .filter(|(m, (_, &q))| *m > n && q > POISSON_FLOOR)
        .all(|(_, (&x, &q))| x < q);
    let sup = matches!((p.get(n), poisson.get(n)), (Some(&x), Some(&q)) if x >= q);
    DistributionCriteria {
        sub_poissonian_above: sub,
        super_poissonian_at: sup,
    }
}

/// Summed population of `|0,D⟩, |1,D⟩, |2,D⟩, |0,E⟩`.
pub fn truncation_fidelity(rho: &DensityMatrix) -> f64 {
    [(0, Spin::Dark), (1, Spin::Dark), (2, Spin::Dark), (0, Spin::Excited)]
        .iter()
        .map(|&(n, s)| rho.population(n, s).unwrap_or(0.0))
        .sum()
}

/// Two-phonon population and spin excitation probability.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct Detection {
    pub p2: f64,
    pub pe: f64,
}

impl Detection {
    /// `P_e/P₂` when `P₂ > 0`.
    pub fn sensitivity(&self) -> Option<f64> {
        (self.p2 > 0.0).then(|| self.pe / self.p2)
    }
}

pub fn detection_observables(rho: &DensityMatrix) -> Detection {
    let fock = rho.space().fock_dim();
    let p2 = if fock > 2 {
        rho.population(2, Spin::Dark).unwrap_or(0.0) + rho.population(2, Spin::Excited).unwrap_or(0.0)
    } else {
        0.0
    };
    let pe = (0..fock)
        .map(|n| rho.population(n, Spin::Excited).unwrap_or(0.0))
        .sum();
    Detection { p2, pe }
}

/// Everything reported for one parameter point.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct BlockadeReport {
    pub n_mean: f64,
    /// `None` when the mode is empty.
    pub g1: Option<f64>,
    pub g2: Option<f64>,
    pub g3: Option<f64>,
    pub p: Vec<f64>,
    pub poisson: Vec<f64>,
    pub poisson_tail: f64,
    pub f: f64,
    pub f1: Option<f64>,
    pub criteria: Option<CorrelationCriteria>,
    pub distribution: DistributionCriteria,
    pub fidelity: f64,
    pub p2: f64,
    pub pe: f64,
}

impl BlockadeReport {
    pub fn from_state(rho: &DensityMatrix) -> Self {
        let n_mean = mean_phonon_number(rho);
        let g = |mu| g_mu(rho, mu).ok();
        let (g1, g2, g3) = (g(1), g(2), g(3));
        let p = phonon_distribution(rho);
        let poisson = poisson_reference(n_mean, p.len());
        let criteria = match (g1, g2) {
            (Some(a), Some(b)) => Some(blockade_criteria(n_mean, a, b)),
            _ => None,
        };
        let det = detection_observables(rho);
        Self {
            n_mean,
            g1,
            g2,
            g3,
            poisson_tail: poisson_tail(n_mean, p.len()),
            f: (-n_mean).exp(),
            f1: criteria.map(|c| c.threshold_ii),
            criteria,
            distribution: distribution_criteria(&p, &poisson, 1),
            fidelity: truncation_fidelity(rho),
            p2: det.p2,
            pe: det.pe,
            p,
            poisson,
        }
    }

    /// Criterion (i); false when undefined.
    pub fn criterion_i(&self) -> bool {
        self.criteria.is_some_and(|c| c.criterion_i)
    }

    /// Criterion (ii); false when undefined.
    pub fn criterion_ii(&self) -> bool {
        self.criteria.is_some_and(|c| c.criterion_ii)
    }

    pub fn sensitivity(&self) -> Option<f64> {
        Detection {
            p2: self.p2,
            pe: self.pe,
        }
        .sensitivity()
    }
}
