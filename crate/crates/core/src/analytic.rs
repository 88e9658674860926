// Copyright 2026 Pblockade Contributors
// SPDX-License-Identifier: Apache-2.0

//! Weak-drive closed forms for the two-phonon model.
//!
//! The steady state is approximated by the four-state ansatz
//! `C0d|0,D⟩ + C1d|1,D⟩ + C2d|2,D⟩ + C0e|0,E⟩` evolving under the
//! non-Hermitian effective Hamiltonian.

use serde::Serialize;
use thiserror::Error;

use crate::model::{Coupling, ModelParams};
use crate::qcore::C64;

/// Drive ratio `ε_L′/g_eff` above which the ansatz is flagged.
pub const WEAK_DRIVE_LIMIT: f64 = 0.1;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum AnalyticError {
    #[error("amplitude equations are degenerate (|det| = {det:.3e})")]
    Degenerate { det: f64 },
}

/// Steady-state amplitudes of the four-state ansatz.
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct AmplitudeSolution {
    pub c0d: C64,
    pub c1d: C64,
    pub c2d: C64,
    pub c0e: C64,
    /// `(γ_z/2)² + γ_m_eff² − 4g_eff²`.
    pub zeta: f64,
    /// `g_eff² + γ_z γ_m_eff/4`.
    pub xi: f64,
}

impl AmplitudeSolution {
    /// `2|C2d|²/|C1d|⁴`, `None` when `C1d = 0`.
    pub fn g2(&self) -> Option<f64> {
        let p1 = self.c1d.norm_sqr();
        (p1 > 0.0).then(|| 2.0 * self.c2d.norm_sqr() / (p1 * p1))
    }
}

fn zeta(p: &ModelParams) -> f64 {
    (p.gamma_z / 2.0).powi(2) + p.gamma_m_eff.powi(2) - 4.0 * p.g_eff().powi(2)
}

fn xi(p: &ModelParams) -> f64 {
    p.g_eff().powi(2) + p.gamma_z * p.gamma_m_eff / 4.0
}

/// Solves the stationary amplitude equations with `C0d` real and positive.
///
/// `C1d` follows from neglecting `C2d` in its own equation and normalizing
/// `|C0d|² + |C1d|² = 1`; `(C2d, C0e)` then solve the remaining 2×2 system.
pub fn steady_amplitudes(p: &ModelParams) -> Result<AmplitudeSolution, AnalyticError> {
    let (delta, g, eps) = (p.delta, p.g_eff(), p.eps_l_eff());
    if g > 0.0 && eps / g > WEAK_DRIVE_LIMIT {
        log::warn!("drive ε_L′/g_eff = {:.3} is outside the weak-drive regime", eps / g);
    }
    let i = C64::i();
    let s2 = std::f64::consts::SQRT_2;
    let d1 = delta - i * (p.gamma_m_eff / 2.0);
    let d2 = 2.0 * delta - i * p.gamma_m_eff;
    let de = 2.0 * delta - i * (p.gamma_z / 2.0);

    let p1 = eps * eps / (delta * delta + eps * eps + (p.gamma_m_eff / 2.0).powi(2));
    let c0d = C64::new((1.0 - p1).sqrt(), 0.0);
    let c1d = if eps == 0.0 { C64::new(0.0, 0.0) } else { -eps * c0d / d1 };

    let det = d2 * de - 2.0 * g * g;
    let scale = [2.0 * delta.abs(), p.gamma_m_eff, p.gamma_z / 2.0, s2 * g]
        .into_iter()
        .fold(0.0, f64::max)
        .powi(2);
    if det.norm() <= 1e-14 * scale || det.norm() == 0.0 {
        return Err(AnalyticError::Degenerate { det: det.norm() });
    }
    let rhs = -s2 * eps * c1d;
    let c2d = rhs * de / det;
    let c0e = -s2 * g * rhs / det;
    Ok(AmplitudeSolution {
        c0d,
        c1d,
        c2d,
        c0e,
        zeta: zeta(p),
        xi: xi(p),
    })
}

/// Weak-drive `g²(0)` as a function of the detuning `δ`:
/// `[4δ²+(γ_z/2)²][δ²+ε_L′²+(γ_m_eff/2)²] / (4δ⁴+δ²ζ+Ξ²)`.
pub fn analytic_g2(p: &ModelParams) -> f64 {
    let d2 = p.delta * p.delta;
    let eps = p.eps_l_eff();
    let num = (4.0 * d2 + (p.gamma_z / 2.0).powi(2))
        * (d2 + eps * eps + (p.gamma_m_eff / 2.0).powi(2));
    num / (4.0 * d2 * d2 + d2 * zeta(p) + xi(p).powi(2))
}

/// Resonant minimum `γ_z²(γ_m_eff² + 4ε_L′²)/(γ_m_eff γ_z + 4g_eff²)²`.
pub fn analytic_g2_resonant(p: &ModelParams) -> f64 {
    let eps = p.eps_l_eff();
    p.gamma_z.powi(2) * (p.gamma_m_eff.powi(2) + 4.0 * eps * eps)
        / (p.gamma_m_eff * p.gamma_z + 4.0 * p.g_eff().powi(2)).powi(2)
}

/// Vanishing-drive limit of the resonant minimum, `1/(1 + 4C′)²`.
pub fn cooperativity_limit(p: &ModelParams) -> f64 {
    (1.0 + 4.0 * p.effective_cooperativity()).powi(-2)
}

/// `(g_eff/g, C′/C) = (cosh² r_p, cosh⁴ r_p)`.
pub fn enhancement_factors(r_p: f64) -> (f64, f64) {
    let c2 = r_p.cosh().powi(2);
    (c2, c2 * c2)
}

/// Gap of the lowest dressed doublet: `2√2 g_eff` for the two-phonon
/// exchange, `2 g_eff′` for the single-phonon one.
pub fn anharmonic_splitting(p: &ModelParams, coupling: Coupling) -> f64 {
    let q = ModelParams { coupling, ..p.clone() };
    match coupling {
        Coupling::TwoPhonon => 2.0 * std::f64::consts::SQRT_2 * q.g_eff(),
        Coupling::SinglePhonon => 2.0 * q.g_eff(),
    }
}
