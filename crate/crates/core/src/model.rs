// Copyright 2026 Pblockade Contributors
// SPDX-License-Identifier: Apache-2.0

//! Model parameters and Hamiltonian builders.
//!
//! All frequencies are angular (rad/s). The mechanical mode operators `a` are
//! those of the squeezed frame unless a builder says otherwise; the lab-frame
//! builder uses the bare mode.
//!
//! Builders that carry an explicit time argument are written in the frame in
//! which the pump is static, with the linear drive rotating at `δ_L`.

use num_complex::Complex64;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::qcore::{
    annihilation, creation, excited_projector, number, sigma_minus, sigma_plus, HilbertSpace,
    Operator, QcoreError, C64,
};

#[derive(Debug, Error, Clone, PartialEq)]
pub enum ModelError {
    #[error("invalid parameter `{name}` = {value}: {reason}")]
    InvalidParameter {
        name: &'static str,
        value: f64,
        reason: &'static str,
    },
    #[error(transparent)]
    Space(#[from] QcoreError),
}

fn invalid(name: &'static str, value: f64, reason: &'static str) -> ModelError {
    ModelError::InvalidParameter {
        name,
        value,
        reason,
    }
}

/// Microwave-dressed spin reduced to the `{|D⟩, |E⟩}` pair.
///
/// Valid for `Δ ≫ Ω`, where the bright/dark mixing is weak (`cos θ ≃ 1`) and
/// the third dressed level can be dropped.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct SpinDressing {
    pub delta: f64,
    pub omega: f64,
    pub theta: f64,
    pub omega_ed: f64,
}

impl SpinDressing {
    /// `ω_eg = √(Δ² + 2Ω²)`.
    pub fn omega_eg(&self) -> f64 {
        (self.delta.powi(2) + 2.0 * self.omega.powi(2)).sqrt()
    }

    /// `ω_dg = (Δ + √(Δ² + 2Ω²))/2`, so that `ω_ed = ω_eg − ω_dg`.
    pub fn omega_dg(&self) -> f64 {
        0.5 * (self.delta + self.omega_eg())
    }

    /// Leading-order splitting `Ω²/(2Δ)`.
    pub fn omega_ed_leading_order(&self) -> f64 {
        self.omega * self.omega / (2.0 * self.delta)
    }
}

/// Dress the spin with detuning `Δ > 0` and Rabi frequency `Ω ≥ 0`.
pub fn dress_spin(delta: f64, omega: f64) -> Result<SpinDressing, ModelError> {
    if !delta.is_finite() || delta <= 0.0 {
        return Err(invalid("Delta", delta, "must be positive"));
    }
    if !omega.is_finite() || omega < 0.0 {
        return Err(invalid("Omega", omega, "must be non-negative"));
    }
    let root = (delta * delta + 2.0 * omega * omega).sqrt();
    Ok(SpinDressing {
        delta,
        omega,
        theta: 0.5 * (2f64.sqrt() * omega).atan2(delta),
        omega_ed: 0.5 * (root - delta),
    })
}

/// Bogoliubov squeeze with parameter `r_p`; `a = U a_s − V a_s†`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "f64", into = "f64")]
pub struct SqueezeTransform {
    r_p: f64,
}

impl SqueezeTransform {
    pub fn new(r_p: f64) -> Result<Self, ModelError> {
        if !r_p.is_finite() || r_p < 0.0 {
            return Err(invalid("r_p", r_p, "must be finite and non-negative"));
        }
        Ok(Self { r_p })
    }

    pub fn none() -> Self {
        Self { r_p: 0.0 }
    }

    /// `r_p = ½ artanh(Ω_p/δ_m)`, requiring `|Ω_p| < |δ_m|`.
    pub fn from_pump(omega_p: f64, delta_m: f64) -> Result<Self, ModelError> {
        if !(omega_p.abs() < delta_m.abs()) {
            return Err(invalid("Omega_p", omega_p, "pump must satisfy |Omega_p| < |delta_m|"));
        }
        Self::new(0.5 * (omega_p / delta_m).atanh())
    }

    pub fn r_p(&self) -> f64 {
        self.r_p
    }

    pub fn u(&self) -> f64 {
        self.r_p.cosh()
    }

    pub fn v(&self) -> f64 {
        self.r_p.sinh()
    }
}

impl TryFrom<f64> for SqueezeTransform {
    type Error = ModelError;
    fn try_from(r: f64) -> Result<Self, ModelError> {
        Self::new(r)
    }
}

impl From<SqueezeTransform> for f64 {
    fn from(s: SqueezeTransform) -> f64 {
        s.r_p
    }
}

/// Spin-mechanical exchange: phonon pairs or single phonons.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Coupling {
    #[default]
    TwoPhonon,
    SinglePhonon,
}

/// Squeezed-frame model parameters.
///
/// For [`Coupling::SinglePhonon`] the field `g` holds the bare single-phonon
/// rate `g₀` and `delta_ed` the spin detuning from the pump.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct ModelParams {
    #[serde(default)]
    pub coupling: Coupling,
    pub g: f64,
    pub squeeze: SqueezeTransform,
    pub eps_l: f64,
    pub delta: f64,
    pub delta_s: f64,
    pub delta_ed: f64,
    pub gamma_m_eff: f64,
    pub gamma_z: f64,
    pub n_th: f64,
    pub fock_dim: usize,
}

impl ModelParams {
    pub fn validate(&self) -> Result<(), ModelError> {
        let nonneg = [
            ("g", self.g),
            ("eps_l", self.eps_l),
            ("gamma_m_eff", self.gamma_m_eff),
            ("gamma_z", self.gamma_z),
            ("n_th", self.n_th),
        ];
        for (name, v) in nonneg {
            if !v.is_finite() || v < 0.0 {
                return Err(invalid(name, v, "must be finite and non-negative"));
            }
        }
        for (name, v) in [
            ("delta", self.delta),
            ("delta_s", self.delta_s),
            ("delta_ed", self.delta_ed),
        ] {
            if !v.is_finite() {
                return Err(invalid(name, v, "must be finite"));
            }
        }
        HilbertSpace::new(self.fock_dim)?;
        Ok(())
    }

    pub fn space(&self) -> Result<HilbertSpace, ModelError> {
        Ok(HilbertSpace::new(self.fock_dim)?)
    }

    /// Enhanced coupling: `g cosh²r` (two-phonon) or `g₀ cosh r` (single-phonon).
    pub fn g_eff(&self) -> f64 {
        match self.coupling {
            Coupling::TwoPhonon => self.g * self.squeeze.u().powi(2),
            Coupling::SinglePhonon => self.g * self.squeeze.u(),
        }
    }

    /// `ε_L cosh r`.
    pub fn eps_l_eff(&self) -> f64 {
        self.eps_l * self.squeeze.u()
    }

    /// Drive frequency in the pump frame, `δ_L = δ_s − δ`.
    pub fn delta_l(&self) -> f64 {
        self.delta_s - self.delta
    }

    /// Lab-frame mechanical detuning `δ_m = δ_s cosh 2r`.
    pub fn delta_m(&self) -> f64 {
        self.delta_s * (2.0 * self.squeeze.r_p()).cosh()
    }

    /// Pump amplitude `Ω_p = δ_m tanh 2r`.
    pub fn pump_amplitude(&self) -> f64 {
        self.delta_m() * (2.0 * self.squeeze.r_p()).tanh()
    }

    /// `C′ = g_eff²/(γ_m_eff γ_z)`.
    pub fn effective_cooperativity(&self) -> f64 {
        self.g_eff().powi(2) / (self.gamma_m_eff * self.gamma_z)
    }

    /// `C = g²/(γ_m γ_z)` for a bare mechanical linewidth `γ_m`.
    pub fn bare_cooperativity(&self, gamma_m: f64) -> f64 {
        self.g.powi(2) / (gamma_m * self.gamma_z)
    }

    /// Collapse set `{(a_s, γ_m_eff), (σ₊σ₋, γ_z)}`.
    pub fn collapse_operators(&self) -> Result<Vec<(Operator, f64)>, ModelError> {
        let s = self.space()?;
        Ok(vec![
            (annihilation(s), self.gamma_m_eff),
            (excited_projector(s), self.gamma_z),
        ])
    }
}

/// `δ_s = δ_m / cosh 2r`.
pub fn squeezed_frequency(delta_m: f64, squeeze: SqueezeTransform) -> f64 {
    delta_m / (2.0 * squeeze.r_p()).cosh()
}

/// Operators shared by the builders.
struct Ops {
    a: Operator,
    ad: Operator,
    n: Operator,
    sm: Operator,
    sp: Operator,
    pe: Operator,
}

impl Ops {
    fn new(space: HilbertSpace) -> Self {
        Self {
            a: annihilation(space),
            ad: creation(space),
            n: number(space),
            sm: sigma_minus(space),
            sp: sigma_plus(space),
            pe: excited_projector(space),
        }
    }

    /// `a†²σ₋ + a²σ₊`.
    fn two_phonon_exchange(&self) -> Operator {
        let ad2 = self.ad.dot(&self.ad);
        let a2 = self.a.dot(&self.a);
        &ad2.dot(&self.sm) + &a2.dot(&self.sp)
    }

    /// `a†σ₋ + aσ₊`.
    fn single_phonon_exchange(&self) -> Operator {
        &self.ad.dot(&self.sm) + &self.a.dot(&self.sp)
    }

    /// `c a† + c* a`.
    fn drive(&self, c: C64) -> Operator {
        &(&self.ad * c) + &(&self.a * c.conj())
    }
}

fn phase(theta: f64) -> C64 {
    Complex64::from_polar(1.0, theta)
}

fn checked(p: &ModelParams) -> Result<Ops, ModelError> {
    p.validate()?;
    Ok(Ops::new(p.space()?))
}

/// Lab-frame Hamiltonian with static pump:
/// `δ_m n + δ_ed σ₊σ₋ + g(a†²σ₋ + a²σ₊) + (Ω_p/2)(a†² + a²) + ε_L(a†e^{−iδ_L t} + h.c.)`.
pub fn build_lab_hamiltonian(p: &ModelParams, t: f64) -> Result<Operator, ModelError> {
    let o = checked(p)?;
    let ad2 = o.ad.dot(&o.ad);
    let pump = &ad2 + &ad2.adjoint();
    let h = &(&o.n * p.delta_m()) + &(&o.pe * p.delta_ed);
    let h = &h + &(&o.two_phonon_exchange() * p.g);
    let h = &h + &(&pump * (0.5 * p.pump_amplitude()));
    Ok(&h + &o.drive(phase(-p.delta_l() * t) * p.eps_l))
}

/// Squeezed-frame Hamiltonian with every counter-rotating term kept.
pub fn build_squeezed_full_hamiltonian(p: &ModelParams, t: f64) -> Result<Operator, ModelError> {
    let o = checked(p)?;
    let (u, v) = (p.squeeze.u(), p.squeeze.v());
    let ad2 = o.ad.dot(&o.ad);
    let a2 = o.a.dot(&o.a);
    let counter = &ad2.dot(&o.sp) + &a2.dot(&o.sm);
    let sym = &o.ad.dot(&o.a) + &o.a.dot(&o.ad);
    let sx = &o.sp + &o.sm;
    let wl = p.delta_l() * t;

    let h = &(&o.n * p.delta_s) + &(&o.pe * p.delta_ed);
    let h = &h + &(&o.two_phonon_exchange() * (p.g * u * u));
    let h = &h + &(&counter * (p.g * v * v));
    let h = &h - &(&sym.dot(&sx) * (p.g * u * v));
    let h = &h + &o.drive(phase(-wl) * (p.eps_l * u));
    Ok(&h - &o.drive(phase(wl) * (p.eps_l * v)))
}

/// Squeezed-frame Hamiltonian after the rotating-wave approximation, still
/// carrying the drive phase: `δ_s n + δ_ed σ₊σ₋ + g_eff(…) + ε_L′(a†e^{−iδ_L t} + h.c.)`.
pub fn build_squeezed_rwa_hamiltonian(p: &ModelParams, t: f64) -> Result<Operator, ModelError> {
    let o = checked(p)?;
    let h = &(&o.n * p.delta_s) + &(&o.pe * p.delta_ed);
    let h = &h + &(&o.two_phonon_exchange() * p.g_eff());
    Ok(&h + &o.drive(phase(-p.delta_l() * t) * p.eps_l_eff()))
}

/// [`build_squeezed_full_hamiltonian`] in the frame rotating with
/// `δ_L(a†a + 2σ₊σ₋)`. Populations in the Fock ⊗ spin basis are unchanged by
/// this frame change; the remaining time dependence oscillates at `2δ_L` and
/// `4δ_L`, so the generator is periodic with period `π/δ_L`.
pub fn build_squeezed_full_rotating(p: &ModelParams, t: f64) -> Result<Operator, ModelError> {
    let o = checked(p)?;
    let (u, v) = (p.squeeze.u(), p.squeeze.v());
    let wl = p.delta_l() * t;
    let ad2 = o.ad.dot(&o.ad);
    let sym = &o.ad.dot(&o.a) + &o.a.dot(&o.ad);

    let h = &(&o.n * p.delta) + &(&o.pe * (p.delta_ed - 2.0 * p.delta_l()));
    let h = &h + &(&o.two_phonon_exchange() * (p.g * u * u));
    let h = &h + &o.drive(C64::new(p.eps_l * u, 0.0));

    // g V² a†²σ₊ e^{4iδ_L t} + h.c.
    let x = &ad2.dot(&o.sp) * (phase(4.0 * wl) * (p.g * v * v));
    let h = &h + &(&x + &x.adjoint());
    // −g U V (a†a + a a†) σ₊ e^{2iδ_L t} + h.c.
    let y = &sym.dot(&o.sp) * (phase(2.0 * wl) * (-p.g * u * v));
    let h = &h + &(&y + &y.adjoint());
    // −ε_L V a† e^{2iδ_L t} + h.c.
    Ok(&h - &o.drive(phase(2.0 * wl) * (p.eps_l * v)))
}

/// Time-independent effective Hamiltonian in the drive frame.
///
/// Two-phonon: `δ(n + 2σ₊σ₋) + g_eff(a†²σ₋ + a²σ₊) + ε_L′(a† + a)`, which
/// assumes the resonance `δ_ed = 2δ_s`.
/// Single-phonon: `δ(n + σ₊σ₋) + g_eff′(a†σ₋ + aσ₊) + ε_L′(a† + a)`, which
/// assumes `δ_ed = δ_s`.
pub fn build_effective_hamiltonian(p: &ModelParams) -> Result<Operator, ModelError> {
    let o = checked(p)?;
    let (exchange, k) = match p.coupling {
        Coupling::TwoPhonon => (o.two_phonon_exchange(), 2.0),
        Coupling::SinglePhonon => (o.single_phonon_exchange(), 1.0),
    };
    let h = &(&o.n * p.delta) + &(&o.pe * (k * p.delta));
    let h = &h + &(&exchange * p.g_eff());
    Ok(&h + &o.drive(C64::new(p.eps_l_eff(), 0.0)))
}

/// Effective Hamiltonian with `−i(γ_m_eff/2) a†a − i(γ_z/2)|E⟩⟨E|` appended.
pub fn build_nonhermitian_hamiltonian(p: &ModelParams) -> Result<Operator, ModelError> {
    let h = build_effective_hamiltonian(p)?;
    let s = p.space()?;
    let damp = &(&number(s) * C64::new(0.0, -0.5 * p.gamma_m_eff))
        + &(&excited_projector(s) * C64::new(0.0, -0.5 * p.gamma_z));
    Ok(&h + &damp)
}

/// Form of the single-phonon squeezed-frame Hamiltonian.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum SinglePhononForm {
    /// Keeps the `−g₀V` and `−ε_L V` counter-rotating terms.
    Full,
    /// Rotating-wave form with `g_eff′ = g₀ cosh r`.
    Rwa,
}

/// Single-phonon exchange model in the squeezed frame. `p.g` is `g₀`.
pub fn build_single_phonon_hamiltonian(
    p: &ModelParams,
    t: f64,
    form: SinglePhononForm,
) -> Result<Operator, ModelError> {
    let o = checked(p)?;
    let (u, v) = (p.squeeze.u(), p.squeeze.v());
    let wl = p.delta_l() * t;
    let h = &(&o.n * p.delta_s) + &(&o.pe * p.delta_ed);
    let h = &h + &(&o.single_phonon_exchange() * (p.g * u));
    let h = &h + &o.drive(phase(-wl) * (p.eps_l * u));
    match form {
        SinglePhononForm::Rwa => Ok(h),
        SinglePhononForm::Full => {
            let counter = &o.a.dot(&o.sm) + &o.ad.dot(&o.sp);
            let h = &h - &(&counter * (p.g * v));
            Ok(&h - &o.drive(phase(wl) * (p.eps_l * v)))
        }
    }
}
