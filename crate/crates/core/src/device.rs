// Copyright 2026 Pblockade Contributors
// SPDX-License-Identifier: Apache-2.0

//! Device estimates: cantilever mode, nanomagnet field curvature, coupling
//! rate, thermal occupation and damping conversions. SI units throughout.
//!
//! Two coaxial cylindrical magnets, both magnetized along `+z`, sit at
//! `[D_z/2, D_z/2 + h]` and `[−D_z/2 − h, −D_z/2]`; the NV site is the origin.

use std::f64::consts::PI;

use serde::{Deserialize, Serialize};
use thiserror::Error;

/// Reduced Planck constant, J·s.
pub const HBAR: f64 = 1.054_571_817e-34;
/// Boltzmann constant, J/K.
pub const K_B: f64 = 1.380_649e-23;
/// `μ_B g_e / h` in Hz/T (`μ_B/h = 14 GHz/T`, `g_e = 2`).
pub const MU_B_GE_OVER_H: f64 = 28e9;

/// Largest tilt accepted by [`misalignment_error`].
pub const MAX_TILT: f64 = 15.0 * PI / 180.0;

const RICHARDSON_TOL: f64 = 1e-4;
const RICHARDSON_LEVELS: usize = 8;
const QUAD_TOL: f64 = 1e-10;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum DeviceError {
    #[error("geometry field `{field}` = {value:e} must be positive and finite")]
    InvalidGeometry { field: &'static str, value: f64 },
    #[error("z = {z:e} m lies inside magnet material")]
    InsideMagnet { z: f64 },
    #[error("{what} did not converge")]
    NonConvergent { what: &'static str },
    #[error("tilt {theta:e} rad exceeds the supported ±15°")]
    TiltOutOfRange { theta: f64 },
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct DeviceGeometry {
    pub length: f64,
    pub width: f64,
    pub thickness: f64,
    pub magnet_radius: f64,
    pub magnet_height: f64,
    /// Face-to-face magnet gap `D_z`.
    pub gap: f64,
    /// `μ₀M_s` in tesla.
    pub mu0_ms: f64,
    pub youngs_modulus: f64,
    pub density: f64,
    pub temperature: f64,
    /// Rigid tilt of the magnet pair about `y`, radians.
    #[serde(default)]
    pub misalignment: f64,
}

impl DeviceGeometry {
    /// Diamond cantilever `(4, 0.1, 0.02) μm`, magnets of 30 nm diameter and
    /// 40 nm height at 80 nm gap, `μ₀M_s = 3.7 T`, 10 mK.
    pub fn reference() -> Self {
        Self {
            length: 4e-6,
            width: 0.1e-6,
            thickness: 0.02e-6,
            magnet_radius: 15e-9,
            magnet_height: 40e-9,
            gap: 80e-9,
            mu0_ms: 3.7,
            youngs_modulus: 1.22e12,
            density: 3520.0,
            temperature: 10e-3,
            misalignment: 0.0,
        }
    }

    pub fn validate(&self) -> Result<(), DeviceError> {
        let fields = [
            ("length", self.length),
            ("width", self.width),
            ("thickness", self.thickness),
            ("magnet_radius", self.magnet_radius),
            ("magnet_height", self.magnet_height),
            ("gap", self.gap),
            ("mu0_ms", self.mu0_ms),
            ("youngs_modulus", self.youngs_modulus),
            ("density", self.density),
            ("temperature", self.temperature),
        ];
        for (field, value) in fields {
            if !(value.is_finite() && value > 0.0) {
                return Err(DeviceError::InvalidGeometry { field, value });
            }
        }
        if !self.misalignment.is_finite() {
            return Err(DeviceError::InvalidGeometry {
                field: "misalignment",
                value: self.misalignment,
            });
        }
        Ok(())
    }

    /// `(bottom, top)` faces of both magnets along their axis.
    fn magnets(&self) -> [(f64, f64); 2] {
        let (a, h) = (self.gap / 2.0, self.magnet_height);
        [(a, a + h), (-a - h, -a)]
    }
}

/// Fundamental flexural mode of the clamped cantilever.
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct CantileverMode {
    pub omega_m: f64,
    pub mass: f64,
    pub z_zpf: f64,
}

/// `ω_m = 3.516 (t/ℓ²)√(E/12ρ)`, `M = ρℓwt/4`, `z_zpf = √(ħ/2Mω_m)`.
pub fn cantilever_mode(geom: &DeviceGeometry) -> CantileverMode {
    let omega_m = 3.516 * geom.thickness / geom.length.powi(2)
        * (geom.youngs_modulus / (12.0 * geom.density)).sqrt();
    let mass = geom.density * geom.length * geom.width * geom.thickness / 4.0;
    CantileverMode {
        omega_m,
        mass,
        z_zpf: (HBAR / (2.0 * mass * omega_m)).sqrt(),
    }
}

fn cylinder_axial(mu0_ms: f64, radius: f64, z1: f64, z2: f64, z: f64) -> f64 {
    let term = |zf: f64| (z - zf) / ((z - zf).powi(2) + radius * radius).sqrt();
    0.5 * mu0_ms * (term(z1) - term(z2))
}

/// On-axis `B_z(z)` of the untilted magnet pair, tesla.
pub fn axial_field(geom: &DeviceGeometry, z: f64) -> Result<f64, DeviceError> {
    let mags = geom.magnets();
    if mags.iter().any(|&(z1, z2)| z >= z1 && z <= z2) {
        return Err(DeviceError::InsideMagnet { z });
    }
    Ok(mags
        .iter()
        .map(|&(z1, z2)| cylinder_axial(geom.mu0_ms, geom.magnet_radius, z1, z2, z))
        .sum())
}

/// Second derivative at 0 by central differences with Richardson
/// extrapolation, starting from step `h0` and halving.
fn richardson_second_derivative<F>(f: F, h0: f64) -> Result<f64, DeviceError>
where
    F: Fn(f64) -> Result<f64, DeviceError>,
{
    let f0 = f(0.0)?;
    let mut table: Vec<Vec<f64>> = Vec::new();
    let mut h = h0;
    for k in 0..RICHARDSON_LEVELS {
        let mut row = vec![(f(h)? - 2.0 * f0 + f(-h)?) / (h * h)];
        for j in 1..=k {
            let factor = 4f64.powi(j as i32);
            let prev = table[k - 1][j - 1];
            row.push(row[j - 1] + (row[j - 1] - prev) / (factor - 1.0));
        }
        if k > 0 {
            let (new, old) = (row[k], table[k - 1][k - 1]);
            if (new - old).abs() <= RICHARDSON_TOL * new.abs() {
                return Ok(new);
            }
        }
        table.push(row);
        h /= 2.0;
    }
    Err(DeviceError::NonConvergent {
        what: "Richardson extrapolation",
    })
}

/// `G = ∂²B_z/∂z²(0)`, T/m², initial step `D_z/50`.
pub fn second_order_gradient(geom: &DeviceGeometry) -> Result<f64, DeviceError> {
    geom.validate()?;
    richardson_second_derivative(|z| axial_field(geom, z), geom.gap / 50.0)
}

/// `g = ½ μ_B g_e z_zpf² G` as an angular frequency: the formula evaluated
/// with `μ_B g_e/h` yields Hz, which is multiplied by 2π.
pub fn two_phonon_coupling(z_zpf: f64, gradient: f64) -> f64 {
    2.0 * PI * 0.5 * MU_B_GE_OVER_H * z_zpf * z_zpf * gradient
}

/// Bose–Einstein occupation `1/(exp(ħω/k_BT) − 1)`.
pub fn thermal_occupation(omega_m: f64, temperature: f64) -> f64 {
    1.0 / (HBAR * omega_m / (K_B * temperature)).exp_m1()
}

/// `γ_m_eff = n_th ω_m / Q`.
pub fn q_to_gamma(q: f64, n_th: f64, omega_m: f64) -> f64 {
    n_th * omega_m / q
}

/// `Q = n_th ω_m / γ_m_eff`.
pub fn gamma_to_q(gamma_m_eff: f64, n_th: f64, omega_m: f64) -> f64 {
    n_th * omega_m / gamma_m_eff
}

/// Gauss–Legendre nodes and weights on `[−1, 1]`.
fn gauss_legendre(n: usize) -> (Vec<f64>, Vec<f64>) {
    let mut x = vec![0.0; n];
    let mut w = vec![0.0; n];
    for i in 0..n.div_ceil(2) {
        let mut z = (PI * (i as f64 + 0.75) / (n as f64 + 0.5)).cos();
        let mut dp = 0.0;
        for _ in 0..100 {
            let (mut p0, mut p1) = (1.0, z);
            for k in 2..=n {
                let p2 = ((2 * k - 1) as f64 * z * p1 - (k - 1) as f64 * p0) / k as f64;
                p0 = p1;
                p1 = p2;
            }
            dp = n as f64 * (z * p1 - p0) / (z * z - 1.0);
            let dz = p1 / dp;
            z -= dz;
            if dz.abs() < 1e-15 {
                break;
            }
        }
        x[i] = -z;
        x[n - 1 - i] = z;
        w[i] = 2.0 / ((1.0 - z * z) * dp * dp);
        w[n - 1 - i] = w[i];
    }
    (x, w)
}

/// Field of the pair's end-face surface charges, in the magnets' own frame.
struct SurfaceChargeModel {
    faces: Vec<(f64, f64)>,
    prefactor: f64,
    radii: Vec<f64>,
    radial_weights: Vec<f64>,
    angles: Vec<(f64, f64)>,
}

impl SurfaceChargeModel {
    fn new(geom: &DeviceGeometry, n_radial: usize, n_angular: usize) -> Self {
        let (x, w) = gauss_legendre(n_radial);
        let r = geom.magnet_radius;
        let dphi = 2.0 * PI / n_angular as f64;
        let faces = geom
            .magnets()
            .iter()
            .flat_map(|&(z1, z2)| [(z2, 1.0), (z1, -1.0)])
            .collect();
        Self {
            faces,
            prefactor: geom.mu0_ms / (4.0 * PI),
            radii: x.iter().map(|xi| 0.5 * r * (xi + 1.0)).collect(),
            radial_weights: x
                .iter()
                .zip(&w)
                .map(|(xi, wi)| 0.5 * r * wi * 0.5 * r * (xi + 1.0) * dphi)
                .collect(),
            angles: (0..n_angular)
                .map(|k| (k as f64 * dphi).sin_cos())
                .map(|(s, c)| (c, s))
                .collect(),
        }
    }

    fn field(&self, p: [f64; 3]) -> [f64; 3] {
        let mut b = [0.0; 3];
        for &(zf, sign) in &self.faces {
            for (&rho, &wr) in self.radii.iter().zip(&self.radial_weights) {
                for &(c, s) in &self.angles {
                    let d = [p[0] - rho * c, p[1] - rho * s, p[2] - zf];
                    let r2 = d[0] * d[0] + d[1] * d[1] + d[2] * d[2];
                    let k = sign * wr / (r2 * r2.sqrt());
                    for (bi, di) in b.iter_mut().zip(d) {
                        *bi += k * di;
                    }
                }
            }
        }
        b.map(|x| x * self.prefactor)
    }
}

/// Lab-frame `B_z` at `(0, 0, z)` for the pair tilted by `theta` about `y`.
struct TiltedPair {
    coarse: SurfaceChargeModel,
    fine: SurfaceChargeModel,
    theta: f64,
}

impl TiltedPair {
    fn new(geom: &DeviceGeometry, theta: f64) -> Self {
        Self {
            coarse: SurfaceChargeModel::new(geom, 40, 128),
            fine: SurfaceChargeModel::new(geom, 80, 256),
            theta,
        }
    }

    fn bz(&self, z: f64) -> Result<f64, DeviceError> {
        let (s, c) = self.theta.sin_cos();
        let p = [-s * z, 0.0, c * z];
        let lab = |b: [f64; 3]| -s * b[0] + c * b[2];
        let (lo, hi) = (lab(self.coarse.field(p)), lab(self.fine.field(p)));
        if (hi - lo).abs() > QUAD_TOL * hi.abs().max(1e-300) {
            return Err(DeviceError::NonConvergent {
                what: "surface-charge quadrature",
            });
        }
        Ok(hi)
    }
}

/// On-axis `B_z` from the surface-charge quadrature (untilted).
pub fn quadrature_axial_field(geom: &DeviceGeometry, z: f64) -> Result<f64, DeviceError> {
    geom.validate()?;
    if geom.magnets().iter().any(|&(z1, z2)| z >= z1 && z <= z2) {
        return Err(DeviceError::InsideMagnet { z });
    }
    TiltedPair::new(geom, 0.0).bz(z)
}

/// `G_θ` along the lab `z` axis for the rigidly tilted pair.
pub fn tilted_gradient(geom: &DeviceGeometry, theta: f64) -> Result<f64, DeviceError> {
    geom.validate()?;
    if theta.abs() > MAX_TILT {
        return Err(DeviceError::TiltOutOfRange { theta });
    }
    let pair = TiltedPair::new(geom, theta);
    richardson_second_derivative(|z| pair.bz(z), geom.gap / 50.0)
}

/// `δ_g = (g_θ − g_0)/g_0 = G_θ/G_0 − 1`.
pub fn misalignment_error(geom: &DeviceGeometry, theta: f64) -> Result<f64, DeviceError> {
    if theta == 0.0 {
        return Ok(0.0);
    }
    Ok(tilted_gradient(geom, theta)? / tilted_gradient(geom, 0.0)? - 1.0)
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct DeviceDerived {
    pub omega_m: f64,
    pub mass: f64,
    pub z_zpf: f64,
    pub gradient: f64,
    pub g: f64,
    pub n_th: f64,
}

impl DeviceDerived {
    pub fn from_geometry(geom: &DeviceGeometry) -> Result<Self, DeviceError> {
        geom.validate()?;
        let mode = cantilever_mode(geom);
        let gradient = second_order_gradient(geom)?;
        Ok(Self {
            omega_m: mode.omega_m,
            mass: mode.mass,
            z_zpf: mode.z_zpf,
            gradient,
            g: two_phonon_coupling(mode.z_zpf, gradient),
            n_th: thermal_occupation(mode.omega_m, geom.temperature),
        })
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;
    use proptest::prelude::*;

    fn with_gap(gap: f64) -> DeviceGeometry {
        DeviceGeometry {
            gap,
            ..DeviceGeometry::reference()
        }
    }

    /// `∂²/∂z² [x/√(x²+R²)] = −3R²x/(x²+R²)^{5/2}` summed over all faces.
    fn exact_gradient(geom: &DeviceGeometry) -> f64 {
        let r2 = geom.magnet_radius.powi(2);
        let d2 = |zf: f64| {
            let x = -zf;
            -3.0 * r2 * x / (x * x + r2).powf(2.5)
        };
        geom.magnets()
            .iter()
            .map(|&(z1, z2)| 0.5 * geom.mu0_ms * (d2(z1) - d2(z2)))
            .sum()
    }

    #[test]
    fn cantilever_numbers() {
        let m = cantilever_mode(&DeviceGeometry::reference());
        assert!((m.omega_m / (2.0 * PI * 3.8e6) - 1.0).abs() < 0.05);
        assert!((m.mass / 7e-18 - 1.0).abs() < 0.05);
        assert!((m.z_zpf / 563e-15 - 1.0).abs() < 0.05);
        assert_relative_eq!(m.z_zpf, (HBAR / (2.0 * m.mass * m.omega_m)).sqrt(), max_relative = 1e-12);
        let long = DeviceGeometry {
            length: 8e-6,
            ..DeviceGeometry::reference()
        };
        assert_relative_eq!(cantilever_mode(&long).omega_m, m.omega_m / 4.0, max_relative = 1e-14);
    }

    #[test]
    fn axial_field_shape() {
        let g = DeviceGeometry::reference();
        let h = 1e-12;
        let slope = (axial_field(&g, h).unwrap() - axial_field(&g, -h).unwrap()) / (2.0 * h);
        assert!(slope.abs() * g.gap < 1e-6 * axial_field(&g, 0.0).unwrap());
        assert!(axial_field(&g, 1e-3).unwrap().abs() < 1e-12);
        assert!(matches!(axial_field(&g, 50e-9), Err(DeviceError::InsideMagnet { .. })));
        let mut last = f64::INFINITY;
        for gap in [40e-9, 60e-9, 80e-9, 100e-9] {
            let b = axial_field(&with_gap(gap), 0.0).unwrap();
            assert!(b < last && b > 0.0);
            last = b;
        }
    }

    #[test]
    fn gradient_matches_closed_form() {
        for gap in [40e-9, 80e-9, 100e-9] {
            let g = with_gap(gap);
            assert_relative_eq!(second_order_gradient(&g).unwrap(), exact_gradient(&g), max_relative = 1e-6);
        }
        let g = DeviceGeometry::reference();
        let gz = second_order_gradient(&g).unwrap();
        assert!(gz > 7.9e14 / 2.0 && gz < 7.9e14 * 2.0);
        let doubled = DeviceGeometry { mu0_ms: 7.4, ..g };
        assert_relative_eq!(second_order_gradient(&doubled).unwrap(), 2.0 * gz, max_relative = 1e-6);
    }

    #[test]
    fn derived_quantities_smooth_over_gap_sweep() {
        let mut last = f64::INFINITY;
        for k in 0..=12 {
            let gap = 40e-9 + 5e-9 * k as f64;
            let d = DeviceDerived::from_geometry(&with_gap(gap)).unwrap();
            assert!(d.gradient > 0.0 && d.g > 0.0 && d.n_th > 0.0);
            assert!(d.g < last);
            last = d.g;
        }
    }

    #[test]
    fn coupling_formula() {
        assert_eq!(two_phonon_coupling(563e-15, 0.0), 0.0);
        let g = two_phonon_coupling(563e-15, 7.9e14);
        assert!(g / (2.0 * PI) > 3.4 && g / (2.0 * PI) < 3.6);
        assert!((g / (2.0 * PI * 1.1)) < 3.5);
        assert_relative_eq!(two_phonon_coupling(2.0 * 563e-15, 7.9e14), 4.0 * g, max_relative = 1e-14);
    }

    #[test]
    fn thermal_and_damping() {
        let w = 2.0 * PI * 3.8e6;
        let n = thermal_occupation(w, 10e-3);
        assert!((n - 54.0).abs() < 2.0);
        assert!(thermal_occupation(w, 1e-6) < 1e-60);
        assert!(thermal_occupation(w, 20e-3) > n);
        let gamma = 2.0 * 2.0 * PI * 1.1;
        let q = gamma_to_q(gamma, 54.0, w);
        assert!((q / 9.3e7 - 1.0).abs() < 0.02);
        assert_relative_eq!(q_to_gamma(q, 54.0, w), gamma, max_relative = 1e-14);
        let ratio = q_to_gamma(1e7, 54.0, w) / (2.0 * PI * 1.1);
        assert!((ratio / 20.0 - 1.0).abs() < 0.1);
        assert_eq!(q_to_gamma(f64::INFINITY, 54.0, w), 0.0);
    }

    #[test]
    fn gauss_legendre_integrates_polynomials() {
        let (x, w) = gauss_legendre(10);
        for k in 0..20 {
            let exact = if k % 2 == 1 { 0.0 } else { 2.0 / (k as f64 + 1.0) };
            let q: f64 = x.iter().zip(&w).map(|(xi, wi)| wi * xi.powi(k)).sum();
            assert!((q - exact).abs() < 1e-14);
        }
    }

    #[test]
    fn quadrature_reproduces_closed_form() {
        let g = DeviceGeometry::reference();
        let points = [-35e-9, -25e-9, -15e-9, -5e-9, 0.0, 3e-9, 12e-9, 30e-9, 150e-9, -200e-9];
        for z in points {
            let a = axial_field(&g, z).unwrap();
            let q = quadrature_axial_field(&g, z).unwrap();
            assert!((a - q).abs() <= 1e-4 * a.abs(), "z = {z}: {a} vs {q}");
        }
    }

    #[test]
    fn untilted_quadrature_gradient() {
        let g = DeviceGeometry::reference();
        assert_relative_eq!(tilted_gradient(&g, 0.0).unwrap(), exact_gradient(&g), max_relative = 1e-4);
        assert_eq!(misalignment_error(&g, 0.0).unwrap(), 0.0);
        assert!(matches!(
            tilted_gradient(&g, 0.3),
            Err(DeviceError::TiltOutOfRange { .. })
        ));
    }

    #[test]
    fn tilt_sign_symmetry() {
        let g = DeviceGeometry::reference();
        let th = 7f64.to_radians();
        let (p, m) = (misalignment_error(&g, th).unwrap(), misalignment_error(&g, -th).unwrap());
        assert!((p - m).abs() < 1e-6);
        assert!(p < 0.0);
    }

    #[test]
    fn invalid_geometry() {
        let g = DeviceGeometry {
            gap: -1.0,
            ..DeviceGeometry::reference()
        };
        assert!(matches!(g.validate(), Err(DeviceError::InvalidGeometry { field: "gap", .. })));
    }

    proptest! {
        #[test]
        fn gradient_linear_in_coupling(z in 1e-13f64..1e-12, grad in 0.0f64..1e16) {
            let g = two_phonon_coupling(z, grad);
            prop_assert!((two_phonon_coupling(z, 2.0 * grad) - 2.0 * g).abs() <= 1e-12 * g.max(1e-300));
        }
    }
}
