// Copyright 2026 Pblockade Contributors
// SPDX-License-Identifier: Apache-2.0

use std::f64::consts::PI;

use pblockade::analytic;
use pblockade::dynamics;
use pblockade::model::{Coupling, ModelParams, SqueezeTransform};
use pblockade::stats::{self, BlockadeReport};

fn resonant(r_p: f64, fock_dim: usize) -> ModelParams {
    let g = 2.0 * PI * 1.1;
    let squeeze = SqueezeTransform::new(r_p).unwrap();
    let g_eff = g * r_p.cosh().powi(2);
    ModelParams {
        coupling: Coupling::TwoPhonon,
        g,
        squeeze,
        eps_l: 0.05 * g_eff / squeeze.u(),
        delta: 0.0,
        delta_s: 500.0 * g_eff,
        delta_ed: 1000.0 * g_eff,
        gamma_m_eff: 2.0 * g,
        gamma_z: 2.0 * PI * 10.0,
        n_th: 54.0,
        fock_dim,
    }
}

#[test]
fn resonant_point_shows_blockade() {
    let p = resonant(2.0, 15);
    let rho = dynamics::effective_steady_state(&p).unwrap();
    let r = BlockadeReport::from_state(&rho);
    let g2 = r.g2.unwrap();
    assert!(g2 < 0.1, "g2 = {g2}");
    assert!(r.criterion_i() && r.criterion_ii());
    assert!(r.p[1] > r.poisson[1] && r.p[2] < r.poisson[2]);
    assert!(r.fidelity > 0.99);
    assert!((r.p.iter().sum::<f64>() - 1.0).abs() < 1e-8);
    assert_eq!(r.f, (-r.n_mean).exp());
}

#[test]
fn squeezing_lowers_g2() {
    let g2 = |r| {
        let rho = dynamics::effective_steady_state(&resonant(r, 12)).unwrap();
        stats::g_mu(&rho, 2).unwrap()
    };
    let (a, b, c) = (g2(0.5), g2(1.5), g2(2.5));
    assert!(a > b && b > c, "{a} {b} {c}");
}

#[test]
fn delayed_correlation_starts_at_equal_time_value() {
    let p = resonant(2.0, 12);
    let l = dynamics::effective_liouvillian(&p).unwrap();
    let rho = dynamics::steady_state(&l).unwrap();
    let taus: Vec<f64> = (0..=40).map(|k| k as f64 * 0.5 / p.gamma_m_eff).collect();
    let curve = dynamics::g2_tau(&l, &rho, &taus).unwrap();
    let g0 = stats::g_mu(&rho, 2).unwrap();
    assert!((curve[0] - g0).abs() < 1e-10);
    assert!(curve.iter().all(|&v| v >= g0));
    assert!((curve[40] - 1.0).abs() < 0.02);
}

#[test]
fn closed_form_is_even_in_detuning_and_dips_at_resonance() {
    let p = resonant(2.0, 15);
    let at = |d: f64| {
        let mut q = p;
        q.delta = d * p.g_eff();
        analytic::analytic_g2(&q)
    };
    assert_eq!(at(1.3), at(-1.3));
    assert!(at(0.0) < at(0.5) && at(0.0) < at(-2.0));
    assert!((at(0.0) / analytic::analytic_g2_resonant(&p) - 1.0).abs() < 1e-12);
}
