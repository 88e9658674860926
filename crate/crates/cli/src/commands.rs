// Copyright 2026 Pblockade Contributors
// SPDX-License-Identifier: Apache-2.0

//! The `device`, `steady`, `sweep`, `g2tau` and `validate` commands.

use anyhow::{anyhow, bail, Context, Result};
use pblockade::analytic;
use pblockade::device::{axial_field, misalignment_error, DeviceDerived};
use pblockade::dynamics::{self, DynamicsError, PropagationOptions};
use pblockade::model::{Coupling, ModelParams};
use pblockade::qcore::{DensityMatrix, Spin};
use pblockade::stats::BlockadeReport;
use rayon::prelude::*;
use serde_json::Value;

use crate::config::{AxisScale, FreqUnit, LengthUnit, RunConfig, SweepAxis};
use crate::table::{num, opt, Table};

/// Phonon-number columns `p0..p4` and `poisson0..poisson4`.
pub const DISTRIBUTION_COLUMNS: usize = 5;

/// Worker-pool settings.
#[derive(Clone, Copy, Debug, Default)]
pub struct RunOptions {
    /// Worker threads; `None` uses all cores.
    pub jobs: Option<usize>,
}

/// Steady state and statistics at one parameter point.
#[derive(Clone, Debug)]
pub struct SteadyPoint {
    pub params: ModelParams,
    pub state: DensityMatrix,
    pub report: BlockadeReport,
    /// Weak-drive closed form; two-phonon model only.
    pub g2_analytic: Option<f64>,
}

pub fn steady_point(p: &ModelParams) -> Result<SteadyPoint, DynamicsError> {
    let state = dynamics::effective_steady_state(p)?;
    let report = BlockadeReport::from_state(&state);
    Ok(SteadyPoint {
        params: *p,
        state,
        report,
        g2_analytic: (p.coupling == Coupling::TwoPhonon).then(|| analytic::analytic_g2(p)),
    })
}

pub fn steady_columns() -> Vec<String> {
    let mut c: Vec<String> = ["n_mean", "g1", "g2", "g3"].map(String::from).to_vec();
    c.extend((0..DISTRIBUTION_COLUMNS).map(|m| format!("p{m}")));
    c.extend((0..DISTRIBUTION_COLUMNS).map(|m| format!("poisson{m}")));
    c.extend(
        [
            "f",
            "f1",
            "criterion_i",
            "criterion_ii",
            "dist_sub_above",
            "dist_super_at",
            "fidelity",
            "p2",
            "pe",
            "pe_over_p2",
            "g2_analytic",
        ]
        .map(String::from),
    );
    c
}

fn steady_cells(pt: &SteadyPoint) -> Vec<Value> {
    let r = &pt.report;
    let mut v = vec![num(r.n_mean), opt(r.g1), opt(r.g2), opt(r.g3)];
    for dist in [&r.p, &r.poisson] {
        v.extend((0..DISTRIBUTION_COLUMNS).map(|m| opt(dist.get(m).copied())));
    }
    let crit = |f: fn(&pblockade::stats::CorrelationCriteria) -> bool| {
        r.criteria.as_ref().map_or(Value::Null, |c| f(c).into())
    };
    v.extend([
        num(r.f),
        opt(r.f1),
        crit(|c| c.criterion_i),
        crit(|c| c.criterion_ii),
        r.distribution.sub_poissonian_above.into(),
        r.distribution.super_poissonian_at.into(),
        num(r.fidelity),
        num(r.p2),
        num(r.pe),
        opt(r.sensitivity()),
        opt(pt.g2_analytic),
    ]);
    v
}

fn header(command: &str, cfg: &RunConfig, columns: Vec<String>) -> Result<Table> {
    let mut t = Table::new(command, columns);
    t.meta.insert("name".into(), cfg.name.clone().map_or(Value::Null, Value::String));
    t.meta.insert("fock_dim".into(), cfg.fock_dim().into());
    t.meta.insert("config".into(), serde_json::to_value(cfg)?);
    if cfg.model.is_some() {
        t.meta.insert("params".into(), serde_json::to_value(cfg.params()?)?);
    }
    Ok(t)
}

/// Axis-major Cartesian product of the sweep axes.
pub fn grid(axes: &[SweepAxis]) -> Vec<Vec<f64>> {
    axes.iter().fold(vec![Vec::new()], |acc, axis| {
        let values = axis.values();
        acc.into_iter()
            .flat_map(|prefix| {
                values.iter().map(move |&v| {
                    let mut p = prefix.clone();
                    p.push(v);
                    p
                })
            })
            .collect()
    })
}

/// Maps `f` over `items` on a worker pool, keeping input order.
pub fn run_parallel<T, R, F>(items: &[T], opts: RunOptions, f: F) -> Result<Vec<R>>
where
    T: Sync,
    R: Send,
    F: Fn(&T) -> R + Sync + Send,
{
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(opts.jobs.unwrap_or(0))
        .build()?;
    Ok(pool.install(|| items.par_iter().map(&f).collect()))
}

pub fn cmd_steady(cfg: &RunConfig) -> Result<Table> {
    let p = cfg.params()?;
    let pt = steady_point(&p).with_context(|| format!("steady state failed for {p:?}"))?;
    let mut t = header("steady", cfg, steady_columns())?;
    t.push(steady_cells(&pt));
    Ok(t)
}

pub fn cmd_sweep(cfg: &RunConfig, opts: RunOptions) -> Result<Table> {
    if cfg.sweep.is_empty() {
        bail!("sweep needs at least one [[sweep]] axis");
    }
    if let Some(a) = cfg.sweep.iter().find(|a| a.is_device()) {
        bail!("`{}` is a device parameter; use the device command", a.param);
    }
    let spec = cfg.model()?.clone();
    let units = cfg
        .sweep
        .iter()
        .map(SweepAxis::freq_unit)
        .collect::<Result<Vec<Option<FreqUnit>>, _>>()?;
    let points = grid(&cfg.sweep);
    let fock_dim = cfg.fock_dim();
    let results = run_parallel(&points, opts, |values| -> Result<SteadyPoint, String> {
        let mut s = spec.clone();
        for ((axis, &v), &u) in cfg.sweep.iter().zip(values).zip(&units) {
            s.set(&axis.param, v, u).map_err(|e| e.to_string())?;
        }
        let p = s.resolve(fock_dim).map_err(|e| e.to_string())?;
        steady_point(&p).map_err(|e| e.to_string())
    })?;

    let mut columns: Vec<String> = cfg.sweep.iter().map(SweepAxis::column).collect();
    let stats = steady_columns();
    let n_stats = stats.len();
    columns.extend(stats);
    columns.push("error".into());
    let mut t = header("sweep", cfg, columns)?;
    for (values, res) in points.iter().zip(results) {
        let mut row: Vec<Value> = values.iter().map(|&v| num(v)).collect();
        match res {
            Ok(pt) => {
                row.extend(steady_cells(&pt));
                row.push("".into());
            }
            Err(e) => {
                log::warn!("sweep point {values:?} failed: {e}");
                row.extend(std::iter::repeat_n(Value::Null, n_stats));
                row.push(e.into());
            }
        }
        t.push(row);
    }
    Ok(t)
}

pub fn cmd_g2tau(cfg: &RunConfig) -> Result<Table> {
    let spec = cfg.model()?;
    let g2 = cfg.g2tau.clone().unwrap_or_default();
    if g2.count < 2 || !(g2.tau_max > 0.0) {
        bail!("g2tau needs count >= 2 and tau_max > 0");
    }
    let rs = if g2.r_p.is_empty() { vec![spec.r_p] } else { g2.r_p.clone() };
    let columns = ["r_p", "gamma_tau", "g2_tau"].map(String::from).to_vec();
    let mut t = header("g2tau", cfg, columns)?;
    for r in rs {
        let mut s = spec.clone();
        s.r_p = r;
        let p = s.resolve(cfg.fock_dim())?;
        let l = dynamics::effective_liouvillian(&p)?;
        let rho = dynamics::steady_state(&l).with_context(|| format!("steady state failed at r_p = {r}"))?;
        let scaled: Vec<f64> = (0..g2.count)
            .map(|k| g2.tau_max * k as f64 / (g2.count - 1) as f64)
            .collect();
        let taus: Vec<f64> = scaled.iter().map(|x| x / p.gamma_m_eff).collect();
        let values = dynamics::g2_tau(&l, &rho, &taus).with_context(|| format!("g2(tau) failed at r_p = {r}"))?;
        for (x, v) in scaled.iter().zip(values) {
            t.push(vec![num(r), num(*x), num(v)]);
        }
    }
    Ok(t)
}

fn default_gap_axis() -> SweepAxis {
    SweepAxis {
        param: "gap".into(),
        min: 40.0,
        max: 100.0,
        count: 13,
        scale: AxisScale::Linear,
        unit: Some("nm".into()),
    }
}

pub fn cmd_device(cfg: &RunConfig, opts: RunOptions) -> Result<Table> {
    let dspec = cfg
        .device
        .as_ref()
        .ok_or_else(|| anyhow!("device command needs a [device] geometry section"))?;
    let geom = dspec.resolve()?;
    let derived = DeviceDerived::from_geometry(&geom)?;
    let axes = if cfg.sweep.is_empty() {
        vec![default_gap_axis()]
    } else {
        cfg.sweep.clone()
    };
    if let Some(a) = axes.iter().find(|a| !a.is_device()) {
        bail!("`{}` is not a device parameter", a.param);
    }
    let units = axes
        .iter()
        .map(SweepAxis::length_unit)
        .collect::<Result<Vec<Option<LengthUnit>>, _>>()?;

    let mut columns: Vec<String> = axes.iter().map(SweepAxis::column).collect();
    columns.extend(["b0", "gradient", "g", "g_2pi_hz", "omega_m", "z_zpf", "error"].map(String::from));
    let mut t = header("device", cfg, columns)?;
    let two_pi = 2.0 * std::f64::consts::PI;
    let m = &mut t.meta;
    m.insert("omega_m".into(), num(derived.omega_m));
    m.insert("omega_m_2pi_hz".into(), num(derived.omega_m / two_pi));
    m.insert("mass".into(), num(derived.mass));
    m.insert("z_zpf".into(), num(derived.z_zpf));
    m.insert("gradient".into(), num(derived.gradient));
    m.insert("g".into(), num(derived.g));
    m.insert("g_2pi_hz".into(), num(derived.g / two_pi));
    m.insert("n_th".into(), num(derived.n_th));
    if geom.misalignment != 0.0 {
        m.insert("misalignment_deg".into(), num(geom.misalignment.to_degrees()));
        m.insert("misalignment_error".into(), num(misalignment_error(&geom, geom.misalignment)?));
    }

    let points = grid(&axes);
    let rows = run_parallel(&points, opts, |values| -> Result<Vec<Value>, String> {
        let mut s = dspec.clone();
        for ((axis, &v), &u) in axes.iter().zip(values).zip(&units) {
            s.set(&axis.param, v, u).map_err(|e| e.to_string())?;
        }
        let g = s.resolve().map_err(|e| e.to_string())?;
        let d = DeviceDerived::from_geometry(&g).map_err(|e| e.to_string())?;
        let b0 = axial_field(&g, 0.0).map_err(|e| e.to_string())?;
        Ok(vec![
            num(b0),
            num(d.gradient),
            num(d.g),
            num(d.g / two_pi),
            num(d.omega_m),
            num(d.z_zpf),
        ])
    })?;
    for (values, res) in points.iter().zip(rows) {
        let mut row: Vec<Value> = values.iter().map(|&v| num(v)).collect();
        match res {
            Ok(cells) => {
                row.extend(cells);
                row.push("".into());
            }
            Err(e) => {
                row.extend(std::iter::repeat_n(Value::Null, 6));
                row.push(e.into());
            }
        }
        t.push(row);
    }
    Ok(t)
}

/// One numeric-versus-closed-form comparison.
#[derive(Clone, Debug, PartialEq)]
pub struct Check {
    pub name: &'static str,
    pub measured: f64,
    pub threshold: f64,
    pub pass: bool,
    pub detail: String,
}

impl Check {
    fn below(name: &'static str, measured: f64, threshold: f64, detail: String) -> Self {
        Self {
            name,
            measured,
            threshold,
            pass: measured < threshold,
            detail,
        }
    }
}

fn rel(a: f64, reference: f64) -> f64 {
    (a - reference).abs() / reference.abs()
}

/// Largest Fock dimension used for the time-dependent full-model check.
pub const FULL_MODEL_FOCK_DIM: usize = 8;
/// Propagation span of the full-model check, in units of `1/γ_m_eff`.
pub const FULL_MODEL_SPAN: f64 = 20.0;

/// Four subspace populations `|0,D⟩, |1,D⟩, |2,D⟩, |0,E⟩`.
pub fn subspace_populations(rho: &DensityMatrix) -> [f64; 4] {
    [(0, Spin::Dark), (1, Spin::Dark), (2, Spin::Dark), (0, Spin::Excited)]
        .map(|(n, s)| rho.population(n, s).unwrap_or(0.0))
}

/// Long-time average of the time-dependent full model started in `|0,D⟩`.
pub fn full_model_populations(p: &ModelParams) -> Result<[f64; 4]> {
    let gen = dynamics::full_model_generator(p)?;
    let rho0 = DensityMatrix::basis(p.space()?, 0, Spin::Dark)?;
    let opts = PropagationOptions {
        reference_rate: p.gamma_m_eff + p.gamma_z,
        ..PropagationOptions::default()
    };
    let rho = dynamics::quasi_steady_state(&gen, &rho0, FULL_MODEL_SPAN / p.gamma_m_eff, 0.1, &opts)?;
    Ok(subspace_populations(&rho))
}

/// The oracle suite at the configured point with `δ = 0`.
pub fn validation_checks(cfg: &RunConfig) -> Result<Vec<Check>> {
    let mut p = cfg.params()?;
    if p.coupling != Coupling::TwoPhonon {
        bail!("validate needs the two-phonon model");
    }
    p.delta = 0.0;
    let pt = steady_point(&p)?;
    let rho = &pt.state;
    let g2 = pt
        .report
        .g2
        .ok_or_else(|| anyhow!("mode is empty; g2 undefined"))?;
    let g2a = analytic::analytic_g2(&p);
    let amp = analytic::steady_amplitudes(&p)?;
    let [_, p1d, p2d, _] = subspace_populations(rho);
    let (c1, c2, ce) = (amp.c1d.norm_sqr(), amp.c2d.norm_sqr(), amp.c0e.norm_sqr());
    let ratio = pt.report.sensitivity().unwrap_or(f64::NAN);

    let mut checks = vec![
        Check::below("g2_numeric_vs_analytic", rel(g2, g2a), 0.1, format!("numeric {g2:e}, analytic {g2a:e}")),
        Check::below("c1d_vs_population", rel(c1, p1d), 0.05, format!("|C1d|^2 {c1:e}, P(1,D) {p1d:e}")),
        Check::below("c2d_vs_population", rel(c2, p2d), 0.05, format!("|C2d|^2 {c2:e}, P(2,D) {p2d:e}")),
        Check::below(
            "detection_ratio",
            rel(ratio, ce / c2),
            0.1,
            format!("Pe/P2 {ratio:e}, |C0e|^2/|C2d|^2 {:e}", ce / c2),
        ),
    ];

    let mut small = p;
    small.fock_dim = p.fock_dim.min(FULL_MODEL_FOCK_DIM);
    let eff = subspace_populations(&dynamics::effective_steady_state(&small)?);
    let full = full_model_populations(&small)?;
    let diff = eff.iter().zip(&full).map(|(a, b)| (a - b).abs()).fold(0.0, f64::max);
    checks.push(Check::below(
        "full_vs_effective",
        diff,
        0.05,
        format!("N = {}, full {full:?}, effective {eff:?}", small.fock_dim),
    ));

    let mut big = p;
    big.fock_dim += 5;
    let g2_big = steady_point(&big)?
        .report
        .g2
        .ok_or_else(|| anyhow!("mode is empty at N + 5"))?;
    checks.push(Check::below(
        "truncation",
        rel(g2, g2_big),
        0.01,
        format!("N = {}: {g2:e}, N = {}: {g2_big:e}", p.fock_dim, big.fock_dim),
    ));
    Ok(checks)
}

pub fn cmd_validate(cfg: &RunConfig) -> Result<Table> {
    let checks = validation_checks(cfg)?;
    let columns = ["check", "measured", "threshold", "pass", "detail"].map(String::from).to_vec();
    let mut t = header("validate", cfg, columns)?;
    for c in checks {
        t.push(vec![c.name.into(), num(c.measured), num(c.threshold), c.pass.into(), c.detail.into()]);
    }
    Ok(t)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::presets;

    #[test]
    fn grid_is_axis_major() {
        let axis = |param: &str, count| SweepAxis {
            param: param.into(),
            min: 0.0,
            max: 1.0,
            count,
            scale: AxisScale::Linear,
            unit: None,
        };
        let g = grid(&[axis("r_p", 2), axis("n_th", 3)]);
        assert_eq!(g.len(), 6);
        assert_eq!(g[0], [0.0, 0.0]);
        assert_eq!(g[1], [0.0, 0.5]);
        assert_eq!(g[3], [1.0, 0.0]);
    }

    #[test]
    fn steady_row_shape() {
        let mut cfg = presets::load("fig5-delta0").unwrap();
        cfg.fock_dim = Some(8);
        let t = cmd_steady(&cfg).unwrap();
        assert_eq!(t.rows.len(), 1);
        assert_eq!(t.columns.len(), t.rows[0].len());
        assert!(t.f64(0, "g2").unwrap() < 0.1);
        assert_eq!(t.meta["fock_dim"], 8);
    }

    #[test]
    fn zero_drive_gives_undefined_g2() {
        let mut cfg = presets::load("fig5").unwrap();
        cfg.fock_dim = Some(6);
        cfg.model
            .as_mut()
            .unwrap()
            .set("eps_l", 0.0, Some(FreqUnit::G))
            .unwrap();
        let t = cmd_steady(&cfg).unwrap();
        assert_eq!(t.f64(0, "n_mean"), Some(0.0));
        assert_eq!(t.value(0, "g2"), Some(&Value::Null));
        assert_eq!(t.value(0, "criterion_i"), Some(&Value::Null));
    }

    #[test]
    fn sweep_records_point_errors() {
        let mut cfg = presets::load("fig5").unwrap();
        cfg.fock_dim = Some(6);
        cfg.sweep = vec![SweepAxis {
            param: "r_p".into(),
            min: -1.0,
            max: 1.0,
            count: 3,
            scale: AxisScale::Linear,
            unit: None,
        }];
        let t = cmd_sweep(&cfg, RunOptions { jobs: Some(2) }).unwrap();
        assert_eq!(t.rows.len(), 3);
        assert!(!t.value(0, "error").unwrap().as_str().unwrap().is_empty());
        assert_eq!(t.value(2, "error").unwrap(), "");
        assert!(t.f64(2, "g2").is_some());
    }

    #[test]
    fn parallel_order_is_deterministic() {
        let items: Vec<usize> = (0..50).collect();
        let a = run_parallel(&items, RunOptions { jobs: Some(3) }, |x| x * x).unwrap();
        let b = run_parallel(&items, RunOptions { jobs: Some(1) }, |x| x * x).unwrap();
        assert_eq!(a, b);
        assert_eq!(a[7], 49);
    }

    #[test]
    fn device_curve() {
        let cfg = presets::load("device").unwrap();
        let t = cmd_device(&cfg, RunOptions::default()).unwrap();
        let w = t.meta["omega_m_2pi_hz"].as_f64().unwrap();
        assert!((w / 3.8e6 - 1.0).abs() < 0.05);
        let g: Vec<f64> = t.f64_column("g").into_iter().map(Option::unwrap).collect();
        assert_eq!(g.len(), 13);
        assert!(g.windows(2).all(|w| w[1] < w[0]));
        assert!(cmd_device(&presets::load("fig5").unwrap(), RunOptions::default()).is_err());
    }
}
