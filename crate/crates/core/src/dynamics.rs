// Copyright 2026 Pblockade Contributors
// SPDX-License-Identifier: Apache-2.0

//! Lindblad dynamics on the column-stacked density-matrix vector.
//!
//! `vec(ρ)[i + j·d] = ρ[i, j]`, so `vec(AXB) = (Bᵀ ⊗ A) vec(X)` and
//!
//! ```text
//! ℒ = −i(I ⊗ H − Hᵀ ⊗ I) + Σ_k γ_k [c_k* ⊗ c_k − ½(I ⊗ c_k†c_k + (c_k†c_k)ᵀ ⊗ I)]
//! ```
//!
//! All integrators are fixed-step classical RK4. For a time-independent
//! generator the one-step map `P(h) = Σ_{k≤4} (hℒ)^k/k!` is formed once and
//! raised to integer powers, which is the same arithmetic as stepping. For a
//! periodic generator the per-step maps are composed into a one-period map.

use std::collections::HashMap;
use std::f64::consts::PI;

use ndarray::{Array1, Array2, ArrayView2};
use ndarray_linalg::{FactorizeInto, ReciprocalConditionNum, Solve, SVD};
use thiserror::Error;

use crate::model::{self, ModelError, ModelParams};
use crate::qcore::{
    annihilation, hermitian_part, kron, max_abs_antihermitian, norm_inf, number,
    trace_of_product, DensityMatrix, HilbertSpace, Operator, QcoreError, C64,
};

/// Steps per period of the fastest frequency.
pub const STEPS_PER_PERIOD: usize = 40;

/// Reciprocal condition number below which the bordered steady-state system is
/// treated as singular.
const RCOND_SINGULAR: f64 = 1e-13;

/// Singular values below this fraction of the largest count towards the kernel.
pub const KERNEL_REL_TOL: f64 = 1e-10;

/// Mean phonon numbers at or below this value make normalized correlations undefined.
pub const MIN_MEAN_PHONON: f64 = 1e-14;

#[derive(Debug, Error)]
pub enum DynamicsError {
    #[error("Hamiltonian is not Hermitian (max |H - H†| = {0:.3e})")]
    NonHermitian(f64),
    #[error("collapse rate {0} is negative or not finite")]
    InvalidRate(f64),
    #[error("operator acts on a space of dimension {found}, expected {expected}")]
    SpaceMismatch { expected: usize, found: usize },
    #[error("steady state is not unique: Liouvillian kernel has dimension {kernel_dim}")]
    DegenerateSteadyState { kernel_dim: usize },
    #[error("steady-state residual {residual:.3e} exceeds {bound:.3e}")]
    Residual { residual: f64, bound: f64 },
    #[error("time grid must be non-empty and strictly increasing")]
    BadTimeGrid,
    #[error("integration drifted (trace error {trace_error:.3e}, Hermiticity error {hermiticity_error:.3e} at t = {t:.6e}); refine the step")]
    StepTooCoarse {
        t: f64,
        trace_error: f64,
        hermiticity_error: f64,
    },
    #[error("mean phonon number {0:.3e} is zero; normalized correlation undefined")]
    ZeroMeanPhononNumber(f64),
    #[error("invalid period or frequency: {0}")]
    InvalidTiming(String),
    #[error(transparent)]
    State(#[from] QcoreError),
    #[error(transparent)]
    Model(#[from] ModelError),
    #[error("linear algebra failure: {0}")]
    Linalg(String),
}

fn linalg(e: impl std::fmt::Display) -> DynamicsError {
    DynamicsError::Linalg(e.to_string())
}

/// Column-stacking vectorization.
pub fn vectorize(m: ArrayView2<C64>) -> Array1<C64> {
    m.t().iter().cloned().collect()
}

/// Inverse of [`vectorize`].
pub fn unvectorize(v: &Array1<C64>, d: usize) -> Array2<C64> {
    Array2::from_shape_fn((d, d), |(i, j)| v[i + j * d])
}

/// Dense Lindblad superoperator on column-stacked density matrices.
#[derive(Clone, Debug)]
pub struct Liouvillian {
    space: HilbertSpace,
    matrix: Array2<C64>,
}

impl Liouvillian {
    pub fn space(&self) -> HilbertSpace {
        self.space
    }

    pub fn matrix(&self) -> &Array2<C64> {
        &self.matrix
    }

    /// `ℒρ` reshaped back to a matrix.
    pub fn apply(&self, rho: ArrayView2<C64>) -> Array2<C64> {
        let d = self.space.dim();
        unvectorize(&self.matrix.dot(&vectorize(rho)), d)
    }

    pub fn norm_inf(&self) -> f64 {
        norm_inf(self.matrix.view())
    }

    /// `‖ℒ vec(ρ)‖∞`.
    pub fn residual(&self, rho: &DensityMatrix) -> f64 {
        self.matrix
            .dot(&vectorize(rho.matrix().view()))
            .iter()
            .map(|z| z.norm())
            .fold(0.0, f64::max)
    }

    /// One classical RK4 step as a matrix, `I + hℒ + (hℒ)²/2 + (hℒ)³/6 + (hℒ)⁴/24`.
    pub fn rk4_step_matrix(&self, h: f64) -> Array2<C64> {
        rk4_compose(&self.matrix, &self.matrix, &self.matrix, h)
    }
}

fn check_space(expected: HilbertSpace, op: &Operator) -> Result<(), DynamicsError> {
    if op.space() != expected {
        return Err(DynamicsError::SpaceMismatch {
            expected: expected.dim(),
            found: op.space().dim(),
        });
    }
    Ok(())
}

/// Build `ℒ` from a Hermitian `H` and `(c_k, γ_k)` pairs.
pub fn build_liouvillian(
    h: &Operator,
    collapse: &[(Operator, f64)],
) -> Result<Liouvillian, DynamicsError> {
    let space = h.space();
    let herm = h.hermiticity_error();
    if herm > 1e-10 * h.norm_inf().max(1.0) {
        return Err(DynamicsError::NonHermitian(herm));
    }
    for (c, rate) in collapse {
        check_space(space, c)?;
        if !rate.is_finite() || *rate < 0.0 {
            return Err(DynamicsError::InvalidRate(*rate));
        }
    }
    Ok(Liouvillian {
        space,
        matrix: superoperator(h.matrix(), collapse),
    })
}

fn superoperator(h: &Array2<C64>, collapse: &[(Operator, f64)]) -> Array2<C64> {
    let d = h.nrows();
    let eye: Array2<C64> = Array2::eye(d);
    let minus_i = C64::new(0.0, -1.0);
    let mut l = (kron(&eye, h) - kron(&h.t().to_owned(), &eye)) * minus_i;
    for (c, rate) in collapse {
        if *rate == 0.0 {
            continue;
        }
        let c = c.matrix();
        let cdc = c.t().mapv(|z| z.conj()).dot(c);
        let jump = kron(&c.mapv(|z| z.conj()), c);
        let anti = kron(&eye, &cdc) + kron(&cdc.t().to_owned(), &eye);
        l = l + (jump - anti * C64::new(0.5, 0.0)) * C64::new(*rate, 0.0);
    }
    l
}

/// `−i[H, ρ] + Σ γ(cρc† − ½{c†c, ρ})` evaluated on the matrix form.
pub fn lindblad_rhs(
    h: &Array2<C64>,
    collapse: &[(Array2<C64>, Array2<C64>, f64)],
    rho: &Array2<C64>,
) -> Array2<C64> {
    let hr = h.dot(rho);
    let rh = rho.dot(h);
    let mut out = (hr - rh) * C64::new(0.0, -1.0);
    for (c, cdc, rate) in collapse {
        let jump = c.dot(rho).dot(&c.t().mapv(|z| z.conj()));
        let anti = cdc.dot(rho) + rho.dot(cdc);
        out = out + (jump - anti * C64::new(0.5, 0.0)) * C64::new(*rate, 0.0);
    }
    out
}

/// Numerical dimension of the kernel of `ℒ` from its singular values.
pub fn kernel_dimension(l: &Liouvillian, rel_tol: f64) -> Result<usize, DynamicsError> {
    let (_, s, _) = l.matrix.svd(false, false).map_err(linalg)?;
    let smax = s.iter().cloned().fold(0.0, f64::max);
    if smax == 0.0 {
        return Ok(s.len());
    }
    Ok(s.iter().filter(|&&x| x <= rel_tol * smax).count())
}

/// Unique steady state from a dense LU solve with one equation replaced by
/// `tr ρ = 1`.
pub fn steady_state(l: &Liouvillian) -> Result<DensityMatrix, DynamicsError> {
    let d = l.space.dim();
    let n = d * d;
    let mut m = l.matrix.clone();
    m.row_mut(0).fill(C64::new(0.0, 0.0));
    for i in 0..d {
        m[[0, i * (d + 1)]] = C64::new(1.0, 0.0);
    }
    let degenerate = || -> DynamicsError {
        match kernel_dimension(l, KERNEL_REL_TOL) {
            Ok(kernel_dim) => DynamicsError::DegenerateSteadyState { kernel_dim },
            Err(e) => e,
        }
    };
    let lu = match m.factorize_into() {
        Ok(lu) => lu,
        Err(_) => return Err(degenerate()),
    };
    let rcond = lu.rcond().map_err(linalg)?;
    if !(rcond > RCOND_SINGULAR) {
        return Err(degenerate());
    }
    let mut b = Array1::zeros(n);
    b[0] = C64::new(1.0, 0.0);
    let x = lu.solve_into(b).map_err(|_| degenerate())?;
    let rho = DensityMatrix::from_unnormalized(l.space, hermitian_part(unvectorize(&x, d).view()))?;
    let residual = l.residual(&rho);
    let bound = 1e-10 * l.norm_inf();
    if residual > bound {
        return Err(DynamicsError::Residual { residual, bound });
    }
    Ok(rho)
}

/// Lindblad operator for the time-independent effective model of `p`.
pub fn effective_liouvillian(p: &ModelParams) -> Result<Liouvillian, DynamicsError> {
    let h = model::build_effective_hamiltonian(p)?;
    build_liouvillian(&h, &p.collapse_operators()?)
}

/// Steady state of the effective model of `p`.
pub fn effective_steady_state(p: &ModelParams) -> Result<DensityMatrix, DynamicsError> {
    steady_state(&effective_liouvillian(p)?)
}

/// Source of `dρ/dt` for the integrators.
pub trait Generator {
    fn space(&self) -> HilbertSpace;
    /// `dρ/dt` at time `t`.
    fn rhs(&self, t: f64, rho: &Array2<C64>) -> Array2<C64>;
    /// Fastest angular frequency the step must resolve.
    fn fastest_frequency(&self) -> f64;
    /// The superoperator if the generator does not depend on time.
    fn constant_superoperator(&self) -> Option<&Array2<C64>> {
        None
    }
}

impl Generator for Liouvillian {
    fn space(&self) -> HilbertSpace {
        self.space
    }

    fn rhs(&self, _t: f64, rho: &Array2<C64>) -> Array2<C64> {
        self.apply(rho.view())
    }

    /// `‖ℒ‖∞` bounds every eigenfrequency of `ℒ`.
    fn fastest_frequency(&self) -> f64 {
        self.norm_inf()
    }

    fn constant_superoperator(&self) -> Option<&Array2<C64>> {
        Some(&self.matrix)
    }
}

type HamiltonianFn = Box<dyn Fn(f64) -> Operator + Send + Sync>;

/// Lindblad generator with a time-dependent Hamiltonian and fixed collapse set.
pub struct TimeDependentLindblad {
    space: HilbertSpace,
    hamiltonian: HamiltonianFn,
    collapse: Vec<(Operator, f64)>,
    omega_fast: f64,
    cached: Vec<(Array2<C64>, Array2<C64>, f64)>,
}

impl TimeDependentLindblad {
    pub fn new(
        space: HilbertSpace,
        hamiltonian: HamiltonianFn,
        collapse: Vec<(Operator, f64)>,
        omega_fast: f64,
    ) -> Result<Self, DynamicsError> {
        if !(omega_fast.is_finite() && omega_fast > 0.0) {
            return Err(DynamicsError::InvalidTiming(format!(
                "fastest frequency {omega_fast}"
            )));
        }
        for (c, rate) in &collapse {
            check_space(space, c)?;
            if !rate.is_finite() || *rate < 0.0 {
                return Err(DynamicsError::InvalidRate(*rate));
            }
        }
        let h0 = hamiltonian(0.0);
        check_space(space, &h0)?;
        let cached = collapse
            .iter()
            .map(|(c, r)| {
                let m = c.matrix().clone();
                let cdc = c.matrix().t().mapv(|z| z.conj()).dot(c.matrix());
                (m, cdc, *r)
            })
            .collect();
        Ok(Self {
            space,
            hamiltonian,
            collapse,
            omega_fast,
            cached,
        })
    }

    /// `ℒ(t)` as a superoperator.
    pub fn liouvillian_at(&self, t: f64) -> Result<Liouvillian, DynamicsError> {
        build_liouvillian(&(self.hamiltonian)(t), &self.collapse)
    }
}

impl Generator for TimeDependentLindblad {
    fn space(&self) -> HilbertSpace {
        self.space
    }

    fn rhs(&self, t: f64, rho: &Array2<C64>) -> Array2<C64> {
        let h = (self.hamiltonian)(t);
        lindblad_rhs(h.matrix(), &self.cached, rho)
    }

    fn fastest_frequency(&self) -> f64 {
        self.omega_fast
    }
}

/// Integration settings.
#[derive(Clone, Copy, Debug)]
pub struct PropagationOptions {
    /// RK4 steps per period of the fastest frequency.
    pub steps_per_period: usize,
    /// Rate setting the trace-drift budget `1e-8 · max(1, rate · t)`.
    pub reference_rate: f64,
}

impl Default for PropagationOptions {
    fn default() -> Self {
        Self {
            steps_per_period: STEPS_PER_PERIOD,
            reference_rate: 0.0,
        }
    }
}

fn max_step(omega_fast: f64, steps_per_period: usize) -> f64 {
    2.0 * PI / (steps_per_period as f64 * omega_fast)
}

/// Number of equal steps no longer than `h_max` covering `span`.
fn step_count(span: f64, h_max: f64) -> usize {
    if !h_max.is_finite() {
        return 1;
    }
    // Shave rounding noise so that exact multiples do not gain a step.
    ((span / h_max) * (1.0 - 1e-12)).ceil().max(1.0) as usize
}

fn check_grid(t_grid: &[f64]) -> Result<(), DynamicsError> {
    if t_grid.is_empty()
        || t_grid.iter().any(|t| !t.is_finite())
        || t_grid.windows(2).any(|w| w[1] <= w[0])
    {
        return Err(DynamicsError::BadTimeGrid);
    }
    Ok(())
}

fn check_drift(
    t: f64,
    t0: f64,
    rho: &Array2<C64>,
    opts: &PropagationOptions,
) -> Result<(), DynamicsError> {
    let tr = rho.diag().sum();
    let trace_error = (tr - C64::new(1.0, 0.0)).norm();
    let hermiticity_error = max_abs_antihermitian(rho.view());
    let budget = 1e-8 * (opts.reference_rate * (t - t0)).max(1.0);
    if !(trace_error <= budget) || !(hermiticity_error <= 1e-9) {
        return Err(DynamicsError::StepTooCoarse {
            t,
            trace_error,
            hermiticity_error,
        });
    }
    Ok(())
}

/// Fixed-step RK4 propagation of `ρ₀` from `t_grid[0]`, returning the state at
/// every grid time.
pub fn propagate<G: Generator + ?Sized>(
    gen: &G,
    rho0: &DensityMatrix,
    t_grid: &[f64],
    opts: &PropagationOptions,
) -> Result<Vec<DensityMatrix>, DynamicsError> {
    check_grid(t_grid)?;
    if rho0.space() != gen.space() {
        return Err(DynamicsError::SpaceMismatch {
            expected: gen.space().dim(),
            found: rho0.space().dim(),
        });
    }
    let omega = gen.fastest_frequency();
    if !(omega.is_finite() && omega >= 0.0) {
        return Err(DynamicsError::InvalidTiming(format!("fastest frequency {omega}")));
    }
    let h_max = if omega > 0.0 {
        max_step(omega, opts.steps_per_period)
    } else {
        f64::INFINITY
    };
    let d = gen.space().dim();
    let mut out = vec![rho0.clone()];
    if let Some(l) = gen.constant_superoperator() {
        let states = evolve_constant(l, vectorize(rho0.matrix().view()), t_grid, h_max)?;
        for (k, v) in states.into_iter().enumerate().skip(1) {
            let rho = unvectorize(&v, d);
            check_drift(t_grid[k], t_grid[0], &rho, opts)?;
            out.push(DensityMatrix::from_unnormalized(gen.space(), rho)?);
        }
        return Ok(out);
    }
    let mut rho = rho0.matrix().clone();
    for k in 1..t_grid.len() {
        let (t0, t1) = (t_grid[k - 1], t_grid[k]);
        let steps = step_count(t1 - t0, h_max);
        let h = (t1 - t0) / steps as f64;
        for s in 0..steps {
            rho = rk4_step(gen, t0 + s as f64 * h, h, &rho);
        }
        check_drift(t1, t_grid[0], &rho, opts)?;
        out.push(DensityMatrix::from_unnormalized(gen.space(), rho.clone())?);
    }
    Ok(out)
}

fn rk4_step<G: Generator + ?Sized>(gen: &G, t: f64, h: f64, rho: &Array2<C64>) -> Array2<C64> {
    let half = C64::new(0.5 * h, 0.0);
    let k1 = gen.rhs(t, rho);
    let k2 = gen.rhs(t + 0.5 * h, &(rho + &(&k1 * half)));
    let k3 = gen.rhs(t + 0.5 * h, &(rho + &(&k2 * half)));
    let k4 = gen.rhs(t + h, &(rho + &(&k3 * C64::new(h, 0.0))));
    let sixth = C64::new(h / 6.0, 0.0);
    rho + &((k1 + (k2 + k3) * C64::new(2.0, 0.0) + k4) * sixth)
}

/// RK4 step map for stage generators `ℒ(t)`, `ℒ(t + h/2)`, `ℒ(t + h)`.
fn rk4_compose(l0: &Array2<C64>, lh: &Array2<C64>, l1: &Array2<C64>, h: f64) -> Array2<C64> {
    let n = l0.nrows();
    let eye: Array2<C64> = Array2::eye(n);
    let half = C64::new(0.5 * h, 0.0);
    let k1 = l0.clone();
    let k2 = lh.dot(&(&eye + &(&k1 * half)));
    let k3 = lh.dot(&(&eye + &(&k2 * half)));
    let k4 = l1.dot(&(&eye + &(&k3 * C64::new(h, 0.0))));
    eye + (k1 + (k2 + k3) * C64::new(2.0, 0.0) + k4) * C64::new(h / 6.0, 0.0)
}

fn matrix_power(m: &Array2<C64>, mut k: usize) -> Array2<C64> {
    let mut result: Array2<C64> = Array2::eye(m.nrows());
    let mut base = m.clone();
    while k > 0 {
        if k & 1 == 1 {
            result = result.dot(&base);
        }
        k >>= 1;
        if k > 0 {
            base = base.dot(&base);
        }
    }
    result
}

/// Advance an arbitrary vector under a constant superoperator, returning the
/// vector at each grid time (index 0 is the input).
fn evolve_constant(
    l: &Array2<C64>,
    v0: Array1<C64>,
    t_grid: &[f64],
    h_max: f64,
) -> Result<Vec<Array1<C64>>, DynamicsError> {
    check_grid(t_grid)?;
    let mut maps: HashMap<usize, (f64, Array2<C64>)> = HashMap::new();
    let mut out = Vec::with_capacity(t_grid.len());
    let mut v = v0;
    out.push(v.clone());
    for w in t_grid.windows(2) {
        let dt = w[1] - w[0];
        let steps = step_count(dt, h_max);
        let h = dt / steps as f64;
        let reuse = matches!(maps.get(&steps), Some((hc, _)) if (hc - h).abs() <= 1e-12 * h);
        if !reuse {
            let p = rk4_compose(l, l, l, h);
            maps.insert(steps, (h, matrix_power(&p, steps)));
        }
        v = maps[&steps].1.dot(&v);
        out.push(v.clone());
    }
    Ok(out)
}

/// Lindblad generator whose Hamiltonian is periodic with `period`.
pub struct PeriodicLindblad {
    inner: TimeDependentLindblad,
    period: f64,
}

impl PeriodicLindblad {
    pub fn new(inner: TimeDependentLindblad, period: f64) -> Result<Self, DynamicsError> {
        if !(period.is_finite() && period > 0.0) {
            return Err(DynamicsError::InvalidTiming(format!("period {period}")));
        }
        Ok(Self { inner, period })
    }

    pub fn period(&self) -> f64 {
        self.period
    }

    /// Steps per period so that each step resolves the fastest frequency.
    pub fn steps_per_period(&self, steps_per_fast_period: usize) -> usize {
        step_count(self.period, max_step(self.inner.omega_fast, steps_per_fast_period))
    }

    /// One-period RK4 map `M` and the map `A` giving the mean of the states
    /// at the step points `t = kh`, `k = 1..steps`.
    pub fn period_maps(&self, steps: usize) -> Result<(Array2<C64>, Array2<C64>), DynamicsError> {
        let h = self.period / steps as f64;
        let n = self.inner.space.dim().pow(2);
        let mut q: Array2<C64> = Array2::eye(n);
        let mut acc: Array2<C64> = Array2::zeros((n, n));
        let mut l_start = self.inner.liouvillian_at(0.0)?.matrix;
        for s in 0..steps {
            let t = s as f64 * h;
            let l_mid = self.inner.liouvillian_at(t + 0.5 * h)?.matrix;
            let l_end = self.inner.liouvillian_at(t + h)?.matrix;
            let p = rk4_compose(&l_start, &l_mid, &l_end, h);
            q = p.dot(&q);
            acc = acc + &q;
            l_start = l_end;
        }
        Ok((q, acc * C64::new(1.0 / steps as f64, 0.0)))
    }
}

impl Generator for PeriodicLindblad {
    fn space(&self) -> HilbertSpace {
        self.inner.space
    }

    fn rhs(&self, t: f64, rho: &Array2<C64>) -> Array2<C64> {
        self.inner.rhs(t, rho)
    }

    fn fastest_frequency(&self) -> f64 {
        self.inner.omega_fast
    }
}

/// Long-time average of a periodically driven evolution.
///
/// Propagates `ρ₀` over `ceil(t_final/T)` whole periods and averages the
/// state over the trailing `window_fraction` of them, sampling every RK4 step.
pub fn quasi_steady_state(
    gen: &PeriodicLindblad,
    rho0: &DensityMatrix,
    t_final: f64,
    window_fraction: f64,
    opts: &PropagationOptions,
) -> Result<DensityMatrix, DynamicsError> {
    if !(window_fraction > 0.0 && window_fraction <= 1.0) || !(t_final > 0.0) {
        return Err(DynamicsError::InvalidTiming(format!(
            "t_final {t_final}, window fraction {window_fraction}"
        )));
    }
    let steps = gen.steps_per_period(opts.steps_per_period);
    let (m, avg) = gen.period_maps(steps)?;
    let periods = (t_final / gen.period).ceil().max(1.0) as usize;
    let window = ((periods as f64 * window_fraction).ceil() as usize).clamp(1, periods);
    let mut v = vectorize(rho0.matrix().view());
    for _ in 0..periods - window {
        v = m.dot(&v);
    }
    let mut sum = Array1::zeros(v.len());
    for _ in 0..window {
        sum = sum + avg.dot(&v);
        v = m.dot(&v);
    }
    let d = gen.space().dim();
    let end = unvectorize(&v, d);
    check_drift(periods as f64 * gen.period, 0.0, &end, opts)?;
    let mean = unvectorize(&(sum * C64::new(1.0 / window as f64, 0.0)), d);
    Ok(DensityMatrix::from_unnormalized(gen.space(), mean)?)
}

/// Squeezed-frame model with all counter-rotating terms, in the frame
/// rotating with `δ_L(a†a + 2σ₊σ₋)`. Period `π/δ_L`, fastest sideband `4δ_L`.
pub fn full_model_generator(p: &ModelParams) -> Result<PeriodicLindblad, DynamicsError> {
    p.validate()?;
    let space = p.space()?;
    let wl = p.delta_l().abs();
    if wl == 0.0 {
        return Err(DynamicsError::InvalidTiming("drive frequency delta_L is zero".into()));
    }
    let params = *p;
    let hamiltonian: HamiltonianFn = Box::new(move |t| {
        model::build_squeezed_full_rotating(&params, t).expect("parameters validated")
    });
    let inner = TimeDependentLindblad::new(space, hamiltonian, p.collapse_operators()?, 4.0 * wl)?;
    PeriodicLindblad::new(inner, PI / wl)
}

/// Delayed second-order correlation by the quantum regression theorem:
/// `g²(τ) = tr(a†a e^{ℒτ}[a ρ a†]) / ⟨a†a⟩²`.
pub fn g2_tau(
    l: &Liouvillian,
    rho_ss: &DensityMatrix,
    tau_grid: &[f64],
) -> Result<Vec<f64>, DynamicsError> {
    let space = l.space();
    if rho_ss.space() != space {
        return Err(DynamicsError::SpaceMismatch {
            expected: space.dim(),
            found: rho_ss.space().dim(),
        });
    }
    check_grid(tau_grid)?;
    if tau_grid[0] < 0.0 {
        return Err(DynamicsError::BadTimeGrid);
    }
    let a = annihilation(space);
    let n_op = number(space);
    let n_mean = trace_of_product(rho_ss.matrix().view(), n_op.matrix().view()).re;
    if n_mean <= MIN_MEAN_PHONON {
        return Err(DynamicsError::ZeroMeanPhononNumber(n_mean));
    }
    let b = a.matrix().dot(rho_ss.matrix()).dot(&a.adjoint().into_matrix());
    let mut grid = Vec::with_capacity(tau_grid.len() + 1);
    let prepend = tau_grid[0] > 0.0;
    if prepend {
        grid.push(0.0);
    }
    grid.extend_from_slice(tau_grid);
    let h_max = max_step(l.norm_inf(), STEPS_PER_PERIOD);
    let states = evolve_constant(&l.matrix, vectorize(b.view()), &grid, h_max)?;
    let d = space.dim();
    let norm = n_mean * n_mean;
    Ok(states
        .iter()
        .skip(usize::from(prepend))
        .map(|v| trace_of_product(n_op.matrix().view(), unvectorize(v, d).view()).re / norm)
        .collect())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::{Coupling, SqueezeTransform};
    use crate::qcore::{excited_projector, Spin};
    use approx::assert_relative_eq;
    use proptest::prelude::*;

    fn space(n: usize) -> HilbertSpace {
        HilbertSpace::new(n).unwrap()
    }

    fn fig5(fock_dim: usize) -> ModelParams {
        let g = 2.0 * PI * 1.1;
        let squeeze = SqueezeTransform::new(2.0).unwrap();
        let g_eff = g * squeeze.u().powi(2);
        ModelParams {
            coupling: Coupling::TwoPhonon,
            g,
            squeeze,
            eps_l: g_eff / 20.0 / squeeze.u(),
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
    fn vectorization_is_column_stacking() {
        let m = Array2::from_shape_fn((3, 3), |(i, j)| C64::new((i + 3 * j) as f64, 0.0));
        let v = vectorize(m.view());
        for k in 0..9 {
            assert_eq!(v[k].re, k as f64);
        }
        assert_eq!(unvectorize(&v, 3), m);
    }

    #[test]
    fn superoperator_matches_matrix_form() {
        let p = fig5(5);
        let h = model::build_effective_hamiltonian(&p).unwrap();
        let c = p.collapse_operators().unwrap();
        let l = build_liouvillian(&h, &c).unwrap();
        let rho = DensityMatrix::basis(p.space().unwrap(), 1, Spin::Dark).unwrap();
        let mut r = rho.matrix().clone();
        r[[0, 3]] = C64::new(0.2, 0.1);
        r[[3, 0]] = C64::new(0.2, -0.1);
        let cached: Vec<_> = c
            .iter()
            .map(|(op, g)| {
                let m = op.matrix().clone();
                let cdc = op.adjoint().dot(op).into_matrix();
                (m, cdc, *g)
            })
            .collect();
        let a = l.apply(r.view());
        let b = lindblad_rhs(h.matrix(), &cached, &r);
        let err = (&a - &b).iter().map(|z| z.norm()).fold(0.0, f64::max);
        assert!(err < 1e-9 * l.norm_inf());
    }

    #[test]
    fn vacuum_is_dark_state_of_decay() {
        let s = space(6);
        let l = build_liouvillian(&Operator::zeros(s), &[(annihilation(s), 3.0)]).unwrap();
        let vac = DensityMatrix::basis(s, 0, Spin::Dark).unwrap();
        assert_eq!(l.residual(&vac), 0.0);
    }

    #[test]
    fn rejects_non_hermitian_hamiltonian_and_bad_rates() {
        let s = space(3);
        let a = annihilation(s);
        assert!(matches!(build_liouvillian(&a, &[]), Err(DynamicsError::NonHermitian(_))));
        assert!(matches!(
            build_liouvillian(&Operator::zeros(s), &[(a.clone(), -1.0)]),
            Err(DynamicsError::InvalidRate(_))
        ));
        assert!(matches!(
            build_liouvillian(&Operator::zeros(s), &[(annihilation(space(4)), 1.0)]),
            Err(DynamicsError::SpaceMismatch { .. })
        ));
    }

    #[test]
    fn undriven_steady_state_is_ground_state() {
        let mut p = fig5(15);
        p.eps_l = 0.0;
        let rho = effective_steady_state(&p).unwrap();
        let ground = DensityMatrix::basis(p.space().unwrap(), 0, Spin::Dark).unwrap();
        let err = (rho.matrix() - ground.matrix()).iter().map(|z| z.norm()).fold(0.0, f64::max);
        assert!(err < 1e-12, "deviation {err}");
    }

    #[test]
    fn degenerate_steady_state_reports_kernel() {
        let s = space(3);
        let l = build_liouvillian(&Operator::zeros(s), &[]).unwrap();
        match steady_state(&l) {
            Err(DynamicsError::DegenerateSteadyState { kernel_dim }) => assert_eq!(kernel_dim, 36),
            other => panic!("unexpected {other:?}"),
        }
        let l = build_liouvillian(&Operator::zeros(s), &[(excited_projector(s), 1.0)]).unwrap();
        assert!(matches!(steady_state(&l), Err(DynamicsError::DegenerateSteadyState { .. })));
    }

    #[test]
    fn steady_state_quality_at_blockade_point() {
        let p = fig5(15);
        let l = effective_liouvillian(&p).unwrap();
        let rho = steady_state(&l).unwrap();
        assert!(l.residual(&rho) < 1e-10 * l.norm_inf());
        assert!(rho.min_eigenvalue().unwrap() > -1e-7);
        assert_eq!(kernel_dimension(&l, KERNEL_REL_TOL).unwrap(), 1);
    }

    #[test]
    fn identity_propagation_on_single_time() {
        let p = fig5(4);
        let l = effective_liouvillian(&p).unwrap();
        let rho0 = DensityMatrix::basis(p.space().unwrap(), 1, Spin::Excited).unwrap();
        let out = propagate(&l, &rho0, &[0.3], &PropagationOptions::default()).unwrap();
        assert_eq!(out.len(), 1);
        assert_eq!(out[0], rho0);
        assert!(matches!(
            propagate(&l, &rho0, &[0.3, 0.3], &PropagationOptions::default()),
            Err(DynamicsError::BadTimeGrid)
        ));
    }

    #[test]
    fn single_phonon_decays_exponentially() {
        let s = space(5);
        let gamma = 2.5;
        let l = build_liouvillian(&Operator::zeros(s), &[(annihilation(s), gamma)]).unwrap();
        let rho0 = DensityMatrix::basis(s, 1, Spin::Dark).unwrap();
        let grid: Vec<f64> = (0..=20).map(|k| k as f64 * 0.1).collect();
        let out = propagate(&l, &rho0, &grid, &PropagationOptions::default()).unwrap();
        let n = number(s);
        for (t, rho) in grid.iter().zip(&out) {
            let mean = crate::qcore::expectation(rho, &n).unwrap().re;
            assert!((mean - (-gamma * t).exp()).abs() < 1e-6);
        }
    }

    #[test]
    fn stepping_and_power_paths_agree() {
        // A time-dependent wrapper around a constant Hamiltonian must follow the
        // same trajectory as the step-matrix power path.
        let p = {
            let mut p = fig5(4);
            p.delta = 0.3 * p.g_eff();
            p
        };
        let s = p.space().unwrap();
        let l = effective_liouvillian(&p).unwrap();
        let params = p;
        let td = TimeDependentLindblad::new(
            s,
            Box::new(move |_| model::build_effective_hamiltonian(&params).unwrap()),
            p.collapse_operators().unwrap(),
            l.norm_inf(),
        )
        .unwrap();
        let rho0 = DensityMatrix::basis(s, 0, Spin::Dark).unwrap();
        let grid = [0.0, 0.01, 0.05];
        let a = propagate(&l, &rho0, &grid, &PropagationOptions::default()).unwrap();
        let b = propagate(&td, &rho0, &grid, &PropagationOptions::default()).unwrap();
        for (x, y) in a.iter().zip(&b) {
            assert!(x.trace_distance(y).unwrap() < 1e-10);
        }
    }

    #[test]
    fn long_propagation_reaches_steady_state() {
        let p = fig5(15);
        let l = effective_liouvillian(&p).unwrap();
        let rho_ss = steady_state(&l).unwrap();
        let rho0 = DensityMatrix::basis(p.space().unwrap(), 0, Spin::Dark).unwrap();
        let t = 20.0 / p.gamma_m_eff;
        let opts = PropagationOptions {
            reference_rate: p.gamma_m_eff,
            ..Default::default()
        };
        let out = propagate(&l, &rho0, &[0.0, 0.5 * t, t], &opts).unwrap();
        for rho in &out {
            assert!(rho.min_eigenvalue().unwrap() > -1e-7);
        }
        let dist = out[2].trace_distance(&rho_ss).unwrap();
        assert!(dist < 1e-4, "trace distance {dist}");
    }

    #[test]
    fn period_maps_match_direct_stepping() {
        let mut p = fig5(4);
        p.delta_s = 40.0 * p.g_eff();
        p.delta_ed = 2.0 * p.delta_s;
        let gen = full_model_generator(&p).unwrap();
        let steps = gen.steps_per_period(STEPS_PER_PERIOD);
        assert_eq!(steps, 80);
        let (m, _) = gen.period_maps(steps).unwrap();
        let rho0 = DensityMatrix::basis(p.space().unwrap(), 0, Spin::Dark).unwrap();
        let t = 3.0 * gen.period();
        let direct = propagate(&gen, &rho0, &[0.0, t], &PropagationOptions::default()).unwrap();
        let mut v = vectorize(rho0.matrix().view());
        for _ in 0..3 {
            v = m.dot(&v);
        }
        let mapped = unvectorize(&v, p.space().unwrap().dim());
        let err = (&mapped - direct[1].matrix()).iter().map(|z| z.norm()).fold(0.0, f64::max);
        assert!(err < 1e-10, "deviation {err}");
    }

    #[test]
    fn g2_tau_starts_at_equal_time_value() {
        let p = fig5(15);
        let l = effective_liouvillian(&p).unwrap();
        let rho = steady_state(&l).unwrap();
        let g2 = g2_tau(&l, &rho, &[0.0, 1.0 / p.gamma_m_eff]).unwrap();
        let s = p.space().unwrap();
        let a = annihilation(s);
        let ad = a.adjoint();
        let num = crate::qcore::expectation(&rho, &ad.dot(&ad).dot(&a).dot(&a)).unwrap().re;
        let n = crate::qcore::expectation(&rho, &number(s)).unwrap().re;
        assert_relative_eq!(g2[0], num / (n * n), max_relative = 1e-10);
        assert!(g2[1] > g2[0]);
    }

    #[test]
    fn g2_tau_rejects_empty_mode() {
        let mut p = fig5(6);
        p.eps_l = 0.0;
        let l = effective_liouvillian(&p).unwrap();
        let rho = steady_state(&l).unwrap();
        assert!(matches!(g2_tau(&l, &rho, &[0.0]), Err(DynamicsError::ZeroMeanPhononNumber(_))));
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(24))]
        #[test]
        fn liouvillian_preserves_trace_and_hermiticity(
            delta in -2.0f64..2.0, eps in 0.0f64..1.0, r in 0.0f64..2.0,
            gm in 0.01f64..2.0, gz in 0.0f64..2.0, seed in proptest::collection::vec(-1.0f64..1.0, 72)
        ) {
            let p = ModelParams {
                coupling: Coupling::TwoPhonon,
                g: 0.3,
                squeeze: SqueezeTransform::new(r).unwrap(),
                eps_l: eps,
                delta,
                delta_s: 5.0,
                delta_ed: 10.0,
                gamma_m_eff: gm,
                gamma_z: gz,
                n_th: 1.0,
                fock_dim: 3,
            };
            let l = effective_liouvillian(&p).unwrap();
            let d = 6;
            let x = Array2::from_shape_fn((d, d), |(i, j)| C64::new(seed[i * d + j], seed[36 + i * d + j]));
            let rho = hermitian_part(x.view());
            let drho = l.apply(rho.view());
            let scale = l.norm_inf();
            prop_assert!(drho.diag().sum().norm() < 1e-10 * scale);
            prop_assert!(max_abs_antihermitian(drho.view()) < 1e-10 * scale);
        }
    }
}
