// Copyright 2026 Pblockade Contributors
// SPDX-License-Identifier: Apache-2.0

//! Truncated Hilbert space of one mechanical mode and one effective spin.
//!
//! Basis ordering is `index = n * 2 + s`, with the mechanical Fock number `n`
//! varying slowest and the spin label `s` (`|D⟩ = 0`, `|E⟩ = 1`) fastest.
//! Every operator on the composite space is therefore `A_mech ⊗ A_spin`.

use ndarray::{Array2, ArrayView2};
use ndarray_linalg::{EigValsh, UPLO};
use num_complex::Complex64;
use serde::{Deserialize, Serialize};
use thiserror::Error;

pub type C64 = Complex64;

/// Dimension of the effective spin factor.
pub const SPIN_DIM: usize = 2;

/// Maximum |ρ − ρ†| entry accepted for a density matrix.
pub const HERMITICITY_TOL: f64 = 1e-10;
/// Maximum |tr ρ − 1| accepted for a density matrix.
pub const TRACE_TOL: f64 = 1e-8;
/// Most negative eigenvalue accepted for a density matrix.
pub const POSITIVITY_TOL: f64 = 1e-8;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum QcoreError {
    #[error("Fock truncation must be at least 2, got {0}")]
    InvalidTruncation(usize),
    #[error("dimension mismatch: expected {expected}, found {found}")]
    DimensionMismatch { expected: usize, found: usize },
    #[error("matrix is not square ({rows}x{cols})")]
    NotSquare { rows: usize, cols: usize },
    #[error("basis label out of range: n = {n} with Fock truncation {fock_dim}")]
    OutOfRange { n: usize, fock_dim: usize },
    #[error("state is not Hermitian (max |ρ - ρ†| = {0:.3e})")]
    NotHermitian(f64),
    #[error("state trace is {0:.12}, expected 1")]
    BadTrace(f64),
    #[error("state has negative eigenvalue {0:.3e}")]
    NotPositive(f64),
    #[error("linear algebra failure: {0}")]
    Linalg(String),
}

/// Effective spin label: `Dark` is `|D⟩`, `Excited` is `|E⟩`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Spin {
    Dark,
    Excited,
}

impl Spin {
    pub fn index(self) -> usize {
        match self {
            Spin::Dark => 0,
            Spin::Excited => 1,
        }
    }
}

/// `C^N ⊗ C^2` with Fock truncation `N`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct HilbertSpace {
    fock_dim: usize,
}

impl HilbertSpace {
    pub fn new(fock_dim: usize) -> Result<Self, QcoreError> {
        if fock_dim < 2 {
            return Err(QcoreError::InvalidTruncation(fock_dim));
        }
        Ok(Self { fock_dim })
    }

    pub fn fock_dim(&self) -> usize {
        self.fock_dim
    }

    /// Total dimension `2N`.
    pub fn dim(&self) -> usize {
        self.fock_dim * SPIN_DIM
    }

    pub fn index(&self, n: usize, spin: Spin) -> Result<usize, QcoreError> {
        if n >= self.fock_dim {
            return Err(QcoreError::OutOfRange {
                n,
                fock_dim: self.fock_dim,
            });
        }
        Ok(n * SPIN_DIM + spin.index())
    }

    /// Inverse of [`HilbertSpace::index`].
    pub fn label(&self, index: usize) -> (usize, Spin) {
        let spin = if index % SPIN_DIM == 0 {
            Spin::Dark
        } else {
            Spin::Excited
        };
        (index / SPIN_DIM, spin)
    }
}

/// Kronecker product `a ⊗ b`.
pub fn kron(a: &Array2<C64>, b: &Array2<C64>) -> Array2<C64> {
    ndarray::linalg::kron(a, b)
}

/// Truncated bosonic annihilation operator on `C^N`.
pub fn fock_annihilation(fock_dim: usize) -> Array2<C64> {
    let mut a = Array2::zeros((fock_dim, fock_dim));
    for n in 1..fock_dim {
        a[[n - 1, n]] = C64::new((n as f64).sqrt(), 0.0);
    }
    a
}

/// `|D⟩⟨E|` on the spin factor.
pub fn spin_lowering() -> Array2<C64> {
    let mut s = Array2::zeros((SPIN_DIM, SPIN_DIM));
    s[[0, 1]] = C64::new(1.0, 0.0);
    s
}

/// Square dense operator on a [`HilbertSpace`].
#[derive(Clone, Debug, PartialEq)]
pub struct Operator {
    space: HilbertSpace,
    matrix: Array2<C64>,
}

impl Operator {
    pub fn new(space: HilbertSpace, matrix: Array2<C64>) -> Result<Self, QcoreError> {
        check_shape(space, matrix.view())?;
        Ok(Self { space, matrix })
    }

    pub fn zeros(space: HilbertSpace) -> Self {
        Self {
            space,
            matrix: Array2::zeros((space.dim(), space.dim())),
        }
    }

    pub fn identity(space: HilbertSpace) -> Self {
        Self {
            space,
            matrix: Array2::eye(space.dim()),
        }
    }

    pub fn space(&self) -> HilbertSpace {
        self.space
    }

    pub fn matrix(&self) -> &Array2<C64> {
        &self.matrix
    }

    pub fn into_matrix(self) -> Array2<C64> {
        self.matrix
    }

    pub fn adjoint(&self) -> Self {
        Self {
            space: self.space,
            matrix: self.matrix.t().mapv(|z| z.conj()),
        }
    }

    pub fn scaled(&self, c: C64) -> Self {
        Self {
            space: self.space,
            matrix: &self.matrix * c,
        }
    }

    pub fn dot(&self, other: &Operator) -> Self {
        assert_eq!(self.space, other.space, "operators act on different spaces");
        Self {
            space: self.space,
            matrix: self.matrix.dot(&other.matrix),
        }
    }

    pub fn commutator(&self, other: &Operator) -> Self {
        &self.dot(other) - &other.dot(self)
    }

    /// Largest entry of `|A − A†|`.
    pub fn hermiticity_error(&self) -> f64 {
        max_abs_antihermitian(self.matrix.view())
    }

    pub fn is_hermitian(&self, tol: f64) -> bool {
        self.hermiticity_error() <= tol
    }

    pub fn trace(&self) -> C64 {
        self.matrix.diag().sum()
    }

    /// Largest absolute row sum.
    pub fn norm_inf(&self) -> f64 {
        norm_inf(self.matrix.view())
    }

    /// `⟨bra|A|ket⟩` on basis labels.
    pub fn element(&self, bra: (usize, Spin), ket: (usize, Spin)) -> Result<C64, QcoreError> {
        let i = self.space.index(bra.0, bra.1)?;
        let j = self.space.index(ket.0, ket.1)?;
        Ok(self.matrix[[i, j]])
    }
}

impl std::ops::Add for &Operator {
    type Output = Operator;
    fn add(self, rhs: &Operator) -> Operator {
        assert_eq!(self.space, rhs.space, "operators act on different spaces");
        Operator {
            space: self.space,
            matrix: &self.matrix + &rhs.matrix,
        }
    }
}

impl std::ops::Sub for &Operator {
    type Output = Operator;
    fn sub(self, rhs: &Operator) -> Operator {
        assert_eq!(self.space, rhs.space, "operators act on different spaces");
        Operator {
            space: self.space,
            matrix: &self.matrix - &rhs.matrix,
        }
    }
}

impl std::ops::Mul for &Operator {
    type Output = Operator;
    fn mul(self, rhs: &Operator) -> Operator {
        self.dot(rhs)
    }
}

impl std::ops::Mul<f64> for &Operator {
    type Output = Operator;
    fn mul(self, rhs: f64) -> Operator {
        self.scaled(C64::new(rhs, 0.0))
    }
}

impl std::ops::Mul<C64> for &Operator {
    type Output = Operator;
    fn mul(self, rhs: C64) -> Operator {
        self.scaled(rhs)
    }
}

/// Lift a mechanical factor and a spin factor to `mech ⊗ spin`.
pub fn tensor(
    space: HilbertSpace,
    mech: &Array2<C64>,
    spin: &Array2<C64>,
) -> Result<Operator, QcoreError> {
    check_factor(mech.view(), space.fock_dim())?;
    check_factor(spin.view(), SPIN_DIM)?;
    Ok(Operator {
        space,
        matrix: kron(mech, spin),
    })
}

fn check_factor(m: ArrayView2<C64>, dim: usize) -> Result<(), QcoreError> {
    let (rows, cols) = m.dim();
    if rows != cols {
        return Err(QcoreError::NotSquare { rows, cols });
    }
    if rows != dim {
        return Err(QcoreError::DimensionMismatch {
            expected: dim,
            found: rows,
        });
    }
    Ok(())
}

fn check_shape(space: HilbertSpace, m: ArrayView2<C64>) -> Result<(), QcoreError> {
    check_factor(m, space.dim())
}

/// Mechanical annihilation `a ⊗ I₂`.
pub fn annihilation(space: HilbertSpace) -> Operator {
    Operator {
        space,
        matrix: kron(&fock_annihilation(space.fock_dim()), &Array2::eye(SPIN_DIM)),
    }
}

/// Mechanical creation `a† ⊗ I₂`.
pub fn creation(space: HilbertSpace) -> Operator {
    annihilation(space).adjoint()
}

/// Phonon number `a†a ⊗ I₂`.
pub fn number(space: HilbertSpace) -> Operator {
    let mut m = Array2::zeros((space.dim(), space.dim()));
    for i in 0..space.dim() {
        m[[i, i]] = C64::new(space.label(i).0 as f64, 0.0);
    }
    Operator { space, matrix: m }
}

/// Spin lowering `I_N ⊗ |D⟩⟨E|`.
pub fn sigma_minus(space: HilbertSpace) -> Operator {
    Operator {
        space,
        matrix: kron(&Array2::eye(space.fock_dim()), &spin_lowering()),
    }
}

/// Spin raising `I_N ⊗ |E⟩⟨D|`.
pub fn sigma_plus(space: HilbertSpace) -> Operator {
    sigma_minus(space).adjoint()
}

/// Excited-state projector `σ₊σ₋ = I_N ⊗ |E⟩⟨E|`.
pub fn excited_projector(space: HilbertSpace) -> Operator {
    let mut m = Array2::zeros((space.dim(), space.dim()));
    for n in 0..space.fock_dim() {
        let i = n * SPIN_DIM + Spin::Excited.index();
        m[[i, i]] = C64::new(1.0, 0.0);
    }
    Operator { space, matrix: m }
}

/// Validated density matrix: Hermitian, unit trace, positive semidefinite.
#[derive(Clone, Debug, PartialEq)]
pub struct DensityMatrix {
    space: HilbertSpace,
    matrix: Array2<C64>,
}

impl DensityMatrix {
    pub fn new(space: HilbertSpace, matrix: Array2<C64>) -> Result<Self, QcoreError> {
        check_shape(space, matrix.view())?;
        let herm = max_abs_antihermitian(matrix.view());
        if herm > HERMITICITY_TOL {
            return Err(QcoreError::NotHermitian(herm));
        }
        let tr = matrix.diag().sum();
        if (tr.re - 1.0).abs() > TRACE_TOL || tr.im.abs() > TRACE_TOL {
            return Err(QcoreError::BadTrace(tr.re));
        }
        let min_eig = min_eigenvalue(matrix.view())?;
        if min_eig < -POSITIVITY_TOL {
            return Err(QcoreError::NotPositive(min_eig));
        }
        Ok(Self { space, matrix })
    }

    /// Hermitize and normalize `matrix`, then validate.
    pub fn from_unnormalized(space: HilbertSpace, matrix: Array2<C64>) -> Result<Self, QcoreError> {
        check_shape(space, matrix.view())?;
        let mut m = hermitian_part(matrix.view());
        let tr = m.diag().sum().re;
        if !(tr.is_finite() && tr > 0.0) {
            return Err(QcoreError::BadTrace(tr));
        }
        m.mapv_inplace(|z| z / tr);
        Self::new(space, m)
    }

    /// Pure basis state `|n, s⟩⟨n, s|`.
    pub fn basis(space: HilbertSpace, n: usize, spin: Spin) -> Result<Self, QcoreError> {
        let i = space.index(n, spin)?;
        let mut m = Array2::zeros((space.dim(), space.dim()));
        m[[i, i]] = C64::new(1.0, 0.0);
        Ok(Self { space, matrix: m })
    }

    pub fn space(&self) -> HilbertSpace {
        self.space
    }

    pub fn matrix(&self) -> &Array2<C64> {
        &self.matrix
    }

    pub fn into_matrix(self) -> Array2<C64> {
        self.matrix
    }

    /// `⟨n, s|ρ|n, s⟩`.
    pub fn population(&self, n: usize, spin: Spin) -> Result<f64, QcoreError> {
        let i = self.space.index(n, spin)?;
        Ok(self.matrix[[i, i]].re)
    }

    pub fn min_eigenvalue(&self) -> Result<f64, QcoreError> {
        min_eigenvalue(self.matrix.view())
    }

    /// `½ ‖ρ − σ‖₁`.
    pub fn trace_distance(&self, other: &DensityMatrix) -> Result<f64, QcoreError> {
        if self.space != other.space {
            return Err(QcoreError::DimensionMismatch {
                expected: self.space.dim(),
                found: other.space.dim(),
            });
        }
        let diff = hermitian_part((&self.matrix - &other.matrix).view());
        let eig = diff
            .eigvalsh(UPLO::Lower)
            .map_err(|e| QcoreError::Linalg(e.to_string()))?;
        Ok(0.5 * eig.iter().map(|x| x.abs()).sum::<f64>())
    }
}

/// `tr(ρ A)`.
pub fn expectation(rho: &DensityMatrix, op: &Operator) -> Result<C64, QcoreError> {
    if rho.space != op.space {
        return Err(QcoreError::DimensionMismatch {
            expected: rho.space.dim(),
            found: op.space.dim(),
        });
    }
    Ok(trace_of_product(rho.matrix.view(), op.matrix.view()))
}

/// `tr(A B)` without forming the product.
pub fn trace_of_product(a: ArrayView2<C64>, b: ArrayView2<C64>) -> C64 {
    let mut acc = C64::new(0.0, 0.0);
    for ((i, j), &aij) in a.indexed_iter() {
        acc += aij * b[[j, i]];
    }
    acc
}

/// `(A + A†) / 2`.
pub fn hermitian_part(m: ArrayView2<C64>) -> Array2<C64> {
    let mut out = m.to_owned();
    let n = m.nrows();
    for i in 0..n {
        for j in 0..n {
            out[[i, j]] = 0.5 * (m[[i, j]] + m[[j, i]].conj());
        }
    }
    out
}

pub(crate) fn max_abs_antihermitian(m: ArrayView2<C64>) -> f64 {
    let n = m.nrows();
    let mut worst: f64 = 0.0;
    for i in 0..n {
        for j in i..n {
            worst = worst.max((m[[i, j]] - m[[j, i]].conj()).norm());
        }
    }
    worst
}

pub(crate) fn norm_inf(m: ArrayView2<C64>) -> f64 {
    m.rows()
        .into_iter()
        .map(|row| row.iter().map(|z| z.norm()).sum::<f64>())
        .fold(0.0, f64::max)
}

fn min_eigenvalue(m: ArrayView2<C64>) -> Result<f64, QcoreError> {
    let h = hermitian_part(m);
    let eig = h
        .eigvalsh(UPLO::Lower)
        .map_err(|e| QcoreError::Linalg(e.to_string()))?;
    Ok(eig.iter().cloned().fold(f64::INFINITY, f64::min))
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;
    use proptest::prelude::*;

    fn c(re: f64, im: f64) -> C64 {
        C64::new(re, im)
    }

    fn space(n: usize) -> HilbertSpace {
        HilbertSpace::new(n).unwrap()
    }

    #[test]
    fn rejects_tiny_truncation() {
        assert_eq!(HilbertSpace::new(1), Err(QcoreError::InvalidTruncation(1)));
        assert_eq!(HilbertSpace::new(0), Err(QcoreError::InvalidTruncation(0)));
    }

    #[test]
    fn index_ordering_is_mechanics_slow() {
        let s = space(15);
        assert_eq!(s.dim(), 30);
        assert_eq!(s.index(0, Spin::Dark).unwrap(), 0);
        assert_eq!(s.index(0, Spin::Excited).unwrap(), 1);
        assert_eq!(s.index(1, Spin::Dark).unwrap(), 2);
        assert_eq!(s.index(2, Spin::Dark).unwrap(), 4);
        assert_eq!(s.label(5), (2, Spin::Excited));
        assert!(s.index(15, Spin::Dark).is_err());
    }

    #[test]
    fn ladder_elements() {
        let s = space(15);
        let a = annihilation(s);
        let ad = creation(s);
        assert_abs_diff_eq!(
            a.element((2, Spin::Dark), (3, Spin::Dark)).unwrap().re,
            3f64.sqrt(),
            epsilon = 1e-15
        );
        assert_eq!(a.element((2, Spin::Dark), (3, Spin::Excited)).unwrap(), c(0.0, 0.0));
        // a†² |0⟩ = √2 |2⟩
        let ad2 = ad.dot(&ad);
        assert_abs_diff_eq!(
            ad2.element((2, Spin::Excited), (0, Spin::Excited)).unwrap().re,
            2f64.sqrt(),
            epsilon = 1e-15
        );
    }

    #[test]
    fn canonical_commutator_except_top_level() {
        let s = space(15);
        let comm = annihilation(s).commutator(&creation(s));
        for i in 0..s.dim() {
            let (n, _) = s.label(i);
            let expected = if n == 14 { -14.0 } else { 1.0 };
            assert_abs_diff_eq!(comm.matrix()[[i, i]].re, expected, epsilon = 1e-12);
        }
        let off: f64 = comm
            .matrix()
            .indexed_iter()
            .filter(|((i, j), _)| i != j)
            .map(|(_, z)| z.norm())
            .sum();
        assert_eq!(off, 0.0);
    }

    #[test]
    fn number_is_adag_a() {
        let s = space(9);
        let n = number(s);
        let ada = creation(s).dot(&annihilation(s));
        let err = (n.matrix() - ada.matrix()).iter().map(|z| z.norm()).fold(0.0, f64::max);
        assert!(err < 1e-14);
        let diag: Vec<f64> = (0..9).map(|k| n.matrix()[[2 * k, 2 * k]].re).collect();
        assert_eq!(diag, (0..9).map(|k| k as f64).collect::<Vec<_>>());
    }

    #[test]
    fn spin_operators() {
        let s = space(4);
        let sp = sigma_plus(s);
        let sm = sigma_minus(s);
        assert_eq!(sp.dot(&sm).matrix(), excited_projector(s).matrix());
        assert_eq!(
            sm.element((3, Spin::Dark), (3, Spin::Excited)).unwrap(),
            c(1.0, 0.0)
        );
    }

    #[test]
    fn tensor_matches_brute_force_kronecker() {
        let s = space(3);
        let mech = Array2::from_shape_fn((3, 3), |(i, j)| c(i as f64 + 0.5, j as f64 - 1.0));
        let spin = Array2::from_shape_fn((2, 2), |(i, j)| c((i * 2 + j) as f64, 0.25));
        let op = tensor(s, &mech, &spin).unwrap();
        for n in 0..3 {
            for sa in 0..2 {
                for m in 0..3 {
                    for sb in 0..2 {
                        let brute = mech[[n, m]] * spin[[sa, sb]];
                        assert_eq!(op.matrix()[[n * 2 + sa, m * 2 + sb]], brute);
                    }
                }
            }
        }
    }

    #[test]
    fn two_level_mechanics() {
        let s = space(2);
        let a = annihilation(s);
        assert_eq!(a.element((0, Spin::Dark), (1, Spin::Dark)).unwrap(), c(1.0, 0.0));
        let col0: f64 = (0..4).map(|i| a.matrix()[[i, 0]].norm()).sum();
        assert_eq!(col0, 0.0);
    }

    #[test]
    fn spin_lowering_is_nilpotent_projector_pair() {
        let s = space(3);
        let sm = sigma_minus(s);
        assert!(sm.dot(&sm).matrix().iter().all(|z| z.norm() == 0.0));
        let p = excited_projector(s);
        assert_eq!(p.dot(&p).matrix(), p.matrix());
        let spectrum: Vec<f64> = (0..6).map(|i| p.matrix()[[i, i]].re).collect();
        assert!(spectrum.iter().all(|&x| x == 0.0 || x == 1.0));
    }

    #[test]
    fn tensor_identities() {
        let eye: Array2<C64> = Array2::eye(2);
        assert_eq!(kron(&eye, &eye), Array2::<C64>::eye(4));
        let a = Array2::from_shape_fn((3, 3), |(i, j)| c(i as f64 - j as f64, (i * j) as f64));
        let b = Array2::from_shape_fn((2, 2), |(i, j)| c(1.0 + i as f64, j as f64));
        let lhs: C64 = kron(&a, &b).diag().sum();
        assert!((lhs - a.diag().sum() * b.diag().sum()).norm() < 1e-14);
        // Associativity on integer entries.
        let x = Array2::from_shape_fn((2, 2), |(i, j)| c((i + 2 * j) as f64, 1.0));
        assert_eq!(kron(&kron(&a, &b), &x), kron(&a, &kron(&b, &x)));
    }

    #[test]
    fn expectation_of_hermitian_is_real() {
        let s = space(5);
        let mut m = Array2::from_shape_fn((10, 10), |(i, j)| c((i + j) as f64 * 0.01, (i as f64 - j as f64) * 0.003));
        for i in 0..10 {
            m[[i, i]] = c(0.1, 0.0);
        }
        let rho = DensityMatrix::from_unnormalized(s, m.dot(&m.t().mapv(|z| z.conj()))).unwrap();
        let x = &annihilation(s) + &creation(s);
        assert!(expectation(&rho, &x).unwrap().im.abs() < 1e-12);
        let two = DensityMatrix::basis(s, 2, Spin::Dark).unwrap();
        assert_eq!(expectation(&two, &number(s)).unwrap().re, 2.0);
    }

    #[test]
    fn tensor_rejects_mismatched_factor() {
        let s = space(3);
        let err = tensor(s, &Array2::eye(4), &Array2::eye(2)).unwrap_err();
        assert_eq!(err, QcoreError::DimensionMismatch { expected: 3, found: 4 });
        let err = tensor(s, &Array2::eye(3), &Array2::eye(3)).unwrap_err();
        assert_eq!(err, QcoreError::DimensionMismatch { expected: 2, found: 3 });
    }

    #[test]
    fn density_matrix_validation() {
        let s = space(2);
        assert!(DensityMatrix::new(s, Array2::eye(4) * c(0.25, 0.0)).is_ok());
        assert!(matches!(
            DensityMatrix::new(s, Array2::eye(4) * c(0.3, 0.0)),
            Err(QcoreError::BadTrace(_))
        ));
        let mut m = Array2::eye(4) * c(0.25, 0.0);
        m[[0, 1]] = c(0.1, 0.0);
        assert!(matches!(DensityMatrix::new(s, m), Err(QcoreError::NotHermitian(_))));
        let mut m = Array2::zeros((4, 4));
        m[[0, 0]] = c(1.5, 0.0);
        m[[1, 1]] = c(-0.5, 0.0);
        assert!(matches!(DensityMatrix::new(s, m), Err(QcoreError::NotPositive(_))));
    }

    #[test]
    fn expectation_checks_dimension() {
        let rho = DensityMatrix::basis(space(3), 1, Spin::Dark).unwrap();
        assert_eq!(expectation(&rho, &number(space(3))).unwrap(), c(1.0, 0.0));
        assert!(expectation(&rho, &number(space(4))).is_err());
    }

    fn small_matrix(n: usize) -> impl Strategy<Value = Array2<C64>> {
        proptest::collection::vec((-1.0f64..1.0, -1.0f64..1.0), n * n).prop_map(move |v| {
            Array2::from_shape_vec((n, n), v.into_iter().map(|(a, b)| c(a, b)).collect()).unwrap()
        })
    }

    proptest! {
        #[test]
        fn kron_mixed_product(a in small_matrix(2), b in small_matrix(2),
                              cc in small_matrix(2), d in small_matrix(2)) {
            let lhs = kron(&a, &b).dot(&kron(&cc, &d));
            let rhs = kron(&a.dot(&cc), &b.dot(&d));
            let err = (&lhs - &rhs).iter().map(|z| z.norm()).fold(0.0, f64::max);
            prop_assert!(err < 1e-12);
        }

        #[test]
        fn adjoint_of_product(n in 2usize..6, k in 0usize..3) {
            let s = space(n);
            let a = annihilation(s);
            let op = if k == 0 { a.dot(&sigma_plus(s)) } else { a.dot(&a).dot(&sigma_minus(s)) };
            let lhs = op.adjoint();
            let rhs = if k == 0 {
                sigma_minus(s).dot(&creation(s))
            } else {
                sigma_plus(s).dot(&creation(s)).dot(&creation(s))
            };
            prop_assert_eq!(lhs.matrix(), rhs.matrix());
        }
    }
}
