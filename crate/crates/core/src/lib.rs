// Copyright 2026 Pblockade Contributors
// SPDX-License-Identifier: Apache-2.0

//! Phonon blockade in a parametrically squeezed mechanical mode coupled to a
//! dressed NV spin through a two-phonon (or single-phonon) exchange.
//!
//! - [`qcore`]: truncated Fock ⊗ spin operators and density matrices.
//! - [`model`]: parameters and Hamiltonian builders.
//! - [`dynamics`]: Lindblad superoperator, steady state, propagation, g²(τ).
//! - [`stats`]: correlation functions, phonon statistics, blockade criteria.
//! - [`analytic`]: closed-form weak-drive amplitudes and correlations.
//! - [`device`]: cantilever and nanomagnet estimates for the coupling rate.

pub mod analytic;
pub mod device;
pub mod dynamics;
pub mod model;
pub mod qcore;
pub mod stats;
