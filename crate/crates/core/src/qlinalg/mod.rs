// Copyright 2026 The simqdc Authors
// SPDX-License-Identifier: Apache-2.0

//! Dense complex linear algebra over truncated composite Hilbert spaces.
//!
//! Units are natural (hbar = 1, angular frequencies in rad/s). Every
//! composite operator in the crate is built with [`embed`] so that the
//! (b1, b2, spin) index layout has a single definition.

mod expm;
mod operator;
mod space;
mod state;

pub use expm::{matrix_exponential, propagator};
pub use operator::{
    destroy, embed, local_outer, number, spin_dark_index, spin_operators, CMatrix, HybridOperators, Operator,
    SpinOperators, C64, I, ONE, ZERO,
};
pub use space::{Factor, HilbertSpace, B1, B2, SPIN};
pub use state::{
    expect, product_ket, trace_of_product, CVector, DensityMatrix, KetState, QuantumState, HERMITIAN_TOL,
    KET_NORM_TOL, POSITIVITY_TOL, TRACE_TOL,
};
