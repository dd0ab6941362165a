// Copyright 2026 The simqdc Authors
// SPDX-License-Identifier: Apache-2.0

#![allow(dead_code)]

use std::sync::Arc;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use simqdc::qlinalg::{CMatrix, CVector, DensityMatrix, HilbertSpace, KetState, Operator, C64};

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

pub fn random_complex(rng: &mut ChaCha8Rng) -> C64 {
    C64::new(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0))
}

pub fn random_hermitian(space: &Arc<HilbertSpace>, scale: f64, rng: &mut ChaCha8Rng) -> Operator {
    let n = space.total_dim();
    let a = CMatrix::from_fn(n, n, |_, _| random_complex(rng));
    let h = (&a + a.adjoint()) * C64::new(0.5 * scale, 0.0);
    Operator::new(space.clone(), h).unwrap()
}

pub fn random_ket(space: &Arc<HilbertSpace>, rng: &mut ChaCha8Rng) -> KetState {
    let v = CVector::from_fn(space.total_dim(), |_, _| random_complex(rng));
    KetState::normalized(space.clone(), v).unwrap()
}

/// Random full-rank mixed state A A^dag / Tr.
pub fn random_density(space: &Arc<HilbertSpace>, rng: &mut ChaCha8Rng) -> DensityMatrix {
    let n = space.total_dim();
    let a = CMatrix::from_fn(n, n, |_, _| random_complex(rng));
    let m = &a * a.adjoint();
    let tr = m.trace();
    DensityMatrix::new(space.clone(), m / tr).unwrap()
}

pub fn max_abs(m: &CMatrix) -> f64 {
    m.iter().fold(0.0, |a, z| a.max(z.norm()))
}
