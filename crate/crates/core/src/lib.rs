// Copyright 2026 The simqdc Authors
// SPDX-License-Identifier: Apache-2.0

//! Open-system simulation of a mechanical quantum delayed-choice
//! experiment: an NV spin steers a single phonon shared by two carbon
//! nanotube resonators through a spin-controlled beam splitter.
//!
//! Units are natural (hbar = 1) with angular frequencies in rad/s.

pub mod analytics;
pub mod cli;
pub mod error;
pub mod hamiltonian;
pub mod lindblad;
pub mod params;
pub mod protocol;
pub mod qlinalg;
pub mod squeezing;

pub use error::{Error, Result};
