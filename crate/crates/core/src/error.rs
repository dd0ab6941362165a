// Copyright 2026 The simqdc Authors
// SPDX-License-Identifier: Apache-2.0

use std::path::PathBuf;

use thiserror::Error;

/// Errors raised anywhere in the simulation stack.
#[derive(Debug, Error)]
pub enum Error {
    #[error("dimension error: {0}")]
    Dimension(String),

    #[error("space mismatch: {0}")]
    SpaceMismatch(String),

    #[error("non-finite matrix entries in {0}")]
    NonFinite(&'static str),

    #[error("invalid state: {0}")]
    InvalidState(String),

    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    #[error("dispersive regime violated: {0}")]
    DispersiveRegime(String),

    #[error("operator is not unitary (max |U^dag U - I| = {0:.3e})")]
    NotUnitary(f64),

    #[error("integration quality error: {0}")]
    IntegrationQuality(String),

    #[error("Fock truncation too small: {0}")]
    Truncation(String),

    #[error("config error: {0}")]
    Config(String),

    #[error("I/O error on {path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },
}

impl Error {
    /// True for failures of numerical quality (drift, negativity, leakage).
    pub fn is_numerical(&self) -> bool {
        matches!(
            self,
            Error::IntegrationQuality(_) | Error::Truncation(_) | Error::NonFinite(_) | Error::NotUnitary(_)
        )
    }
}

pub type Result<T> = std::result::Result<T, Error>;
