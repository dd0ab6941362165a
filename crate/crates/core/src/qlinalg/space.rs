// Copyright 2026 The simqdc Authors
// SPDX-License-Identifier: Apache-2.0

use std::fmt;
use std::sync::Arc;

use crate::error::{Error, Result};

/// Label of the first mechanical mode.
pub const B1: &str = "b1";
/// Label of the second mechanical mode.
pub const B2: &str = "b2";
/// Label of the NV spin factor.
pub const SPIN: &str = "spin";

#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct Factor {
    pub label: String,
    pub dim: usize,
}

/// Ordered tensor-product space. The first factor is the most significant
/// index, so `|i, j, k>` lives at `(i * d2 + j) * d3 + k`.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct HilbertSpace {
    factors: Vec<Factor>,
}

impl HilbertSpace {
    pub fn new<S: Into<String>>(factors: impl IntoIterator<Item = (S, usize)>) -> Result<Arc<Self>> {
        let factors: Vec<Factor> = factors
            .into_iter()
            .map(|(label, dim)| Factor { label: label.into(), dim })
            .collect();
        if factors.is_empty() {
            return Err(Error::Dimension("a space needs at least one factor".into()));
        }
        for (i, f) in factors.iter().enumerate() {
            if f.dim == 0 {
                return Err(Error::Dimension(format!("factor '{}' has dimension 0", f.label)));
            }
            if factors[..i].iter().any(|g| g.label == f.label) {
                return Err(Error::Dimension(format!("duplicate factor label '{}'", f.label)));
            }
        }
        Ok(Arc::new(Self { factors }))
    }

    /// The (b1, b2, spin) layout used by every protocol model.
    pub fn hybrid(levels: usize, spin_dim: usize) -> Result<Arc<Self>> {
        Self::hybrid_asymmetric(levels, levels, spin_dim)
    }

    pub fn hybrid_asymmetric(levels1: usize, levels2: usize, spin_dim: usize) -> Result<Arc<Self>> {
        if levels1 < 2 || levels2 < 2 {
            return Err(Error::Dimension(format!(
                "mode truncation must be at least 2 levels (got {levels1}, {levels2})"
            )));
        }
        if !(spin_dim == 2 || spin_dim == 3) {
            return Err(Error::Dimension(format!("spin dimension must be 2 or 3 (got {spin_dim})")));
        }
        Self::new([(B1, levels1), (B2, levels2), (SPIN, spin_dim)])
    }

    /// Two mechanical modes without a spin.
    pub fn two_mode(levels: usize) -> Result<Arc<Self>> {
        if levels < 2 {
            return Err(Error::Dimension(format!("mode truncation must be at least 2 levels (got {levels})")));
        }
        Self::new([(B1, levels), (B2, levels)])
    }

    pub fn single(label: &str, dim: usize) -> Result<Arc<Self>> {
        Self::new([(label, dim)])
    }

    pub fn factors(&self) -> &[Factor] {
        &self.factors
    }

    pub fn total_dim(&self) -> usize {
        self.factors.iter().map(|f| f.dim).product()
    }

    pub fn position(&self, label: &str) -> Option<usize> {
        self.factors.iter().position(|f| f.label == label)
    }

    pub fn dim_of(&self, label: &str) -> Option<usize> {
        self.position(label).map(|i| self.factors[i].dim)
    }

    /// Flat index of a product basis state given one level per factor.
    pub fn index(&self, levels: &[usize]) -> Result<usize> {
        if levels.len() != self.factors.len() {
            return Err(Error::Dimension(format!(
                "expected {} factor levels, got {}",
                self.factors.len(),
                levels.len()
            )));
        }
        let mut idx = 0;
        for (f, &l) in self.factors.iter().zip(levels) {
            if l >= f.dim {
                return Err(Error::Dimension(format!("level {l} out of range for '{}' (dim {})", f.label, f.dim)));
            }
            idx = idx * f.dim + l;
        }
        Ok(idx)
    }

    /// Inverse of [`HilbertSpace::index`].
    pub fn levels(&self, mut index: usize) -> Vec<usize> {
        let mut out = vec![0; self.factors.len()];
        for (slot, f) in self.factors.iter().enumerate().rev() {
            out[slot] = index % f.dim;
            index /= f.dim;
        }
        out
    }
}

impl fmt::Display for HilbertSpace {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let parts: Vec<String> = self.factors.iter().map(|x| format!("{}:{}", x.label, x.dim)).collect();
        write!(f, "({})", parts.join(" x "))
    }
}
