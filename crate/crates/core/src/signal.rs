//! Signals on the sampling grid and coefficient vectors indexed by a frame's
//! index set.

use std::collections::HashMap;
use std::fmt;
use std::sync::Arc;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// A real-valued sample vector on `{0, ..., n-1}`.
#[derive(Debug, Clone, PartialEq)]
pub struct Signal {
    samples: Vec<f64>,
}

impl Signal {
    pub fn new(samples: Vec<f64>) -> Result<Self> {
        if samples.is_empty() {
            return Err(Error::DimensionMismatch {
                expected: 1,
                actual: 0,
            });
        }
        Ok(Self { samples })
    }

    pub fn zeros(n: usize) -> Self {
        Self {
            samples: vec![0.0; n],
        }
    }

    pub fn len(&self) -> usize {
        self.samples.len()
    }

    pub fn is_empty(&self) -> bool {
        self.samples.is_empty()
    }

    pub fn samples(&self) -> &[f64] {
        &self.samples
    }

    pub fn samples_mut(&mut self) -> &mut [f64] {
        &mut self.samples
    }

    pub fn into_samples(self) -> Vec<f64> {
        self.samples
    }

    pub fn norm(&self) -> f64 {
        self.samples.iter().map(|x| x * x).sum::<f64>().sqrt()
    }

    /// Squared Euclidean distance to another signal of the same length.
    pub fn squared_distance(&self, other: &Signal) -> Result<f64> {
        if other.len() != self.len() {
            return Err(Error::DimensionMismatch {
                expected: self.len(),
                actual: other.len(),
            });
        }
        Ok(self
            .samples
            .iter()
            .zip(&other.samples)
            .map(|(a, b)| (a - b) * (a - b))
            .sum())
    }
}

impl From<Signal> for Vec<f64> {
    fn from(s: Signal) -> Self {
        s.samples
    }
}

/// Position of a frame element inside the frame's index set.
///
/// Scaling variants mark atoms of the low-resolution space; those are kept
/// out of thresholding when a detail-subspace estimator is requested.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum FrameIndex {
    Flat {
        i: usize,
    },
    Scaling {
        k: usize,
    },
    /// Wavelet at scale `j` and location `k`, `0 <= k < 2^j`.
    Wavelet {
        j: u32,
        k: usize,
    },
    ShiftedScaling {
        k: usize,
        m: usize,
    },
    /// Wavelet `(j, k)` of the basis translated by shift `m`.
    Shifted {
        j: u32,
        k: usize,
        m: usize,
    },
    /// Scale-`j` mother atom circularly translated by `shift` samples.
    Translated {
        j: u32,
        shift: usize,
    },
    TranslatedScaling {
        shift: usize,
    },
    /// Scale `j`, orientation `l`, location `k`.
    Oriented {
        j: u32,
        l: u32,
        k: usize,
    },
}

impl FrameIndex {
    pub fn is_scaling(&self) -> bool {
        matches!(
            self,
            FrameIndex::Scaling { .. }
                | FrameIndex::ShiftedScaling { .. }
                | FrameIndex::TranslatedScaling { .. }
        )
    }

    /// Scale of a multiscale detail index.
    pub fn scale(&self) -> Option<u32> {
        match *self {
            FrameIndex::Wavelet { j, .. }
            | FrameIndex::Shifted { j, .. }
            | FrameIndex::Translated { j, .. }
            | FrameIndex::Oriented { j, .. } => Some(j),
            _ => None,
        }
    }
}

impl fmt::Display for FrameIndex {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            FrameIndex::Flat { i } => write!(f, "{i}"),
            FrameIndex::Scaling { k } => write!(f, "s,{k}"),
            FrameIndex::Wavelet { j, k } => write!(f, "{j},{k}"),
            FrameIndex::ShiftedScaling { k, m } => write!(f, "s,{k},{m}"),
            FrameIndex::Shifted { j, k, m } => write!(f, "{j},{k},{m}"),
            FrameIndex::Translated { j, shift } => write!(f, "{j},t{shift}"),
            FrameIndex::TranslatedScaling { shift } => write!(f, "s,t{shift}"),
            FrameIndex::Oriented { j, l, k } => write!(f, "{j},{l},{k}"),
        }
    }
}

/// Bijection between frame indices and positions in a coefficient array.
#[derive(Debug, Clone)]
pub struct IndexLayout {
    indices: Vec<FrameIndex>,
    lookup: HashMap<FrameIndex, usize>,
    scaling_mask: Vec<bool>,
}

impl IndexLayout {
    pub fn new(indices: Vec<FrameIndex>) -> Result<Self> {
        let mut lookup = HashMap::with_capacity(indices.len());
        for (pos, idx) in indices.iter().enumerate() {
            if lookup.insert(*idx, pos).is_some() {
                return Err(Error::InvalidFrame(format!("duplicate index {idx}")));
            }
        }
        let scaling_mask = indices.iter().map(FrameIndex::is_scaling).collect();
        Ok(Self {
            indices,
            lookup,
            scaling_mask,
        })
    }

    pub fn flat(count: usize) -> Self {
        Self::new((0..count).map(|i| FrameIndex::Flat { i }).collect())
            .expect("flat indices are distinct")
    }

    pub fn len(&self) -> usize {
        self.indices.len()
    }

    pub fn is_empty(&self) -> bool {
        self.indices.is_empty()
    }

    pub fn index(&self, pos: usize) -> FrameIndex {
        self.indices[pos]
    }

    pub fn position(&self, idx: &FrameIndex) -> Option<usize> {
        self.lookup.get(idx).copied()
    }

    pub fn indices(&self) -> &[FrameIndex] {
        &self.indices
    }

    pub fn is_scaling(&self, pos: usize) -> bool {
        self.scaling_mask[pos]
    }

    pub fn scaling_mask(&self) -> &[bool] {
        &self.scaling_mask
    }

    pub fn detail_count(&self) -> usize {
        self.scaling_mask.iter().filter(|s| !**s).count()
    }
}

impl PartialEq for IndexLayout {
    fn eq(&self, other: &Self) -> bool {
        self.indices == other.indices
    }
}

/// Coefficients `x(ω)` together with the index set they live on.
#[derive(Debug, Clone)]
pub struct CoefficientVector {
    values: Vec<f64>,
    layout: Arc<IndexLayout>,
}

impl CoefficientVector {
    pub fn new(values: Vec<f64>, layout: Arc<IndexLayout>) -> Result<Self> {
        if values.len() != layout.len() {
            return Err(Error::DimensionMismatch {
                expected: layout.len(),
                actual: values.len(),
            });
        }
        Ok(Self { values, layout })
    }

    pub fn zeros(layout: Arc<IndexLayout>) -> Self {
        Self {
            values: vec![0.0; layout.len()],
            layout,
        }
    }

    pub fn count(&self) -> usize {
        self.values.len()
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn values_mut(&mut self) -> &mut [f64] {
        &mut self.values
    }

    pub fn into_values(self) -> Vec<f64> {
        self.values
    }

    pub fn layout(&self) -> &Arc<IndexLayout> {
        &self.layout
    }

    pub fn get(&self, idx: &FrameIndex) -> Option<f64> {
        self.layout.position(idx).map(|p| self.values[p])
    }

    pub fn same_index_set(&self, other: &CoefficientVector) -> bool {
        Arc::ptr_eq(&self.layout, &other.layout) || *self.layout == *other.layout
    }

    /// Largest magnitude, optionally skipping scaling coefficients.
    pub fn max_abs(&self, include_scaling: bool) -> f64 {
        self.values
            .iter()
            .zip(self.layout.scaling_mask())
            .filter(|(_, s)| include_scaling || !**s)
            .fold(0.0_f64, |acc, (v, _)| acc.max(v.abs()))
    }

    pub fn with_values(&self, values: Vec<f64>) -> Result<Self> {
        Self::new(values, Arc::clone(&self.layout))
    }
}
