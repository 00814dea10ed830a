//! Smoothness functionals on coefficient vectors: weighted ℓ² and
//! scale-weighted mixed ℓ^{p,q} norms.

use std::collections::BTreeMap;
use std::path::PathBuf;
use std::sync::Arc;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::error::{invalid, Error, Result};
use crate::signal::{CoefficientVector, FrameIndex, IndexLayout};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum NormKind {
    /// `√(Σ c(ω) |x(ω)|²)`; weights default to one.
    WeightedL2 {
        #[serde(default, skip_serializing_if = "Option::is_none")]
        weights: Option<Vec<f64>>,
        /// File with one weight per line, read by the caller.
        #[serde(default, skip_serializing_if = "Option::is_none")]
        weights_path: Option<PathBuf>,
    },
    /// `(Σ_j 2^{jsq} ‖x(j,·)‖_p^q)^{1/q}`, `s = r + 1/2 - 1/p`.
    PqrWavelet { p: f64, q: f64, r: f64 },
    /// `(Σ_{j,l} 2^{jsq} ‖x(j,l,·)‖_p^q)^{1/q}`, `s = r + (3/2)(1/2 - 1/p)`.
    PqrOriented { p: f64, q: f64, r: f64 },
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct NormSpec {
    #[serde(flatten)]
    pub kind: NormKind,
    /// Scaling coefficients are left out unless this is set.
    #[serde(default)]
    pub include_scaling: bool,
}

impl NormSpec {
    pub fn weighted_l2(weights: Option<Vec<f64>>) -> Self {
        Self {
            kind: NormKind::WeightedL2 {
                weights,
                weights_path: None,
            },
            include_scaling: false,
        }
    }

    pub fn pqr_wavelet(p: f64, q: f64, r: f64) -> Self {
        Self {
            kind: NormKind::PqrWavelet { p, q, r },
            include_scaling: false,
        }
    }

    pub fn pqr_oriented(p: f64, q: f64, r: f64) -> Self {
        Self {
            kind: NormKind::PqrOriented { p, q, r },
            include_scaling: false,
        }
    }

    pub fn from_json(text: &str) -> Result<Self> {
        serde_json::from_str(text).map_err(|e| Error::Parse(e.to_string()))
    }

    /// Scale exponent `s` of the mixed-norm kinds.
    pub fn smoothness_exponent(&self) -> Option<f64> {
        match self.kind {
            NormKind::WeightedL2 { .. } => None,
            NormKind::PqrWavelet { p, r, .. } => Some(r + 0.5 - 1.0 / p),
            NormKind::PqrOriented { p, r, .. } => Some(r + 1.5 * (0.5 - 1.0 / p)),
        }
    }

    fn validate(&self) -> Result<()> {
        match &self.kind {
            NormKind::WeightedL2 { weights, .. } => {
                if let Some(w) = weights
                    .iter()
                    .flatten()
                    .find(|w| !(**w > 0.0 && w.is_finite()))
                {
                    return Err(invalid("weights", format!("weight {w} is not positive")));
                }
            }
            NormKind::PqrWavelet { p, q, r } | NormKind::PqrOriented { p, q, r } => {
                for (name, v) in [("p", p), ("q", q)] {
                    if !(*v >= 1.0 && v.is_finite()) {
                        return Err(invalid(name, format!("{v} must be a finite value >= 1")));
                    }
                }
                if !(*r >= 0.0 && r.is_finite()) {
                    return Err(invalid("r", format!("{r} must be >= 0")));
                }
            }
        }
        Ok(())
    }
}

/// Evaluates the functional on `coeffs`.
pub fn evaluate(spec: &NormSpec, coeffs: &CoefficientVector) -> Result<f64> {
    spec.validate()?;
    let layout = coeffs.layout();
    let keep = |pos: usize| spec.include_scaling || !layout.is_scaling(pos);
    match &spec.kind {
        NormKind::WeightedL2 { weights, .. } => {
            if let Some(w) = weights {
                if w.len() != coeffs.count() {
                    return Err(Error::DimensionMismatch {
                        expected: coeffs.count(),
                        actual: w.len(),
                    });
                }
            }
            let total: f64 = coeffs
                .values()
                .iter()
                .enumerate()
                .filter(|(pos, _)| keep(*pos))
                .map(|(pos, x)| weights.as_ref().map_or(1.0, |w| w[pos]) * x * x)
                .sum();
            Ok(total.sqrt())
        }
        NormKind::PqrWavelet { p, q, .. } | NormKind::PqrOriented { p, q, .. } => {
            let oriented = matches!(spec.kind, NormKind::PqrOriented { .. });
            let s = spec.smoothness_exponent().expect("mixed norm");
            // (scale, orientation) -> Σ |x|^p; scaling coefficients use scale 0
            let mut blocks: BTreeMap<(u32, u32), f64> = BTreeMap::new();
            for (pos, (idx, x)) in layout.indices().iter().zip(coeffs.values()).enumerate() {
                if !keep(pos) {
                    continue;
                }
                let key = block_key(idx, oriented)?;
                *blocks.entry(key).or_default() += x.abs().powf(*p);
            }
            let total: f64 = blocks
                .iter()
                .map(|(&(j, _), sum)| (j as f64 * s * q).exp2() * sum.powf(q / p))
                .sum();
            Ok(total.powf(1.0 / q))
        }
    }
}

fn block_key(idx: &FrameIndex, oriented: bool) -> Result<(u32, u32)> {
    match (*idx, oriented) {
        (
            FrameIndex::Scaling { .. }
            | FrameIndex::ShiftedScaling { .. }
            | FrameIndex::TranslatedScaling { .. },
            _,
        ) => Ok((0, u32::MAX)),
        (
            FrameIndex::Wavelet { j, .. }
            | FrameIndex::Shifted { j, .. }
            | FrameIndex::Translated { j, .. },
            false,
        ) => Ok((j, 0)),
        (FrameIndex::Oriented { j, l, .. }, true) => Ok((j, l)),
        _ => Err(Error::IndexMismatch),
    }
}

/// Outcome of the randomized domination check.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct MonotonicityCertificate {
    pub monotone: bool,
    pub pairs_checked: usize,
    pub violations: usize,
}

pub const CERTIFICATE_PAIRS: usize = 1000;

/// Draws random pairs with `|x(ω)| <= |x̄(ω)|` on a layout matching the kind
/// and checks `evaluate(x) <= evaluate(x̄)`.
pub fn is_monotone(spec: &NormSpec, seed: u64) -> Result<MonotonicityCertificate> {
    spec.validate()?;
    let layout = Arc::new(sample_layout(spec)?);
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut violations = 0;
    for _ in 0..CERTIFICATE_PAIRS {
        let big: Vec<f64> = (0..layout.len())
            .map(|_| rng.gen_range(-3.0..3.0))
            .collect();
        let small: Vec<f64> = big
            .iter()
            .map(|b| {
                let frac: f64 = rng.gen_range(0.0..=1.0);
                let sign = if rng.gen_bool(0.5) { 1.0 } else { -1.0 };
                sign * frac * b.abs()
            })
            .collect();
        let jb = evaluate(spec, &CoefficientVector::new(big, Arc::clone(&layout))?)?;
        let js = evaluate(spec, &CoefficientVector::new(small, Arc::clone(&layout))?)?;
        if js > jb * (1.0 + 1e-12) {
            violations += 1;
        }
    }
    Ok(MonotonicityCertificate {
        monotone: violations == 0,
        pairs_checked: CERTIFICATE_PAIRS,
        violations,
    })
}

fn sample_layout(spec: &NormSpec) -> Result<IndexLayout> {
    match &spec.kind {
        NormKind::WeightedL2 { weights, .. } => {
            Ok(IndexLayout::flat(weights.as_ref().map_or(64, Vec::len)))
        }
        NormKind::PqrWavelet { .. } => {
            let mut idx = vec![FrameIndex::Scaling { k: 0 }];
            for j in 0..6 {
                idx.extend((0..1usize << j).map(|k| FrameIndex::Wavelet { j, k }));
            }
            IndexLayout::new(idx)
        }
        NormKind::PqrOriented { .. } => {
            let mut idx = Vec::new();
            for j in 0..4 {
                for l in 0..4 {
                    idx.extend((0..8).map(|k| FrameIndex::Oriented { j, l, k }));
                }
            }
            IndexLayout::new(idx)
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn json_forms() {
        let s = NormSpec::from_json(r#"{"kind":"pqr_wavelet","p":1,"q":1,"r":0}"#).unwrap();
        assert_eq!(s, NormSpec::pqr_wavelet(1.0, 1.0, 0.0));
        let s = NormSpec::from_json(r#"{"kind":"weighted_l2"}"#).unwrap();
        assert_eq!(s, NormSpec::weighted_l2(None));
    }

    #[test]
    fn rejects_bad_parameters() {
        let layout = Arc::new(IndexLayout::flat(2));
        let c = CoefficientVector::zeros(layout);
        assert!(evaluate(&NormSpec::weighted_l2(Some(vec![1.0, 0.0])), &c).is_err());
        assert!(evaluate(&NormSpec::pqr_wavelet(0.5, 1.0, 0.0), &c).is_err());
        assert_eq!(
            evaluate(&NormSpec::pqr_wavelet(1.0, 1.0, 0.0), &c).unwrap_err(),
            Error::IndexMismatch
        );
    }
}
